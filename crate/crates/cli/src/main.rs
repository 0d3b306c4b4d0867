//! `nucleus`: tessellate site sets, list nucleus clusters, validate the
//! cluster properties and render meshes.
//!
//! Exit codes: 0 on success, 1 when validation finds a failing check, 2 on
//! usage or input errors.

mod json;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use nucleus_core::clusters::{
    all_nucleus_clusters, maximal_of, nucleus_cluster, validate_clusters,
};
use nucleus_core::descriptors::{Descriptor, GrayImage, RegionDescriptor};
use nucleus_core::geom::{tessellate, BoundingBox, Point2, Tessellation};
use nucleus_core::ingestion::{load_pgm, parse_sites_csv, sites_from_image, sites_random};
use nucleus_core::proximity::MatchTolerance;

use json::{ClustersDoc, MeshDoc, ReportDoc};

#[derive(Parser)]
#[command(
    name = "nucleus",
    version,
    about = "Voronoi nucleus clusters and their proximities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the tessellation and write it as JSON.
    Tessellate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// List nucleus clusters, flagging the maximal ones.
    Clusters {
        #[command(flatten)]
        input: Input,
        /// Only emit the cluster with this nucleus.
        #[arg(long)]
        nucleus: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Run the property checks and write a report. Exits 1 on any failure.
    Validate {
        #[command(flatten)]
        input: Input,
        /// Clusters JSON to check as stored instead of rebuilding them.
        #[arg(long, value_name = "PATH")]
        clusters: Option<PathBuf>,
        #[command(flatten)]
        matching: Matching,
        #[command(flatten)]
        output: Output,
    },
    /// Draw the mesh with maximal clusters highlighted.
    Render {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
#[group(id = "source", required = true, multiple = false)]
struct Source {
    /// CSV of `x,y` lines, or a mesh JSON whose sites and box are reused.
    #[arg(long, group = "source", value_name = "PATH")]
    sites: Option<PathBuf>,
    /// Number of uniform random sites.
    #[arg(long, group = "source", value_name = "N")]
    random: Option<usize>,
    /// PGM image to pick sites from by gradient magnitude.
    #[arg(long, group = "source", value_name = "PATH")]
    image: Option<PathBuf>,
    /// Mesh JSON used as stored, without rebuilding.
    #[arg(long, group = "source", value_name = "PATH")]
    mesh: Option<PathBuf>,
}

#[derive(Args)]
struct Input {
    #[command(flatten)]
    source: Source,
    /// Seed for --random.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of sites taken from --image.
    #[arg(long, default_value_t = 100)]
    k: usize,
    /// Minimum pixel distance between sites taken from --image.
    #[arg(long = "min-sep", default_value_t = 0.0)]
    min_sep: f64,
    /// Clipping box as `xmin,ymin,xmax,ymax`.
    #[arg(long, value_parser = parse_bbox, allow_hyphen_values = true)]
    bbox: Option<BoundingBox>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DescriptorArg {
    /// Each region described by its generating site.
    Point,
    /// Each region described by area, diameter and edge count.
    Region,
}

#[derive(Args)]
struct Matching {
    #[arg(long, value_enum, default_value_t = DescriptorArg::Region)]
    descriptor: DescriptorArg,
    /// Keep the centroid in region descriptors, so only nearby regions match.
    #[arg(long)]
    with_location: bool,
    /// Relative tolerance for real-valued features.
    #[arg(long, default_value_t = 0.05)]
    tol_scalar: f64,
    /// Tolerance for orientations, in degrees.
    #[arg(long, default_value_t = 10.0)]
    tol_angle: f64,
    /// Absolute tolerance for counts.
    #[arg(long, default_value_t = 0)]
    tol_count: u32,
}

#[derive(Args)]
struct Output {
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Also write an SVG drawing here.
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
}

fn parse_bbox(s: &str) -> Result<BoundingBox, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let [x0, y0, x1, y1] = v[..] else {
        return Err("expected xmin,ymin,xmax,ymax".into());
    };
    BoundingBox::from_bounds(x0, y0, x1, y1).map_err(|e| e.to_string())
}

/// A tessellation plus the image it came from, if any.
struct Loaded {
    mesh: Tessellation,
    image: Option<GrayImage>,
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn looks_like_json(path: &Path, text: &str) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        || text.trim_start().starts_with('{')
}

impl Input {
    fn load(&self) -> Result<Loaded> {
        let s = &self.source;
        if let Some(path) = &s.mesh {
            let doc = json::parse_mesh(&read_text(path)?)?;
            if self.bbox.is_some() {
                bail!("--bbox cannot be combined with --mesh");
            }
            return Ok(Loaded {
                mesh: doc.to_tessellation()?,
                image: None,
            });
        }
        let (sites, default_box, image): (Vec<Point2>, Option<BoundingBox>, _) =
            if let Some(path) = &s.sites {
                let text = read_text(path)?;
                if looks_like_json(path, &text) {
                    let doc = json::parse_mesh(&text)?;
                    (doc.site_points(), Some(doc.bounding_box()?), None)
                } else {
                    let sites =
                        parse_sites_csv(&text).with_context(|| format!("{}", path.display()))?;
                    let bbox = if sites.is_empty() {
                        None
                    } else {
                        Some(BoundingBox::around(&sites, 0.1)?)
                    };
                    (sites, bbox, None)
                }
            } else if let Some(n) = s.random {
                if n == 0 {
                    bail!("--random needs at least one site");
                }
                let bbox = match self.bbox {
                    Some(b) => b,
                    None => BoundingBox::from_bounds(0.0, 0.0, 1.0, 1.0)?,
                };
                (sites_random(n, &bbox, self.seed), Some(bbox), None)
            } else if let Some(path) = &s.image {
                let img = load_pgm(path)?;
                let sites = sites_from_image(&img, self.k, self.min_sep)?;
                (sites, Some(*img.frame().bbox()), Some(img))
            } else {
                unreachable!("clap requires one source")
            };
        let bbox = self
            .bbox
            .or(default_box)
            .ok_or_else(|| anyhow!("no sites to tessellate"))?;
        let mesh = tessellate(&sites, bbox)?;
        Ok(Loaded { mesh, image })
    }
}

impl Matching {
    fn tolerance(&self) -> Result<MatchTolerance> {
        Ok(MatchTolerance::new(
            self.tol_scalar,
            self.tol_angle.to_radians(),
            self.tol_count,
        )?)
    }

    fn descriptor(&self) -> Descriptor {
        match self.descriptor {
            DescriptorArg::Point => Descriptor::Site,
            DescriptorArg::Region => Descriptor::Region(RegionDescriptor {
                include_location: self.with_location,
            }),
        }
    }
}

impl Output {
    fn write(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => {
                std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))
            }
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn write_svg(&self, t: &Tessellation) -> Result<()> {
        if let Some(p) = &self.svg {
            let svg = svg::render(t, &maximal_of(all_nucleus_clusters(t)));
            std::fs::write(p, svg).with_context(|| format!("cannot write {}", p.display()))?;
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Tessellate { input, output } => {
            let t = input.load()?.mesh;
            for w in t.warnings() {
                eprintln!("warning: {w}");
            }
            output.write(&json::to_string(&MeshDoc::from_tessellation(&t)))?;
            output.write_svg(&t)?;
        }
        Command::Clusters {
            input,
            nucleus,
            output,
        } => {
            let t = input.load()?.mesh;
            let all = all_nucleus_clusters(&t);
            let max = all.iter().map(|c| c.adjacency_count()).max().unwrap_or(0);
            let shown = match nucleus {
                Some(n) => vec![nucleus_cluster(&t, n)?],
                None => all,
            };
            output.write(&json::to_string(&ClustersDoc::new(&t, &shown, max)))?;
            output.write_svg(&t)?;
        }
        Command::Validate {
            input,
            clusters,
            matching,
            output,
        } => {
            let Loaded { mesh: t, image } = input.load()?;
            let tol = matching.tolerance()?;
            let phi = matching.descriptor();
            let frame = image.as_ref().map(|i| i.frame());
            let img = image.as_ref().zip(frame.as_ref());
            let clusters = match &clusters {
                Some(p) => json::parse_clusters(&read_text(p)?)?.to_clusters(&t)?,
                None => all_nucleus_clusters(&t),
            };
            let report = validate_clusters(&t, &clusters, phi, &tol, img);
            output.write(&json::to_string(&ReportDoc::new(
                &report,
                phi.name(),
                &tol,
                t.len(),
            )))?;
            output.write_svg(&t)?;
            for c in report.failures() {
                eprintln!("check {} failed: {:?}", c.id, c.counterexample);
            }
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Render { input, output } => {
            let t = input.load()?.mesh;
            let svg = svg::render(&t, &maximal_of(all_nucleus_clusters(&t)));
            match (&output.svg, &output.out) {
                (Some(p), _) | (None, Some(p)) => std::fs::write(p, svg)
                    .with_context(|| format!("cannot write {}", p.display()))?,
                (None, None) => print!("{svg}"),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
