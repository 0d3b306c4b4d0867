//! Site sets from CSV files, a seeded generator or grayscale images.

mod pgm;

use std::io::ErrorKind;
use std::path::{Path, PathBuf};

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use thiserror::Error;

use crate::descriptors::{gradient_magnitude, GrayImage};
use crate::geom::{BoundingBox, Point2};

pub use pgm::{load_pgm, parse_pgm};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("image is {width}x{height}, at least 3x3 is needed")]
    ImageTooSmall { width: usize, height: usize },
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt image header: {0}")]
    CorruptHeader(String),
    #[error("corrupt image data: {0}")]
    CorruptData(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>, IngestError> {
    std::fs::read(path).map_err(|e| match e.kind() {
        ErrorKind::NotFound => IngestError::FileNotFound(path.to_path_buf()),
        _ => IngestError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        },
    })
}

/// Where the generating points come from.
#[derive(Debug, Clone, PartialEq)]
pub enum SiteSource {
    Csv {
        path: PathBuf,
    },
    Random {
        count: usize,
        seed: u64,
        bbox: BoundingBox,
    },
    Image {
        path: PathBuf,
        count: usize,
        min_sep: f64,
    },
}

/// Sites plus, for image sources, the image they were picked from.
#[derive(Debug, Clone, PartialEq)]
pub struct Sites {
    pub points: Vec<Point2>,
    pub image: Option<GrayImage>,
}

impl SiteSource {
    pub fn resolve(&self) -> Result<Sites, IngestError> {
        match self {
            SiteSource::Csv { path } => Ok(Sites {
                points: sites_from_csv(path)?,
                image: None,
            }),
            SiteSource::Random { count, seed, bbox } => {
                if *count == 0 {
                    return Err(IngestError::InvalidParameter(
                        "count must be at least 1".into(),
                    ));
                }
                Ok(Sites {
                    points: sites_random(*count, bbox, *seed),
                    image: None,
                })
            }
            SiteSource::Image {
                path,
                count,
                min_sep,
            } => {
                let img = load_pgm(path)?;
                let points = sites_from_image(&img, *count, *min_sep)?;
                Ok(Sites {
                    points,
                    image: Some(img),
                })
            }
        }
    }
}

/// Reads `x,y` lines. Blank lines and lines starting with `#` are skipped.
pub fn sites_from_csv(path: impl AsRef<Path>) -> Result<Vec<Point2>, IngestError> {
    let bytes = read_file(path.as_ref())?;
    let text = String::from_utf8(bytes).map_err(|e| IngestError::ParseError {
        line: 0,
        message: format!("not UTF-8: {e}"),
    })?;
    parse_sites_csv(&text)
}

pub fn parse_sites_csv(text: &str) -> Result<Vec<Point2>, IngestError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| IngestError::ParseError {
            line: k + 1,
            message,
        };
        let mut fields = line.split(',');
        let (Some(x), Some(y), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(err(format!("expected \"x,y\", got {line:?}")));
        };
        let num = |s: &str| -> Result<f64, IngestError> {
            match s.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(err(format!("not a finite number: {:?}", s.trim()))),
            }
        };
        out.push(Point2::new(num(x)?, num(y)?));
    }
    Ok(out)
}

/// `n` points uniform over `bbox` from xoshiro256** seeded through
/// SplitMix64. Each point draws x then y.
pub fn sites_random(n: usize, bbox: &BoundingBox, seed: u64) -> Vec<Point2> {
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let (lo, w, h) = (bbox.min(), bbox.width(), bbox.height());
    (0..n)
        .map(|_| {
            let u = open_unit(rng.next_u64());
            let v = open_unit(rng.next_u64());
            let p = Point2::new(lo.x + u * w, lo.y + v * h);
            // rounding can land a hair outside on huge coordinates
            Point2::new(p.x.min(bbox.max().x), p.y.min(bbox.max().y))
        })
        .collect()
}

/// Top 52 bits mapped to cell midpoints, so the result is never 0 or 1.
/// With 53 bits the last midpoint would round up to 1.0.
fn open_unit(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Up to `k` sites at the interior pixels of strongest Sobel gradient,
/// keeping every pair at least `min_sep` pixels apart.
///
/// Candidates are ranked by decreasing magnitude with ties in row-major
/// order, then accepted greedily. Sites sit at pixel centres in the image
/// frame `[0, width] x [0, height]`.
pub fn sites_from_image(
    img: &GrayImage,
    k: usize,
    min_sep: f64,
) -> Result<Vec<Point2>, IngestError> {
    let (w, h) = (img.width(), img.height());
    if w < 3 || h < 3 {
        return Err(IngestError::ImageTooSmall {
            width: w,
            height: h,
        });
    }
    if k == 0 {
        return Err(IngestError::InvalidParameter("k must be at least 1".into()));
    }
    if !(min_sep.is_finite() && min_sep >= 0.0) {
        return Err(IngestError::InvalidParameter(format!(
            "min_sep {min_sep} must be finite and >= 0"
        )));
    }
    let mut candidates = Vec::with_capacity((w - 2) * (h - 2));
    for py in 1..h - 1 {
        for px in 1..w - 1 {
            let m = gradient_magnitude(img, px, py).expect("interior pixel");
            candidates.push((m, px, py));
        }
    }
    // stable, so equal magnitudes stay in row-major order
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));

    let sep2 = min_sep * min_sep;
    let mut picked: Vec<(usize, usize)> = Vec::new();
    for &(_, px, py) in &candidates {
        if picked.len() == k {
            break;
        }
        let clear = picked.iter().all(|&(qx, qy)| {
            let (dx, dy) = (px as f64 - qx as f64, py as f64 - qy as f64);
            dx * dx + dy * dy >= sep2
        });
        if clear {
            picked.push((px, py));
        }
    }
    let frame = img.frame();
    Ok(picked
        .into_iter()
        .map(|(px, py)| frame.pixel_center(px, py))
        .collect())
}
