//! JSON documents written and read by the command line tool.

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

use nucleus_core::clusters::{NucleusCluster, ValidationReport};
use nucleus_core::geom::{BoundingBox, ConvexPolygon, Neighbor, Point2, Tessellation};
use nucleus_core::proximity::MatchTolerance;

pub const SCHEMA_VERSION: u32 = 1;

type Xy = [f64; 2];

fn xy(p: Point2) -> Xy {
    [p.x, p.y]
}

fn pt(a: Xy) -> Point2 {
    Point2::new(a[0], a[1])
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MeshDoc {
    pub schema_version: u32,
    /// `[xmin, ymin, xmax, ymax]`
    pub bbox: [f64; 4],
    pub sites: Vec<Xy>,
    pub regions: Vec<RegionDoc>,
    pub adjacency: Vec<EdgeDoc>,
    /// Region index of every input site, after duplicate merging.
    #[serde(default)]
    pub site_map: Vec<usize>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RegionDoc {
    pub site: usize,
    pub vertices: Vec<Xy>,
    pub neighbors: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub a: usize,
    pub b: usize,
    pub length: f64,
    pub segment: [Xy; 2],
}

impl MeshDoc {
    pub fn from_tessellation(t: &Tessellation) -> Self {
        let (lo, hi) = (t.bbox().min(), t.bbox().max());
        Self {
            schema_version: SCHEMA_VERSION,
            bbox: [lo.x, lo.y, hi.x, hi.y],
            sites: t.sites().iter().copied().map(xy).collect(),
            regions: (0..t.len())
                .map(|i| RegionDoc {
                    site: i,
                    vertices: t.regions()[i].vertices().iter().copied().map(xy).collect(),
                    neighbors: t.neighbors(i).iter().map(|n| n.region).collect(),
                })
                .collect(),
            adjacency: t
                .adjacency_pairs()
                .into_iter()
                .map(|(a, b, n)| EdgeDoc {
                    a,
                    b,
                    length: n.length,
                    segment: n.segment.map(xy),
                })
                .collect(),
            site_map: t.site_map().to_vec(),
            warnings: t.warnings().to_vec(),
        }
    }

    pub fn bounding_box(&self) -> Result<BoundingBox> {
        let [x0, y0, x1, y1] = self.bbox;
        Ok(BoundingBox::from_bounds(x0, y0, x1, y1)?)
    }

    pub fn site_points(&self) -> Vec<Point2> {
        self.sites.iter().copied().map(pt).collect()
    }

    /// The stored tessellation exactly as written, without recomputation.
    /// Neighbour lists are taken from the regions, so a hand-edited file can
    /// carry an inconsistent adjacency.
    pub fn to_tessellation(&self) -> Result<Tessellation> {
        ensure!(
            self.schema_version == SCHEMA_VERSION,
            "unsupported schema_version {}",
            self.schema_version
        );
        let n = self.sites.len();
        ensure!(
            self.regions.len() == n,
            "{} regions for {} sites",
            self.regions.len(),
            n
        );
        let mut neighbors = Vec::with_capacity(n);
        for (i, r) in self.regions.iter().enumerate() {
            ensure!(r.site == i, "region {i} names site {}", r.site);
            let mut list = Vec::new();
            for &j in &r.neighbors {
                if j >= n {
                    bail!("region {i} lists neighbour {j}, but there are {n} regions");
                }
                let edge = self
                    .adjacency
                    .iter()
                    .find(|e| (e.a, e.b) == (i, j) || (e.a, e.b) == (j, i));
                list.push(match edge {
                    Some(e) => Neighbor {
                        region: j,
                        segment: e.segment.map(pt),
                        length: e.length,
                    },
                    None => Neighbor {
                        region: j,
                        segment: [pt(self.sites[i]); 2],
                        length: 0.0,
                    },
                });
            }
            neighbors.push(list);
        }
        let regions = self
            .regions
            .iter()
            .map(|r| ConvexPolygon::new(r.vertices.iter().copied().map(pt).collect()))
            .collect();
        Ok(Tessellation::from_parts(
            self.site_points(),
            regions,
            self.bounding_box()?,
            neighbors,
        ))
    }
}

pub fn parse_mesh(text: &str) -> Result<MeshDoc> {
    serde_json::from_str(text).context("not a mesh document")
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ClustersDoc {
    pub schema_version: u32,
    /// Hex identity of the sites and box the clusters were built on.
    pub mesh: String,
    pub max_adjacency_count: usize,
    pub clusters: Vec<ClusterDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ClusterDoc {
    pub nucleus: usize,
    pub members: Vec<usize>,
    pub adjacency_count: usize,
    pub maximal: bool,
}

impl ClustersDoc {
    pub fn new(t: &Tessellation, clusters: &[NucleusCluster], max_adjacency_count: usize) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            mesh: mesh_id(t),
            max_adjacency_count,
            clusters: clusters
                .iter()
                .map(|c| ClusterDoc {
                    nucleus: c.nucleus(),
                    members: c.members().iter().copied().collect(),
                    adjacency_count: c.adjacency_count(),
                    maximal: c.adjacency_count() == max_adjacency_count,
                })
                .collect(),
        }
    }

    /// The stored clusters, exactly as written, for the mesh `t`.
    pub fn to_clusters(&self, t: &Tessellation) -> Result<Vec<NucleusCluster>> {
        ensure!(
            self.schema_version == SCHEMA_VERSION,
            "unsupported schema_version {}",
            self.schema_version
        );
        ensure!(
            self.mesh == mesh_id(t),
            "clusters were built on a different mesh"
        );
        Ok(self
            .clusters
            .iter()
            .map(|c| {
                let members = c.members.iter().copied().collect();
                NucleusCluster::from_parts(t, c.nucleus, members, c.adjacency_count)
            })
            .collect())
    }
}

pub fn mesh_id(t: &Tessellation) -> String {
    format!("{:016x}", t.fingerprint())
}

pub fn parse_clusters(text: &str) -> Result<ClustersDoc> {
    serde_json::from_str(text).context("not a clusters document")
}

#[derive(Debug, Serialize)]
pub struct ReportDoc {
    pub schema_version: u32,
    pub descriptor: &'static str,
    pub tolerance: ToleranceDoc,
    pub regions: usize,
    pub passed: bool,
    pub checks: Vec<CheckDoc>,
}

#[derive(Debug, Serialize)]
pub struct ToleranceDoc {
    pub scalar_rel: f64,
    pub angle_deg: f64,
    pub count_abs: u32,
}

#[derive(Debug, Serialize)]
pub struct CheckDoc {
    pub id: &'static str,
    pub status: &'static str,
    pub cases: usize,
    pub counterexample: Option<CounterexampleDoc>,
}

#[derive(Debug, Serialize)]
pub struct CounterexampleDoc {
    pub regions: Vec<usize>,
    pub nuclei: Vec<usize>,
    pub note: String,
}

impl ReportDoc {
    pub fn new(
        r: &ValidationReport,
        descriptor: &'static str,
        tol: &MatchTolerance,
        regions: usize,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            descriptor,
            tolerance: ToleranceDoc {
                scalar_rel: tol.scalar_rel(),
                angle_deg: tol.angle_abs().to_degrees(),
                count_abs: tol.count_abs(),
            },
            regions,
            passed: r.passed(),
            checks: r
                .checks
                .iter()
                .map(|c| CheckDoc {
                    id: c.id,
                    status: c.status.as_str(),
                    cases: c.cases,
                    counterexample: c.counterexample.as_ref().map(|x| CounterexampleDoc {
                        regions: x.regions.clone(),
                        nuclei: x.nuclei.clone(),
                        note: x.note.clone(),
                    }),
                })
                .collect(),
        }
    }
}

pub fn to_string<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}
