//! Planar geometry: points, convex polygons, Delaunay triangulation and
//! bounded Voronoi tessellations.

mod delaunay;
mod point;
mod polygon;
pub mod predicates;
mod voronoi;

use std::collections::HashMap;

use thiserror::Error;

pub use delaunay::{delaunay_triangulate, Triangulation, DUPLICATE_REL};
pub use point::{BoundingBox, Point2};
pub use polygon::{convex_intersection, is_convex, ConvexPolygon};
pub use voronoi::{
    tessellate, voronoi_bruteforce, voronoi_from_delaunay, Neighbor, Tessellation, ADJACENCY_REL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("need at least {needed} distinct sites, found {found}")]
    TooFewSites { found: usize, needed: usize },
    #[error("all sites are collinear")]
    DegenerateInput,
    #[error("site {index} at {point} lies outside the bounding box")]
    SiteOutsideBox { index: usize, point: Point2 },
    #[error("bounding box {min}..{max} has no area")]
    InvalidBoundingBox { min: Point2, max: Point2 },
    #[error("non-finite coordinate ({x}, {y})")]
    NonFiniteCoordinate { x: f64, y: f64 },
}

/// Merges sites within `tol` of an earlier kept site.
///
/// Returns the kept sites, the input-to-kept index map and one warning per
/// merged site.
pub(crate) fn merge_duplicates(
    sites: &[Point2],
    tol: f64,
) -> (Vec<Point2>, Vec<usize>, Vec<String>) {
    let mut kept: Vec<Point2> = Vec::with_capacity(sites.len());
    let mut map = Vec::with_capacity(sites.len());
    let mut warnings = Vec::new();
    let cell_of = |p: Point2| -> (i64, i64) {
        if tol > 0.0 {
            ((p.x / tol).floor() as i64, (p.y / tol).floor() as i64)
        } else {
            (p.x.to_bits() as i64, p.y.to_bits() as i64)
        }
    };
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, &p) in sites.iter().enumerate() {
        let (cx, cy) = cell_of(p);
        let reach = if tol > 0.0 { 1 } else { 0 };
        let mut hit: Option<usize> = None;
        for dx in -reach..=reach {
            for dy in -reach..=reach {
                let key = (cx.saturating_add(dx), cy.saturating_add(dy));
                if let Some(list) = grid.get(&key) {
                    for &k in list {
                        if kept[k].distance(p) <= tol && hit.is_none_or(|h| k < h) {
                            hit = Some(k);
                        }
                    }
                }
            }
        }
        match hit {
            Some(k) => {
                warnings.push(format!(
                    "site {i} at {p} duplicates kept site {k} at {}; merged",
                    kept[k]
                ));
                map.push(k);
            }
            None => {
                grid.entry((cx, cy)).or_default().push(kept.len());
                map.push(kept.len());
                kept.push(p);
            }
        }
    }
    (kept, map, warnings)
}
