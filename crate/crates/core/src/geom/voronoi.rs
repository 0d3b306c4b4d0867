//! Bounded Voronoi tessellations.
//!
//! Two constructions share one output type: the dual of a Delaunay
//! triangulation (circumcenters chained around each site) and the direct
//! half-plane intersection, which doubles as the oracle and as the fallback
//! for one or two sites and collinear input.

use super::polygon::{clip_halfplane, clip_to_box, tidy};
use super::{
    delaunay_triangulate, merge_duplicates, BoundingBox, ConvexPolygon, GeomError, Point2,
    Triangulation, DUPLICATE_REL,
};

/// Shared boundaries shorter than this (relative to the box extent) do not
/// make two regions adjacent. Corner contact has length zero.
pub const ADJACENCY_REL: f64 = 1e-9;
/// Distance (relative) within which a region vertex counts as lying on a
/// bisector.
const ON_BISECTOR_REL: f64 = 1e-10;

/// A neighbouring region and the boundary segment shared with it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub region: usize,
    pub segment: [Point2; 2],
    pub length: f64,
}

/// Sites, their clipped Voronoi regions and the region adjacency graph.
///
/// A built tessellation is immutable; the only mutation hook is
/// [`Tessellation::neighbors_mut`], which exists for fault injection.
#[derive(Debug, Clone, PartialEq)]
pub struct Tessellation {
    sites: Vec<Point2>,
    regions: Vec<ConvexPolygon>,
    bbox: BoundingBox,
    neighbors: Vec<Vec<Neighbor>>,
    site_map: Vec<usize>,
    warnings: Vec<String>,
    fingerprint: u64,
}

impl Tessellation {
    /// Assembles a tessellation from stored parts without recomputing or
    /// checking anything. Neighbour lists are sorted by region index.
    pub fn from_parts(
        sites: Vec<Point2>,
        regions: Vec<ConvexPolygon>,
        bbox: BoundingBox,
        mut neighbors: Vec<Vec<Neighbor>>,
    ) -> Self {
        for list in &mut neighbors {
            list.sort_by_key(|n| n.region);
        }
        let site_map = (0..sites.len()).collect();
        let fingerprint = fingerprint(&sites, &bbox);
        Self {
            sites,
            regions,
            bbox,
            neighbors,
            site_map,
            warnings: Vec::new(),
            fingerprint,
        }
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn sites(&self) -> &[Point2] {
        &self.sites
    }

    pub fn regions(&self) -> &[ConvexPolygon] {
        &self.regions
    }

    pub fn region(&self, i: usize) -> Option<&ConvexPolygon> {
        self.regions.get(i)
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }

    /// Neighbours of region `i`, sorted by index. Panics on a bad index.
    pub fn neighbors(&self, i: usize) -> &[Neighbor] {
        &self.neighbors[i]
    }

    /// Mutable access to the stored adjacency. Breaks the symmetry invariant
    /// if misused; intended for fault-injection tests.
    pub fn neighbors_mut(&mut self) -> &mut Vec<Vec<Neighbor>> {
        &mut self.neighbors
    }

    /// Whether `j` is stored in the neighbour list of `i`.
    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.neighbors
            .get(i)
            .is_some_and(|l| l.binary_search_by_key(&j, |n| n.region).is_ok())
    }

    /// Stored adjacencies with `i < j`, read from the lists of `i`.
    pub fn adjacency_pairs(&self) -> Vec<(usize, usize, Neighbor)> {
        let mut out = Vec::new();
        for (i, list) in self.neighbors.iter().enumerate() {
            for n in list.iter().filter(|n| n.region > i) {
                out.push((i, n.region, *n));
            }
        }
        out
    }

    /// For every input site, the region that represents it after merging.
    pub fn site_map(&self) -> &[usize] {
        &self.site_map
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Identity hash of the sites and box; clusters carry it to detect mixing.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Absolute length below which a shared boundary is ignored.
    pub fn length_tolerance(&self) -> f64 {
        ADJACENCY_REL * self.bbox.extent()
    }

    /// Index of the region whose interior holds `p` by more than `margin`.
    pub fn locate(&self, p: Point2, margin: f64) -> Option<usize> {
        self.regions
            .iter()
            .position(|r| r.contains(p, -margin) && r.boundary_distance(p) > margin)
    }
}

fn fingerprint(sites: &[Point2], bbox: &BoundingBox) -> u64 {
    // FNV-1a over the raw coordinate bits
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |v: f64| {
        for b in v.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    for c in [bbox.min(), bbox.max()] {
        eat(c.x);
        eat(c.y);
    }
    for p in sites {
        eat(p.x);
        eat(p.y);
    }
    h
}

fn tolerance_scale(bbox: &BoundingBox) -> f64 {
    let (lo, hi) = (bbox.min(), bbox.max());
    bbox.extent()
        .max(lo.x.abs())
        .max(lo.y.abs())
        .max(hi.x.abs())
        .max(hi.y.abs())
}

fn check_inside(sites: &[Point2], bbox: &BoundingBox) -> Result<(), GeomError> {
    for (index, &point) in sites.iter().enumerate() {
        if !point.is_finite() {
            return Err(GeomError::NonFiniteCoordinate {
                x: point.x,
                y: point.y,
            });
        }
        if !bbox.contains(point) {
            return Err(GeomError::SiteOutsideBox { index, point });
        }
    }
    Ok(())
}

/// Tessellates `sites` inside `bbox`, choosing the construction.
///
/// Sites within [`DUPLICATE_REL`] of the box extent are merged first. Three
/// or more non-collinear sites go through the Delaunay dual; everything else
/// goes through [`voronoi_bruteforce`].
pub fn tessellate(sites: &[Point2], bbox: BoundingBox) -> Result<Tessellation, GeomError> {
    check_inside(sites, &bbox)?;
    let (distinct, site_map, warnings) = merge_duplicates(sites, DUPLICATE_REL * bbox.extent());
    let mut t = match delaunay_triangulate(&distinct) {
        Ok(tri) => voronoi_from_delaunay(&tri, bbox)?,
        Err(GeomError::TooFewSites { .. } | GeomError::DegenerateInput) => {
            voronoi_bruteforce(&distinct, bbox)?
        }
        Err(e) => return Err(e),
    };
    t.site_map = site_map;
    t.warnings = warnings;
    Ok(t)
}

/// Voronoi regions as duals of the Delaunay triangles, clipped to `bbox`.
pub fn voronoi_from_delaunay(
    tri: &Triangulation,
    bbox: BoundingBox,
) -> Result<Tessellation, GeomError> {
    let sites = tri.sites();
    check_inside(sites, &bbox)?;
    let scale = tolerance_scale(&bbox);
    let incident = tri.incident_triangles();
    let regions: Vec<ConvexPolygon> = (0..sites.len())
        .map(|v| {
            let raw = dual_cell(tri, v, incident[v], &bbox);
            ConvexPolygon::new(tidy(clip_to_box(&raw, &bbox), scale))
        })
        .collect();
    let neighbors = adjacency(sites, &regions, &bbox, tri.edges());
    Ok(Tessellation {
        fingerprint: fingerprint(sites, &bbox),
        sites: sites.to_vec(),
        regions,
        bbox,
        neighbors,
        site_map: tri.site_map().to_vec(),
        warnings: tri.warnings().to_vec(),
    })
}

/// Unclipped (but bounded) cell of site `v`: circumcenters around `v`, with
/// hull cells closed off along a box comfortably larger than `bbox`.
fn dual_cell(tri: &Triangulation, v: usize, start: usize, bbox: &BoundingBox) -> Vec<Point2> {
    let (fan, on_hull) = tri.fan(v, start);
    let centers: Vec<Point2> = fan.iter().map(|&(t, _)| tri.circumcenter(t)).collect();
    if !on_hull {
        return centers;
    }
    let tris = tri.triangles();
    let s = tri.sites()[v];
    let (t0, k0) = fan[0];
    let (tl, kl) = fan[fan.len() - 1];
    let next = tri.sites()[tris[t0][(k0 + 1) % 3]];
    let prev = tri.sites()[tris[tl][(kl + 2) % 3]];
    let out_first = (next - s).perp_cw();
    let out_last = (s - prev).perp_cw();

    let (mut lo, mut hi) = (bbox.min(), bbox.max());
    for c in &centers {
        lo = Point2::new(lo.x.min(c.x), lo.y.min(c.y));
        hi = Point2::new(hi.x.max(c.x), hi.y.max(c.y));
    }
    let pad = bbox.extent();
    let far = Far {
        lo: Point2::new(lo.x - pad, lo.y - pad),
        hi: Point2::new(hi.x + pad, hi.y + pad),
    };
    let enter = far.ray_exit(centers[0], out_first);
    let leave = far.ray_exit(centers[centers.len() - 1], out_last);

    let mut cell = Vec::with_capacity(centers.len() + 6);
    cell.push(enter);
    cell.extend_from_slice(&centers);
    cell.push(leave);
    cell.extend(far.arc(leave, enter));
    cell
}

/// The large closing box used for hull cells.
struct Far {
    lo: Point2,
    hi: Point2,
}

impl Far {
    fn ray_exit(&self, from: Point2, dir: Point2) -> Point2 {
        let tx = if dir.x > 0.0 {
            (self.hi.x - from.x) / dir.x
        } else if dir.x < 0.0 {
            (self.lo.x - from.x) / dir.x
        } else {
            f64::INFINITY
        };
        let ty = if dir.y > 0.0 {
            (self.hi.y - from.y) / dir.y
        } else if dir.y < 0.0 {
            (self.lo.y - from.y) / dir.y
        } else {
            f64::INFINITY
        };
        if tx <= ty {
            let x = if dir.x > 0.0 { self.hi.x } else { self.lo.x };
            Point2::new(x, (from.y + dir.y * tx).clamp(self.lo.y, self.hi.y))
        } else {
            let y = if dir.y > 0.0 { self.hi.y } else { self.lo.y };
            Point2::new((from.x + dir.x * ty).clamp(self.lo.x, self.hi.x), y)
        }
    }

    /// Counterclockwise perimeter coordinate, starting at the lower-left corner.
    fn perimeter_pos(&self, p: Point2) -> f64 {
        let (w, h) = (self.hi.x - self.lo.x, self.hi.y - self.lo.y);
        if p.y == self.lo.y {
            p.x - self.lo.x
        } else if p.x == self.hi.x {
            w + (p.y - self.lo.y)
        } else if p.y == self.hi.y {
            w + h + (self.hi.x - p.x)
        } else {
            2.0 * w + h + (self.hi.y - p.y)
        }
    }

    /// Box corners met walking counterclockwise from `from` to `to`.
    fn arc(&self, from: Point2, to: Point2) -> Vec<Point2> {
        let (w, h) = (self.hi.x - self.lo.x, self.hi.y - self.lo.y);
        let per = 2.0 * (w + h);
        let start = self.perimeter_pos(from);
        let span = (self.perimeter_pos(to) - start).rem_euclid(per);
        let corners = [
            (0.0, self.lo),
            (w, Point2::new(self.hi.x, self.lo.y)),
            (w + h, self.hi),
            (2.0 * w + h, Point2::new(self.lo.x, self.hi.y)),
        ];
        let mut hits: Vec<(f64, Point2)> = corners
            .iter()
            .map(|&(pos, c)| ((pos - start).rem_euclid(per), c))
            .filter(|&(off, _)| off > 0.0 && off < span)
            .collect();
        hits.sort_by(|a, b| a.0.total_cmp(&b.0));
        hits.into_iter().map(|(_, c)| c).collect()
    }
}

/// Voronoi regions straight from the definition: the box cut by the
/// bisector half-plane of every other site.
pub fn voronoi_bruteforce(sites: &[Point2], bbox: BoundingBox) -> Result<Tessellation, GeomError> {
    check_inside(sites, &bbox)?;
    let (distinct, site_map, warnings) = merge_duplicates(sites, DUPLICATE_REL * bbox.extent());
    if distinct.is_empty() {
        return Err(GeomError::TooFewSites {
            found: 0,
            needed: 1,
        });
    }
    let scale = tolerance_scale(&bbox);
    let regions: Vec<ConvexPolygon> = distinct
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let mut cell = bbox.corners().to_vec();
            for (j, &q) in distinct.iter().enumerate() {
                if j != i {
                    cell = clip_halfplane(&cell, s.midpoint(q), q - s);
                }
            }
            ConvexPolygon::new(tidy(cell, scale))
        })
        .collect();
    let n = distinct.len();
    let candidates = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let neighbors = adjacency(&distinct, &regions, &bbox, candidates);
    Ok(Tessellation {
        fingerprint: fingerprint(&distinct, &bbox),
        sites: distinct,
        regions,
        bbox,
        neighbors,
        site_map,
        warnings,
    })
}

/// Builds symmetric neighbour lists from candidate pairs `(i, j)`, `i < j`.
fn adjacency(
    sites: &[Point2],
    regions: &[ConvexPolygon],
    bbox: &BoundingBox,
    candidates: Vec<(usize, usize)>,
) -> Vec<Vec<Neighbor>> {
    let scale = tolerance_scale(bbox);
    let min_len = ADJACENCY_REL * bbox.extent();
    let boxes: Vec<(Point2, Point2)> = regions
        .iter()
        .map(|r| vertex_bounds(r.vertices()))
        .collect();
    let slack = ON_BISECTOR_REL * scale;
    let mut out = vec![Vec::new(); regions.len()];
    for (i, j) in candidates {
        let (a, b) = (boxes[i], boxes[j]);
        if a.0.x > b.1.x + slack
            || b.0.x > a.1.x + slack
            || a.0.y > b.1.y + slack
            || b.0.y > a.1.y + slack
        {
            continue;
        }
        let Some(segment) = shared_segment(&regions[i], sites[i], sites[j], slack) else {
            continue;
        };
        let length = segment[0].distance(segment[1]);
        if length > min_len {
            out[i].push(Neighbor {
                region: j,
                segment,
                length,
            });
            out[j].push(Neighbor {
                region: i,
                segment,
                length,
            });
        }
    }
    for list in &mut out {
        list.sort_by_key(|n| n.region);
    }
    out
}

fn vertex_bounds(v: &[Point2]) -> (Point2, Point2) {
    v.iter().fold(
        (
            Point2::new(f64::INFINITY, f64::INFINITY),
            Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        ),
        |(lo, hi), p| {
            (
                Point2::new(lo.x.min(p.x), lo.y.min(p.y)),
                Point2::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        },
    )
}

/// Part of `region`'s boundary on the bisector of `s` and `q`, as the two
/// extreme vertices lying on it.
fn shared_segment(region: &ConvexPolygon, s: Point2, q: Point2, slack: f64) -> Option<[Point2; 2]> {
    let d = q - s;
    let unit = d * (1.0 / d.norm());
    let m = s.midpoint(q);
    let along = unit.perp_cw();
    let mut lo: Option<(f64, Point2)> = None;
    let mut hi: Option<(f64, Point2)> = None;
    for &v in region.vertices() {
        if ((v - m).dot(unit)).abs() <= slack {
            let t = (v - m).dot(along);
            if lo.is_none_or(|(x, _)| t < x) {
                lo = Some((t, v));
            }
            if hi.is_none_or(|(x, _)| t > x) {
                hi = Some((t, v));
            }
        }
    }
    Some([lo?.1, hi?.1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bx(x0: f64, y0: f64, x1: f64, y1: f64) -> BoundingBox {
        BoundingBox::from_bounds(x0, y0, x1, y1).unwrap()
    }

    fn grid(n: usize) -> Vec<Point2> {
        (0..n)
            .flat_map(|j| (0..n).map(move |i| Point2::new(i as f64, j as f64)))
            .collect()
    }

    #[test]
    fn single_site_owns_the_box() {
        let t = tessellate(&[Point2::new(0.3, 0.3)], bx(0.0, 0.0, 1.0, 1.0)).unwrap();
        assert_eq!(t.len(), 1);
        assert!((t.regions()[0].area() - 1.0).abs() < 1e-15);
        assert!(t.neighbors(0).is_empty());
    }

    #[test]
    fn two_sites_split_at_the_bisector() {
        let t = tessellate(
            &[Point2::new(0.0, 0.0), Point2::new(2.0, 0.0)],
            bx(-1.0, -2.0, 3.0, 2.0),
        )
        .unwrap();
        let r0 = &t.regions()[0];
        for c in [(-1.0, -2.0), (1.0, -2.0), (1.0, 2.0), (-1.0, 2.0)] {
            assert!(
                r0.vertices().iter().any(|v| v.distance(c.into()) < 1e-12),
                "{r0:?}"
            );
        }
        assert_eq!(r0.len(), 4);
        assert!(t.is_adjacent(0, 1) && t.is_adjacent(1, 0));
        assert!((t.neighbors(0)[0].length - 4.0).abs() < 1e-12);
    }

    #[test]
    fn three_by_three_grid() {
        let t = tessellate(&grid(3), bx(-0.5, -0.5, 2.5, 2.5)).unwrap();
        for r in t.regions() {
            assert_eq!(r.len(), 4);
            assert!((r.area() - 1.0).abs() < 1e-12);
        }
        let center: Vec<usize> = t.neighbors(4).iter().map(|n| n.region).collect();
        assert_eq!(center, vec![1, 3, 5, 7]);
        assert_eq!(t.adjacency_pairs().len(), 12);
        // corner contact only
        assert!(!t.is_adjacent(4, 0));
    }

    #[test]
    fn collinear_sites_use_half_planes() {
        let sites: Vec<Point2> = (0..4).map(|i| Point2::new(i as f64, i as f64)).collect();
        let t = tessellate(&sites, bx(-1.0, -1.0, 4.0, 4.0)).unwrap();
        assert_eq!(t.len(), 4);
        let area: f64 = t.regions().iter().map(|r| r.area()).sum();
        assert!((area - 25.0).abs() < 1e-9);
        assert_eq!(t.adjacency_pairs().len(), 3);
    }

    #[test]
    fn site_outside_box_is_rejected() {
        let e = tessellate(&[Point2::new(5.0, 0.5)], bx(0.0, 0.0, 1.0, 1.0)).unwrap_err();
        assert!(matches!(e, GeomError::SiteOutsideBox { index: 0, .. }));
    }

    #[test]
    fn hull_arc_walks_counterclockwise() {
        let far = Far {
            lo: Point2::new(0.0, 0.0),
            hi: Point2::new(4.0, 2.0),
        };
        let arc = far.arc(Point2::new(0.0, 1.0), Point2::new(3.0, 0.0));
        assert_eq!(arc, vec![Point2::new(0.0, 0.0)]);
        let arc = far.arc(Point2::new(3.0, 0.0), Point2::new(0.0, 1.0));
        assert_eq!(
            arc,
            vec![
                Point2::new(4.0, 0.0),
                Point2::new(4.0, 2.0),
                Point2::new(0.0, 2.0)
            ]
        );
    }

    #[test]
    fn duplicates_are_reported() {
        let s = [
            Point2::new(0.2, 0.2),
            Point2::new(0.8, 0.8),
            Point2::new(0.2, 0.2),
        ];
        let t = tessellate(&s, bx(0.0, 0.0, 1.0, 1.0)).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.site_map(), &[0, 1, 0]);
        assert_eq!(t.warnings().len(), 1);
    }
}
