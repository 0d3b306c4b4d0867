//! Incremental Delaunay triangulation.
//!
//! Sites are inserted in index order. Each insertion splits the containing
//! triangle (or edge), or fans out to the visible hull edges, and then
//! restores the empty-circumcircle property with Lawson flips. Every
//! decision goes through the exact predicates, so the result depends only
//! on the input bits.

use std::collections::HashMap;

use super::predicates::{circumcenter, incircle, orient2d};
use super::{merge_duplicates, GeomError, Point2};

/// Relative distance (to the site extent) under which two sites are merged.
pub const DUPLICATE_REL: f64 = 1e-9;

/// A Delaunay triangulation of deduplicated sites.
#[derive(Debug, Clone)]
pub struct Triangulation {
    sites: Vec<Point2>,
    triangles: Vec<[usize; 3]>,
    neighbors: Vec<[Option<usize>; 3]>,
    site_map: Vec<usize>,
    warnings: Vec<String>,
}

impl Triangulation {
    /// Distinct sites, in first-occurrence order.
    pub fn sites(&self) -> &[Point2] {
        &self.sites
    }

    /// Counterclockwise vertex triples.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// `neighbors()[t][k]` is the triangle across the edge opposite vertex `k`.
    pub fn neighbors(&self) -> &[[Option<usize>; 3]] {
        &self.neighbors
    }

    /// For every input site, the index of the distinct site it merged into.
    pub fn site_map(&self) -> &[usize] {
        &self.site_map
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn circumcenter(&self, t: usize) -> Point2 {
        let [a, b, c] = self.triangles[t];
        circumcenter(self.sites[a], self.sites[b], self.sites[c])
    }

    /// Undirected Delaunay edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .triangles
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Triangles around `v` in counterclockwise order, paired with the local
    /// slot of `v`. The flag is true when `v` lies on the convex hull, in
    /// which case the first triangle holds hull edge `v -> next` and the last
    /// holds hull edge `prev -> v`.
    pub fn fan(&self, v: usize, start: usize) -> (Vec<(usize, usize)>, bool) {
        let slot = |t: usize| self.triangles[t].iter().position(|&x| x == v).unwrap();
        // rewind clockwise to a hull edge, if any
        let mut first = start;
        let mut on_hull = false;
        loop {
            let k = slot(first);
            match self.neighbors[first][(k + 2) % 3] {
                None => {
                    on_hull = true;
                    break;
                }
                Some(p) if p == start => break,
                Some(p) => first = p,
            }
        }
        let mut fan = Vec::new();
        let mut t = first;
        loop {
            let k = slot(t);
            fan.push((t, k));
            match self.neighbors[t][(k + 1) % 3] {
                Some(n) if n != first => t = n,
                _ => break,
            }
        }
        (fan, on_hull)
    }

    /// One incident triangle for every site.
    pub(crate) fn incident_triangles(&self) -> Vec<usize> {
        let mut inc = vec![usize::MAX; self.sites.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                if inc[v] == usize::MAX {
                    inc[v] = t;
                }
            }
        }
        inc
    }
}

enum Location {
    Inside(usize),
    OnEdge(usize, usize),
    Outside,
}

struct Builder<'a> {
    pts: &'a [Point2],
    tris: Vec<[usize; 3]>,
    /// directed edge (a, b) -> triangle holding it in counterclockwise order
    half_edges: HashMap<(usize, usize), usize>,
    last: usize,
}

impl<'a> Builder<'a> {
    fn set(&mut self, t: usize, tri: [usize; 3]) {
        if t < self.tris.len() {
            let old = self.tris[t];
            for k in 0..3 {
                let e = (old[k], old[(k + 1) % 3]);
                if self.half_edges.get(&e) == Some(&t) {
                    self.half_edges.remove(&e);
                }
            }
            self.tris[t] = tri;
        } else {
            debug_assert_eq!(t, self.tris.len());
            self.tris.push(tri);
        }
        for k in 0..3 {
            self.half_edges.insert((tri[k], tri[(k + 1) % 3]), t);
        }
        self.last = t;
    }

    fn push(&mut self, tri: [usize; 3]) -> usize {
        let t = self.tris.len();
        self.set(t, tri);
        t
    }

    /// Triangle across the edge opposite slot `k` of `t`.
    fn across(&self, t: usize, k: usize) -> Option<usize> {
        let tri = self.tris[t];
        self.half_edges
            .get(&(tri[(k + 2) % 3], tri[(k + 1) % 3]))
            .copied()
    }

    fn classify(&self, t: usize, p: Point2) -> Result<Location, usize> {
        let tri = self.tris[t];
        let mut zero = None;
        for k in 0..3 {
            let o = orient2d(self.pts[tri[(k + 1) % 3]], self.pts[tri[(k + 2) % 3]], p);
            if o < 0.0 {
                return Err(k);
            }
            if o == 0.0 {
                zero = Some(k);
            }
        }
        Ok(match zero {
            Some(k) => Location::OnEdge(t, k),
            None => Location::Inside(t),
        })
    }

    fn locate(&self, p: Point2) -> Location {
        // visibility walk, falling back to a full scan if it wanders
        let mut t = self.last;
        for _ in 0..=self.tris.len() + 2 {
            match self.classify(t, p) {
                Ok(loc) => return loc,
                Err(k) => match self.across(t, k) {
                    Some(n) => t = n,
                    None => break,
                },
            }
        }
        for t in 0..self.tris.len() {
            if let Ok(loc) = self.classify(t, p) {
                return loc;
            }
        }
        Location::Outside
    }

    fn insert(&mut self, v: usize) {
        let p = self.pts[v];
        let mut fresh = Vec::new();
        match self.locate(p) {
            Location::Inside(t) => {
                let [a, b, c] = self.tris[t];
                self.set(t, [v, a, b]);
                fresh.push(t);
                fresh.push(self.push([v, b, c]));
                fresh.push(self.push([v, c, a]));
            }
            Location::OnEdge(t, k) => {
                let tri = self.tris[t];
                let (apex, a, b) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
                let other = self.across(t, k);
                self.set(t, [v, apex, a]);
                fresh.push(t);
                fresh.push(self.push([v, b, apex]));
                if let Some(u) = other {
                    let ut = self.tris[u];
                    let w = ut.into_iter().find(|&x| x != a && x != b).unwrap();
                    self.set(u, [v, a, w]);
                    fresh.push(u);
                    fresh.push(self.push([v, w, b]));
                }
            }
            Location::Outside => {
                let mut visible = Vec::new();
                for (t, tri) in self.tris.iter().enumerate() {
                    for k in 0..3 {
                        let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
                        if !self.half_edges.contains_key(&(b, a))
                            && orient2d(self.pts[a], self.pts[b], p) < 0.0
                        {
                            visible.push((t, a, b));
                        }
                    }
                }
                for (_, a, b) in visible {
                    fresh.push(self.push([v, b, a]));
                }
            }
        }
        self.legalize(v, fresh);
    }

    fn legalize(&mut self, v: usize, mut stack: Vec<usize>) {
        while let Some(t) = stack.pop() {
            let tri = self.tris[t];
            let Some(kv) = tri.iter().position(|&x| x == v) else {
                continue;
            };
            let (a, b) = (tri[(kv + 1) % 3], tri[(kv + 2) % 3]);
            let Some(&u) = self.half_edges.get(&(b, a)) else {
                continue;
            };
            let q = self.tris[u]
                .into_iter()
                .find(|&x| x != a && x != b)
                .unwrap();
            let (pv, pa, pb, pq) = (self.pts[v], self.pts[a], self.pts[b], self.pts[q]);
            let det = incircle(pv, pa, pb, pq);
            let flip = det > 0.0
                || det == 0.0
                    && v.min(q) < a.min(b)
                    && orient2d(pv, pa, pq) > 0.0
                    && orient2d(pv, pq, pb) > 0.0;
            if flip {
                self.set(t, [v, a, q]);
                self.set(u, [v, q, b]);
                stack.push(t);
                stack.push(u);
            }
        }
    }
}

/// Builds the Delaunay triangulation of `sites`.
///
/// Sites closer than [`DUPLICATE_REL`] times the site extent are merged,
/// keeping the lowest index. Cocircular quadruples keep the diagonal
/// touching the lowest site index.
pub fn delaunay_triangulate(sites: &[Point2]) -> Result<Triangulation, GeomError> {
    for p in sites {
        if !p.is_finite() {
            return Err(GeomError::NonFiniteCoordinate { x: p.x, y: p.y });
        }
    }
    let extent = site_extent(sites);
    let (pts, site_map, warnings) = merge_duplicates(sites, DUPLICATE_REL * extent);
    if pts.len() < 3 {
        return Err(GeomError::TooFewSites {
            found: pts.len(),
            needed: 3,
        });
    }
    let third = (2..pts.len())
        .find(|&k| orient2d(pts[0], pts[1], pts[k]) != 0.0)
        .ok_or(GeomError::DegenerateInput)?;

    let mut b = Builder {
        pts: &pts,
        tris: Vec::with_capacity(2 * pts.len()),
        half_edges: HashMap::with_capacity(6 * pts.len()),
        last: 0,
    };
    if orient2d(pts[0], pts[1], pts[third]) > 0.0 {
        b.push([0, 1, third]);
    } else {
        b.push([0, third, 1]);
    }
    for v in (2..pts.len()).filter(|&v| v != third) {
        b.insert(v);
    }

    let neighbors = (0..b.tris.len())
        .map(|t| [b.across(t, 0), b.across(t, 1), b.across(t, 2)])
        .collect();
    let triangles = b.tris;
    Ok(Triangulation {
        sites: pts,
        triangles,
        neighbors,
        site_map,
        warnings,
    })
}

fn site_extent(sites: &[Point2]) -> f64 {
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in sites {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (hi.x - lo.x).max(hi.y - lo.y).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point2> {
        v.iter().map(|&p| p.into()).collect()
    }

    #[test]
    fn single_triangle() {
        let t = delaunay_triangulate(&pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])).unwrap();
        assert_eq!(t.triangles(), &[[0, 1, 2]]);
        assert_eq!(t.neighbors(), &[[None, None, None]]);
    }

    #[test]
    fn square_keeps_lowest_index_diagonal() {
        let sq = pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let t = delaunay_triangulate(&sq).unwrap();
        assert_eq!(t.triangles().len(), 2);
        assert!(t.edges().contains(&(0, 2)));
        assert!(!t.edges().contains(&(1, 3)));
        // Both diagonals pass the non-strict test; the chosen one does too.
        for tri in t.triangles() {
            for (i, &p) in sq.iter().enumerate() {
                if !tri.contains(&i) {
                    assert!(incircle(sq[tri[0]], sq[tri[1]], sq[tri[2]], p) <= 0.0);
                }
            }
        }
    }

    #[test]
    fn square_in_other_order_still_prefers_lowest_index() {
        // 0 and 2 are now adjacent corners; diagonal must touch site 0.
        let sq = pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
        let t = delaunay_triangulate(&sq).unwrap();
        assert!(t.edges().contains(&(0, 3)), "{:?}", t.edges());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            delaunay_triangulate(&pts(&[(0.0, 0.0), (1.0, 1.0)])),
            Err(GeomError::TooFewSites { found: 2, .. })
        ));
        assert!(matches!(
            delaunay_triangulate(&pts(&[(0.0, 0.0), (1.0, 1.0), (0.0, 0.0), (1.0, 1.0)])),
            Err(GeomError::TooFewSites { found: 2, .. })
        ));
        assert!(matches!(
            delaunay_triangulate(&pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (5.0, 5.0)])),
            Err(GeomError::DegenerateInput)
        ));
    }

    #[test]
    fn duplicates_merge_to_lowest_index() {
        let t = delaunay_triangulate(&pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1e-12)]))
            .unwrap();
        assert_eq!(t.sites().len(), 3);
        assert_eq!(t.site_map(), &[0, 1, 2, 1]);
        assert_eq!(t.warnings().len(), 1);
    }

    #[test]
    fn collinear_prefix_then_offset_point() {
        let t = delaunay_triangulate(&pts(&[
            (0.0, 0.0),
            (1.0, 0.0),
            (2.0, 0.0),
            (3.0, 0.0),
            (1.5, 1.0),
        ]))
        .unwrap();
        assert_eq!(t.triangles().len(), 3);
        for tri in t.triangles() {
            let s = t.sites();
            assert!(orient2d(s[tri[0]], s[tri[1]], s[tri[2]]) > 0.0);
        }
    }

    #[test]
    fn fan_walks_around_vertex() {
        let g: Vec<Point2> = (0..3)
            .flat_map(|i| (0..3).map(move |j| Point2::new(i as f64, j as f64)))
            .collect();
        let t = delaunay_triangulate(&g).unwrap();
        let inc = t.incident_triangles();
        let (fan, hull) = t.fan(4, inc[4]);
        assert!(!hull);
        assert!(fan.len() >= 4);
        let (_, hull0) = t.fan(0, inc[0]);
        assert!(hull0);
    }
}
