use super::{BoundingBox, Point2};

/// Relative tolerance below which a turn counts as straight.
const STRAIGHT_SINE: f64 = 1e-12;
/// Polygons thinner than this (relative to their scale) collapse to a segment.
const SLIVER_REL: f64 = 1e-9;
/// Consecutive vertices closer than this (relative) are merged.
const MERGE_REL: f64 = 1e-12;

/// A convex polygon with counterclockwise vertices.
///
/// Zero, one and two vertices stand for the empty set, a single point and a
/// segment respectively; all three are convex.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    /// Wraps `vertices` as given. Use [`is_convex`] to check the result.
    pub fn new(vertices: Vec<Point2>) -> Self {
        Self { vertices }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_box(bbox: &BoundingBox) -> Self {
        Self::new(bbox.corners().to_vec())
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn into_vertices(self) -> Vec<Point2> {
        self.vertices
    }

    /// Edges as `(start, end)` pairs, closing back to the first vertex.
    /// A segment yields its single edge; points and the empty set yield none.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        let count = match n {
            0 | 1 => 0,
            2 => 1,
            _ => n,
        };
        (0..count).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace area, positive for counterclockwise order.
    pub fn signed_area(&self) -> f64 {
        if self.vertices.len() < 3 {
            return 0.0;
        }
        let o = self.vertices[0];
        self.vertices
            .windows(2)
            .skip(1)
            .map(|w| (w[0] - o).cross(w[1] - o))
            .sum::<f64>()
            * 0.5
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// Area centroid; falls back to the vertex mean for degenerate inputs.
    pub fn centroid(&self) -> Option<Point2> {
        let n = self.vertices.len();
        if n == 0 {
            return None;
        }
        let o = self.vertices[0];
        let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
        for w in self.vertices.windows(2).skip(1) {
            let (p, q) = (w[0] - o, w[1] - o);
            let c = p.cross(q);
            a2 += c;
            cx += (p.x + q.x) * c;
            cy += (p.y + q.y) * c;
        }
        if n >= 3 && a2 != 0.0 {
            Some(Point2::new(o.x + cx / (3.0 * a2), o.y + cy / (3.0 * a2)))
        } else {
            let s = self
                .vertices
                .iter()
                .fold(Point2::default(), |acc, &p| acc + p);
            Some(s * (1.0 / n as f64))
        }
    }

    /// Largest distance between any two vertices.
    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut best = 0.0f64;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                best = best.max(v[i].distance(v[j]));
            }
        }
        best
    }

    /// Boundary-inclusive containment with an absolute slack `tol`.
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        match self.vertices.len() {
            0 => false,
            1 => self.vertices[0].distance(p) <= tol,
            2 => point_segment_distance(p, self.vertices[0], self.vertices[1]) <= tol,
            _ => self.edges().all(|(a, b)| {
                let e = b - a;
                let len = e.norm();
                len == 0.0 || e.cross(p - a) / len >= -tol
            }),
        }
    }

    /// Distance from `p` to the nearest boundary point.
    pub fn boundary_distance(&self, p: Point2) -> f64 {
        match self.vertices.len() {
            0 => f64::INFINITY,
            1 => self.vertices[0].distance(p),
            _ => self
                .edges()
                .map(|(a, b)| point_segment_distance(p, a, b))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Largest absolute coordinate, used to scale tolerances.
    pub(crate) fn scale(&self) -> f64 {
        self.vertices
            .iter()
            .map(|p| p.x.abs().max(p.y.abs()))
            .fold(0.0, f64::max)
    }
}

pub(crate) fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let e = b - a;
    let len2 = e.norm2();
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(e) / len2).clamp(0.0, 1.0);
    p.distance(a + e * t)
}

/// Convexity test: every non-straight turn has the same sign and the
/// boundary winds exactly once. Up to two vertices is convex by definition.
pub fn is_convex(p: &ConvexPolygon) -> bool {
    let v: Vec<Point2> = {
        let mut v = p.vertices().to_vec();
        v.dedup();
        while v.len() > 1 && v.first() == v.last() {
            v.pop();
        }
        v
    };
    let n = v.len();
    if n <= 2 {
        return true;
    }
    let mut sign = 0.0f64;
    let mut turning = 0.0f64;
    for i in 0..n {
        let e1 = v[(i + 1) % n] - v[i];
        let e2 = v[(i + 2) % n] - v[(i + 1) % n];
        let c = e1.cross(e2);
        turning += c.atan2(e1.dot(e2));
        if c.abs() <= STRAIGHT_SINE * e1.norm() * e2.norm() {
            // A straight continuation is harmless; a reversal is not.
            if e1.dot(e2) < 0.0 {
                return false;
            }
            continue;
        }
        if sign == 0.0 {
            sign = c.signum();
        } else if c.signum() != sign {
            return false;
        }
    }
    (turning.abs() - std::f64::consts::TAU).abs() < 1e-6
}

/// Keeps the part of a convex `polygon` where `(x - origin) . normal <= 0`.
pub(crate) fn clip_halfplane(polygon: &[Point2], origin: Point2, normal: Point2) -> Vec<Point2> {
    clip_by(polygon, |p| (p - origin).dot(normal), |_| {}, 0.0)
}

/// Clips a convex polygon to the box, snapping cut points onto its sides.
pub(crate) fn clip_to_box(polygon: &[Point2], bbox: &BoundingBox) -> Vec<Point2> {
    let (lo, hi) = (bbox.min(), bbox.max());
    let p = clip_by(polygon, |p| lo.x - p.x, |p| p.x = lo.x, 0.0);
    let p = clip_by(&p, |p| p.x - hi.x, |p| p.x = hi.x, 0.0);
    let p = clip_by(&p, |p| lo.y - p.y, |p| p.y = lo.y, 0.0);
    clip_by(&p, |p| p.y - hi.y, |p| p.y = hi.y, 0.0)
}

/// Sutherland-Hodgman step against one half-plane `side(p) <= 0`.
///
/// Vertices with `|side| <= on_line` count as lying on the clip line. Cut points are interpolated from the endpoint nearer the clip line, which
/// keeps them accurate when the other endpoint is very far away.
fn clip_by(
    polygon: &[Point2],
    side: impl Fn(Point2) -> f64,
    snap: impl Fn(&mut Point2),
    on_line: f64,
) -> Vec<Point2> {
    let n = polygon.len();
    let mut out = Vec::with_capacity(n + 2);
    if n == 0 {
        return out;
    }
    let dist: Vec<f64> = polygon
        .iter()
        .map(|&p| side(p))
        .map(|d| if d.abs() <= on_line { 0.0 } else { d })
        .collect();
    for i in 0..n {
        let j = (i + 1) % n;
        let (a, b) = (polygon[i], polygon[j]);
        let (da, db) = (dist[i], dist[j]);
        if da <= 0.0 {
            out.push(a);
        }
        if n > 1 && (da < 0.0 && db > 0.0 || da > 0.0 && db < 0.0) {
            let mut cut = if da.abs() <= db.abs() {
                a + (b - a) * (da / (da - db))
            } else {
                b + (a - b) * (db / (db - da))
            };
            snap(&mut cut);
            out.push(cut);
        }
        if n == 2 {
            // a segment has a single edge
            if db <= 0.0 {
                out.push(b);
            }
            break;
        }
    }
    out
}

/// Normalizes a convex vertex loop: merges coincident neighbours, drops
/// straight vertices and collapses slivers to their two extreme points.
pub(crate) fn tidy(vertices: Vec<Point2>, scale: f64) -> Vec<Point2> {
    let merge = MERGE_REL * scale;
    let mut v: Vec<Point2> = Vec::with_capacity(vertices.len());
    for p in vertices {
        if v.last().is_none_or(|q: &Point2| q.distance(p) > merge) {
            v.push(p);
        }
    }
    while v.len() > 1 && v[0].distance(v[v.len() - 1]) <= merge {
        v.pop();
    }
    if v.len() < 3 {
        return v;
    }

    // Degenerate loops (all points on one line) become a segment.
    let (mut ia, mut ib, mut far) = (0, 1, -1.0f64);
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let d = v[i].distance(v[j]);
            if d > far {
                (ia, ib, far) = (i, j, d);
            }
        }
    }
    let (a, b) = (v[ia], v[ib]);
    let width = v
        .iter()
        .map(|&p| ((b - a).cross(p - a) / far).abs())
        .fold(0.0, f64::max);
    if width <= SLIVER_REL * scale {
        return vec![a, b];
    }

    let mut changed = true;
    while changed && v.len() > 3 {
        changed = false;
        let n = v.len();
        for i in 0..n {
            let (a, b, c) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
            let (e1, e2) = (b - a, c - b);
            if e1.cross(e2).abs() <= STRAIGHT_SINE * e1.norm() * e2.norm() && e1.dot(e2) > 0.0 {
                v.remove(i);
                changed = true;
                break;
            }
        }
    }
    v
}

/// Intersection of two convex sets. The result may be empty, a point, a
/// segment or a polygon, and is always convex.
pub fn convex_intersection(a: &ConvexPolygon, b: &ConvexPolygon) -> ConvexPolygon {
    let scale = a.scale().max(b.scale()).max(f64::MIN_POSITIVE);
    let tol = 1e-12 * scale;
    let (small, big) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let out = match (small.len(), big.len()) {
        (0, _) => Vec::new(),
        (1, _) => {
            let p = small.vertices()[0];
            if big.contains(p, tol) {
                vec![p]
            } else {
                Vec::new()
            }
        }
        (2, 2) => segment_intersection(small.vertices(), big.vertices(), tol),
        _ => {
            let mut clipped = small.vertices().to_vec();
            let mut cutter = big.vertices().to_vec();
            if big.signed_area() < 0.0 {
                cutter.reverse();
            }
            let n = cutter.len();
            for i in 0..n {
                let (p, q) = (cutter[i], cutter[(i + 1) % n]);
                if p == q {
                    continue;
                }
                let normal = (q - p).perp_cw();
                let unit = normal * (1.0 / normal.norm());
                // near-contact counts as contact
                clipped = clip_by(&clipped, |x| (x - p).dot(unit), |_| {}, tol);
                if clipped.is_empty() {
                    break;
                }
            }
            clipped
        }
    };
    let mut out = tidy(out, scale);
    if out.len() >= 3 && ConvexPolygon::new(out.clone()).signed_area() < 0.0 {
        out.reverse();
    }
    ConvexPolygon::new(out)
}

fn segment_intersection(s: &[Point2], t: &[Point2], tol: f64) -> Vec<Point2> {
    let (p, r) = (s[0], s[1] - s[0]);
    let (q, u) = (t[0], t[1] - t[0]);
    let denom = r.cross(u);
    let rn = r.norm();
    if denom.abs() <= STRAIGHT_SINE * rn * u.norm() {
        // parallel: overlap only if collinear
        if rn == 0.0 || (r.cross(q - p) / rn).abs() > tol {
            return Vec::new();
        }
        let proj = |x: Point2| (x - p).dot(r) / (rn * rn);
        let (t0, t1) = {
            let (a, b) = (proj(q), proj(q + u));
            (a.min(b).max(0.0), a.max(b).min(1.0))
        };
        if t0 > t1 + tol / rn {
            return Vec::new();
        }
        return vec![p + r * t0, p + r * t1.max(t0)];
    }
    let ts = (q - p).cross(u) / denom;
    let tt = (q - p).cross(r) / denom;
    let slack_s = tol / rn.max(f64::MIN_POSITIVE);
    let slack_t = tol / u.norm().max(f64::MIN_POSITIVE);
    if (-slack_s..=1.0 + slack_s).contains(&ts) && (-slack_t..=1.0 + slack_t).contains(&tt) {
        vec![p + r * ts.clamp(0.0, 1.0)]
    } else {
        Vec::new()
    }
}
