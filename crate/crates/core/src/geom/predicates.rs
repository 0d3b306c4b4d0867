//! Exact orientation and incircle tests.
//!
//! Both predicates use adaptive expansion arithmetic, so the sign of the
//! result is exact for any finite input and identical on every IEEE-754
//! platform. Zero means exactly collinear / cocircular.

use std::cmp::Ordering;

use super::Point2;

/// Positive when `a`, `b`, `c` turn counterclockwise.
pub fn orient2d(a: Point2, b: Point2, c: Point2) -> f64 {
    robust::orient2d(a.robust(), b.robust(), c.robust())
}

/// Positive when `d` lies strictly inside the circle through the
/// counterclockwise triangle `a`, `b`, `c`.
pub fn incircle(a: Point2, b: Point2, c: Point2, d: Point2) -> f64 {
    robust::incircle(a.robust(), b.robust(), c.robust(), d.robust())
}

/// Sign of [`orient2d`] as an ordering (`Greater` = counterclockwise).
pub fn orientation(a: Point2, b: Point2, c: Point2) -> Ordering {
    orient2d(a, b, c)
        .partial_cmp(&0.0)
        .unwrap_or(Ordering::Equal)
}

/// Circumcenter of a non-degenerate triangle, computed relative to `a` to
/// keep cancellation small.
pub fn circumcenter(a: Point2, b: Point2, c: Point2) -> Point2 {
    let ab = b - a;
    let ac = c - a;
    let d = 2.0 * ab.cross(ac);
    let (b2, c2) = (ab.norm2(), ac.norm2());
    let ux = (ac.y * b2 - ab.y * c2) / d;
    let uy = (ab.x * c2 - ac.x * b2) / d;
    Point2::new(a.x + ux, a.y + uy)
}
