use std::fmt;
use std::ops::{Add, Mul, Sub};

use super::GeomError;

/// A point (or vector) in the Euclidean plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Builds a point, rejecting NaN and infinite coordinates.
    pub fn try_new(x: f64, y: f64) -> Result<Self, GeomError> {
        if x.is_finite() && y.is_finite() {
            Ok(Self { x, y })
        } else {
            Err(GeomError::NonFiniteCoordinate { x, y })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }

    pub fn midpoint(self, other: Self) -> Self {
        Self::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    /// Rotates the vector a quarter turn clockwise.
    pub fn perp_cw(self) -> Self {
        Self::new(self.y, -self.x)
    }

    pub(crate) fn robust(self) -> robust::Coord<f64> {
        robust::Coord {
            x: self.x,
            y: self.y,
        }
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Self {
        Point2::new(x, y)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Axis-aligned rectangle with strictly positive area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    min: Point2,
    max: Point2,
}

impl BoundingBox {
    pub fn new(min: Point2, max: Point2) -> Result<Self, GeomError> {
        if !min.is_finite() || !max.is_finite() || !(min.x < max.x && min.y < max.y) {
            return Err(GeomError::InvalidBoundingBox { min, max });
        }
        Ok(Self { min, max })
    }

    pub fn from_bounds(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Result<Self, GeomError> {
        Self::new(Point2::new(xmin, ymin), Point2::new(xmax, ymax))
    }

    /// Smallest box holding `points`, grown by `margin` times its larger side
    /// (or by one unit when the points span no area).
    pub fn around(points: &[Point2], margin: f64) -> Result<Self, GeomError> {
        let first = points.first().ok_or(GeomError::TooFewSites {
            found: 0,
            needed: 1,
        })?;
        let (mut lo, mut hi) = (*first, *first);
        for p in points {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let span = (hi.x - lo.x).max(hi.y - lo.y);
        let pad = if span > 0.0 { span * margin } else { 1.0 };
        Self::from_bounds(lo.x - pad, lo.y - pad, hi.x + pad, hi.y + pad)
    }

    pub fn min(&self) -> Point2 {
        self.min
    }

    pub fn max(&self) -> Point2 {
        self.max
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Longer side; every relative tolerance in the crate is scaled by this,
    /// which is what "normalized units" means in the docs.
    pub fn extent(&self) -> f64 {
        self.width().max(self.height())
    }

    pub fn center(&self) -> Point2 {
        self.min.midpoint(self.max)
    }

    /// Boundary-inclusive containment.
    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Corners in counterclockwise order starting at `min`.
    pub fn corners(&self) -> [Point2; 4] {
        [
            self.min,
            Point2::new(self.max.x, self.min.y),
            self.max,
            Point2::new(self.min.x, self.max.y),
        ]
    }

    /// Maps a point into the unit square.
    pub fn normalize(&self, p: Point2) -> Point2 {
        Point2::new(
            (p.x - self.min.x) / self.width(),
            (p.y - self.min.y) / self.height(),
        )
    }
}
