//! Strong proximity, descriptive proximity and descriptive intersection.
//!
//! Two regions are strongly near when they are the same region or share a
//! boundary segment of positive length. Descriptive nearness compares
//! feature vectors entry by entry under a [`MatchTolerance`].

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};

use thiserror::Error;

use crate::descriptors::{
    point_descriptor, Descriptor, DescriptorError, FeatureKind, FeatureVector, GrayImage,
    ImageFrame, RegionDescriptor,
};
use crate::geom::{Point2, Tessellation};

/// Uniform boundary samples per region for [`snd_pointwise`].
pub const BOUNDARY_SAMPLES: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProximityError {
    #[error("region index {index} out of range (mesh has {len} regions)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("feature schemas differ: {left:?} vs {right:?}")]
    SchemaMismatch {
        left: Vec<&'static str>,
        right: Vec<&'static str>,
    },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error(transparent)]
    Descriptor(#[from] DescriptorError),
}

/// Per-kind matching tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchTolerance {
    scalar_rel: f64,
    angle_abs: f64,
    count_abs: u32,
}

impl Default for MatchTolerance {
    fn default() -> Self {
        Self {
            scalar_rel: 0.05,
            angle_abs: 10f64.to_radians(),
            count_abs: 0,
        }
    }
}

impl MatchTolerance {
    /// Exact matching.
    pub const ZERO: Self = Self {
        scalar_rel: 0.0,
        angle_abs: 0.0,
        count_abs: 0,
    };
    /// Everything matches everything.
    pub const ANY: Self = Self {
        scalar_rel: f64::INFINITY,
        angle_abs: FRAC_PI_2,
        count_abs: u32::MAX,
    };

    pub fn new(scalar_rel: f64, angle_abs: f64, count_abs: u32) -> Result<Self, ProximityError> {
        if scalar_rel.is_nan() || scalar_rel < 0.0 {
            return Err(ProximityError::InvalidTolerance(format!(
                "scalar_rel {scalar_rel} < 0"
            )));
        }
        if !(0.0..=FRAC_PI_2).contains(&angle_abs) {
            return Err(ProximityError::InvalidTolerance(format!(
                "angle_abs {angle_abs} outside [0, pi/2]"
            )));
        }
        Ok(Self {
            scalar_rel,
            angle_abs,
            count_abs,
        })
    }

    pub fn scalar_rel(&self) -> f64 {
        self.scalar_rel
    }

    pub fn angle_abs(&self) -> f64 {
        self.angle_abs
    }

    pub fn count_abs(&self) -> u32 {
        self.count_abs
    }
}

/// Distance between two orientations on the mod-pi circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(PI);
    d.min(PI - d)
}

/// Entry-wise match. Schemas must be identical.
pub fn feature_match(
    a: &FeatureVector,
    b: &FeatureVector,
    tol: &MatchTolerance,
) -> Result<bool, ProximityError> {
    if a.schema() != b.schema() || a.kinds() != b.kinds() {
        return Err(ProximityError::SchemaMismatch {
            left: a.schema().to_vec(),
            right: b.schema().to_vec(),
        });
    }
    Ok(entries_match(a, b, tol))
}

fn entries_match(a: &FeatureVector, b: &FeatureVector, tol: &MatchTolerance) -> bool {
    a.values()
        .iter()
        .zip(b.values())
        .zip(a.kinds())
        .all(|((&x, &y), kind)| match kind {
            FeatureKind::Angle => angle_distance(x, y) <= tol.angle_abs,
            FeatureKind::Count => (x - y).abs() <= tol.count_abs as f64,
            FeatureKind::Scalar => {
                x == y || (x - y).abs() <= tol.scalar_rel * x.abs().max(y.abs()).max(1.0)
            }
        })
}

fn check_index(t: &Tessellation, i: usize) -> Result<(), ProximityError> {
    if i < t.len() {
        Ok(())
    } else {
        Err(ProximityError::IndexOutOfRange {
            index: i,
            len: t.len(),
        })
    }
}

/// `i sn j`: identical regions, or `j` stored as a neighbour of `i`.
pub fn strongly_near(t: &Tessellation, i: usize, j: usize) -> Result<bool, ProximityError> {
    check_index(t, i)?;
    check_index(t, j)?;
    Ok(i == j || t.is_adjacent(i, j))
}

/// Region descriptors of every region of `t`.
pub fn region_features(
    t: &Tessellation,
    phi: RegionDescriptor,
) -> Result<Vec<FeatureVector>, ProximityError> {
    t.regions().iter().map(|r| Ok(phi.describe(r)?)).collect()
}

/// Description of every region under `phi`; the image only matters for
/// [`Descriptor::Site`].
pub fn describe_regions(
    t: &Tessellation,
    phi: Descriptor,
    img: Option<(&GrayImage, &ImageFrame)>,
) -> Vec<Result<FeatureVector, DescriptorError>> {
    match phi {
        Descriptor::Site => t
            .sites()
            .iter()
            .map(|&s| point_descriptor(s, img))
            .collect(),
        Descriptor::Region(r) => t.regions().iter().map(|p| r.describe(p)).collect(),
    }
}

/// `i snd j` on region descriptors.
pub fn descriptively_near_regions(
    t: &Tessellation,
    i: usize,
    j: usize,
    phi: RegionDescriptor,
    tol: &MatchTolerance,
) -> Result<bool, ProximityError> {
    check_index(t, i)?;
    check_index(t, j)?;
    let a = phi.describe(&t.regions()[i])?;
    let b = phi.describe(&t.regions()[j])?;
    feature_match(&a, &b, tol)
}

/// Elements of `a ∪ b` whose description matches some description in `a`
/// and some description in `b`.
///
/// `features[x]` is the description of element `x`; elements without one,
/// or with a schema different from their partner, never match.
pub fn descriptive_intersection(
    a: &BTreeSet<usize>,
    b: &BTreeSet<usize>,
    features: &[FeatureVector],
    tol: &MatchTolerance,
) -> BTreeSet<usize> {
    let matches = |x: usize, y: usize| match (features.get(x), features.get(y)) {
        (Some(fx), Some(fy)) => feature_match(fx, fy, tol).unwrap_or(false),
        _ => false,
    };
    descriptive_intersection_by(a, b, matches)
}

pub(crate) fn descriptive_intersection_by(
    a: &BTreeSet<usize>,
    b: &BTreeSet<usize>,
    matches: impl Fn(usize, usize) -> bool,
) -> BTreeSet<usize> {
    a.union(b)
        .copied()
        .filter(|&x| a.iter().any(|&y| matches(x, y)) && b.iter().any(|&y| matches(x, y)))
        .collect()
}

/// Sample points on the boundary of region `i`: its vertices, the midpoint
/// of every stored shared segment and [`BOUNDARY_SAMPLES`] points evenly
/// spaced by arc length.
pub fn boundary_samples(t: &Tessellation, i: usize) -> Vec<Point2> {
    let region = &t.regions()[i];
    let mut out: Vec<Point2> = region.vertices().to_vec();
    out.extend(
        t.neighbors(i)
            .iter()
            .map(|n| n.segment[0].midpoint(n.segment[1])),
    );
    let edges: Vec<(Point2, Point2)> = region.edges().collect();
    let perimeter: f64 = edges.iter().map(|(a, b)| a.distance(*b)).sum();
    if perimeter > 0.0 {
        let step = perimeter / BOUNDARY_SAMPLES as f64;
        let (mut e, mut walked) = (0, 0.0);
        for k in 0..BOUNDARY_SAMPLES {
            let s = k as f64 * step;
            while e + 1 < edges.len() && walked + edges[e].0.distance(edges[e].1) < s {
                walked += edges[e].0.distance(edges[e].1);
                e += 1;
            }
            let (a, b) = edges[e];
            let len = a.distance(b);
            let f = if len > 0.0 {
                ((s - walked) / len).clamp(0.0, 1.0)
            } else {
                0.0
            };
            out.push(a + (b - a) * f);
        }
    }
    out
}

/// Boundary sample descriptors for every region, sorted by their first
/// entry so location-inclusive schemas can be searched by window.
pub struct PointwiseIndex {
    samples: Vec<Vec<FeatureVector>>,
    tol: MatchTolerance,
}

impl PointwiseIndex {
    pub fn new(
        t: &Tessellation,
        img: Option<(&GrayImage, &ImageFrame)>,
        tol: MatchTolerance,
    ) -> Result<Self, ProximityError> {
        let mut samples = Vec::with_capacity(t.len());
        for i in 0..t.len() {
            let mut v = boundary_samples(t, i)
                .into_iter()
                .map(|p| point_descriptor(p, img))
                .collect::<Result<Vec<_>, _>>()?;
            v.sort_by(|a, b| a.values()[0].total_cmp(&b.values()[0]));
            samples.push(v);
        }
        Ok(Self { samples, tol })
    }

    pub fn tolerance(&self) -> &MatchTolerance {
        &self.tol
    }

    /// True when some sample of `i` matches some sample of `j`.
    pub fn near(&self, i: usize, j: usize) -> bool {
        let (a, b) = (&self.samples[i], &self.samples[j]);
        let rel = self.tol.scalar_rel;
        for fa in a {
            let x = fa.values()[0];
            // |x - y| <= rel * max(|x|, |y|, 1) implies this window for rel < 1
            let (lo, hi) = if rel < 1.0 {
                let w = rel * x.abs().max(1.0) / (1.0 - rel);
                (x - w, x + w)
            } else {
                (f64::NEG_INFINITY, f64::INFINITY)
            };
            let start = b.partition_point(|fb| fb.values()[0] < lo);
            if b[start..]
                .iter()
                .take_while(|fb| fb.values()[0] <= hi)
                .any(|fb| entries_match(fa, fb, &self.tol))
            {
                return true;
            }
        }
        false
    }
}

/// `i snd j` read pointwise: some boundary sample of `i` has the same
/// location-inclusive description as some boundary sample of `j`.
pub fn snd_pointwise(
    t: &Tessellation,
    i: usize,
    j: usize,
    img: Option<(&GrayImage, &ImageFrame)>,
    tol: &MatchTolerance,
) -> Result<bool, ProximityError> {
    check_index(t, i)?;
    check_index(t, j)?;
    let describe = |r: usize| -> Result<Vec<FeatureVector>, ProximityError> {
        boundary_samples(t, r)
            .into_iter()
            .map(|p| Ok(point_descriptor(p, img)?))
            .collect()
    };
    let (a, b) = (describe(i)?, describe(j)?);
    Ok(a.iter()
        .any(|fa| b.iter().any(|fb| entries_match(fa, fb, tol))))
}
