//! Nucleus clusters: a region together with every region strongly near it.

mod validate;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::descriptors::{FeatureVector, GrayImage, ImageFrame, RegionDescriptor};
use crate::geom::Tessellation;
use crate::proximity::{
    descriptive_intersection_by, feature_match, region_features, MatchTolerance, PointwiseIndex,
    ProximityError,
};

pub use validate::{
    validate_clusters, validate_theorems, Check, CheckStatus, Counterexample, ValidationReport,
    CHECK_IDS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClusterError {
    #[error("cluster built on a different tessellation")]
    MixedTessellation,
    #[error(transparent)]
    Proximity(#[from] ProximityError),
}

/// The cluster `Cn N`. Members are kept sorted and include the nucleus.
#[derive(Debug, Clone)]
pub struct NucleusCluster {
    nucleus: usize,
    members: BTreeSet<usize>,
    adjacency_count: usize,
    mesh: u64,
}

impl PartialEq for NucleusCluster {
    fn eq(&self, other: &Self) -> bool {
        self.nucleus == other.nucleus && self.members == other.members
    }
}

impl Eq for NucleusCluster {}

impl NucleusCluster {
    /// Assembles a cluster without checking it against the mesh.
    ///
    /// Used to load stored clusters and to inject faults; the validator
    /// reports any inconsistency.
    pub fn from_parts(
        t: &Tessellation,
        nucleus: usize,
        members: BTreeSet<usize>,
        adjacency_count: usize,
    ) -> Self {
        Self {
            nucleus,
            members,
            adjacency_count,
            mesh: t.fingerprint(),
        }
    }

    pub fn nucleus(&self) -> usize {
        self.nucleus
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn contains(&self, region: usize) -> bool {
        self.members.contains(&region)
    }

    /// Number of regions adjacent to the nucleus.
    pub fn adjacency_count(&self) -> usize {
        self.adjacency_count
    }

    pub fn mesh(&self) -> u64 {
        self.mesh
    }
}

/// `C_Φ N`: regions whose description matches the nucleus.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptiveCluster {
    pub nucleus: usize,
    pub members: BTreeSet<usize>,
    pub descriptor: RegionDescriptor,
    pub tolerance: MatchTolerance,
}

impl DescriptiveCluster {
    pub fn descriptor_name(&self) -> &'static str {
        self.descriptor.name()
    }
}

fn check_index(t: &Tessellation, n: usize) -> Result<(), ProximityError> {
    if n < t.len() {
        Ok(())
    } else {
        Err(ProximityError::IndexOutOfRange {
            index: n,
            len: t.len(),
        })
    }
}

fn check_mesh(t: &Tessellation, cs: &[&NucleusCluster]) -> Result<(), ClusterError> {
    if cs.iter().all(|c| c.mesh == t.fingerprint()) {
        Ok(())
    } else {
        Err(ClusterError::MixedTessellation)
    }
}

/// `Cn n`: `n` and every region `A` with `A sn n`.
pub fn nucleus_cluster(t: &Tessellation, n: usize) -> Result<NucleusCluster, ProximityError> {
    check_index(t, n)?;
    let members: BTreeSet<usize> = (0..t.len())
        .filter(|&a| a == n || t.is_adjacent(a, n))
        .collect();
    Ok(NucleusCluster {
        nucleus: n,
        adjacency_count: members.len() - 1,
        members,
        mesh: t.fingerprint(),
    })
}

/// One cluster per region, in region order.
pub fn all_nucleus_clusters(t: &Tessellation) -> Vec<NucleusCluster> {
    (0..t.len())
        .map(|n| nucleus_cluster(t, n).expect("index in range"))
        .collect()
}

/// Every cluster whose nucleus has the largest adjacency count.
pub fn maximal_nucleus_clusters(t: &Tessellation) -> Vec<NucleusCluster> {
    maximal_of(all_nucleus_clusters(t))
}

pub fn maximal_of(clusters: Vec<NucleusCluster>) -> Vec<NucleusCluster> {
    let best = clusters
        .iter()
        .map(|c| c.adjacency_count)
        .max()
        .unwrap_or(0);
    clusters
        .into_iter()
        .filter(|c| c.adjacency_count == best)
        .collect()
}

pub fn descriptive_nucleus_cluster(
    t: &Tessellation,
    n: usize,
    phi: RegionDescriptor,
    tol: &MatchTolerance,
) -> Result<DescriptiveCluster, ProximityError> {
    check_index(t, n)?;
    let feats = region_features(t, phi)?;
    let mut members = BTreeSet::new();
    for (a, f) in feats.iter().enumerate() {
        if feature_match(f, &feats[n], tol)? {
            members.insert(a);
        }
    }
    Ok(DescriptiveCluster {
        nucleus: n,
        members,
        descriptor: phi,
        tolerance: *tol,
    })
}

/// `c1 sn c2`: they share a member, or a member of `c1` lists a member of
/// `c2` among its neighbours.
pub fn clusters_strongly_near(
    t: &Tessellation,
    c1: &NucleusCluster,
    c2: &NucleusCluster,
) -> Result<bool, ClusterError> {
    check_mesh(t, &[c1, c2])?;
    Ok(sn_by_lists(t, c1, c2))
}

pub(crate) fn sn_by_lists(t: &Tessellation, c1: &NucleusCluster, c2: &NucleusCluster) -> bool {
    c1.members.iter().any(|&a| {
        c2.contains(a) || a < t.len() && t.neighbors(a).iter().any(|n| c2.contains(n.region))
    })
}

/// `c1 snd c2` on region descriptors.
pub fn clusters_descriptively_near(
    t: &Tessellation,
    c1: &NucleusCluster,
    c2: &NucleusCluster,
    phi: RegionDescriptor,
    tol: &MatchTolerance,
) -> Result<bool, ClusterError> {
    check_mesh(t, &[c1, c2])?;
    let feats = region_features(t, phi)?;
    Ok(snd_by_features(&feats, c1, c2, tol))
}

pub(crate) fn snd_by_features(
    feats: &[FeatureVector],
    c1: &NucleusCluster,
    c2: &NucleusCluster,
    tol: &MatchTolerance,
) -> bool {
    c1.members.iter().any(|&a| {
        c2.members
            .iter()
            .any(|&b| match (feats.get(a), feats.get(b)) {
                (Some(fa), Some(fb)) => feature_match(fa, fb, tol).unwrap_or(false),
                _ => false,
            })
    })
}

/// `c1 snd c2` read pointwise: some member boundary sample of `c1` matches
/// some member boundary sample of `c2`.
pub fn clusters_near_pointwise(
    t: &Tessellation,
    c1: &NucleusCluster,
    c2: &NucleusCluster,
    img: Option<(&GrayImage, &ImageFrame)>,
    tol: &MatchTolerance,
) -> Result<bool, ClusterError> {
    check_mesh(t, &[c1, c2])?;
    let index = PointwiseIndex::new(t, img, *tol)?;
    let valid = |c: &NucleusCluster| {
        c.members
            .iter()
            .copied()
            .filter(|&a| a < t.len())
            .collect::<Vec<_>>()
    };
    let (m1, m2) = (valid(c1), valid(c2));
    Ok(m1.iter().any(|&a| m2.iter().any(|&b| index.near(a, b))))
}

/// `c1 ⩀ c2` on region descriptors.
pub fn cluster_descriptive_intersection(
    t: &Tessellation,
    c1: &NucleusCluster,
    c2: &NucleusCluster,
    phi: RegionDescriptor,
    tol: &MatchTolerance,
) -> Result<BTreeSet<usize>, ClusterError> {
    check_mesh(t, &[c1, c2])?;
    let feats = region_features(t, phi)?;
    Ok(descriptive_intersection_by(
        &c1.members,
        &c2.members,
        |x, y| match (feats.get(x), feats.get(y)) {
            (Some(fx), Some(fy)) => feature_match(fx, fy, tol).unwrap_or(false),
            _ => false,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{tessellate, BoundingBox, Point2};

    fn grid(k: usize) -> Tessellation {
        let sites: Vec<Point2> = (0..k)
            .flat_map(|j| (0..k).map(move |i| Point2::new(i as f64, j as f64)))
            .collect();
        let hi = k as f64 - 0.5;
        tessellate(
            &sites,
            BoundingBox::from_bounds(-0.5, -0.5, hi, hi).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn grid_center_cluster() {
        let t = grid(3);
        let c = nucleus_cluster(&t, 4).unwrap();
        assert_eq!(
            c.members().iter().copied().collect::<Vec<_>>(),
            [1, 3, 4, 5, 7]
        );
        assert_eq!(c.adjacency_count(), 4);
        assert_eq!(nucleus_cluster(&t, 0).unwrap().members().len(), 3);
        assert!(nucleus_cluster(&t, 9).is_err());
    }

    #[test]
    fn maximal_clusters_on_grids() {
        let m = maximal_nucleus_clusters(&grid(3));
        assert_eq!(m.len(), 1);
        assert_eq!((m[0].nucleus(), m[0].adjacency_count()), (4, 4));
        let m = maximal_nucleus_clusters(&grid(2));
        assert_eq!(
            m.iter().map(|c| c.nucleus()).collect::<Vec<_>>(),
            [0, 1, 2, 3]
        );
        assert!(m.iter().all(|c| c.adjacency_count() == 2));
    }

    #[test]
    fn single_region() {
        let bbox = BoundingBox::from_bounds(0.0, 0.0, 1.0, 1.0).unwrap();
        let t = tessellate(&[Point2::new(0.5, 0.5)], bbox).unwrap();
        let c = nucleus_cluster(&t, 0).unwrap();
        assert_eq!(c.adjacency_count(), 0);
        assert_eq!(maximal_nucleus_clusters(&t), vec![c]);
    }

    #[test]
    fn descriptive_cluster_on_grid() {
        let t = grid(3);
        let tol = MatchTolerance::default();
        // every cell is a unit square, so shape alone cannot tell them apart
        let c = descriptive_nucleus_cluster(&t, 4, RegionDescriptor::LOCATION_FREE, &tol).unwrap();
        assert_eq!(c.members.len(), 9);
        let c = descriptive_nucleus_cluster(
            &t,
            4,
            RegionDescriptor::WITH_LOCATION,
            &MatchTolerance::ZERO,
        )
        .unwrap();
        assert_eq!(c.members.iter().copied().collect::<Vec<_>>(), [4]);
        let c = descriptive_nucleus_cluster(
            &t,
            4,
            RegionDescriptor::WITH_LOCATION,
            &MatchTolerance::ANY,
        )
        .unwrap();
        assert_eq!(c.members.len(), 9);
        assert_eq!(c.descriptor_name(), "region");
    }

    #[test]
    fn cluster_relations() {
        let t = grid(3);
        let cs = all_nucleus_clusters(&t);
        assert!(clusters_strongly_near(&t, &cs[0], &cs[0]).unwrap());
        // {0,1,3} and {5,7,8} share no edge
        assert!(!clusters_strongly_near(&t, &cs[0], &cs[8]).unwrap());
        // {0,1,3} and {1,2,5} share 1
        assert!(clusters_strongly_near(&t, &cs[0], &cs[2]).unwrap());
        let phi = RegionDescriptor::LOCATION_FREE;
        let tol = MatchTolerance::default();
        assert!(clusters_descriptively_near(&t, &cs[0], &cs[8], phi, &tol).unwrap());
        let both = cluster_descriptive_intersection(&t, &cs[0], &cs[0], phi, &tol).unwrap();
        assert_eq!(&both, cs[0].members());
        assert!(clusters_near_pointwise(&t, &cs[0], &cs[2], None, &MatchTolerance::ZERO).unwrap());
        // cells 1 and 5 touch at a corner, which the pointwise reading sees
        assert!(clusters_near_pointwise(&t, &cs[0], &cs[8], None, &MatchTolerance::ZERO).unwrap());
    }

    #[test]
    fn mixed_meshes_rejected() {
        let (a, b) = (grid(3), grid(2));
        let ca = nucleus_cluster(&a, 0).unwrap();
        let cb = nucleus_cluster(&b, 0).unwrap();
        assert_eq!(
            clusters_strongly_near(&a, &ca, &cb),
            Err(ClusterError::MixedTessellation)
        );
    }

    #[test]
    fn equality_ignores_mesh() {
        let (a, b) = (grid(3), grid(2));
        let ca = NucleusCluster::from_parts(&a, 0, [0, 1].into(), 1);
        let cb = NucleusCluster::from_parts(&b, 0, [0, 1].into(), 1);
        assert_eq!(ca, cb);
    }
}
