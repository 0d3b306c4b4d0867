//! Executable checks of the cluster covering, proximity and convexity
//! properties over a whole tessellation.

use std::collections::BTreeSet;

use crate::descriptors::{Descriptor, FeatureVector, GrayImage, ImageFrame};
use crate::geom::{convex_intersection, is_convex, Tessellation};
use crate::proximity::{
    describe_regions, descriptive_intersection_by, feature_match, MatchTolerance, PointwiseIndex,
};

use super::{all_nucleus_clusters, maximal_of, sn_by_lists, NucleusCluster};

/// Every report lists these checks, once each, in this order.
pub const CHECK_IDS: [&str; 17] = [
    "tessellation_consistent",
    "cluster_well_formed",
    "region_in_own_cluster",
    "cluster_has_near_region",
    "covering",
    "cluster_per_region",
    "maximal_edge_count",
    "sn_cluster_equivalence",
    "snd_cluster_equivalence",
    "sn_region_to_cluster",
    "shared_member_implies_sn",
    "descriptive_intersection_implies_snd",
    "sn_implies_snd_pointwise",
    "cluster_sn_implies_snd_pointwise",
    "snd_iff_descriptive_intersection",
    "convexity_c0",
    "convexity_c1",
];

const INFORMATIONAL: [&str; 2] = ["maximal_edge_count", "sn_region_to_cluster"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Reported but never counted as a failure.
    Info,
}

impl CheckStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Info => "info",
        }
    }
}

/// The first offending regions and cluster nuclei found by a check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub regions: Vec<usize>,
    pub nuclei: Vec<usize>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: &'static str,
    pub status: CheckStatus,
    /// Number of cases examined.
    pub cases: usize,
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    /// True when no pass/fail check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn get(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

#[derive(Default)]
struct Tally {
    cases: usize,
    bad: Option<Counterexample>,
}

impl Tally {
    fn case(&mut self, ok: bool, cx: impl FnOnce() -> Counterexample) {
        self.cases += 1;
        if !ok && self.bad.is_none() {
            self.bad = Some(cx());
        }
    }
}

fn cx(regions: &[usize], nuclei: &[usize], note: impl Into<String>) -> Counterexample {
    Counterexample {
        regions: regions.to_vec(),
        nuclei: nuclei.to_vec(),
        note: note.into(),
    }
}

/// Runs every check on the clusters of `t` built from scratch.
///
/// `phi` drives the region-level descriptive checks; the pointwise checks
/// always use location-inclusive point descriptors.
pub fn validate_theorems(
    t: &Tessellation,
    phi: impl Into<Descriptor>,
    tol: &MatchTolerance,
    img: Option<(&GrayImage, &ImageFrame)>,
) -> ValidationReport {
    validate_clusters(t, &all_nucleus_clusters(t), phi, tol, img)
}

/// Runs every check on a supplied cluster list, which need not be correct.
pub fn validate_clusters(
    t: &Tessellation,
    clusters: &[NucleusCluster],
    phi: impl Into<Descriptor>,
    tol: &MatchTolerance,
    img: Option<(&GrayImage, &ImageFrame)>,
) -> ValidationReport {
    let mut v = Validator::new(t, clusters, phi.into(), tol, img);
    let mut tallies: Vec<(&'static str, Tally)> = Vec::new();
    tallies.push(("tessellation_consistent", v.tessellation_consistent()));
    tallies.push(("cluster_well_formed", v.cluster_well_formed()));
    tallies.extend(v.region_checks());
    tallies.push(("maximal_edge_count", v.maximal_edge_count()));
    let (pairs, c1) = v.pair_checks();
    tallies.extend(pairs);
    tallies.push(("sn_region_to_cluster", v.sn_region_to_cluster()));
    tallies.push(("sn_implies_snd_pointwise", v.sn_implies_pointwise()));
    tallies.push(("convexity_c1", v.region_intersections_convex(c1)));

    let checks = CHECK_IDS
        .iter()
        .map(|&id| {
            let tally = tallies
                .iter_mut()
                .find(|(k, _)| *k == id)
                .map(|(_, t)| std::mem::take(t))
                .unwrap_or_default();
            let status = if INFORMATIONAL.contains(&id) {
                CheckStatus::Info
            } else if tally.bad.is_some() {
                CheckStatus::Fail
            } else {
                CheckStatus::Pass
            };
            Check {
                id,
                status,
                cases: tally.cases,
                counterexample: tally.bad,
            }
        })
        .collect();
    ValidationReport { checks }
}

struct Validator<'a> {
    t: &'a Tessellation,
    n: usize,
    clusters: &'a [NucleusCluster],
    /// Cluster members that are valid region indices.
    members: Vec<Vec<usize>>,
    by_nucleus: Vec<Option<usize>>,
    adj: Vec<bool>,
    features: Vec<Option<FeatureVector>>,
    dmatch: Vec<bool>,
    tol: MatchTolerance,
    pointwise: Result<PointwiseIndex, String>,
    pw_memo: Vec<u8>,
}

impl<'a> Validator<'a> {
    fn new(
        t: &'a Tessellation,
        clusters: &'a [NucleusCluster],
        phi: Descriptor,
        tol: &MatchTolerance,
        img: Option<(&GrayImage, &ImageFrame)>,
    ) -> Self {
        let n = t.len();
        let mut adj = vec![false; n * n];
        for i in 0..n {
            for nb in t.neighbors(i).iter().filter(|nb| nb.region < n) {
                adj[i * n + nb.region] = true;
            }
        }
        let features: Vec<Option<FeatureVector>> = describe_regions(t, phi, img)
            .into_iter()
            .map(Result::ok)
            .collect();
        let mut dmatch = vec![false; n * n];
        for i in 0..n {
            for j in i..n {
                let m = match (&features[i], &features[j]) {
                    (Some(a), Some(b)) => feature_match(a, b, tol).unwrap_or(false),
                    _ => false,
                };
                dmatch[i * n + j] = m;
                dmatch[j * n + i] = m;
            }
        }
        let mut by_nucleus = vec![None; n];
        for (k, c) in clusters.iter().enumerate() {
            if c.nucleus() < n && by_nucleus[c.nucleus()].is_none() {
                by_nucleus[c.nucleus()] = Some(k);
            }
        }
        let members = clusters
            .iter()
            .map(|c| c.members().iter().copied().filter(|&m| m < n).collect())
            .collect();
        let pointwise = PointwiseIndex::new(t, img, *tol).map_err(|e| e.to_string());
        Self {
            t,
            n,
            clusters,
            members,
            by_nucleus,
            adj,
            features,
            dmatch,
            tol: *tol,
            pointwise,
            pw_memo: vec![0; n * n],
        }
    }

    fn sn(&self, a: usize, b: usize) -> bool {
        a == b || self.adj[a * self.n + b]
    }

    fn snd(&self, a: usize, b: usize) -> bool {
        self.dmatch[a * self.n + b]
    }

    fn pw(&mut self, a: usize, b: usize) -> bool {
        let (i, j) = (a.min(b), a.max(b));
        let k = i * self.n + j;
        if self.pw_memo[k] == 0 {
            let near = self.pointwise.as_ref().is_ok_and(|idx| idx.near(i, j));
            self.pw_memo[k] = if near { 2 } else { 1 };
        }
        self.pw_memo[k] == 2
    }

    fn tessellation_consistent(&self) -> Tally {
        let (t, n) = (self.t, self.n);
        let mut tally = Tally::default();
        let min_len = t.length_tolerance();
        let scale = t.bbox().extent();
        for i in 0..n {
            let r = &t.regions()[i];
            tally.case(!r.is_empty() && is_convex(r), || {
                cx(&[i], &[], "region empty or not convex")
            });
            tally.case(r.contains(t.sites()[i], 1e-9 * scale), || {
                cx(&[i], &[], "region does not contain its site")
            });
            for nb in t.neighbors(i) {
                let j = nb.region;
                let ok = j < n && j != i && nb.length > min_len;
                tally.case(ok, || cx(&[i, j], &[], "invalid neighbour entry"));
                if !ok {
                    continue;
                }
                let back = t.neighbors(j).iter().find(|m| m.region == i);
                let same = back.is_some_and(|m| {
                    m.length == nb.length
                        && (m.segment == nb.segment || m.segment == [nb.segment[1], nb.segment[0]])
                });
                tally.case(same, || cx(&[i, j], &[], "adjacency not symmetric"));
            }
        }
        let total: f64 = t.regions().iter().map(|r| r.area()).sum();
        let area = t.bbox().area();
        tally.case((total - area).abs() <= 1e-9 * area, || {
            cx(
                &[],
                &[],
                format!("region areas sum to {total}, box area {area}"),
            )
        });
        tally
    }

    fn cluster_well_formed(&self) -> Tally {
        let mut tally = Tally::default();
        for (k, c) in self.clusters.iter().enumerate() {
            let nuc = c.nucleus();
            let bad = |note: &str| cx(&[], &[nuc], note);
            tally.case(c.mesh() == self.t.fingerprint(), || {
                bad("cluster from another mesh")
            });
            let in_range = nuc < self.n && self.members[k].len() == c.members().len();
            tally.case(in_range, || bad("index out of range"));
            if !in_range {
                continue;
            }
            let expected: BTreeSet<usize> = (0..self.n).filter(|&a| self.sn(a, nuc)).collect();
            let diff = expected.symmetric_difference(c.members()).next().copied();
            tally.case(diff.is_none(), || {
                cx(
                    &diff.into_iter().collect::<Vec<_>>(),
                    &[nuc],
                    "member set differs from Cn N",
                )
            });
            let stored = self.t.neighbors(nuc).len();
            tally.case(c.adjacency_count() == stored, || {
                bad(&format!(
                    "adjacency_count {} but {} stored neighbours",
                    c.adjacency_count(),
                    stored
                ))
            });
        }
        tally
    }

    /// Items 1 to 4 of the covering family of properties.
    fn region_checks(&self) -> Vec<(&'static str, Tally)> {
        let mut own = Tally::default();
        let mut near = Tally::default();
        let mut covering = Tally::default();
        let mut per_region = Tally::default();
        for a in 0..self.n {
            let k = self.by_nucleus[a];
            own.case(k.is_some_and(|k| self.clusters[k].contains(a)), || {
                cx(&[a], &[a], "region missing from its own cluster")
            });
            per_region.case(k.is_some(), || {
                cx(&[a], &[a], "no cluster with this nucleus")
            });
        }
        for (k, c) in self.clusters.iter().enumerate() {
            let nuc = c.nucleus();
            let ok = nuc < self.n && self.members[k].iter().any(|&m| self.sn(m, nuc));
            near.case(ok, || {
                cx(&[], &[nuc], "no member strongly near the nucleus")
            });
        }
        let mut covered = vec![false; self.n];
        for m in self.members.iter().flatten() {
            covered[*m] = true;
        }
        for (a, &c) in covered.iter().enumerate() {
            covering.case(c, || cx(&[a], &[], "region in no cluster"));
        }
        for (k, c) in self.clusters.iter().enumerate() {
            covering.case(self.members[k].len() == c.members().len(), || {
                cx(&[], &[c.nucleus()], "cluster member outside the region set")
            });
        }
        vec![
            ("region_in_own_cluster", own),
            ("cluster_has_near_region", near),
            ("covering", covering),
            ("cluster_per_region", per_region),
        ]
    }

    fn maximal_edge_count(&self) -> Tally {
        let mut tally = Tally::default();
        let maximal = maximal_of(self.clusters.to_vec());
        let nuclei: Vec<usize> = maximal
            .iter()
            .map(|c| c.nucleus())
            .filter(|&n| n < self.n)
            .collect();
        if nuclei.len() >= 2 {
            let edges = |n: usize| self.t.regions()[n].len();
            for w in nuclei.windows(2) {
                tally.case(edges(w[0]) == edges(w[1]), || {
                    cx(
                        &[],
                        w,
                        format!(
                            "maximal nuclei with {} and {} edges",
                            edges(w[0]),
                            edges(w[1])
                        ),
                    )
                });
            }
        }
        tally
    }

    /// Every check quantified over ordered cluster pairs. The second value
    /// is the cluster half of C1, finished by the geometric half later.
    fn pair_checks(&mut self) -> (Vec<(&'static str, Tally)>, Tally) {
        let mut sn_eq = Tally::default();
        let mut snd_eq = Tally::default();
        let mut shared = Tally::default();
        let mut dint = Tally::default();
        let mut thm_pw = Tally::default();
        let mut snd_iff = Tally::default();
        let mut c0 = Tally::default();
        let mut c1 = Tally::default();

        let full: Vec<usize> = (0..self.n).collect();
        let mut family: BTreeSet<Vec<usize>> = BTreeSet::new();
        family.insert(Vec::new());
        family.insert(full.clone());
        let mut shared_sets = Vec::new();

        // moved out so the pointwise memo can be updated inside the loop
        let members = std::mem::take(&mut self.members);
        let sets: Vec<BTreeSet<usize>> = members
            .iter()
            .map(|m| m.iter().copied().collect())
            .collect();
        let m = self.clusters.len();
        for p in 0..m {
            for q in 0..m {
                let (a_set, b_set) = (&members[p], &members[q]);
                let nuclei = [self.clusters[p].nucleus(), self.clusters[q].nucleus()];

                // strong proximity: predicate against both scan orders
                let pred_sn = sn_by_lists(self.t, &self.clusters[p], &self.clusters[q]);
                let mut fwd_sn = false;
                let mut asym = None;
                for &a in a_set {
                    for &b in b_set {
                        let (f, r) = (self.sn(a, b), self.sn(b, a));
                        fwd_sn |= f;
                        if f != r && asym.is_none() {
                            asym = Some((a, b));
                        }
                    }
                }
                sn_eq.case(asym.is_none() && pred_sn == fwd_sn, || match asym {
                    Some((a, b)) => cx(&[a, b], &nuclei, "A sn B disagrees with B sn A"),
                    None => cx(
                        &[],
                        &nuclei,
                        format!("predicate {pred_sn}, pair scan {fwd_sn}"),
                    ),
                });

                // descriptive proximity: predicate against both scan orders
                let pred_snd = a_set.iter().any(|&a| {
                    b_set
                        .iter()
                        .any(|&b| match (&self.features[a], &self.features[b]) {
                            (Some(fa), Some(fb)) => {
                                feature_match(fa, fb, &self.tol).unwrap_or(false)
                            }
                            _ => false,
                        })
                });
                let fwd_snd = a_set.iter().any(|&a| b_set.iter().any(|&b| self.snd(a, b)));
                let rev_snd = b_set.iter().any(|&b| a_set.iter().any(|&a| self.snd(b, a)));
                snd_eq.case(pred_snd == fwd_snd && fwd_snd == rev_snd, || {
                    cx(
                        &[],
                        &nuclei,
                        format!("predicate {pred_snd}, scans {fwd_snd}/{rev_snd}"),
                    )
                });

                let common: Vec<usize> = a_set
                    .iter()
                    .copied()
                    .filter(|x| b_set.contains(x))
                    .collect();
                if !common.is_empty() {
                    shared.case(fwd_sn, || {
                        cx(&common[..1], &nuclei, "shared member but no sn pair")
                    });
                    shared_sets.push((nuclei, common.clone()));
                    family.insert(common);
                }

                let di = descriptive_intersection_by(&sets[p], &sets[q], |x, y| self.snd(x, y));
                if !di.is_empty() {
                    dint.case(fwd_snd, || {
                        cx(
                            &di.iter().copied().take(1).collect::<Vec<_>>(),
                            &nuclei,
                            "no matching pair",
                        )
                    });
                }
                snd_iff.case(pred_snd == !di.is_empty(), || {
                    cx(
                        &[],
                        &nuclei,
                        format!("snd {pred_snd}, intersection size {}", di.len()),
                    )
                });

                if pred_sn {
                    let mut found = false;
                    'scan: for &a in a_set {
                        for &b in b_set {
                            if self.pw(a, b) {
                                found = true;
                                break 'scan;
                            }
                        }
                    }
                    thm_pw.case(found, || {
                        self.pointwise_cx(&[], &nuclei, "sn clusters not pointwise near")
                    });
                }
            }
        }

        self.members = members;

        c0.case(family.contains(&Vec::new()), || {
            cx(&[], &[], "empty set missing")
        });
        c0.case(self.n > 0 && family.contains(&full), || {
            cx(&[], &[], "region set missing")
        });
        for (nuclei, set) in &shared_sets {
            c1.case(
                family.contains(set) && set.iter().all(|&x| x < self.n),
                || cx(set, nuclei, "shared member set not in the family"),
            );
        }

        let tallies = vec![
            ("sn_cluster_equivalence", sn_eq),
            ("snd_cluster_equivalence", snd_eq),
            ("shared_member_implies_sn", shared),
            ("descriptive_intersection_implies_snd", dint),
            ("cluster_sn_implies_snd_pointwise", thm_pw),
            ("snd_iff_descriptive_intersection", snd_iff),
            ("convexity_c0", c0),
        ];
        (tallies, c1)
    }

    fn pointwise_cx(&self, regions: &[usize], nuclei: &[usize], note: &str) -> Counterexample {
        match &self.pointwise {
            Ok(_) => cx(regions, nuclei, note),
            Err(e) => cx(
                regions,
                nuclei,
                format!("pointwise descriptors unavailable: {e}"),
            ),
        }
    }

    /// If `A` is strongly near a member of `Cn B`, some `N` with `A sn N`
    /// has `Cn N sn Cn B`.
    fn sn_region_to_cluster(&self) -> Tally {
        let mut tally = Tally::default();
        for a in 0..self.n {
            let mut candidates = vec![a];
            candidates.extend(
                self.t
                    .neighbors(a)
                    .iter()
                    .map(|nb| nb.region)
                    .filter(|&r| r < self.n),
            );
            for (q, cq) in self.clusters.iter().enumerate() {
                if !self.members[q].iter().any(|&b| self.sn(a, b)) {
                    continue;
                }
                let ok = candidates.iter().any(|&nn| {
                    self.sn(a, nn)
                        && self.by_nucleus[nn]
                            .is_some_and(|k| sn_by_lists(self.t, &self.clusters[k], cq))
                });
                tally.case(ok, || {
                    cx(
                        &[a],
                        &[cq.nucleus()],
                        "no cluster of a region near A reaches Cn B",
                    )
                });
            }
        }
        tally
    }

    fn sn_implies_pointwise(&mut self) -> Tally {
        let mut tally = Tally::default();
        for a in 0..self.n {
            for b in 0..self.n {
                if self.sn(a, b) {
                    let ok = self.pw(a, b);
                    tally.case(ok, || {
                        self.pointwise_cx(&[a, b], &[], "sn pair not pointwise near")
                    });
                }
            }
        }
        tally
    }

    /// Geometric half of C1: every pairwise region intersection is convex,
    /// and regions stored as adjacent really touch.
    fn region_intersections_convex(&self, mut tally: Tally) -> Tally {
        let t = self.t;
        let eps = 1e-9 * t.bbox().extent();
        let boxes: Vec<[f64; 4]> = t
            .regions()
            .iter()
            .map(|r| {
                r.vertices().iter().fold(
                    [
                        f64::INFINITY,
                        f64::INFINITY,
                        f64::NEG_INFINITY,
                        f64::NEG_INFINITY,
                    ],
                    |b, p| [b[0].min(p.x), b[1].min(p.y), b[2].max(p.x), b[3].max(p.y)],
                )
            })
            .collect();
        for i in 0..self.n {
            for j in i + 1..self.n {
                let (a, b) = (boxes[i], boxes[j]);
                if a[0] > b[2] + eps || b[0] > a[2] + eps || a[1] > b[3] + eps || b[1] > a[3] + eps
                {
                    tally.case(!self.sn(i, j), || {
                        cx(&[i, j], &[], "adjacent regions do not touch")
                    });
                    continue;
                }
                let x = convex_intersection(&t.regions()[i], &t.regions()[j]);
                tally.case(is_convex(&x), || {
                    cx(&[i, j], &[], "intersection not convex")
                });
                if self.sn(i, j) {
                    tally.case(!x.is_empty(), || {
                        cx(&[i, j], &[], "adjacent regions do not touch")
                    });
                }
            }
        }
        tally
    }
}
