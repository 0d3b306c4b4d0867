//! Lattice and random fixtures checked against independent oracles.

use std::collections::BTreeSet;

use nucleus_core::clusters::*;
use nucleus_core::descriptors::{edge_orientations, region_descriptor, RegionDescriptor};
use nucleus_core::geom::predicates::{incircle, orient2d};
use nucleus_core::geom::*;
use nucleus_core::ingestion::sites_random;
use nucleus_core::proximity::*;

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

/// Triangular lattice with unit spacing, `k` rows of `k` sites.
fn hex_sites(k: usize) -> Vec<Point2> {
    let h = 3f64.sqrt() / 2.0;
    (0..k)
        .flat_map(|j| {
            (0..k).map(move |i| Point2::new(i as f64 + 0.5 * (j % 2) as f64, j as f64 * h))
        })
        .collect()
}

/// Adjacency by the midpoint test: `i` and `j` share an edge when the
/// midpoint of their sites is strictly closer to them than to any other
/// site. Valid for lattices, where every Voronoi edge crosses its midpoint.
fn midpoint_adjacency(sites: &[Point2], i: usize, j: usize) -> bool {
    let m = sites[i].midpoint(sites[j]);
    let d = m.distance(sites[i]);
    sites
        .iter()
        .enumerate()
        .all(|(k, s)| k == i || k == j || m.distance(*s) > d + 1e-9)
}

#[test]
fn grid_adjacency_matches_midpoint_oracle() {
    for k in [2, 3, 4, 5] {
        let t = grid(k);
        for i in 0..t.len() {
            for j in 0..t.len() {
                if i != j {
                    assert_eq!(
                        t.is_adjacent(i, j),
                        midpoint_adjacency(t.sites(), i, j),
                        "{k}: {i} {j}"
                    );
                }
            }
        }
    }
}

#[test]
fn grid_3x3_clusters() {
    let t = grid(3);
    assert_eq!(t.adjacency_pairs().len(), 12);
    let counts: Vec<usize> = (0..9)
        .map(|i| nucleus_cluster(&t, i).unwrap().adjacency_count())
        .collect();
    assert_eq!(counts, [2, 3, 2, 3, 4, 3, 2, 3, 2]);
    let max = maximal_nucleus_clusters(&t);
    assert_eq!(max.len(), 1);
    assert_eq!(max[0].nucleus(), 4);
    assert_eq!(max[0].adjacency_count(), 4);
    assert_eq!(max[0].members(), &BTreeSet::from([1, 3, 4, 5, 7]));
    let center = region_descriptor(&t.regions()[4]).unwrap();
    assert_eq!(center.get("area"), Some(1.0));
    assert_eq!(center.get("edge_count"), Some(4.0));
}

#[test]
fn grid_2x2_has_four_maximal_clusters() {
    let max = maximal_nucleus_clusters(&grid(2));
    assert_eq!(max.len(), 4);
    assert!(max.iter().all(|c| c.adjacency_count() == 2));
}

#[test]
fn hex_lattice_interior() {
    let sites = hex_sites(7);
    let bbox = BoundingBox::around(&sites, 0.1).unwrap();
    let t = tessellate(&sites, bbox).unwrap();
    let center = 3 * 7 + 3;
    let oracle = (0..sites.len())
        .filter(|&j| j != center && midpoint_adjacency(&sites, center, j))
        .count();
    assert_eq!(oracle, 6);
    assert_eq!(nucleus_cluster(&t, center).unwrap().adjacency_count(), 6);
    let r = &t.regions()[center];
    assert_eq!(r.len(), 6);
    // a regular hexagon with unit inradius diameter has area sqrt(3)/2
    assert!((r.area() - 3f64.sqrt() / 2.0).abs() < 1e-12);
    let mut angles: Vec<f64> = edge_orientations(r).unwrap();
    angles.sort_by(f64::total_cmp);
    // opposite edges are parallel: pi/6, pi/2 and 5pi/6, twice each
    let step = std::f64::consts::PI / 3.0;
    for (k, a) in angles.iter().enumerate() {
        assert!(
            (a - (step * (k / 2) as f64 + step / 2.0)).abs() < 1e-9,
            "{angles:?}"
        );
    }
    let max = maximal_nucleus_clusters(&t);
    assert!(max.iter().all(|c| c.adjacency_count() == 6));
    assert!(max.iter().any(|c| c.nucleus() == center));
}

#[test]
fn random_delaunay_has_empty_circumcircles() {
    let unit = BoundingBox::from_bounds(0.0, 0.0, 1.0, 1.0).unwrap();
    let sites = sites_random(200, &unit, 42);
    let tri = delaunay_triangulate(&sites).unwrap();
    let s = tri.sites();
    let mut violations = 0;
    for t in tri.triangles() {
        let (a, b, c) = (s[t[0]], s[t[1]], s[t[2]]);
        assert!(orient2d(a, b, c) > 0.0);
        for (k, &d) in s.iter().enumerate() {
            if !t.contains(&k) && incircle(a, b, c, d) > 0.0 {
                violations += 1;
            }
        }
    }
    assert_eq!(violations, 0);
    // Euler: 2n - 2 - h triangles for n sites with h on the hull
    let mut uses = std::collections::HashMap::new();
    for t in tri.triangles() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *uses.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    let hull = uses.values().filter(|&&c| c == 1).count();
    assert_eq!(tri.triangles().len(), 2 * s.len() - 2 - hull);
}

fn vertices_match(a: &ConvexPolygon, b: &ConvexPolygon, tol: f64) -> bool {
    let near = |p: &Point2, q: &ConvexPolygon| q.vertices().iter().any(|v| v.distance(*p) <= tol);
    a.vertices().iter().all(|p| near(p, b)) && b.vertices().iter().all(|p| near(p, a))
}

#[test]
fn dual_matches_bruteforce() {
    let unit = BoundingBox::from_bounds(0.0, 0.0, 1.0, 1.0).unwrap();
    for seed in [1, 2, 3] {
        let sites = sites_random(120, &unit, seed);
        let dual = tessellate(&sites, unit).unwrap();
        let brute = voronoi_bruteforce(&sites, unit).unwrap();
        for i in 0..sites.len() {
            assert!(
                vertices_match(&dual.regions()[i], &brute.regions()[i], 1e-9),
                "seed {seed} region {i}"
            );
            let a: Vec<usize> = dual.neighbors(i).iter().map(|n| n.region).collect();
            let b: Vec<usize> = brute.neighbors(i).iter().map(|n| n.region).collect();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn descriptive_cluster_matches_exhaustive_oracle() {
    let t = grid(3);
    let tol = MatchTolerance::new(0.05, 0.0, 0).unwrap();
    let c = descriptive_nucleus_cluster(&t, 4, RegionDescriptor::LOCATION_FREE, &tol).unwrap();
    // every cell is a unit square: area 1, diameter sqrt 2, 4 edges
    let oracle: BTreeSet<usize> = (0..9)
        .filter(|&i| {
            let r = &t.regions()[i];
            (r.area() - 1.0).abs() < 1e-12
                && r.len() == 4
                && (r.diameter() - 2f64.sqrt()).abs() < 1e-12
        })
        .collect();
    assert_eq!(oracle.len(), 9);
    assert_eq!(c.members, oracle);
}

#[test]
fn separated_clouds_are_not_strongly_near() {
    let mut sites = hex_sites(5);
    let far: Vec<Point2> = hex_sites(5)
        .iter()
        .map(|p| Point2::new(p.x + 20.0, p.y + 20.0))
        .collect();
    sites.extend(far);
    let bbox = BoundingBox::from_bounds(-2.0, -2.0, 26.0, 26.0).unwrap();
    let t = tessellate(&sites, bbox).unwrap();
    let brute = voronoi_bruteforce(&sites, bbox).unwrap();
    let (a, b) = (
        nucleus_cluster(&t, 12).unwrap(),
        nucleus_cluster(&t, 25 + 12).unwrap(),
    );
    let scan = a.members().iter().any(|&x| {
        b.members()
            .iter()
            .any(|&y| x == y || brute.is_adjacent(x, y))
    });
    assert!(!scan);
    assert!(!clusters_strongly_near(&t, &a, &b).unwrap());
    assert!(clusters_strongly_near(&t, &a, &a).unwrap());
}

#[test]
fn lattice_clusters_are_descriptively_near() {
    let sites = hex_sites(9);
    let t = tessellate(&sites, BoundingBox::around(&sites, 0.05).unwrap()).unwrap();
    let phi = RegionDescriptor::LOCATION_FREE;
    let tol = MatchTolerance::new(1e-9, 0.0, 0).unwrap();
    let (a, b) = (
        nucleus_cluster(&t, 2 * 9 + 2).unwrap(),
        nucleus_cluster(&t, 6 * 9 + 6).unwrap(),
    );
    assert!(!clusters_strongly_near(&t, &a, &b).unwrap());
    assert!(clusters_descriptively_near(&t, &a, &b, phi, &tol).unwrap());
    let x = cluster_descriptive_intersection(&t, &a, &b, phi, &tol).unwrap();
    assert_eq!(x, a.members().union(b.members()).copied().collect());
}

#[test]
fn random_clusters_with_zero_tolerance() {
    let unit = BoundingBox::from_bounds(0.0, 0.0, 1.0, 1.0).unwrap();
    let t = tessellate(&sites_random(60, &unit, 11), unit).unwrap();
    let phi = RegionDescriptor::LOCATION_FREE;
    let zero = MatchTolerance::ZERO;
    let cs = all_nucleus_clusters(&t);
    let areas: BTreeSet<u64> = t.regions().iter().map(|r| r.area().to_bits()).collect();
    assert_eq!(areas.len(), 60, "descriptors should all differ");
    for a in &cs {
        for b in &cs {
            let disjoint = a.members().is_disjoint(b.members());
            let near = clusters_descriptively_near(&t, a, b, phi, &zero).unwrap();
            let x = cluster_descriptive_intersection(&t, a, b, phi, &zero).unwrap();
            assert_eq!(near, !disjoint);
            assert_eq!(x, a.members().intersection(b.members()).copied().collect());
        }
    }
}

#[test]
fn validation_fixtures() {
    let unit = BoundingBox::from_bounds(0.0, 0.0, 1.0, 1.0).unwrap();
    let random = tessellate(&sites_random(100, &unit, 7), unit).unwrap();
    let hex = {
        let s = hex_sites(6);
        tessellate(&s, BoundingBox::around(&s, 0.1).unwrap()).unwrap()
    };
    for (name, t) in [("grid", grid(3)), ("random", random), ("hex", hex)] {
        for phi in [
            RegionDescriptor::LOCATION_FREE,
            RegionDescriptor::WITH_LOCATION,
        ] {
            let r = validate_theorems(&t, phi, &MatchTolerance::default(), None);
            assert!(r.passed(), "{name}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }
}

#[test]
fn asymmetric_adjacency_fails_item_six_only_among_cluster_checks() {
    let unit = BoundingBox::from_bounds(0.0, 0.0, 1.0, 1.0).unwrap();
    let mut t = tessellate(&sites_random(100, &unit, 7), unit).unwrap();
    let victim = t.neighbors(10)[0].region;
    t.neighbors_mut()[10].remove(0);
    let r = validate_theorems(
        &t,
        RegionDescriptor::WITH_LOCATION,
        &MatchTolerance::default(),
        None,
    );
    assert!(!r.passed());
    assert_eq!(r.get("covering").unwrap().status, CheckStatus::Pass);
    let six = r.get("sn_cluster_equivalence").unwrap();
    assert_eq!(six.status, CheckStatus::Fail);
    let mut pair = six.counterexample.as_ref().unwrap().regions.clone();
    pair.sort();
    assert_eq!(pair, [10.min(victim), 10.max(victim)]);
}
