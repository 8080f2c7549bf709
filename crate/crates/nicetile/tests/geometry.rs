mod common;

use std::f64::consts::PI;

use nicetile::geometry::*;
use nicetile::mesh::{icosahedron, icosahedron_positions};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const R: f64 = 5.0;

#[test]
fn icosahedron_faces_point_outward() {
    let m = icosahedron();
    let pos = icosahedron_positions();
    for &[a, b, c] in m.faces() {
        let n = cross(sub(pos[b], pos[a]), sub(pos[c], pos[a]));
        assert!(dot(n, pos[a]) > 0.0);
    }
}

#[test]
fn geodesic_sphere_faces_point_outward() {
    for f in 1..=4 {
        let em = geodesic_sphere(f, 2.0).unwrap();
        for &[a, b, c] in em.mesh.faces() {
            let (pa, pb, pc) = (em.positions[a], em.positions[b], em.positions[c]);
            assert!(dot(cross(sub(pb, pa), sub(pc, pa)), pa) > 0.0);
        }
        assert!(em.positions.iter().all(|p| (norm(*p) - 1.0).abs() < 1e-12));
    }
}

#[test]
fn distances() {
    let p = SpherePoint::from_angles(0.0, 0.0, 2.0);
    let q = SpherePoint::from_angles(PI / 2.0, 0.0, 2.0);
    assert!((sphere_distance(&p, &q).unwrap() - PI).abs() < 1e-12);
    assert!((chord_distance(&p, &q).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    assert!((sphere_distance(&p, &p.antipode()).unwrap() - 2.0 * PI).abs() < 1e-12);
    let r = SpherePoint::from_angles(0.0, 0.0, 3.0);
    assert!(sphere_distance(&p, &r).is_err());
}

#[test]
fn signed_distance_sign_and_value() {
    let north = [0.0, 0.0, 1.0];
    // Square at colatitude 0.5 around the north pole.
    let c = common::polygon_around(north, 0.5, 4, 0.0, R);
    let inside = SpherePoint::new(north, R).unwrap();
    let d = signed_cycle_distance(&inside, &c).unwrap();
    assert!(d > 0.0);
    // The pole is equidistant from all four edges: the edge midpoint distance.
    let mid = slerp(c.points[0], c.points[1], 0.5);
    assert!((d - R * angle(north, mid)).abs() < 1e-9);
    let south = SpherePoint::new([0.0, 0.0, -1.0], R).unwrap();
    assert!(signed_cycle_distance(&south, &c).unwrap() < 0.0);
    let on = SpherePoint::new(c.points[2], R).unwrap();
    assert_eq!(signed_cycle_distance(&on, &c).unwrap(), 0.0);
    let rev = c.reversed();
    assert!((signed_cycle_distance(&inside, &rev).unwrap() + d).abs() < 1e-12);
}

#[test]
fn set_distance_mixed_sides_is_zero() {
    let c = common::polygon_around([0.0, 0.0, 1.0], 0.5, 6, 0.1, R);
    let a = SpherePoint::new([0.0, 0.0, 1.0], R).unwrap();
    let b = SpherePoint::new([0.0, 0.0, -1.0], R).unwrap();
    assert_eq!(signed_set_distance(&[a, b], &c).unwrap(), 0.0);
    assert!(signed_set_distance(&[a], &c).unwrap() > 0.0);
    assert!(signed_set_distance(&[], &c).is_err());
    // Antipodes of points inside a small cap lie outside it.
    assert!(antipodal_gap(&c, &[a]).unwrap() < 0.0);
}

#[test]
fn broken_line_bound() {
    let pts: Vec<SpherePoint> = (0..10).map(|i| SpherePoint::from_angles(0.1 * i as f64, 0.0, R)).collect();
    let bl = broken_line_length(&pts, 1.0).unwrap();
    assert_eq!(bl.hops, 9);
    assert!((bl.length - 9.0 * 0.1 * R).abs() < 1e-9);
    assert_eq!(bl.bound_holds, Some(true));
    assert_eq!(broken_line_length(&pts, 0.4).unwrap().bound_holds, None);
}

#[test]
fn threshold_radius_formula() {
    assert!((threshold_radius(2.0, 1.0) - 46.5 / PI).abs() < 1e-12);
}

#[test]
fn premises_on_a_fine_sphere() {
    // Frequency 8 at radius 3: edges well below one unit.
    let em = geodesic_sphere(8, 3.0).unwrap();
    let r = verify_graph_premises(&em, 1.0, 1.0);
    assert!(r.edges_below_d1 && r.unit_disk_cover && r.edges_within_d2);
    assert!(r.pass);
    assert!(!r.radius_gate);
    let coarse = geodesic_sphere(1, 3.0).unwrap();
    assert!(!verify_graph_premises(&coarse, 1.0, 1.0).pass);
}

#[test]
fn mesh_doc_round_trip() {
    let em = geodesic_sphere(2, 1.5).unwrap();
    let back = EmbeddedMesh::from_doc(&em.to_doc()).unwrap();
    assert_eq!(back.mesh, em.mesh);
    assert!((back.radius - 1.5).abs() < 1e-15);
}

/// Upper bound on `max_{p1 in c1} dist(p1, c2)`: arc samples with spacing
/// `h` plus `h/2`, which covers the gap for a 1-Lipschitz function.
fn hausdorff_upper(c1: &SphericalCycle, c2: &SphericalCycle, per_edge: usize) -> f64 {
    let n = c1.points.len();
    let mut best: f64 = 0.0;
    let mut h: f64 = 0.0;
    for i in 0..n {
        let (a, b) = (c1.points[i], c1.points[(i + 1) % n]);
        h = h.max(c1.radius * angle(a, b) / per_edge as f64);
        for s in 0..=per_edge {
            let p = SpherePoint { dir: slerp(a, b, s as f64 / per_edge as f64), radius: c1.radius };
            best = best.max(signed_cycle_distance(&p, c2).unwrap().abs());
        }
    }
    best + h / 2.0
}

/// Nested polygons where p0 sits outside both, near a corner of the outer
/// triangle: moving from c1 to c2 changes the signed distance by more than
/// the largest distance from a point of c1 to c2.
#[test]
fn one_sided_nested_bound_can_fail() {
    let north = [0.0, 0.0, 1.0];
    let c1 = common::polygon_around(north, 0.3, 12, 0.0, R);
    let c2 = common::polygon_around(north, 1.0, 3, 0.0, R);
    // Just beyond the first corner of c2, on the ray from the center.
    let corner = c2.points[0];
    let p0 = SpherePoint::new(slerp(north, corner, 1.1), R).unwrap();
    let lhs = (signed_cycle_distance(&p0, &c1).unwrap() - signed_cycle_distance(&p0, &c2).unwrap()).abs();
    let one_sided = hausdorff_upper(&c1, &c2, 400);
    let two_sided = one_sided.max(hausdorff_upper(&c2, &c1, 400));
    assert!(lhs > one_sided + 0.1, "lhs {lhs} one-sided {one_sided}");
    assert!(lhs <= two_sided + 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_point_lipschitz_bound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let center = common::random_unit(&mut rng);
        let c = common::polygon_around(center, rng.gen_range(0.1..2.5), rng.gen_range(3..9), rng.gen_range(0.0..6.3), R);
        let p1 = SpherePoint::new(common::random_unit(&mut rng), R).unwrap();
        let p2 = SpherePoint::new(common::random_unit(&mut rng), R).unwrap();
        let lhs = (signed_cycle_distance(&p1, &c).unwrap() - signed_cycle_distance(&p2, &c).unwrap()).abs();
        prop_assert!(lhs <= sphere_distance(&p1, &p2).unwrap() + 1e-9);
    }

    #[test]
    fn nested_cycles_two_sided_bound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let center = common::random_unit(&mut rng);
        let r1: f64 = rng.gen_range(0.1..1.2);
        let r2: f64 = r1 + rng.gen_range(0.05..1.0);
        // The outer polygon's inscribed cap contains the inner polygon.
        let n2 = rng.gen_range(3..9);
        let r2 = r2.max((r1.tan() / (PI / n2 as f64).cos()).atan() + 0.01);
        prop_assume!(r2 < 1.5);
        let c1 = common::polygon_around(center, r1, rng.gen_range(3..9), rng.gen_range(0.0..6.3), R);
        let c2 = common::polygon_around(center, r2, n2, rng.gen_range(0.0..6.3), R);
        let p0 = SpherePoint::new(common::random_unit(&mut rng), R).unwrap();
        let lhs = (signed_cycle_distance(&p0, &c1).unwrap() - signed_cycle_distance(&p0, &c2).unwrap()).abs();
        // The one-sided bound over points of c1 is not enough when p0 lies
        // outside c1; the two-sided distance always bounds the change.
        let bound = hausdorff_upper(&c1, &c2, 200).max(hausdorff_upper(&c2, &c1, 200));
        prop_assert!(lhs <= bound + 1e-9);
    }

    #[test]
    fn reversal_negates(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = common::polygon_around(common::random_unit(&mut rng), rng.gen_range(0.1..2.5), 5, 0.3, R);
        let p = SpherePoint::new(common::random_unit(&mut rng), R).unwrap();
        let d = signed_cycle_distance(&p, &c).unwrap();
        prop_assert!((d + signed_cycle_distance(&p, &c.reversed()).unwrap()).abs() < 1e-9);
    }
}

