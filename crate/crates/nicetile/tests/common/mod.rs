//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use nicetile::geometry::{dot, normalize, SpherePoint, SphericalCycle, Vec3};
use nicetile::isbell::{LatticePoint, DIRECTIONS};
use nicetile::mesh::{DirectedCycle, TriMesh};
use rand::Rng;

/// Faces on the left of `c`, flooding across edges that are not on `c`.
pub fn flood_faces(m: &TriMesh, c: &DirectedCycle) -> BTreeSet<usize> {
    let cut: BTreeSet<(usize, usize)> = c.darts().flat_map(|(a, b)| [(a, b), (b, a)]).collect();
    let start = m.face_left(c.at(0), c.at(1)).unwrap();
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(f) = queue.pop_front() {
        let t = m.faces()[f];
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            if cut.contains(&(a, b)) {
                continue;
            }
            let g = m.face_left(b, a).unwrap();
            if seen.insert(g) {
                queue.push_back(g);
            }
        }
    }
    seen
}

/// `(curvature, irregular multiplicity inside, inside triangles)` from a
/// face flood fill. Per cycle vertex the curvature is `3 - faces inside at v`.
pub fn flood_curvature(m: &TriMesh, c: &DirectedCycle) -> (i64, i64, usize) {
    let faces = flood_faces(m, c);
    let on_cycle: BTreeSet<usize> = c.vertices.iter().copied().collect();
    let mut at = vec![0i64; m.vertex_count()];
    for &f in &faces {
        for v in m.faces()[f] {
            at[v] += 1;
        }
    }
    let curvature = c.vertices.iter().map(|&v| 3 - at[v]).sum();
    let inside: BTreeSet<usize> =
        faces.iter().flat_map(|&f| m.faces()[f]).filter(|v| !on_cycle.contains(v)).collect();
    let multiplicity = inside.iter().map(|&v| 6 - m.degree(v) as i64).sum();
    (curvature, multiplicity, faces.len())
}

pub fn random_unit<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = dot(v, v);
        if n > 1e-4 && n <= 1.0 {
            return normalize(v).unwrap();
        }
    }
}

/// Counterclockwise polygon of `n` vertices at angular radius `r` around
/// `center`, starting at angle `phase`.
pub fn polygon_around(center: Vec3, r: f64, n: usize, phase: f64, radius: f64) -> SphericalCycle {
    let helper = if center[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = normalize(nicetile::geometry::cross(helper, center)).unwrap();
    let e2 = nicetile::geometry::cross(center, e1);
    let pts: Vec<SpherePoint> = (0..n)
        .map(|i| {
            let t = phase + std::f64::consts::TAU * i as f64 / n as f64;
            let v = [
                r.cos() * center[0] + r.sin() * (t.cos() * e1[0] + t.sin() * e2[0]),
                r.cos() * center[1] + r.sin() * (t.cos() * e1[1] + t.sin() * e2[1]),
                r.cos() * center[2] + r.sin() * (t.cos() * e1[2] + t.sin() * e2[2]),
            ];
            SpherePoint::new(v, radius).unwrap()
        })
        .collect();
    SphericalCycle::new(&pts).unwrap()
}

/// Random closed lattice walk: a random walk out, then a straight return.
pub fn random_lattice_cycle<R: Rng>(rng: &mut R, max_len: usize) -> Vec<LatticePoint> {
    loop {
        let out = rng.gen_range(1..=max_len / 2);
        let mut walk = vec![LatticePoint::new(0, 0)];
        for _ in 0..out {
            let last = *walk.last().unwrap();
            walk.push(last.step(rng.gen_range(0..6)));
        }
        // Greedy return: each step toward the origin shrinks the hex distance.
        let origin = LatticePoint::new(0, 0);
        while walk.last().unwrap().hex_distance(origin) > 0 {
            let last = *walk.last().unwrap();
            let next = (0..6)
                .map(|d| last.step(d))
                .min_by_key(|p| p.hex_distance(origin))
                .unwrap();
            walk.push(next);
        }
        walk.pop();
        if walk.len() >= 3 && walk.len() <= max_len {
            return walk;
        }
    }
}

pub fn lattice_direction(p: LatticePoint, q: LatticePoint) -> usize {
    DIRECTIONS.iter().position(|&(a, b)| (q.a - p.a, q.b - p.b) == (a, b)).expect("adjacent")
}
