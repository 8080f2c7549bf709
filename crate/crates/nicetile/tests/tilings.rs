use std::f64::consts::PI;

use nicetile::coloring::{count_proper_colorings, is_nice_coloring, is_proper_coloring};
use nicetile::isbell::LatticePoint;
use nicetile::mesh::{double_torus, flat_torus, octahedron};
use nicetile::tilings::*;
use proptest::prelude::*;

fn opts() -> TilingOptions {
    TilingOptions::default()
}

fn square(color: u32, x: f64, y: f64, s: f64) -> Tile {
    Tile::polygon(color, vec![[x, y], [x + s, y], [x + s, y + s], [x, y + s]])
}

/// Chord distance between two cylinder tiles by dense edge sampling, with
/// its own spacing.
fn cylinder_chord_distance(doc: &TilingDoc, i: usize, j: usize, spacing: f64) -> f64 {
    let Domain::Cylinder { radius, .. } = doc.domain else { panic!() };
    let pts = |t: &Tile| -> Vec<[f64; 3]> {
        let mut out = Vec::new();
        for (a, b) in t.edges() {
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            let n = (len / spacing).ceil() as usize;
            for k in 0..=n {
                let u = k as f64 / n as f64;
                let s = a[0] + u * (b[0] - a[0]);
                let z = a[1] + u * (b[1] - a[1]);
                out.push([radius * (s / radius).cos(), radius * (s / radius).sin(), z]);
            }
        }
        out
    };
    let (p, q) = (pts(&doc.tiles[i]), pts(&doc.tiles[j]));
    let mut best = f64::INFINITY;
    for a in &p {
        for b in &q {
            best = best.min(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt());
        }
    }
    best
}

fn point_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let t = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    ((p[0] - a[0] - t * dx).powi(2) + (p[1] - a[1] - t * dy).powi(2)).sqrt()
}

/// Gap between disjoint convex polygons.
fn polygon_gap(p: &[[f64; 2]], q: &[[f64; 2]]) -> f64 {
    let one = |p: &[[f64; 2]], q: &[[f64; 2]]| {
        p.iter()
            .flat_map(|&v| (0..q.len()).map(move |k| (v, k)))
            .map(|(v, k)| point_segment(v, q[k], q[(k + 1) % q.len()]))
            .fold(f64::INFINITY, f64::min)
    };
    one(p, q).min(one(q, p))
}

#[test]
fn cylinder7_is_nice() {
    let doc = cylinder7();
    assert_eq!(doc.tiles.len(), 31);
    assert_eq!(doc.tiles.iter().filter(|t| t.kind == TileKind::Cap).count(), 2);
    let Domain::Cylinder { radius, height, .. } = doc.domain else { panic!("cylinder") };
    assert!((2.0 * PI * radius - 2.12).abs() < 1e-12);
    assert!((height - 7.336).abs() < 1e-12);
    let r = verify_nice_tiling(&doc, &opts()).unwrap();
    assert!(r.pass);
    assert!(r.diameter_margin > 0.0 && r.distance_margin.unwrap() > 0.0);
    assert!((r.max_diameter - 0.9278).abs() < 1e-3);
    assert!((r.min_same_color_distance.unwrap() - 1.1351).abs() < 1e-3);
    assert!(r.error_bar < 0.01 && !r.exact);
    // Independent sampling of the closest same-color pair agrees.
    let (i, j) = r.closest_pair.unwrap();
    let check = cylinder_chord_distance(&doc, i, j, 0.0005);
    assert!((check - r.min_same_color_distance.unwrap()).abs() <= r.error_bar + 1e-3);
}

#[test]
fn cylinder7_adjacency_is_a_nice_sphere_triangulation() {
    let doc = cylinder7();
    let adj = adjacency_graph(&doc, &opts()).unwrap();
    assert_eq!(adj.contacts.len(), 87);
    let m = adj.mesh.as_ref().expect("fully triangulated");
    assert_eq!(m.vertex_count(), 31);
    assert_eq!(m.euler_characteristic(), 2);
    let g = adj.graph(31);
    assert!(is_nice_coloring(&g, &tile_coloring(&doc)).unwrap().nice);
    assert!(adj.contacts.iter().all(|c| c.shared_length > 0.0));
}

#[test]
fn shrunken_cylinder_fails() {
    let r = verify_nice_tiling(&cylinder7().scaled(0.85), &opts()).unwrap();
    assert!(!r.pass);
    assert!(r.distance_margin.unwrap() < 0.0);
}

#[test]
fn cylinder_doc_round_trip() {
    let doc = cylinder7();
    let text = serde_json::to_string(&doc).unwrap();
    let back: TilingDoc = serde_json::from_str(&text).unwrap();
    assert_eq!(back, doc);
    assert!(text.contains("\"kind\":\"cylinder\""));
}

#[test]
fn plane_isbell_patch() {
    let doc = plane_isbell(4);
    assert_eq!(doc.tiles.len(), 61);
    let r = verify_nice_tiling(&doc, &opts()).unwrap();
    assert!(r.pass && r.exact);
    assert!((r.max_diameter - 0.98).abs() < 1e-9);
    // Brute force over vertex-to-edge distances of same-color pairs.
    let mut expect = f64::INFINITY;
    for (i, a) in doc.tiles.iter().enumerate() {
        for b in &doc.tiles[i + 1..] {
            if a.color == b.color {
                expect = expect.min(polygon_gap(&a.polygon, &b.polygon));
            }
        }
    }
    assert!((r.min_same_color_distance.unwrap() - expect).abs() < 1e-9);
    assert!((expect - 1.29642).abs() < 1e-5);
    // Tile adjacency equals lattice adjacency.
    let pts = plane_isbell_points(4);
    let adj = adjacency_graph(&doc, &opts()).unwrap();
    let mut got: Vec<(usize, usize)> = adj.contacts.iter().map(|c| (c.a, c.b)).collect();
    got.sort_unstable();
    let mut want = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[i].direction_to(pts[j]).is_some() {
                want.push((i, j));
            }
        }
    }
    assert_eq!(got, want);
}

#[test]
fn torus_isbell_wraps() {
    let doc = torus_isbell(7, 7).unwrap();
    let r = verify_nice_tiling(&doc, &opts()).unwrap();
    assert!(r.pass);
    let adj = adjacency_graph(&doc, &opts()).unwrap();
    let m = adj.mesh.expect("closed triangulation");
    assert_eq!(m.euler_characteristic(), 0);
    assert!((0..49).all(|v| m.degree(v) == 6));
    assert!(torus_isbell(5, 7).is_err());
    assert!(torus_isbell(14, 7).is_ok());
}

#[test]
fn genus_construction_distances() {
    let doc = genus_construction(&GenusParams::default()).unwrap();
    let r = verify_nice_tiling(&doc, &opts()).unwrap();
    assert!(r.pass);
    let expect = (0.45f64.powi(2) + 0.9f64.powi(2)).sqrt();
    assert!((r.min_same_color_distance.unwrap() - expect).abs() < 1e-9);
    assert!((r.max_diameter - 0.9).abs() < 1e-9);
    let bars = crossbars(&doc);
    assert_eq!(bars.len(), 3);
    for (x, &i) in bars.iter().enumerate() {
        for &j in &bars[x + 1..] {
            let dx = (doc.tiles[i].polygon[0][0] - doc.tiles[j].polygon[0][0]).abs();
            assert!(dx > 1.0);
        }
    }
}

#[test]
fn genus_rail_distance_threshold() {
    let at = |d: f64| {
        let p = GenusParams { rail_distance: d, ..GenusParams::default() };
        verify_nice_tiling(&genus_construction(&p).unwrap(), &opts()).unwrap()
    };
    let critical = (1.0f64 - 0.45 * 0.45).sqrt();
    assert!(at(critical + 1e-3).pass);
    assert!(!at(critical - 1e-3).pass);
    // Margins grow with the rail distance.
    let mut last = f64::NEG_INFINITY;
    for k in 0..10 {
        let m = at(0.85 + 0.01 * k as f64).distance_margin.unwrap();
        assert!(m >= last - 1e-12);
        last = m;
    }
}

#[test]
fn genus_scales_with_k() {
    for k in [1, 4, 9] {
        let doc = genus_construction(&GenusParams { k, ..GenusParams::default() }).unwrap();
        assert_eq!(crossbars(&doc).len(), k + 1);
        assert!(verify_nice_tiling(&doc, &opts()).unwrap().pass);
    }
}

#[test]
fn moser_spindle_facts() {
    let s = moser_spindle();
    assert_eq!(s.points.len(), 7);
    assert_eq!(s.unit_pairs(1e-9).len(), 11);
    let g = s.unit_distance_graph(1e-9);
    assert_eq!(count_proper_colorings(&g, 3), 0);
    assert!(count_proper_colorings(&g, 4) > 0);
    assert!(!is_proper_coloring(&g, &[1; 7]));
}

#[test]
fn builtin_names() {
    for name in ["cylinder7", "plane_isbell", "torus_isbell", "genus4", "genus4(3)"] {
        assert!(matches!(builtin_construction(name).unwrap(), Construction::Tiling(_)), "{name}");
    }
    assert!(matches!(builtin_construction("moser_spindle").unwrap(), Construction::Points(_)));
    assert!(builtin_construction("klein_bottle").is_err());
    assert!(builtin_construction("genus4(x)").is_err());
}

#[test]
fn overlapping_tiles_are_rejected() {
    let doc = TilingDoc { domain: Domain::Plane, k: 2, tiles: vec![square(1, 0.0, 0.0, 0.5), square(2, 0.25, 0.25, 0.5)] };
    assert!(matches!(verify_nice_tiling(&doc, &opts()), Err(TilingError::Overlap(0, 1))));
    // Touching along an edge is fine.
    let ok = TilingDoc { domain: Domain::Plane, k: 2, tiles: vec![square(1, 0.0, 0.0, 0.5), square(2, 0.5, 0.0, 0.5)] };
    assert!(verify_nice_tiling(&ok, &opts()).unwrap().pass);
}

#[test]
fn invalid_docs() {
    let bad_color = TilingDoc { domain: Domain::Plane, k: 1, tiles: vec![square(2, 0.0, 0.0, 0.5)] };
    assert!(matches!(bad_color.validate(), Err(TilingError::BadColor { .. })));
    let flat = TilingDoc { domain: Domain::Plane, k: 1, tiles: vec![Tile::polygon(1, vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])] };
    assert!(matches!(flat.validate(), Err(TilingError::Degenerate(0))));
    let cap = Tile { color: 1, polygon: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], kind: TileKind::Cap, cap_end: None };
    let plane_cap = TilingDoc { domain: Domain::Plane, k: 1, tiles: vec![cap] };
    assert!(plane_cap.validate().is_err());
}

#[test]
fn same_color_distance_on_the_plane_is_exact() {
    let doc = TilingDoc { domain: Domain::Plane, k: 1, tiles: vec![square(1, 0.0, 0.0, 0.5), square(1, 1.7, 0.0, 0.5)] };
    let r = verify_nice_tiling(&doc, &opts()).unwrap();
    assert!((r.min_same_color_distance.unwrap() - 1.2).abs() < 1e-12);
    assert!((r.max_diameter - 0.5 * 2f64.sqrt()).abs() < 1e-12);
    assert!(r.pass);
}

#[test]
fn torus_checks_a_tile_against_its_own_translates() {
    // A single tile on a small torus is too close to its own copy.
    let small = TilingDoc {
        domain: Domain::FlatTorus { periods: [[1.2, 0.0], [0.0, 5.0]] },
        k: 1,
        tiles: vec![square(1, 0.0, 0.0, 0.5)],
    };
    let r = verify_nice_tiling(&small, &opts()).unwrap();
    assert!((r.min_same_color_distance.unwrap() - 0.7).abs() < 1e-12);
    assert!(!r.pass);
}

#[test]
fn euler_obstruction_by_genus() {
    let g2 = euler_obstruction(&double_torus(5, 10, 5, 10).unwrap());
    assert_eq!((g2.vertices, g2.edges), (100, 306));
    assert!((g2.average_degree - 6.12).abs() < 1e-12);
    assert!(g2.obstruction && g2.max_degree >= 7);
    let torus = euler_obstruction(&flat_torus(6, 6).unwrap());
    assert!(!torus.obstruction && torus.average_degree == 6.0);
    let sphere = euler_obstruction(&octahedron());
    assert!(!sphere.obstruction && sphere.average_degree < 6.0);
}

#[test]
fn lattice_center_spacing() {
    let doc = plane_isbell(1);
    let c0 = doc.tiles[3].centroid();
    let p = LatticePoint::new(0, 0).to_plane();
    assert!((c0[0] - p.0 * HEX_SPACING).abs() < 1e-12 && (c0[1] - p.1 * HEX_SPACING).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scaling_scales_metrics(f in 0.5f64..1.5) {
        let doc = plane_isbell(2);
        let a = verify_nice_tiling(&doc, &opts()).unwrap();
        let b = verify_nice_tiling(&doc.scaled(f), &opts()).unwrap();
        prop_assert!((b.max_diameter - f * a.max_diameter).abs() < 1e-9);
        prop_assert!((b.min_same_color_distance.unwrap() - f * a.min_same_color_distance.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn translation_invariance(dx in -3.0f64..3.0, dy in -3.0f64..3.0) {
        let doc = genus_construction(&GenusParams::default()).unwrap();
        let a = verify_nice_tiling(&doc, &opts()).unwrap();
        let b = verify_nice_tiling(&doc.shifted([dx, dy]), &opts()).unwrap();
        prop_assert!((a.min_same_color_distance.unwrap() - b.min_same_color_distance.unwrap()).abs() < 1e-9);
        prop_assert_eq!(a.pass, b.pass);
    }

    #[test]
    fn cylinder_turns_preserve_distances(ds in 0.0f64..2.12) {
        let doc = cylinder7();
        let a = verify_nice_tiling(&doc, &opts()).unwrap();
        let b = verify_nice_tiling(&doc.shifted([ds, 0.0]), &opts()).unwrap();
        prop_assert!((a.min_same_color_distance.unwrap() - b.min_same_color_distance.unwrap()).abs() <= 2.0 * a.error_bar);
    }
}
