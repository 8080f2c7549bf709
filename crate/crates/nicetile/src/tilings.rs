//! Polygonal tilings of the plane, a capped cylinder and flat tori, their
//! niceness check, adjacency graphs and the built-in constructions.
//!
//! Plane and torus coordinates are Cartesian. Cylinder coordinates are
//! `[s, z]`: arc length around the axis and height. A cylinder tile of kind
//! `cap` additionally owns the whole end disk named by `cap_end`.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::{Coloring, SimpleGraph};
use crate::isbell::{isbell_color, Chirality, IsbellParams, LatticePoint};
use crate::mesh::TriMesh;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TilingError {
    #[error("tiles {0} and {1} overlap")]
    Overlap(usize, usize),
    #[error("tile {tile} has color {color} outside 1..={k}")]
    BadColor { tile: usize, color: u32, k: usize },
    #[error("tile {0} is degenerate")]
    Degenerate(usize),
    #[error("tile {0}: {1}")]
    BadTile(usize, String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown construction {0:?}")]
    UnknownConstruction(String),
}

pub type P2 = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Plane,
    Cylinder {
        radius: f64,
        height: f64,
        #[serde(default)]
        base: f64,
    },
    FlatTorus {
        periods: [P2; 2],
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TileKind {
    #[default]
    Polygon,
    Cap,
    Segment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapEnd {
    Bottom,
    Top,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tile {
    pub color: u32,
    pub polygon: Vec<P2>,
    #[serde(default)]
    pub kind: TileKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap_end: Option<CapEnd>,
}

impl Tile {
    pub fn polygon(color: u32, polygon: Vec<P2>) -> Tile {
        Tile { color, polygon, kind: TileKind::Polygon, cap_end: None }
    }

    pub fn segment(color: u32, a: P2, b: P2) -> Tile {
        Tile { color, polygon: vec![a, b], kind: TileKind::Segment, cap_end: None }
    }

    /// Boundary edges; a segment tile is its own single edge.
    pub fn edges(&self) -> Vec<(P2, P2)> {
        let p = &self.polygon;
        match self.kind {
            TileKind::Segment => p.windows(2).map(|w| (w[0], w[1])).collect(),
            _ => (0..p.len()).map(|i| (p[i], p[(i + 1) % p.len()])).collect(),
        }
    }

    fn is_area(&self) -> bool {
        self.kind != TileKind::Segment
    }

    pub fn centroid(&self) -> P2 {
        let n = self.polygon.len() as f64;
        let (x, y) = self.polygon.iter().fold((0.0, 0.0), |(x, y), p| (x + p[0], y + p[1]));
        [x / n, y / n]
    }

    fn translated(&self, t: P2) -> Tile {
        let mut out = self.clone();
        for p in &mut out.polygon {
            p[0] += t[0];
            p[1] += t[1];
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TilingDoc {
    pub domain: Domain,
    pub k: usize,
    pub tiles: Vec<Tile>,
}

impl TilingDoc {
    /// Same tiling with every length multiplied by `f`.
    pub fn scaled(&self, f: f64) -> TilingDoc {
        let domain = match &self.domain {
            Domain::Plane => Domain::Plane,
            Domain::Cylinder { radius, height, base } => {
                Domain::Cylinder { radius: radius * f, height: height * f, base: base * f }
            }
            Domain::FlatTorus { periods } => Domain::FlatTorus { periods: periods.map(|p| [p[0] * f, p[1] * f]) },
        };
        let tiles = self
            .tiles
            .iter()
            .map(|t| Tile { polygon: t.polygon.iter().map(|p| [p[0] * f, p[1] * f]).collect(), ..t.clone() })
            .collect();
        TilingDoc { domain, k: self.k, tiles }
    }

    /// Rigid motion of the domain: a turn about the cylinder axis plus an
    /// axial shift, or a plain translation elsewhere.
    pub fn shifted(&self, t: P2) -> TilingDoc {
        let domain = match &self.domain {
            Domain::Cylinder { radius, height, base } => {
                Domain::Cylinder { radius: *radius, height: *height, base: base + t[1] }
            }
            d => d.clone(),
        };
        TilingDoc { domain, k: self.k, tiles: self.tiles.iter().map(|x| x.translated(t)).collect() }
    }

    pub fn validate(&self) -> Result<(), TilingError> {
        if self.k == 0 {
            return Err(TilingError::InvalidParameter("k must be positive".into()));
        }
        match &self.domain {
            Domain::Cylinder { radius, height, .. } if !(*radius > 0.0 && *height > 0.0) => {
                return Err(TilingError::InvalidParameter("cylinder radius and height must be positive".into()))
            }
            Domain::FlatTorus { periods } if cross2(periods[0], periods[1]).abs() < 1e-12 => {
                return Err(TilingError::InvalidParameter("torus periods are parallel".into()))
            }
            _ => {}
        }
        for (i, t) in self.tiles.iter().enumerate() {
            if t.color == 0 || t.color as usize > self.k {
                return Err(TilingError::BadColor { tile: i, color: t.color, k: self.k });
            }
            let need = if t.is_area() { 3 } else { 2 };
            if t.polygon.len() < need || t.polygon.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
                return Err(TilingError::Degenerate(i));
            }
            if t.is_area() && signed_area(&t.polygon).abs() < 1e-12 {
                return Err(TilingError::Degenerate(i));
            }
            match (t.kind, &self.domain) {
                (TileKind::Cap, Domain::Cylinder { .. }) if t.cap_end.is_none() => {
                    return Err(TilingError::BadTile(i, "cap tile without cap_end".into()))
                }
                (TileKind::Cap, Domain::Plane | Domain::FlatTorus { .. }) => {
                    return Err(TilingError::BadTile(i, "cap tiles need a cylinder".into()))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Lattice translations worth checking between tile copies.
    fn shifts(&self) -> Vec<P2> {
        match &self.domain {
            Domain::Plane => vec![[0.0, 0.0]],
            Domain::Cylinder { radius, .. } => {
                let c = 2.0 * PI * radius;
                vec![[0.0, 0.0], [c, 0.0], [-c, 0.0]]
            }
            Domain::FlatTorus { periods } => {
                let mut out = vec![[0.0, 0.0]];
                for i in -1i32..=1 {
                    for j in -1i32..=1 {
                        if (i, j) != (0, 0) {
                            let (fi, fj) = (f64::from(i), f64::from(j));
                            out.push([
                                fi * periods[0][0] + fj * periods[1][0],
                                fi * periods[0][1] + fj * periods[1][1],
                            ]);
                        }
                    }
                }
                out
            }
        }
    }
}

fn cross2(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn sub2(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn dist2(a: P2, b: P2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub fn signed_area(p: &[P2]) -> f64 {
    (0..p.len()).map(|i| cross2(p[i], p[(i + 1) % p.len()])).sum::<f64>() / 2.0
}

fn point_segment_distance(p: P2, a: P2, b: P2) -> f64 {
    let ab = sub2(b, a);
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 == 0.0 { 0.0 } else { ((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2 };
    let t = t.clamp(0.0, 1.0);
    dist2(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

/// Whether the open segments cross at a single interior point.
fn segments_cross(a: P2, b: P2, c: P2, d: P2, eps: f64) -> bool {
    let d1 = cross2(sub2(b, a), sub2(c, a));
    let d2 = cross2(sub2(b, a), sub2(d, a));
    let d3 = cross2(sub2(d, c), sub2(a, c));
    let d4 = cross2(sub2(d, c), sub2(b, c));
    ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))
}

fn segment_distance(a: P2, b: P2, c: P2, d: P2) -> f64 {
    if segments_cross(a, b, c, d, 0.0) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// Strictly inside, by winding parity; points within `eps` of the boundary
/// count as outside.
fn strictly_inside(p: P2, poly: &[P2], eps: f64) -> bool {
    let n = poly.len();
    if (0..n).any(|i| point_segment_distance(p, poly[i], poly[(i + 1) % n]) <= eps) {
        return false;
    }
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn interiors_overlap(s: &Tile, t: &Tile, eps: f64) -> bool {
    for (a, b) in s.edges() {
        for (c, d) in t.edges() {
            if segments_cross(a, b, c, d, eps) {
                return true;
            }
        }
    }
    let inside = |x: &Tile, y: &Tile| {
        y.is_area()
            && (x.polygon.iter().any(|&p| strictly_inside(p, &y.polygon, eps))
                || (x.is_area() && strictly_inside(x.centroid(), &y.polygon, eps)))
    };
    inside(s, t) || inside(t, s)
}

/// Exact distance between two tiles in the chart (zero if they meet).
fn chart_distance(s: &Tile, t: &Tile) -> f64 {
    let mut best = f64::INFINITY;
    for (a, b) in s.edges() {
        for (c, d) in t.edges() {
            best = best.min(segment_distance(a, b, c, d));
        }
    }
    if interiors_overlap(s, t, 0.0) {
        0.0
    } else {
        best
    }
}

fn chart_diameter(t: &Tile) -> f64 {
    let p = &t.polygon;
    let mut best: f64 = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            best = best.max(dist2(p[i], p[j]));
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TilingOptions {
    /// Boundary samples per tile for the cylinder metric.
    pub samples_per_tile: usize,
    /// Also treat tiles touching at a single point as adjacent.
    pub point_contact: bool,
    pub tolerance: f64,
}

impl Default for TilingOptions {
    fn default() -> Self {
        TilingOptions { samples_per_tile: 1000, point_contact: false, tolerance: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TilingReport {
    pub tiles: usize,
    pub k: usize,
    pub max_diameter: f64,
    pub widest_tile: usize,
    /// `1 - max_diameter - error_bar`.
    pub diameter_margin: f64,
    pub min_same_color_distance: Option<f64>,
    pub closest_pair: Option<(usize, usize)>,
    /// `min_same_color_distance - 1 - error_bar`.
    pub distance_margin: Option<f64>,
    /// Zero for exact metrics; the sampling gap on the cylinder.
    pub error_bar: f64,
    pub exact: bool,
    pub pass: bool,
}

/// Checks tile diameters below 1 and same-color distances above 1.
pub fn verify_nice_tiling(doc: &TilingDoc, opts: &TilingOptions) -> Result<TilingReport, TilingError> {
    doc.validate()?;
    check_overlaps(doc, opts.tolerance)?;
    let n = doc.tiles.len();
    let (diams, pair_dist, error_bar, exact): (Vec<f64>, Box<dyn Fn(usize, usize) -> f64>, f64, bool) =
        match &doc.domain {
            Domain::Cylinder { .. } => {
                let sampler = CylinderSampler::new(doc, opts.samples_per_tile);
                let diams = (0..n).map(|i| sampler.diameter(i)).collect();
                let err = sampler.fine_gap;
                (diams, Box::new(move |i, j| sampler.distance(i, j)), err, false)
            }
            _ => {
                let shifts = doc.shifts();
                let tiles = doc.tiles.clone();
                let diams = tiles.iter().map(chart_diameter).collect();
                let f = move |i: usize, j: usize| {
                    shifts
                        .iter()
                        .filter(|s| i != j || s[0] != 0.0 || s[1] != 0.0)
                        .map(|&s| chart_distance(&tiles[i], &tiles[j].translated(s)))
                        .fold(f64::INFINITY, f64::min)
                };
                (diams, Box::new(f), 0.0, true)
            }
        };
    let (widest_tile, max_diameter) =
        diams.iter().copied().enumerate().fold((0, 0.0), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
    let mut closest: Option<(f64, (usize, usize))> = None;
    let self_pairs = matches!(doc.domain, Domain::FlatTorus { .. });
    for i in 0..n {
        let start = if self_pairs { i } else { i + 1 };
        for j in start..n {
            if doc.tiles[i].color != doc.tiles[j].color {
                continue;
            }
            let d = pair_dist(i, j);
            if closest.is_none_or(|c| d < c.0) {
                closest = Some((d, (i, j)));
            }
        }
    }
    let diameter_margin = 1.0 - max_diameter - error_bar;
    let distance_margin = closest.map(|c| c.0 - 1.0 - error_bar);
    let pass = diameter_margin > 0.0 && distance_margin.is_none_or(|m| m > 0.0);
    Ok(TilingReport {
        tiles: n,
        k: doc.k,
        max_diameter,
        widest_tile,
        diameter_margin,
        min_same_color_distance: closest.map(|c| c.0),
        closest_pair: closest.map(|c| c.1),
        distance_margin,
        error_bar,
        exact,
        pass,
    })
}

fn check_overlaps(doc: &TilingDoc, eps: f64) -> Result<(), TilingError> {
    let shifts = doc.shifts();
    let n = doc.tiles.len();
    let boxes: Vec<[f64; 4]> = doc.tiles.iter().map(|t| bbox(&t.polygon)).collect();
    for i in 0..n {
        for j in i..n {
            for &s in &shifts {
                if i == j && s == [0.0, 0.0] {
                    continue;
                }
                let b = boxes[j];
                let shifted = [b[0] + s[0], b[1] + s[1], b[2] + s[0], b[3] + s[1]];
                if !boxes_meet(boxes[i], shifted, eps) {
                    continue;
                }
                if interiors_overlap(&doc.tiles[i], &doc.tiles[j].translated(s), eps) {
                    return Err(TilingError::Overlap(i, j));
                }
            }
        }
    }
    Ok(())
}

fn bbox(p: &[P2]) -> [f64; 4] {
    p.iter().fold([f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY], |b, q| {
        [b[0].min(q[0]), b[1].min(q[1]), b[2].max(q[0]), b[3].max(q[1])]
    })
}

fn boxes_meet(a: [f64; 4], b: [f64; 4], eps: f64) -> bool {
    a[0] <= b[2] + eps && b[0] <= a[2] + eps && a[1] <= b[3] + eps && b[1] <= a[3] + eps
}

/// Boundary samples of cylinder tiles mapped into space. Extremes of the
/// chord distance over a tile are reached on its boundary, and for a cap on
/// its rim circle, so boundary samples with spacing `h` bound the true values
/// within `h`.
struct CylinderSampler {
    coarse: Vec<Vec<[f64; 3]>>,
    fine: Vec<Vec<[f64; 3]>>,
    coarse_gap: f64,
    fine_gap: f64,
}

const COARSE_GAP: f64 = 0.05;

impl CylinderSampler {
    fn new(doc: &TilingDoc, samples: usize) -> CylinderSampler {
        let Domain::Cylinder { radius, height, base } = doc.domain else { unreachable!() };
        let perimeter = |t: &Tile| -> f64 {
            let mut l: f64 = t.edges().iter().map(|(a, b)| dist2(*a, *b)).sum();
            if t.kind == TileKind::Cap {
                l += 2.0 * PI * radius;
            }
            l
        };
        let fine_gap = doc.tiles.iter().map(|t| perimeter(t) / samples.max(1) as f64).fold(0.0, f64::max);
        let sample = |t: &Tile, gap: f64| -> Vec<[f64; 3]> {
            let mut out = Vec::new();
            let to3 = |p: P2| [radius * (p[0] / radius).cos(), radius * (p[0] / radius).sin(), p[1]];
            for (a, b) in t.edges() {
                let steps = (dist2(a, b) / gap).ceil().max(1.0) as usize;
                for s in 0..=steps {
                    let u = s as f64 / steps as f64;
                    out.push(to3([a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])]));
                }
            }
            if let Some(end) = t.cap_end {
                let z = match end {
                    CapEnd::Bottom => base,
                    CapEnd::Top => base + height,
                };
                let steps = (2.0 * PI * radius / gap).ceil().max(8.0) as usize;
                for s in 0..steps {
                    let th = 2.0 * PI * s as f64 / steps as f64;
                    out.push([radius * th.cos(), radius * th.sin(), z]);
                }
            }
            out
        };
        CylinderSampler {
            coarse: doc.tiles.iter().map(|t| sample(t, COARSE_GAP)).collect(),
            fine: doc.tiles.iter().map(|t| sample(t, fine_gap)).collect(),
            coarse_gap: COARSE_GAP,
            fine_gap,
        }
    }

    fn diameter(&self, i: usize) -> f64 {
        let p = &self.fine[i];
        let mut best: f64 = 0.0;
        for a in 0..p.len() {
            for b in a + 1..p.len() {
                best = best.max(dist3(p[a], p[b]));
            }
        }
        best
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        let min_between = |x: &[[f64; 3]], y: &[[f64; 3]]| {
            x.iter().flat_map(|&a| y.iter().map(move |&b| dist3(a, b))).fold(f64::INFINITY, f64::min)
        };
        let coarse = min_between(&self.coarse[i], &self.coarse[j]);
        if coarse - self.coarse_gap > 1.0 + 4.0 * self.coarse_gap {
            // Far apart: the coarse value is reported, never the minimum.
            return coarse;
        }
        min_between(&self.fine[i], &self.fine[j])
    }
}

fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contact {
    pub a: usize,
    pub b: usize,
    pub shared_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjacencyGraph {
    pub contacts: Vec<Contact>,
    /// Neighbors of each tile in counterclockwise order when derivable.
    pub rotation: Option<Vec<Vec<usize>>>,
    #[serde(skip)]
    pub mesh: Option<TriMesh>,
}

impl AdjacencyGraph {
    pub fn graph(&self, n: usize) -> SimpleGraph {
        let edges: Vec<(usize, usize)> = self.contacts.iter().map(|c| (c.a, c.b)).collect();
        SimpleGraph::from_edges(n, &edges)
    }

    pub fn is_fully_triangulated(&self) -> bool {
        self.mesh.is_some()
    }
}

/// Collinear overlap of two segments: length and midpoint.
fn collinear_overlap(a: P2, b: P2, c: P2, d: P2, eps: f64) -> Option<(f64, P2)> {
    let ab = sub2(b, a);
    let len = ab[0].hypot(ab[1]);
    if len < eps {
        return None;
    }
    let dir = [ab[0] / len, ab[1] / len];
    let off = |p: P2| cross2(dir, sub2(p, a));
    if off(c).abs() > eps || off(d).abs() > eps {
        return None;
    }
    let proj = |p: P2| (p[0] - a[0]) * dir[0] + (p[1] - a[1]) * dir[1];
    let (lo, hi) = {
        let (x, y) = (proj(c), proj(d));
        (x.min(y).max(0.0), x.max(y).min(len))
    };
    (hi - lo > eps).then(|| {
        let m = (lo + hi) / 2.0;
        (hi - lo, [a[0] + m * dir[0], a[1] + m * dir[1]])
    })
}

/// Contact points of two tiles in the chart: shared length and a
/// representative point on the shared boundary.
fn contact(s: &Tile, t: &Tile, eps: f64, point_contact: bool) -> Option<(f64, P2)> {
    let mut total = 0.0;
    let mut best: Option<(f64, P2)> = None;
    for (a, b) in s.edges() {
        for (c, d) in t.edges() {
            if let Some((l, m)) = collinear_overlap(a, b, c, d, eps) {
                total += l;
                if best.is_none_or(|x| l > x.0) {
                    best = Some((l, m));
                }
            }
        }
    }
    if let Some((_, m)) = best {
        return Some((total, m));
    }
    if point_contact {
        for (a, b) in s.edges() {
            for &p in &t.polygon {
                if point_segment_distance(p, a, b) <= eps {
                    return Some((0.0, p));
                }
            }
        }
        for (c, d) in t.edges() {
            for &p in &s.polygon {
                if point_segment_distance(p, c, d) <= eps {
                    return Some((0.0, p));
                }
            }
        }
    }
    None
}

/// Rim contact between a cylinder tile and the end disk at height `z`.
fn rim_contact(t: &Tile, z: f64, eps: f64, point_contact: bool) -> Option<(f64, P2)> {
    let mut total = 0.0;
    let mut best: Option<(f64, P2)> = None;
    for (a, b) in t.edges() {
        if (a[1] - z).abs() <= eps && (b[1] - z).abs() <= eps {
            let l = dist2(a, b);
            if l > eps {
                total += l;
                if best.is_none_or(|x| l > x.0) {
                    best = Some((l, [(a[0] + b[0]) / 2.0, z]));
                }
            }
        }
    }
    if let Some((_, m)) = best {
        return Some((total, m));
    }
    if point_contact {
        if let Some(p) = t.polygon.iter().find(|p| (p[1] - z).abs() <= eps) {
            return Some((0.0, *p));
        }
    }
    None
}

/// Tile adjacency by shared boundary of positive length (or any contact
/// with `point_contact`), plus a rotation system and a triangle mesh when
/// every face of the dual is a triangle.
pub fn adjacency_graph(doc: &TilingDoc, opts: &TilingOptions) -> Result<AdjacencyGraph, TilingError> {
    doc.validate()?;
    let eps = opts.tolerance.max(1e-9);
    let n = doc.tiles.len();
    let shifts = doc.shifts();
    // Contact points as seen from each tile, in that tile's chart.
    let mut seen: Vec<BTreeMap<usize, (f64, P2)>> = vec![BTreeMap::new(); n];
    let boxes: Vec<[f64; 4]> = doc.tiles.iter().map(|t| bbox(&t.polygon)).collect();
    for i in 0..n {
        for j in i + 1..n {
            for &s in &shifts {
                let b = boxes[j];
                if !boxes_meet(boxes[i], [b[0] + s[0], b[1] + s[1], b[2] + s[0], b[3] + s[1]], eps) {
                    continue;
                }
                let tj = doc.tiles[j].translated(s);
                if let Some((l, m)) = contact(&doc.tiles[i], &tj, eps, opts.point_contact) {
                    let entry = seen[i].entry(j).or_insert((0.0, m));
                    if l >= entry.0 {
                        *entry = (entry.0 + l, m);
                    } else {
                        entry.0 += l;
                    }
                    let back = [m[0] - s[0], m[1] - s[1]];
                    let entry = seen[j].entry(i).or_insert((0.0, back));
                    if l >= entry.0 {
                        *entry = (entry.0 + l, back);
                    } else {
                        entry.0 += l;
                    }
                }
            }
        }
    }
    let mut caps: Vec<(usize, CapEnd)> = Vec::new();
    if let Domain::Cylinder { height, base, .. } = doc.domain {
        for (c, tile) in doc.tiles.iter().enumerate() {
            let Some(end) = tile.cap_end else { continue };
            caps.push((c, end));
            let z = match end {
                CapEnd::Bottom => base,
                CapEnd::Top => base + height,
            };
            for (j, t) in doc.tiles.iter().enumerate() {
                if j == c {
                    continue;
                }
                if let Some((l, m)) = rim_contact(t, z, eps, opts.point_contact) {
                    let e = seen[j].entry(c).or_insert((0.0, m));
                    e.0 += l;
                    seen[c].entry(j).or_insert((0.0, m)).0 += l;
                }
            }
        }
    }
    let mut contacts = Vec::new();
    for (i, row) in seen.iter().enumerate() {
        for (&j, &(l, _)) in row {
            if i < j {
                contacts.push(Contact { a: i, b: j, shared_length: l });
            }
        }
    }
    let rotation = build_rotation(doc, &seen, &caps);
    let mesh = rotation.as_ref().and_then(|r| TriMesh::from_rotation(r.clone()).ok());
    Ok(AdjacencyGraph { contacts, rotation, mesh })
}

fn build_rotation(
    doc: &TilingDoc,
    seen: &[BTreeMap<usize, (f64, P2)>],
    caps: &[(usize, CapEnd)],
) -> Option<Vec<Vec<usize>>> {
    let n = doc.tiles.len();
    let mut rotation: Vec<Option<Vec<usize>>> = vec![None; n];
    for i in 0..n {
        if doc.tiles[i].kind == TileKind::Cap || seen[i].is_empty() {
            continue;
        }
        let c = doc.tiles[i].centroid();
        let mut order: Vec<(f64, usize)> =
            seen[i].iter().map(|(&j, &(_, m))| ((m[1] - c[1]).atan2(m[0] - c[0]), j)).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        rotation[i] = Some(order.into_iter().map(|x| x.1).collect());
    }
    for &(c, _) in caps {
        rotation[c] = Some(cap_rotation(c, seen, &rotation)?);
    }
    rotation.into_iter().collect()
}

/// Orders the neighbors of a cap along its link cycle, oriented to agree
/// with the rotation of an already ordered neighbor.
fn cap_rotation(
    c: usize,
    seen: &[BTreeMap<usize, (f64, P2)>],
    rotation: &[Option<Vec<usize>>],
) -> Option<Vec<usize>> {
    let nbrs: BTreeSet<usize> = seen[c].keys().copied().collect();
    let link = |v: usize| -> Vec<usize> { seen[v].keys().copied().filter(|w| nbrs.contains(w)).collect() };
    let start = *nbrs.iter().next()?;
    let mut cycle = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let l = link(cur);
        if l.len() != 2 {
            return None;
        }
        let nxt = if l[0] != prev { l[0] } else { l[1] };
        if nxt == start {
            break;
        }
        if cycle.len() > nbrs.len() {
            return None;
        }
        cycle.push(nxt);
        prev = cur;
        cur = nxt;
    }
    if cycle.len() != nbrs.len() {
        return None;
    }
    // At neighbor u, the tile after c is w; then around c, u follows w.
    let u = cycle[0];
    let rot_u = rotation[u].as_ref()?;
    let pos = rot_u.iter().position(|&x| x == c)?;
    let w = rot_u[(pos + 1) % rot_u.len()];
    let k = cycle.len();
    let wi = cycle.iter().position(|&x| x == w)?;
    if cycle[(wi + 1) % k] != u {
        cycle.reverse();
    }
    Some(cycle)
}

/// Tile colors as a graph coloring of the adjacency graph.
pub fn tile_coloring(doc: &TilingDoc) -> Coloring {
    let colors: Vec<u32> = doc.tiles.iter().map(|t| t.color).collect();
    Coloring::total(doc.k, &colors)
}

// ---------------------------------------------------------------------------
// Built-in constructions

/// Fill regions of the banded cylinder drawing: color name and polygon in
/// unrolled coordinates, width `CYL_WIDTH`, height `CYL_HEIGHT`.
const CYLINDER_FILLS: &str = "\
qqqqff (0,0) (0.53,0) (0.57,0.11) (0.19,0.55) (0,0.51)
zzqqqq (0.53,0) (1.32,0) (1.13,0.22) (0.57,0.11)
ffffqq (1.32,0) (2.12,0) (2.27,0.44) (1.89,0.87) (1.32,0.76) (1.13,0.22)
qqqqff (2.12,0) (2.65,0) (2.65,0.51) (2.27,0.44)
zzqqzz (2.65,0.51) (2.65,1.53) (2.08,1.42) (1.89,0.87) (2.27,0.44)
zzqqqq (2.65,1.53) (2.65,2.29) (2.46,2.51) (1.89,2.4) (1.7,1.85) (2.08,1.42)
ffffqq (2.65,2.29) (2.65,3.06) (2.46,2.51)
ffqqqq (2.65,3.06) (2.65,4.07) (2.46,4.04) (2.27,3.49)
qqqqff (2.65,4.07) (2.65,5.09) (2.27,5.02) (2.08,4.47) (2.46,4.04)
zzqqzz (2.65,5.09) (2.65,6.11) (2.08,6) (1.89,5.46) (2.27,5.02)
zzqqqq (2.65,6.11) (2.65,6.87) (2.46,7.09) (1.89,6.98) (1.7,6.44) (2.08,6)
ffffqq (2.65,6.87) (2.65,7.64) (2.46,7.09)
ffqqqq (2.65,7.64) (2.65,8.66) (2.46,8.62) (2.27,8.07)
qqqqff (2.65,8.66) (2.65,9.17) (2.12,9.17) (2.08,9.06) (2.46,8.62)
ffffqq (2.12,9.17) (1.32,9.17) (1.51,8.95) (2.08,9.06)
zzqqqq (1.32,9.17) (0.53,9.17) (0.38,8.73) (0.76,8.29) (1.32,8.4) (1.51,8.95)
qqqqff (0.53,9.17) (0,9.17) (0,8.66) (0.38,8.73)
ffqqqq (0,8.66) (0,7.64) (0.57,7.75) (0.76,8.29) (0.38,8.73)
ffffqq (0,7.64) (0,6.87) (0.19,6.66) (0.76,6.76) (0.94,7.31) (0.57,7.75)
zzqqqq (0,6.87) (0,6.11) (0.19,6.66)
zzqqzz (0,6.11) (0,5.09) (0.19,5.13) (0.38,5.67)
qqqqff (0,5.09) (0,4.07) (0.38,4.15) (0.57,4.69) (0.19,5.13)
ffqqqq (0,4.07) (0,3.06) (0.57,3.16) (0.76,3.71) (0.38,4.15)
ffffqq (0,3.06) (0,2.29) (0.19,2.07) (0.76,2.18) (0.94,2.73) (0.57,3.16)
zzqqqq (0,2.29) (0,1.53) (0.19,2.07)
zzqqzz (0,1.53) (0,0.51) (0.19,0.55) (0.38,1.09)
ffzztt (0.19,0.55) (0.57,0.11) (1.13,0.22) (1.32,0.76) (0.94,1.2) (0.38,1.09)
ffqqqq (1.32,0.76) (1.89,0.87) (2.08,1.42) (1.7,1.85) (1.13,1.75) (0.94,1.2)
qqffqq (0.94,1.2) (1.13,1.75) (0.76,2.18) (0.19,2.07) (0,1.53) (0.38,1.09)
qqqqff (1.13,1.75) (1.7,1.85) (1.89,2.4) (1.51,2.84) (0.94,2.73) (0.76,2.18)
ffzztt (1.89,2.4) (2.46,2.51) (2.65,3.06) (2.27,3.49) (1.7,3.38) (1.51,2.84)
zzqqzz (1.7,3.38) (1.32,3.82) (0.76,3.71) (0.57,3.16) (0.94,2.73) (1.51,2.84)
qqffqq (1.7,3.38) (2.27,3.49) (2.46,4.04) (2.08,4.47) (1.51,4.36) (1.32,3.82)
zzqqqq (1.32,3.82) (1.51,4.36) (1.13,4.8) (0.57,4.69) (0.38,4.15) (0.76,3.71)
ffffqq (1.51,4.36) (2.08,4.47) (2.27,5.02) (1.89,5.46) (1.32,5.35) (1.13,4.8)
ffzztt (1.13,4.8) (1.32,5.35) (0.94,5.78) (0.38,5.67) (0.19,5.13) (0.57,4.69)
ffqqqq (1.32,5.35) (1.89,5.46) (2.08,6) (1.7,6.44) (1.13,6.33) (0.94,5.78)
qqffqq (1.13,6.33) (0.76,6.76) (0.19,6.66) (0,6.11) (0.38,5.67) (0.94,5.78)
qqqqff (1.13,6.33) (1.7,6.44) (1.89,6.98) (1.51,7.42) (0.94,7.31) (0.76,6.76)
ffzztt (1.89,6.98) (2.46,7.09) (2.65,7.64) (2.27,8.07) (1.7,7.96) (1.51,7.42)
zzqqzz (1.51,7.42) (1.7,7.96) (1.32,8.4) (0.76,8.29) (0.57,7.75) (0.94,7.31)
qqffqq (1.7,7.96) (2.27,8.07) (2.46,8.62) (2.08,9.06) (1.51,8.95) (1.32,8.4)
";

pub const CYL_WIDTH: f64 = 2.65;
pub const CYL_HEIGHT: f64 = 9.17;
/// Scale applied to the drawing; the resulting circumference is `2.12`.
pub const CYL_SCALE: f64 = 0.8;

const COLOR_NAMES: [(&str, u32); 7] = [
    ("qqqqff", 1),
    ("zzqqqq", 2),
    ("ffffqq", 3),
    ("zzqqzz", 4),
    ("ffqqqq", 5),
    ("ffzztt", 6),
    ("qqffqq", 7),
];

fn parse_fills() -> Vec<(u32, Vec<P2>)> {
    CYLINDER_FILLS
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let (name, rest) = line.split_once(' ').expect("fill line");
            let color = COLOR_NAMES.iter().find(|c| c.0 == name).expect("known color").1;
            let pts = rest
                .split_whitespace()
                .map(|tok| {
                    let (x, y) = tok.trim_matches(|c| c == '(' || c == ')').split_once(',').expect("point");
                    [x.parse().expect("number"), y.parse().expect("number")]
                })
                .collect();
            (color, pts)
        })
        .collect()
}

fn near(a: P2, b: P2) -> bool {
    dist2(a, b) < 1e-9
}

/// Union of two counterclockwise polygons sharing exactly one edge
/// (traversed in opposite directions).
fn glue(a: &[P2], b: &[P2]) -> Option<Vec<P2>> {
    let (n, m) = (a.len(), b.len());
    for i in 0..n {
        let (p, q) = (a[i], a[(i + 1) % n]);
        for j in 0..m {
            if near(b[j], q) && near(b[(j + 1) % m], p) {
                // a from q around to p, then b from p around to q.
                let mut out: Vec<P2> = (0..n).map(|k| a[(i + 1 + k) % n]).collect();
                out.extend((1..m - 1).map(|k| b[(j + 1 + k) % m]));
                return Some(out);
            }
        }
    }
    None
}

fn ccw(mut p: Vec<P2>) -> Vec<P2> {
    if signed_area(&p) < 0.0 {
        p.reverse();
    }
    p
}

/// The banded 7-tiling of a capped cylinder. Drawing pieces cut by the seam
/// are glued back together; the two end disks join the slivers of matching
/// color at the rims.
pub fn cylinder7() -> TilingDoc {
    let fills: Vec<(u32, Vec<P2>)> = parse_fills().into_iter().map(|(c, p)| (c, ccw(p))).collect();
    let touches = |p: &[P2], x: f64| p.iter().filter(|q| (q[0] - x).abs() < 1e-9).count() >= 2;
    let mut used = vec![false; fills.len()];
    let mut pieces: Vec<(u32, Vec<P2>)> = Vec::new();
    for i in 0..fills.len() {
        if used[i] || !touches(&fills[i].1, CYL_WIDTH) {
            continue;
        }
        let shifted: Vec<P2> = fills[i].1.iter().map(|p| [p[0] - CYL_WIDTH, p[1]]).collect();
        for j in 0..fills.len() {
            if j == i || used[j] || fills[j].0 != fills[i].0 || !touches(&fills[j].1, 0.0) {
                continue;
            }
            if let Some(g) = glue(&shifted, &fills[j].1) {
                used[i] = true;
                used[j] = true;
                pieces.push((fills[i].0, g));
                break;
            }
        }
    }
    for (i, f) in fills.iter().enumerate() {
        if !used[i] {
            pieces.push(f.clone());
        }
    }
    let mut tiles: Vec<Tile> = pieces
        .into_iter()
        .map(|(color, p)| Tile::polygon(color, p.iter().map(|q| [q[0] * CYL_SCALE, q[1] * CYL_SCALE]).collect()))
        .collect();
    let height = CYL_HEIGHT * CYL_SCALE;
    // Slivers resting on a rim with the color of that end's disk.
    for (end, z, color) in [(CapEnd::Bottom, 0.0, 2), (CapEnd::Top, height, 3)] {
        let idx = tiles
            .iter()
            .position(|t| {
                t.color == color
                    && t.polygon.iter().filter(|p| (p[1] - z).abs() < 1e-9).count() >= 2
                    && t.polygon.iter().all(|p| (p[1] - z).abs() < 0.3)
            })
            .expect("rim sliver");
        tiles[idx].kind = TileKind::Cap;
        tiles[idx].cap_end = Some(end);
    }
    TilingDoc {
        domain: Domain::Cylinder { radius: CYL_WIDTH * CYL_SCALE / (2.0 * PI), height, base: 0.0 },
        k: 7,
        tiles,
    }
}

/// Lattice spacing of the hexagon tilings: hexagon diameter `0.98`.
pub const HEX_SPACING: f64 = 0.98 * 0.866_025_403_784_438_6;

fn hexagon(center: P2, spacing: f64) -> Vec<P2> {
    let r = spacing / 3f64.sqrt();
    (0..6)
        .map(|i| {
            let t = PI / 6.0 + PI / 3.0 * i as f64;
            [center[0] + r * t.cos(), center[1] + r * t.sin()]
        })
        .collect()
}

fn lattice_center(p: LatticePoint, spacing: f64) -> P2 {
    let (x, y) = p.to_plane();
    [x * spacing, y * spacing]
}

/// Hexagons around lattice points within hex distance `radius` of the
/// origin, colored by the standard Isbell coloring.
pub fn plane_isbell(radius: i64) -> TilingDoc {
    let params = IsbellParams::identity(Chirality::A);
    let origin = LatticePoint::new(0, 0);
    let mut tiles = Vec::new();
    for b in -radius..=radius {
        for a in -radius..=radius {
            let p = LatticePoint::new(a, b);
            if origin.hex_distance(p) <= radius {
                tiles.push(Tile::polygon(isbell_color(&params, p), hexagon(lattice_center(p, HEX_SPACING), HEX_SPACING)));
            }
        }
    }
    TilingDoc { domain: Domain::Plane, k: 7, tiles }
}

/// Lattice points of `plane_isbell(radius)` in tile order.
pub fn plane_isbell_points(radius: i64) -> Vec<LatticePoint> {
    let origin = LatticePoint::new(0, 0);
    let mut out = Vec::new();
    for b in -radius..=radius {
        for a in -radius..=radius {
            let p = LatticePoint::new(a, b);
            if origin.hex_distance(p) <= radius {
                out.push(p);
            }
        }
    }
    out
}

/// Isbell hexagons on the flat torus with lattice periods `(n1, 0)` and
/// `(0, n2)`; both must be multiples of 7 so the coloring closes up.
pub fn torus_isbell(n1: i64, n2: i64) -> Result<TilingDoc, TilingError> {
    if n1 <= 0 || n2 <= 0 || n1 % 7 != 0 || n2 % 7 != 0 {
        return Err(TilingError::InvalidParameter(format!("torus periods {n1}x{n2} must be positive multiples of 7")));
    }
    let params = IsbellParams::identity(Chirality::A);
    let mut tiles = Vec::new();
    for b in 0..n2 {
        for a in 0..n1 {
            let p = LatticePoint::new(a, b);
            tiles.push(Tile::polygon(isbell_color(&params, p), hexagon(lattice_center(p, HEX_SPACING), HEX_SPACING)));
        }
    }
    let periods = [lattice_center(LatticePoint::new(n1, 0), HEX_SPACING), lattice_center(LatticePoint::new(0, n2), HEX_SPACING)];
    Ok(TilingDoc { domain: Domain::FlatTorus { periods }, k: 7, tiles })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenusParams {
    /// Number of handles; `k + 1` crossbars are drawn.
    pub k: usize,
    pub rail_distance: f64,
    pub segment_length: f64,
    /// Shift between the color periods of the two rails.
    pub offset: f64,
    /// Gap between consecutive crossbars.
    pub bar_gap: f64,
}

impl Default for GenusParams {
    fn default() -> Self {
        GenusParams { k: 2, rail_distance: 0.9, segment_length: 0.9, offset: 1.35, bar_gap: 2.0 }
    }
}

/// Two parallel rails of red, blue and green segments with shifted periods,
/// joined by black crossbars. Colors: 1 red, 2 blue, 3 green, 4 black.
pub fn genus_construction(p: &GenusParams) -> Result<TilingDoc, TilingError> {
    if !(p.rail_distance > 0.0 && p.segment_length > 0.0 && p.bar_gap > 0.0) {
        return Err(TilingError::InvalidParameter("lengths must be positive".into()));
    }
    let period = 3.0 * p.segment_length;
    let span = p.bar_gap * p.k as f64 + 2.0 * p.segment_length;
    let length = period * (span / period).ceil().max(3.0);
    let mut tiles = Vec::new();
    let rail = |y: f64, shift: f64, tiles: &mut Vec<Tile>| {
        // Segment j covers [shift + j*len, shift + (j+1)*len], color cycles
        // red, blue, green from j = 0.
        let first = (-shift / p.segment_length).floor() as i64;
        let mut j = first;
        loop {
            let x0 = shift + j as f64 * p.segment_length;
            if x0 >= length - 1e-12 {
                break;
            }
            let (a, b) = (x0.max(0.0), (x0 + p.segment_length).min(length));
            if b - a > 1e-12 {
                tiles.push(Tile::segment(j.rem_euclid(3) as u32 + 1, [a, y], [b, y]));
            }
            j += 1;
        }
    };
    rail(0.0, 0.0, &mut tiles);
    rail(p.rail_distance, p.offset, &mut tiles);
    let start = (length - p.bar_gap * p.k as f64) / 2.0;
    for i in 0..=p.k {
        let x = start + p.bar_gap * i as f64;
        tiles.push(Tile::segment(4, [x, 0.0], [x, p.rail_distance]));
    }
    Ok(TilingDoc { domain: Domain::Plane, k: 4, tiles })
}

/// Crossbar tiles of a genus construction.
pub fn crossbars(doc: &TilingDoc) -> Vec<usize> {
    (0..doc.tiles.len()).filter(|&i| doc.tiles[i].color == 4).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub points: Vec<P2>,
}

impl PointSet {
    /// Pairs at distance 1 within `tol`.
    pub fn unit_pairs(&self, tol: f64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                if (dist2(self.points[i], self.points[j]) - 1.0).abs() <= tol {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn unit_distance_graph(&self, tol: f64) -> SimpleGraph {
        SimpleGraph::from_edges(self.points.len(), &self.unit_pairs(tol))
    }
}

/// Two unit rhombi sharing a vertex, turned so their far tips are at
/// distance 1.
pub fn moser_spindle() -> PointSet {
    let turn = 2.0 * (1.0 / (2.0 * 3f64.sqrt())).asin();
    let mut points = vec![[0.0, 0.0]];
    for phi in [0.0, turn] {
        let unit = |t: f64| [t.cos(), t.sin()];
        points.push(unit(phi + PI / 6.0));
        points.push(unit(phi - PI / 6.0));
        let tip = unit(phi);
        points.push([tip[0] * 3f64.sqrt(), tip[1] * 3f64.sqrt()]);
    }
    PointSet { points }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Construction {
    Tiling(TilingDoc),
    Points(PointSet),
}

/// Named construction: `cylinder7`, `plane_isbell`, `torus_isbell`,
/// `genus4` (optionally `genus4(k)`) or `moser_spindle`.
pub fn builtin_construction(name: &str) -> Result<Construction, TilingError> {
    let name = name.trim();
    if let Some(arg) = name.strip_prefix("genus4") {
        let k = match arg.trim() {
            "" => GenusParams::default().k,
            a => a
                .trim_start_matches('(')
                .trim_end_matches(')')
                .parse()
                .map_err(|_| TilingError::InvalidParameter(format!("bad genus argument {a:?}")))?,
        };
        return Ok(Construction::Tiling(genus_construction(&GenusParams { k, ..GenusParams::default() })?));
    }
    match name {
        "cylinder7" => Ok(Construction::Tiling(cylinder7())),
        "plane_isbell" => Ok(Construction::Tiling(plane_isbell(4))),
        "torus_isbell" => Ok(Construction::Tiling(torus_isbell(7, 7)?)),
        "moser_spindle" => Ok(Construction::Points(moser_spindle())),
        other => Err(TilingError::UnknownConstruction(other.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerReport {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    pub average_degree: f64,
    pub max_degree: usize,
    /// Set when the average degree exceeds 6, which forces a vertex of
    /// degree at least 7 and rules out nice colorings.
    pub obstruction: bool,
    pub message: String,
}

pub fn euler_obstruction(m: &TriMesh) -> EulerReport {
    let v = m.vertex_count();
    let chi = m.euler_characteristic();
    let average_degree = 6.0 - 6.0 * chi as f64 / v as f64;
    let max_degree = (0..v).map(|x| m.degree(x)).max().unwrap_or(0);
    let obstruction = chi < 0;
    let message = if obstruction {
        "max degree >= 7 forced, no nice coloring exists".to_string()
    } else if chi == 0 {
        "average degree exactly 6, no obstruction".to_string()
    } else {
        "average degree below 6, no obstruction".to_string()
    };
    EulerReport {
        vertices: v,
        edges: m.edge_count(),
        faces: m.face_count(),
        euler_characteristic: chi,
        average_degree,
        max_degree,
        obstruction,
        message,
    }
}
