//! Spherical metric, signed distance to spherical cycles, geodesic spheres
//! and the geometric premises on embedded graphs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{icosahedron_faces, icosahedron_positions, EmbeddingDoc, MeshDoc, MeshError, TriMesh};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("radius mismatch: {0} vs {1}")]
    RadiusMismatch(f64, f64),
    #[error("degenerate cycle: {0}")]
    DegenerateCycle(String),
    #[error("empty point set")]
    EmptySet,
    #[error("zero-length direction vector")]
    ZeroVector,
    #[error("embedding has {0} positions for {1} vertices")]
    PositionCount(usize, usize),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Central tolerance record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Slack for geometric assertions.
    pub geometry: f64,
    /// Angular band treated as lying on a cycle.
    pub boundary_band: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { geometry: 1e-9, boundary_band: 1e-10 }
    }
}

pub type Vec3 = [f64; 3];

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn normalize(a: Vec3) -> Option<Vec3> {
    let n = norm(a);
    (n > 0.0).then(|| scale(a, 1.0 / n))
}

/// Angle between two directions, stable near 0 and pi.
pub fn angle(a: Vec3, b: Vec3) -> f64 {
    norm(cross(a, b)).atan2(dot(a, b))
}

/// Point on a sphere of radius `radius` centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub dir: Vec3,
    pub radius: f64,
}

impl SpherePoint {
    pub fn new(v: Vec3, radius: f64) -> Result<SpherePoint, GeometryError> {
        Ok(SpherePoint { dir: normalize(v).ok_or(GeometryError::ZeroVector)?, radius })
    }

    /// Point at colatitude `theta` and longitude `phi`.
    pub fn from_angles(theta: f64, phi: f64, radius: f64) -> SpherePoint {
        SpherePoint {
            dir: [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()],
            radius,
        }
    }

    pub fn antipode(&self) -> SpherePoint {
        SpherePoint { dir: scale(self.dir, -1.0), radius: self.radius }
    }
}

fn same_radius(p: &SpherePoint, q: &SpherePoint) -> Result<(), GeometryError> {
    if (p.radius - q.radius).abs() > 1e-12 * p.radius.abs().max(1.0) {
        return Err(GeometryError::RadiusMismatch(p.radius, q.radius));
    }
    Ok(())
}

pub fn sphere_distance(p: &SpherePoint, q: &SpherePoint) -> Result<f64, GeometryError> {
    same_radius(p, q)?;
    Ok(p.radius * angle(p.dir, q.dir))
}

pub fn chord_distance(p: &SpherePoint, q: &SpherePoint) -> Result<f64, GeometryError> {
    same_radius(p, q)?;
    Ok(2.0 * p.radius * (angle(p.dir, q.dir) / 2.0).sin())
}

/// Closed spherical polygon joined by minor arcs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalCycle {
    pub points: Vec<Vec3>,
    pub radius: f64,
}

impl SphericalCycle {
    pub fn new(points: &[SpherePoint]) -> Result<SphericalCycle, GeometryError> {
        if points.len() < 3 {
            return Err(GeometryError::DegenerateCycle("fewer than 3 points".into()));
        }
        for p in points {
            same_radius(&points[0], p)?;
        }
        let dirs: Vec<Vec3> = points.iter().map(|p| p.dir).collect();
        let n = dirs.len();
        for i in 0..n {
            let (a, b) = (dirs[i], dirs[(i + 1) % n]);
            let t = angle(a, b);
            if t < 1e-15 {
                return Err(GeometryError::DegenerateCycle(format!("repeated point at {i}")));
            }
            if t > std::f64::consts::PI - 1e-12 {
                return Err(GeometryError::DegenerateCycle(format!("arc {i} is not a minor arc")));
            }
        }
        for i in 0..n {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                if arcs_cross(dirs[i], dirs[(i + 1) % n], dirs[j], dirs[(j + 1) % n]) {
                    return Err(GeometryError::DegenerateCycle(format!("arcs {i} and {j} cross")));
                }
            }
        }
        Ok(SphericalCycle { points: dirs, radius: points[0].radius })
    }

    pub fn reversed(&self) -> SphericalCycle {
        let mut points = self.points.clone();
        points.reverse();
        SphericalCycle { points, radius: self.radius }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total length of the closed broken line.
    pub fn length(&self) -> f64 {
        let n = self.points.len();
        (0..n).map(|i| self.radius * angle(self.points[i], self.points[(i + 1) % n])).sum()
    }

    /// Point at arc parameter `t` in [0,1] along edge `i`.
    pub fn point_on_edge(&self, i: usize, t: f64) -> SpherePoint {
        let a = self.points[i];
        let b = self.points[(i + 1) % self.points.len()];
        SpherePoint { dir: slerp(a, b, t), radius: self.radius }
    }
}

pub fn slerp(a: Vec3, b: Vec3, t: f64) -> Vec3 {
    let th = angle(a, b);
    if th < 1e-15 {
        return a;
    }
    let s = th.sin();
    let wa = ((1.0 - t) * th).sin() / s;
    let wb = (t * th).sin() / s;
    normalize([a[0] * wa + b[0] * wb, a[1] * wa + b[1] * wb, a[2] * wa + b[2] * wb]).unwrap_or(a)
}

fn arcs_cross(a: Vec3, b: Vec3, c: Vec3, d: Vec3) -> bool {
    let n1 = cross(a, b);
    let n2 = cross(c, d);
    let Some(x) = normalize(cross(n1, n2)) else {
        return false;
    };
    [x, scale(x, -1.0)].iter().any(|&p| on_arc(p, a, b) && on_arc(p, c, d))
}

fn on_arc(p: Vec3, a: Vec3, b: Vec3) -> bool {
    (angle(a, p) + angle(p, b) - angle(a, b)).abs() < 1e-12
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Feature {
    Edge(usize),
    Vertex(usize),
}

/// Angular distance from `p` to arc `a`..`b` and the closest feature.
fn arc_distance(p: Vec3, a: Vec3, b: Vec3) -> (f64, bool) {
    let n = match normalize(cross(a, b)) {
        Some(n) => n,
        None => return (angle(p, a), false),
    };
    let h = dot(p, n);
    let proj = sub(p, scale(n, h));
    if norm(proj) > 1e-15 && dot(cross(a, proj), n) >= 0.0 && dot(cross(proj, b), n) >= 0.0 {
        return (h.abs().atan2(norm(proj)), true);
    }
    (angle(p, a).min(angle(p, b)), false)
}

/// Signed spherical distance: positive on the left side (the interior),
/// negative on the right, zero within the boundary band.
pub fn signed_cycle_distance(p: &SpherePoint, c: &SphericalCycle) -> Result<f64, GeometryError> {
    signed_cycle_distance_with(p, c, &Tolerances::default())
}

pub fn signed_cycle_distance_with(
    p: &SpherePoint,
    c: &SphericalCycle,
    tol: &Tolerances,
) -> Result<f64, GeometryError> {
    if (p.radius - c.radius).abs() > 1e-12 * c.radius.abs().max(1.0) {
        return Err(GeometryError::RadiusMismatch(p.radius, c.radius));
    }
    let pts = &c.points;
    let n = pts.len();
    let mut best = f64::INFINITY;
    let mut feature = Feature::Vertex(0);
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        let (d, interior) = arc_distance(p.dir, a, b);
        if d < best {
            best = d;
            feature = if interior {
                Feature::Edge(i)
            } else if angle(p.dir, a) <= angle(p.dir, b) {
                Feature::Vertex(i)
            } else {
                Feature::Vertex((i + 1) % n)
            };
        }
    }
    if best <= tol.boundary_band {
        return Ok(0.0);
    }
    let inside = match feature {
        Feature::Edge(i) => dot(p.dir, cross(pts[i], pts[(i + 1) % n])) > 0.0,
        Feature::Vertex(k) => {
            let prev = pts[(k + n - 1) % n];
            let v = pts[k];
            let next = pts[(k + 1) % n];
            let n_in = cross(prev, v);
            let n_out = cross(v, next);
            let left_in = dot(p.dir, n_in) > 0.0;
            let left_out = dot(p.dir, n_out) > 0.0;
            if dot(cross(n_in, n_out), v) >= 0.0 {
                left_in && left_out
            } else {
                left_in || left_out
            }
        }
    };
    let d = c.radius * best;
    Ok(if inside { d } else { -d })
}

/// Signed distance from a point set: positive when every point is inside,
/// negative when every point is outside, zero otherwise.
pub fn signed_set_distance(set: &[SpherePoint], c: &SphericalCycle) -> Result<f64, GeometryError> {
    if set.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let mut min_in = f64::INFINITY;
    let mut min_out = f64::INFINITY;
    for p in set {
        let d = signed_cycle_distance(p, c)?;
        if d == 0.0 {
            return Ok(0.0);
        } else if d > 0.0 {
            min_in = min_in.min(d);
        } else {
            min_out = min_out.min(-d);
        }
    }
    Ok(match (min_in.is_finite(), min_out.is_finite()) {
        (true, false) => min_in,
        (false, true) => -min_out,
        _ => 0.0,
    })
}

/// Signed distance from the antipodes of `vertices` to `c`.
pub fn antipodal_gap(c: &SphericalCycle, vertices: &[SpherePoint]) -> Result<f64, GeometryError> {
    let ant: Vec<SpherePoint> = vertices.iter().map(SpherePoint::antipode).collect();
    signed_set_distance(&ant, c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrokenLine {
    pub length: f64,
    pub hops: usize,
    pub max_hop: f64,
    /// `Some(L < d1 * hops)` when every hop is shorter than `d1`.
    pub bound_holds: Option<bool>,
}

pub fn broken_line_length(path: &[SpherePoint], d1: f64) -> Result<BrokenLine, GeometryError> {
    let mut length = 0.0;
    let mut max_hop: f64 = 0.0;
    for w in path.windows(2) {
        let d = sphere_distance(&w[0], &w[1])?;
        length += d;
        max_hop = max_hop.max(d);
    }
    let hops = path.len().saturating_sub(1);
    let bound_holds = (max_hop < d1).then_some(length < d1 * hops as f64);
    Ok(BrokenLine { length, hops, max_hop, bound_holds })
}

/// Mesh with vertices on a sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedMesh {
    pub mesh: TriMesh,
    pub radius: f64,
    /// Unit directions.
    pub positions: Vec<Vec3>,
}

impl EmbeddedMesh {
    pub fn new(mesh: TriMesh, radius: f64, positions: Vec<Vec3>) -> Result<EmbeddedMesh, GeometryError> {
        if positions.len() != mesh.vertex_count() {
            return Err(GeometryError::PositionCount(positions.len(), mesh.vertex_count()));
        }
        let positions = positions
            .into_iter()
            .map(|p| normalize(p).ok_or(GeometryError::ZeroVector))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EmbeddedMesh { mesh, radius, positions })
    }

    pub fn point(&self, v: usize) -> SpherePoint {
        SpherePoint { dir: self.positions[v], radius: self.radius }
    }

    pub fn from_doc(doc: &MeshDoc) -> Result<EmbeddedMesh, GeometryError> {
        let mesh = doc.to_mesh()?;
        let emb = doc
            .embedding
            .as_ref()
            .ok_or_else(|| GeometryError::DegenerateCycle("mesh document has no embedding".into()))?;
        EmbeddedMesh::new(mesh, emb.radius, emb.positions.clone())
    }

    pub fn to_doc(&self) -> MeshDoc {
        let mut doc = self.mesh.to_doc();
        doc.embedding = Some(EmbeddingDoc {
            radius: self.radius,
            positions: self.positions.iter().map(|p| scale(*p, self.radius)).collect(),
        });
        doc
    }

    pub fn edge_arc(&self, u: usize, v: usize) -> f64 {
        self.radius * angle(self.positions[u], self.positions[v])
    }
}

/// Icosahedral subdivision of frequency `f` projected onto the sphere.
/// The twelve degree-5 vertices get ids 0..12.
pub fn geodesic_sphere(f: usize, radius: f64) -> Result<EmbeddedMesh, GeometryError> {
    if f == 0 {
        return Err(MeshError::InvalidParameter("frequency must be at least 1".into()).into());
    }
    let corners = icosahedron_positions();
    let mut ids: BTreeMap<Vec<(usize, usize)>, usize> = BTreeMap::new();
    let mut positions: Vec<Vec3> = Vec::new();
    for (i, p) in corners.iter().enumerate() {
        ids.insert(vec![(i, f)], i);
        positions.push(*p);
    }
    let mut faces = Vec::new();
    for tri in icosahedron_faces() {
        let mut id = |i: usize, j: usize| -> usize {
            let mut key: Vec<(usize, usize)> = [(tri[0], f - i - j), (tri[1], i), (tri[2], j)]
                .into_iter()
                .filter(|&(_, w)| w > 0)
                .collect();
            key.sort_unstable();
            if let Some(&v) = ids.get(&key) {
                return v;
            }
            let mut p = [0.0; 3];
            for &(c, w) in &key {
                for (k, x) in p.iter_mut().enumerate() {
                    *x += corners[c][k] * w as f64;
                }
            }
            let v = positions.len();
            positions.push(normalize(p).unwrap());
            ids.insert(key, v);
            v
        };
        for i in 0..f {
            for j in 0..f - i {
                faces.push([id(i, j), id(i + 1, j), id(i, j + 1)]);
                if i + j + 2 <= f {
                    faces.push([id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
                }
            }
        }
    }
    let mesh = TriMesh::from_faces(&faces)?;
    EmbeddedMesh::new(mesh, radius, positions)
}

/// Radius from which the main lower bound applies: `(23 d1 + 0.5 d2) / pi`.
pub fn threshold_radius(d1: f64, d2: f64) -> f64 {
    (23.0 * d1 + 0.5 * d2) / std::f64::consts::PI
}

/// The alternative radius constant quoted alongside the main bound.
pub const REMARK_RADIUS: f64 = 17.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PremiseReport {
    pub radius: f64,
    pub d1: f64,
    pub d2: f64,
    pub max_edge_arc: f64,
    pub edge_arc_margin: f64,
    pub edges_below_d1: bool,
    pub max_circumradius: f64,
    pub cover_margin: f64,
    pub unit_disk_cover: bool,
    pub d2_margin: f64,
    pub edges_within_d2: bool,
    pub threshold_radius: f64,
    pub remark_radius: f64,
    pub radius_gate: bool,
    pub pass: bool,
}

/// Spherical circumradius (arc length) of a triangle of unit directions.
pub fn circumradius(a: Vec3, b: Vec3, c: Vec3, radius: f64) -> f64 {
    match normalize(cross(sub(b, a), sub(c, a))) {
        Some(n) => radius * angle(n, a),
        None => f64::INFINITY,
    }
}

pub fn verify_graph_premises(em: &EmbeddedMesh, d1: f64, d2: f64) -> PremiseReport {
    let max_edge_arc = em
        .mesh
        .edges()
        .iter()
        .map(|&(u, v)| em.edge_arc(u, v))
        .fold(0.0, f64::max);
    let max_circumradius = em
        .mesh
        .faces()
        .iter()
        .map(|f| circumradius(em.positions[f[0]], em.positions[f[1]], em.positions[f[2]], em.radius))
        .fold(0.0, f64::max);
    let threshold = threshold_radius(d1, d2);
    let edges_below_d1 = max_edge_arc < d1;
    let unit_disk_cover = max_circumradius < 1.0;
    let edges_within_d2 = max_edge_arc < 2.0 * d2;
    let radius_gate = em.radius >= threshold;
    PremiseReport {
        radius: em.radius,
        d1,
        d2,
        max_edge_arc,
        edge_arc_margin: d1 - max_edge_arc,
        edges_below_d1,
        max_circumradius,
        cover_margin: 1.0 - max_circumradius,
        unit_disk_cover,
        d2_margin: 2.0 * d2 - max_edge_arc,
        edges_within_d2,
        threshold_radius: threshold,
        remark_radius: REMARK_RADIUS,
        radius_gate,
        pass: edges_below_d1 && unit_disk_cover && edges_within_d2,
    }
}
