//! Discrete curvature of cycles and cycle contraction.
//!
//! The local curvature of a cycle vertex is `2 - (edges strictly inside)`,
//! and the curvature of a cycle is the sum over its vertices.

mod cases;
mod cut;

pub use cases::*;
pub use cut::*;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::isbell::IsbellError;
use crate::mesh::{interior_region, DirectedCycle, MeshError, TriMesh};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurvatureError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("no contraction step applies to cycle {0:?}")]
    NoStep(Vec<usize>),
    #[error("cycle already bounds a single triangle")]
    AlreadyTriangle,
    #[error("irregular multiplicity sums to {0}, expected 12")]
    MultiplicitySum(i64),
    #[error("proximity graph is disconnected")]
    Disconnected,
    #[error("bound violated: {0}")]
    BoundViolated(String),
    #[error("trees cross or overlap: {0}")]
    Crossing(String),
    #[error("tree cannot be split: {0}")]
    Unsplittable(String),
    #[error("sweep stuck at cycle {cycle:?}: {reason}")]
    SweepStuck { cycle: Vec<usize>, reason: String },
    #[error("invalid cut-mesh cycle: {0}")]
    BadCutCycle(String),
    #[error("mesh is not in case 2")]
    NotCase2,
    #[error("component {0} cannot host a separating cycle: {1}")]
    BadComponent(usize, String),
    #[error("no chart along the cycle is an Isbell coloring")]
    NoIsbellChart,
    #[error("chart at cycle vertex {0} is malformed: {1}")]
    BadChart(usize, String),
    #[error(transparent)]
    Isbell(#[from] IsbellError),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCurvature {
    pub total: i64,
    pub local: Vec<i64>,
}

/// Interior edge count at each cycle vertex: neighbors strictly between
/// `v_{k+1}` and `v_{k-1}` going counterclockwise.
fn interior_edge_counts(m: &TriMesh, c: &DirectedCycle) -> Vec<i64> {
    let n = c.len() as isize;
    (0..n)
        .map(|k| {
            let v = c.at(k);
            let next = c.at(k + 1);
            let prev = c.at(k - 1);
            let mut w = m.ccw_next(v, next);
            let mut count = 0;
            while w != prev {
                count += 1;
                w = m.ccw_next(v, w);
            }
            count
        })
        .collect()
}

pub fn cycle_curvature(m: &TriMesh, c: &DirectedCycle) -> Result<CycleCurvature, CurvatureError> {
    interior_region(m, c)?;
    let local: Vec<i64> = interior_edge_counts(m, c).iter().map(|e| 2 - e).collect();
    Ok(CycleCurvature { total: local.iter().sum(), local })
}

/// Multiplicity-weighted count of irregular vertices strictly inside `c`.
pub fn irregular_inside(m: &TriMesh, c: &DirectedCycle) -> Result<i64, CurvatureError> {
    let r = interior_region(m, c)?;
    Ok(r.interior_vertices.iter().filter(|&&v| m.degree(v) < 6).map(|&v| m.defect(v)).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    Type1,
    Type2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionStep {
    pub cycle: Vec<usize>,
    pub kind: StepKind,
    pub pivots: Vec<usize>,
    pub curvature: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionTrace {
    pub initial_cycle: Vec<usize>,
    pub initial_curvature: i64,
    pub initial_triangles: usize,
    pub steps: Vec<ContractionStep>,
}

/// One contraction step. Type1 cuts off an ear `(v_{k-1}, v_k, v_{k+1})`;
/// Type2 pushes edge `v_k v_{k+1}` over its interior apex.
pub fn contract_step(
    m: &TriMesh,
    c: &DirectedCycle,
) -> Result<(DirectedCycle, StepKind, Vec<usize>), CurvatureError> {
    let n = c.len() as isize;
    if n == 3 && m.apex(c.at(0), c.at(1)) == c.at(2) {
        return Err(CurvatureError::AlreadyTriangle);
    }
    let on_cycle: BTreeSet<usize> = c.vertices.iter().copied().collect();
    let mut ear: Option<(usize, isize)> = None;
    if n > 3 {
        for k in 0..n {
            let v = c.at(k);
            if m.apex(v, c.at(k + 1)) == c.at(k - 1) && ear.is_none_or(|(p, _)| v < p) {
                ear = Some((v, k));
            }
        }
    }
    if let Some((_, k)) = ear {
        let verts: Vec<usize> = (1..n).map(|j| c.at(k + j)).collect();
        return Ok((DirectedCycle { vertices: verts }, StepKind::Type1, vec![c.at(k)]));
    }
    let mut push: Option<(usize, isize)> = None;
    for k in 0..n {
        let w = m.apex(c.at(k), c.at(k + 1));
        if !on_cycle.contains(&w) && push.is_none_or(|(p, _)| w < p) {
            push = Some((w, k));
        }
    }
    if let Some((w, k)) = push {
        let mut verts = Vec::with_capacity(c.len() + 1);
        for j in 0..n {
            verts.push(c.at(k + 1 + j));
            if j == n - 1 {
                verts.push(w);
            }
        }
        return Ok((DirectedCycle { vertices: verts }, StepKind::Type2, vec![w]));
    }
    Err(CurvatureError::NoStep(c.vertices.clone()))
}

pub fn contract_to_triangle(m: &TriMesh, c: &DirectedCycle) -> Result<ContractionTrace, CurvatureError> {
    let region = interior_region(m, c)?;
    let initial_curvature = cycle_curvature(m, c)?.total;
    let mut trace = ContractionTrace {
        initial_cycle: c.vertices.clone(),
        initial_curvature,
        initial_triangles: region.triangles.len(),
        steps: Vec::new(),
    };
    let mut cur = c.clone();
    for _ in 1..region.triangles.len() {
        let (next, kind, pivots) = contract_step(m, &cur)?;
        let curvature = interior_edge_counts(m, &next).iter().map(|e| 2 - e).sum();
        trace.steps.push(ContractionStep { cycle: next.vertices.clone(), kind, pivots, curvature });
        cur = next;
    }
    if !(cur.len() == 3 && m.apex(cur.at(0), cur.at(1)) == cur.at(2)) {
        return Err(CurvatureError::Internal("contraction did not end at a face".into()));
    }
    Ok(trace)
}

/// Boundary of a face set, oriented with the set on its left, if it is a
/// single simple cycle.
pub fn region_boundary(m: &TriMesh, region: &BTreeSet<usize>) -> Option<DirectedCycle> {
    let faces = m.faces();
    let mut succ = std::collections::BTreeMap::new();
    for &f in region {
        let t = faces[f];
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let outside = m.face_left(b, a).is_none_or(|g| !region.contains(&g));
            if outside && succ.insert(a, b).is_some() {
                return None;
            }
        }
    }
    let (&start, _) = succ.iter().next()?;
    let mut verts = vec![start];
    let mut cur = succ[&start];
    while cur != start {
        if verts.len() > succ.len() {
            return None;
        }
        verts.push(cur);
        cur = *succ.get(&cur)?;
    }
    if verts.len() != succ.len() {
        return None;
    }
    DirectedCycle::new(m, verts).ok()
}

/// Random simple separating cycle: the boundary of a face set grown from a
/// random face until it holds `target` faces, keeping a disk at every step.
pub fn random_separating_cycle<R: rand::Rng>(m: &TriMesh, rng: &mut R, target: usize) -> DirectedCycle {
    let faces = m.faces();
    let target = target.clamp(1, faces.len() - 1);
    let seed = rng.gen_range(0..faces.len());
    let mut region = BTreeSet::from([seed]);
    // Faces of the region at each vertex.
    let mut touching = vec![0usize; m.vertex_count()];
    for v in faces[seed] {
        touching[v] += 1;
    }
    let mut frontier: Vec<usize> = Vec::new();
    let push_adjacent = |f: usize, frontier: &mut Vec<usize>, region: &BTreeSet<usize>| {
        let t = faces[f];
        for k in 0..3 {
            if let Some(g) = m.face_left(t[(k + 1) % 3], t[k]) {
                if !region.contains(&g) {
                    frontier.push(g);
                }
            }
        }
    };
    push_adjacent(seed, &mut frontier, &region);
    while region.len() < target && !frontier.is_empty() {
        let g = frontier.swap_remove(rng.gen_range(0..frontier.len()));
        if region.contains(&g) {
            continue;
        }
        // A disk stays a disk when the new face meets it in one edge and a
        // fresh apex, or in two edges.
        let t = faces[g];
        let shared: Vec<bool> = (0..3)
            .map(|k| m.face_left(t[(k + 1) % 3], t[k]).is_some_and(|h| region.contains(&h)))
            .collect();
        let disk = match shared.iter().filter(|&&s| s).count() {
            1 => {
                let k = shared.iter().position(|&s| s).unwrap();
                touching[t[(k + 2) % 3]] == 0
            }
            2 => true,
            _ => false,
        };
        if disk {
            region.insert(g);
            for v in t {
                touching[v] += 1;
            }
            push_adjacent(g, &mut frontier, &region);
        }
    }
    region_boundary(m, &region).expect("grown region is a disk")
}
