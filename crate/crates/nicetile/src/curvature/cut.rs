//! Surgery along a pair of trees: the sphere is cut open along both trees,
//! leaving an annulus bounded by two hole cycles, and a cycle is swept from
//! one hole to the other.
//!
//! Darts carry the face (or hole) on their left. Hole 0 is the side of `t1`,
//! hole 1 the side of `t2`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{CurvatureError, Tree, TreePair};
use crate::mesh::TriMesh;

/// Longest cycle allowed anywhere in a sweep.
pub const SWEEP_LENGTH_BOUND: usize = 44;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutMesh {
    /// Original vertex of each copy.
    pub base: Vec<usize>,
    /// Copy where the two trees meet, if they share a vertex.
    pub junction: Option<usize>,
    pub origin: Vec<usize>,
    pub target: Vec<usize>,
    pub twin: Vec<usize>,
    pub next: Vec<usize>,
    pub prev: Vec<usize>,
    /// Original face index on the left of each dart, `None` for hole darts.
    pub face: Vec<Option<usize>>,
    pub hole: Vec<Option<usize>>,
    pub surviving_faces: usize,
    /// Boundary dart cycles of hole 0 and hole 1, hole on the left.
    pub boundaries: [Vec<usize>; 2],
    /// Irregular multiplicity inside each hole.
    pub hole_multiplicity: [i64; 2],
}

impl CutMesh {
    pub fn copy_count(&self) -> usize {
        self.base.len()
    }

    pub fn dart_count(&self) -> usize {
        self.origin.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.copy_count() as i64 - (self.dart_count() / 2) as i64 + self.surviving_faces as i64
    }

    /// Next outgoing dart counterclockwise around the origin of `d`.
    pub fn ccw_next_out(&self, d: usize) -> usize {
        self.twin[self.prev[d]]
    }

    pub fn copy_neighbors(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.copy_count()];
        for d in 0..self.dart_count() {
            adj[self.origin[d]].insert(self.target[d]);
        }
        adj
    }

    pub fn cycle_copies(&self, darts: &[usize]) -> Vec<usize> {
        darts.iter().map(|&d| self.origin[d]).collect()
    }

    pub fn cycle_base(&self, darts: &[usize]) -> Vec<usize> {
        darts.iter().map(|&d| self.base[self.origin[d]]).collect()
    }
}

struct Group {
    wedges: Vec<usize>,
    start: usize,
    end: usize,
}

/// Cuts `m` open along the trees of `tp`. A tree without edges removes its
/// vertex together with the incident triangles, so its hole is bounded by
/// the link cycle.
pub fn cut_along_trees(m: &TriMesh, tp: &TreePair) -> Result<CutMesh, CurvatureError> {
    let trees = [&tp.t1, &tp.t2];
    for t in trees {
        if !t.is_tree() {
            return Err(CurvatureError::Crossing("input is not a tree".into()));
        }
        if let Some(&v) = t.vertices.iter().find(|&&v| v >= m.vertex_count()) {
            return Err(CurvatureError::Crossing(format!("vertex {v} out of range")));
        }
        for &(a, b) in &t.edges {
            if !m.is_edge(a, b) {
                return Err(CurvatureError::Crossing(format!("({a},{b}) is not a mesh edge")));
            }
        }
    }
    let shared: Vec<usize> = tp.t1.vertices.intersection(&tp.t2.vertices).copied().collect();
    let junction_vertex = match shared.as_slice() {
        [] => None,
        [v] if tp.t1.edge_count() > 0 && tp.t2.edge_count() > 0 => Some(*v),
        _ => return Err(CurvatureError::Crossing(format!("trees share vertices {shared:?}"))),
    };
    let mut removed: HashMap<usize, usize> = HashMap::new();
    for (h, t) in trees.iter().enumerate() {
        if t.edge_count() == 0 {
            removed.insert(*t.vertices.iter().next().unwrap(), h);
        }
    }
    let mut cut: HashMap<(usize, usize), usize> = HashMap::new();
    for (h, t) in trees.iter().enumerate() {
        for &e in &t.edges {
            cut.insert(e, h);
        }
    }
    if let Some(v) = junction_vertex {
        check_non_crossing(m, v, &tp.t1, &tp.t2)?;
    }
    let cut_id = |a: usize, b: usize| cut.get(&(a.min(b), a.max(b))).copied();
    let faces = m.faces();
    let alive: Vec<bool> = faces.iter().map(|f| f.iter().all(|v| !removed.contains_key(v))).collect();

    // Vertex copies.
    let mut base = Vec::new();
    let mut copy_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut copies_at: Vec<Vec<usize>> = vec![Vec::new(); m.vertex_count()];
    let mut junction = None;
    for x in 0..m.vertex_count() {
        if removed.contains_key(&x) {
            continue;
        }
        let rot = m.neighbors(x);
        let d = rot.len();
        let wedge: Vec<usize> = rot.iter().map(|&n| m.face_left(x, n).unwrap()).collect();
        let joined = |k: usize| {
            let prev = (k + d - 1) % d;
            alive[wedge[prev]] && alive[wedge[k]] && cut_id(x, rot[k]).is_none()
        };
        let groups: Vec<Group> = match (0..d).find(|&k| !joined(k)) {
            None => vec![Group { wedges: (0..d).collect(), start: x, end: x }],
            Some(k0) => {
                let mut groups = Vec::new();
                let mut cur: Vec<usize> = Vec::new();
                for j in 0..d {
                    let k = (k0 + j) % d;
                    if !joined(k) && !cur.is_empty() {
                        let start = rot[cur[0]];
                        groups.push(Group { wedges: std::mem::take(&mut cur), start, end: rot[k] });
                    }
                    if alive[wedge[k]] {
                        cur.push(k);
                    }
                }
                if !cur.is_empty() {
                    let start = rot[cur[0]];
                    groups.push(Group { wedges: cur, start, end: rot[k0] });
                }
                groups
            }
        };
        if groups.is_empty() {
            copies_at[x].push(base.len());
            base.push(x);
            continue;
        }
        let mixed: Vec<usize> = if Some(x) == junction_vertex {
            (0..groups.len())
                .filter(|&g| {
                    let (s, e) = (cut_id(x, groups[g].start), cut_id(x, groups[g].end));
                    s.is_some() && e.is_some() && s != e
                })
                .collect()
        } else {
            Vec::new()
        };
        if Some(x) == junction_vertex && mixed.len() != 2 {
            return Err(CurvatureError::Crossing(format!(
                "shared vertex {x} has {} mixed wedges, expected 2",
                mixed.len()
            )));
        }
        let mut merged = None;
        for (g, group) in groups.iter().enumerate() {
            let id = match (mixed.contains(&g), merged) {
                (true, Some(j)) => j,
                _ => {
                    let id = base.len();
                    base.push(x);
                    copies_at[x].push(id);
                    if mixed.contains(&g) {
                        merged = Some(id);
                        junction = Some(id);
                    }
                    id
                }
            };
            for &k in &group.wedges {
                copy_of.insert((x, wedge[k]), id);
            }
        }
    }

    let lone_copy = |x: usize| -> Result<usize, CurvatureError> {
        match copies_at[x].as_slice() {
            [c] => Ok(*c),
            _ => Err(CurvatureError::Crossing(format!("edge at vertex {x} borders both holes ambiguously"))),
        }
    };

    // Darts of surviving edges.
    let mut origin = Vec::new();
    let mut target = Vec::new();
    let mut face = Vec::new();
    let mut hole = Vec::new();
    let mut base_dart: Vec<(usize, usize)> = Vec::new();
    let mut dart_id: HashMap<(usize, usize), usize> = HashMap::new();
    for a in 0..m.vertex_count() {
        if removed.contains_key(&a) {
            continue;
        }
        for &b in m.neighbors(a) {
            if removed.contains_key(&b) {
                continue;
            }
            let fl = m.face_left(a, b).unwrap();
            let fr = m.face_left(b, a).unwrap();
            let (o, t, f, h) = if alive[fl] {
                (copy_of[&(a, fl)], copy_of[&(b, fl)], Some(fl), None)
            } else {
                if cut_id(a, b).is_some() {
                    return Err(CurvatureError::Crossing(format!("tree edge ({a},{b}) borders a removed vertex")));
                }
                let h = removed[&m.apex(a, b)];
                if alive[fr] {
                    (copy_of[&(a, fr)], copy_of[&(b, fr)], None, Some(h))
                } else {
                    (lone_copy(a)?, lone_copy(b)?, None, Some(h))
                }
            };
            dart_id.insert((a, b), origin.len());
            origin.push(o);
            target.push(t);
            face.push(f);
            hole.push(h);
            base_dart.push((a, b));
        }
    }
    let n_plain = origin.len();
    let mut twin = vec![usize::MAX; n_plain];
    for d in 0..n_plain {
        let (a, b) = base_dart[d];
        match cut_id(a, b) {
            None => twin[d] = dart_id[&(b, a)],
            Some(h) => {
                let id = origin.len();
                origin.push(target[d]);
                target.push(origin[d]);
                face.push(None);
                hole.push(Some(h));
                base_dart.push((b, a));
                twin[d] = id;
                twin.push(d);
            }
        }
    }
    let n = origin.len();
    let mut next = vec![usize::MAX; n];
    let mut by_origin: HashMap<(usize, usize), usize> = HashMap::new();
    for d in 0..n {
        if let Some(h) = hole[d] {
            if by_origin.insert((h, origin[d]), d).is_some() {
                return Err(CurvatureError::Internal(format!("hole {h} passes copy {} twice", origin[d])));
            }
        }
    }
    for d in 0..n {
        next[d] = match (face[d], hole[d]) {
            (Some(f), _) => {
                let (a, b) = base_dart[d];
                let tri = faces[f];
                let i = tri.iter().position(|&v| v == a).unwrap();
                debug_assert_eq!(tri[(i + 1) % 3], b);
                dart_id[&(b, tri[(i + 2) % 3])]
            }
            (None, Some(h)) => *by_origin
                .get(&(h, target[d]))
                .ok_or_else(|| CurvatureError::Internal(format!("hole {h} is open at copy {}", target[d])))?,
            (None, None) => unreachable!(),
        };
    }
    let mut prev = vec![usize::MAX; n];
    for d in 0..n {
        prev[next[d]] = d;
    }
    let mut boundaries: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (h, boundary) in boundaries.iter_mut().enumerate() {
        let members: Vec<usize> = (0..n).filter(|&d| hole[d] == Some(h)).collect();
        let Some(&start) = members.iter().min_by_key(|&&d| (base[origin[d]], base[target[d]], d)) else {
            return Err(CurvatureError::Internal(format!("hole {h} is empty")));
        };
        let mut d = start;
        loop {
            boundary.push(d);
            d = next[d];
            if d == start || boundary.len() > members.len() {
                break;
            }
        }
        if boundary.len() != members.len() {
            return Err(CurvatureError::Internal(format!("hole {h} boundary is not a single cycle")));
        }
    }
    let defect: BTreeMap<usize, i64> = m.irregular_vertices().into_iter().collect();
    let hole_multiplicity = [
        trees[0].vertices.iter().filter_map(|v| defect.get(v)).sum(),
        trees[1].vertices.iter().filter_map(|v| defect.get(v)).sum(),
    ];
    let cm = CutMesh {
        base,
        junction,
        origin,
        target,
        twin,
        next,
        prev,
        face,
        hole,
        surviving_faces: alive.iter().filter(|&&a| a).count(),
        boundaries,
        hole_multiplicity,
    };
    if cm.euler_characteristic() != 0 {
        return Err(CurvatureError::Internal(format!("cut surface has χ = {}", cm.euler_characteristic())));
    }
    Ok(cm)
}

/// The two trees may touch at `v` only if the branches of each form one
/// contiguous run in the rotation.
fn check_non_crossing(m: &TriMesh, v: usize, t1: &Tree, t2: &Tree) -> Result<(), CurvatureError> {
    let labels: Vec<u8> = m
        .neighbors(v)
        .iter()
        .filter_map(|&w| {
            if t1.contains_edge(v, w) {
                Some(1)
            } else if t2.contains_edge(v, w) {
                Some(2)
            } else {
                None
            }
        })
        .collect();
    let changes = (0..labels.len()).filter(|&i| labels[i] != labels[(i + 1) % labels.len()]).count();
    if changes != 2 {
        return Err(CurvatureError::Crossing(format!("trees interleave around vertex {v}")));
    }
    Ok(())
}

/// Triangles in the sector right of the cycle at the vertex between `d_in`
/// and `d_out`, and whether a hole sits in that sector.
fn exterior_sector(cm: &CutMesh, d_in: usize, d_out: usize) -> Result<(usize, bool), CurvatureError> {
    let mut e = cm.twin[d_in];
    let mut triangles = 0;
    let mut hole = false;
    let mut guard = 0;
    while e != d_out {
        if cm.face[e].is_some() {
            triangles += 1;
        } else {
            hole = true;
        }
        e = cm.ccw_next_out(e);
        guard += 1;
        if guard > cm.dart_count() {
            return Err(CurvatureError::BadCutCycle("darts do not share a vertex".into()));
        }
    }
    Ok((triangles, hole))
}

fn check_walk(cm: &CutMesh, darts: &[usize]) -> Result<(), CurvatureError> {
    if darts.len() < 2 {
        return Err(CurvatureError::BadCutCycle("fewer than two darts".into()));
    }
    let k = darts.len();
    for i in 0..k {
        if darts[i] >= cm.dart_count() {
            return Err(CurvatureError::BadCutCycle(format!("dart {} out of range", darts[i])));
        }
        if cm.target[darts[i]] != cm.origin[darts[(i + 1) % k]] {
            return Err(CurvatureError::BadCutCycle(format!("darts {i} and {} do not chain", (i + 1) % k)));
        }
    }
    let copies: BTreeSet<usize> = darts.iter().map(|&d| cm.origin[d]).collect();
    if copies.len() != k {
        return Err(CurvatureError::BadCutCycle("cycle revisits a vertex".into()));
    }
    Ok(())
}

/// Number of triangles on the left of the cycle, after checking that the
/// left side holds hole 0 and not hole 1.
pub fn cut_cycle_interior(cm: &CutMesh, darts: &[usize]) -> Result<usize, CurvatureError> {
    interior_towards(cm, darts, 0)
}

/// Same as [`cut_cycle_interior`] with hole `inner` required on the left.
fn interior_towards(cm: &CutMesh, darts: &[usize], inner: usize) -> Result<usize, CurvatureError> {
    check_walk(cm, darts)?;
    let on_cycle: BTreeSet<usize> = darts.iter().copied().collect();
    // Regions: original faces by index, holes as usize::MAX - h.
    let region = |d: usize| cm.face[d].unwrap_or_else(|| usize::MAX - cm.hole[d].unwrap());
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for d in 0..cm.dart_count() {
        if on_cycle.contains(&d) || on_cycle.contains(&cm.twin[d]) {
            continue;
        }
        adj.entry(region(d)).or_default().push(region(cm.twin[d]));
    }
    let start = region(darts[0]);
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(r) = stack.pop() {
        for &s in adj.get(&r).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(s) {
                stack.push(s);
            }
        }
    }
    if !seen.contains(&(usize::MAX - inner)) || seen.contains(&(usize::MAX - (1 - inner))) {
        return Err(CurvatureError::BadCutCycle("cycle does not separate the two holes".into()));
    }
    Ok(seen.iter().filter(|&&r| r < usize::MAX - 1).count())
}

/// Local curvatures (exterior triangles minus 3) of a cycle in the cut mesh
/// that has hole 0 on its left and hole 1 on its right.
pub fn cut_cycle_local(cm: &CutMesh, darts: &[usize]) -> Result<Vec<i64>, CurvatureError> {
    local_towards(cm, darts, 0)
}

fn local_towards(cm: &CutMesh, darts: &[usize], inner: usize) -> Result<Vec<i64>, CurvatureError> {
    interior_towards(cm, darts, inner)?;
    let k = darts.len();
    (0..k)
        .map(|i| exterior_sector(cm, darts[(i + k - 1) % k], darts[i]).map(|(t, _)| t as i64 - 3))
        .collect()
}

pub fn cut_cycle_curvature(cm: &CutMesh, darts: &[usize]) -> Result<i64, CurvatureError> {
    Ok(cut_cycle_local(cm, darts)?.iter().sum())
}

/// Same cycle traversed the other way.
pub fn reverse_cycle(cm: &CutMesh, darts: &[usize]) -> Vec<usize> {
    darts.iter().rev().map(|&d| cm.twin[d]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepStep {
    /// Drops a vertex whose exterior sector is one triangle.
    One,
    /// Pushes a vertex across the two triangles of its exterior sector.
    Two,
    /// Replaces every vertex by its outer neighbors.
    Three,
    /// Fallback: pushes one edge over the triangle outside it.
    Push,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepCycle {
    pub darts: Vec<usize>,
    pub copies: Vec<usize>,
    pub vertices: Vec<usize>,
    pub length: usize,
    /// Triangles between this cycle and hole 0.
    pub interior_triangles: usize,
    pub curvature: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepTransition {
    pub step: SweepStep,
    pub index: usize,
    pub neighbor_contract: bool,
    pub edge_contract: bool,
}

/// Cycles from `t1'` to `t2'`, all oriented with hole 0 on the left.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepTrace {
    pub cycles: Vec<SweepCycle>,
    pub transitions: Vec<SweepTransition>,
    pub max_length: usize,
    pub contracts_hold: bool,
}

impl SweepTrace {
    pub fn within_length_bound(&self) -> bool {
        self.max_length <= SWEEP_LENGTH_BOUND
    }
}

/// One sweep step away from the left side, if any applies.
pub fn try_step(cm: &CutMesh, darts: &[usize]) -> Result<Option<(SweepStep, usize, Vec<usize>)>, CurvatureError> {
    let k = darts.len();
    let on_cycle: BTreeSet<usize> = darts.iter().map(|&d| cm.origin[d]).collect();
    let sectors: Vec<(usize, bool)> =
        (0..k).map(|i| exterior_sector(cm, darts[(i + k - 1) % k], darts[i])).collect::<Result<_, _>>()?;
    for i in 0..k {
        let (tri, hole) = sectors[i];
        let (d_in, d_out) = (darts[(i + k - 1) % k], darts[i]);
        if tri == 1 && !hole && k >= 3 && cm.origin[d_in] != cm.target[d_out] {
            let new = cm.next[cm.twin[d_in]];
            let mut out = Vec::with_capacity(k - 1);
            for j in 0..k {
                if j == (i + k - 1) % k {
                    out.push(new);
                } else if j != i {
                    out.push(darts[j]);
                }
            }
            return Ok(Some((SweepStep::One, i, out)));
        }
    }
    for i in 0..k {
        let (tri, hole) = sectors[i];
        let d_in = darts[(i + k - 1) % k];
        if tri == 2 && !hole {
            let a0 = cm.twin[d_in];
            let a1 = cm.ccw_next_out(a0);
            if on_cycle.contains(&cm.target[a1]) {
                continue;
            }
            let mut out = Vec::with_capacity(k + 1);
            for j in 0..k {
                if j == (i + k - 1) % k {
                    out.push(cm.next[a0]);
                    out.push(cm.next[a1]);
                } else if j != i {
                    out.push(darts[j]);
                }
            }
            return Ok(Some((SweepStep::Two, i, out)));
        }
    }
    if sectors.iter().all(|&(t, h)| t == 3 && !h) {
        let outer: Vec<usize> =
            (0..k).map(|i| cm.next[cm.ccw_next_out(cm.twin[darts[(i + k - 1) % k]])]).collect();
        let starts: BTreeSet<usize> = outer.iter().map(|&d| cm.origin[d]).collect();
        let chains = (0..k).all(|i| cm.target[outer[i]] == cm.origin[outer[(i + 1) % k]]);
        if chains && starts.len() == k && starts.is_disjoint(&on_cycle) {
            return Ok(Some((SweepStep::Three, 0, outer)));
        }
    }
    for i in 0..k {
        let back = cm.twin[darts[i]];
        if cm.face[back].is_none() {
            continue;
        }
        let (a, b) = (cm.next[back], cm.next[cm.next[back]]);
        if on_cycle.contains(&cm.target[a]) {
            continue;
        }
        let mut out = darts.to_vec();
        out.splice(i..=i, [a, b]);
        return Ok(Some((SweepStep::Push, i, out)));
    }
    Ok(None)
}

/// Adjacency contracts between consecutive cycles: every vertex of one is
/// on or next to the other, and every edge of one has a vertex of the other
/// within distance 1 of both endpoints.
fn contracts(adj: &[BTreeSet<usize>], a: &[usize], b: &[usize]) -> (bool, bool) {
    let check = |x: &[usize], y: &[usize]| {
        let ys: BTreeSet<usize> = y.iter().copied().collect();
        let near = |p: usize, q: usize| p == q || adj[p].contains(&q);
        let vertex_ok = x.iter().all(|&v| ys.contains(&v) || adj[v].iter().any(|w| ys.contains(w)));
        let edge_ok = (0..x.len()).all(|i| {
            let (p, q) = (x[i], x[(i + 1) % x.len()]);
            ys.iter().any(|&z| near(z, p) && near(z, q))
        });
        (vertex_ok, edge_ok)
    };
    let (v1, e1) = check(a, b);
    let (v2, e2) = check(b, a);
    (v1 && v2, e1 && e2)
}

/// Sweeps from `t1'` to `t2'`, each time taking the lowest-index step of
/// the first applicable kind.
pub fn sweep_cycles(cm: &CutMesh) -> Result<SweepTrace, CurvatureError> {
    let adj = cm.copy_neighbors();
    let record = |darts: Vec<usize>| -> Result<SweepCycle, CurvatureError> {
        Ok(SweepCycle {
            copies: cm.cycle_copies(&darts),
            vertices: cm.cycle_base(&darts),
            length: darts.len(),
            interior_triangles: cut_cycle_interior(cm, &darts)?,
            curvature: cut_cycle_curvature(cm, &darts)?,
            darts,
        })
    };
    let mut cycles = vec![record(cm.boundaries[0].clone())?];
    let mut transitions = Vec::new();
    loop {
        let cur = cycles.last().unwrap();
        if cur.darts.iter().all(|&d| cm.hole[cm.twin[d]] == Some(1)) {
            break;
        }
        let Some((step, index, darts)) = try_step(cm, &cur.darts)? else {
            let local = cut_cycle_local(cm, &cur.darts)?;
            return Err(CurvatureError::SweepStuck {
                cycle: cur.vertices.clone(),
                reason: format!("no step applies; local curvatures {local:?}"),
            });
        };
        let next = record(darts)?;
        if next.interior_triangles <= cur.interior_triangles {
            return Err(CurvatureError::Internal("sweep step did not grow the interior".into()));
        }
        let (neighbor_contract, edge_contract) = contracts(&adj, &cur.copies, &next.copies);
        transitions.push(SweepTransition { step, index, neighbor_contract, edge_contract });
        cycles.push(next);
    }
    Ok(SweepTrace {
        contracts_hold: transitions.iter().all(|t| t.neighbor_contract && t.edge_contract),
        max_length: cycles.iter().map(|c| c.length).max().unwrap_or(0),
        cycles,
        transitions,
    })
}

/// Per cycle vertex: triangles in the exterior sector and whether a hole
/// lies in it.
pub fn sector_profile(cm: &CutMesh, darts: &[usize]) -> Result<Vec<(usize, bool)>, CurvatureError> {
    check_walk(cm, darts)?;
    let k = darts.len();
    (0..k).map(|i| exterior_sector(cm, darts[(i + k - 1) % k], darts[i])).collect()
}
