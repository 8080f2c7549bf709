//! Irregular-vertex proximity, case split, Steiner trees and the case 2
//! separating cycle with its mod-6 consistency check.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{cycle_curvature, CurvatureError};
use crate::coloring::{Coloring, SimpleGraph};
use crate::isbell::{
    direction_table, fragment, isbell_color, matching_params, turn, FragmentKind, IsbellParams, LatticePoint,
    GH_LAYOUT,
};
use crate::mesh::{DirectedCycle, TriMesh};

/// Irregular vertices are linked when their graph distance is at most this.
pub const PROXIMITY_THRESHOLD: usize = 3;
pub const CASE1A_STEINER_BOUND: usize = 33;
pub const CASE1A_SPLIT_BOUND: usize = 22;
pub const CASE1B_TREE_BOUND: usize = 15;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub multiplicity: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProximityGraph {
    /// Irregular vertices with multiplicities, sorted by vertex id.
    pub nodes: Vec<(usize, i64)>,
    /// Pairs of node indices, with their mesh distance.
    pub edges: Vec<(usize, usize, usize)>,
    pub components: Vec<Component>,
}

impl ProximityGraph {
    pub fn total_multiplicity(&self) -> i64 {
        self.nodes.iter().map(|n| n.1).sum()
    }
}

pub fn proximity_graph(m: &TriMesh) -> ProximityGraph {
    let nodes = m.irregular_vertices();
    let index: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(i, n)| (n.0, i)).collect();
    let mut edges = Vec::new();
    for (i, &(v, _)) in nodes.iter().enumerate() {
        let dist = bounded_bfs(m, v, PROXIMITY_THRESHOLD);
        for (&w, &d) in &dist {
            if let Some(&j) = index.get(&w) {
                if i < j {
                    edges.push((i, j, d));
                }
            }
        }
    }
    edges.sort_unstable();
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    for &(i, j, _) in &edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..nodes.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let components = groups
        .values()
        .map(|g| Component {
            vertices: g.iter().map(|&i| nodes[i].0).collect(),
            multiplicity: g.iter().map(|&i| nodes[i].1).sum(),
        })
        .collect();
    ProximityGraph { nodes, edges, components }
}

fn bounded_bfs(m: &TriMesh, src: usize, limit: usize) -> BTreeMap<usize, usize> {
    let mut dist = BTreeMap::new();
    dist.insert(src, 0);
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if d == limit {
            continue;
        }
        for &w in m.neighbors(v) {
            if !dist.contains_key(&w) {
                dist.insert(w, d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut x = i;
    while parent[x] != r {
        let p = parent[x];
        parent[x] = r;
        x = p;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    Case1a,
    Case1b,
    Case2,
}

pub fn classify_case(h: &ProximityGraph) -> Result<Case, CurvatureError> {
    let total = h.total_multiplicity();
    if total != 12 {
        return Err(CurvatureError::MultiplicitySum(total));
    }
    Ok(match h.components.as_slice() {
        [_] => Case::Case1a,
        [a, b] if a.multiplicity == 6 && b.multiplicity == 6 => Case::Case1b,
        _ => Case::Case2,
    })
}

/// Tree in the mesh graph.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Tree {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl Tree {
    pub fn single(v: usize) -> Tree {
        Tree { vertices: BTreeSet::from([v]), edges: BTreeSet::new() }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.vertices.insert(u);
        self.vertices.insert(v);
        self.edges.insert((u.min(v), u.max(v)));
    }

    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect()
    }

    pub fn is_tree(&self) -> bool {
        if self.vertices.is_empty() || self.edges.len() + 1 != self.vertices.len() {
            return false;
        }
        let start = *self.vertices.iter().next().unwrap();
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == self.vertices.len()
    }
}

/// Shortest path with deterministic tie-breaking (lowest ids first).
fn shortest_path(m: &TriMesh, from: usize, to: usize) -> Vec<usize> {
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    parent.insert(from, from);
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        let mut nbrs = m.neighbors(v).to_vec();
        nbrs.sort_unstable();
        for w in nbrs {
            if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(w) {
                e.insert(v);
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = parent[&cur];
        path.push(cur);
    }
    path.reverse();
    path
}

/// Tree over `terminals` built from a minimum spanning tree of their
/// proximity graph joined by shortest paths, then pruned.
pub fn steiner_tree(m: &TriMesh, terminals: &[usize]) -> Result<Tree, CurvatureError> {
    let mut terms: Vec<usize> = terminals.to_vec();
    terms.sort_unstable();
    terms.dedup();
    if terms.is_empty() {
        return Err(CurvatureError::Unsplittable("no terminals".into()));
    }
    if terms.len() == 1 {
        return Ok(Tree::single(terms[0]));
    }
    let mut candidates = Vec::new();
    for (i, &v) in terms.iter().enumerate() {
        let dist = bounded_bfs(m, v, PROXIMITY_THRESHOLD);
        for (j, &w) in terms.iter().enumerate().skip(i + 1) {
            if let Some(&d) = dist.get(&w) {
                candidates.push((d, i, j));
            }
        }
    }
    candidates.sort_unstable();
    let mut parent: Vec<usize> = (0..terms.len()).collect();
    let mut union = Tree::default();
    let mut joined = 0;
    for (_, i, j) in candidates {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a == b {
            continue;
        }
        parent[a.max(b)] = a.min(b);
        joined += 1;
        let path = shortest_path(m, terms[i], terms[j]);
        for w in path.windows(2) {
            union.add_edge(w[0], w[1]);
        }
    }
    if joined + 1 != terms.len() {
        return Err(CurvatureError::Disconnected);
    }
    // Spanning tree of the union of paths.
    let mut tree = Tree::single(terms[0]);
    let mut queue = VecDeque::from([terms[0]]);
    while let Some(v) = queue.pop_front() {
        let mut nbrs = union.neighbors(v);
        nbrs.sort_unstable();
        for w in nbrs {
            if !tree.vertices.contains(&w) {
                tree.add_edge(v, w);
                queue.push_back(w);
            }
        }
    }
    // Prune leaves that are not terminals.
    let term_set: BTreeSet<usize> = terms.iter().copied().collect();
    loop {
        let leaf = tree
            .vertices
            .iter()
            .copied()
            .find(|&v| !term_set.contains(&v) && tree.neighbors(v).len() <= 1);
        let Some(v) = leaf else { break };
        for w in tree.neighbors(v) {
            tree.edges.remove(&(v.min(w), v.max(w)));
        }
        tree.vertices.remove(&v);
    }
    Ok(tree)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreePair {
    pub case: Case,
    pub t0: Option<Tree>,
    pub t1: Tree,
    pub t2: Tree,
    pub shared: Option<usize>,
    pub disjoint: bool,
}

impl TreePair {
    pub fn max_edges(&self) -> usize {
        self.t1.edge_count().max(self.t2.edge_count())
    }
}

/// Splits `t0` at one shared vertex into two trees, taking a cyclically
/// contiguous run of branches (in the rotation at the vertex) for `t1`.
/// Among splits within the edge bound, a regular shared vertex is preferred,
/// then the smallest larger part.
pub fn split_tree(m: &TriMesh, t0: &Tree) -> Result<TreePair, CurvatureError> {
    if !t0.is_tree() {
        return Err(CurvatureError::Unsplittable("input is not a tree".into()));
    }
    let total = t0.edge_count();
    // (over bound, irregular, max, vertex, start, len)
    let mut best: Option<(bool, bool, usize, usize, usize, usize)> = None;
    let mut branch_cache: BTreeMap<usize, Vec<(usize, Tree)>> = BTreeMap::new();
    for &v in &t0.vertices {
        let tree_nbrs: BTreeSet<usize> = t0.neighbors(v).into_iter().collect();
        if tree_nbrs.len() < 2 {
            continue;
        }
        // Branches in counterclockwise order around v.
        let branches: Vec<(usize, Tree)> = m
            .neighbors(v)
            .iter()
            .filter(|w| tree_nbrs.contains(w))
            .map(|&w| (w, branch(t0, v, w)))
            .collect();
        let sizes: Vec<usize> = branches.iter().map(|b| b.1.edge_count()).collect();
        let d = sizes.len();
        for start in 0..d {
            for len in 1..d {
                let s: usize = (0..len).map(|j| sizes[(start + j) % d]).sum();
                let max = s.max(total - s);
                let key = (max > CASE1A_SPLIT_BOUND, m.degree(v) != 6, max, v, start, len);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
        }
        branch_cache.insert(v, branches);
    }
    let Some((_, _, max, v, start, len)) = best else {
        return Err(CurvatureError::Unsplittable("no vertex of tree degree at least 2".into()));
    };
    let branches = &branch_cache[&v];
    let d = branches.len();
    let mut t1 = Tree::single(v);
    let mut t2 = Tree::single(v);
    for (j, (_, b)) in branches.iter().enumerate() {
        let in_first = (j + d - start) % d < len;
        let target = if in_first { &mut t1 } else { &mut t2 };
        for &(a, c) in &b.edges {
            target.add_edge(a, c);
        }
    }
    if max > CASE1A_SPLIT_BOUND && total <= CASE1A_STEINER_BOUND {
        return Err(CurvatureError::BoundViolated(format!(
            "split of a {total}-edge tree has a part with {max} edges (> {CASE1A_SPLIT_BOUND})"
        )));
    }
    Ok(TreePair { case: Case::Case1a, t0: Some(t0.clone()), t1, t2, shared: Some(v), disjoint: false })
}

/// Component of `t0 - v` containing `w`, plus the edge `v w`.
fn branch(t0: &Tree, v: usize, w: usize) -> Tree {
    let mut b = Tree::single(v);
    b.add_edge(v, w);
    let mut stack = vec![w];
    while let Some(x) = stack.pop() {
        for y in t0.neighbors(x) {
            if y != v && !b.vertices.contains(&y) {
                b.add_edge(x, y);
                stack.push(y);
            }
        }
    }
    b
}

/// Tree pair for the case split of `m`: a split Steiner tree in case 1a,
/// one tree per component in case 1b.
pub fn tree_pair(m: &TriMesh) -> Result<TreePair, CurvatureError> {
    let h = proximity_graph(m);
    match classify_case(&h)? {
        Case::Case1a => {
            let terms: Vec<usize> = h.nodes.iter().map(|n| n.0).collect();
            let t0 = steiner_tree(m, &terms)?;
            if t0.edge_count() > CASE1A_STEINER_BOUND {
                return Err(CurvatureError::BoundViolated(format!(
                    "Steiner tree has {} edges (> {CASE1A_STEINER_BOUND})",
                    t0.edge_count()
                )));
            }
            split_tree(m, &t0)
        }
        Case::Case1b => {
            let t1 = steiner_tree(m, &h.components[0].vertices)?;
            let t2 = steiner_tree(m, &h.components[1].vertices)?;
            for (i, t) in [&t1, &t2].iter().enumerate() {
                if t.edge_count() > CASE1B_TREE_BOUND {
                    return Err(CurvatureError::BoundViolated(format!(
                        "tree {} has {} edges (> {CASE1B_TREE_BOUND})",
                        i + 1,
                        t.edge_count()
                    )));
                }
            }
            if !t1.vertices.is_disjoint(&t2.vertices) {
                return Err(CurvatureError::Crossing("component trees share a vertex".into()));
            }
            Ok(TreePair { case: Case::Case1b, t0: None, t1, t2, shared: None, disjoint: true })
        }
        Case::Case2 => Err(CurvatureError::Unsplittable("mesh is in case 2".into())),
    }
}

/// Cycle around proximity component `component` whose vertices avoid the
/// 1-neighborhood of every irregular vertex and whose inside holds an
/// irregular multiplicity not divisible by 6.
pub fn separating_cycle(m: &TriMesh, component: usize) -> Result<DirectedCycle, CurvatureError> {
    let h = proximity_graph(m);
    if classify_case(&h)? != Case::Case2 {
        return Err(CurvatureError::NotCase2);
    }
    let comp = h
        .components
        .get(component)
        .ok_or_else(|| CurvatureError::BadComponent(component, "no such component".into()))?;
    if comp.multiplicity % 6 == 0 {
        return Err(CurvatureError::BadComponent(component, "multiplicity divisible by 6".into()));
    }
    let near: BTreeSet<usize> = m
        .bfs_distances(&comp.vertices)
        .iter()
        .enumerate()
        .filter(|(_, d)| matches!(d, Some(d) if *d <= 1))
        .map(|(v, _)| v)
        .collect();
    let faces = m.faces();
    let covered: BTreeSet<usize> =
        (0..faces.len()).filter(|&f| faces[f].iter().any(|v| near.contains(v))).collect();
    // Components of the remaining triangles.
    let mut label = vec![usize::MAX; faces.len()];
    let mut pieces: Vec<Vec<usize>> = Vec::new();
    for f in 0..faces.len() {
        if covered.contains(&f) || label[f] != usize::MAX {
            continue;
        }
        let id = pieces.len();
        let mut piece = vec![f];
        label[f] = id;
        let mut i = 0;
        while i < piece.len() {
            let g = piece[i];
            i += 1;
            let t = faces[g];
            for k in 0..3 {
                let x = m.face_left(t[(k + 1) % 3], t[k]).unwrap();
                if !covered.contains(&x) && label[x] == usize::MAX {
                    label[x] = id;
                    piece.push(x);
                }
            }
        }
        pieces.push(piece);
    }
    let irregular: BTreeMap<usize, i64> = h.nodes.iter().copied().collect();
    for piece in &pieces {
        let set: BTreeSet<usize> = piece.iter().copied().collect();
        let mut boundary_vertices = BTreeSet::new();
        let mut darts: BTreeMap<usize, usize> = BTreeMap::new();
        let mut simple = true;
        for &f in piece {
            let t = faces[f];
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if !set.contains(&m.face_left(b, a).unwrap()) {
                    // Boundary of the piece, traversed with the piece on the right.
                    if darts.insert(b, a).is_some() {
                        simple = false;
                    }
                    boundary_vertices.insert(a);
                }
            }
        }
        if !simple || darts.is_empty() {
            continue;
        }
        let mut verts: BTreeSet<usize> = BTreeSet::new();
        for &f in piece {
            verts.extend(faces[f]);
        }
        let mult: i64 = verts
            .iter()
            .filter(|v| !boundary_vertices.contains(v))
            .filter_map(|v| irregular.get(v))
            .sum();
        if mult % 6 == 0 {
            continue;
        }
        let start = *darts.keys().next().unwrap();
        let mut cyc = vec![start];
        let mut cur = darts[&start];
        while cur != start {
            cyc.push(cur);
            cur = darts[&cur];
            if cyc.len() > darts.len() {
                break;
            }
        }
        if cyc.len() != darts.len() {
            continue;
        }
        return Ok(DirectedCycle::new(m, cyc)?);
    }
    Err(CurvatureError::BadComponent(component, "no complementary piece with a simple boundary".into()))
}

/// First component admitting a separating cycle.
pub fn separating_cycle_auto(m: &TriMesh) -> Result<(usize, DirectedCycle), CurvatureError> {
    let h = proximity_graph(m);
    let mut last = CurvatureError::NotCase2;
    for i in 0..h.components.len() {
        match separating_cycle(m, i) {
            Ok(c) => return Ok((i, c)),
            Err(e @ CurvatureError::NotCase2) => return Err(e),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Chart of the labeled 2-neighborhood around cycle vertex `i`: `u` goes to
/// `v_i`, `u1` to `v_{i+1}`, the remaining labels follow the rotation.
pub fn psi_chart(m: &TriMesh, c: &DirectedCycle, i: usize) -> Result<Vec<usize>, CurvatureError> {
    let v = c.at(i as isize);
    if m.degree(v) != 6 {
        return Err(CurvatureError::BadChart(i, format!("vertex {v} is irregular")));
    }
    let mut ring = vec![c.at(i as isize + 1)];
    for _ in 1..6 {
        ring.push(m.ccw_next(v, *ring.last().unwrap()));
    }
    if let Some(&w) = ring.iter().find(|&&w| m.degree(w) != 6) {
        return Err(CurvatureError::BadChart(i, format!("neighbor {w} is irregular")));
    }
    // u_{j,j+1}: apex beyond edge u_j u_{j+1}.
    let mid: Vec<usize> = (0..6).map(|j| m.apex(ring[(j + 1) % 6], ring[j])).collect();
    // u_{j,j}: between u_{j-1,j} and u_{j,j+1} around u_j.
    let mut outer = Vec::with_capacity(6);
    for j in 0..6 {
        let uj = ring[j];
        let before = mid[(j + 5) % 6];
        let w = m.ccw_next(uj, before);
        if m.ccw_next(uj, w) != mid[j] {
            return Err(CurvatureError::BadChart(i, format!("rotation at {uj} is not hexagonal")));
        }
        outer.push(w);
    }
    let mut by_label: BTreeMap<String, usize> = BTreeMap::new();
    by_label.insert("u".into(), v);
    let names = ["1", "2", "3", "4", "5", "6"];
    for j in 0..6 {
        let a = names[j];
        let b = names[(j + 1) % 6];
        by_label.insert(format!("u{a}"), ring[j]);
        by_label.insert(format!("u{a}{a}"), outer[j]);
        by_label.insert(format!("u{a}{b}"), mid[j]);
    }
    let chart: Vec<usize> = GH_LAYOUT.iter().map(|(l, _, _)| by_label[*l]).collect();
    let distinct: BTreeSet<usize> = chart.iter().copied().collect();
    if distinct.len() != chart.len() {
        return Err(CurvatureError::BadChart(i, "chart is not injective".into()));
    }
    Ok(chart)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Consistent,
    Contradiction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartResidue {
    pub index: usize,
    pub vertex: usize,
    pub isbell: bool,
    /// Local curvature at the vertex, reduced mod 6.
    pub local_turn: i64,
    /// Turn read off the direction table, mod 6.
    pub table_turn: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case2Report {
    pub verdict: Verdict,
    pub curvature: i64,
    pub curvature_mod6: i64,
    pub direction_sum_mod6: i64,
    pub reference_chart: usize,
    pub reference_params: IsbellParams,
    pub non_isbell_charts: Vec<usize>,
    pub residues: Vec<ChartResidue>,
}

/// Compares the cycle's curvature mod 6 with the telescoping direction sum
/// read through the Isbell direction table of the first Isbell chart.
pub fn case2_consistency(
    m: &TriMesh,
    sigma: &Coloring,
    c2: &DirectedCycle,
) -> Result<Case2Report, CurvatureError> {
    let curv = cycle_curvature(m, c2)?;
    let gh = fragment(FragmentKind::GH);
    let n = c2.len();
    let mut charts = Vec::with_capacity(n);
    let mut params: Vec<Option<IsbellParams>> = Vec::with_capacity(n);
    for i in 0..n {
        let chart = psi_chart(m, c2, i)?;
        let colors: Option<Vec<u32>> = chart.iter().map(|&v| sigma.colors.get(v).copied().flatten()).collect();
        let p = colors.and_then(|cs| {
            let found = matching_params(&gh, &cs);
            (found.len() == 1).then(|| found[0])
        });
        charts.push(chart);
        params.push(p);
    }
    let reference_chart = params.iter().position(Option::is_some).ok_or(CurvatureError::NoIsbellChart)?;
    let reference_params = params[reference_chart].unwrap();
    let table = direction_table(&reference_params);
    let color = |v: usize| -> Result<u32, CurvatureError> {
        sigma.colors.get(v).copied().flatten().ok_or_else(|| CurvatureError::BadChart(0, format!("vertex {v} uncolored")))
    };
    let mut dirs = Vec::with_capacity(n);
    for (a, b) in c2.darts() {
        dirs.push(table.lookup(color(a)?, color(b)?)?);
    }
    let mut residues = Vec::with_capacity(n);
    let mut sum = 0i64;
    for i in 0..n {
        let t = turn(dirs[(i + n - 1) % n], dirs[i]) as i64;
        sum += t;
        residues.push(ChartResidue {
            index: i,
            vertex: c2.at(i as isize),
            isbell: params[i].is_some(),
            local_turn: curv.local[i].rem_euclid(6),
            table_turn: t,
        });
    }
    let direction_sum_mod6 = sum.rem_euclid(6);
    let curvature_mod6 = curv.total.rem_euclid(6);
    let verdict = if curvature_mod6 == direction_sum_mod6 { Verdict::Consistent } else { Verdict::Contradiction };
    Ok(Case2Report {
        verdict,
        curvature: curv.total,
        curvature_mod6,
        direction_sum_mod6,
        reference_chart,
        reference_params,
        non_isbell_charts: (0..n).filter(|&i| params[i].is_none()).collect(),
        residues,
    })
}

/// Colors the vertices within `radius` of `center` by developing the mesh
/// onto the triangular lattice face by face (first assignment wins) and
/// reading off an Isbell coloring. Around an irregular vertex this leaves a
/// seam where the development does not close up.
pub fn develop_isbell_labels(m: &TriMesh, center: usize, radius: usize, params: &IsbellParams) -> Coloring {
    let dist = m.bfs_distances(&[center]);
    let inside = |v: usize| matches!(dist[v], Some(d) if d <= radius);
    let mut pos: BTreeMap<usize, LatticePoint> = BTreeMap::new();
    pos.insert(center, LatticePoint::new(0, 0));
    let first = m.neighbors(center)[0];
    pos.insert(first, LatticePoint::new(1, 0));
    let mut queue = VecDeque::from([(center, first)]);
    let mut seen = BTreeSet::new();
    while let Some((a, b)) = queue.pop_front() {
        if !seen.insert((a, b)) {
            continue;
        }
        let c = m.apex(a, b);
        let (pa, pb) = (pos[&a], pos[&b]);
        let (da, db) = (pb.a - pa.a, pb.b - pa.b);
        // Rotate the edge vector by 60 degrees counterclockwise.
        let pc = LatticePoint::new(pa.a - db, pa.b + da + db);
        if !pos.contains_key(&c) {
            if !inside(c) {
                continue;
            }
            pos.insert(c, pc);
        } else if pos[&c] != pc {
            continue;
        }
        for (x, y) in [(b, a), (c, b), (a, c)] {
            if !seen.contains(&(x, y)) && inside(x) && inside(y) {
                queue.push_back((x, y));
            }
        }
    }
    let mut out = Coloring::empty(m.vertex_count(), 7);
    for (&v, &p) in &pos {
        out.colors[v] = Some(isbell_color(params, p));
    }
    out
}

/// Graph induced on a vertex subset, with relabeled ids.
pub fn induced_subgraph(m: &TriMesh, keep: &BTreeSet<usize>) -> (SimpleGraph, Vec<usize>) {
    let ids: Vec<usize> = keep.iter().copied().collect();
    let index: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let edges: Vec<(usize, usize)> = m
        .edges()
        .into_iter()
        .filter_map(|(a, b)| Some((*index.get(&a)?, *index.get(&b)?)))
        .collect();
    (SimpleGraph::from_edges(ids.len(), &edges), ids)
}
