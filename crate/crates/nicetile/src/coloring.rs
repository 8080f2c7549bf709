//! Distance-2 ("nice") colorings: verification and exact backtracking search.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::TriMesh;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ColoringError {
    #[error("color {color} at vertex {vertex} outside 1..={k}")]
    OutOfRange { vertex: usize, color: u32, k: usize },
    #[error("coloring has {0} entries for a graph on {1} vertices")]
    SizeMismatch(usize, usize),
    #[error("vertex {0} is uncolored")]
    Partial(usize),
    #[error("k = {0} is not supported (must be 1..=32)")]
    BadK(usize),
    #[error("fixed assignment is already invalid at {0}-{1}")]
    FixedConflict(usize, usize),
}

/// Undirected simple graph as sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    pub adj: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> SimpleGraph {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        SimpleGraph { adj }
    }

    pub fn from_mesh(m: &TriMesh) -> SimpleGraph {
        SimpleGraph::from_edges(m.vertex_count(), &m.edges())
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, a) in self.adj.iter().enumerate() {
            out.extend(a.iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        out
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }
}

/// Graph joining vertices at distance 1 or 2.
pub fn square_graph(g: &SimpleGraph) -> SimpleGraph {
    let n = g.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for v in 0..n {
        let mut s: Vec<usize> = g.adj[v].clone();
        for &w in &g.adj[v] {
            s.extend(g.adj[w].iter().copied().filter(|&x| x != v));
        }
        s.sort_unstable();
        s.dedup();
        adj[v] = s;
    }
    SimpleGraph { adj }
}

/// Vertex coloring with colors in `1..=k`; `None` marks uncolored vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub k: usize,
    pub colors: Vec<Option<u32>>,
}

impl Coloring {
    pub fn empty(n: usize, k: usize) -> Coloring {
        Coloring { k, colors: vec![None; n] }
    }

    pub fn total(k: usize, colors: &[u32]) -> Coloring {
        Coloring { k, colors: colors.iter().map(|&c| Some(c)).collect() }
    }

    pub fn is_total(&self) -> bool {
        self.colors.iter().all(Option::is_some)
    }

    fn check_range(&self) -> Result<(), ColoringError> {
        for (v, c) in self.colors.iter().enumerate() {
            if let Some(c) = *c {
                if c == 0 || c as usize > self.k {
                    return Err(ColoringError::OutOfRange { vertex: v, color: c, k: self.k });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NiceCheck {
    pub nice: bool,
    /// First pair of vertices within distance 2 sharing a color.
    pub witness: Option<(usize, usize)>,
}

/// Checks that `sigma` is a proper coloring of the square of `g`.
pub fn is_nice_coloring(g: &SimpleGraph, sigma: &Coloring) -> Result<NiceCheck, ColoringError> {
    if let Some(v) = sigma.colors.iter().position(Option::is_none) {
        return Err(ColoringError::Partial(v));
    }
    first_conflict(g, sigma).map(|w| NiceCheck { nice: w.is_none(), witness: w })
}

/// First conflict among the colored vertices of a possibly partial coloring.
pub fn first_conflict(g: &SimpleGraph, sigma: &Coloring) -> Result<Option<(usize, usize)>, ColoringError> {
    if sigma.colors.len() != g.vertex_count() {
        return Err(ColoringError::SizeMismatch(sigma.colors.len(), g.vertex_count()));
    }
    sigma.check_range()?;
    let sq = square_graph(g);
    for (u, nbrs) in sq.adj.iter().enumerate() {
        for &v in nbrs {
            if u < v && sigma.colors[u].is_some() && sigma.colors[u] == sigma.colors[v] {
                return Ok(Some((u, v)));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchMode {
    Find,
    /// Count completions of a fixed partial assignment, keeping up to `keep`.
    Enumerate { fixed: Coloring, keep: usize },
    ProveUnsat,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SearchLimits {
    pub max_nodes: Option<u64>,
    pub timeout: Option<Duration>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SearchOptions {
    pub limits: SearchLimits,
    /// Fix the closed neighborhood of this vertex to colors `1..` in rotation
    /// order before searching. Only used by `Find` and `ProveUnsat`.
    pub fix_neighborhood: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SearchStatus {
    Sat { coloring: Coloring },
    Unsat,
    Enumerated { count: u64, solutions: Vec<Coloring> },
    Indeterminate { reason: String },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub max_depth: usize,
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    #[serde(flatten)]
    pub status: SearchStatus,
    pub stats: SearchStats,
}

struct Solver<'a> {
    sq: &'a SimpleGraph,
    k: usize,
    colors: Vec<u32>,
    domain: Vec<u32>,
    trail: Vec<(usize, u32)>,
    uncolored: usize,
    stats: SearchStats,
    symmetry: bool,
    count: u64,
    keep: usize,
    stop_at_first: bool,
    solutions: Vec<Coloring>,
    limits: SearchLimits,
    start: Instant,
    aborted: Option<String>,
}

impl Solver<'_> {
    /// Assigns `c` to `v`, pruning neighbor domains. Returns false on a wipe-out.
    fn assign(&mut self, v: usize, c: u32) -> bool {
        self.colors[v] = c;
        self.uncolored -= 1;
        let bit = 1u32 << (c - 1);
        let mut ok = true;
        for &w in &self.sq.adj[v] {
            if self.colors[w] == 0 && self.domain[w] & bit != 0 {
                self.trail.push((w, self.domain[w]));
                self.domain[w] &= !bit;
                if self.domain[w] == 0 {
                    ok = false;
                }
            }
        }
        ok
    }

    fn undo(&mut self, v: usize, mark: usize) {
        while self.trail.len() > mark {
            let (w, d) = self.trail.pop().unwrap();
            self.domain[w] = d;
        }
        self.colors[v] = 0;
        self.uncolored += 1;
    }

    fn pick(&self) -> usize {
        let mut best = usize::MAX;
        let mut key = (u32::MAX, 0usize);
        for v in 0..self.colors.len() {
            if self.colors[v] != 0 {
                continue;
            }
            let free = self.sq.adj[v].iter().filter(|&&w| self.colors[w] == 0).count();
            let cand = (self.domain[v].count_ones(), usize::MAX - free);
            if cand < key {
                key = cand;
                best = v;
            }
        }
        best
    }

    fn out_of_budget(&mut self) -> bool {
        if let Some(max) = self.limits.max_nodes {
            if self.stats.nodes >= max {
                self.aborted = Some(format!("node limit {max} reached"));
                return true;
            }
        }
        if self.stats.nodes % 1024 == 0 {
            if let Some(t) = self.limits.timeout {
                if self.start.elapsed() >= t {
                    self.aborted = Some(format!("timeout after {} ms", t.as_millis()));
                    return true;
                }
            }
        }
        false
    }

    /// Returns true when the search should stop.
    fn search(&mut self, depth: usize) -> bool {
        self.stats.nodes += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        if self.out_of_budget() {
            return true;
        }
        if self.uncolored == 0 {
            self.count += 1;
            if self.solutions.len() < self.keep {
                self.solutions.push(Coloring {
                    k: self.k,
                    colors: self.colors.iter().map(|&c| Some(c)).collect(),
                });
            }
            return self.stop_at_first;
        }
        let v = self.pick();
        let mut allowed = self.domain[v];
        if self.symmetry {
            let used = self.colors.iter().copied().max().unwrap_or(0) as usize;
            let limit = (used + 1).min(self.k);
            allowed &= if limit >= 32 { u32::MAX } else { (1u32 << limit) - 1 };
        }
        for c in 1..=self.k as u32 {
            if allowed & (1 << (c - 1)) == 0 {
                continue;
            }
            let mark = self.trail.len();
            let ok = self.assign(v, c);
            if ok && self.search(depth + 1) {
                self.undo(v, mark);
                return true;
            }
            self.undo(v, mark);
        }
        false
    }
}

/// Exact search for nice `k`-colorings of `g`.
pub fn search_nice_coloring(
    g: &SimpleGraph,
    k: usize,
    mode: &SearchMode,
    options: &SearchOptions,
) -> Result<SearchOutcome, ColoringError> {
    if k == 0 || k > 32 {
        return Err(ColoringError::BadK(k));
    }
    let start = Instant::now();
    let sq = square_graph(g);
    let n = g.vertex_count();
    let full = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
    let mut solver = Solver {
        sq: &sq,
        k,
        colors: vec![0; n],
        domain: vec![full; n],
        trail: Vec::new(),
        uncolored: n,
        stats: SearchStats::default(),
        symmetry: false,
        count: 0,
        keep: 0,
        stop_at_first: true,
        solutions: Vec::new(),
        limits: options.limits.clone(),
        start,
        aborted: None,
    };
    let mut fixed: Vec<(usize, u32)> = Vec::new();
    match mode {
        SearchMode::Enumerate { fixed: partial, keep } => {
            if partial.colors.len() != n {
                return Err(ColoringError::SizeMismatch(partial.colors.len(), n));
            }
            let partial = Coloring { k, colors: partial.colors.clone() };
            partial.check_range()?;
            if let Some((u, v)) = first_conflict(g, &partial)? {
                return Err(ColoringError::FixedConflict(u, v));
            }
            fixed.extend(partial.colors.iter().enumerate().filter_map(|(v, c)| c.map(|c| (v, c))));
            solver.keep = *keep;
            solver.stop_at_first = false;
        }
        SearchMode::Find | SearchMode::ProveUnsat => {
            solver.keep = 1;
            match options.fix_neighborhood {
                Some(v) => {
                    let mut closed = vec![v];
                    closed.extend(g.adj[v].iter().copied());
                    if closed.len() <= k {
                        fixed.extend(closed.into_iter().zip(1..));
                    } else {
                        // More than k pairwise-close vertices: no coloring exists.
                        return Ok(SearchOutcome {
                            status: SearchStatus::Unsat,
                            stats: SearchStats { elapsed_ms: start.elapsed().as_millis(), ..Default::default() },
                        });
                    }
                }
                None => solver.symmetry = true,
            }
        }
    }
    let mut feasible = true;
    for &(v, c) in &fixed {
        if !solver.assign(v, c) {
            feasible = false;
        }
    }
    if feasible {
        solver.search(0);
    }
    solver.stats.elapsed_ms = start.elapsed().as_millis();
    let status = if let Some(reason) = solver.aborted.take() {
        SearchStatus::Indeterminate { reason }
    } else {
        match mode {
            SearchMode::Enumerate { .. } => SearchStatus::Enumerated {
                count: solver.count,
                solutions: std::mem::take(&mut solver.solutions),
            },
            _ => match solver.solutions.pop() {
                Some(coloring) => SearchStatus::Sat { coloring },
                None => SearchStatus::Unsat,
            },
        }
    };
    Ok(SearchOutcome { status, stats: solver.stats })
}

/// Plain proper-coloring check used for unit-distance graphs.
pub fn is_proper_coloring(g: &SimpleGraph, colors: &[u32]) -> bool {
    g.edges().iter().all(|&(u, v)| colors[u] != colors[v])
}

/// Number of proper `k`-colorings by brute force over all assignments.
pub fn count_proper_colorings(g: &SimpleGraph, k: u32) -> u64 {
    let n = g.vertex_count();
    let mut colors = vec![0u32; n];
    let mut count = 0;
    loop {
        if is_proper_coloring(g, &colors) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == n {
                return count;
            }
            colors[i] += 1;
            if colors[i] < k {
                break;
            }
            colors[i] = 0;
            i += 1;
        }
    }
}
