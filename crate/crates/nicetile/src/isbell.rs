//! Triangular lattice, Isbell colorings and the direction table.
//!
//! Axial chart: the point `(a, b)` sits at `(a + b/2, b*sqrt(3)/2)` in the
//! plane. The six unit directions, counterclockwise from `(1, 0)`, are
//! `(1,0), (0,1), (-1,1), (-1,0), (0,-1), (1,-1)`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::{search_nice_coloring, Coloring, SearchMode, SearchOptions, SearchStatus, SimpleGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IsbellError {
    #[error("colors {0} and {1} do not form an edge of any Isbell coloring")]
    NotAdjacentPair(u32, u32),
    #[error("invalid permutation: {0}")]
    BadPermutation(String),
    #[error("enumeration did not complete: {0}")]
    Incomplete(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub a: i64,
    pub b: i64,
}

pub const DIRECTIONS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

impl LatticePoint {
    pub const fn new(a: i64, b: i64) -> LatticePoint {
        LatticePoint { a, b }
    }

    pub fn step(self, d: usize) -> LatticePoint {
        let (da, db) = DIRECTIONS[d % 6];
        LatticePoint::new(self.a + da, self.b + db)
    }

    pub fn neighbors(self) -> [LatticePoint; 6] {
        std::array::from_fn(|d| self.step(d))
    }

    /// Direction index of `other - self` if the two points are adjacent.
    pub fn direction_to(self, other: LatticePoint) -> Option<usize> {
        let delta = (other.a - self.a, other.b - self.b);
        DIRECTIONS.iter().position(|&d| d == delta)
    }

    pub fn hex_distance(self, other: LatticePoint) -> i64 {
        let (da, db) = (other.a - self.a, other.b - self.b);
        da.abs().max(db.abs()).max((da + db).abs())
    }

    pub fn to_plane(self) -> (f64, f64) {
        (self.a as f64 + self.b as f64 / 2.0, self.b as f64 * 3f64.sqrt() / 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FragmentKind {
    Gh,
    GhPlus,
    GHMinus,
    GH,
    Custom,
}

/// Finite set of lattice points with induced adjacency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeFragment {
    pub kind: FragmentKind,
    pub points: Vec<LatticePoint>,
    pub labels: Vec<String>,
}

/// Labeled layout of the closed 2-neighborhood of the origin.
/// `u_j` lies in direction `j-1`, `u_jj` twice as far, and `u_j(j+1)` is
/// the sum of directions `j-1` and `j`.
pub const GH_LAYOUT: [(&str, i64, i64); 19] = [
    ("u", 0, 0),
    ("u1", 1, 0),
    ("u2", 0, 1),
    ("u3", -1, 1),
    ("u4", -1, 0),
    ("u5", 0, -1),
    ("u6", 1, -1),
    ("u11", 2, 0),
    ("u12", 1, 1),
    ("u22", 0, 2),
    ("u23", -1, 2),
    ("u33", -2, 2),
    ("u34", -2, 1),
    ("u44", -2, 0),
    ("u45", -1, -1),
    ("u55", 0, -2),
    ("u56", 1, -2),
    ("u66", 2, -2),
    ("u61", 2, -1),
];

impl LatticeFragment {
    pub fn custom(points: Vec<LatticePoint>) -> LatticeFragment {
        let labels = points.iter().map(|p| format!("({},{})", p.a, p.b)).collect();
        LatticeFragment { kind: FragmentKind::Custom, points, labels }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, p: LatticePoint) -> Option<usize> {
        self.points.iter().position(|&q| q == p)
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, p) in self.points.iter().enumerate() {
            for (j, q) in self.points.iter().enumerate() {
                if i < j && p.direction_to(*q).is_some() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Elementary triangles, counterclockwise.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for (i, p) in self.points.iter().enumerate() {
            for (d, e) in [(0, 1), (1, 2)] {
                if let (Some(j), Some(k)) = (self.index_of(p.step(d)), self.index_of(p.step(e))) {
                    out.push([i, j, k]);
                }
            }
        }
        out
    }

    pub fn graph(&self) -> SimpleGraph {
        SimpleGraph::from_edges(self.points.len(), &self.edges())
    }
}

pub fn fragment(kind: FragmentKind) -> LatticeFragment {
    let take = |labels: &[&str]| {
        let mut points = Vec::new();
        let mut names = Vec::new();
        for l in labels {
            let &(name, a, b) = GH_LAYOUT.iter().find(|e| e.0 == *l).expect("known label");
            points.push(LatticePoint::new(a, b));
            names.push(name.to_string());
        }
        LatticeFragment { kind, points, labels: names }
    };
    let hex = ["u", "u1", "u2", "u3", "u4", "u5", "u6"];
    match kind {
        FragmentKind::Gh => take(&hex),
        FragmentKind::GhPlus => {
            let mut l = hex.to_vec();
            l.push("u11");
            take(&l)
        }
        FragmentKind::GHMinus => {
            let mut l = hex.to_vec();
            l.extend(["u23", "u33", "u34", "u44", "u45", "u55", "u56"]);
            take(&l)
        }
        FragmentKind::GH | FragmentKind::Custom => {
            let l: Vec<&str> = GH_LAYOUT.iter().map(|e| e.0).collect();
            let mut f = take(&l);
            f.kind = kind;
            f
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Chirality {
    A,
    B,
}

impl Chirality {
    pub fn multiplier(self) -> i64 {
        match self {
            Chirality::A => 3,
            Chirality::B => 5,
        }
    }
}

/// `color(a, b) = perm[((a - a0) + m (b - b0)) mod 7]` with `m = 3` or `5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IsbellParams {
    pub chirality: Chirality,
    pub perm: [u32; 7],
    pub base: LatticePoint,
}

impl IsbellParams {
    pub fn new(chirality: Chirality, perm: [u32; 7], base: LatticePoint) -> Result<IsbellParams, IsbellError> {
        let mut seen = [false; 8];
        for &c in &perm {
            if !(1..=7).contains(&c) || seen[c as usize] {
                return Err(IsbellError::BadPermutation(format!("{perm:?}")));
            }
            seen[c as usize] = true;
        }
        Ok(IsbellParams { chirality, perm, base })
    }

    pub fn identity(chirality: Chirality) -> IsbellParams {
        IsbellParams { chirality, perm: [1, 2, 3, 4, 5, 6, 7], base: LatticePoint::new(0, 0) }
    }

    pub fn residue(&self, q: LatticePoint) -> usize {
        let r = (q.a - self.base.a) + self.chirality.multiplier() * (q.b - self.base.b);
        r.rem_euclid(7) as usize
    }
}

pub fn isbell_color(p: &IsbellParams, q: LatticePoint) -> u32 {
    p.perm[p.residue(q)]
}

/// Membership in the period lattice of the given chirality.
pub fn is_period(chirality: Chirality, q: LatticePoint) -> bool {
    (q.a + chirality.multiplier() * q.b).rem_euclid(7) == 0
}

/// All params based at the origin that agree with `colors` on `frag`.
pub fn matching_params(frag: &LatticeFragment, colors: &[u32]) -> Vec<IsbellParams> {
    let mut out = Vec::new();
    for ch in [Chirality::A, Chirality::B] {
        let probe = IsbellParams::identity(ch);
        let mut perm = [0u32; 7];
        let mut consistent = true;
        for (p, &c) in frag.points.iter().zip(colors) {
            let r = probe.residue(*p);
            if perm[r] == 0 {
                perm[r] = c;
            } else if perm[r] != c {
                consistent = false;
                break;
            }
        }
        if !consistent {
            continue;
        }
        let used: BTreeSet<u32> = perm.iter().copied().filter(|&c| c != 0).collect();
        if used.len() != perm.iter().filter(|&&c| c != 0).count() {
            continue;
        }
        // Undetermined residues: every completion is a distinct param.
        let free: Vec<usize> = (0..7).filter(|&r| perm[r] == 0).collect();
        let spare: Vec<u32> = (1..=7).filter(|c| !used.contains(c)).collect();
        for arrangement in permutations(&spare) {
            let mut full = perm;
            for (&r, &c) in free.iter().zip(&arrangement) {
                full[r] = c;
            }
            out.push(IsbellParams { chirality: ch, perm: full, base: LatticePoint::new(0, 0) });
        }
    }
    out
}

pub fn permutations(items: &[u32]) -> Vec<Vec<u32>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Central hexagon coloring of the labeled figure, in `G_h` label order.
pub const FIGURE_CENTRAL_COLORS: [u32; 7] = [1, 4, 5, 6, 7, 2, 3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    /// Completions of the fixed central hexagon, colors in `G_H` label order.
    pub completions: Vec<Vec<u32>>,
    pub completion_params: Vec<Vec<IsbellParams>>,
    pub unrestricted_count: u64,
    /// Every enumerated coloring is the restriction of a linear-form coloring.
    pub all_linear: bool,
    pub pass: bool,
}

/// Enumerates nice 7-colorings of `G_H`, with and without the figure's
/// central hexagon fixed.
pub fn verify_isbell_uniqueness() -> Result<UniquenessReport, IsbellError> {
    let frag = fragment(FragmentKind::GH);
    let g = frag.graph();
    let mut fixed = Coloring::empty(frag.len(), 7);
    for (i, &c) in FIGURE_CENTRAL_COLORS.iter().enumerate() {
        fixed.colors[i] = Some(c);
    }
    let (count, completions) = enumerate(&g, fixed, usize::MAX)?;
    let (unrestricted_count, all) = enumerate(&g, Coloring::empty(frag.len(), 7), usize::MAX)?;
    let to_colors = |c: &Coloring| c.colors.iter().map(|x| x.unwrap()).collect::<Vec<u32>>();
    let completions: Vec<Vec<u32>> = completions.iter().map(to_colors).collect();
    let completion_params: Vec<Vec<IsbellParams>> =
        completions.iter().map(|c| matching_params(&frag, c)).collect();
    let all_linear = all.iter().all(|c| !matching_params(&frag, &to_colors(c)).is_empty());
    let pass = count == 2
        && completion_params.iter().all(|p| p.len() == 1)
        && unrestricted_count == 10080
        && all_linear;
    Ok(UniquenessReport { completions, completion_params, unrestricted_count, all_linear, pass })
}

fn enumerate(g: &SimpleGraph, fixed: Coloring, keep: usize) -> Result<(u64, Vec<Coloring>), IsbellError> {
    let out = search_nice_coloring(g, 7, &SearchMode::Enumerate { fixed, keep }, &SearchOptions::default())
        .map_err(|e| IsbellError::Incomplete(e.to_string()))?;
    match out.status {
        SearchStatus::Enumerated { count, solutions } => Ok((count, solutions)),
        other => Err(IsbellError::Incomplete(format!("{other:?}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub params_checked: usize,
    pub gh_colorings: usize,
    /// Histogram: number of Isbell extensions -> number of nice `G_h` colorings.
    pub gh_extension_histogram: BTreeMap<usize, usize>,
    pub gh_plus_colorings: usize,
    pub gh_plus_extension_histogram: BTreeMap<usize, usize>,
    /// Pairs of distinct params agreeing on `G_h^+`.
    pub ambiguous_pairs: usize,
    pub pass: bool,
}

/// Checks that a `G_h` coloring extends to exactly two Isbell colorings and a
/// `G_h^+` coloring to at most one. Translations are absorbed into the color
/// permutation, so params are based at the origin.
pub fn verify_isbell_extension() -> Result<ExtensionReport, IsbellError> {
    let gh = fragment(FragmentKind::Gh);
    let ghp = fragment(FragmentKind::GhPlus);
    let mut by_gh: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    let mut by_ghp: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    let mut params_checked = 0;
    for ch in [Chirality::A, Chirality::B] {
        for perm in permutations(&[1, 2, 3, 4, 5, 6, 7]) {
            let p = IsbellParams::new(ch, perm.clone().try_into().unwrap(), LatticePoint::new(0, 0))?;
            params_checked += 1;
            let key: Vec<u32> = gh.points.iter().map(|&q| isbell_color(&p, q)).collect();
            *by_gh.entry(key).or_default() += 1;
            let key: Vec<u32> = ghp.points.iter().map(|&q| isbell_color(&p, q)).collect();
            *by_ghp.entry(key).or_default() += 1;
        }
    }
    // All nice colorings of the two fragments.
    let (gh_count, gh_all) = enumerate(&gh.graph(), Coloring::empty(gh.len(), 7), usize::MAX)?;
    let (ghp_count, ghp_all) = enumerate(&ghp.graph(), Coloring::empty(ghp.len(), 7), usize::MAX)?;
    let mut gh_hist = BTreeMap::new();
    for c in &gh_all {
        let key: Vec<u32> = c.colors.iter().map(|x| x.unwrap()).collect();
        *gh_hist.entry(by_gh.get(&key).copied().unwrap_or(0)).or_default() += 1;
    }
    let mut ghp_hist = BTreeMap::new();
    for c in &ghp_all {
        let key: Vec<u32> = c.colors.iter().map(|x| x.unwrap()).collect();
        *ghp_hist.entry(by_ghp.get(&key).copied().unwrap_or(0)).or_default() += 1;
    }
    let ambiguous_pairs = by_ghp.values().map(|&n| n * n.saturating_sub(1) / 2).sum();
    let pass = gh_hist.keys().all(|&n| n == 2)
        && ghp_hist.keys().all(|&n| n <= 1)
        && ambiguous_pairs == 0
        && gh_count as usize == gh_all.len()
        && ghp_count as usize == ghp_all.len();
    Ok(ExtensionReport {
        params_checked,
        gh_colorings: gh_all.len(),
        gh_extension_histogram: gh_hist,
        gh_plus_colorings: ghp_all.len(),
        gh_plus_extension_histogram: ghp_hist,
        ambiguous_pairs,
        pass,
    })
}

/// Ordered color pair -> direction index of the lattice edge realizing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionTable {
    pub params: IsbellParams,
    table: BTreeMap<(u32, u32), usize>,
}

pub fn direction_table(p: &IsbellParams) -> DirectionTable {
    let mut table = BTreeMap::new();
    let m = p.chirality.multiplier();
    for r in 0..7i64 {
        for (d, &(da, db)) in DIRECTIONS.iter().enumerate() {
            let s = (r + da + m * db).rem_euclid(7) as usize;
            table.insert((p.perm[r as usize], p.perm[s]), d);
        }
    }
    DirectionTable { params: *p, table }
}

impl DirectionTable {
    pub fn lookup(&self, from: u32, to: u32) -> Result<usize, IsbellError> {
        self.table.get(&(from, to)).copied().ok_or(IsbellError::NotAdjacentPair(from, to))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(u32, u32), &usize)> {
        self.table.iter()
    }
}

/// `(d2 - d1) mod 6` in `0..6`.
pub fn turn(d1: usize, d2: usize) -> usize {
    (d2 + 6 - d1 % 6) % 6
}

/// Sum of direction differences around a closed color walk, reduced mod 6.
pub fn direction_sum(table: &DirectionTable, colors: &[u32]) -> Result<usize, IsbellError> {
    let n = colors.len();
    let dirs = (0..n)
        .map(|i| table.lookup(colors[i], colors[(i + 1) % n]))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((0..n).map(|i| turn(dirs[(i + n - 1) % n], dirs[i])).sum::<usize>() % 6)
}
