//! Oriented triangulated surfaces stored as rotation systems.
//!
//! Every vertex keeps its neighbors in counterclockwise order (seen from the
//! outside of the surface). Faces are derived: the face to the left of the
//! dart `a -> b` is `(a, b, c)` where `c` follows `b` in the rotation of `a`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("mesh has no vertices")]
    Empty,
    #[error("vertex id {0} out of range")]
    VertexOutOfRange(usize),
    #[error("vertex {0} has a self loop")]
    SelfLoop(usize),
    #[error("vertex {0} lists neighbor {1} more than once")]
    DuplicateNeighbor(usize, usize),
    #[error("edge {0}-{1} is missing from the rotation of {1}")]
    AsymmetricEdge(usize, usize),
    #[error("face starting at dart {0}->{1} has length {2}, expected 3")]
    NonTriangularFace(usize, usize, usize),
    #[error("edge {0}-{1} borders {2} faces")]
    EdgeFaceCount(usize, usize, usize),
    #[error("dart {0}->{1} used by two faces (inconsistent orientation)")]
    InconsistentOrientation(usize, usize),
    #[error("vertex {0} does not have a disk neighborhood")]
    NonManifoldVertex(usize),
    #[error("vertex {0} is isolated")]
    IsolatedVertex(usize),
    #[error("mesh is disconnected")]
    Disconnected,
    #[error("cycle is not simple: {0}")]
    NotSimple(String),
    #[error("cycle step {0}-{1} is not a mesh edge")]
    NotAnEdge(usize, usize),
    #[error("cycle does not separate the surface")]
    NonSeparating,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Triangulated closed orientable surface.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    rotation: Vec<Vec<usize>>,
    faces: Vec<[usize; 3]>,
    dart_face: HashMap<(usize, usize), usize>,
    edge_count: usize,
}

impl TriMesh {
    /// Builds a mesh from a rotation system, validating every invariant.
    pub fn from_rotation(rotation: Vec<Vec<usize>>) -> Result<TriMesh, MeshError> {
        let n = rotation.len();
        if n == 0 {
            return Err(MeshError::Empty);
        }
        for (v, nbrs) in rotation.iter().enumerate() {
            if nbrs.is_empty() {
                return Err(MeshError::IsolatedVertex(v));
            }
            let mut seen = BTreeSet::new();
            for &w in nbrs {
                if w >= n {
                    return Err(MeshError::VertexOutOfRange(w));
                }
                if w == v {
                    return Err(MeshError::SelfLoop(v));
                }
                if !seen.insert(w) {
                    return Err(MeshError::DuplicateNeighbor(v, w));
                }
            }
        }
        for (v, nbrs) in rotation.iter().enumerate() {
            for &w in nbrs {
                if !rotation[w].contains(&v) {
                    return Err(MeshError::AsymmetricEdge(v, w));
                }
            }
        }
        let mut faces = Vec::new();
        let mut dart_face = HashMap::new();
        for a in 0..n {
            for &b in &rotation[a] {
                if dart_face.contains_key(&(a, b)) {
                    continue;
                }
                // Walk the face on the left of a->b.
                let mut walk = vec![a];
                let (mut x, mut y) = (a, b);
                loop {
                    walk.push(y);
                    let z = rot_before(&rotation[y], x);
                    x = y;
                    y = z;
                    if x == a && y == b {
                        walk.pop();
                        break;
                    }
                    if walk.len() > 3 {
                        return Err(MeshError::NonTriangularFace(a, b, walk.len()));
                    }
                }
                if walk.len() != 3 {
                    return Err(MeshError::NonTriangularFace(a, b, walk.len()));
                }
                let f = faces.len();
                let tri = [walk[0], walk[1], walk[2]];
                for k in 0..3 {
                    dart_face.insert((tri[k], tri[(k + 1) % 3]), f);
                }
                faces.push(tri);
            }
        }
        let edge_count = rotation.iter().map(Vec::len).sum::<usize>() / 2;
        let mesh = TriMesh { rotation, faces, dart_face, edge_count };
        if !mesh.is_connected() {
            return Err(MeshError::Disconnected);
        }
        Ok(mesh)
    }

    /// Builds a mesh from counterclockwise oriented triangles.
    pub fn from_faces(faces: &[[usize; 3]]) -> Result<TriMesh, MeshError> {
        if faces.is_empty() {
            return Err(MeshError::Empty);
        }
        let n = faces.iter().flatten().copied().max().unwrap() + 1;
        let mut darts: HashMap<(usize, usize), usize> = HashMap::new();
        let mut undirected: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for f in faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                if a == b {
                    return Err(MeshError::SelfLoop(a));
                }
                *undirected.entry((a.min(b), a.max(b))).or_default() += 1;
                if darts.insert((a, b), 0).is_some() {
                    return Err(MeshError::InconsistentOrientation(a, b));
                }
            }
        }
        for (&(a, b), &c) in &undirected {
            if c != 2 {
                return Err(MeshError::EdgeFaceCount(a, b, c));
            }
        }
        // Wedges at each corner: in face (a,b,c), c follows b around a.
        let mut wedges: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); n];
        for f in faces {
            for k in 0..3 {
                let (a, b, c) = (f[k], f[(k + 1) % 3], f[(k + 2) % 3]);
                wedges[a].insert(b, c);
            }
        }
        let mut rotation = Vec::with_capacity(n);
        for (v, w) in wedges.iter().enumerate() {
            let Some((&start, _)) = w.iter().next() else {
                return Err(MeshError::IsolatedVertex(v));
            };
            let mut cyc = vec![start];
            let mut cur = w[&start];
            while cur != start {
                cyc.push(cur);
                cur = *w.get(&cur).ok_or(MeshError::NonManifoldVertex(v))?;
                if cyc.len() > w.len() {
                    return Err(MeshError::NonManifoldVertex(v));
                }
            }
            if cyc.len() != w.len() {
                return Err(MeshError::NonManifoldVertex(v));
            }
            rotation.push(cyc);
        }
        TriMesh::from_rotation(rotation)
    }

    pub fn vertex_count(&self) -> usize {
        self.rotation.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count as i64 + self.faces.len() as i64
    }

    pub fn rotation(&self) -> &[Vec<usize>] {
        &self.rotation
    }

    /// Counterclockwise neighbors of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rotation[v].len()
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.dart_face.contains_key(&(a, b))
    }

    /// Face to the left of dart `a -> b`.
    pub fn face_left(&self, a: usize, b: usize) -> Option<usize> {
        self.dart_face.get(&(a, b)).copied()
    }

    /// Third vertex of the face left of `a -> b`.
    pub fn apex(&self, a: usize, b: usize) -> usize {
        rot_after(&self.rotation[a], b)
    }

    /// Neighbor following `b` counterclockwise around `a`.
    pub fn ccw_next(&self, a: usize, b: usize) -> usize {
        rot_after(&self.rotation[a], b)
    }

    /// Neighbor preceding `b` counterclockwise around `a`.
    pub fn ccw_prev(&self, a: usize, b: usize) -> usize {
        rot_before(&self.rotation[a], b)
    }

    /// Sorted undirected edges `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (u, nbrs) in self.rotation.iter().enumerate() {
            for &v in nbrs {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Vertices of degree below 6 with multiplicity `6 - degree`.
    pub fn irregular_vertices(&self) -> Vec<(usize, i64)> {
        (0..self.vertex_count())
            .filter(|&v| self.degree(v) < 6)
            .map(|v| (v, 6 - self.degree(v) as i64))
            .collect()
    }

    /// Signed defect `6 - degree`, used where degrees above six can occur.
    pub fn defect(&self, v: usize) -> i64 {
        6 - self.degree(v) as i64
    }

    pub fn bfs_distances(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &w in &self.rotation[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn graph_distance(&self, u: usize, v: usize) -> usize {
        self.bfs_distances(&[u])[v].expect("mesh is connected")
    }

    pub fn distance_to_set(&self, v: usize, set: &[usize]) -> Option<usize> {
        if set.is_empty() {
            return None;
        }
        self.bfs_distances(set)[v]
    }

    /// Closed neighborhood `N_i(v)`.
    pub fn neighborhood(&self, v: usize, i: usize) -> BTreeSet<usize> {
        self.bfs_distances(&[v])
            .iter()
            .enumerate()
            .filter(|(_, d)| matches!(d, Some(d) if *d <= i))
            .map(|(w, _)| w)
            .collect()
    }

    /// Vertices at exact distance `i` from `v`.
    pub fn sphere(&self, v: usize, i: usize) -> BTreeSet<usize> {
        self.bfs_distances(&[v])
            .iter()
            .enumerate()
            .filter(|(_, d)| **d == Some(i))
            .map(|(w, _)| w)
            .collect()
    }

    pub fn triangle_adjacency_graph(&self) -> TriangleAdjacency {
        let adjacency: Vec<[usize; 3]> = self
            .faces
            .iter()
            .map(|f| {
                let mut out = [0; 3];
                for k in 0..3 {
                    out[k] = self.dart_face[&(f[(k + 1) % 3], f[k])];
                }
                out
            })
            .collect();
        let mut seen = vec![false; adjacency.len()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(f) = stack.pop() {
            for &g in &adjacency[f] {
                if !seen[g] {
                    seen[g] = true;
                    count += 1;
                    stack.push(g);
                }
            }
        }
        let connected = count == adjacency.len();
        TriangleAdjacency { adjacency, connected }
    }

    fn is_connected(&self) -> bool {
        self.bfs_distances(&[0]).iter().all(Option::is_some)
    }

    /// Relabels vertices: new id of old vertex `v` is `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> TriMesh {
        let n = self.vertex_count();
        let mut rotation = vec![Vec::new(); n];
        for v in 0..n {
            rotation[perm[v]] = self.rotation[v].iter().map(|&w| perm[w]).collect();
        }
        TriMesh::from_rotation(rotation).expect("relabeling preserves validity")
    }

    pub fn to_doc(&self) -> MeshDoc {
        MeshDoc { vertices: self.vertex_count(), rotation: self.rotation.clone(), embedding: None }
    }
}

/// Triangle adjacency: `adjacency[f][k]` is the face across edge `k` of `f`.
#[derive(Debug, Clone)]
pub struct TriangleAdjacency {
    pub adjacency: Vec<[usize; 3]>,
    pub connected: bool,
}

pub(crate) fn rot_after(list: &[usize], x: usize) -> usize {
    let i = list.iter().position(|&y| y == x).expect("neighbor present in rotation");
    list[(i + 1) % list.len()]
}

pub(crate) fn rot_before(list: &[usize], x: usize) -> usize {
    let i = list.iter().position(|&y| y == x).expect("neighbor present in rotation");
    list[(i + list.len() - 1) % list.len()]
}

/// Directed simple cycle, indices read modulo its length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectedCycle {
    pub vertices: Vec<usize>,
}

impl DirectedCycle {
    pub fn new(mesh: &TriMesh, vertices: Vec<usize>) -> Result<DirectedCycle, MeshError> {
        if vertices.len() < 3 {
            return Err(MeshError::NotSimple(format!("length {}", vertices.len())));
        }
        let mut seen = BTreeSet::new();
        for &v in &vertices {
            if v >= mesh.vertex_count() {
                return Err(MeshError::VertexOutOfRange(v));
            }
            if !seen.insert(v) {
                return Err(MeshError::NotSimple(format!("vertex {v} repeats")));
            }
        }
        let c = DirectedCycle { vertices };
        for (a, b) in c.darts() {
            if !mesh.is_edge(a, b) {
                return Err(MeshError::NotAnEdge(a, b));
            }
        }
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn at(&self, i: isize) -> usize {
        let n = self.vertices.len() as isize;
        self.vertices[i.rem_euclid(n) as usize]
    }

    pub fn darts(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn reversed(&self) -> DirectedCycle {
        let mut v = self.vertices.clone();
        v.reverse();
        DirectedCycle { vertices: v }
    }

    /// Boundary 3-cycle of a face.
    pub fn of_face(face: [usize; 3]) -> DirectedCycle {
        DirectedCycle { vertices: face.to_vec() }
    }
}

/// Census of the left side of a cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub triangles: BTreeSet<usize>,
    pub interior_vertices: BTreeSet<usize>,
    pub interior_edges: BTreeSet<(usize, usize)>,
}

/// Flood fills the triangles on the left of `c` without crossing it.
pub fn interior_region(mesh: &TriMesh, c: &DirectedCycle) -> Result<Region, MeshError> {
    let cycle_edges: BTreeSet<(usize, usize)> =
        c.darts().map(|(a, b)| (a.min(b), a.max(b))).collect();
    let cycle_vertices: BTreeSet<usize> = c.vertices.iter().copied().collect();
    let right: BTreeSet<usize> = c.darts().map(|(a, b)| mesh.dart_face[&(b, a)]).collect();
    let seed = mesh.dart_face[&(c.at(0), c.at(1))];
    let mut triangles = BTreeSet::new();
    triangles.insert(seed);
    let mut stack = vec![seed];
    while let Some(f) = stack.pop() {
        let tri = mesh.faces[f];
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            if cycle_edges.contains(&(a.min(b), a.max(b))) {
                continue;
            }
            let g = mesh.dart_face[&(b, a)];
            if triangles.insert(g) {
                stack.push(g);
            }
        }
    }
    if triangles.iter().any(|f| right.contains(f)) {
        return Err(MeshError::NonSeparating);
    }
    let mut interior_vertices = BTreeSet::new();
    let mut interior_edges = BTreeSet::new();
    for &f in &triangles {
        let tri = mesh.faces[f];
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            if !cycle_vertices.contains(&a) {
                interior_vertices.insert(a);
            }
            let e = (a.min(b), a.max(b));
            if !cycle_edges.contains(&e) {
                interior_edges.insert(e);
            }
        }
    }
    Ok(Region { triangles, interior_vertices, interior_edges })
}

/// Serialized mesh document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshDoc {
    pub vertices: usize,
    pub rotation: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<EmbeddingDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingDoc {
    pub radius: f64,
    pub positions: Vec<[f64; 3]>,
}

impl MeshDoc {
    pub fn to_mesh(&self) -> Result<TriMesh, MeshError> {
        if self.rotation.len() != self.vertices {
            return Err(MeshError::InvalidParameter(format!(
                "vertices = {} but rotation has {} entries",
                self.vertices,
                self.rotation.len()
            )));
        }
        TriMesh::from_rotation(self.rotation.clone())
    }
}

pub fn tetrahedron() -> TriMesh {
    TriMesh::from_faces(&[[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]]).unwrap()
}

/// Octahedron with poles 0 (north) and 5 (south) and equator 1,2,3,4.
pub fn octahedron() -> TriMesh {
    let mut faces = Vec::new();
    for i in 0..4 {
        let a = 1 + i;
        let b = 1 + (i + 1) % 4;
        faces.push([0, a, b]);
        faces.push([5, b, a]);
    }
    TriMesh::from_faces(&faces).unwrap()
}

/// Icosahedron faces, counterclockwise seen from outside, for the vertex
/// positions returned by [`icosahedron_positions`].
pub fn icosahedron_faces() -> Vec<[usize; 3]> {
    vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ]
}

pub fn icosahedron_positions() -> Vec<[f64; 3]> {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, t, 0.0], [1.0, t, 0.0], [-1.0, -t, 0.0], [1.0, -t, 0.0],
        [0.0, -1.0, t], [0.0, 1.0, t], [0.0, -1.0, -t], [0.0, 1.0, -t],
        [t, 0.0, -1.0], [t, 0.0, 1.0], [-t, 0.0, -1.0], [-t, 0.0, 1.0],
    ];
    raw.iter()
        .map(|p| {
            let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            [p[0] / n, p[1] / n, p[2] / n]
        })
        .collect()
}

pub fn icosahedron() -> TriMesh {
    TriMesh::from_faces(&icosahedron_faces()).unwrap()
}

/// Axial coordinates of flat-torus vertex ids.
pub fn torus_coords(n1: usize, id: usize) -> (usize, usize) {
    (id % n1, id / n1)
}

/// Triangular grid on the flat torus with periods `(n1, 0)` and `(0, n2)`
/// in axial coordinates. Vertex `(a, b)` has id `a + n1 * b`.
pub fn flat_torus(n1: usize, n2: usize) -> Result<TriMesh, MeshError> {
    if n1 < 3 || n2 < 3 {
        return Err(MeshError::InvalidParameter("torus periods must be at least 3".into()));
    }
    TriMesh::from_faces(&flat_torus_faces(n1, n2, 0))
}

fn flat_torus_faces(n1: usize, n2: usize, offset: usize) -> Vec<[usize; 3]> {
    let id = |a: usize, b: usize| offset + (a % n1) + n1 * (b % n2);
    let mut faces = Vec::new();
    for b in 0..n2 {
        for a in 0..n1 {
            faces.push([id(a, b), id(a + 1, b), id(a, b + 1)]);
            faces.push([id(a + 1, b), id(a + 1, b + 1), id(a, b + 1)]);
        }
    }
    faces
}

/// Genus-two surface: two flat tori joined by a triangular tube.
/// Vertex count is `n1*n2 + m1*m2`.
pub fn double_torus(n1: usize, n2: usize, m1: usize, m2: usize) -> Result<TriMesh, MeshError> {
    if n1.min(n2).min(m1).min(m2) < 3 {
        return Err(MeshError::InvalidParameter("torus periods must be at least 3".into()));
    }
    let mut first = flat_torus_faces(n1, n2, 0);
    let mut second = flat_torus_faces(m1, m2, n1 * n2);
    let [a, b, c] = first.remove(0);
    let [a2, b2, c2] = second.remove(0);
    let mut faces = first;
    faces.extend(second);
    // Tube between the two holes, second hole glued with reversed orientation.
    faces.extend([
        [a, b, c2], [a, c2, a2],
        [b, c, b2], [b, b2, c2],
        [c, a, a2], [c, a2, b2],
    ]);
    TriMesh::from_faces(&faces)
}
