//! Combinatorial and geometric machinery for nice colorings of triangulated
//! spheres and nice tilings of surfaces.

pub mod coloring;
pub mod curvature;
pub mod geometry;
pub mod isbell;
pub mod mesh;
pub mod tilings;

pub use mesh::{DirectedCycle, MeshDoc, MeshError, Region, TriMesh};
