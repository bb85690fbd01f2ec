//! Star-shaped domains, boundary meshes and voxel grids.

pub mod domain;
pub mod mesh;
pub mod voxel;

pub use domain::{build_ball, build_box, build_radial, DomainShape, RadialProfile, StarDomain};
pub use mesh::BoundaryMesh;
pub use voxel::{voxelize, voxelize_shared, VoxelGrid};
