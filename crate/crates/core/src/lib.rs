//! Quaternionic integral operators on voxelized star-shaped domains.
//!
//! The crate samples scalar, vector and quaternion fields on a regular
//! lattice of interior cells and evaluates the Teodorescu transform, the
//! Newton potential, the Cauchy and single-layer boundary operators and the
//! monogenic completion built from them. On top of these sit right inverses
//! of `curl` (free, Neumann- and Dirichlet-corrected), general div-curl
//! solutions, Beltrami fields by Neumann series, and solvers for the Vekua
//! type operators `D ± α` that cover the static Maxwell system in
//! inhomogeneous media.

pub mod algebra;
pub mod error;
pub mod geometry;
pub mod beltrami;
pub mod bvp;
pub mod divcurl;
pub mod potentials;
pub mod report;
pub mod testfields;
pub mod tolerances;
pub mod vekua;

pub type Vec3 = nalgebra::Vector3<f64>;

pub use algebra::{GridField, Quaternion, QuaternionField, ScalarField, VectorField};
pub use error::{Error, Result};
pub use geometry::{StarDomain, VoxelGrid};
