//! Quaternion arithmetic, fundamental solutions and finite differences.

pub mod fd;
pub mod field;
pub mod kernels;
pub mod poly;
pub mod quaternion;

pub use fd::{fd_curl, fd_div, fd_grad, fd_laplacian, moisil_teodorescu};
pub use field::{relative_error_on, FieldValue, GridField, QuaternionField, ScalarField, VectorField};
pub use kernels::{cauchy_kernel, newton_kernel};
pub use quaternion::{quat_mul, Quaternion};
