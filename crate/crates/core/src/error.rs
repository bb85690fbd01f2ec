use thiserror::Error;

use crate::Vec3;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A kernel or geometric routine was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("fields are attached to different voxel grids")]
    GridMismatch,

    #[error("grid has no interior voxels")]
    EmptyGrid,

    #[error("{what}: got {got} samples, expected {expected}")]
    CountMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    /// Input data violates a solvability condition (solenoidality,
    /// Neumann compatibility, vanishing normal trace, ...).
    #[error("compatibility violated: {what} (measured {measured:.3e}, tolerance {tolerance:.3e})")]
    Compatibility {
        what: &'static str,
        measured: f64,
        tolerance: f64,
    },

    #[error("evaluation point {point:?} is within {distance:.3e} of the boundary (near-singular)")]
    NearSingular { point: Vec3, distance: f64 },

    #[error("point {point:?} lies outside the sampled domain")]
    OutsideDomain { point: Vec3 },

    #[error("least-squares system is rank deficient (condition estimate {condition:.3e})")]
    RankDeficient { condition: f64 },

    #[error("conjugate gradients stalled after {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("alpha0 = {alpha0} is not admissible (limit {limit:.4e})")]
    NotAdmissible { alpha0: f64, limit: f64 },

    #[error("series term {term} grew by ratio {ratio:.3e}; Neumann series does not contract")]
    NonGeometricDecay { term: usize, ratio: f64 },
}

impl Error {
    /// True for errors caused by input data failing a solvability condition
    /// rather than by the numerics.
    pub fn is_compatibility(&self) -> bool {
        matches!(
            self,
            Error::Compatibility { .. } | Error::NotAdmissible { .. }
        )
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
