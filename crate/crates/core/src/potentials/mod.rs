//! Volume and boundary integral operators: Newton potential, Teodorescu
//! transform and its components, Cauchy operator, single-layer potential
//! and the monogenic completion.

pub mod boundary;
pub mod completion;
pub mod volume;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use boundary::{cauchy_operator, single_layer};
pub use completion::{grad_t0, monogenic_completion, RayRule};
pub use volume::{
    equivalent_radius, newton_potential, newton_potential_on_grid, t0, t0_on_grid, t1, t1_on_grid,
    t2, t2_on_grid,
    t_components, t_components_on_grid, teodorescu, teodorescu_on_grid, TComponents,
};

/// Treatment of source voxels next to the evaluation point in volume sums.
///
/// At voxel centers both rules give the same Cauchy-kernel sums (the odd
/// kernel integrates to zero over the centered cell). Away from centers
/// `EquivalentBall` keeps the sums continuous in the evaluation point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularCorrection {
    /// Drop source voxels whose centers are closer than `h/2`.
    ExcludeCell,
    /// Treat every voxel as a uniform ball of equal volume; inside that ball
    /// the analytic potential and field of the ball are used.
    EquivalentBall,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeOperatorConfig {
    pub singular_correction: SingularCorrection,
    /// Finite-difference step for `∇t0` as a fraction of the grid spacing.
    /// At 0.5 the two evaluation points are one lattice period apart, which
    /// cancels the period-`h` error of the voxel sums.
    pub gradient_step_fraction: f64,
    /// Gauss–Legendre nodes on the ray `[0, 1]`.
    pub ray_nodes: usize,
}

impl Default for VolumeOperatorConfig {
    fn default() -> Self {
        Self {
            singular_correction: SingularCorrection::EquivalentBall,
            gradient_step_fraction: 0.5,
            ray_nodes: 32,
        }
    }
}

impl VolumeOperatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gradient_step_fraction > 0.0 && self.gradient_step_fraction <= 0.5) {
            return Err(Error::invalid(
                "gradient_step_fraction",
                format!("must lie in (0, 0.5], got {}", self.gradient_step_fraction),
            ));
        }
        if self.ray_nodes < 8 {
            return Err(Error::invalid(
                "ray_nodes",
                format!("must be at least 8, got {}", self.ray_nodes),
            ));
        }
        Ok(())
    }

    pub fn ray_rule(&self) -> Result<RayRule> {
        self.validate()?;
        RayRule::gauss_legendre(self.ray_nodes)
    }
}
