//! Calibrated tolerances shared by the solvers, the diagnostics and the
//! test suites.

/// Constant `C` of `tol_op = C · (h + 1/N_t)`.
pub const TOL_OP_CONSTANT: f64 = 0.5;

/// Largest `‖fd_div g‖₂ / ‖∇g‖₂` accepted as solenoidal, and the largest
/// relative mean of a Neumann datum.
pub const TOL_COMPAT: f64 = 5e-2;

/// Relative size of boundary traces accepted by the boundary corrections.
pub const TOL_BVP: f64 = 1e-2;

/// Relative Beltrami residual `‖curl w − α₀w‖₂ / ‖w‖₂`.
pub const TOL_BELTRAMI: f64 = 5e-2;

/// Lower bound for coefficients required to be positive.
pub const TOL_POS: f64 = 1e-12;

/// Operator tolerance for grid spacing `h` and `ray_nodes` ray nodes.
pub fn tol_op(h: f64, ray_nodes: usize) -> f64 {
    TOL_OP_CONSTANT * (h + 1.0 / ray_nodes as f64)
}

/// Residual tolerance of the Vekua solvers; equal to [`tol_op`].
pub fn tol_vekua(h: f64, ray_nodes: usize) -> f64 {
    tol_op(h, ray_nodes)
}
