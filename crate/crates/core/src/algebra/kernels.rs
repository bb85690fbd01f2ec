//! Fundamental solutions used by the volume and boundary operators.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::Vec3;

/// Cauchy kernel `E(x) = −x / (4π|x|³)`, the fundamental solution of `D`.
pub fn cauchy_kernel(x: Vec3) -> Result<Vec3> {
    let r2 = x.norm_squared();
    if r2 == 0.0 || !r2.is_finite() {
        return Err(Error::Domain(format!("Cauchy kernel evaluated at {x:?}")));
    }
    Ok(cauchy_kernel_unchecked(x, r2))
}

/// Newton kernel `−1 / (4π|x|)`, the fundamental solution of the Laplacian.
pub fn newton_kernel(x: Vec3) -> Result<f64> {
    let r = x.norm();
    if r == 0.0 || !r.is_finite() {
        return Err(Error::Domain(format!("Newton kernel evaluated at {x:?}")));
    }
    Ok(-1.0 / (4.0 * PI * r))
}

#[inline(always)]
pub(crate) fn cauchy_kernel_unchecked(x: Vec3, r2: f64) -> Vec3 {
    x * (-1.0 / (4.0 * PI * r2 * r2.sqrt()))
}
