use std::f64::consts::PI;

use gauss_quad::GaussLegendre;

use super::volume::KernelRule;
use super::{SingularCorrection, VolumeOperatorConfig};
use crate::algebra::{FieldValue, VectorField};
use crate::error::{Error, Result};
use crate::Vec3;

/// Gauss–Legendre rule mapped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RayRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl RayRule {
    pub fn gauss_legendre(n: usize) -> Result<Self> {
        let rule = GaussLegendre::new(n)
            .map_err(|_| Error::invalid("ray_nodes", format!("need at least 2 nodes, got {n}")))?;
        let (nodes, weights) = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .unzip();
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<T: FieldValue>(&self, mut f: impl FnMut(f64) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&t, &w)| acc + f(t) * w)
    }

    pub fn try_integrate<T: FieldValue>(&self, mut f: impl FnMut(f64) -> Result<T>) -> Result<T> {
        let mut acc = T::zero();
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(t)? * w;
        }
        Ok(acc)
    }
}

/// Monogenic completion
/// `U[u₀](x) = ∫₀¹ t (x−c) × ∇u₀(c + t(x−c)) dt` about the star center `c`.
pub fn monogenic_completion(
    grad_u0: impl Fn(Vec3) -> Result<Vec3>,
    x: Vec3,
    center: Vec3,
    rule: &RayRule,
) -> Result<Vec3> {
    let r = x - center;
    rule.try_integrate(|t| Ok(r.cross(&grad_u0(center + r * t)?) * t))
}

/// `∇t0(g, ·)` at `x` by central differences of step
/// `δ = gradient_step_fraction · h` along each axis. With
/// [`SingularCorrection::ExcludeCell`] the set of dropped voxels is the one
/// for the base point, so all six shifted evaluations share one quadrature.
pub fn grad_t0(g: &VectorField, x: Vec3, cfg: &VolumeOperatorConfig) -> Result<Vec3> {
    cfg.validate()?;
    let grid = g.grid();
    let h = grid.spacing();
    let delta = cfg.gradient_step_fraction * h;
    let domain = grid.domain();
    let mut shifted = [Vec3::zeros(); 6];
    for axis in 0..3 {
        for (s, sign) in [-1.0, 1.0].into_iter().enumerate() {
            let mut p = x;
            p[axis] += sign * delta;
            if !domain.inside(p) {
                return Err(Error::OutsideDomain { point: p });
            }
            shifted[2 * axis + s] = p;
        }
    }
    let rule = KernelRule::new(h, cfg.singular_correction);
    let exclusion = 0.25 * h * h;
    let exclude = cfg.singular_correction == SingularCorrection::ExcludeCell;
    let mut sums = [0.0; 6];
    for (y, gv) in grid.centers().iter().zip(g.values()) {
        if exclude && (y - x).norm_squared() < exclusion {
            continue;
        }
        for (sum, p) in sums.iter_mut().zip(&shifted) {
            let d = y - p;
            let e = if exclude {
                let r2 = d.norm_squared();
                -d / (4.0 * PI * r2 * r2.sqrt())
            } else {
                rule.cauchy(d).expect("ball rule keeps every voxel")
            };
            *sum += e.dot(gv);
        }
    }
    let w = grid.cell_volume();
    Ok(Vec3::new(
        (sums[1] - sums[0]) * w / (2.0 * delta),
        (sums[3] - sums[2]) * w / (2.0 * delta),
        (sums[5] - sums[4]) * w / (2.0 * delta),
    ))
}
