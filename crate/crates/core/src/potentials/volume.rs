use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use super::SingularCorrection;
use crate::algebra::{FieldValue, GridField, Quaternion, QuaternionField, ScalarField, VectorField};
use crate::geometry::VoxelGrid;
use crate::Vec3;

const INV_4PI: f64 = 1.0 / (4.0 * PI);

/// Components of the Teodorescu transform of `g₀ + g`:
/// `T[g₀ + g] = t0 + t1 + t2` with `t0 = ∫E(y−x)·g`, `t1 = −∫g₀E(y−x)` and
/// `t2 = −∫E(y−x)×g`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TComponents {
    pub t0: f64,
    pub t1: Vec3,
    pub t2: Vec3,
}

impl TComponents {
    pub fn quaternion(&self) -> Quaternion {
        Quaternion::new(self.t0, self.t1 + self.t2)
    }
}

/// Radius of the ball with the volume of one voxel.
pub fn equivalent_radius(h: f64) -> f64 {
    (3.0 / (4.0 * PI)).cbrt() * h
}

/// Cauchy-kernel sums treat each source voxel as a point source, except
/// near the evaluation point: `ExcludeCell` drops voxels closer than `h/2`,
/// `EquivalentBall` replaces every voxel by a uniform ball of equal volume,
/// whose field coincides with the point-source field outside the ball and is
/// linear inside. Both agree at voxel centers.
#[derive(Debug, Clone, Copy)]
pub(crate) struct KernelRule {
    cutoff2: f64,
    ball: bool,
    inv_ball_cube: f64,
}

impl KernelRule {
    pub(crate) fn new(h: f64, correction: SingularCorrection) -> Self {
        let a = equivalent_radius(h);
        match correction {
            SingularCorrection::ExcludeCell => Self {
                cutoff2: 0.25 * h * h,
                ball: false,
                inv_ball_cube: 0.0,
            },
            SingularCorrection::EquivalentBall => Self {
                cutoff2: a * a,
                ball: true,
                inv_ball_cube: 1.0 / (a * a * a),
            },
        }
    }

    /// `E(d)` for `d = y − x`, or `None` when the voxel is dropped.
    #[inline(always)]
    pub(crate) fn cauchy(&self, d: Vec3) -> Option<Vec3> {
        let r2 = d.norm_squared();
        if r2 < self.cutoff2 {
            if self.ball {
                Some(d * (-INV_4PI * self.inv_ball_cube))
            } else {
                None
            }
        } else {
            Some(d * (-INV_4PI / (r2 * r2.sqrt())))
        }
    }
}

#[inline(always)]
fn accumulate<const SCALAR: bool, const VECTOR: bool>(
    grid: &VoxelGrid,
    g0: &[f64],
    g: &[Vec3],
    x: Vec3,
    rule: KernelRule,
) -> TComponents {
    let mut t0 = 0.0;
    let mut t1 = Vec3::zeros();
    let mut t2 = Vec3::zeros();
    for (j, y) in grid.centers().iter().enumerate() {
        // E(y − x)
        let Some(e) = rule.cauchy(y - x) else {
            continue;
        };
        if VECTOR {
            t0 += e.dot(&g[j]);
            t2 -= e.cross(&g[j]);
        }
        if SCALAR {
            t1 -= e * g0[j];
        }
    }
    let w = grid.cell_volume();
    TComponents {
        t0: t0 * w,
        t1: t1 * w,
        t2: t2 * w,
    }
}

/// All Teodorescu components at `x` in a single pass over the source voxels.
pub fn t_components(
    g0: Option<&ScalarField>,
    g: Option<&VectorField>,
    x: Vec3,
    correction: SingularCorrection,
) -> TComponents {
    let rule = |grid: &VoxelGrid| KernelRule::new(grid.spacing(), correction);
    match (g0, g) {
        (Some(s), Some(v)) => {
            assert!(Arc::ptr_eq(s.grid(), v.grid()), "fields on different grids");
            accumulate::<true, true>(s.grid(), s.values(), v.values(), x, rule(s.grid()))
        }
        (Some(s), None) => accumulate::<true, false>(s.grid(), s.values(), &[], x, rule(s.grid())),
        (None, Some(v)) => accumulate::<false, true>(v.grid(), &[], v.values(), x, rule(v.grid())),
        (None, None) => TComponents::default(),
    }
}

/// `t0(g, x) = ∫_Ω E(y−x)·g(y) dy`.
pub fn t0(g: &VectorField, x: Vec3, correction: SingularCorrection) -> f64 {
    t_components(None, Some(g), x, correction).t0
}

/// `t1(g₀, x) = −∫_Ω g₀(y) E(y−x) dy`.
pub fn t1(g0: &ScalarField, x: Vec3, correction: SingularCorrection) -> Vec3 {
    t_components(Some(g0), None, x, correction).t1
}

/// `t2(g, x) = −∫_Ω E(y−x) × g(y) dy`.
pub fn t2(g: &VectorField, x: Vec3, correction: SingularCorrection) -> Vec3 {
    t_components(None, Some(g), x, correction).t2
}

/// Teodorescu transform `T_Ω[w](x) = −∫_Ω E(y−x) w(y) dy`.
pub fn teodorescu(w: &QuaternionField, x: Vec3, correction: SingularCorrection) -> Quaternion {
    let s = w.scalar_part();
    let v = w.vector_part();
    t_components(Some(&s), Some(&v), x, correction).quaternion()
}

/// Teodorescu components at every voxel center.
pub fn t_components_on_grid(
    g0: Option<&ScalarField>,
    g: Option<&VectorField>,
    correction: SingularCorrection,
) -> Vec<TComponents> {
    let grid = g0
        .map(|f| f.grid())
        .or(g.map(|f| f.grid()))
        .expect("at least one input field");
    grid.centers()
        .par_iter()
        .map(|x| t_components(g0, g, *x, correction))
        .collect()
}

pub fn t0_on_grid(g: &VectorField, correction: SingularCorrection) -> ScalarField {
    let c = t_components_on_grid(None, Some(g), correction);
    GridField::new(g.grid().clone(), c.iter().map(|c| c.t0).collect()).expect("grid size")
}

pub fn t1_on_grid(g0: &ScalarField, correction: SingularCorrection) -> VectorField {
    let c = t_components_on_grid(Some(g0), None, correction);
    GridField::new(g0.grid().clone(), c.iter().map(|c| c.t1).collect()).expect("grid size")
}

pub fn t2_on_grid(g: &VectorField, correction: SingularCorrection) -> VectorField {
    let c = t_components_on_grid(None, Some(g), correction);
    GridField::new(g.grid().clone(), c.iter().map(|c| c.t2).collect()).expect("grid size")
}

pub fn teodorescu_on_grid(w: &QuaternionField, correction: SingularCorrection) -> QuaternionField {
    let s = w.scalar_part();
    let v = w.vector_part();
    let c = t_components_on_grid(Some(&s), Some(&v), correction);
    GridField::new(w.grid().clone(), c.iter().map(|c| c.quaternion()).collect())
        .expect("grid size")
}

/// Newton potential `L[u](x) = −(1/4π) ∫_Ω u(y)/|x−y| dy`.
pub fn newton_potential<T: FieldValue>(
    u: &GridField<T>,
    x: Vec3,
    correction: SingularCorrection,
) -> T {
    let grid = u.grid();
    let h = grid.spacing();
    let w = grid.cell_volume();
    let exclusion = 0.25 * h * h;
    let a2 = equivalent_radius(h).powi(2);
    let mut acc = T::zero();
    for (y, v) in grid.centers().iter().zip(u.values()) {
        let r2 = (y - x).norm_squared();
        if r2 < exclusion {
            if correction == SingularCorrection::EquivalentBall {
                acc = acc + *v * (-(3.0 * a2 - r2) / 6.0);
            }
            continue;
        }
        acc = acc + *v * (-INV_4PI * w / r2.sqrt());
    }
    acc
}

pub fn newton_potential_on_grid<T: FieldValue>(
    u: &GridField<T>,
    correction: SingularCorrection,
) -> GridField<T> {
    let values = u
        .grid()
        .centers()
        .par_iter()
        .map(|x| newton_potential(u, *x, correction))
        .collect();
    GridField::new(u.grid().clone(), values).expect("grid size")
}
