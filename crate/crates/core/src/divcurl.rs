//! The general div-curl solution, the Helmholtz-type potentials, the right
//! inverse of `curl` and the double-curl inverse.
//!
//! Grid-to-grid evaluation shares one pass over the source voxels for `t0`
//! and `t2`. `∇t0` is taken by lattice differences of the sampled `t0` and
//! interpolated trilinearly at the ray nodes of the monogenic completion.

use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::poly::Poly;
use crate::algebra::{fd_div, GridField, ScalarField, VectorField};
use crate::error::{Error, Result};
use crate::geometry::VoxelGrid;
use crate::potentials::{
    newton_potential, newton_potential_on_grid, t_components, t_components_on_grid, RayRule,
    SingularCorrection, VolumeOperatorConfig,
};
use crate::tolerances;
use crate::Vec3;

/// Harmonic scalar `h` whose gradient is the free term of the div-curl
/// solution.
pub trait HarmonicGauge: Send + Sync {
    fn value(&self, x: Vec3) -> f64;
    fn gradient(&self, x: Vec3) -> Vec3;
}

impl HarmonicGauge for Poly {
    fn value(&self, x: Vec3) -> f64 {
        self.eval(x)
    }

    fn gradient(&self, x: Vec3) -> Vec3 {
        Poly::gradient(self, x)
    }
}

/// `‖fd_div g‖₂ / (‖∇g‖₂ + ‖g‖₂/diam Ω)` over the accuracy region of the
/// grid, with `∇g` the finite-difference Jacobian in the Frobenius norm
/// (the two terms of the denominator are added in quadrature). The ratio
/// is invariant under rescaling of `g` and of the domain.
pub fn solenoidal_defect(g: &VectorField) -> f64 {
    let div = fd_div(g);
    derivative_defect(g, |i| div.get(i).powi(2))
}

/// `Σ residual² / Σ (|∇g|² + |g|²/diam²)` over the accuracy region, square
/// rooted; zero for a vanishing field.
pub(crate) fn derivative_defect(g: &VectorField, residual_sq: impl Fn(usize) -> f64) -> f64 {
    let grid = g.grid();
    let region = grid.accuracy_region();
    let inv_diam2 = grid.domain().diameter().powi(-2);
    let (num, den) = region.iter().fold((0.0, 0.0), |(n, d), &i| {
        let jac = g.local_gradient(i);
        let fro: f64 = jac.iter().map(|v| v.norm_squared()).sum();
        (n + residual_sq(i), d + fro + g.get(i).norm_squared() * inv_diam2)
    });
    if den == 0.0 {
        return 0.0;
    }
    (num / den).sqrt()
}

pub fn check_solenoidal(g: &VectorField, tolerance: f64) -> Result<f64> {
    let measured = solenoidal_defect(g);
    if measured > tolerance {
        return Err(Error::Compatibility {
            what: "prescribed curl is not solenoidal",
            measured,
            tolerance,
        });
    }
    Ok(measured)
}

/// Lattice gradient of a sampled scalar: centered differences where both
/// neighbors exist, second-order one-sided differences where two
/// consecutive neighbors exist on one side, first-order otherwise.
pub fn lattice_gradient(f: &ScalarField) -> VectorField {
    let grid = f.grid().clone();
    let h = grid.spacing();
    let v = f.values();
    let values = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let mut g = Vec3::zeros();
            for axis in 0..3 {
                let p = grid.neighbor(idx, axis, 1);
                let m = grid.neighbor(idx, axis, -1);
                g[axis] = match (m, p) {
                    (Some(m), Some(p)) => (v[p] - v[m]) / (2.0 * h),
                    (None, Some(p)) => match grid.neighbor(p, axis, 1) {
                        Some(pp) => (-3.0 * v[idx] + 4.0 * v[p] - v[pp]) / (2.0 * h),
                        None => (v[p] - v[idx]) / h,
                    },
                    (Some(m), None) => match grid.neighbor(m, axis, -1) {
                        Some(mm) => (3.0 * v[idx] - 4.0 * v[m] + v[mm]) / (2.0 * h),
                        None => (v[idx] - v[m]) / h,
                    },
                    (None, None) => 0.0,
                };
            }
            g
        })
        .collect();
    GridField::new(grid, values).expect("grid size")
}

/// Right inverse of `curl`,
/// `R_Ω[g](x) = t2(g, x) − U_Ω[t0(g, ·)](x)`.
#[derive(Debug, Clone)]
pub struct RightInverse {
    g: VectorField,
    t0: ScalarField,
    t2: VectorField,
    grad_t0: VectorField,
    rule: RayRule,
    center: Vec3,
    correction: SingularCorrection,
}

impl RightInverse {
    /// Precomputes `t0`, `t2` and `∇t0` on the grid after checking that `g`
    /// is solenoidal.
    pub fn new(g: &VectorField, cfg: &VolumeOperatorConfig) -> Result<Self> {
        check_solenoidal(g, tolerances::TOL_COMPAT)?;
        Self::unchecked(g, cfg)
    }

    /// As [`RightInverse::new`] without the compatibility check.
    pub fn unchecked(g: &VectorField, cfg: &VolumeOperatorConfig) -> Result<Self> {
        let rule = cfg.ray_rule()?;
        let grid = g.grid().clone();
        if grid.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let comps = t_components_on_grid(None, Some(g), cfg.singular_correction);
        let t0 = GridField::new(grid.clone(), comps.iter().map(|c| c.t0).collect())?;
        let t2 = GridField::new(grid.clone(), comps.iter().map(|c| c.t2).collect())?;
        let grad_t0 = lattice_gradient(&t0);
        Ok(Self {
            g: g.clone(),
            t0,
            t2,
            grad_t0,
            rule,
            center: grid.domain().center(),
            correction: cfg.singular_correction,
        })
    }

    pub fn grid(&self) -> &Arc<VoxelGrid> {
        self.g.grid()
    }

    pub fn source(&self) -> &VectorField {
        &self.g
    }

    pub fn t0_field(&self) -> &ScalarField {
        &self.t0
    }

    pub fn t2_field(&self) -> &VectorField {
        &self.t2
    }

    pub fn grad_t0_field(&self) -> &VectorField {
        &self.grad_t0
    }

    pub fn ray_rule(&self) -> &RayRule {
        &self.rule
    }

    /// `U_Ω[t0](x) = ∫₀¹ t (x−c) × ∇t0(c + t(x−c)) dt`.
    pub fn completion(&self, x: Vec3) -> Vec3 {
        let r = x - self.center;
        self.rule
            .integrate(|t| r.cross(&self.grad_t0.sample(self.center + r * t)) * t)
    }

    /// `∫₀¹ (t|x−c|²/2) ∇t0(c + t(x−c)) dt`, the ray term of the vector
    /// potential.
    pub fn ray_potential(&self, x: Vec3) -> Vec3 {
        let r = x - self.center;
        let r2 = r.norm_squared();
        self.rule
            .integrate(|t| self.grad_t0.sample(self.center + r * t) * (0.5 * t * r2))
    }

    /// `R_Ω[g](x)` at an arbitrary point.
    pub fn at(&self, x: Vec3) -> Vec3 {
        t_components(None, Some(&self.g), x, self.correction).t2 - self.completion(x)
    }

    /// `R_Ω[g]` at every voxel center.
    pub fn on_grid(&self) -> VectorField {
        let grid = self.grid().clone();
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| self.t2.get(i) - self.completion(grid.center(i)))
            .collect();
        GridField::new(grid, values).expect("grid size")
    }
}

/// `R_Ω[g](x)` at a single point.
pub fn right_inverse_curl(g: &VectorField, x: Vec3, cfg: &VolumeOperatorConfig) -> Result<Vec3> {
    Ok(RightInverse::new(g, cfg)?.at(x))
}

/// `R_Ω[g]` at every voxel center.
pub fn right_inverse_curl_on_grid(g: &VectorField, cfg: &VolumeOperatorConfig) -> Result<VectorField> {
    Ok(RightInverse::new(g, cfg)?.on_grid())
}

/// Data of the system `div w = g₀`, `curl w = g`, with an optional harmonic
/// gauge `h` selecting `w + ∇h` among the solutions.
#[derive(Clone, Default)]
pub struct DivCurlData {
    pub g0: Option<ScalarField>,
    pub g: Option<VectorField>,
    pub gauge: Option<Arc<dyn HarmonicGauge>>,
}

impl DivCurlData {
    pub fn new(g0: Option<ScalarField>, g: Option<VectorField>) -> Self {
        Self { g0, g, gauge: None }
    }

    pub fn with_gauge(mut self, gauge: Arc<dyn HarmonicGauge>) -> Self {
        self.gauge = Some(gauge);
        self
    }

    fn grid(&self) -> Result<&Arc<VoxelGrid>> {
        match (&self.g0, &self.g) {
            (Some(a), Some(b)) => {
                a.check_same_grid(b)?;
                Ok(a.grid())
            }
            (Some(a), None) => Ok(a.grid()),
            (None, Some(b)) => Ok(b.grid()),
            (None, None) => Err(Error::invalid("data", "neither g0 nor g is given")),
        }
    }
}

/// Solution `w = −t1(g₀) + R_Ω[g] + ∇h` of the div-curl system.
pub struct DivCurlSolution {
    grid: Arc<VoxelGrid>,
    g0: Option<ScalarField>,
    t1: Option<VectorField>,
    inverse: Option<RightInverse>,
    gauge: Option<Arc<dyn HarmonicGauge>>,
    correction: SingularCorrection,
}

pub fn solve_div_curl(data: &DivCurlData, cfg: &VolumeOperatorConfig) -> Result<DivCurlSolution> {
    cfg.validate()?;
    let grid = data.grid()?.clone();
    let inverse = data
        .g
        .as_ref()
        .map(|g| RightInverse::new(g, cfg))
        .transpose()?;
    let t1 = data.g0.as_ref().map(|g0| {
        let c = t_components_on_grid(Some(g0), None, cfg.singular_correction);
        GridField::new(grid.clone(), c.iter().map(|c| c.t1).collect()).expect("grid size")
    });
    Ok(DivCurlSolution {
        grid,
        g0: data.g0.clone(),
        t1,
        inverse,
        gauge: data.gauge.clone(),
        correction: cfg.singular_correction,
    })
}

impl DivCurlSolution {
    pub fn grid(&self) -> &Arc<VoxelGrid> {
        &self.grid
    }

    pub fn right_inverse(&self) -> Option<&RightInverse> {
        self.inverse.as_ref()
    }

    pub fn at(&self, x: Vec3) -> Vec3 {
        let mut w = Vec3::zeros();
        if let Some(g0) = &self.g0 {
            w -= t_components(Some(g0), None, x, self.correction).t1;
        }
        if let Some(r) = &self.inverse {
            w += r.at(x);
        }
        if let Some(h) = &self.gauge {
            w += h.gradient(x);
        }
        w
    }

    pub fn on_grid(&self) -> VectorField {
        let mut w = match &self.inverse {
            Some(r) => r.on_grid(),
            None => VectorField::zeros(&self.grid),
        };
        if let Some(t1) = &self.t1 {
            w = w.sub(t1).expect("same grid");
        }
        if let Some(h) = &self.gauge {
            w = w.map_with_position(|x, v| v + h.gradient(x));
        }
        w
    }
}

/// Potentials of the decomposition `w = ∇v₀ − curl v*` with `v₀ = L[g₀]`
/// and `v*(x) = L[g](x) + ∫₀¹ (t|x−c|²/2) ∇t0(c + t(x−c)) dt`.
pub struct HelmholtzPotentials {
    g0: Option<ScalarField>,
    inverse: Option<RightInverse>,
    correction: SingularCorrection,
}

pub fn helmholtz_potentials(data: &DivCurlData, cfg: &VolumeOperatorConfig) -> Result<HelmholtzPotentials> {
    cfg.validate()?;
    data.grid()?;
    let inverse = data
        .g
        .as_ref()
        .map(|g| RightInverse::new(g, cfg))
        .transpose()?;
    Ok(HelmholtzPotentials {
        g0: data.g0.clone(),
        inverse,
        correction: cfg.singular_correction,
    })
}

impl HelmholtzPotentials {
    pub fn v0(&self, x: Vec3) -> f64 {
        self.g0
            .as_ref()
            .map_or(0.0, |g0| newton_potential(g0, x, self.correction))
    }

    pub fn vstar(&self, x: Vec3) -> Vec3 {
        self.inverse.as_ref().map_or(Vec3::zeros(), |r| {
            newton_potential(r.source(), x, self.correction) + r.ray_potential(x)
        })
    }

    pub fn v0_on_grid(&self) -> Option<ScalarField> {
        self.g0
            .as_ref()
            .map(|g0| newton_potential_on_grid(g0, self.correction))
    }

    pub fn vstar_on_grid(&self) -> Option<VectorField> {
        self.inverse.as_ref().map(|r| {
            let l = newton_potential_on_grid(r.source(), self.correction);
            l.map_with_position(|x, v| v + r.ray_potential(x))
        })
    }
}

/// Double-curl inverse `S_Ω[g] = −v*`, so that `curl curl S_Ω[g] = g` for
/// solenoidal `g`.
pub struct DoubleCurlInverse {
    potentials: HelmholtzPotentials,
}

pub fn double_curl_inverse(g: &VectorField, cfg: &VolumeOperatorConfig) -> Result<DoubleCurlInverse> {
    let data = DivCurlData::new(None, Some(g.clone()));
    Ok(DoubleCurlInverse {
        potentials: helmholtz_potentials(&data, cfg)?,
    })
}

impl DoubleCurlInverse {
    pub fn at(&self, x: Vec3) -> Vec3 {
        -self.potentials.vstar(x)
    }

    pub fn on_grid(&self) -> VectorField {
        self.potentials
            .vstar_on_grid()
            .expect("vector datum present")
            .scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{fd_curl, fd_laplacian, relative_error_on};
    use crate::geometry::{build_ball, voxelize};

    fn ball(n: usize) -> Arc<VoxelGrid> {
        voxelize(&build_ball(1.0, Vec3::zeros(), 2).unwrap(), n).unwrap()
    }

    fn c() -> Vec3 {
        Vec3::new(1.0, -0.5, 2.0)
    }

    #[test]
    fn lattice_gradient_is_exact_for_quadratics() {
        let grid = ball(12);
        let f = ScalarField::from_fn(&grid, |x| x.x * x.x - 2.0 * x.y * x.z + x.z);
        let g = lattice_gradient(&f);
        for (i, x) in grid.centers().iter().enumerate() {
            let exact = Vec3::new(2.0 * x.x, -2.0 * x.z, 1.0 - 2.0 * x.y);
            let nb = (0..3).all(|a| grid.neighbor(i, a, 1).is_some() || grid.neighbor(i, a, -1).is_some());
            if nb && grid.depth(i) > 2.0 * grid.spacing() {
                assert!((g.get(i) - exact).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn right_inverse_of_constant() {
        // R_Ω[c] = −½ x×c
        let grid = ball(24);
        let g = VectorField::constant(&grid, c());
        let r = RightInverse::new(&g, &VolumeOperatorConfig::default()).unwrap();
        let w = r.on_grid();
        let exact = VectorField::from_fn(&grid, |x| -0.5 * x.cross(&c()));
        let region = grid.interior_at_depth(0.2);
        assert!(relative_error_on(&w, &exact, &region) < 0.05);
        let x = Vec3::new(0.3, 0.1, -0.2);
        assert!((r.at(x) + 0.5 * x.cross(&c())).norm() < 0.05 * 0.5 * x.cross(&c()).norm().max(0.1));
    }

    #[test]
    fn non_solenoidal_data_is_rejected() {
        let grid = ball(12);
        let g = VectorField::from_fn(&grid, |x| x);
        let err = RightInverse::new(&g, &VolumeOperatorConfig::default()).unwrap_err();
        assert!(err.is_compatibility());
    }

    #[test]
    fn scalar_source_gives_identity_field() {
        // g₀ = 3 on the unit ball: w = −t1(3) = x
        let grid = ball(20);
        let data = DivCurlData::new(Some(ScalarField::constant(&grid, 3.0)), None);
        let sol = solve_div_curl(&data, &VolumeOperatorConfig::default()).unwrap();
        let w = sol.on_grid();
        let exact = VectorField::from_fn(&grid, |x| x);
        let region = grid.interior_at_depth(0.2);
        assert!(relative_error_on(&w, &exact, &region) < 0.05);
        let x = Vec3::new(0.2, -0.1, 0.3);
        assert!((sol.at(x) - x).norm() < 0.05);
    }

    #[test]
    fn gauge_adds_exact_gradient() {
        let grid = ball(12);
        let g = VectorField::constant(&grid, c());
        let h: Arc<dyn HarmonicGauge> = Arc::new(Poly::monomial(1.0, [1, 1, 0]));
        let cfg = VolumeOperatorConfig::default();
        let a = solve_div_curl(&DivCurlData::new(None, Some(g.clone())), &cfg).unwrap();
        let b = solve_div_curl(&DivCurlData::new(None, Some(g)).with_gauge(h), &cfg).unwrap();
        let x = Vec3::new(0.1, 0.4, -0.2);
        assert!((b.at(x) - a.at(x) - Vec3::new(x.y, x.x, 0.0)).norm() < 1e-12);
        let d = b.on_grid().sub(&a.on_grid()).unwrap();
        for (i, p) in grid.centers().iter().enumerate() {
            assert!((d.get(i) - Vec3::new(p.y, p.x, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn gauge_only_solution() {
        let grid = ball(12);
        let h: Arc<dyn HarmonicGauge> = Arc::new(Poly::monomial(1.0, [1, 1, 0]));
        let data = DivCurlData::new(Some(ScalarField::zeros(&grid)), None).with_gauge(h);
        let w = solve_div_curl(&data, &VolumeOperatorConfig::default()).unwrap().on_grid();
        let region = grid.accuracy_region();
        assert!(fd_div(&w).norm_l2_on(&region) < 1e-10);
        assert!(fd_curl(&w).norm_l2_on(&region) < 1e-10);
    }

    #[test]
    fn helmholtz_reconstruction_for_constant_curl() {
        // v* = c(|x|²/4 − 1/2), so −curl v* = −½ x×c
        let grid = ball(20);
        let g = VectorField::constant(&grid, c());
        let p = helmholtz_potentials(&DivCurlData::new(None, Some(g)), &VolumeOperatorConfig::default())
            .unwrap();
        let vstar = p.vstar_on_grid().unwrap();
        let exact = VectorField::from_fn(&grid, |x| c() * (0.25 * x.norm_squared() - 0.5));
        let region = grid.interior_at_depth(0.2);
        assert!(relative_error_on(&vstar, &exact, &region) < 0.03);
        let w = fd_curl(&vstar).scale(-1.0);
        let ew = VectorField::from_fn(&grid, |x| -0.5 * x.cross(&c()));
        assert!(relative_error_on(&w, &ew, &region) < 0.05);
        assert!(p.v0_on_grid().is_none());
        assert_eq!(p.v0(Vec3::zeros()), 0.0);
    }

    #[test]
    fn double_curl_inverse_of_constant() {
        let grid = ball(32);
        let g = VectorField::constant(&grid, c());
        let s = double_curl_inverse(&g, &VolumeOperatorConfig::default()).unwrap().on_grid();
        let cc = fd_curl(&fd_curl(&s));
        let region = grid.interior_at_depth(0.25);
        assert!(relative_error_on(&cc, &g, &region) < 0.05);
        let lap_div = fd_laplacian(&fd_div(&s));
        assert!(lap_div.norm_l2_on(&region) < 0.05 * g.norm_l2_on(&region));
    }
}
