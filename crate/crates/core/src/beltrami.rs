//! Beltrami fields `curl w = α₀ w` by the Neumann series
//! `w = Σ_k (α₀ R)^k [g]` for solenoidal and irrotational `g`, with
//! admissibility bounds for `α₀`.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{fd_curl, fd_div, FieldValue, GridField, QuaternionField, VectorField};
use crate::bvp::{solve_laplace_neumann, HarmonicBasis, NeumannRightInverse};
use crate::divcurl::{solenoidal_defect, RightInverse};
use crate::error::{Error, Result};
use crate::geometry::VoxelGrid;
use crate::potentials::{teodorescu_on_grid, SingularCorrection, VolumeOperatorConfig};
use crate::report::SolveReport;
use crate::testfields::{random_poly, random_solenoidal};
use crate::Quaternion;
use crate::Vec3;

/// Factor applied to the empirical (lower-bound) norm estimates.
pub const NORM_SAFETY: f64 = 2.0;

/// Power iterations applied to the best random start.
const POWER_STEPS: usize = 8;

fn lp_norm<T: FieldValue>(f: &GridField<T>, p: f64) -> f64 {
    let w = f.grid().cell_volume();
    let s: f64 = f.values().iter().map(|v| v.norm_sq().sqrt().powf(p)).sum();
    (s * w).powf(1.0 / p)
}

/// `(‖f‖_p^p + ‖∇f‖_p^p)^{1/p}` with the finite-difference Jacobian.
fn w1p_norm(f: &QuaternionField, p: f64) -> f64 {
    let w = f.grid().cell_volume();
    let s: f64 = (0..f.len())
        .map(|i| {
            let jac: f64 = f.local_gradient(i).iter().map(|q| q.norm_sq()).sum();
            f.get(i).norm().powf(p) + jac.sqrt().powf(p)
        })
        .sum();
    (s * w).powf(1.0 / p)
}

/// Norm estimates and the resulting bounds on `‖R_Ω‖` and `|α₀|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBound {
    pub p: f64,
    pub q: f64,
    /// `NORM_SAFETY ×` the largest observed `‖T_Ω w‖_p / ‖w‖_p`.
    pub t_norm: f64,
    /// `NORM_SAFETY ×` the largest observed `‖T_Ω w‖_{1,p} / ‖w‖_p`.
    pub t_norm_w1: f64,
    pub volume: f64,
    pub diameter: f64,
    /// `2·max{‖T‖_p, ‖T‖_{p→1,p}·Vol·diam/(q+1)^{1/q}}`.
    pub bound_r: f64,
    /// `½·min{1/‖T‖_p, (q+1)^{1/q}/(‖T‖_{p→1,p}·Vol·diam)} = 1/bound_r`.
    pub alpha_max: f64,
}

impl NormBound {
    /// Evaluates the bound formulas for given norm estimates.
    pub fn from_estimates(p: f64, t_norm: f64, t_norm_w1: f64, volume: f64, diameter: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::invalid("p", format!("must lie in (1, ∞), got {p}")));
        }
        let q = p / (p - 1.0);
        let qf = (q + 1.0).powf(1.0 / q);
        let bound_r = 2.0 * t_norm.max(t_norm_w1 * volume * diameter / qf);
        let alpha_max = 0.5 * (1.0 / t_norm).min(qf / (t_norm_w1 * volume * diameter));
        Ok(Self {
            p,
            q,
            t_norm,
            t_norm_w1,
            volume,
            diameter,
            bound_r,
            alpha_max,
        })
    }
}

/// Randomized lower bounds for `‖T_Ω‖_p` and `‖T_Ω‖_{p→1,p}`, scaled by
/// [`NORM_SAFETY`], and the bounds derived from them.
///
/// `samples` random polynomial quaternion fields of degree `≤ 2` are tried;
/// the best one is refined by power iteration (`T_Ω` is self-adjoint for the
/// real inner product `Sc(a·conj b)`).
pub fn operator_norm_bound(
    grid: &Arc<VoxelGrid>,
    p: f64,
    samples: usize,
    seed: u64,
    correction: SingularCorrection,
) -> Result<NormBound> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if samples == 0 {
        return Err(Error::invalid("samples", "need at least one sample"));
    }
    let domain = grid.domain();
    let center = domain.center();
    let scale = 0.5 * domain.diameter();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut best_t, mut best_w1) = (0.0f64, 0.0f64);
    let mut best_field: Option<QuaternionField> = None;
    for _ in 0..samples {
        let polys = [(); 4].map(|_| random_poly(&mut rng, 2));
        let w = QuaternionField::from_fn(grid, |x| {
            let xi = (x - center) / scale;
            Quaternion::new(polys[0].eval(xi), Vec3::new(polys[1].eval(xi), polys[2].eval(xi), polys[3].eval(xi)))
        });
        let n = lp_norm(&w, p);
        if n == 0.0 {
            continue;
        }
        let tw = teodorescu_on_grid(&w, correction);
        let r = lp_norm(&tw, p) / n;
        best_w1 = best_w1.max(w1p_norm(&tw, p) / n);
        if r > best_t {
            best_t = r;
            best_field = Some(w);
        }
    }
    let mut w = best_field.ok_or(Error::EmptyGrid)?;
    for _ in 0..POWER_STEPS {
        let n = lp_norm(&w, p);
        let tw = teodorescu_on_grid(&w, correction);
        best_t = best_t.max(lp_norm(&tw, p) / n);
        best_w1 = best_w1.max(w1p_norm(&tw, p) / n);
        let tn = lp_norm(&tw, p);
        w = tw.scale(1.0 / tn);
    }
    NormBound::from_estimates(
        p,
        NORM_SAFETY * best_t,
        NORM_SAFETY * best_w1,
        domain.volume(),
        domain.diameter(),
    )
}

/// Largest observed `‖R_Ω g‖₂ / ‖g‖₂` over random solenoidal fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRightInverseNorm {
    pub ratio: f64,
    pub samples: usize,
    /// `1 / (NORM_SAFETY · ratio)`.
    pub alpha_limit: f64,
}

pub fn empirical_right_inverse_norm(
    grid: &Arc<VoxelGrid>,
    samples: usize,
    seed: u64,
    cfg: &VolumeOperatorConfig,
) -> Result<EmpiricalRightInverseNorm> {
    if samples == 0 {
        return Err(Error::invalid("samples", "need at least one sample"));
    }
    let domain = grid.domain();
    let scale = 0.5 * domain.diameter();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratio = 0.0f64;
    for _ in 0..samples {
        let f = random_solenoidal(&mut rng, domain.center(), scale, 2);
        let g = VectorField::from_fn(grid, |x| f.eval(x));
        let r = RightInverse::unchecked(&g, cfg)?.on_grid();
        ratio = ratio.max(r.norm_l2() / g.norm_l2());
    }
    Ok(EmpiricalRightInverseNorm {
        ratio,
        samples,
        alpha_limit: 1.0 / (NORM_SAFETY * ratio),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesVariant {
    /// Terms by `R_Ω`.
    Free,
    /// Terms by the Neumann-corrected `R_{Ω,n}`.
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeltramiConfig {
    pub alpha0: f64,
    /// Admissibility limit: `|α₀|` must lie strictly below it.
    pub alpha_limit: f64,
    pub k_max: usize,
    pub tail_tol: f64,
    pub variant: SeriesVariant,
    /// Degree of the harmonic basis for the Neumann variant.
    pub neumann_degree: u32,
}

impl BeltramiConfig {
    pub fn new(alpha0: f64, alpha_limit: f64) -> Self {
        Self {
            alpha0,
            alpha_limit,
            k_max: 30,
            tail_tol: 1e-8,
            variant: SeriesVariant::Free,
            neumann_degree: 6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_max == 0 {
            return Err(Error::invalid("k_max", "must be at least 1"));
        }
        if !(self.tail_tol > 0.0) {
            return Err(Error::invalid("tail_tol", format!("must be positive, got {}", self.tail_tol)));
        }
        if !(self.alpha_limit > 0.0) {
            return Err(Error::invalid(
                "alpha_limit",
                format!("must be positive, got {}", self.alpha_limit),
            ));
        }
        if !(self.alpha0.abs() < self.alpha_limit) {
            return Err(Error::NotAdmissible {
                alpha0: self.alpha0,
                limit: self.alpha_limit,
            });
        }
        Ok(())
    }
}

/// `‖fd_curl w − α₀ w‖₂ / max(‖w‖₂, ε)` over the accuracy region.
pub fn beltrami_residual(w: &VectorField, alpha0: f64) -> f64 {
    let region = w.grid().accuracy_region();
    let r = fd_curl(w).sub(&w.scale(alpha0)).expect("same grid");
    r.norm_l2_on(&region) / w.norm_l2_on(&region).max(f64::EPSILON)
}

#[derive(Debug, Clone)]
pub struct BeltramiSolution {
    pub field: VectorField,
    /// `(α₀ R)^k [g]` for `k = 0, 1, …`.
    pub terms: Vec<VectorField>,
    /// Values of the sum at the boundary nodes (Neumann problem only).
    pub boundary_values: Option<Vec<Vec3>>,
    pub report: SolveReport,
}

fn run_series(
    g: &VectorField,
    cfg: &BeltramiConfig,
    vol: &VolumeOperatorConfig,
    mut boundary: Option<Vec<Vec3>>,
) -> Result<BeltramiSolution> {
    cfg.validate()?;
    vol.validate()?;
    let grid = g.grid().clone();
    let mesh = grid.domain().boundary();
    let mut report = SolveReport::new("beltrami_series");
    let mut field = g.clone();
    let mut terms = vec![g.clone()];
    let mut norms = vec![g.norm_l2()];
    report.info("term_0_norm", norms[0]);
    for k in 1..=cfg.k_max {
        let prev = terms.last().expect("nonempty");
        if cfg.alpha0 == 0.0 || norms[k - 1] == 0.0 {
            break;
        }
        let inverse = RightInverse::unchecked(prev, vol)?;
        let term = match cfg.variant {
            SeriesVariant::Free => {
                if let Some(b) = boundary.as_mut() {
                    for (v, x) in b.iter_mut().zip(&mesh.nodes) {
                        *v += inverse.at(*x) * cfg.alpha0;
                    }
                }
                inverse.on_grid()
            }
            SeriesVariant::Neumann => {
                let n = NeumannRightInverse::from_inverse(inverse, cfg.neumann_degree)?;
                if let Some(b) = boundary.as_mut() {
                    for (v, x) in b.iter_mut().zip(&mesh.nodes) {
                        *v += n.at(*x) * cfg.alpha0;
                    }
                }
                n.on_grid()
            }
        }
        .scale(cfg.alpha0);
        let norm = term.norm_l2();
        let ratio = norm / norms[k - 1];
        report.info(format!("term_{k}_norm"), norm);
        report.info(format!("term_{k}_ratio"), ratio);
        report.info(format!("term_{k}_div_defect"), solenoidal_defect(&term));
        if !(ratio < 1.0) {
            return Err(Error::NonGeometricDecay { term: k, ratio });
        }
        field = field.add(&term)?;
        norms.push(norm);
        terms.push(term);
        if norm <= cfg.tail_tol * field.norm_l2() {
            break;
        }
    }
    let ratio_max = norms
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .fold(0.0, f64::max);
    report.info("terms", terms.len() as f64);
    report.info("max_term_ratio", ratio_max);
    report.check(
        "beltrami_residual",
        beltrami_residual(&field, cfg.alpha0),
        crate::tolerances::TOL_BELTRAMI,
    );
    let region = grid.accuracy_region();
    report.info(
        "div_residual",
        fd_div(&field).norm_l2_on(&region) / field.norm_l2_on(&region).max(f64::EPSILON),
    );
    Ok(BeltramiSolution {
        field,
        terms,
        boundary_values: boundary,
        report: report.finish(),
    })
}

/// Neumann series `w = Σ_k (α₀ R)^k [g]` for solenoidal, irrotational `g`.
pub fn beltrami_series(
    g: &VectorField,
    cfg: &BeltramiConfig,
    vol: &VolumeOperatorConfig,
) -> Result<BeltramiSolution> {
    cfg.validate()?;
    let defect = solenoidal_defect(g);
    if defect > crate::tolerances::TOL_COMPAT {
        return Err(Error::Compatibility {
            what: "series datum is not solenoidal",
            measured: defect,
            tolerance: crate::tolerances::TOL_COMPAT,
        });
    }
    let region = g.grid().accuracy_region();
    let gn = g.norm_l2_on(&region);
    let curl = if gn > 0.0 {
        fd_curl(g).norm_l2_on(&region) / gn
    } else {
        0.0
    };
    if curl > crate::tolerances::TOL_COMPAT {
        return Err(Error::Compatibility {
            what: "series datum is not irrotational",
            measured: curl,
            tolerance: crate::tolerances::TOL_COMPAT,
        });
    }
    run_series(g, cfg, vol, None)
}

/// Beltrami field with `w·η = a0` targeted on the boundary: `g = ∇h` for
/// the harmonic `h` with `∂h/∂η = a0`, followed by the series in the
/// Neumann-corrected right inverse. The report records the measured trace
/// error `‖w·η − a0‖ / ‖a0‖`.
pub fn beltrami_neumann_bvp(
    a0: &[f64],
    grid: &Arc<VoxelGrid>,
    cfg: &BeltramiConfig,
    vol: &VolumeOperatorConfig,
) -> Result<BeltramiSolution> {
    let cfg = BeltramiConfig {
        variant: SeriesVariant::Neumann,
        ..*cfg
    };
    cfg.validate()?;
    let domain = grid.domain();
    let mesh = domain.boundary();
    let basis = HarmonicBasis::for_domain(domain, cfg.neumann_degree)?;
    let h = solve_laplace_neumann(a0, &basis, mesh)?;
    let g = VectorField::from_fn(grid, |x| h.gradient(x));
    let boundary: Vec<Vec3> = mesh.nodes.iter().map(|x| h.gradient(*x)).collect();
    let mut sol = run_series(&g, &cfg, vol, Some(boundary))?;
    let values = sol.boundary_values.as_ref().expect("boundary tracked");
    let trace = mesh.normal_trace(values)?;
    let diff: Vec<f64> = trace.iter().zip(a0).map(|(t, a)| t - a).collect();
    let a0n = mesh.l2_norm(a0)?;
    let err = mesh.l2_norm(&diff)?;
    sol.report.info("trace_error", if a0n > 0.0 { err / a0n } else { err });
    sol.report.merge("neumann_fit", h.report.clone());
    Ok(sol)
}
