//! Antigradient, the φ-factorized Teodorescu transform, solvers for the
//! Vekua-type operators `D − α` and `D + M^α`, the conductivity equation
//! `div(φ²∇w₀) = f` and the static Maxwell system in inhomogeneous media.
//!
//! `α` is always irrotational and written as `∇φ/φ` with
//! `log φ = A[α]`, the antigradient taken along the axis-parallel path from
//! the anchor. `M^α` multiplies from the right: `M^α w = w α`.

use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use crate::algebra::{
    fd_curl, fd_div, moisil_teodorescu, GridField, Quaternion, QuaternionField, ScalarField,
    VectorField,
};
use crate::divcurl::{derivative_defect, lattice_gradient, solenoidal_defect, solve_div_curl, DivCurlData, HarmonicGauge, RightInverse};
use crate::error::{Error, Result};
use crate::geometry::VoxelGrid;
use crate::potentials::{teodorescu, teodorescu_on_grid, SingularCorrection, VolumeOperatorConfig};
use crate::report::SolveReport;
use crate::tolerances::{self, TOL_COMPAT, TOL_POS};
use crate::Vec3;

/// Gauss–Legendre nodes per sub-interval of an antigradient segment.
const SEGMENT_NODES: usize = 4;

/// Relative residual at which conjugate gradients stop.
pub const CG_TOLERANCE: f64 = 1e-10;

/// Smallest boundary fraction used in the cut-cell stencil.
const MIN_BOUNDARY_FRACTION: f64 = 1e-3;

fn segment_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let r = crate::potentials::RayRule::gauss_legendre(SEGMENT_NODES).expect("fixed node count");
        r.nodes().iter().copied().zip(r.weights().iter().copied()).collect()
    })
}

/// `A[u](x)`: line integral of `u` from `a` to `x` along the axis path
/// `x₁`, then `x₂`, then `x₃`.
pub fn antigradient(u: &VectorField, a: Vec3, x: Vec3) -> Result<f64> {
    antigradient_ordered(u, a, x, [0, 1, 2])
}

/// As [`antigradient`] with the axes traversed in `order`.
pub fn antigradient_ordered(u: &VectorField, a: Vec3, x: Vec3, order: [usize; 3]) -> Result<f64> {
    let mut seen = [false; 3];
    for &axis in &order {
        if axis > 2 || seen[axis] {
            return Err(Error::invalid("order", format!("{order:?} is not a permutation of the axes")));
        }
        seen[axis] = true;
    }
    let grid = u.grid();
    let domain = grid.domain();
    let h = grid.spacing();
    if !domain.inside(a) {
        return Err(Error::OutsideDomain { point: a });
    }
    let mut p = a;
    let mut total = 0.0;
    for &axis in &order {
        let len = x[axis] - p[axis];
        if len != 0.0 {
            let pieces = (len.abs() / h).ceil().max(1.0) as usize;
            let step = len / pieces as f64;
            for k in 0..pieces {
                for &(t, w) in segment_rule() {
                    let mut q = p;
                    q[axis] += step * (k as f64 + t);
                    if !domain.inside(q) {
                        return Err(Error::OutsideDomain { point: q });
                    }
                    total += w * step * u.sample(q)[axis];
                }
            }
            p[axis] = x[axis];
        }
        if !domain.inside(p) {
            return Err(Error::OutsideDomain { point: p });
        }
    }
    Ok(total)
}

/// `φ = exp(A[α])` at every voxel center.
pub fn phi_from_alpha(alpha: &VectorField, a: Vec3) -> Result<ScalarField> {
    GridField::try_from_fn(alpha.grid(), |x| antigradient(alpha, a, x).map(f64::exp))
}

/// `‖fd_curl α‖₂ / (‖∇α‖₂ + ‖α‖₂/diam Ω)` on the accuracy region, the
/// counterpart of [`solenoidal_defect`].
pub fn irrotational_defect(alpha: &VectorField) -> f64 {
    let curl = fd_curl(alpha);
    derivative_defect(alpha, |i| curl.get(i).norm_squared())
}

/// Irrotational `α` with its factor `φ > 0`, `α = ∇φ/φ`, normalized by
/// `φ(anchor) = 1`.
#[derive(Debug, Clone)]
pub struct IrrotationalCoefficient {
    alpha: VectorField,
    anchor: Vec3,
    phi: ScalarField,
}

impl IrrotationalCoefficient {
    /// Anchors the antigradient at the star center of the domain.
    pub fn new(alpha: VectorField) -> Result<Self> {
        let anchor = alpha.grid().domain().center();
        Self::with_anchor(alpha, anchor)
    }

    pub fn with_anchor(alpha: VectorField, anchor: Vec3) -> Result<Self> {
        let measured = irrotational_defect(&alpha);
        if measured > TOL_COMPAT {
            return Err(Error::Compatibility {
                what: "coefficient alpha is not irrotational",
                measured,
                tolerance: TOL_COMPAT,
            });
        }
        let phi = phi_from_alpha(&alpha, anchor)?;
        if phi.min_value() <= TOL_POS {
            return Err(Error::invalid("phi", "antigradient underflowed to a nonpositive factor"));
        }
        let region = alpha.grid().accuracy_region();
        let norm = alpha.norm_l2_on(&region);
        if norm > 0.0 {
            let grad_log = lattice_gradient(&phi.map(f64::ln));
            let err = grad_log.sub(&alpha)?.norm_l2_on(&region) / norm;
            let tolerance = tolerances::tol_op(alpha.grid().spacing(), VolumeOperatorConfig::default().ray_nodes);
            if err > tolerance {
                return Err(Error::Compatibility {
                    what: "gradient of log phi does not reproduce alpha",
                    measured: err,
                    tolerance,
                });
            }
        }
        Ok(Self { alpha, anchor, phi })
    }

    /// `α = 0`, `φ ≡ 1`.
    pub fn zero(grid: &Arc<VoxelGrid>) -> Self {
        Self {
            alpha: VectorField::zeros(grid),
            anchor: grid.domain().center(),
            phi: ScalarField::constant(grid, 1.0),
        }
    }

    pub fn grid(&self) -> &Arc<VoxelGrid> {
        self.alpha.grid()
    }

    pub fn alpha(&self) -> &VectorField {
        &self.alpha
    }

    pub fn anchor(&self) -> Vec3 {
        self.anchor
    }

    pub fn phi(&self) -> &ScalarField {
        &self.phi
    }

    /// `∇φ = φ α`.
    pub fn grad_phi(&self) -> VectorField {
        self.alpha.zip_map(&self.phi, |a, p| a * p).expect("same grid")
    }
}

fn check_positive(phi: &ScalarField) -> Result<()> {
    let m = phi.min_value();
    if m <= TOL_POS {
        return Err(Error::invalid("phi", format!("must be positive, minimum is {m:.3e}")));
    }
    Ok(())
}

/// `T_{Ω,φ}[w](x) = φ(x) T_Ω[w/φ](x)`, a right inverse of `D − ∇φ/φ`.
pub fn phi_teodorescu(
    w: &QuaternionField,
    phi: &ScalarField,
    x: Vec3,
    correction: SingularCorrection,
) -> Result<Quaternion> {
    w.check_same_grid(phi)?;
    check_positive(phi)?;
    let scaled = w.zip_map(phi, |q, p| q * (1.0 / p))?;
    Ok(teodorescu(&scaled, x, correction) * phi.sample(x))
}

pub fn phi_teodorescu_on_grid(
    w: &QuaternionField,
    phi: &ScalarField,
    correction: SingularCorrection,
) -> Result<QuaternionField> {
    w.check_same_grid(phi)?;
    check_positive(phi)?;
    let scaled = w.zip_map(phi, |q, p| q * (1.0 / p))?;
    teodorescu_on_grid(&scaled, correction).zip_map(phi, |q, p| q * p)
}

/// Finite-difference `(D − α) q`, with `α` multiplying from the left.
pub fn apply_d_minus_alpha(q: &QuaternionField, alpha: &VectorField) -> Result<QuaternionField> {
    q.check_same_grid(alpha)?;
    moisil_teodorescu(q).zip_map(
        &q.zip_map(alpha, |q, a| Quaternion::vector(a) * q)?,
        |d, m| d - m,
    )
}

/// Finite-difference `(D + M^α) w = D w + w α` for a vector field `w`.
pub fn apply_d_plus_m(w: &VectorField, alpha: &VectorField) -> Result<QuaternionField> {
    w.check_same_grid(alpha)?;
    let div = fd_div(w);
    let curl = fd_curl(w);
    let grid = w.grid().clone();
    let values = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let (wi, ai) = (w.get(i), alpha.get(i));
            Quaternion::new(-div.get(i) - wi.dot(&ai), curl.get(i) + wi.cross(&ai))
        })
        .collect();
    GridField::new(grid, values)
}

/// Compatibility measure of `div g = α·g`: the solenoidal defect of `g/φ`,
/// since `div(g/φ) = (div g − α·g)/φ`.
pub fn vekua_compatibility_defect(g: &VectorField, coeff: &IrrotationalCoefficient) -> Result<f64> {
    g.check_same_grid(coeff.phi())?;
    Ok(solenoidal_defect(&g.zip_map(coeff.phi(), |v, p| v / p)?))
}

fn check_vekua_compatibility(g: &VectorField, coeff: &IrrotationalCoefficient) -> Result<()> {
    let measured = vekua_compatibility_defect(g, coeff)?;
    if measured > TOL_COMPAT {
        return Err(Error::Compatibility {
            what: "vector data violates div g = alpha . g",
            measured,
            tolerance: TOL_COMPAT,
        });
    }
    Ok(())
}

fn is_zero<T: crate::algebra::FieldValue>(f: &GridField<T>) -> bool {
    f.max_norm() == 0.0
}

/// Ratio `‖res‖/‖scale‖` on the accuracy region, or `‖res‖` when the
/// scale vanishes.
fn relative_on_region<T: crate::algebra::FieldValue>(res: &GridField<T>, scale: f64, region: &[usize]) -> f64 {
    let r = res.norm_l2_on(region);
    if scale > 0.0 {
        r / scale
    } else {
        r
    }
}

/// Vector solution of a Vekua-type system with its residual report.
#[derive(Debug, Clone)]
pub struct VekuaSolution {
    pub field: VectorField,
    pub report: SolveReport,
}

/// Solves `(D − α) w = g`, i.e. `div w − α·w = −g₀`, `curl w − α×w = g⃗`,
/// by `w = φ (t1(g₀/φ) + R_Ω[g⃗/φ] + ∇h)`.
pub fn solve_d_minus_alpha(
    g: &QuaternionField,
    coeff: &IrrotationalCoefficient,
    gauge: Option<Arc<dyn HarmonicGauge>>,
    cfg: &VolumeOperatorConfig,
) -> Result<VekuaSolution> {
    cfg.validate()?;
    g.check_same_grid(coeff.phi())?;
    let mut report = SolveReport::new("D - alpha");
    let grid = g.grid().clone();
    let phi = coeff.phi();
    let g0 = g.scalar_part();
    let gv = g.vector_part();
    check_vekua_compatibility(&gv, coeff)?;

    let data = DivCurlData {
        g0: (!is_zero(&g0)).then(|| g0.zip_map(phi, |s, p| -s / p)).transpose()?,
        g: (!is_zero(&gv)).then(|| gv.zip_map(phi, |v, p| v / p)).transpose()?,
        gauge,
    };
    let v = if data.g0.is_none() && data.g.is_none() {
        match &data.gauge {
            Some(h) => VectorField::from_fn(&grid, |x| h.gradient(x)),
            None => VectorField::zeros(&grid),
        }
    } else {
        solve_div_curl(&data, cfg)?.on_grid()
    };
    let w = v.zip_map(phi, |v, p| v * p)?;

    let alpha = coeff.alpha();
    let div = fd_div(&w);
    let curl = fd_curl(&w);
    let div_res = ScalarField::new(
        grid.clone(),
        (0..grid.len())
            .into_par_iter()
            .map(|i| div.get(i) - alpha.get(i).dot(&w.get(i)) + g0.get(i))
            .collect(),
    )?;
    let curl_res = VectorField::new(
        grid.clone(),
        (0..grid.len())
            .into_par_iter()
            .map(|i| curl.get(i) - alpha.get(i).cross(&w.get(i)) - gv.get(i))
            .collect(),
    )?;
    record_residuals(&mut report, &grid, g, &div_res, &curl_res, cfg);
    Ok(VekuaSolution {
        field: w,
        report: report.finish(),
    })
}

fn record_residuals(
    report: &mut SolveReport,
    grid: &Arc<VoxelGrid>,
    g: &QuaternionField,
    div_res: &ScalarField,
    curl_res: &VectorField,
    cfg: &VolumeOperatorConfig,
) {
    let region = grid.accuracy_region();
    let scale = g.norm_l2_on(&region);
    let tol = tolerances::tol_vekua(grid.spacing(), cfg.ray_nodes);
    report.check("div_residual", relative_on_region(div_res, scale, &region), tol);
    report.check("curl_residual", relative_on_region(curl_res, scale, &region), tol);
}

/// Result of a conjugate-gradient solve of the conductivity equation.
#[derive(Debug, Clone)]
pub struct ConductivitySolution {
    pub field: ScalarField,
    pub iterations: usize,
    pub relative_residual: f64,
    /// `½ uᵀAu − bᵀu` after every iteration; differs from the squared
    /// energy norm of the error by a constant.
    pub energy: Vec<f64>,
    pub report: SolveReport,
}

/// Symmetric positive definite 7-point operator `−div(k∇·)` with zero
/// Dirichlet values on the boundary.
struct DivergenceOperator {
    diag: Vec<f64>,
    offdiag: Vec<[(usize, f64); 6]>,
}

impl DivergenceOperator {
    /// Face coefficients are harmonic means of `k` at the two adjacent
    /// centers. A face towards an exterior cell is cut at the boundary: with
    /// the boundary at fraction `θ` of the spacing the flux is
    /// `k (0 − u)/(θ h)`, which keeps the matrix symmetric.
    fn assemble(k: &ScalarField) -> Self {
        let grid = k.grid();
        let h = grid.spacing();
        let inv_h2 = 1.0 / (h * h);
        let (diag, offdiag) = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let ki = k.get(i);
                let mut d = 0.0;
                let mut off = [(i, 0.0); 6];
                for axis in 0..3 {
                    for (s, dir) in [-1i8, 1].into_iter().enumerate() {
                        match grid.neighbor(i, axis, dir) {
                            Some(j) => {
                                let kj = k.get(j);
                                let kf = 2.0 * ki * kj / (ki + kj) * inv_h2;
                                d += kf;
                                off[2 * axis + s] = (j, -kf);
                            }
                            None => {
                                let theta = boundary_fraction(grid, i, axis, dir);
                                d += ki * inv_h2 / theta;
                            }
                        }
                    }
                }
                (d, off)
            })
            .unzip();
        Self { diag, offdiag }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.par_iter_mut().enumerate().for_each(|(i, o)| {
            *o = self.diag[i] * x[i] + self.offdiag[i].iter().map(|&(j, a)| a * x[j]).sum::<f64>();
        });
    }
}

/// Fraction `θ ∈ (0, 1]` of the spacing from voxel `i` to the boundary along
/// `dir · e_axis`, by bisection on the inside predicate.
fn boundary_fraction(grid: &VoxelGrid, i: usize, axis: usize, dir: i8) -> f64 {
    let domain = grid.domain();
    let c = grid.center(i);
    let mut e = Vec3::zeros();
    e[axis] = dir as f64 * grid.spacing();
    if domain.inside(c + e) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if domain.inside(c + e * mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).max(MIN_BOUNDARY_FRACTION)
}

/// Inner product summed over fixed chunks in order, so the result does not
/// depend on the number of threads.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    const CHUNK: usize = 4096;
    a.par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(x, y)| x * y).sum::<f64>())
        .collect::<Vec<_>>()
        .iter()
        .sum()
}

/// Solves `div(k ∇u) = rhs` with `u = 0` on `∂Ω` by Jacobi-preconditioned
/// conjugate gradients.
pub fn solve_divergence_form(k: &ScalarField, rhs: &ScalarField) -> Result<ConductivitySolution> {
    k.check_same_grid(rhs)?;
    let m = k.min_value();
    if !(m > TOL_POS) || k.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("coefficient", format!("must be positive and finite, minimum is {m:.3e}")));
    }
    let grid = k.grid().clone();
    let mut report = SolveReport::new("conductivity");
    let n = grid.len();
    let b: Vec<f64> = rhs.values().iter().map(|v| -v).collect();
    let b_norm = dot(&b, &b).sqrt();
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        report.info("iterations", 0.0);
        return Ok(ConductivitySolution {
            field: ScalarField::zeros(&grid),
            iterations: 0,
            relative_residual: 0.0,
            energy: Vec::new(),
            report: report.finish(),
        });
    }
    let op = DivergenceOperator::assemble(k);
    let dims = grid.dims();
    let cap = 50 * dims.iter().max().copied().unwrap_or(1) + 500;

    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(&op.diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut energy = Vec::new();
    let mut iterations = 0;
    let mut rel = 1.0;
    while iterations < cap {
        op.apply(&p, &mut ap);
        let step = rz / dot(&p, &ap);
        x.par_iter_mut().zip(&p).for_each(|(x, p)| *x += step * p);
        r.par_iter_mut().zip(&ap).for_each(|(r, a)| *r -= step * a);
        iterations += 1;
        // Ax = b − r gives ½xᵀAx − bᵀx = −½ xᵀ(b + r).
        let e = -0.5 * x.iter().zip(&b).zip(&r).map(|((x, b), r)| x * (b + r)).sum::<f64>();
        energy.push(e);
        rel = dot(&r, &r).sqrt() / b_norm;
        if rel <= CG_TOLERANCE {
            break;
        }
        z.par_iter_mut()
            .zip(&r)
            .zip(&op.diag)
            .for_each(|((z, r), d)| *z = r / d);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.par_iter_mut().zip(&z).for_each(|(p, z)| *p = z + beta * *p);
    }
    if rel > CG_TOLERANCE {
        return Err(Error::NoConvergence {
            iterations,
            residual: rel,
        });
    }
    let scale = energy.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let increases = energy
        .windows(2)
        .filter(|w| w[1] > w[0] + 1e-13 * scale)
        .count();
    report.info("iterations", iterations as f64);
    report.check("relative_residual", rel, CG_TOLERANCE);
    report.check("energy_increases", increases as f64, 0.0);
    Ok(ConductivitySolution {
        field: ScalarField::new(grid, x)?,
        iterations,
        relative_residual: rel,
        energy,
        report: report.finish(),
    })
}

/// Solves the conductivity equation `div(φ² ∇w₀) = rhs`, `w₀ = 0` on `∂Ω`.
pub fn solve_conductivity(phi: &ScalarField, rhs: &ScalarField) -> Result<ConductivitySolution> {
    check_positive(phi)?;
    solve_divergence_form(&phi.map(|p| p * p), rhs)
}

/// Solves `(D + M^α) w = g`, i.e. `div w + α·w = −g₀`,
/// `curl w + w×α = g⃗`, by `w = w* − φ∇w₀` with `w* = φ R_Ω[g⃗/φ]` and
/// `div(φ²∇w₀) = φ g₀ + 2∇φ·w*`. The kernel component is zero.
pub fn solve_d_plus_m(
    g: &QuaternionField,
    coeff: &IrrotationalCoefficient,
    cfg: &VolumeOperatorConfig,
) -> Result<VekuaSolution> {
    cfg.validate()?;
    g.check_same_grid(coeff.phi())?;
    let mut report = SolveReport::new("D + M^alpha");
    let grid = g.grid().clone();
    let phi = coeff.phi();
    let g0 = g.scalar_part();
    let gv = g.vector_part();
    check_vekua_compatibility(&gv, coeff)?;

    let w_star = if is_zero(&gv) {
        VectorField::zeros(&grid)
    } else {
        let scaled = gv.zip_map(phi, |v, p| v / p)?;
        RightInverse::new(&scaled, cfg)?.on_grid().zip_map(phi, |v, p| v * p)?
    };
    let grad_phi = coeff.grad_phi();
    let rhs = ScalarField::new(
        grid.clone(),
        (0..grid.len())
            .map(|i| phi.get(i) * g0.get(i) + 2.0 * grad_phi.get(i).dot(&w_star.get(i)))
            .collect(),
    )?;
    let w0 = solve_conductivity(phi, &rhs)?;
    report.info("cg_iterations", w0.iterations as f64);
    report.merge("conductivity", w0.report.clone());
    let grad_w0 = lattice_gradient(&w0.field);
    let w = VectorField::new(
        grid.clone(),
        (0..grid.len())
            .map(|i| w_star.get(i) - grad_w0.get(i) * phi.get(i))
            .collect(),
    )?;

    let alpha = coeff.alpha();
    let div = fd_div(&w);
    let curl = fd_curl(&w);
    let div_res = ScalarField::new(
        grid.clone(),
        (0..grid.len())
            .map(|i| div.get(i) + alpha.get(i).dot(&w.get(i)) + g0.get(i))
            .collect(),
    )?;
    let curl_res = VectorField::new(
        grid.clone(),
        (0..grid.len())
            .map(|i| curl.get(i) + w.get(i).cross(&alpha.get(i)) - gv.get(i))
            .collect(),
    )?;
    record_residuals(&mut report, &grid, g, &div_res, &curl_res, cfg);
    Ok(VekuaSolution {
        field: w,
        report: report.finish(),
    })
}

/// Static medium: permittivity `ε`, permeability `μ`, charge density `ρ`
/// and current density `j`.
#[derive(Debug, Clone)]
pub struct MaxwellMedium {
    eps: ScalarField,
    mu: ScalarField,
    rho: ScalarField,
    j: VectorField,
}

impl MaxwellMedium {
    pub fn new(eps: ScalarField, mu: ScalarField, rho: ScalarField, j: VectorField) -> Result<Self> {
        eps.check_same_grid(&mu)?;
        eps.check_same_grid(&rho)?;
        eps.check_same_grid(&j)?;
        for (name, f) in [("eps", &eps), ("mu", &mu)] {
            let m = f.min_value();
            if !(m > TOL_POS) {
                return Err(Error::invalid(name, format!("must be bounded away from zero, minimum is {m:.3e}")));
            }
            if f.values().iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        let measured = solenoidal_defect(&j);
        if measured > TOL_COMPAT {
            return Err(Error::Compatibility {
                what: "current density is not divergence-free",
                measured,
                tolerance: TOL_COMPAT,
            });
        }
        Ok(Self { eps, mu, rho, j })
    }

    pub fn grid(&self) -> &Arc<VoxelGrid> {
        self.eps.grid()
    }

    pub fn eps(&self) -> &ScalarField {
        &self.eps
    }

    pub fn mu(&self) -> &ScalarField {
        &self.mu
    }

    pub fn rho(&self) -> &ScalarField {
        &self.rho
    }

    pub fn j(&self) -> &VectorField {
        &self.j
    }
}

#[derive(Debug, Clone)]
pub struct MaxwellSolution {
    pub e: VectorField,
    pub h: VectorField,
    /// Scalar potential of `E = −∇h₁`.
    pub h1: ScalarField,
    /// Gauge potential of `H = R_Ω[j] − ∇h₂`.
    pub h2: ScalarField,
    pub report: SolveReport,
}

/// `∇c / 2c`.
fn log_half_gradient(c: &ScalarField) -> VectorField {
    lattice_gradient(c).zip_map(c, |g, c| g / (2.0 * c)).expect("same grid")
}

/// `E = −∇h₁` with `div(ε∇h₁) = −ρ`, and `H = R_Ω[j] − ∇h₂` with
/// `div(μ∇h₂) = ∇μ·R_Ω[j]`, both potentials vanishing on `∂Ω`. The report
/// holds the residuals of `(D + M^{ε⃗})(√ε E) = −ρ/√ε` and
/// `(D + M^{μ⃗})(√μ H) = √μ j` relative to `‖ρ‖ + ‖j‖`.
pub fn solve_maxwell_static(medium: &MaxwellMedium, cfg: &VolumeOperatorConfig) -> Result<MaxwellSolution> {
    cfg.validate()?;
    let grid = medium.grid().clone();
    let mut report = SolveReport::new("static Maxwell");
    let (eps, mu, rho, j) = (&medium.eps, &medium.mu, &medium.rho, &medium.j);

    let h1 = solve_divergence_form(eps, &rho.map(|r| -r))?;
    report.merge("h1", h1.report.clone());
    let e = lattice_gradient(&h1.field).map(|g| -g);

    let rj = if is_zero(j) {
        VectorField::zeros(&grid)
    } else {
        RightInverse::new(j, cfg)?.on_grid()
    };
    let rhs2 = lattice_gradient(mu).dot(&rj)?;
    let h2 = solve_divergence_form(mu, &rhs2)?;
    report.merge("h2", h2.report.clone());
    let h = rj.sub(&lattice_gradient(&h2.field))?;

    let region = grid.accuracy_region();
    let scale = rho.norm_l2_on(&region) + j.norm_l2_on(&region);
    let tol = tolerances::tol_vekua(grid.spacing(), cfg.ray_nodes);

    let sqrt_eps = eps.map(f64::sqrt);
    let cal_e = e.zip_map(&sqrt_eps, |v, s| v * s)?;
    let res_e = apply_d_plus_m(&cal_e, &log_half_gradient(eps))?
        .zip_map(&rho.zip_map(&sqrt_eps, |r, s| r / s)?, |q, r| q + Quaternion::scalar(r))?;
    report.check("electric_residual", relative_on_region(&res_e, scale, &region), tol);

    let sqrt_mu = mu.map(f64::sqrt);
    let cal_h = h.zip_map(&sqrt_mu, |v, s| v * s)?;
    let res_h = apply_d_plus_m(&cal_h, &log_half_gradient(mu))?
        .zip_map(&j.zip_map(&sqrt_mu, |v, s| v * s)?, |q, v| q - Quaternion::vector(v))?;
    report.check("magnetic_residual", relative_on_region(&res_h, scale, &region), tol);

    Ok(MaxwellSolution {
        e,
        h,
        h1: h1.field,
        h2: h2.field,
        report: report.finish(),
    })
}
