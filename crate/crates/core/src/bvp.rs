//! Boundary corrections of the right inverse of `curl`: the Neumann variant
//! `R_{Ω,n} = R_Ω + ∇h` with harmonic `h`, the Dirichlet variant
//! `R_{Ω,0} = t2 − ∇p` with biharmonic `p`, and the kernel-of-`t0`
//! diagnostic.
//!
//! The harmonic and biharmonic correctors are global polynomials fitted by
//! least squares at the boundary quadrature nodes.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::algebra::poly::{exponents_of_degree, Poly};
use crate::algebra::{Quaternion, QuaternionField, VectorField};
use crate::divcurl::{check_solenoidal, HarmonicGauge, RightInverse};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryMesh, StarDomain, VoxelGrid};
use crate::potentials::{t0, t_components, teodorescu, VolumeOperatorConfig};
use crate::report::SolveReport;
use crate::tolerances;
use crate::Vec3;

/// Largest accepted condition number of the column-scaled normal matrix.
const MAX_CONDITION: f64 = 1e13;

/// Homogeneous harmonic polynomials of degree `l`, as an orthonormal basis
/// (in coefficient space) of the kernel of `Δ: P_l → P_{l−2}`.
pub fn solid_harmonics(l: u32) -> Vec<Poly> {
    let monos = exponents_of_degree(l);
    if l < 2 {
        return monos.into_iter().map(|e| Poly::monomial(1.0, e)).collect();
    }
    let targets = exponents_of_degree(l - 2);
    let mut m = DMatrix::<f64>::zeros(targets.len(), monos.len());
    for (j, e) in monos.iter().enumerate() {
        for &(c, t) in Poly::monomial(1.0, *e).laplacian().terms() {
            let i = targets.iter().position(|x| *x == t).expect("degree l−2 monomial");
            m[(i, j)] += c;
        }
    }
    let eig = SymmetricEigen::new(m.transpose() * &m);
    let scale = eig.eigenvalues.amax().max(1.0);
    let mut order: Vec<usize> = (0..monos.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order
        .into_iter()
        .take(2 * l as usize + 1)
        .map(|k| {
            debug_assert!(eig.eigenvalues[k].abs() < 1e-9 * scale);
            let v = eig.eigenvectors.column(k);
            let mut p = Poly::zero();
            for (j, e) in monos.iter().enumerate() {
                if v[j].abs() > 1e-14 {
                    p.add_term(v[j], *e);
                }
            }
            p
        })
        .collect()
}

/// Polynomials in `ξ = (x − center)/scale`.
#[derive(Debug, Clone)]
pub struct PolyBasis {
    center: Vec3,
    scale: f64,
    polys: Vec<Poly>,
}

impl PolyBasis {
    fn new(center: Vec3, scale: f64, polys: Vec<Poly>) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::invalid("scale", format!("must be positive, got {scale}")));
        }
        Ok(Self {
            center,
            scale,
            polys,
        })
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn xi(&self, x: Vec3) -> Vec3 {
        (x - self.center) / self.scale
    }

    pub fn value(&self, k: usize, x: Vec3) -> f64 {
        self.polys[k].eval(self.xi(x))
    }

    pub fn gradient(&self, k: usize, x: Vec3) -> Vec3 {
        self.polys[k].gradient(self.xi(x)) / self.scale
    }
}

/// Solid harmonics of degrees `1..=degree` about the star center; the
/// constant mode is excluded, so the basis has `(degree+1)² − 1` elements.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    degree: u32,
    basis: PolyBasis,
}

impl HarmonicBasis {
    pub fn new(degree: u32, center: Vec3, scale: f64) -> Result<Self> {
        if degree == 0 {
            return Err(Error::invalid("degree", "harmonic basis needs degree ≥ 1"));
        }
        let polys = (1..=degree).flat_map(solid_harmonics).collect();
        Ok(Self {
            degree,
            basis: PolyBasis::new(center, scale, polys)?,
        })
    }

    /// Basis centered at the star center of `domain`, scaled by its largest
    /// boundary distance.
    pub fn for_domain(domain: &StarDomain, degree: u32) -> Result<Self> {
        Self::new(degree, domain.center(), boundary_radius(domain))
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn basis(&self) -> &PolyBasis {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }
}

/// Almansi basis `{h} ∪ {|ξ|² h}` with harmonic `h`, total degree
/// `≤ degree`, constant excluded.
#[derive(Debug, Clone)]
pub struct BiharmonicBasis {
    degree: u32,
    basis: PolyBasis,
}

impl BiharmonicBasis {
    pub fn new(degree: u32, center: Vec3, scale: f64) -> Result<Self> {
        if degree == 0 {
            return Err(Error::invalid("degree", "biharmonic basis needs degree ≥ 1"));
        }
        let r2 = Poly::monomial(1.0, [2, 0, 0])
            .add(&Poly::monomial(1.0, [0, 2, 0]))
            .add(&Poly::monomial(1.0, [0, 0, 2]));
        let mut polys: Vec<Poly> = (1..=degree).flat_map(solid_harmonics).collect();
        if degree >= 2 {
            polys.extend((0..=degree - 2).flat_map(solid_harmonics).map(|h| r2.mul(&h)));
        }
        Ok(Self {
            degree,
            basis: PolyBasis::new(center, scale, polys)?,
        })
    }

    pub fn for_domain(domain: &StarDomain, degree: u32) -> Result<Self> {
        Self::new(degree, domain.center(), boundary_radius(domain))
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn basis(&self) -> &PolyBasis {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }
}

fn boundary_radius(domain: &StarDomain) -> f64 {
    let c = domain.center();
    domain
        .boundary()
        .vertices
        .iter()
        .map(|v| (v - c).norm())
        .fold(0.0, f64::max)
}

/// A fitted polynomial `Σ c_k φ_k` with its fit diagnostics.
#[derive(Debug, Clone)]
pub struct PolyFit {
    basis: PolyBasis,
    coeffs: Vec<f64>,
    pub report: SolveReport,
}

impl PolyFit {
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self, x: Vec3) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * self.basis.value(k, x))
            .sum()
    }

    pub fn gradient(&self, x: Vec3) -> Vec3 {
        self.coeffs
            .iter()
            .enumerate()
            .fold(Vec3::zeros(), |acc, (k, c)| acc + self.basis.gradient(k, x) * *c)
    }

    /// The fit as one polynomial in `ξ = (x − center)/scale`.
    pub fn poly(&self) -> Poly {
        self.basis
            .polys
            .iter()
            .zip(&self.coeffs)
            .fold(Poly::zero(), |acc, (p, c)| acc.add(&p.scale(*c)))
    }
}

impl HarmonicGauge for PolyFit {
    fn value(&self, x: Vec3) -> f64 {
        PolyFit::value(self, x)
    }

    fn gradient(&self, x: Vec3) -> Vec3 {
        PolyFit::gradient(self, x)
    }
}

/// Least squares `min ‖A c − b‖` via column-scaled normal equations.
/// Returns the coefficients and the condition estimate of the scaled
/// normal matrix.
fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let mut scaled = a.clone();
    let mut col_scale = DVector::zeros(a.ncols());
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        let n = col.norm();
        if n == 0.0 {
            return Err(Error::RankDeficient {
                condition: f64::INFINITY,
            });
        }
        col /= n;
        col_scale[j] = 1.0 / n;
    }
    let normal = scaled.transpose() * &scaled;
    let eig = SymmetricEigen::new(normal.clone());
    let (lo, hi) = (eig.eigenvalues.min(), eig.eigenvalues.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::RankDeficient { condition });
    }
    let chol = normal
        .cholesky()
        .ok_or(Error::RankDeficient { condition })?;
    let y = chol.solve(&(scaled.transpose() * b));
    Ok((y.component_mul(&col_scale), condition))
}

/// Least-squares solution of `Δh = 0`, `∂h/∂η = a0` on the mesh nodes, with
/// the constant mode pinned to zero.
pub fn solve_laplace_neumann(a0: &[f64], basis: &HarmonicBasis, mesh: &BoundaryMesh) -> Result<PolyFit> {
    let area = mesh.total_area();
    let norm = mesh.l2_norm(a0)?;
    let integral = mesh.surface_integral(a0)?;
    let mut report = SolveReport::new("laplace_neumann");
    if norm == 0.0 {
        report.info("condition", 1.0);
        report.info("boundary_residual", 0.0);
        return Ok(PolyFit {
            basis: basis.basis.clone(),
            coeffs: vec![0.0; basis.len()],
            report: report.finish(),
        });
    }
    let measured = integral.abs() / (norm * area.sqrt());
    if measured > tolerances::TOL_COMPAT {
        return Err(Error::Compatibility {
            what: "Neumann datum has nonzero mean",
            measured,
            tolerance: tolerances::TOL_COMPAT,
        });
    }
    let b = &basis.basis;
    let rows = mesh.len();
    let mut a = DMatrix::zeros(rows, b.len());
    let mut rhs = DVector::zeros(rows);
    for t in 0..rows {
        let w = mesh.areas[t].sqrt();
        for k in 0..b.len() {
            a[(t, k)] = w * b.gradient(k, mesh.nodes[t]).dot(&mesh.normals[t]);
        }
        rhs[t] = w * a0[t];
    }
    let (c, condition) = least_squares(&a, &rhs)?;
    let fit = PolyFit {
        basis: b.clone(),
        coeffs: c.iter().copied().collect(),
        report: SolveReport::new(""),
    };
    let resid: Vec<f64> = (0..rows)
        .map(|t| fit.gradient(mesh.nodes[t]).dot(&mesh.normals[t]) - a0[t])
        .collect();
    report.info("condition", condition);
    report.info("compatibility", measured);
    report.info("boundary_residual", mesh.l2_norm(&resid)? / norm);
    Ok(PolyFit {
        report: report.finish(),
        ..fit
    })
}

/// Least-squares biharmonic `p` with `∇p = grad_data` on the mesh nodes,
/// constant pinned to zero.
pub fn solve_biharmonic_dirichlet(
    grad_data: &[Vec3],
    basis: &BiharmonicBasis,
    mesh: &BoundaryMesh,
) -> Result<PolyFit> {
    let norm = mesh.l2_norm_vec(grad_data)?;
    let mut report = SolveReport::new("biharmonic_dirichlet");
    if norm == 0.0 {
        report.info("condition", 1.0);
        report.info("boundary_residual", 0.0);
        return Ok(PolyFit {
            basis: basis.basis.clone(),
            coeffs: vec![0.0; basis.len()],
            report: report.finish(),
        });
    }
    let b = &basis.basis;
    let rows = 3 * mesh.len();
    let mut a = DMatrix::zeros(rows, b.len());
    let mut rhs = DVector::zeros(rows);
    for t in 0..mesh.len() {
        let w = mesh.areas[t].sqrt();
        for k in 0..b.len() {
            let g = b.gradient(k, mesh.nodes[t]);
            for d in 0..3 {
                a[(3 * t + d, k)] = w * g[d];
            }
        }
        for d in 0..3 {
            rhs[3 * t + d] = w * grad_data[t][d];
        }
    }
    let (c, condition) = least_squares(&a, &rhs)?;
    let fit = PolyFit {
        basis: b.clone(),
        coeffs: c.iter().copied().collect(),
        report: SolveReport::new(""),
    };
    let resid: Vec<Vec3> = (0..mesh.len())
        .map(|t| fit.gradient(mesh.nodes[t]) - grad_data[t])
        .collect();
    report.info("condition", condition);
    report.info("boundary_residual", mesh.l2_norm_vec(&resid)? / norm);
    Ok(PolyFit {
        report: report.finish(),
        ..fit
    })
}

fn boundary_values(mesh: &BoundaryMesh, f: impl Fn(Vec3) -> Vec3 + Sync) -> Vec<Vec3> {
    mesh.nodes.par_iter().map(|x| f(*x)).collect()
}

/// Neumann-corrected right inverse `R_{Ω,n}[g] = R_Ω[g] + ∇h`, where `h` is
/// harmonic with `∂h/∂η = −R_Ω[g]·η` on the boundary.
#[derive(Debug, Clone)]
pub struct NeumannRightInverse {
    inverse: RightInverse,
    correction: PolyFit,
}

pub fn right_inverse_curl_neumann(
    g: &VectorField,
    degree: u32,
    cfg: &VolumeOperatorConfig,
) -> Result<NeumannRightInverse> {
    let inverse = RightInverse::new(g, cfg)?;
    NeumannRightInverse::from_inverse(inverse, degree)
}

impl NeumannRightInverse {
    pub fn from_inverse(inverse: RightInverse, degree: u32) -> Result<Self> {
        let domain = inverse.grid().domain();
        let mesh = domain.boundary();
        let basis = HarmonicBasis::for_domain(domain, degree)?;
        let r = boundary_values(mesh, |x| inverse.at(x));
        let a0: Vec<f64> = mesh.normal_trace(&r)?.into_iter().map(|v| -v).collect();
        let correction = solve_laplace_neumann(&a0, &basis, mesh)?;
        Ok(Self { inverse, correction })
    }

    pub fn right_inverse(&self) -> &RightInverse {
        &self.inverse
    }

    /// The harmonic corrector `h`.
    pub fn correction(&self) -> &PolyFit {
        &self.correction
    }

    pub fn at(&self, x: Vec3) -> Vec3 {
        self.inverse.at(x) + self.correction.gradient(x)
    }

    pub fn on_grid(&self) -> VectorField {
        self.inverse
            .on_grid()
            .map_with_position(|x, v| v + self.correction.gradient(x))
    }

    /// `∇h` at every voxel center.
    pub fn correction_on_grid(&self) -> VectorField {
        VectorField::from_fn(self.inverse.grid(), |x| self.correction.gradient(x))
    }

    /// Normal traces of `R_Ω[g]` and `R_{Ω,n}[g]` on the boundary nodes.
    pub fn normal_traces(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let mesh = self.inverse.grid().domain().boundary();
        let before = mesh.normal_trace(&boundary_values(mesh, |x| self.inverse.at(x)))?;
        let after = before
            .iter()
            .zip(mesh.nodes.iter().zip(&mesh.normals))
            .map(|(b, (x, n))| b + self.correction.gradient(*x).dot(n))
            .collect();
        Ok((before, after))
    }
}

/// Relative size `‖g·η‖₂,∂Ω / ‖g‖₂,Ω` of the normal trace of a grid field,
/// with boundary values from [`crate::algebra::GridField::sample`].
pub fn relative_normal_trace(g: &VectorField) -> Result<f64> {
    let norm = g.norm_l2();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let mesh = g.grid().domain().boundary();
    let trace = mesh.normal_trace(&boundary_values(mesh, |x| g.sample(x)))?;
    Ok(mesh.l2_norm(&trace)? / norm)
}

/// Threshold on `max|t0| / ‖g‖₂` and on the relative normal trace below
/// which the diagnostic calls a quantity small.
pub const KERNEL_T0_THRESHOLD: f64 = 1e-3;

/// Compares `max|t0(g, probe)|` and `‖g·η‖` on the boundary, both relative
/// to `‖g‖₂`. The check `t0_iff_trace` fails when exactly one of them is
/// small.
pub fn kernel_t0_diagnostic(g: &VectorField, mesh: &BoundaryMesh, probes: &[Vec3], cfg: &VolumeOperatorConfig) -> Result<SolveReport> {
    let mut report = SolveReport::new("kernel_t0");
    let norm = g.norm_l2();
    let max_t0 = probes
        .par_iter()
        .map(|x| t0(g, *x, cfg.singular_correction).abs())
        .reduce(|| 0.0, f64::max);
    let trace = mesh.normal_trace(&boundary_values(mesh, |x| g.sample(x)))?;
    let trace_norm = mesh.l2_norm(&trace)?;
    let (rt0, rtr) = if norm > 0.0 {
        (max_t0 / norm, trace_norm / norm)
    } else {
        (0.0, 0.0)
    };
    report.info("max_t0_relative", rt0);
    report.info("normal_trace_relative", rtr);
    let small_t0 = rt0 <= KERNEL_T0_THRESHOLD;
    let small_trace = rtr <= KERNEL_T0_THRESHOLD;
    report.check("t0_iff_trace", if small_t0 == small_trace { 0.0 } else { 1.0 }, 0.5);
    Ok(report.finish())
}

/// Dirichlet-corrected right inverse `R_{Ω,0}[g] = t2(g) − ∇p`, with
/// biharmonic `p` fitted to `∇p = t2(g)` on the boundary.
#[derive(Debug, Clone)]
pub struct DirichletRightInverse {
    g: VectorField,
    t2: VectorField,
    correction: PolyFit,
    cfg: VolumeOperatorConfig,
}

pub fn right_inverse_curl_dirichlet(
    g: &VectorField,
    degree: u32,
    cfg: &VolumeOperatorConfig,
) -> Result<DirichletRightInverse> {
    cfg.validate()?;
    check_solenoidal(g, tolerances::TOL_COMPAT)?;
    let measured = relative_normal_trace(g)?;
    if measured > tolerances::TOL_BVP {
        return Err(Error::Compatibility {
            what: "curl datum has nonzero normal trace",
            measured,
            tolerance: tolerances::TOL_BVP,
        });
    }
    let grid = g.grid();
    let domain = grid.domain();
    let mesh = domain.boundary();
    let basis = BiharmonicBasis::for_domain(domain, degree)?;
    let trace = boundary_values(mesh, |x| t_components(None, Some(g), x, cfg.singular_correction).t2);
    let correction = solve_biharmonic_dirichlet(&trace, &basis, mesh)?;
    let t2 = crate::potentials::t2_on_grid(g, cfg.singular_correction);
    Ok(DirichletRightInverse {
        g: g.clone(),
        t2,
        correction,
        cfg: *cfg,
    })
}

impl DirichletRightInverse {
    pub fn grid(&self) -> &Arc<VoxelGrid> {
        self.g.grid()
    }

    /// The biharmonic corrector `p`.
    pub fn correction(&self) -> &PolyFit {
        &self.correction
    }

    pub fn at(&self, x: Vec3) -> Vec3 {
        t_components(None, Some(&self.g), x, self.cfg.singular_correction).t2 - self.correction.gradient(x)
    }

    pub fn on_grid(&self) -> VectorField {
        self.t2
            .map_with_position(|x, v| v - self.correction.gradient(x))
    }

    /// `R_{Ω,0}[g]` at the boundary nodes.
    pub fn boundary_values(&self) -> Vec<Vec3> {
        boundary_values(self.grid().domain().boundary(), |x| self.at(x))
    }

    /// `T_Ω[Dw](x)` for `w = R_{Ω,0}[g]`, with `Dw = −div w + g`. For `w`
    /// vanishing on the boundary this is the zero extension of `w`, so it
    /// is small at exterior points.
    pub fn exterior_value(&self, w: &VectorField, x: Vec3) -> Result<Quaternion> {
        let div = crate::algebra::fd_div(w);
        let dw = QuaternionField::from_parts(&div.scale(-1.0), &self.g)?;
        Ok(teodorescu(&dw, x, self.cfg.singular_correction))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::relative_error_on;
    use crate::geometry::{build_ball, build_box, voxelize};
    use crate::testfields::Bump;

    fn ball_domain() -> StarDomain {
        build_ball(1.0, Vec3::zeros(), 3).unwrap()
    }

    #[test]
    fn solid_harmonic_counts_and_harmonicity() {
        for l in 0..7 {
            let hs = solid_harmonics(l);
            assert_eq!(hs.len() as u32, 2 * l + 1);
            for h in &hs {
                assert!(h.laplacian().terms().iter().all(|(c, _)| c.abs() < 1e-12));
            }
        }
        let b = HarmonicBasis::new(6, Vec3::zeros(), 1.0).unwrap();
        assert_eq!(b.len(), 48);
    }

    #[test]
    fn biharmonic_basis_satisfies_bilaplace() {
        let b = BiharmonicBasis::new(5, Vec3::zeros(), 1.0).unwrap();
        for p in b.basis().polys() {
            assert!(p.laplacian().laplacian().terms().iter().all(|(c, _)| c.abs() < 1e-10));
        }
    }

    #[test]
    fn neumann_fit_of_linear_datum() {
        let d = ball_domain();
        let m = d.boundary();
        let c = Vec3::new(1.0, -2.0, 0.5);
        let a0: Vec<f64> = m.normals.iter().map(|n| n.dot(&c)).collect();
        let basis = HarmonicBasis::for_domain(&d, 4).unwrap();
        let h = solve_laplace_neumann(&a0, &basis, m).unwrap();
        let x = Vec3::new(0.2, 0.3, -0.1);
        assert!((h.gradient(x) - c).norm() < 1e-10);
        assert!((h.value(x) - c.dot(&x)).abs() < 1e-10);
        assert!(h.report.get("boundary_residual").unwrap() < 1e-10);
    }

    #[test]
    fn neumann_fit_of_quadratic_datum() {
        // ∂(x₁x₂/2)/∂η = x₁x₂ on the unit sphere
        let d = ball_domain();
        let m = d.boundary();
        let a0: Vec<f64> = m.nodes.iter().map(|x| x.x * x.y).collect();
        let h = solve_laplace_neumann(&a0, &HarmonicBasis::for_domain(&d, 2).unwrap(), m).unwrap();
        assert!(h.report.get("boundary_residual").unwrap() < 1e-2);
        let x = Vec3::new(0.3, 0.4, 0.1);
        assert!((h.value(x) - 0.5 * x.x * x.y).abs() < 1e-10);
    }

    #[test]
    fn neumann_zero_datum_and_incompatible_datum() {
        let d = ball_domain();
        let m = d.boundary();
        let basis = HarmonicBasis::for_domain(&d, 3).unwrap();
        let h = solve_laplace_neumann(&vec![0.0; m.len()], &basis, m).unwrap();
        assert!(h.coeffs().iter().all(|c| *c == 0.0));
        let err = solve_laplace_neumann(&vec![1.0; m.len()], &basis, m).unwrap_err();
        assert!(err.is_compatibility());
    }

    #[test]
    fn biharmonic_fits() {
        let d = ball_domain();
        let m = d.boundary();
        let basis = BiharmonicBasis::for_domain(&d, 3).unwrap();
        let zero = solve_biharmonic_dirichlet(&vec![Vec3::zeros(); m.len()], &basis, m).unwrap();
        assert_eq!(zero.value(Vec3::new(0.1, 0.2, 0.3)), 0.0);
        let c = Vec3::new(0.5, 1.0, -1.0);
        let p = solve_biharmonic_dirichlet(&vec![c; m.len()], &basis, m).unwrap();
        let x = Vec3::new(0.1, -0.2, 0.3);
        assert!((p.value(x) - c.dot(&x)).abs() < 1e-10);
        // ∇(|x|²x₁) = (|x|² + 2x₁², 2x₁x₂, 2x₁x₃)
        let data: Vec<Vec3> = m
            .nodes
            .iter()
            .map(|y| Vec3::new(y.norm_squared() + 2.0 * y.x * y.x, 2.0 * y.x * y.y, 2.0 * y.x * y.z))
            .collect();
        let p = solve_biharmonic_dirichlet(&data, &basis, m).unwrap();
        assert!(p.report.get("boundary_residual").unwrap() < 1e-2);
        assert!((p.value(x) - x.norm_squared() * x.x).abs() < 1e-8);
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert!(matches!(least_squares(&a, &b), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn neumann_correction_of_constant_is_negligible() {
        let grid = voxelize(&ball_domain(), 20).unwrap();
        let c = Vec3::new(1.0, -0.5, 2.0);
        let g = VectorField::constant(&grid, c);
        let n = right_inverse_curl_neumann(&g, 6, &VolumeOperatorConfig::default()).unwrap();
        let dh = n.correction_on_grid();
        assert!(dh.norm_l2() < 1e-2 * g.norm_l2(), "{}", dh.norm_l2() / g.norm_l2());
    }

    #[test]
    fn neumann_correction_is_harmonic_gradient_on_box() {
        let d = build_box(Vec3::new(1.0, 0.8, 0.6), Vec3::zeros(), 4).unwrap();
        let grid = voxelize(&d, 16).unwrap();
        let g = VectorField::constant(&grid, Vec3::new(0.3, 1.0, -0.4));
        let n = right_inverse_curl_neumann(&g, 6, &VolumeOperatorConfig::default()).unwrap();
        let (before, after) = n.normal_traces().unwrap();
        let m = d.boundary();
        assert!(m.l2_norm(&after).unwrap() < 0.1 * m.l2_norm(&before).unwrap());
        let p = n.correction().poly();
        let coef = p.terms().iter().map(|(c, _)| c.abs()).fold(0.0, f64::max);
        assert!(coef > 0.0);
        assert!(p.laplacian().terms().iter().all(|(c, _)| c.abs() < 1e-10 * coef));
    }

    #[test]
    fn dirichlet_variant_for_interior_bump() {
        let grid = voxelize(&ball_domain(), 24).unwrap();
        let bump = Bump::new(Vec3::new(0.05, -0.05, 0.0), 0.8).with_power(3);
        let a = Vec3::new(0.3, -1.0, 0.5);
        let g = VectorField::from_fn(&grid, |x| bump.curl_of(a, x));
        let cfg = VolumeOperatorConfig::default();
        let r = right_inverse_curl_dirichlet(&g, 6, &cfg).unwrap();
        let gn = g.norm_l2();
        let m = grid.domain().boundary();
        let bv = m.l2_norm_vec(&r.boundary_values()).unwrap();
        assert!(bv < 1e-2 * gn, "{}", bv / gn);
        let w = r.on_grid();
        let region = grid.accuracy_region();
        let curl = crate::algebra::fd_curl(&w);
        let tol = tolerances::tol_op(grid.spacing(), cfg.ray_nodes);
        assert!(relative_error_on(&curl, &g, &region) < tol);
        let outside = r.exterior_value(&w, Vec3::new(1.2, 0.3, 0.0)).unwrap();
        assert!(outside.norm() < 1e-2 * gn);
    }

    #[test]
    fn dirichlet_rejects_nonzero_trace() {
        let grid = voxelize(&ball_domain(), 12).unwrap();
        let g = VectorField::constant(&grid, Vec3::x());
        let err = right_inverse_curl_dirichlet(&g, 4, &VolumeOperatorConfig::default()).unwrap_err();
        assert!(err.is_compatibility());
    }

    #[test]
    fn kernel_diagnostic_cases() {
        let d = ball_domain();
        let grid = voxelize(&d, 16).unwrap();
        let probes: Vec<Vec3> = grid.interior_at_depth(0.3).iter().step_by(17).map(|&i| grid.center(i)).collect();
        let cfg = VolumeOperatorConfig::default();
        let c = VectorField::constant(&grid, Vec3::new(1.0, 0.0, 0.5));
        let r = kernel_t0_diagnostic(&c, d.boundary(), &probes, &cfg).unwrap();
        assert!(r.passed());
        assert!(r.get("max_t0_relative").unwrap() > 1e-2);
        let bump = Bump::new(Vec3::zeros(), 0.6);
        let b = VectorField::from_fn(&grid, |x| bump.curl_of(Vec3::z(), x));
        let r = kernel_t0_diagnostic(&b, d.boundary(), &probes, &cfg).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.get("normal_trace_relative").unwrap() == 0.0);
    }
}
