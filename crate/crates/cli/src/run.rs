//! Scenario execution.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use starcurl::algebra::{fd_curl, fd_div, relative_error_on, FieldValue};
use starcurl::beltrami::{
    beltrami_neumann_bvp, beltrami_series, empirical_right_inverse_norm, operator_norm_bound,
    BeltramiConfig, BeltramiSolution, SeriesVariant,
};
use starcurl::bvp::{kernel_t0_diagnostic, right_inverse_curl_dirichlet, right_inverse_curl_neumann};
use starcurl::divcurl::{solve_div_curl, DivCurlData, RightInverse};
use starcurl::geometry::{build_ball, build_box, build_radial, voxelize};
use starcurl::potentials::{teodorescu_on_grid, VolumeOperatorConfig};
use starcurl::report::SolveReport;
use starcurl::testfields::{random_irrotational, random_poly, random_solenoidal, Bump};
use starcurl::tolerances::{tol_op, TOL_BVP};
use starcurl::vekua::{
    solve_d_minus_alpha, solve_d_plus_m, solve_divergence_form, solve_maxwell_static,
    IrrotationalCoefficient, MaxwellMedium,
};
use starcurl::{
    GridField, Quaternion, QuaternionField, ScalarField, Vec3, VectorField, VoxelGrid,
};

use crate::config::{
    BoundaryKind, DomainConfig, FieldSource, Format, RunConfig, Scenario, VekuaOperator,
};
use crate::error::{CliError, ConfigError, EXIT_OK, EXIT_SOLVER};
use crate::export::{export_field, field_from_table, read_csv};

/// Result of a completed run.
#[derive(Debug)]
pub struct Outcome {
    pub report: SolveReport,
    pub artifacts: Vec<PathBuf>,
}

impl Outcome {
    /// 0 when every asserted check passed, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.report.passed() {
            EXIT_OK
        } else {
            EXIT_SOLVER
        }
    }
}

/// A field to be written, with its column names.
enum Export {
    Scalar(ScalarField, [&'static str; 1]),
    Vector(VectorField, [&'static str; 3]),
}

struct ScenarioResult {
    report: SolveReport,
    fields: Vec<(&'static str, Export)>,
    tables: Vec<(&'static str, Vec<String>, Vec<Vec<f64>>)>,
}

pub fn build_grid(cfg: &RunConfig) -> Result<Arc<VoxelGrid>, CliError> {
    let domain = match &cfg.domain {
        DomainConfig::Ball {
            radius,
            center,
            refinement,
        } => build_ball(*radius, *center, *refinement),
        DomainConfig::Box {
            half_extents,
            center,
            facets_per_edge,
        } => build_box(*half_extents, *center, *facets_per_edge),
        DomainConfig::Radial {
            rho,
            center,
            refinement,
        } => build_radial(*center, *refinement, |d| rho.eval(d)),
    }
    .map_err(|e| ConfigError::new(None, format!("[domain]: {e}")))?;
    voxelize(&domain, cfg.n).map_err(|e| ConfigError::new(None, format!("[grid]: {e}")).into())
}

fn load<T: FieldValue>(src: &FieldSource, grid: &Arc<VoxelGrid>) -> Result<GridField<T>, CliError> {
    match src {
        FieldSource::Exprs(exprs) => {
            assert_eq!(exprs.len(), T::COMPONENTS);
            let cols: Vec<Vec<f64>> = exprs.iter().map(|e| e.eval_all(grid.centers())).collect();
            let values = (0..grid.len())
                .map(|i| {
                    let c: Vec<f64> = cols.iter().map(|col| col[i]).collect();
                    T::from_components(&c)
                })
                .collect();
            Ok(GridField::new(grid.clone(), values)?)
        }
        FieldSource::Csv(path) => {
            let table = read_csv(path)?;
            field_from_table(&table, grid)
                .map_err(|m| ConfigError::new(None, format!("{}: {m}", path.display())).into())
        }
    }
}

fn load_opt<T: FieldValue>(
    src: &Option<FieldSource>,
    grid: &Arc<VoxelGrid>,
) -> Result<Option<GridField<T>>, CliError> {
    src.as_ref().map(|s| load(s, grid)).transpose()
}

/// Runs the scenario and writes fields and reports to the output directory.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut report = SolveReport::new(cfg.scenario.name());
    let grid = build_grid(cfg)?;
    let result = match &cfg.scenario {
        Scenario::DivCurl {
            g0,
            g,
            boundary,
            degree,
        } => run_divcurl(cfg, &grid, g0, g, *boundary, *degree)?,
        Scenario::Beltrami { .. } => run_beltrami(cfg, &grid)?,
        Scenario::Vekua {
            operator,
            alpha,
            g0,
            g,
        } => run_vekua(cfg, &grid, *operator, alpha, g0, g)?,
        Scenario::Maxwell { eps, mu, rho, j } => {
            let medium = MaxwellMedium::new(load(eps, &grid)?, load(mu, &grid)?, load(rho, &grid)?, load(j, &grid)?)?;
            let sol = solve_maxwell_static(&medium, &cfg.quadrature)?;
            ScenarioResult {
                report: sol.report,
                fields: vec![
                    ("E", Export::Vector(sol.e, ["E1", "E2", "E3"])),
                    ("H", Export::Vector(sol.h, ["H1", "H2", "H3"])),
                ],
                tables: Vec::new(),
            }
        }
        Scenario::Verify { samples } => ScenarioResult {
            report: verify(&grid, &cfg.quadrature, *samples, cfg.seed)?,
            fields: Vec::new(),
            tables: Vec::new(),
        },
    };

    report.info("grid_n", cfg.n as f64);
    report.info("voxels", grid.len() as f64);
    report.info("h", grid.spacing());
    report.merge(cfg.scenario.name(), result.report);
    let report = report.finish().with_config(cfg.source.clone());

    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut artifacts = Vec::new();
    for (name, field) in &result.fields {
        for &format in &cfg.output.formats {
            let ext = match format {
                Format::Csv => "csv",
                Format::Vtk => "vtk",
            };
            let path = dir.join(format!("{name}.{ext}"));
            match field {
                Export::Scalar(f, c) => export_field(f, c, format, &path)?,
                Export::Vector(f, c) => export_field(f, c, format, &path)?,
            }
            artifacts.push(path);
        }
    }
    for (name, header, rows) in &result.tables {
        let path = dir.join(format!("{name}.csv"));
        write_table(&path, header, rows)?;
        artifacts.push(path);
    }
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    for (file, text) in [("report.json", json), ("report.txt", report.to_string())] {
        let path = dir.join(file);
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        artifacts.push(path);
    }
    Ok(Outcome { report, artifacts })
}

fn write_table(path: &Path, header: &[String], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::io(path, e.into());
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:.16e}"))).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// `‖fd_div w − g₀‖` and `‖fd_curl w − g‖` relative to `‖(g₀, g)‖`.
fn div_curl_residuals(
    report: &mut SolveReport,
    w: &VectorField,
    g0: Option<&ScalarField>,
    g: Option<&VectorField>,
    tol: f64,
) {
    let grid = w.grid();
    let region = grid.accuracy_region();
    let zero_s = ScalarField::zeros(grid);
    let zero_v = VectorField::zeros(grid);
    let g0 = g0.unwrap_or(&zero_s);
    let g = g.unwrap_or(&zero_v);
    let norm = g0.norm_l2_on(&region).hypot(g.norm_l2_on(&region));
    let scale = if norm > 0.0 { norm } else { 1.0 };
    let div = fd_div(w).sub(g0).expect("same grid").norm_l2_on(&region) / scale;
    let curl = fd_curl(w).sub(g).expect("same grid").norm_l2_on(&region) / scale;
    report.check("div_residual", div, tol);
    report.check("curl_residual", curl, tol);
}

fn run_divcurl(
    cfg: &RunConfig,
    grid: &Arc<VoxelGrid>,
    g0: &Option<FieldSource>,
    g: &Option<FieldSource>,
    boundary: BoundaryKind,
    degree: u32,
) -> Result<ScenarioResult, CliError> {
    let g0: Option<ScalarField> = load_opt(g0, grid)?;
    let g: Option<VectorField> = load_opt(g, grid)?;
    let vol = &cfg.quadrature;
    let tol = tol_op(grid.spacing(), vol.ray_nodes);
    let mut report = SolveReport::new("divcurl");
    let w = match boundary {
        BoundaryKind::Free => solve_div_curl(&DivCurlData::new(g0.clone(), g.clone()), vol)?.on_grid(),
        BoundaryKind::Neumann | BoundaryKind::Dirichlet => {
            if g0.is_some() {
                return Err(ConfigError::new(None, "boundary variants take curl data `g` only, not `g0`").into());
            }
            let g = g.as_ref().expect("config requires g0 or g");
            if boundary == BoundaryKind::Neumann {
                let r = right_inverse_curl_neumann(g, degree, vol)?;
                let mesh = grid.domain().boundary();
                let (before, after) = r.normal_traces()?;
                let b = mesh.l2_norm(&before)?;
                let a = mesh.l2_norm(&after)?;
                report.info("normal_trace_free", b / g.norm_l2());
                report.info("normal_trace_corrected", a / g.norm_l2());
                report.merge("fit", r.correction().report.clone());
                r.on_grid()
            } else {
                let r = right_inverse_curl_dirichlet(g, degree, vol)?;
                let max_bv = r.boundary_values().iter().map(|v| v.norm()).fold(0.0, f64::max);
                report.check("boundary_value_relative", max_bv / g.norm_l2(), TOL_BVP);
                report.merge("fit", r.correction().report.clone());
                r.on_grid()
            }
        }
    };
    div_curl_residuals(&mut report, &w, g0.as_ref(), g.as_ref(), tol);
    Ok(ScenarioResult {
        report: report.finish(),
        fields: vec![("w", Export::Vector(w, ["w1", "w2", "w3"]))],
        tables: Vec::new(),
    })
}

fn run_beltrami(cfg: &RunConfig, grid: &Arc<VoxelGrid>) -> Result<ScenarioResult, CliError> {
    let Scenario::Beltrami {
        g,
        a0,
        alpha0,
        alpha_limit,
        norm_samples,
        neumann,
        k_max,
        tail_tol,
        degree,
    } = &cfg.scenario
    else {
        unreachable!("dispatched on scenario kind")
    };
    let vol = &cfg.quadrature;
    let mut pre = SolveReport::new("admissibility");
    let limit = match alpha_limit {
        Some(l) => *l,
        None => {
            let coarse = voxelize(grid.domain(), cfg.n.min(12))?;
            let est = empirical_right_inverse_norm(&coarse, *norm_samples, cfg.seed, vol)?;
            pre.info("empirical_norm_ratio", est.ratio);
            est.alpha_limit
        }
    };
    pre.info("alpha_limit", limit);
    let bcfg = BeltramiConfig {
        k_max: *k_max,
        tail_tol: *tail_tol,
        variant: if *neumann {
            SeriesVariant::Neumann
        } else {
            SeriesVariant::Free
        },
        neumann_degree: *degree,
        ..BeltramiConfig::new(*alpha0, limit)
    };
    let sol: BeltramiSolution = match (g, a0) {
        (Some(g), _) => beltrami_series(&load(g, grid)?, &bcfg, vol)?,
        (None, Some(a0)) => {
            let nodes = &grid.domain().boundary().nodes;
            beltrami_neumann_bvp(&a0.eval_all(nodes), grid, &bcfg, vol)?
        }
        (None, None) => unreachable!("config requires g or a0"),
    };
    let mut report = SolveReport::new("beltrami");
    report.merge("admissibility", pre.finish());
    report.merge("series", sol.report);
    let mut rows = Vec::new();
    let mut prev: Option<f64> = None;
    for (k, t) in sol.terms.iter().enumerate() {
        let norm = t.norm_l2();
        let ratio = prev.map_or(f64::NAN, |p| if p > 0.0 { norm / p } else { f64::NAN });
        rows.push(vec![k as f64, norm, ratio]);
        prev = Some(norm);
    }
    Ok(ScenarioResult {
        report: report.finish(),
        fields: vec![("w", Export::Vector(sol.field, ["w1", "w2", "w3"]))],
        tables: vec![("terms", vec!["k".into(), "norm".into(), "ratio".into()], rows)],
    })
}

fn run_vekua(
    cfg: &RunConfig,
    grid: &Arc<VoxelGrid>,
    operator: VekuaOperator,
    alpha: &FieldSource,
    g0: &Option<FieldSource>,
    g: &Option<FieldSource>,
) -> Result<ScenarioResult, CliError> {
    let coeff = IrrotationalCoefficient::new(load(alpha, grid)?)?;
    let g0: ScalarField = load_opt(g0, grid)?.unwrap_or_else(|| ScalarField::zeros(grid));
    let g: VectorField = load_opt(g, grid)?.unwrap_or_else(|| VectorField::zeros(grid));
    let q = QuaternionField::from_parts(&g0, &g)?;
    let sol = match operator {
        VekuaOperator::DMinusAlpha => solve_d_minus_alpha(&q, &coeff, None, &cfg.quadrature)?,
        VekuaOperator::DPlusM => solve_d_plus_m(&q, &coeff, &cfg.quadrature)?,
    };
    Ok(ScenarioResult {
        report: sol.report,
        fields: vec![
            ("w", Export::Vector(sol.field, ["w1", "w2", "w3"])),
            ("phi", Export::Scalar(coeff.phi().clone(), ["phi"])),
        ],
        tables: Vec::new(),
    })
}

/// Harmonic degree of the Neumann correction in `verify`.
const NEUMANN_DEGREE: u32 = 10;

/// Largest accepted `‖γ_n R_{Ω,n} g‖ / ‖γ_n R_Ω g‖` in `verify`. On smooth
/// boundaries the remainder is the O(h) lattice error of the boundary
/// evaluation (0.17 on the ball at n = 16, 0.08 at n = 32).
const NEUMANN_TRACE_RATIO: f64 = 0.25;

/// Module invariants on the configured domain, with random data drawn from
/// `seed`.
pub fn verify(
    grid: &Arc<VoxelGrid>,
    vol: &VolumeOperatorConfig,
    samples: usize,
    seed: u64,
) -> Result<SolveReport, CliError> {
    let mut report = SolveReport::new("verify");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = grid.domain();
    let center = domain.center();
    let scale = 0.5 * domain.diameter();
    let tol = tol_op(grid.spacing(), vol.ray_nodes);
    let region = grid.accuracy_region();

    // algebra: e1 e2 = e3 and cyclic, e_i² = −1
    let e = [Vec3::x(), Vec3::y(), Vec3::z()].map(Quaternion::vector);
    let mut unit_err = 0.0f64;
    for i in 0..3 {
        let (a, b, c) = (e[i], e[(i + 1) % 3], e[(i + 2) % 3]);
        unit_err = unit_err.max((a * b - c).norm()).max((a * a + Quaternion::ONE).norm());
    }
    report.check("algebra.unit_products", unit_err, 0.0);

    // potentials: T[Dw] = w for w supported inside
    let bump = Bump::new(center, 0.6 * domain.boundary_distance(center));
    let q = Quaternion::new(rng.gen_range(-1.0..1.0), random_vec(&mut rng));
    let m = random_vec(&mut rng);
    let w = QuaternionField::from_fn(grid, |x| bump.quaternion_field(q, m, x));
    let dw = QuaternionField::from_fn(grid, |x| bump.quaternion_field_derivative(q, m, x));
    let all: Vec<usize> = (0..grid.len()).collect();
    let tdw = teodorescu_on_grid(&dw, vol.singular_correction);
    report.check("potentials.borel_pompeiu", relative_error_on(&tdw, &w, &all), tol);

    // t0 vanishes for curls of interior bumps
    let a = random_vec(&mut rng);
    let g = VectorField::from_fn(grid, |x| bump.curl_of(a, x));
    let probes: Vec<Vec3> = grid
        .accuracy_region()
        .iter()
        .step_by((grid.len() / 50).max(1))
        .map(|&i| grid.center(i))
        .collect();
    report.merge("bvp.kernel_t0", kernel_t0_diagnostic(&g, domain.boundary(), &probes, vol)?);

    // divcurl: right-inverse identity on random solenoidal fields
    let mut curl_max = 0.0f64;
    let mut div_max = 0.0f64;
    let mut trace_ratio = 0.0f64;
    for _ in 0..samples {
        let f = random_solenoidal(&mut rng, center, scale, 2);
        let g = VectorField::from_fn(grid, |x| f.eval(x));
        let inverse = RightInverse::new(&g, vol)?;
        let r = inverse.on_grid();
        let norm = g.norm_l2_on(&region);
        curl_max = curl_max.max(relative_error_on(&fd_curl(&r), &g, &region));
        div_max = div_max.max(fd_div(&r).norm_l2_on(&region) / norm);
        let n = starcurl::bvp::NeumannRightInverse::from_inverse(inverse, NEUMANN_DEGREE)?;
        let (before, after) = n.normal_traces()?;
        let mesh = domain.boundary();
        trace_ratio = trace_ratio.max(mesh.l2_norm(&after)? / mesh.l2_norm(&before)?);
    }
    report.check("divcurl.curl_residual_max", curl_max, tol);
    report.check("divcurl.div_residual_max", div_max, tol);
    report.check("bvp.neumann_trace_ratio_max", trace_ratio, NEUMANN_TRACE_RATIO);

    // beltrami: sampled ‖R‖ within the a priori bound (coarse grid)
    let coarse = voxelize(domain, grid.dims().into_iter().max().unwrap_or(12).min(12))?;
    let bound = operator_norm_bound(&coarse, 2.0, 20, seed, vol.singular_correction)?;
    let est = empirical_right_inverse_norm(&coarse, samples.max(5), seed, vol)?;
    report.info("beltrami.norm_bound", bound.bound_r);
    report.info("beltrami.empirical_norm", est.ratio);
    report.check("beltrami.empirical_over_bound", est.ratio / bound.bound_r, 1.0);

    // vekua: D − α with a gradient coefficient, conductivity solver
    let p = random_irrotational(&mut rng, center, scale, 2);
    let alpha = VectorField::from_fn(grid, |x| p.eval(x) * 0.5);
    let coeff = IrrotationalCoefficient::new(alpha)?;
    let c = random_vec(&mut rng);
    let gv = coeff.phi().map(|phi| c * phi);
    let gq = QuaternionField::from_parts(&ScalarField::zeros(grid), &gv)?;
    report.merge("vekua.d_minus_alpha", solve_d_minus_alpha(&gq, &coeff, None, vol)?.report);
    let k = random_poly(&mut rng, 2);
    let f = random_poly(&mut rng, 2);
    let kf = ScalarField::from_fn(grid, |x| 1.5 + 0.5 * (k.eval(x) / 4.0).tanh());
    let rhs = ScalarField::from_fn(grid, |x| f.eval(x));
    report.merge("vekua.conductivity", solve_divergence_form(&kf, &rhs)?.report);

    Ok(report.finish())
}

fn random_vec(rng: &mut ChaCha8Rng) -> Vec3 {
    Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}
