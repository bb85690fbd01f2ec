//! Acceptance suite. Runs every criterion in order, prints one `PASS`/`FAIL`
//! line each to stdout (bypassing the test harness capture) and fails if any
//! criterion failed.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use starcurl::algebra::{fd_curl, fd_div, relative_error_on};
use starcurl::beltrami::{beltrami_series, empirical_right_inverse_norm, BeltramiConfig};
use starcurl::bvp::{right_inverse_curl_dirichlet, right_inverse_curl_neumann};
use starcurl::divcurl::RightInverse;
use starcurl::geometry::{build_ball, build_box, voxelize};
use starcurl::potentials::{single_layer, t0_on_grid, teodorescu, teodorescu_on_grid, VolumeOperatorConfig};
use starcurl::testfields::{random_solenoidal, Bump};
use starcurl::tolerances::{tol_op, tol_vekua, TOL_BELTRAMI};
use starcurl::vekua::{solve_conductivity, solve_maxwell_static, MaxwellMedium};
use starcurl::{Quaternion, QuaternionField, ScalarField, Vec3, VectorField, VoxelGrid};

const TEODORESCU_TOL: f64 = 0.05;
const HALVING_RANGE: (f64, f64) = (0.5 * 0.7, 0.5 * 1.3);
const RUNTIME_TARGET_S: f64 = 60.0;
const ITERATED_TOL: f64 = 0.05;
const KERNEL_T0_TOL: f64 = 1e-3;
const T0_CONSTANT_TOL: f64 = 0.05;
const T0_PROBES: usize = 50;
const NEUMANN_REDUCTION: f64 = 10.0;
const NEUMANN_CONSTANT_TOL: f64 = 1e-3;
const NEUMANN_DEGREE: u32 = 10;
const DIRICHLET_TOL: f64 = 1e-2;
const DIRICHLET_DEGREE: u32 = 6;
const BELTRAMI_RATIO: f64 = 0.7;
const BELTRAMI_TERM_TOL: f64 = 0.05;
const MIN_ORDER: f64 = 1.8;
const MAXWELL_H_TOL: f64 = 0.05;

struct Outcome {
    pass: bool,
    detail: String,
}

fn ball(n: usize) -> Arc<VoxelGrid> {
    voxelize(&build_ball(1.0, Vec3::zeros(), 3).unwrap(), n).unwrap()
}

fn unit_box(n: usize) -> Arc<VoxelGrid> {
    voxelize(&build_box(Vec3::new(1.0, 0.8, 0.6), Vec3::zeros(), 4).unwrap(), n).unwrap()
}

/// `max |a − b| / max |b|` over the listed voxels.
fn max_relative<F: Fn(Vec3) -> Vec3>(w: &VectorField, exact: F, region: &[usize]) -> f64 {
    let grid = w.grid();
    let mut err = 0.0f64;
    let mut scale = 0.0f64;
    for &i in region {
        let e = exact(grid.center(i));
        err = err.max((w.get(i) - e).norm());
        scale = scale.max(e.norm());
    }
    err / scale
}

/// Least-squares slope of `log e` against `log h`.
fn observed_order(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let lx: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn random_vec(rng: &mut ChaCha8Rng) -> Vec3 {
    Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// `T_Ω[c] = (x·c − x×c)/3` on the unit ball.
fn teodorescu_constant(c: Vec3, x: Vec3) -> Quaternion {
    Quaternion::new(x.dot(&c) / 3.0, -x.cross(&c) / 3.0)
}

/// Displayed value of `R_Ω[R_Ω[c]]` on the unit ball.
fn iterated_displayed(c: Vec3, x: Vec3) -> Vec3 {
    let r2 = x.norm_squared();
    -c * (0.25 * (r2 - 1.0))
        - 0.25 * Vec3::new(c.x * (x.x * x.x - 1.0), c.y * (x.y * x.y - 1.0), c.z * (x.z * x.z - 1.0))
}

/// `R_Ω[R_Ω[c]]` from `L[x_k] = x_k (r²/10 − 1/6)` on the unit ball.
fn iterated_derived(c: Vec3, x: Vec3) -> Vec3 {
    x * (x.dot(&c) / 10.0) - c * (x.norm_squared() / 5.0) + c / 6.0
}

fn a01_teodorescu_closed_form() -> Outcome {
    let c = Vec3::new(0.3, -0.4, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let probes: Vec<Vec3> = (0..100)
        .map(|_| loop {
            let x = random_vec(&mut rng) * 0.8;
            if x.norm() <= 0.8 {
                break x;
            }
        })
        .collect();
    let cfg = VolumeOperatorConfig::default();
    let mut errors = Vec::new();
    let mut elapsed = 0.0;
    for n in [16, 32] {
        let start = Instant::now();
        let grid = ball(n);
        let w = QuaternionField::constant(&grid, Quaternion::vector(c));
        let mut err = 0.0f64;
        let mut scale = 0.0f64;
        for &x in &probes {
            let exact = teodorescu_constant(c, x);
            err = err.max((teodorescu(&w, x, cfg.singular_correction) - exact).norm());
            scale = scale.max(exact.norm());
        }
        errors.push(err / scale);
        elapsed = start.elapsed().as_secs_f64();
    }
    let ratio = errors[1] / errors[0];
    let pass = errors[1] <= TEODORESCU_TOL
        && (HALVING_RANGE.0..=HALVING_RANGE.1).contains(&ratio)
        && elapsed <= RUNTIME_TARGET_S;
    let detail = format!(
        "max rel error {:.3e} (n=16), {:.3e} (n=32, tol {TEODORESCU_TOL}); ratio {ratio:.3} (want {:.2}..{:.2}); n=32 time {elapsed:.1} s",
        errors[0], errors[1], HALVING_RANGE.0, HALVING_RANGE.1
    );
    Outcome { pass, detail }
}

fn a02_right_inverse_identity() -> Outcome {
    let cfg = VolumeOperatorConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = Vec::new();
    for grid in [ball(24), unit_box(24)] {
        let region = grid.accuracy_region();
        let tol = tol_op(grid.spacing(), cfg.ray_nodes);
        let (mut curl, mut div) = (0.0f64, 0.0f64);
        for _ in 0..20 {
            let f = random_solenoidal(&mut rng, Vec3::zeros(), 1.0, 2);
            let g = VectorField::from_fn(&grid, |x| f.eval(x));
            let r = RightInverse::new(&g, &cfg).unwrap().on_grid();
            let norm = g.norm_l2_on(&region);
            curl = curl.max(fd_curl(&r).sub(&g).unwrap().norm_l2_on(&region) / norm);
            div = div.max(fd_div(&r).norm_l2_on(&region) / norm);
        }
        worst.push((curl, div, tol));
    }
    let pass = worst.iter().all(|(c, d, t)| c <= t && d <= t);
    let detail = format!(
        "ball curl {:.3e} div {:.3e}; box curl {:.3e} div {:.3e}; tol_op {:.3e}",
        worst[0].0, worst[0].1, worst[1].0, worst[1].1, worst[0].2
    );
    Outcome { pass, detail }
}

fn a03_iterated_right_inverse_of_constant() -> Outcome {
    let grid = ball(24);
    let cfg = VolumeOperatorConfig::default();
    let c = Vec3::new(0.3, -0.4, 1.0);
    let g = VectorField::constant(&grid, c);
    let r1 = RightInverse::new(&g, &cfg).unwrap().on_grid();
    let r2 = RightInverse::new(&r1, &cfg).unwrap().on_grid();
    let region = grid.accuracy_region();
    let displayed = max_relative(&r2, |x| iterated_displayed(c, x), &region);
    let derived = max_relative(&r2, |x| iterated_derived(c, x), &region);
    let pass = displayed <= ITERATED_TOL;
    let detail = format!(
        "max rel error vs displayed formula {displayed:.3e} (tol {ITERATED_TOL}); vs x(x·c)/10 − c|x|²/5 + c/6: {derived:.3e}"
    );
    Outcome { pass, detail }
}

fn a04_kernel_of_t0() -> Outcome {
    let grid = ball(32);
    let cfg = VolumeOperatorConfig::default();
    let region = grid.accuracy_region();
    let bump = Bump::new(Vec3::new(0.05, -0.05, 0.0), 0.6);
    let a = Vec3::new(0.3, -1.0, 0.5);
    let g = VectorField::from_fn(&grid, |x| bump.curl_of(a, x));
    let t0 = t0_on_grid(&g, cfg.singular_correction);
    let kernel = region.iter().map(|&i| t0.get(i).abs()).fold(0.0, f64::max) / g.norm_l2();

    let c = Vec3::new(0.3, -0.4, 1.0);
    let t0c = t0_on_grid(&VectorField::constant(&grid, c), cfg.singular_correction);
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for &i in &region {
        let exact = grid.center(i).dot(&c) / 3.0;
        err = err.max((t0c.get(i) - exact).abs());
        scale = scale.max(exact.abs());
    }
    let constant = err / scale;
    let pass = kernel <= KERNEL_T0_TOL && constant <= T0_CONSTANT_TOL;
    let detail = format!(
        "bump curl max|t0|/‖g‖ {kernel:.3e} (tol {KERNEL_T0_TOL}); constant max rel error {constant:.3e} (tol {T0_CONSTANT_TOL})"
    );
    Outcome { pass, detail }
}

fn a05_t0_equals_single_layer_of_normal_trace() -> Outcome {
    let grid = ball(24);
    let cfg = VolumeOperatorConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = random_solenoidal(&mut rng, Vec3::zeros(), 1.0, 2);
    let g = VectorField::from_fn(&grid, |x| f.eval(x));
    let mesh = grid.domain().boundary();
    let values: Vec<Vec3> = mesh.nodes.iter().map(|x| f.eval(*x)).collect();
    let trace = mesh.normal_trace(&values).unwrap();
    let t0 = t0_on_grid(&g, cfg.singular_correction);
    let region = grid.accuracy_region();
    let step = (region.len() / T0_PROBES).max(1);
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for &i in region.iter().step_by(step).take(T0_PROBES) {
        let m = single_layer(&trace, mesh, grid.center(i), 0.5 * grid.spacing()).unwrap();
        err = err.max((t0.get(i) - m).abs());
        scale = scale.max(m.abs());
    }
    let tol = 2.0 * tol_op(grid.spacing(), cfg.ray_nodes);
    let pass = err / scale <= tol;
    let detail = format!("max |t0 − M[g·η]| / max |M[g·η]| {:.3e} over {T0_PROBES} probes (tol 2·tol_op = {tol:.3e})", err / scale);
    Outcome { pass, detail }
}

fn a06_neumann_correction() -> Outcome {
    let cfg = VolumeOperatorConfig::default();
    let grid = unit_box(24);
    let mesh = grid.domain().boundary();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = f64::INFINITY;
    for _ in 0..10 {
        let f = random_solenoidal(&mut rng, Vec3::zeros(), 1.0, 2);
        let g = VectorField::from_fn(&grid, |x| f.eval(x));
        let r = right_inverse_curl_neumann(&g, NEUMANN_DEGREE, &cfg).unwrap();
        let (before, after) = r.normal_traces().unwrap();
        worst = worst.min(mesh.l2_norm(&before).unwrap() / mesh.l2_norm(&after).unwrap());
    }
    let bgrid = ball(24);
    let g = VectorField::constant(&bgrid, Vec3::new(0.3, -0.4, 1.0));
    let r = right_inverse_curl_neumann(&g, NEUMANN_DEGREE, &cfg).unwrap();
    let grad_h = r.correction_on_grid().norm_l2() / g.norm_l2();
    let pass = worst >= NEUMANN_REDUCTION && grad_h <= NEUMANN_CONSTANT_TOL;
    let detail = format!(
        "box smallest trace reduction {worst:.1}x (want ≥ {NEUMANN_REDUCTION}x); ball constant ‖∇h‖/‖g‖ {grad_h:.3e} (tol {NEUMANN_CONSTANT_TOL})"
    );
    Outcome { pass, detail }
}

fn a07_dirichlet_variant() -> Outcome {
    let grid = ball(32);
    let cfg = VolumeOperatorConfig::default();
    let bump = Bump::new(Vec3::new(0.05, -0.05, 0.0), 0.8).with_power(3);
    let a = Vec3::new(0.3, -1.0, 0.5);
    let g = VectorField::from_fn(&grid, |x| bump.curl_of(a, x));
    let r = right_inverse_curl_dirichlet(&g, DIRICHLET_DEGREE, &cfg).unwrap();
    let gn = g.norm_l2();
    let mesh = grid.domain().boundary();
    let boundary = mesh.l2_norm_vec(&r.boundary_values()).unwrap() / gn;
    let w = r.on_grid();
    let curl = relative_error_on(&fd_curl(&w), &g, &grid.accuracy_region());
    let tol = tol_op(grid.spacing(), cfg.ray_nodes);
    let mut exterior = 0.0f64;
    for radius in [1.2, 1.5] {
        for d in [Vec3::x(), -Vec3::y(), Vec3::z(), Vec3::new(1.0, 1.0, -1.0).normalize()] {
            exterior = exterior.max(r.exterior_value(&w, d * radius).unwrap().norm() / gn);
        }
    }
    let pass = boundary <= DIRICHLET_TOL && curl <= tol && exterior <= DIRICHLET_TOL;
    let detail = format!(
        "boundary ‖w‖/‖g‖ {boundary:.3e} (tol {DIRICHLET_TOL}); curl residual {curl:.3e} (tol_op {tol:.3e}); exterior max {exterior:.3e} (tol {DIRICHLET_TOL})"
    );
    Outcome { pass, detail }
}

fn a08_beltrami_series() -> Outcome {
    let grid = ball(24);
    let cfg = VolumeOperatorConfig::default();
    let alpha0 = 0.2;
    let c = Vec3::new(0.0, 0.0, 1.0);
    let limit = empirical_right_inverse_norm(&ball(12), 20, 8, &cfg).unwrap().alpha_limit;
    let g = VectorField::constant(&grid, c);
    let sol = beltrami_series(&g, &BeltramiConfig::new(alpha0, limit), &cfg).unwrap();
    let ratio = sol.report.get("max_term_ratio").unwrap();
    let residual = sol.report.get("beltrami_residual").unwrap();
    let region = grid.accuracy_region();
    let t1 = max_relative(&sol.terms[1], |x| x.cross(&c) * (-alpha0 / 2.0), &region);
    let t2 = max_relative(&sol.terms[2], |x| iterated_displayed(c, x) * alpha0.powi(2), &region);
    let t2_derived = max_relative(&sol.terms[2], |x| iterated_derived(c, x) * alpha0.powi(2), &region);
    let pass = ratio <= BELTRAMI_RATIO
        && residual <= TOL_BELTRAMI
        && t1 <= BELTRAMI_TERM_TOL
        && t2 <= BELTRAMI_TERM_TOL;
    let detail = format!(
        "alpha limit {limit:.3}; max term ratio {ratio:.3e} (≤ {BELTRAMI_RATIO}); residual {residual:.3e} (tol {TOL_BELTRAMI:.0e}); term 1 error {t1:.3e}; term 2 error vs displayed {t2:.3e} (tol {BELTRAMI_TERM_TOL}), vs derived {t2_derived:.3e}"
    );
    Outcome { pass, detail }
}

fn a09_conductivity_order() -> Outcome {
    let (mut hs, mut errs) = (Vec::new(), Vec::new());
    let mut converged = true;
    for n in [16, 24, 32] {
        let grid = ball(n);
        let phi = ScalarField::from_fn(&grid, |x| x.x.exp());
        let u = ScalarField::from_fn(&grid, |x| (1.0 - x.norm_squared()) * x.x);
        // div(φ²∇u) = φ²(Δu + 2∂₁u), Δu = −10x₁
        let rhs = ScalarField::from_fn(&grid, |x| {
            let du1 = 1.0 - x.norm_squared() - 2.0 * x.x * x.x;
            (2.0 * x.x).exp() * (-10.0 * x.x + 2.0 * du1)
        });
        let sol = solve_conductivity(&phi, &rhs).unwrap();
        converged &= sol.report.passed();
        hs.push(grid.spacing());
        errs.push(sol.field.sub(&u).unwrap().norm_l2() / u.norm_l2());
    }
    let order = observed_order(&hs, &errs);
    let pass = converged && order >= MIN_ORDER;
    let detail = format!(
        "L2 errors {:.3e} / {:.3e} / {:.3e} (n = 16/24/32); order {order:.2} (≥ {MIN_ORDER}); solver checks {}",
        errs[0], errs[1], errs[2], if converged { "pass" } else { "fail" }
    );
    Outcome { pass, detail }
}

fn a10_maxwell() -> Outcome {
    let cfg = VolumeOperatorConfig::default();
    let grid = ball(24);
    let c = Vec3::new(0.3, -0.4, 1.0);
    let one = ScalarField::constant(&grid, 1.0);
    let medium = MaxwellMedium::new(one.clone(), one, ScalarField::zeros(&grid), VectorField::constant(&grid, c)).unwrap();
    let sol = solve_maxwell_static(&medium, &cfg).unwrap();
    let h_err = max_relative(&sol.h, |x| x.cross(&c) * -0.5, &grid.accuracy_region());
    let tol = tol_vekua(grid.spacing(), cfg.ray_nodes);
    let e_res = sol.report.get("electric_residual").unwrap();
    let m_res = sol.report.get("magnetic_residual").unwrap();
    let homogeneous = h_err <= MAXWELL_H_TOL && e_res <= tol && m_res <= tol;

    // ε = exp(x₃), h₁ = 1 − |x|²: E = 2x, ρ = −div(ε∇h₁) = ε(6 + 2x₃)
    let (mut hs, mut errs) = (Vec::new(), Vec::new());
    let mut reports = true;
    for n in [16, 24, 32] {
        let grid = ball(n);
        let eps = ScalarField::from_fn(&grid, |x| x.z.exp());
        let rho = ScalarField::from_fn(&grid, |x| x.z.exp() * (6.0 + 2.0 * x.z));
        let medium = MaxwellMedium::new(eps, ScalarField::constant(&grid, 1.0), rho, VectorField::zeros(&grid)).unwrap();
        let sol = solve_maxwell_static(&medium, &cfg).unwrap();
        reports &= sol.report.passed();
        let region: Vec<usize> = (0..grid.len()).filter(|&i| grid.center(i).norm() <= 0.8).collect();
        let exact = VectorField::from_fn(&grid, |x| x * 2.0);
        hs.push(grid.spacing());
        errs.push(relative_error_on(&sol.e, &exact, &region));
    }
    let order = observed_order(&hs, &errs);
    let pass = homogeneous && reports && order >= MIN_ORDER;
    let detail = format!(
        "H vs −½x×c max rel error {h_err:.3e} (tol {MAXWELL_H_TOL}); residuals E {e_res:.3e} H {m_res:.3e} (tol_vekua {tol:.3e}); ε = exp(x3): E errors {:.3e} / {:.3e} / {:.3e}, order {order:.2} (≥ {MIN_ORDER}), residual checks {}",
        errs[0], errs[1], errs[2], if reports { "pass" } else { "fail" }
    );
    Outcome { pass, detail }
}

fn a11_borel_pompeiu() -> Outcome {
    let grid = ball(24);
    let cfg = VolumeOperatorConfig::default();
    let bump = Bump::new(Vec3::zeros(), 0.6);
    let q = Quaternion::new(0.7, Vec3::new(-0.2, 0.4, 1.0));
    let m = Vec3::new(0.5, -1.0, 0.25);
    let w = QuaternionField::from_fn(&grid, |x| bump.quaternion_field(q, m, x));
    let dw = QuaternionField::from_fn(&grid, |x| bump.quaternion_field_derivative(q, m, x));
    let tdw = teodorescu_on_grid(&dw, cfg.singular_correction);
    let err = tdw.sub(&w).unwrap().norm_l2() / w.norm_l2();
    let tol = tol_op(grid.spacing(), cfg.ray_nodes);
    let pass = err <= tol;
    let detail = format!("‖T[Dw] − w‖/‖w‖ {err:.3e} (tol_op {tol:.3e})");
    Outcome { pass, detail }
}

fn cli(args: &[&str], config: &Path, out: &Path) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_starcurl"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stderr).into_owned())
}

fn a12_determinism_and_exit_codes() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let write = |name: &str, text: &str| {
        let p = d.join(name);
        std::fs::write(&p, text).unwrap();
        p
    };
    let ok = write("ok.ini", "[grid]\nn = 12\n[scenario]\nkind = divcurl\ng = 0.3, -0.4, 1.0\nseed = 3\n");
    let (a, _) = cli(&["divcurl", "--seed", "42"], &ok, &d.join("a"));
    let (b, _) = cli(&["divcurl", "--seed", "42"], &ok, &d.join("b"));
    let same = std::fs::read(d.join("a/w.csv")).unwrap() == std::fs::read(d.join("b/w.csv")).unwrap();

    let bad = write("bad.ini", "[grid]\nn = -3\n[scenario]\nkind = divcurl\ng = 1, 0, 0\n");
    let compat = write("compat.ini", "[grid]\nn = 12\n[scenario]\nkind = divcurl\ng = x1, x2, x3\n");
    let solver = write(
        "solver.ini",
        "[grid]\nn = 12\n[scenario]\nkind = beltrami\ng = 0, 0, 1\nalpha0 = 8\nalpha_limit = 100\n",
    );
    let codes = [
        (0, a),
        (0, b),
        (1, cli(&["divcurl"], &bad, &d.join("o")).0),
        (2, cli(&["divcurl"], &compat, &d.join("o")).0),
        (3, cli(&["beltrami"], &solver, &d.join("o")).0),
        (4, cli(&["divcurl"], &d.join("missing.ini"), &d.join("o")).0),
    ];
    let codes_ok = codes.iter().all(|(want, got)| want == got);
    let pass = same && codes_ok;
    let detail = format!(
        "byte-identical CSV {same}; exit codes (expected, got) {:?}",
        codes
    );
    Outcome { pass, detail }
}

#[test]
fn acceptance() {
    let criteria: [(u32, &str, fn() -> Outcome); 12] = [
        (1, "Teodorescu transform of a constant", a01_teodorescu_closed_form),
        (2, "right inverse of curl on random solenoidal fields", a02_right_inverse_identity),
        (3, "R[R[c]] against the displayed value", a03_iterated_right_inverse_of_constant),
        (4, "kernel of t0", a04_kernel_of_t0),
        (5, "t0 = M[g·η] for solenoidal g", a05_t0_equals_single_layer_of_normal_trace),
        (6, "Neumann-corrected right inverse", a06_neumann_correction),
        (7, "Dirichlet-corrected right inverse", a07_dirichlet_variant),
        (8, "Beltrami series for a constant datum", a08_beltrami_series),
        (9, "conductivity solver convergence", a09_conductivity_order),
        (10, "static Maxwell reduction", a10_maxwell),
        (11, "Borel-Pompeiu for compactly supported w", a11_borel_pompeiu),
        (12, "determinism and CLI exit codes", a12_determinism_and_exit_codes),
    ];
    let mut failed = Vec::new();
    writeln!(std::io::stdout().lock()).unwrap();
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!(
                "panicked: {}",
                e.downcast_ref::<String>()
                    .map(String::as_str)
                    .or_else(|| e.downcast_ref::<&str>().copied())
                    .unwrap_or("?")
            ),
        });
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        let mut out = std::io::stdout().lock();
        writeln!(
            out,
            "acceptance {id:>2} [{verdict}] {name} ({:.1} s): {}",
            start.elapsed().as_secs_f64(),
            outcome.detail
        )
        .unwrap();
        if !outcome.pass {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
