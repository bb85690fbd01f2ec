use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use starcurl_cli::config::parse_config;
use starcurl_cli::export::read_csv;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_starcurl"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .arg(sub)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const CONSTANT: &str = "\
[domain]
kind = ball
radius = 1.0

[grid]
n = 16

[scenario]
kind = divcurl
g = 0.3, -0.4, 1.0
";

#[test]
fn constant_datum_reproduces_half_cross_product() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.ini", CONSTANT);
    let out = dir.path().join("out");
    let o = run("divcurl", &cfg, &out, &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = read_csv(&out.join("w.csv")).unwrap();
    assert_eq!(table.components, ["w1", "w2", "w3"]);
    let c = [0.3, -0.4, 1.0];
    let mut err = 0.0f64;
    let mut scale = 0.0f64;
    for (p, w) in table.points.iter().zip(&table.values) {
        let exact = [
            -0.5 * (p[1] * c[2] - p[2] * c[1]),
            -0.5 * (p[2] * c[0] - p[0] * c[2]),
            -0.5 * (p[0] * c[1] - p[1] * c[0]),
        ];
        for i in 0..3 {
            err = err.max((w[i] - exact[i]).abs());
            scale = scale.max(exact[i].abs());
        }
    }
    assert!(err <= 0.05 * scale, "{err} vs {scale}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["passed"] == true));
    assert!(checks
        .iter()
        .filter(|c| c["passed"].as_bool() == Some(true) && !c["tolerance"].is_null())
        .any(|c| c["name"] == "divcurl.curl_residual"));
    assert!(report["config"].as_str().unwrap().contains("kind = divcurl"));
}

#[test]
fn fixed_seed_gives_byte_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.ini", CONSTANT);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(code(&run("divcurl", &cfg, &a, &["--seed", "11"])), 0);
    let o = bin()
        .env("STARCURL_THREADS", "1")
        .args(["divcurl", "--seed", "11", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&b)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let wa = std::fs::read(a.join("w.csv")).unwrap();
    let wb = std::fs::read(b.join("w.csv")).unwrap();
    assert!(!wa.is_empty());
    assert!(wa == wb, "CSV output differs between runs");
}

#[test]
fn csv_import_feeds_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.ini", CONSTANT);
    let first = dir.path().join("first");
    assert_eq!(code(&run("divcurl", &cfg, &first, &[])), 0);
    // w = −½ x×c is divergence free, so it is admissible curl data
    let text = CONSTANT.replace(
        "g = 0.3, -0.4, 1.0",
        &format!("g = csv:{}", first.join("w.csv").display()),
    );
    let cfg2 = write_config(dir.path(), "import.ini", &text);
    let o = run("divcurl", &cfg2, &dir.path().join("second"), &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    // a CSV on a different grid is a configuration error
    let o = run("divcurl", &cfg2, &dir.path().join("third"), &["--grid-n", "12"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stderr(&o).contains("rows"), "{}", stderr(&o));
}

#[test]
fn vtk_output_is_legacy_structured_points() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{CONSTANT}\n[output]\nformats = vtk\n");
    let cfg = write_config(dir.path(), "c.ini", &text);
    let out = dir.path().join("out");
    assert_eq!(code(&run("divcurl", &cfg, &out, &["--grid-n", "8"])), 0);
    let vtk = std::fs::read_to_string(out.join("w.vtk")).unwrap();
    assert!(vtk.starts_with("# vtk DataFile Version 3.0"));
    assert!(vtk.contains("DATASET STRUCTURED_POINTS"));
    assert!(vtk.contains("VECTORS w1_w2_w3"));
    assert!(!out.join("w.csv").exists());
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let bad_n = write_config(dir.path(), "n.ini", "[grid]\nn = -3\n[scenario]\nkind = divcurl\ng = 1, 0, 0\n");
    let o = run("divcurl", &bad_n, &out, &[]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 2") && stderr(&o).contains("`n`"), "{}", stderr(&o));

    let unknown = write_config(dir.path(), "u.ini", "[scenario]\nkind = divcurl\ng = 1, 0, 0\nalpha0 = 1\n");
    let o = run("divcurl", &unknown, &out, &[]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("unknown key"), "{}", stderr(&o));

    let mismatch = write_config(dir.path(), "m.ini", CONSTANT);
    assert_eq!(code(&run("maxwell", &mismatch, &out, &[])), 1);
    assert_eq!(code(&run("divcurl", &mismatch, &out, &["--grid-n", "4"])), 1);

    let o = bin().args(["divcurl", "--bogus"]).output().unwrap();
    assert_eq!(code(&o), 1);
    let o = bin().arg("--help").output().unwrap();
    assert_eq!(code(&o), 0);

    let o = bin()
        .env("STARCURL_THREADS", "zero")
        .args(["divcurl", "--config"])
        .arg(&mismatch)
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn incompatible_data_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), "x.ini", "[grid]\nn = 12\n[scenario]\nkind = divcurl\ng = x1, x2, x3\n");
    let o = run("divcurl", &cfg, &out, &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("compatibility"), "{}", stderr(&o));

    // α₀ beyond the admissibility limit
    let cfg = write_config(
        dir.path(),
        "b.ini",
        "[grid]\nn = 12\n[scenario]\nkind = beltrami\ng = 0, 0, 1\nalpha0 = 2\nalpha_limit = 1\n",
    );
    assert_eq!(code(&run("beltrami", &cfg, &out, &[])), 2);
}

#[test]
fn solver_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    // an inflated limit lets a divergent series through to the solver
    let cfg = write_config(
        dir.path(),
        "b.ini",
        "[grid]\nn = 12\n[scenario]\nkind = beltrami\ng = 0, 0, 1\nalpha0 = 8\nalpha_limit = 100\n",
    );
    let o = run("beltrami", &cfg, &out, &[]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("does not contract"), "{}", stderr(&o));

    // a charge density the grid cannot resolve fails the residual check
    let cfg = write_config(
        dir.path(),
        "m.ini",
        "[grid]\nn = 8\n[scenario]\nkind = maxwell\nrho = sin(40*x1)*sin(40*x2)*sin(40*x3)\n",
    );
    let o = run("maxwell", &cfg, &out, &[]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let report = std::fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("FAIL"));
}

#[test]
fn io_failures_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("divcurl", &dir.path().join("missing.ini"), dir.path(), &[]);
    assert_eq!(code(&o), 4);

    let cfg = write_config(dir.path(), "c.ini", CONSTANT);
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let o = run("divcurl", &cfg, &blocker.join("sub"), &["--grid-n", "8"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));

    let text = CONSTANT.replace("g = 0.3, -0.4, 1.0", "g = csv:/nonexistent/g.csv");
    let cfg = write_config(dir.path(), "imp.ini", &text);
    assert_eq!(code(&run("divcurl", &cfg, &dir.path().join("o"), &[])), 4);
}

#[test]
fn verify_lists_module_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "v.ini", "[grid]\nn = 20\n[scenario]\nkind = verify\nsamples = 2\n");
    let out = dir.path().join("out");
    let o = run("verify", &cfg, &out, &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = String::from_utf8_lossy(&o.stdout);
    for key in [
        "algebra.unit_products",
        "potentials.borel_pompeiu",
        "bvp.kernel_t0.t0_iff_trace",
        "divcurl.curl_residual_max",
        "bvp.neumann_trace_ratio_max",
        "beltrami.empirical_over_bound",
        "vekua.d_minus_alpha.curl_residual",
        "vekua.conductivity.energy_increases",
    ] {
        assert!(stdout.contains(&format!("[pass] verify.{key}")), "{key} missing:\n{stdout}");
    }
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert!(count >= 5);
}
