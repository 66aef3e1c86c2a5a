use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use semistable::verification::{cf_sup_distance, empirical_cf};
use semistable::{log_grid, ModelParams, SemiStableLaw};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_semistable"));
    cmd.env_remove("SEMISTABLE_OUT");
    cmd
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn csv_column(path: &Path, col: usize) -> Vec<f64> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_cf_defaults_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify-cf"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let text = fs::read_to_string(dir.path().join("verify_cf.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("u,psi_closed,psi_quadrature,residual"));
    assert_eq!(lines.count(), 200);
    assert!(csv_column(&dir.path().join("verify_cf.csv"), 3).iter().all(|r| *r < 1e-8));
    let report = json(&dir.path().join("verify_cf.json"));
    assert_eq!(report["passed"], true);
    assert!(dir.path().join("verify_cf.meta.json").exists());
}

#[test]
fn invalid_b_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify-cf", "--b", "1.2"], dir.path());
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("b out of range"), "{err}");
}

#[test]
fn extra_epoch_separates_stable_and_semistable() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["verify-cf", "--eps-pert", "0", "--extra-epoch", "3.0"], dir.path())), 0);
    assert_eq!(code(&run(&["verify-cf", "--eps-pert", "0.5", "--extra-epoch", "3.0"], dir.path())), 1);
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["verify-cf", "--grid", "0:1:10"],
        vec!["verify-cf", "--grid", "banana"],
        vec!["verify-cf", "--alpha", "nan"],
        vec!["simulate", "path", "--times", "1:2:3"],
        vec!["check", "ssd", "--threads", "0"],
        vec!["check", "ssd", "--bogus"],
        vec!["simulate", "ar1", "--delta", "1.0"],
        vec!["verify-cf", "--config", "/nonexistent/semistable.toml"],
        vec!["frobnicate"],
    ] {
        let o = run(&args, dir.path());
        assert_eq!(code(&o), 2, "{args:?}");
    }
    let o = bin().arg("--help").output().unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn ar1_output_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["simulate", "ar1", "--n", "1000", "--seed", "7", "--threads", "1"];
    assert_eq!(code(&run(&args, a.path())), 0);
    assert_eq!(code(&run(&args, b.path())), 0);
    for f in ["ar1.csv", "ar1.meta.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let rows = csv_column(&a.path().join("ar1.csv"), 1);
    assert_eq!(rows.len(), 1001);
    let c = tempfile::tempdir().unwrap();
    run(&["simulate", "ar1", "--n", "1000", "--seed", "8"], c.path());
    assert_ne!(fs::read(a.path().join("ar1.csv")).unwrap(), fs::read(c.path().join("ar1.csv")).unwrap());
}

#[test]
fn path_has_requested_rows() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["simulate", "path", "--times", "0:10:100"], dir.path())), 0);
    let times = csv_column(&dir.path().join("path.csv"), 0);
    let values = csv_column(&dir.path().join("path.csv"), 1);
    assert_eq!(values.len(), 101);
    assert_eq!(values[0], 0.0);
    assert_eq!(times[100], 10.0);
}

#[test]
fn innovation_csv_matches_law() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["simulate", "innovation", "--n", "40000", "--seed", "3"], dir.path())), 0);
    let draws = csv_column(&dir.path().join("innovation.csv"), 1);
    assert_eq!(draws.len(), 40_000);
    let law = SemiStableLaw::new(ModelParams::new(1.0, 0.5, 0.5, 1.0).unwrap()).unwrap();
    let p = *law.params();
    let grid = log_grid(0.05, 20.0, 40);
    let ecf = empirical_cf(&draws, &grid).unwrap();
    let d = cf_sup_distance(&ecf, |u| num_complex_real(((p.a() - 1.0) * law.psi(p.b() * u)).exp()));
    assert!(d < 4.0 / 200.0, "{d}");
}

fn num_complex_real(x: f64) -> num_complex::Complex<f64> {
    num_complex::Complex::new(x, 0.0)
}

#[test]
fn ssd_check_statistic() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["check", "ssd"], dir.path())), 0);
    let r = json(&dir.path().join("check_ssd.json"));
    assert!(r["statistic"].as_f64().unwrap() < 1e-10);
    assert_eq!(r["check_name"], "ssd_factor");
}

#[test]
fn check_all_on_defaults_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["check", "all", "--seed", "7"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let all = json(&dir.path().join("check_all.json"));
    assert_eq!(all["reports"].as_array().unwrap().len(), 3);
    for f in ["check_ssd.json", "check_stationarity.json", "check_selfsimilar.json", "check_all.meta.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn selfsimilar_negative_control_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["check", "selfsimilar", "--eps-pert", "0.9", "--epoch-override", "2.71828"], dir.path());
    assert_eq!(code(&o), 1);
    let r = json(&dir.path().join("check_selfsimilar.json"));
    assert_eq!(r["passed"], false);
}

fn modulation(dir: &Path, eps: &str) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(code(&run(&["plotdata", "--eps-pert", eps, "--n", "2000"], dir)), 0);
    let path = dir.join("plot_modulation.csv");
    (csv_column(&path, 0), csv_column(&path, 1))
}

#[test]
fn stable_modulation_trace_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let (_, trace) = modulation(dir.path(), "0");
    let (lo, hi) = trace.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    assert!((hi - lo) / hi < 1e-6);
}

#[test]
fn modulation_period_is_log_of_inverse_b() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = modulation(dir.path(), "0.5");
    let peaks: Vec<f64> = (1..y.len() - 1).filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1]).map(|i| x[i]).collect();
    assert!(peaks.len() >= 5);
    let spacing = (peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64;
    let period = 2f64.ln();
    assert!((spacing - period).abs() < 0.01 * period, "{spacing}");
    for f in ["plot_cf.csv", "plot_ssd_factor.csv", "plot_histogram.csv", "plotdata.meta.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn zero_frequency_rows_are_skipped() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["plotdata", "--grid=-1:1:11:lin", "--n", "500"], dir.path())), 0);
    let x = csv_column(&dir.path().join("plot_modulation.csv"), 0);
    let y = csv_column(&dir.path().join("plot_modulation.csv"), 1);
    assert_eq!(x.len(), 10);
    assert!(x.iter().chain(&y).all(|v| v.is_finite()));
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", "alpha = 1.5\nb = 0.3\nseed = 4\nn = 50\n");
    let out = dir.path().join("out");
    let o = bin()
        .args(["simulate", "ar1", "--config"])
        .arg(&cfg)
        .args(["--n", "20", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let meta = json(&out.join("ar1.meta.json"));
    assert_eq!(meta["config"]["alpha"], 1.5);
    assert_eq!(meta["config"]["b"], 0.3);
    assert_eq!(meta["config"]["seed"], 4);
    assert_eq!(meta["config"]["n"], 20);
    let bad = write(dir.path(), "bad.toml", "alpha = 1.5\ngamma = 2\n");
    let o = bin().args(["verify-cf", "--config"]).arg(&bad).arg("--out").arg(&out).output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn sidecar_reproduces_run() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let args = ["simulate", "innovation", "--n", "3000", "--seed", "11", "--alpha", "1.3", "--eps-pert", "0.8"];
    assert_eq!(code(&run(&args, first.path())), 0);
    let side = first.path().join("innovation.meta.json");
    let o = bin()
        .args(["simulate", "innovation", "--config"])
        .arg(&side)
        .arg("--out")
        .arg(second.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    for f in ["innovation.csv", "innovation.meta.json"] {
        assert_eq!(fs::read(first.path().join(f)).unwrap(), fs::read(second.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["check", "ssd"])
        .env("SEMISTABLE_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("check_ssd.json").exists());
}
