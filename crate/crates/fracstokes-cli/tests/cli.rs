//! End-to-end tests of the fracstokes binary: output formats, the exit-code
//! contract, and byte-level determinism of the file outputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracstokes"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn ml_prints_reference_values() {
    let out = run(&["ml", "1", "1", "-1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "0.3678794412");
    let out = run(&["ml", "0.5", "1", "0"]);
    assert_eq!(stdout(&out).trim(), "1.0000000000");
    let out = run(&["ml", "0.5", "1", "-1"]);
    // frozen from the high-precision series oracle: 0.4275835761558070...
    assert!(stdout(&out).trim().starts_with("0.4275835"), "{}", stdout(&out));
}

#[test]
fn ml_domain_error_exits_2() {
    let out = run(&["ml", "1.5", "1", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_exits_3() {
    let out = run(&["evolve-linear", "/nonexistent/nowhere.ini"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_errors_carry_line_numbers_and_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.ini",
        "[grid]\nndim = 1\npoints = twelve\nhalf_width = 8\n[time]\nt_end = 1\nsteps = 16\n[equation]\nalpha = 0.5\n",
    );
    let out = run(&["evolve-linear", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("bad.ini:3"), "{err}");
}

const LINEAR_CFG: &str = "\
[grid]
ndim = 1
points = 64
half_width = 8.0
[time]
t_end = 0.0
steps = 16
[equation]
alpha = 0.5
";

#[test]
fn evolve_linear_zero_horizon_is_identity() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "lin.ini", LINEAR_CFG);
    let outdir = tmp.path().join("out");
    let out = run(&[
        "evolve-linear",
        cfg.to_str().unwrap(),
        "--out",
        outdir.to_str().unwrap(),
        "--amplitude",
        "1.5",
        "--width",
        "0.5",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let field = std::fs::File::open(outdir.join("field.frdf")).unwrap();
    let f = fracstokes_core::grid::read_frdf(std::io::BufReader::new(field)).unwrap();
    let g = fracstokes_core::grid::GridSpec::new(1, 64, 8.0).unwrap();
    let expect = fracstokes_core::grid::gaussian_initial(g, 1.5, 0.5, &[0.0; 3]).unwrap();
    for (a, b) in f.values.iter().zip(&expect.values) {
        assert!((a - b).abs() < 1e-12);
    }
    let norms = std::fs::read_to_string(outdir.join("norms.csv")).unwrap();
    assert!(norms.starts_with("t,p,norm\n"), "{norms}");
    assert_eq!(norms.lines().count(), 7);
}

#[test]
fn evolve_linear_zero_field_stays_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "lin.ini", &LINEAR_CFG.replace("t_end = 0.0", "t_end = 1.0"));
    let outdir = tmp.path().join("out");
    let out = run(&[
        "evolve-linear",
        cfg.to_str().unwrap(),
        "--out",
        outdir.to_str().unwrap(),
        "--amplitude",
        "0",
    ]);
    assert!(out.status.success());
    let field = std::fs::File::open(outdir.join("field.frdf")).unwrap();
    let f = fracstokes_core::grid::read_frdf(std::io::BufReader::new(field)).unwrap();
    assert!(f.values.iter().all(|&v| v == 0.0));
}

const SEMILINEAR_CFG: &str = "\
[grid]
ndim = 1
points = 64
half_width = 8.0
[time]
t_end = 0.5
steps = 64
[equation]
alpha = 0.5
p = 2.0
coefficient = 0.0
[solver]
picard_tol = 1e-10
";

#[test]
fn semilinear_zero_coefficient_exits_global() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "semi.ini", SEMILINEAR_CFG);
    let outdir = tmp.path().join("out");
    let out = run(&[
        "evolve-semilinear",
        cfg.to_str().unwrap(),
        "--out",
        outdir.to_str().unwrap(),
        "--amplitude",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("status=Global"));
    let log = std::fs::read_to_string(outdir.join("run.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 65);
    assert!(log.lines().next().unwrap().contains("\"t\": 0"));
    assert!(outdir.join("final.frdf").exists());
}

#[test]
fn semilinear_blowup_exits_10_with_t_star() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "blow.ini",
        "[grid]\nndim = 1\npoints = 128\nhalf_width = 16.0\n\
         [time]\nt_end = 0.08\nsteps = 800\n\
         [equation]\nalpha = 1.0\np = 2.0\ncoefficient = 1.0\n\
         [solver]\nblowup_threshold = 1e4\n",
    );
    let outdir = tmp.path().join("out");
    let out = run(&[
        "evolve-semilinear",
        cfg.to_str().unwrap(),
        "--out",
        outdir.to_str().unwrap(),
        "--amplitude",
        "50",
        "--width",
        "1.0",
    ]);
    assert_eq!(out.status.code(), Some(10), "{}", String::from_utf8_lossy(&out.stderr));
    let line = stdout(&out);
    assert!(line.contains("status=BlowUp"), "{line}");
    assert!(line.contains("t_star=0.02"), "{line}");
}

#[test]
fn system_symmetric_writes_identical_streams() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "sys.ini",
        "[grid]\nndim = 1\npoints = 64\nhalf_width = 8.0\n\
         [time]\nt_end = 0.5\nsteps = 32\n\
         [equation]\nalpha = 0.6\nbeta = 0.6\np = 2.0\nq = 2.0\n\
         coefficient = 1.0\ncoefficient2 = 1.0\n",
    );
    let outdir = tmp.path().join("out");
    let out = run(&[
        "evolve-system",
        cfg.to_str().unwrap(),
        "--out",
        outdir.to_str().unwrap(),
        "--amplitude",
        "0.5",
        "--checkpoint-every",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let u = std::fs::read(outdir.join("u_final.frdf")).unwrap();
    let v = std::fs::read(outdir.join("v_final.frdf")).unwrap();
    assert_eq!(u, v);
    for j in [0usize, 8, 16, 24, 32] {
        let cu = std::fs::read(outdir.join(format!("u_ckpt_{j:06}.frdf"))).unwrap();
        let cv = std::fs::read(outdir.join(format!("v_ckpt_{j:06}.frdf"))).unwrap();
        assert_eq!(cu, cv, "checkpoint {j}");
    }
}

#[test]
fn exponent_scalar_and_system_json() {
    let out = run(&["exponent", "scalar", "--n", "1", "--alpha", "1", "--lambda-at", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "{\"p_c\": 3, \"p\": 3, \"lambda\": 0}");
    let out = run(&[
        "exponent", "system", "--n", "1", "--alpha", "1", "--beta", "1", "--p", "2", "--q", "2",
    ]);
    let s = stdout(&out);
    assert!(s.contains("\"bound1\": 2, \"bound2\": 2"), "{s}");
    assert!(s.contains("\"blowup_predicted\": true"), "{s}");
}

const SWEEP_CFG: &str = "\
[grid]
ndim = 1
points = 32
half_width = 32.0
[time]
steps = 64
[equation]
alpha = 1.0
sigma = 0.0
rho = 0.0
[solver]
blowup_threshold = 1e4
picard_tol = 1e-9
[sweep]
p_min = 2.0
p_max = 3.0
p_step = 1.0
amplitudes = 0.1, 0.3
horizon = 8.0
seed = 7
";

#[test]
fn sweep_outputs_are_byte_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "sweep.ini", SWEEP_CFG);
    let mut csvs = Vec::new();
    let mut jsons = Vec::new();
    for run_dir in ["a", "b"] {
        let outdir = tmp.path().join(run_dir);
        let out = run(&[
            "sweep",
            cfg.to_str().unwrap(),
            "--out",
            outdir.to_str().unwrap(),
            "--jobs",
            "2",
        ]);
        assert!(
            out.status.code() == Some(0) || out.status.code() == Some(12),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        csvs.push(std::fs::read(outdir.join("sweep.csv")).unwrap());
        jsons.push(std::fs::read(outdir.join("boundary.json")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1], "sweep.csv differs between identical runs");
    assert_eq!(jsons[0], jsons[1], "boundary.json differs between identical runs");
    let header = String::from_utf8_lossy(&csvs[0]);
    assert!(header
        .starts_with("p,amplitude,alpha,sigma,rho,N,status,t_star,max_sup_norm,picard_iters,runtime_s\n"));
}

#[test]
fn sweep_without_boundary_exits_12() {
    // all-supercritical window at tiny amplitude: nothing blows up
    let tmp = tempfile::tempdir().unwrap();
    let body = SWEEP_CFG
        .replace("p_min = 2.0", "p_min = 4.0")
        .replace("p_max = 3.0", "p_max = 4.5")
        .replace("p_step = 1.0", "p_step = 0.5")
        .replace("amplitudes = 0.1, 0.3", "amplitudes = 0.05");
    let cfg = write_config(tmp.path(), "sweep.ini", &body);
    let outdir = tmp.path().join("out");
    let out = run(&["sweep", cfg.to_str().unwrap(), "--out", outdir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(12), "{}", String::from_utf8_lossy(&out.stderr));
    let json = std::fs::read_to_string(outdir.join("boundary.json")).unwrap();
    assert!(json.contains("\"p_c_empirical\": null"), "{json}");
}

#[test]
fn mode_oracle_prints_value() {
    let out = run(&["mode-oracle", "--lambda", "0", "--alpha", "0.5", "--steps", "32"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "1.0000000000");
}

#[test]
fn multiplier_disk_cache_is_correctness_neutral() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("cache");
    let cfg = write_config(tmp.path(), "semi.ini", SEMILINEAR_CFG);
    let run_with_cache = |dir: &str| {
        let outdir = tmp.path().join(dir);
        let out = bin()
            .args([
                "evolve-semilinear",
                cfg.to_str().unwrap(),
                "--out",
                outdir.to_str().unwrap(),
                "--amplitude",
                "0.5",
            ])
            .env("FRACSTOKES_CACHE", cache.to_str().unwrap())
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(outdir.join("final.frdf")).unwrap()
    };
    let cold = run_with_cache("cold");
    assert!(cache.read_dir().unwrap().count() > 0, "cache dir stayed empty");
    let warm = run_with_cache("warm");
    assert_eq!(cold, warm, "disk cache changed the results");
}
