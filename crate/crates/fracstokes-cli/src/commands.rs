//! Subcommand implementations: config assembly, solver calls, output files.
//!
//! Every output file is written atomically (temp file + rename) and is
//! self-describing (CSV header or JSON keys). All floating-point text goes
//! through `fmt_float`, which is deterministic and locale-independent.

use crate::config::Config;
use anyhow::{anyhow, bail, Context, Result};
use fracstokes_core::fractional::{solve_scalar_mode, TimeGrid};
use fracstokes_core::fujita::{
    boundary_to_json, critical_exponent_scalar, fmt_float, lambda_exponent, l_exponents,
    records_to_csv, run_sweep, system_dimension_bounds, ExponentInputs, SweepConfig,
    SystemExponentInputs,
};
use fracstokes_core::grid::{
    field_norm, gaussian_initial, read_frdf, write_frdf, GridSpec, Norm, ScalarField,
};
use fracstokes_core::propagator::evolve_homogeneous;
use fracstokes_core::semilinear::{
    RunOutcome, RunStatus, SemilinearSolver, SolveConfig, SourceSpec, SystemSolver,
};
use fracstokes_core::special::{mittag_leffler, MlArg};
use std::path::{Path, PathBuf};

/// Exit codes shared with the test harnesses.
pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_BLOWUP: u8 = 10;
pub const EXIT_INCONCLUSIVE: u8 = 11;
pub const EXIT_NO_BOUNDARY: u8 = 12;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        std::process::id()
    ));
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn grid_from(cfg: &Config) -> Result<GridSpec> {
    let ndim = cfg.usize("grid", "ndim")?;
    let points = cfg.usize("grid", "points")?;
    let half_width = cfg.f64("grid", "half_width")?;
    GridSpec::new(ndim, points, half_width).map_err(|e| cfg.locate("grid", "points", e))
}

fn time_from(cfg: &Config) -> Result<TimeGrid> {
    let t_end = cfg.f64("time", "t_end")?;
    let steps = cfg.usize("time", "steps")?;
    TimeGrid::new(t_end, steps).map_err(|e| cfg.locate("time", "t_end", e))
}

fn solve_config_from(cfg: &Config, tgrid: TimeGrid) -> Result<SolveConfig> {
    if tgrid.steps() < 8 {
        eprintln!("warning: fewer than 8 time steps; Duhamel quadrature accuracy degrades");
    }
    let mut sc = SolveConfig::new(tgrid);
    sc.picard_tol = cfg.f64_or("solver", "picard_tol", sc.picard_tol)?;
    sc.picard_max_iters = cfg.usize_or("solver", "max_iters", sc.picard_max_iters)?;
    sc.blowup_threshold = cfg.f64_or("solver", "blowup_threshold", sc.blowup_threshold)?;
    sc.nonneg_clamp = cfg.bool_or("solver", "nonneg_clamp", true)?;
    Ok(sc)
}

pub struct InitialData {
    pub file: Option<PathBuf>,
    pub amplitude: f64,
    pub width: Option<f64>,
}

fn initial_field(grid: GridSpec, init: &InitialData) -> Result<ScalarField> {
    if let Some(path) = &init.file {
        let f = std::fs::File::open(path)
            .with_context(|| format!("opening initial field {}", path.display()))?;
        let field = read_frdf(std::io::BufReader::new(f))?;
        if field.grid != grid {
            bail!(
                "initial field grid ({}d, {} points, L = {}) does not match the config grid",
                field.grid.ndim(),
                field.grid.points_per_dim(),
                field.grid.half_width()
            );
        }
        return Ok(field);
    }
    let width = init.width.unwrap_or(grid.half_width() / 16.0);
    Ok(gaussian_initial(grid, init.amplitude, width, &[0.0; 3])?)
}

fn out_dir(cfg: &Config, flag: &Option<PathBuf>) -> PathBuf {
    if let Some(dir) = flag {
        return dir.clone();
    }
    if cfg.has("output", "dir") {
        return PathBuf::from(cfg.str("output", "dir").unwrap());
    }
    PathBuf::from(".")
}

pub fn cmd_ml(alpha: f64, beta: f64, z: f64) -> Result<u8> {
    let arg = MlArg::new(alpha, beta, z)?;
    let v = mittag_leffler(&arg)?;
    println!("{v:.10}");
    Ok(EXIT_OK)
}

fn norm_csv(rows: &[(f64, Norm, f64)]) -> String {
    let mut s = String::from("t,p,norm\n");
    for (t, p, v) in rows {
        s.push_str(&format!("{},{},{}\n", fmt_float(*t), p.label(), fmt_float(*v)));
    }
    s
}

pub fn cmd_evolve_linear(
    config_path: &Path,
    out: &Option<PathBuf>,
    init: &InitialData,
) -> Result<u8> {
    let cfg = Config::load(config_path)?;
    let grid = grid_from(&cfg)?;
    // the homogeneous evolution needs only the horizon; t_end = 0 is the identity
    let t_end = cfg.f64("time", "t_end")?;
    if !(t_end >= 0.0) {
        return Err(cfg.locate("time", "t_end", "t_end must be >= 0"));
    }
    let alpha = cfg.f64("equation", "alpha")?;
    let u0 = initial_field(grid, init)?;
    let u = evolve_homogeneous(&u0, alpha, t_end)
        .map_err(|e| cfg.locate("equation", "alpha", e))?;

    let dir = out_dir(&cfg, out);
    let mut field_bytes = Vec::new();
    write_frdf(&u, &mut field_bytes)?;
    write_atomic(&dir.join("field.frdf"), &field_bytes)?;
    let mut rows = Vec::new();
    for p in [Norm::L1, Norm::L2, Norm::LInf] {
        rows.push((0.0, p, field_norm(&u0, p)));
        rows.push((t_end, p, field_norm(&u, p)));
    }
    write_atomic(&dir.join("norms.csv"), norm_csv(&rows).as_bytes())?;
    println!(
        "evolved to t = {} (alpha = {}); wrote {} and {}",
        fmt_float(t_end),
        fmt_float(alpha),
        dir.join("field.frdf").display(),
        dir.join("norms.csv").display()
    );
    Ok(EXIT_OK)
}

fn run_log_jsonl(out: &RunOutcome) -> String {
    let mut s = String::new();
    for (j, (t, sup)) in out.sup_norm_history.iter().enumerate() {
        let iters = out.picard_iters_history.get(j).copied().unwrap_or(0);
        s.push_str(&format!(
            "{{\"t\": {}, \"sup_norm\": {}, \"iters\": {}}}\n",
            fmt_float(*t),
            fmt_float(*sup),
            iters
        ));
    }
    s
}

fn status_exit(status: RunStatus) -> u8 {
    match status {
        RunStatus::Global => EXIT_OK,
        RunStatus::BlowUp => EXIT_BLOWUP,
        RunStatus::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn outcome_line(label: &str, out: &RunOutcome) -> String {
    format!(
        "{label}status={} t_star={} max_sup_norm={} min_sample={} clamped={}",
        out.status.label(),
        out.t_star.map(fmt_float).unwrap_or_else(|| "-".into()),
        fmt_float(out.max_sup_norm()),
        fmt_float(out.min_sample),
        out.clamped_samples
    )
}

fn write_checkpoints(
    dir: &Path,
    prefix: &str,
    traj: &[ScalarField],
    every: Option<usize>,
) -> Result<()> {
    let Some(k) = every else {
        return Ok(());
    };
    if k == 0 {
        bail!("--checkpoint-every must be >= 1");
    }
    for (j, f) in traj.iter().enumerate().step_by(k) {
        let mut bytes = Vec::new();
        write_frdf(f, &mut bytes)?;
        write_atomic(&dir.join(format!("{prefix}ckpt_{j:06}.frdf")), &bytes)?;
    }
    Ok(())
}

fn scalar_source_spec(cfg: &Config) -> Result<SourceSpec> {
    SourceSpec::new(
        cfg.f64_or("equation", "coefficient", 1.0)?,
        cfg.f64_or("equation", "sigma", 0.0)?,
        cfg.f64_or("equation", "rho", 0.0)?,
        cfg.f64("equation", "p")?,
    )
    .map_err(|e| cfg.locate("equation", "p", e))
}

pub fn cmd_evolve_semilinear(
    config_path: &Path,
    out: &Option<PathBuf>,
    init: &InitialData,
    checkpoint_every: Option<usize>,
) -> Result<u8> {
    let cfg = Config::load(config_path)?;
    let grid = grid_from(&cfg)?;
    let tgrid = time_from(&cfg)?;
    let alpha = cfg.f64("equation", "alpha")?;
    let spec = scalar_source_spec(&cfg)?;
    let sc = solve_config_from(&cfg, tgrid)?;
    let u0 = initial_field(grid, init)?;

    let mut solver = SemilinearSolver::new(&u0, spec, alpha, sc)?;
    let outcome = solver.run()?;

    let dir = out_dir(&cfg, out);
    write_atomic(&dir.join("run.jsonl"), run_log_jsonl(&outcome).as_bytes())?;
    if let Some(last) = solver.trajectory().last() {
        let mut bytes = Vec::new();
        write_frdf(last, &mut bytes)?;
        write_atomic(&dir.join("final.frdf"), &bytes)?;
    }
    write_checkpoints(&dir, "", solver.trajectory(), checkpoint_every)?;
    println!("{}", outcome_line("", &outcome));
    Ok(status_exit(outcome.status))
}

pub struct SystemInit {
    pub u: InitialData,
    pub v: InitialData,
}

pub fn cmd_evolve_system(
    config_path: &Path,
    out: &Option<PathBuf>,
    init: &SystemInit,
    checkpoint_every: Option<usize>,
) -> Result<u8> {
    let cfg = Config::load(config_path)?;
    let grid = grid_from(&cfg)?;
    let tgrid = time_from(&cfg)?;
    let alpha = cfg.f64("equation", "alpha")?;
    let beta = cfg.f64("equation", "beta")?;
    // u is forced by h1 v^p, v by h2 u^q
    let spec_uv = SourceSpec::new(
        cfg.f64_or("equation", "coefficient", 1.0)?,
        cfg.f64_or("equation", "sigma", 0.0)?,
        cfg.f64_or("equation", "rho", 0.0)?,
        cfg.f64("equation", "p")?,
    )
    .map_err(|e| cfg.locate("equation", "p", e))?;
    let spec_vu = SourceSpec::new(
        cfg.f64_or("equation", "coefficient2", 1.0)?,
        cfg.f64_or("equation", "sigma2", 0.0)?,
        cfg.f64_or("equation", "rho2", 0.0)?,
        cfg.f64("equation", "q")?,
    )
    .map_err(|e| cfg.locate("equation", "q", e))?;
    let sc = solve_config_from(&cfg, tgrid)?;
    let u0 = initial_field(grid, &init.u)?;
    let v0 = initial_field(grid, &init.v)?;

    let mut solver = SystemSolver::new(&u0, &v0, spec_uv, spec_vu, alpha, beta, sc)?;
    let (ou, ov) = solver.run()?;

    let dir = out_dir(&cfg, out);
    write_atomic(&dir.join("u_run.jsonl"), run_log_jsonl(&ou).as_bytes())?;
    write_atomic(&dir.join("v_run.jsonl"), run_log_jsonl(&ov).as_bytes())?;
    let (tu, tv) = solver.trajectories();
    for (name, traj) in [("u_final.frdf", tu), ("v_final.frdf", tv)] {
        if let Some(last) = traj.last() {
            let mut bytes = Vec::new();
            write_frdf(last, &mut bytes)?;
            write_atomic(&dir.join(name), &bytes)?;
        }
    }
    write_checkpoints(&dir, "u_", tu, checkpoint_every)?;
    write_checkpoints(&dir, "v_", tv, checkpoint_every)?;
    println!("{}", outcome_line("u: ", &ou));
    println!("{}", outcome_line("v: ", &ov));
    let code = status_exit(ou.status).max(status_exit(ov.status));
    Ok(code)
}

pub fn cmd_exponent_scalar(
    n: u32,
    alpha: f64,
    sigma: f64,
    rho: f64,
    lambda_at: Option<f64>,
) -> Result<u8> {
    let inp = ExponentInputs::new(n, alpha, sigma, rho)?;
    let p_c = critical_exponent_scalar(&inp);
    let mut body = format!("\"p_c\": {}", fmt_float(p_c));
    if let Some(p) = lambda_at {
        let lam = lambda_exponent(p, &inp)?;
        body.push_str(&format!(", \"p\": {}, \"lambda\": {}", fmt_float(p), fmt_float(lam)));
    }
    println!("{{{body}}}");
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_exponent_system(
    n: u32,
    alpha: f64,
    beta: f64,
    p: f64,
    q: f64,
    sigma1: f64,
    sigma2: f64,
    rho1: f64,
    rho2: f64,
) -> Result<u8> {
    let inp = SystemExponentInputs::new(n, alpha, beta, p, q, sigma1, sigma2, rho1, rho2)?;
    let (l1, l2) = l_exponents(&inp);
    let b = system_dimension_bounds(&inp)?;
    println!(
        "{{\"l1\": {}, \"l2\": {}, \"bound1\": {}, \"bound2\": {}, \"blowup_predicted\": {}, \"sign_l1q_l2\": {}, \"sign_l1_l2p\": {}}}",
        fmt_float(l1),
        fmt_float(l2),
        fmt_float(b.bound1),
        fmt_float(b.bound2),
        b.blowup_predicted,
        fmt_float(b.sign1),
        fmt_float(b.sign2),
    );
    Ok(EXIT_OK)
}

pub fn cmd_sweep(config_path: &Path, out: &Option<PathBuf>, jobs: Option<usize>) -> Result<u8> {
    let cfg = Config::load(config_path)?;
    let grid = grid_from(&cfg)?;
    let horizon_t = cfg.f64("sweep", "horizon")?;
    let steps = cfg.usize("time", "steps")?;
    let horizon =
        TimeGrid::new(horizon_t, steps).map_err(|e| cfg.locate("sweep", "horizon", e))?;
    let sweep_cfg = SweepConfig {
        p_min: cfg.f64("sweep", "p_min")?,
        p_max: cfg.f64("sweep", "p_max")?,
        p_step: cfg.f64("sweep", "p_step")?,
        amplitudes: cfg.f64_list("sweep", "amplitudes")?,
        grid,
        alpha: cfg.f64("equation", "alpha")?,
        sigma: cfg.f64_or("equation", "sigma", 0.0)?,
        rho: cfg.f64_or("equation", "rho", 0.0)?,
        horizon,
        blowup_threshold: cfg.f64_or("solver", "blowup_threshold", 1e6)?,
        picard_tol: cfg.f64_or("solver", "picard_tol", 1e-10)?,
        picard_max_iters: cfg.usize_or("solver", "max_iters", 60)?,
        budget_s: if cfg.has("sweep", "budget_s") {
            Some(cfg.f64("sweep", "budget_s")?)
        } else {
            None
        },
        seed: cfg.u64_or("sweep", "seed", 0)?,
        jobs: jobs.unwrap_or(0),
    };
    sweep_cfg.validate().map_err(|e| anyhow!("{e}"))?;

    let started = std::time::Instant::now();
    let result = run_sweep(&sweep_cfg)?;
    eprintln!(
        "sweep: {} cells, {} inconclusive, wall {:.1}s (heuristic finite-box protocol)",
        result.records.len(),
        result.inconclusive_cells,
        started.elapsed().as_secs_f64()
    );
    for (p, a1, a2) in &result.monotonicity_violations {
        eprintln!(
            "warning: amplitude monotonicity violated at p = {}: {} blew up, {} stayed global",
            fmt_float(*p),
            fmt_float(*a1),
            fmt_float(*a2)
        );
    }

    let dir = out_dir(&cfg, out);
    write_atomic(&dir.join("sweep.csv"), records_to_csv(&sweep_cfg, &result.records).as_bytes())?;
    write_atomic(&dir.join("boundary.json"), boundary_to_json(&result.boundary).as_bytes())?;
    match &result.boundary {
        Some(b) => {
            println!(
                "empirical boundary p = {} (half-width {}), theory p_c = {}",
                fmt_float(b.p_c_empirical),
                fmt_float(b.half_width),
                fmt_float(b.p_c_theory)
            );
            Ok(EXIT_OK)
        }
        None => {
            println!("no empirical boundary in the sampled p range");
            Ok(EXIT_NO_BOUNDARY)
        }
    }
}

pub fn cmd_mode_oracle(
    lambda: f64,
    alpha: f64,
    t_end: f64,
    steps: usize,
    compare: bool,
) -> Result<u8> {
    let grid = TimeGrid::new(t_end, steps)?;
    let y = solve_scalar_mode(lambda, alpha, &grid)?;
    let last = *y.last().unwrap();
    if compare {
        let exact = mittag_leffler(&MlArg::one_param(alpha, -lambda * t_end.powf(alpha))?)?;
        println!(
            "y({t_end}) = {last:.10}  E_a(-lambda t^a) = {exact:.10}  diff = {}",
            fmt_float((last - exact).abs())
        );
    } else {
        println!("{last:.10}");
    }
    Ok(EXIT_OK)
}
