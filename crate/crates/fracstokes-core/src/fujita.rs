//! Fujita-type critical exponents and the empirical blow-up sweep.
//!
//! Closed forms implemented here:
//! * scalar threshold p_c = 1 + (2(sigma+1) + rho alpha) / (N alpha): no
//!   nontrivial global nonnegative solution exists for 1 < p <= p_c;
//! * the scaling exponent lambda(p) whose sign drives that theorem, with
//!   lambda(p_c) = 0 as an exact algebraic identity;
//! * the system exponents l1, l2 and the resolved dimension bounds
//!   N <= (2(a(1+s1) + p b(1+s2)) + a b (r1 + p r2)) / (a b (pq - 1)) and its
//!   exchange-symmetric counterpart. The sign conditions l1/q + l2 >= 0 and
//!   l1 + l2/p >= 0 are equivalent to the two bounds; both raw signs are
//!   reported for cross-validation.
//!
//! The sweep harness probes the scalar dichotomy numerically. A periodic box
//! has no true Fujita dichotomy (every positive-mass cell eventually grows),
//! so the protocol fixes a horizon T_h and box with diffusion length
//! sqrt(2 T_h^alpha) <= L/4, uses Gaussian data of width L/16, and classifies
//! a cell Global when its sup-norm has decayed below the initial amplitude by
//! T_h without crossing the blow-up threshold. The empirical boundary is the
//! blow-up/decay transition in p at the smallest amplitude, bisected to width
//! <= 0.1; it is a heuristic surrogate, not a measurement of p_c itself.

use crate::error::{Error, Result};
use crate::fractional::TimeGrid;
use crate::grid::{gaussian_initial, GridSpec};
use crate::semilinear::{evolve_semilinear, RunStatus, SolveConfig, SourceSpec};
use std::time::Instant;

/// Parameters of the scalar blow-up theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentInputs {
    pub n_dim: u32,
    pub alpha: f64,
    pub sigma: f64,
    pub rho: f64,
}

impl ExponentInputs {
    pub fn new(n_dim: u32, alpha: f64, sigma: f64, rho: f64) -> Result<Self> {
        if n_dim < 1 {
            return Err(Error::domain("N must be >= 1"));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::domain(format!("alpha = {alpha} outside (0, 1]")));
        }
        if !(sigma > -1.0 && sigma.is_finite()) {
            return Err(Error::domain(format!("sigma = {sigma} must be > -1")));
        }
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::domain(format!("rho = {rho} must be >= 0")));
        }
        Ok(ExponentInputs { n_dim, alpha, sigma, rho })
    }
}

/// Parameters of the system blow-up theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemExponentInputs {
    pub n_dim: u32,
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho1: f64,
    pub rho2: f64,
}

impl SystemExponentInputs {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n_dim: u32,
        alpha: f64,
        beta: f64,
        p: f64,
        q: f64,
        sigma1: f64,
        sigma2: f64,
        rho1: f64,
        rho2: f64,
    ) -> Result<Self> {
        if n_dim < 1 {
            return Err(Error::domain("N must be >= 1"));
        }
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::domain(format!("{name} = {v} outside (0, 1]")));
            }
        }
        for (name, v) in [("p", p), ("q", q)] {
            if !(v > 1.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} = {v} must be > 1")));
            }
        }
        for (name, v) in [("sigma1", sigma1), ("sigma2", sigma2)] {
            if !(v > -1.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} = {v} must be > -1")));
            }
        }
        for (name, v) in [("rho1", rho1), ("rho2", rho2)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} = {v} must be >= 0")));
            }
        }
        Ok(SystemExponentInputs { n_dim, alpha, beta, p, q, sigma1, sigma2, rho1, rho2 })
    }

    /// Holder conjugates (p', q').
    pub fn conjugates(&self) -> (f64, f64) {
        (self.p / (self.p - 1.0), self.q / (self.q - 1.0))
    }
}

/// p_c = 1 + (2(sigma+1) + rho alpha) / (N alpha).
pub fn critical_exponent_scalar(inp: &ExponentInputs) -> f64 {
    1.0 + (2.0 * (inp.sigma + 1.0) + inp.rho * inp.alpha) / (inp.n_dim as f64 * inp.alpha)
}

/// lambda(p) = (2/a)(a-1) p' - 2 p' - (2 sigma/a + rho) p'/p + 2/a + N,
/// with p' = p/(p-1); negative exactly for p < p_c.
pub fn lambda_exponent(p: f64, inp: &ExponentInputs) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::domain(format!("lambda_exponent needs p > 1, got {p}")));
    }
    let a = inp.alpha;
    let pp = p / (p - 1.0);
    Ok((2.0 / a) * (a - 1.0) * pp - 2.0 * pp - (2.0 * inp.sigma / a + inp.rho) * pp / p
        + 2.0 / a
        + inp.n_dim as f64)
}

/// l1 = 2/b + (1/p)(2 s1/b + r1) - (1/p')(2/b + N) and the q-side analogue.
pub fn l_exponents(inp: &SystemExponentInputs) -> (f64, f64) {
    let n = inp.n_dim as f64;
    let (pp, qq) = inp.conjugates();
    let l1 = 2.0 / inp.beta + (2.0 * inp.sigma1 / inp.beta + inp.rho1) / inp.p
        - (2.0 / inp.beta + n) / pp;
    let l2 = 2.0 / inp.alpha + (2.0 * inp.sigma2 / inp.alpha + inp.rho2) / inp.q
        - (2.0 / inp.alpha + n) / qq;
    (l1, l2)
}

/// Resolved dimension bounds and the raw sign conditions they encode.
#[derive(Debug, Clone, Copy)]
pub struct SystemBounds {
    pub bound1: f64,
    pub bound2: f64,
    pub blowup_predicted: bool,
    /// l1/q + l2 (>= 0 is equivalent to N <= bound1)
    pub sign1: f64,
    /// l1 + l2/p (>= 0 is equivalent to N <= bound2)
    pub sign2: f64,
}

/// Dimension bounds under which the system admits no nontrivial global
/// nonnegative solution: blow-up is predicted when N <= max(bound1, bound2).
pub fn system_dimension_bounds(inp: &SystemExponentInputs) -> Result<SystemBounds> {
    let (a, b, p, q) = (inp.alpha, inp.beta, inp.p, inp.q);
    let pq1 = p * q - 1.0;
    if pq1 <= 0.0 {
        return Err(Error::domain("system bounds degenerate for pq <= 1"));
    }
    let bound1 = (2.0 * (a * (1.0 + inp.sigma1) + p * b * (1.0 + inp.sigma2))
        + a * b * (inp.rho1 + p * inp.rho2))
        / (a * b * pq1);
    let bound2 = (2.0 * (b * (1.0 + inp.sigma2) + q * a * (1.0 + inp.sigma1))
        + a * b * (q * inp.rho1 + inp.rho2))
        / (a * b * pq1);
    let (l1, l2) = l_exponents(inp);
    let n = inp.n_dim as f64;
    Ok(SystemBounds {
        bound1,
        bound2,
        blowup_predicted: n <= bound1.max(bound2),
        sign1: l1 / q + l2,
        sign2: l1 + l2 / p,
    })
}

/// Sweep protocol parameters. The Gaussian data width is fixed at L/16.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub p_min: f64,
    pub p_max: f64,
    pub p_step: f64,
    /// amplitudes of the Gaussian data; the smallest drives the boundary
    pub amplitudes: Vec<f64>,
    pub grid: GridSpec,
    pub alpha: f64,
    pub sigma: f64,
    pub rho: f64,
    /// horizon T_h and its step count
    pub horizon: TimeGrid,
    pub blowup_threshold: f64,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    /// wall-clock cap; projected cost is estimated from a pilot cell
    pub budget_s: Option<f64>,
    /// recorded for reproducibility bookkeeping (the protocol is deterministic)
    pub seed: u64,
    /// worker threads (0 = rayon default)
    pub jobs: usize,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_step > 0.0) {
            return Err(Error::domain("p_step must be positive"));
        }
        if self.amplitudes.is_empty() || self.amplitudes.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::domain("amplitudes must be positive and nonempty"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::domain("alpha outside (0, 1]"));
        }
        // finite-box protocol: diffusion length within a quarter box
        let diff_len = (2.0 * self.horizon.t_end().powf(self.alpha)).sqrt();
        if diff_len > self.grid.half_width() / 4.0 {
            return Err(Error::domain(format!(
                "horizon too long for the box: sqrt(2 T^a) = {diff_len:.3} > L/4 = {:.3}",
                self.grid.half_width() / 4.0
            )));
        }
        Ok(())
    }

    pub fn p_grid(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut k = 0usize;
        loop {
            let p = self.p_min + k as f64 * self.p_step;
            if p > self.p_max + 1e-12 {
                break;
            }
            out.push(p);
            k += 1;
        }
        out
    }

    fn gaussian_width(&self) -> f64 {
        self.grid.half_width() / 16.0
    }

    fn solve_config(&self) -> SolveConfig {
        let mut c = SolveConfig::new(self.horizon);
        c.picard_tol = self.picard_tol;
        c.picard_max_iters = self.picard_max_iters;
        c.blowup_threshold = self.blowup_threshold;
        c.nonneg_clamp = true;
        c
    }
}

/// One (p, amplitude) cell of the sweep.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub p: f64,
    pub amplitude: f64,
    pub status: RunStatus,
    pub t_star: Option<f64>,
    pub max_sup_norm: f64,
    pub picard_iters: u64,
    /// nominal runtime at a fixed rate per deterministic work unit, so
    /// records (and their CSV) are byte-reproducible across runs
    pub runtime_s: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct BoundaryEstimate {
    pub p_c_theory: f64,
    pub p_c_empirical: f64,
    pub half_width: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub records: Vec<SweepRecord>,
    pub boundary: Option<BoundaryEstimate>,
    pub inconclusive_cells: usize,
    /// (p, smaller amplitude that blew up, larger amplitude that did not)
    pub monotonicity_violations: Vec<(f64, f64, f64)>,
}

/// nominal seconds per (node update x grid point x Picard sweep)
const NOMINAL_UNIT_COST: f64 = 1e-9;

fn run_cell(config: &SweepConfig, p: f64, amplitude: f64) -> Result<SweepRecord> {
    let u0 = gaussian_initial(config.grid, amplitude, config.gaussian_width(), &[0.0; 3])?;
    let spec = SourceSpec::new(1.0, config.sigma, config.rho, p)?;
    let out = evolve_semilinear(&u0, &spec, config.alpha, &config.solve_config())?;
    // finite-box classification: Global demands decay below the initial sup
    let status = match out.status {
        RunStatus::Global => {
            let decayed = out
                .sup_norm_history
                .last()
                .map(|&(_, s)| s < amplitude)
                .unwrap_or(false);
            if decayed {
                RunStatus::Global
            } else {
                RunStatus::Inconclusive
            }
        }
        s => s,
    };
    let sweeps = out.total_picard_sweeps;
    let work = sweeps * config.horizon.steps() as u64 * config.grid.total_points() as u64;
    Ok(SweepRecord {
        p,
        amplitude,
        status,
        t_star: out.t_star,
        max_sup_norm: out.max_sup_norm(),
        picard_iters: sweeps,
        runtime_s: work as f64 * NOMINAL_UNIT_COST,
    })
}

/// Run the sweep grid and estimate the empirical blow-up boundary.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let p_grid = config.p_grid();
    let mut amplitudes = config.amplitudes.clone();
    amplitudes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cells: Vec<(f64, f64)> = p_grid
        .iter()
        .flat_map(|&p| amplitudes.iter().map(move |&a| (p, a)))
        .collect();
    if cells.is_empty() {
        return Ok(SweepResult {
            records: Vec::new(),
            boundary: None,
            inconclusive_cells: 0,
            monotonicity_violations: Vec::new(),
        });
    }

    // pilot cell: one real run to project the wall-clock cost
    let pilot_started = Instant::now();
    let pilot = run_cell(config, cells[0].0, cells[0].1)?;
    let pilot_elapsed = pilot_started.elapsed().as_secs_f64();
    if let Some(budget) = config.budget_s {
        let bisection_allowance = 8.0;
        let projected = pilot_elapsed * (cells.len() as f64 + bisection_allowance);
        if projected > budget {
            return Err(Error::Budget(format!(
                "projected {projected:.1}s ({} cells x {pilot_elapsed:.2}s pilot) exceeds budget {budget:.1}s",
                cells.len()
            )));
        }
    }

    let rest: Vec<SweepRecord> = if config.jobs == 1 {
        cells[1..]
            .iter()
            .map(|&(p, a)| run_cell(config, p, a))
            .collect::<Result<_>>()?
    } else {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::domain(format!("worker pool: {e}")))?;
        pool.install(|| {
            cells[1..]
                .par_iter()
                .map(|&(p, a)| run_cell(config, p, a))
                .collect::<Result<_>>()
        })?
    };
    let mut records = Vec::with_capacity(cells.len());
    records.push(pilot);
    records.extend(rest);
    records.sort_by(|a, b| {
        a.p.partial_cmp(&b.p).unwrap().then(a.amplitude.partial_cmp(&b.amplitude).unwrap())
    });

    let inconclusive_cells =
        records.iter().filter(|r| r.status == RunStatus::Inconclusive).count();

    // comparison-principle heuristic: flag non-monotone amplitude columns
    let mut monotonicity_violations = Vec::new();
    for &p in &p_grid {
        let col: Vec<&SweepRecord> =
            records.iter().filter(|r| r.p == p).collect();
        for w in col.windows(2) {
            if w[0].status == RunStatus::BlowUp && w[1].status == RunStatus::Global {
                monotonicity_violations.push((p, w[0].amplitude, w[1].amplitude));
            }
        }
    }

    // boundary: transition of the smallest amplitude, refined by bisection
    let a_min = amplitudes[0];
    let small: Vec<&SweepRecord> =
        records.iter().filter(|r| r.amplitude == a_min).collect();
    let p_blow = small
        .iter()
        .filter(|r| r.status == RunStatus::BlowUp)
        .map(|r| r.p)
        .fold(f64::NEG_INFINITY, f64::max);
    let p_glob = small
        .iter()
        .filter(|r| r.status == RunStatus::Global && r.p > p_blow)
        .map(|r| r.p)
        .fold(f64::INFINITY, f64::min);
    let boundary = if p_blow.is_finite() && p_glob.is_finite() {
        let (mut lo, mut hi) = (p_blow, p_glob);
        while hi - lo > 0.1 {
            let mid = 0.5 * (lo + hi);
            let rec = run_cell(config, mid, a_min)?;
            if rec.status == RunStatus::BlowUp {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let inp = ExponentInputs::new(
            config.grid.ndim() as u32,
            config.alpha,
            config.sigma,
            config.rho,
        )?;
        Some(BoundaryEstimate {
            p_c_theory: critical_exponent_scalar(&inp),
            p_c_empirical: 0.5 * (lo + hi),
            half_width: 0.5 * (hi - lo),
        })
    } else {
        None
    };

    Ok(SweepResult { records, boundary, inconclusive_cells, monotonicity_violations })
}

/// Round to 10 significant decimal digits (deterministic text output).
pub fn fmt_float(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{v:.9e}").parse().unwrap();
    format!("{rounded}")
}

/// CSV with the fixed sweep header; `t_star` is empty for non-blow-up cells.
pub fn records_to_csv(config: &SweepConfig, records: &[SweepRecord]) -> String {
    let mut out = String::from("p,amplitude,alpha,sigma,rho,N,status,t_star,max_sup_norm,picard_iters,runtime_s\n");
    for r in records {
        let t_star = r.t_star.map(fmt_float).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt_float(r.p),
            fmt_float(r.amplitude),
            fmt_float(config.alpha),
            fmt_float(config.sigma),
            fmt_float(config.rho),
            config.grid.ndim(),
            r.status.label(),
            t_star,
            fmt_float(r.max_sup_norm),
            r.picard_iters,
            fmt_float(r.runtime_s),
        ));
    }
    out
}

/// The boundary summary JSON object.
pub fn boundary_to_json(b: &Option<BoundaryEstimate>) -> String {
    match b {
        Some(b) => format!(
            "{{\"p_c_theory\": {}, \"p_c_empirical\": {}, \"half_width\": {}, \"heuristic\": true}}\n",
            fmt_float(b.p_c_theory),
            fmt_float(b.p_c_empirical),
            fmt_float(b.half_width)
        ),
        None => "{\"p_c_theory\": null, \"p_c_empirical\": null, \"half_width\": null, \"heuristic\": true}\n".to_string(),
    }
}
