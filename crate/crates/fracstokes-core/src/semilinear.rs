//! Mild-solution Picard iteration for the semilinear equation
//! u_t = D^{1-a} Lap u + c t^sigma |x|^rho u^p and the two-component system,
//! with blow-up detection.
//!
//! A trajectory on the time grid is a fixed point of
//!   Psi(u)(t_j) = G_a(t_j) u0 + int_0^{t_j} G_a(t_j - tau) N(u(tau), tau) dtau,
//! discretized with trapezoidal weights. For sigma in (-1, 0) the first
//! panel integrates t^sigma exactly against a constant, so the singular
//! factor never gets sampled at t = 0.
//!
//! The equation is nonlocal in time: every evaluation convolves the full
//! history from t = 0. Whole-window Picard only contracts while
//! (window length) x (Lipschitz constant) < 1, so the solver marches: it
//! converges a chunk of nodes, freezes them, and extends the window with the
//! previous trajectory as the initial guess, which is exactly the resumption
//! semantics a nonlocal equation needs (restarting would silently drop the
//! memory term). Chunks shrink on divergence and grow back on easy passes.
//!
//! Blow-up is declared when a trajectory crosses the configured threshold B
//! (t* interpolated at the first crossing) or when Picard distances grow for
//! 5 straight sweeps above sup-norm 1e3.

use crate::error::{Error, Result};
use crate::fractional::TimeGrid;
use crate::grid::{forward_transform, inverse_transform, GridSpec, ScalarField, SpectralField};
use crate::propagator::multiplier;
use num_complex::Complex64;
use std::sync::Arc;

/// Nonlinearity description c t^sigma |x|^rho u^p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    coefficient: f64,
    sigma: f64,
    rho: f64,
    p: f64,
}

impl SourceSpec {
    /// Requires c >= 0, sigma > -1, rho >= 0 and p >= 1 (p = 1 admits the
    /// linear-reaction reference problems; the blow-up theory needs p > 1).
    pub fn new(coefficient: f64, sigma: f64, rho: f64, p: f64) -> Result<Self> {
        if !(coefficient >= 0.0 && coefficient.is_finite()) {
            return Err(Error::domain(format!("coefficient must be >= 0, got {coefficient}")));
        }
        if !(sigma > -1.0 && sigma.is_finite()) {
            return Err(Error::domain(format!("sigma must be > -1, got {sigma}")));
        }
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::domain(format!("rho must be >= 0, got {rho}")));
        }
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::domain(format!("p must be >= 1, got {p}")));
        }
        Ok(SourceSpec { coefficient, sigma, rho, p })
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Solver knobs; see the module docs for the divergence protocol.
#[derive(Debug, Clone, Copy)]
pub struct SolveConfig {
    pub tgrid: TimeGrid,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub blowup_threshold: f64,
    pub nonneg_clamp: bool,
}

impl SolveConfig {
    pub fn new(tgrid: TimeGrid) -> Self {
        SolveConfig {
            tgrid,
            picard_tol: 1e-10,
            picard_max_iters: 60,
            blowup_threshold: 1e6,
            nonneg_clamp: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.picard_tol > 0.0) {
            return Err(Error::domain("picard_tol must be positive"));
        }
        if self.picard_max_iters == 0 {
            return Err(Error::domain("picard_max_iters must be >= 1"));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(Error::domain("blowup_threshold must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Global,
    BlowUp,
    Inconclusive,
}

impl RunStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::Global => "Global",
            RunStatus::BlowUp => "BlowUp",
            RunStatus::Inconclusive => "Inconclusive",
        }
    }
}

/// Classification of one trajectory. `t_star` is present exactly for BlowUp.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub t_star: Option<f64>,
    /// (t_j, sup-norm) for every computed node.
    pub sup_norm_history: Vec<(f64, f64)>,
    /// Picard sweeps charged to the chunk that converged each node.
    pub picard_iters_history: Vec<u32>,
    /// successive sup-distances of the first marching window (contraction diagnostic)
    pub first_window_distances: Vec<f64>,
    /// total Picard sweeps executed, converged or not
    pub total_picard_sweeps: u64,
    /// samples clamped to 0 by u^p in the last Picard sweep
    pub clamped_samples: u64,
    /// minimum sample over the final trajectory (positivity diagnostic)
    pub min_sample: f64,
}

impl RunOutcome {
    pub fn max_sup_norm(&self) -> f64 {
        self.sup_norm_history.iter().fold(0.0f64, |m, &(_, s)| m.max(s))
    }
}

/// Pointwise c t^sigma |x|^rho u^p; |x| is the minimum-image distance to the
/// box center. Returns the field and how many samples were clamped.
pub fn nonlinearity_field(
    u: &ScalarField,
    spec: &SourceSpec,
    t: f64,
    nonneg_clamp: bool,
) -> Result<(ScalarField, u64)> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("nonlinearity_field needs t >= 0, got {t}")));
    }
    if spec.sigma < 0.0 && t == 0.0 {
        return Err(Error::domain(
            "t^sigma is singular at t = 0 for sigma < 0; quadrature must not sample it",
        ));
    }
    let tfac = if t == 0.0 && spec.sigma > 0.0 {
        0.0
    } else if spec.sigma == 0.0 {
        1.0
    } else {
        t.powf(spec.sigma)
    };
    let scale = spec.coefficient * tfac;
    let p = spec.p;
    let p_int = if (p - p.round()).abs() < 1e-12 { Some(p.round() as i32) } else { None };
    let mut clamped = 0u64;
    let mut values = Vec::with_capacity(u.values.len());
    let center = [0.0f64; 3];
    for (flat, &v) in u.values.iter().enumerate() {
        let base = if v < 0.0 && p_int.is_none() {
            if !nonneg_clamp {
                return Err(Error::domain(format!(
                    "u^p with non-integer p = {p} on negative sample {v}; enable nonneg_clamp"
                )));
            }
            clamped += 1;
            0.0
        } else {
            v
        };
        let up = match p_int {
            Some(1) => base,
            Some(2) => base * base,
            Some(k) => base.powi(k),
            None => base.powf(p),
        };
        let r_fac = if spec.rho == 0.0 {
            1.0
        } else {
            u.grid.min_image_distance(flat, &center).powf(spec.rho)
        };
        values.push(scale * r_fac * up);
    }
    Ok((ScalarField { grid: u.grid, values }, clamped))
}

/// Quadrature weight of node i in int_0^{t_j}, with the sigma-singular first
/// panel folded into node 1.
fn node_weight(j: usize, i: usize, dt: f64, sigma: f64) -> f64 {
    debug_assert!(i <= j && j >= 1);
    if sigma < 0.0 {
        // panel [0, dt] ~ G(dt) dt^{1+sigma}/(1+sigma), expressed against g(dt)
        let first = dt / (1.0 + sigma);
        match i {
            0 => 0.0,
            1 => first + if j > 1 { 0.5 * dt } else { 0.0 },
            _ if i == j => 0.5 * dt,
            _ => dt,
        }
    } else if i == 0 || i == j {
        0.5 * dt
    } else {
        dt
    }
}

/// One whole-window application of the Picard map Psi.
///
/// `candidate` holds fields at every node of `tgrid` (node 0 is ignored and
/// replaced by u0). This is the reference map; the marching solver freezes
/// converged prefixes but must agree with it to the configured tolerance.
pub fn picard_step(
    candidate: &[ScalarField],
    u0: &ScalarField,
    spec: &SourceSpec,
    alpha: f64,
    tgrid: &TimeGrid,
    nonneg_clamp: bool,
) -> Result<Vec<ScalarField>> {
    let n = tgrid.steps();
    if candidate.len() != n + 1 {
        return Err(Error::domain(format!(
            "candidate trajectory has {} nodes, grid needs {}",
            candidate.len(),
            n + 1
        )));
    }
    let grid = u0.grid;
    let dt = tgrid.dt();
    let u0_hat = forward_transform(u0);
    // transforms of the nonlinearity along the candidate
    let mut nl_hat: Vec<Vec<Complex64>> = Vec::with_capacity(n + 1);
    for (j, field) in candidate.iter().enumerate() {
        if j == 0 && spec.sigma < 0.0 {
            nl_hat.push(vec![Complex64::new(0.0, 0.0); grid.total_points()]);
            continue;
        }
        let (f, _) = nonlinearity_field(field, spec, tgrid.node(j), nonneg_clamp)?;
        nl_hat.push(forward_transform(&f).coeffs);
    }
    let mults: Vec<Arc<Vec<f64>>> = (0..=n)
        .map(|d| multiplier(grid, alpha, d as f64 * dt).map(|m| Arc::new(m.values().to_vec())))
        .collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(n + 1);
    out.push(u0.clone());
    for j in 1..=n {
        let mut acc: Vec<Complex64> = u0_hat
            .coeffs
            .iter()
            .zip(mults[j].iter())
            .map(|(c, &m)| c * m)
            .collect();
        for i in 0..=j {
            let w = node_weight(j, i, dt, spec.sigma);
            if w == 0.0 {
                continue;
            }
            let m = &mults[j - i];
            for ((slot, c), &mv) in acc.iter_mut().zip(nl_hat[i].iter()).zip(m.iter()) {
                *slot += w * mv * c;
            }
        }
        out.push(inverse_transform(&SpectralField { grid, coeffs: acc })?);
    }
    Ok(out)
}

const DIVERGENCE_SUP: f64 = 1e3;
const DIVERGENCE_STREAK: usize = 5;
const CHUNK_START: usize = 16;
const CHUNK_MAX: usize = 64;

/// One evolving component inside the marching engine.
struct Component {
    alpha: f64,
    spec: SourceSpec,
    u0_hat: Vec<Complex64>,
    mults: Vec<Arc<Vec<f64>>>,
    traj: Vec<ScalarField>,
    nl_hat: Vec<Vec<Complex64>>,
    sup: Vec<f64>,
    clamped_last: u64,
}

/// Marching Picard engine over one or two mutually-coupled components.
/// Component c draws its nonlinearity from component `source_of[c]`.
struct MarchEngine {
    grid: GridSpec,
    tgrid: TimeGrid,
    config: SolveConfig,
    comps: Vec<Component>,
    source_of: Vec<usize>,
    iters_hist: Vec<u32>,
    first_window_distances: Vec<f64>,
    converged_prefix: usize,
    total_sweeps: u64,
}

enum MarchEnd {
    Completed,
    BlewUp { t_star: f64 },
    Stalled,
}

impl MarchEngine {
    fn new(
        grid: GridSpec,
        config: SolveConfig,
        inputs: Vec<(&ScalarField, SourceSpec, f64)>,
        source_of: Vec<usize>,
    ) -> Result<Self> {
        config.validate()?;
        let tgrid = config.tgrid;
        let n = tgrid.steps();
        let dt = tgrid.dt();
        let mut comps = Vec::with_capacity(inputs.len());
        for (u0, spec, alpha) in inputs {
            if u0.grid != grid {
                return Err(Error::Grid("all components must share one grid".into()));
            }
            if u0.min_value() < 0.0 {
                return Err(Error::domain("initial data must be nonnegative"));
            }
            if u0.max_abs() >= config.blowup_threshold {
                return Err(Error::domain(
                    "blowup_threshold must exceed the initial sup-norm",
                ));
            }
            let mults: Vec<Arc<Vec<f64>>> = (0..=n)
                .map(|d| {
                    multiplier(grid, alpha, d as f64 * dt)
                        .map(|m| Arc::new(m.values().to_vec()))
                })
                .collect::<Result<_>>()?;
            let mut traj = Vec::with_capacity(n + 1);
            traj.push(u0.clone());
            let mut sup = vec![0.0; n + 1];
            sup[0] = u0.max_abs();
            comps.push(Component {
                alpha,
                spec,
                u0_hat: forward_transform(u0).coeffs,
                mults,
                traj,
                nl_hat: Vec::with_capacity(n + 1),
                sup,
                clamped_last: 0,
            });
        }
        let mut engine = MarchEngine {
            grid,
            tgrid,
            config,
            comps,
            source_of,
            iters_hist: vec![0; n + 1],
            first_window_distances: Vec::new(),
            converged_prefix: 1,
            total_sweeps: 0,
        };
        // node-0 transforms of the nonlinearity (zero placeholder for sigma < 0)
        for c in 0..engine.comps.len() {
            let nl = engine.nonlin_hat(c, 0)?;
            engine.comps[c].nl_hat.push(nl);
        }
        Ok(engine)
    }

    /// Transform of component c's forcing at node j (source field from the
    /// coupled component).
    fn nonlin_hat(&mut self, c: usize, j: usize) -> Result<Vec<Complex64>> {
        let src = self.source_of[c];
        let spec = self.comps[c].spec;
        if j == 0 && spec.sigma() < 0.0 {
            return Ok(vec![Complex64::new(0.0, 0.0); self.grid.total_points()]);
        }
        let t = self.tgrid.node(j);
        let field = &self.comps[src].traj[j];
        let (f, clamped) = nonlinearity_field(field, &spec, t, self.config.nonneg_clamp)?;
        self.comps[c].clamped_last = self.comps[c].clamped_last.saturating_add(clamped);
        Ok(forward_transform(&f).coeffs)
    }

    /// Fixed contribution of the frozen prefix [0, from) to node j of comp c.
    fn prefix_hat(&self, c: usize, j: usize, from: usize) -> Vec<Complex64> {
        let comp = &self.comps[c];
        let dt = self.tgrid.dt();
        let mut acc: Vec<Complex64> = comp
            .u0_hat
            .iter()
            .zip(comp.mults[j].iter())
            .map(|(v, &m)| v * m)
            .collect();
        for i in 0..from.min(j + 1) {
            let w = node_weight(j, i, dt, comp.spec.sigma());
            if w == 0.0 {
                continue;
            }
            let m = &comp.mults[j - i];
            for ((slot, v), &mv) in acc.iter_mut().zip(comp.nl_hat[i].iter()).zip(m.iter()) {
                *slot += w * mv * v;
            }
        }
        acc
    }

    fn march(&mut self) -> Result<MarchEnd> {
        let n = self.tgrid.steps();
        let dt = self.tgrid.dt();
        let mut chunk = CHUNK_START;
        let mut first_window = self.converged_prefix == 1;
        while self.converged_prefix <= n {
            let c0 = self.converged_prefix;
            let target = (c0 + chunk - 1).min(n);
            // initial guess: the homogeneous trajectory on the first window,
            // afterwards the last converged field replicated forward
            for comp in &mut self.comps {
                comp.traj.truncate(c0);
                comp.nl_hat.truncate(c0);
                for j in c0..=target {
                    let guess = if first_window {
                        let coeffs = comp
                            .u0_hat
                            .iter()
                            .zip(comp.mults[j].iter())
                            .map(|(v, &m)| v * m)
                            .collect();
                        inverse_transform(&SpectralField { grid: self.grid, coeffs })?
                    } else {
                        comp.traj[c0 - 1].clone()
                    };
                    comp.sup[comp.traj.len()] = guess.max_abs();
                    comp.traj.push(guess);
                }
            }
            for c in 0..self.comps.len() {
                for j in c0..=target {
                    let nl = self.nonlin_hat(c, j)?;
                    self.comps[c].nl_hat.push(nl);
                }
                debug_assert_eq!(self.comps[c].nl_hat.len(), target + 1);
            }
            // frozen-prefix contributions, per component and node
            let prefix: Vec<Vec<Vec<Complex64>>> = (0..self.comps.len())
                .map(|c| (c0..=target).map(|j| self.prefix_hat(c, j, c0)).collect())
                .collect();

            let mut dist_prev = f64::INFINITY;
            let mut grow_streak = 0usize;
            let mut converged_in = None;
            let mut diverged = false;
            let mut distances = Vec::new();
            'iter: for it in 0..self.config.picard_max_iters {
                self.total_sweeps += 1;
                let mut dist = 0.0f64;
                for comp in self.comps.iter_mut() {
                    comp.clamped_last = 0;
                }
                for c in 0..self.comps.len() {
                    for j in c0..=target {
                        let mut acc = prefix[c][j - c0].clone();
                        let comp = &self.comps[c];
                        for i in c0..=j {
                            let w = node_weight(j, i, dt, comp.spec.sigma());
                            if w == 0.0 {
                                continue;
                            }
                            let m = &comp.mults[j - i];
                            for ((slot, v), &mv) in
                                acc.iter_mut().zip(comp.nl_hat[i].iter()).zip(m.iter())
                            {
                                *slot += w * mv * v;
                            }
                        }
                        let unew =
                            inverse_transform(&SpectralField { grid: self.grid, coeffs: acc })?;
                        let d = unew
                            .values
                            .iter()
                            .zip(&self.comps[c].traj[j].values)
                            .fold(0.0f64, |mx, (a, b)| mx.max((a - b).abs()));
                        dist = dist.max(d);
                        let s = unew.max_abs();
                        self.comps[c].sup[j] = s;
                        self.comps[c].traj[j] = unew;
                        if self.source_of[c] == c {
                            // self-coupled: propagate fresh values down the window
                            let nl = self.nonlin_hat(c, j)?;
                            self.comps[c].nl_hat[j] = nl;
                        }
                        if !s.is_finite() || s > self.config.blowup_threshold {
                            diverged = true;
                            break 'iter;
                        }
                    }
                }
                // cross-coupled forcings refresh jointly after the sweep so the
                // fixed-point map stays symmetric under component exchange
                for c in 0..self.comps.len() {
                    if self.source_of[c] != c {
                        for j in c0..=target {
                            let nl = self.nonlin_hat(c, j)?;
                            self.comps[c].nl_hat[j] = nl;
                        }
                    }
                }
                if first_window {
                    distances.push(dist);
                }
                if dist < self.config.picard_tol {
                    converged_in = Some(it + 1);
                    break;
                }
                if dist >= dist_prev {
                    grow_streak += 1;
                    let window_sup = (c0..=target)
                        .flat_map(|j| self.comps.iter().map(move |c| c.sup[j]))
                        .fold(0.0f64, f64::max);
                    if grow_streak >= DIVERGENCE_STREAK && window_sup > DIVERGENCE_SUP {
                        diverged = true;
                        break;
                    }
                } else {
                    grow_streak = 0;
                }
                dist_prev = dist;
            }
            if first_window && !distances.is_empty() {
                self.first_window_distances = distances;
            }
            if diverged {
                let t_star = self.crossing_time().unwrap_or(self.tgrid.node(target));
                return Ok(MarchEnd::BlewUp { t_star });
            }
            match converged_in {
                Some(iters) => {
                    for j in c0..=target {
                        self.iters_hist[j] = iters as u32;
                    }
                    self.converged_prefix = target + 1;
                    first_window = false;
                    if iters <= self.config.picard_max_iters / 4 {
                        chunk = (chunk * 2).min(CHUNK_MAX);
                    }
                }
                None => {
                    if chunk == 1 {
                        return Ok(MarchEnd::Stalled);
                    }
                    chunk = (chunk / 2).max(1);
                }
            }
        }
        Ok(MarchEnd::Completed)
    }

    /// First threshold crossing in the latest trajectories, linearly
    /// interpolated; falls back to the divergence guard level.
    fn crossing_time(&self) -> Option<f64> {
        for threshold in [self.config.blowup_threshold, DIVERGENCE_SUP] {
            let mut earliest: Option<f64> = None;
            for comp in &self.comps {
                for j in 1..comp.traj.len() {
                    let s0 = comp.sup[j - 1];
                    let s1 = comp.sup[j];
                    if s1 > threshold || !s1.is_finite() {
                        let dt = self.tgrid.dt();
                        let frac = if !s1.is_finite() || s1 <= s0 {
                            1.0
                        } else {
                            ((threshold - s0) / (s1 - s0)).clamp(0.0, 1.0)
                        };
                        let t = self.tgrid.node(j - 1) + frac * dt;
                        earliest = Some(earliest.map_or(t, |e: f64| e.min(t)));
                        break;
                    }
                }
            }
            if earliest.is_some() {
                return earliest;
            }
        }
        None
    }

    fn outcome(&self, c: usize, end: &MarchEnd) -> RunOutcome {
        let comp = &self.comps[c];
        let upto = comp.traj.len();
        let sup_norm_history =
            (0..upto).map(|j| (self.tgrid.node(j), comp.sup[j])).collect::<Vec<_>>();
        let min_sample =
            comp.traj.iter().fold(f64::INFINITY, |m, f| m.min(f.min_value()));
        let (status, t_star) = match end {
            MarchEnd::Completed => (RunStatus::Global, None),
            MarchEnd::BlewUp { t_star } => (RunStatus::BlowUp, Some(*t_star)),
            MarchEnd::Stalled => (RunStatus::Inconclusive, None),
        };
        RunOutcome {
            status,
            t_star,
            sup_norm_history,
            picard_iters_history: self.iters_hist[..upto].to_vec(),
            first_window_distances: self.first_window_distances.clone(),
            total_picard_sweeps: self.total_sweeps,
            clamped_samples: comp.clamped_last,
            min_sample,
        }
    }
}

/// Scalar semilinear solver owning its trajectory.
pub struct SemilinearSolver {
    engine: MarchEngine,
    last_end: Option<MarchEnd>,
}

impl SemilinearSolver {
    pub fn new(
        u0: &ScalarField,
        spec: SourceSpec,
        alpha: f64,
        config: SolveConfig,
    ) -> Result<Self> {
        let engine = MarchEngine::new(u0.grid, config, vec![(u0, spec, alpha)], vec![0])?;
        Ok(SemilinearSolver { engine, last_end: None })
    }

    pub fn run(&mut self) -> Result<RunOutcome> {
        let end = self.engine.march()?;
        let out = self.engine.outcome(0, &end);
        self.last_end = Some(end);
        Ok(out)
    }

    /// Trajectory computed so far (full on Global, truncated on BlowUp).
    pub fn trajectory(&self) -> &[ScalarField] {
        &self.engine.comps[0].traj
    }

    pub fn time_grid(&self) -> TimeGrid {
        self.engine.tgrid
    }

    /// Extend the horizon and resume: the time grid grows by `extra_steps`
    /// of the same dt and iteration continues with the existing trajectory
    /// as initial guess, keeping the full memory convolution intact.
    pub fn extend_horizon(&mut self, extra_steps: usize) -> Result<RunOutcome> {
        if matches!(self.last_end, Some(MarchEnd::BlewUp { .. })) {
            return Err(Error::domain("cannot extend a run that blew up"));
        }
        let old = self.engine.tgrid;
        let n_new = old.steps() + extra_steps;
        let dt = old.dt();
        let tgrid = TimeGrid::new(dt * n_new as f64, n_new)?;
        self.engine.tgrid = tgrid;
        self.engine.config.tgrid = tgrid;
        for comp in &mut self.engine.comps {
            let mults: Vec<Arc<Vec<f64>>> = (0..=n_new)
                .map(|d| {
                    multiplier(self.engine.grid, comp.alpha, d as f64 * dt)
                        .map(|m| Arc::new(m.values().to_vec()))
                })
                .collect::<Result<_>>()?;
            comp.mults = mults;
            comp.sup.resize(n_new + 1, 0.0);
        }
        self.engine.iters_hist.resize(n_new + 1, 0);
        let end = self.engine.march()?;
        let out = self.engine.outcome(0, &end);
        self.last_end = Some(end);
        Ok(out)
    }
}

/// Run the scalar semilinear problem to its horizon.
pub fn evolve_semilinear(
    u0: &ScalarField,
    spec: &SourceSpec,
    alpha: f64,
    config: &SolveConfig,
) -> Result<RunOutcome> {
    SemilinearSolver::new(u0, *spec, alpha, *config)?.run()
}

/// Two-component system solver: u is forced by h1(x,t) v^p with memory order
/// alpha, v by h2(x,t) u^q with order beta. Blow-up of either component
/// terminates both at the same t*.
pub struct SystemSolver {
    engine: MarchEngine,
}

impl SystemSolver {
    pub fn new(
        u0: &ScalarField,
        v0: &ScalarField,
        spec_uv: SourceSpec,
        spec_vu: SourceSpec,
        alpha: f64,
        beta: f64,
        config: SolveConfig,
    ) -> Result<Self> {
        let engine = MarchEngine::new(
            u0.grid,
            config,
            vec![(u0, spec_uv, alpha), (v0, spec_vu, beta)],
            vec![1, 0],
        )?;
        Ok(SystemSolver { engine })
    }

    pub fn run(&mut self) -> Result<(RunOutcome, RunOutcome)> {
        let end = self.engine.march()?;
        Ok((self.engine.outcome(0, &end), self.engine.outcome(1, &end)))
    }

    pub fn trajectories(&self) -> (&[ScalarField], &[ScalarField]) {
        (&self.engine.comps[0].traj, &self.engine.comps[1].traj)
    }
}

pub fn evolve_system(
    u0: &ScalarField,
    v0: &ScalarField,
    spec_uv: &SourceSpec,
    spec_vu: &SourceSpec,
    alpha: f64,
    beta: f64,
    config: &SolveConfig,
) -> Result<(RunOutcome, RunOutcome)> {
    SystemSolver::new(u0, v0, *spec_uv, *spec_vu, alpha, beta, *config)?.run()
}

/// Geometric contraction-ratio estimate from successive Picard distances.
///
/// A distance that reached exactly zero means the fixed point was hit; the
/// ratio is reported as 0. Otherwise at least 3 recorded sweeps are needed.
pub fn contraction_estimate(distances: &[f64]) -> Result<f64> {
    if distances.iter().any(|&d| d == 0.0) {
        return Ok(0.0);
    }
    if distances.len() < 3 {
        return Err(Error::domain(format!(
            "contraction estimate needs >= 3 recorded iterations, got {}",
            distances.len()
        )));
    }
    let ratios: Vec<f64> =
        distances.windows(2).map(|w| w[1] / w[0]).filter(|r| r.is_finite()).collect();
    let take = ratios.len().min(5);
    let tail = &ratios[ratios.len() - take..];
    let log_mean = tail.iter().map(|r| r.ln()).sum::<f64>() / take as f64;
    Ok(log_mean.exp())
}
