//! Discrete Riemann-Liouville calculus on uniform time grids.
//!
//! D^{1-a} f = (d/dt) I^a f is discretized by product-trapezoidal integration
//! of I^a against the piecewise-linear interpolant of the samples (the
//! kernel is integrated exactly on every panel, including the first), with
//! the outer time derivative applied exactly to the interpolant. That is the
//! classical L1 construction; it reproduces f itself at a = 1 to roundoff.
//!
//! `solve_scalar_mode` time-steps the Fourier-mode relaxation equation
//! y' = -lambda D^{1-a} y, y(0) = 1, in its integrated (Volterra) form
//! y = 1 - lambda I^a y, which the same product quadrature turns into a
//! semi-implicit scheme: history enters through a convolution sum and the
//! newest value is solved for in closed form. The exact solution is
//! E_{a,1}(-lambda t^a), which makes this module a structurally independent
//! check of the spectral propagator. (The Caputo variant I^{1-a} f' plays no
//! role in the evolution equations here; only the Riemann-Liouville form
//! enters.)
//!
//! Accuracy note: solutions start with a t^a cusp, so errors measured at the
//! horizon converge with order ~ 1+a while the node-wise maximum is dominated
//! by the first few panels (order ~ 2a). Consistency checks should therefore
//! probe away from t = 0.

use crate::error::{Error, Result};
use crate::special::gamma_fn;

/// Uniform grid t_j = j dt on [0, t_end].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_end: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, steps: usize) -> Result<Self> {
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::domain(format!("t_end must be positive, got {t_end}")));
        }
        if steps == 0 {
            return Err(Error::domain("steps must be >= 1"));
        }
        Ok(TimeGrid { t_end, steps })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }
    pub fn steps(&self) -> usize {
        self.steps
    }
    pub fn dt(&self) -> f64 {
        self.t_end / self.steps as f64
    }
    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.dt()
    }
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(|j| self.node(j))
    }
}

/// Convolution weights of the discrete D^{1-a} at one target node.
#[derive(Debug, Clone)]
pub struct RlWeights {
    alpha: f64,
    weights: Vec<f64>,
}

impl RlWeights {
    /// Weights w_0..w_j with D^{1-a} f(t_j) ~ sum_i w_i f(t_i).
    pub fn at_node(grid: &TimeGrid, alpha: f64, j: usize) -> Result<Self> {
        check_alpha(alpha)?;
        if j == 0 {
            return Err(Error::domain(
                "D^{1-a} at t = 0 diverges like t^{a-1} for f(0) != 0",
            ));
        }
        if j > grid.steps {
            return Err(Error::domain(format!("node {j} beyond grid ({})", grid.steps)));
        }
        let dt = grid.dt();
        let inv_gamma = 1.0 / gamma_fn(alpha)?;
        let tj = grid.node(j);
        // g_i = (a_i^alpha - b_i^alpha) / (Gamma(a) a dt), the slope weight of panel i
        let g = |i: usize| -> f64 {
            let a = tj - grid.node(i);
            let b = tj - grid.node(i + 1);
            (a.powf(alpha) - b.powf(alpha)) * inv_gamma / (alpha * dt)
        };
        let mut weights = vec![0.0; j + 1];
        weights[0] = tj.powf(alpha - 1.0) * inv_gamma - g(0);
        for i in 1..j {
            weights[i] = g(i - 1) - g(i);
        }
        weights[j] = g(j - 1);
        Ok(RlWeights { alpha, weights })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn apply(&self, samples: &[f64]) -> f64 {
        self.weights.iter().zip(samples).map(|(w, f)| w * f).sum()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("alpha = {alpha} outside (0, 1]")))
    }
}

/// Discrete D^{1-a} f(t_j) from samples at nodes 0..=j.
pub fn rl_derivative_discrete(
    samples: &[f64],
    alpha: f64,
    grid: &TimeGrid,
    j: usize,
) -> Result<f64> {
    if samples.len() < j + 1 {
        return Err(Error::domain(format!(
            "need samples at nodes 0..={j}, got {}",
            samples.len()
        )));
    }
    Ok(RlWeights::at_node(grid, alpha, j)?.apply(&samples[..=j]))
}

/// Scheme blow-up guard; the exact mode solution is bounded by 1.
const MODE_INSTABILITY_LIMIT: f64 = 1e3;

/// Time-step y' = -lambda D^{1-a} y, y(0) = 1; returns y at all nodes.
///
/// Converges to E_{a,1}(-lambda t^a) under grid refinement.
pub fn solve_scalar_mode(lambda: f64, alpha: f64, grid: &TimeGrid) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    let n = grid.steps;
    let dt = grid.dt();
    let inv_gamma = 1.0 / gamma_fn(alpha)?;

    // Panel weights per gap d = j - i over [t_i, t_{i+1}], kernel (t_j - s)^{a-1}:
    //   w0[d] integrates the kernel, w1[d] the kernel times the local slope factor.
    let mut pa = vec![0.0; n + 2]; // (d dt)^a
    let mut p1 = vec![0.0; n + 2]; // (d dt)^{a+1}
    for (d, (pa_d, p1_d)) in pa.iter_mut().zip(p1.iter_mut()).enumerate() {
        let t = d as f64 * dt;
        *pa_d = t.powf(alpha);
        *p1_d = t.powf(alpha + 1.0);
    }
    let w0 = |d: usize| (pa[d] - pa[d - 1]) / alpha;
    let w1 = |d: usize| {
        (d as f64 * dt * (pa[d] - pa[d - 1]) / alpha - (p1[d] - p1[d - 1]) / (alpha + 1.0)) / dt
    };
    // coefficient of y_{j-d} in I^a y(t_j) for interior samples
    let mut conv = vec![0.0; n + 1];
    conv[0] = w1(1);
    for d in 1..=n {
        conv[d] = w0(d) - w1(d) + if d < n + 1 { w1(d + 1) } else { 0.0 };
    }

    let mut y = vec![0.0; n + 1];
    y[0] = 1.0;
    for j in 1..=n {
        let mut hist = (w0(j) - w1(j)) * y[0];
        for m in 1..j {
            hist += conv[j - m] * y[m];
        }
        let denom = 1.0 + lambda * inv_gamma * conv[0];
        y[j] = (1.0 - lambda * inv_gamma * hist) / denom;
        if !y[j].is_finite() || y[j].abs() > MODE_INSTABILITY_LIMIT {
            return Err(Error::NonConvergence(format!(
                "mode scheme instability at t = {}: y = {}",
                grid.node(j),
                y[j]
            )));
        }
    }
    Ok(y)
}
