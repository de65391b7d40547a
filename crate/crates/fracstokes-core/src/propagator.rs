//! Solution operators of the linear equation u_t = D^{1-a} Lap u + f.
//!
//! On the Fourier side each mode obeys y' = -|xi|^2 D^{1-a} y, so the
//! homogeneous flow is the diagonal multiplier m_k(t) = E_{a,1}(-|xi_k|^2 t^a)
//! and the forced solution is the Duhamel form
//!   u^(t) = m(t) u0^ + int_0^t m(t - tau) f^(tau) dtau,
//! discretized here with trapezoidal weights (the integrand is continuous up
//! to tau = t because m(0) = 1, so no endpoint care is needed).
//!
//! The zero mode has m_0 = 1 for every (a, t): the discrete mass is conserved
//! exactly, and the Green function below integrates to exactly 1 on the grid.
//! For a < 1 these operators do not form a semigroup in t; nothing here may
//! assume evolve(t1 + t2) = evolve(t2) after evolve(t1).
//!
//! Multipliers are memoized by (grid, a, t) behind an RwLock, optionally
//! spilled to a directory of binary files (set via `set_disk_cache_dir`);
//! the disk layer is correctness-neutral.

use crate::error::{Error, Result};
use crate::fractional::TimeGrid;
use crate::grid::{
    field_norm, forward_transform, inverse_transform, GridSpec, Norm, ScalarField, SpectralField,
    WaveNumbers,
};
use crate::special::e_alpha_neg;
use num_complex::Complex64;
use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

/// Diagonal spectral factor m_k = E_{a,1}(-|xi_k|^2 t^a).
#[derive(Debug, Clone)]
pub struct Multiplier {
    pub grid: GridSpec,
    pub alpha: f64,
    pub t: f64,
    values: Arc<Vec<f64>>,
}

impl Multiplier {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Apply to a spectrum in place.
    pub fn apply(&self, spec: &mut SpectralField) {
        for (c, &m) in spec.coeffs.iter_mut().zip(self.values.iter()) {
            *c *= m;
        }
    }
}

#[derive(PartialEq, Eq, Hash, Clone, Copy)]
struct MultKey {
    ndim: usize,
    points: usize,
    half_width_bits: u64,
    alpha_bits: u64,
    t_bits: u64,
}

fn mem_cache() -> &'static RwLock<HashMap<MultKey, Arc<Vec<f64>>>> {
    static CACHE: OnceLock<RwLock<HashMap<MultKey, Arc<Vec<f64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn disk_dir() -> &'static Mutex<Option<PathBuf>> {
    static DIR: OnceLock<Mutex<Option<PathBuf>>> = OnceLock::new();
    DIR.get_or_init(|| Mutex::new(None))
}

/// Point the multiplier cache at a directory (`None` disables spilling).
pub fn set_disk_cache_dir(dir: Option<PathBuf>) {
    *disk_dir().lock().unwrap() = dir;
}

fn disk_file_name(key: &MultKey) -> String {
    format!(
        "ml_{}d_{}_{:016x}_{:016x}_{:016x}.bin",
        key.ndim, key.points, key.half_width_bits, key.alpha_bits, key.t_bits
    )
}

fn disk_load(key: &MultKey, len: usize) -> Option<Vec<f64>> {
    let dir = disk_dir().lock().unwrap().clone()?;
    let bytes = std::fs::read(dir.join(disk_file_name(key))).ok()?;
    if bytes.len() != len * 8 {
        return None;
    }
    Some(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

fn disk_store(key: &MultKey, values: &[f64]) {
    let Some(dir) = disk_dir().lock().unwrap().clone() else {
        return;
    };
    if std::fs::create_dir_all(&dir).is_err() {
        return;
    }
    let final_path = dir.join(disk_file_name(key));
    let tmp = dir.join(format!("{}.tmp{}", disk_file_name(key), std::process::id()));
    let mut bytes = Vec::with_capacity(values.len() * 8);
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    if std::fs::write(&tmp, bytes).is_ok() {
        let _ = std::fs::rename(&tmp, &final_path);
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("alpha = {alpha} outside (0, 1]")))
    }
}

/// Build (or fetch) the multiplier for one (grid, alpha, t).
pub fn multiplier(grid: GridSpec, alpha: f64, t: f64) -> Result<Multiplier> {
    check_alpha(alpha)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t must be >= 0, got {t}")));
    }
    let key = MultKey {
        ndim: grid.ndim(),
        points: grid.points_per_dim(),
        half_width_bits: grid.half_width().to_bits(),
        alpha_bits: alpha.to_bits(),
        t_bits: t.to_bits(),
    };
    if let Some(hit) = mem_cache().read().unwrap().get(&key) {
        return Ok(Multiplier { grid, alpha, t, values: hit.clone() });
    }
    let values = if let Some(v) = disk_load(&key, grid.total_points()) {
        v
    } else {
        let v = compute_multiplier(grid, alpha, t)?;
        disk_store(&key, &v);
        v
    };
    let arc = Arc::new(values);
    mem_cache().write().unwrap().entry(key).or_insert_with(|| arc.clone());
    Ok(Multiplier { grid, alpha, t, values: arc })
}

fn compute_multiplier(grid: GridSpec, alpha: f64, t: f64) -> Result<Vec<f64>> {
    let wn = WaveNumbers::of(grid);
    if t == 0.0 {
        return Ok(vec![1.0; grid.total_points()]);
    }
    let ta = t.powf(alpha);
    // the same |xi|^2 repeats across the grid; evaluate each unique value once
    let mut unique: Vec<u64> = wn.xi_squared.iter().map(|x| x.to_bits()).collect();
    unique.sort_unstable();
    unique.dedup();
    let mut table = HashMap::with_capacity(unique.len());
    for bits in unique {
        let xi2 = f64::from_bits(bits);
        let m = if xi2 == 0.0 { 1.0 } else { e_alpha_neg(alpha, xi2 * ta)? };
        table.insert(bits, m);
    }
    Ok(wn.xi_squared.iter().map(|x| table[&x.to_bits()]).collect())
}

/// Solve the homogeneous problem from u0 up to time t.
pub fn evolve_homogeneous(u0: &ScalarField, alpha: f64, t: f64) -> Result<ScalarField> {
    let m = multiplier(u0.grid, alpha, t)?;
    let mut spec = forward_transform(u0);
    m.apply(&mut spec);
    inverse_transform(&spec)
}

/// The Green function at time t > 0, centered at the origin x = 0: the
/// homogeneous evolution of the discrete delta (sample value 1/dx^N at the
/// center node), whose discrete integral stays exactly 1 because m_0 = 1.
pub fn green_function(grid: GridSpec, alpha: f64, t: f64) -> Result<ScalarField> {
    if !(t > 0.0) {
        return Err(Error::domain(
            "green_function needs t > 0 (the t -> 0 limit is the delta distribution)",
        ));
    }
    let m = multiplier(grid, alpha, t)?;
    // spectrum of the centered delta: flat 1/(2L)^N times e^{-i pi k} = (-1)^k
    // per axis (the delta sits at storage index M/2, i.e. x = 0)
    let scale = 1.0 / grid.box_volume();
    let coeffs = m
        .values()
        .iter()
        .enumerate()
        .map(|(flat, &v)| {
            let idx = grid.unravel(flat);
            let ksum: usize = idx[..grid.ndim()].iter().sum();
            let sign = if ksum % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(v * scale * sign, 0.0)
        })
        .collect();
    inverse_transform(&SpectralField { grid, coeffs })
}

/// Deterministic source field f(x, t) sampled on demand.
pub trait SourceSampler: Sync {
    fn sample(&self, grid: &GridSpec, t: f64) -> ScalarField;
}

/// The zero source.
pub struct ZeroSource;

impl SourceSampler for ZeroSource {
    fn sample(&self, grid: &GridSpec, _t: f64) -> ScalarField {
        ScalarField::zeros(*grid)
    }
}

/// Adapter for closures (x_coords, t) -> value, evaluated pointwise.
pub struct PointSource<F: Fn(&[f64], f64) -> f64 + Sync>(pub F);

impl<F: Fn(&[f64], f64) -> f64 + Sync> SourceSampler for PointSource<F> {
    fn sample(&self, grid: &GridSpec, t: f64) -> ScalarField {
        let values = (0..grid.total_points())
            .map(|flat| {
                let idx = grid.unravel(flat);
                let mut x = [0.0f64; 3];
                for a in 0..grid.ndim() {
                    x[a] = grid.axis_coord(idx[a]);
                }
                (self.0)(&x[..grid.ndim()], t)
            })
            .collect();
        ScalarField { grid: *grid, values }
    }
}

/// Duhamel solution at t_end: homogeneous term plus the trapezoidal
/// time-quadrature of m(t_end - tau) f^(tau).
pub fn evolve_duhamel(
    u0: &ScalarField,
    source: &dyn SourceSampler,
    alpha: f64,
    tgrid: &TimeGrid,
) -> Result<ScalarField> {
    let grid = u0.grid;
    let n = tgrid.steps();
    let dt = tgrid.dt();
    let t_end = tgrid.t_end();

    let mut acc = forward_transform(u0);
    multiplier(grid, alpha, t_end)?.apply(&mut acc);

    let mut any_source = false;
    let mut forcing: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); grid.total_points()];
    for j in 0..=n {
        let tau = tgrid.node(j);
        let f = source.sample(&grid, tau);
        if f.max_abs() == 0.0 {
            continue;
        }
        any_source = true;
        let w = if j == 0 || j == n { 0.5 * dt } else { dt };
        let mut fh = forward_transform(&f);
        multiplier(grid, alpha, t_end - tau)?.apply(&mut fh);
        for (slot, c) in forcing.iter_mut().zip(fh.coeffs.iter()) {
            *slot += w * c;
        }
    }
    if any_source {
        for (c, add) in acc.coeffs.iter_mut().zip(forcing.iter()) {
            *c += add;
        }
    }
    inverse_transform(&acc)
}

/// L^p norms of the homogeneous evolution against the data; diagnostic only.
#[derive(Debug, Clone, Copy)]
pub struct StabilityReport {
    pub norm_initial: f64,
    pub norm_evolved: f64,
    pub ratio: f64,
}

pub fn stability_report(u0: &ScalarField, alpha: f64, t: f64, p: Norm) -> Result<StabilityReport> {
    let evolved = evolve_homogeneous(u0, alpha, t)?;
    let norm_initial = field_norm(u0, p);
    let norm_evolved = field_norm(&evolved, p);
    let ratio = if norm_initial == 0.0 { f64::NAN } else { norm_evolved / norm_initial };
    Ok(StabilityReport { norm_initial, norm_evolved, ratio })
}
