//! Periodic-box discretization of R^N (N = 1, 2, 3) and its Fourier side.
//!
//! The box is [-L, L) per axis with M (a power of two) points per axis and
//! row-major sample storage. Forward transforms carry the 1/M^N factor, so
//! the k = 0 coefficient is the spatial mean of the field and mass statements
//! read directly off spectral multipliers. Frequencies use the standard
//! wrap-around order (0, 1, ..., M/2, -M/2+1, ..., -1) per axis, with
//! physical wavenumber xi = pi k / L.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::io::{Read, Write};
use std::sync::{Arc, Mutex, OnceLock};

/// Periodic box specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    ndim: usize,
    points_per_dim: usize,
    half_width: f64,
}

impl GridSpec {
    pub fn new(ndim: usize, points_per_dim: usize, half_width: f64) -> Result<Self> {
        if !(1..=3).contains(&ndim) {
            return Err(Error::Grid(format!("ndim must be 1, 2 or 3, got {ndim}")));
        }
        if points_per_dim < 8 || !points_per_dim.is_power_of_two() {
            return Err(Error::Grid(format!(
                "points_per_dim must be a power of two >= 8, got {points_per_dim}"
            )));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Grid(format!("half_width must be positive, got {half_width}")));
        }
        Ok(GridSpec { ndim, points_per_dim, half_width })
    }

    pub fn ndim(&self) -> usize {
        self.ndim
    }
    pub fn points_per_dim(&self) -> usize {
        self.points_per_dim
    }
    pub fn half_width(&self) -> f64 {
        self.half_width
    }
    pub fn total_points(&self) -> usize {
        self.points_per_dim.pow(self.ndim as u32)
    }
    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.points_per_dim as f64
    }
    /// dx^N, the quadrature weight of one sample.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.ndim as i32)
    }
    /// (2L)^N.
    pub fn box_volume(&self) -> f64 {
        (2.0 * self.half_width).powi(self.ndim as i32)
    }
    /// Coordinate of grid index i along one axis.
    pub fn axis_coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.dx()
    }
    /// Decompose a flat row-major index into per-axis indices.
    pub fn unravel(&self, mut flat: usize) -> [usize; 3] {
        let m = self.points_per_dim;
        let mut idx = [0usize; 3];
        for a in (0..self.ndim).rev() {
            idx[a] = flat % m;
            flat /= m;
        }
        idx
    }

    /// Minimum-image distance from the sample at `flat` to a point.
    pub fn min_image_distance(&self, flat: usize, point: &[f64]) -> f64 {
        let idx = self.unravel(flat);
        let period = 2.0 * self.half_width;
        let mut d2 = 0.0;
        for a in 0..self.ndim {
            let c = if a < point.len() { point[a] } else { 0.0 };
            let mut d = (self.axis_coord(idx[a]) - c).abs() % period;
            if d > self.half_width {
                d = period - d;
            }
            d2 += d * d;
        }
        d2.sqrt()
    }
}

/// Real samples of u on the grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.total_points() {
            return Err(Error::Grid(format!(
                "value count {} does not match grid ({})",
                values.len(),
                grid.total_points()
            )));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        ScalarField { grid, values: vec![0.0; grid.total_points()] }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        ScalarField { grid, values: vec![c; grid.total_points()] }
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Complex Fourier coefficients, same row-major layout, wrap-around order.
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub grid: GridSpec,
    pub coeffs: Vec<Complex64>,
}

impl SpectralField {
    /// The k = 0 coefficient (the field mean under this normalization).
    pub fn zero_mode(&self) -> Complex64 {
        self.coeffs[0]
    }
}

/// |xi|^2 per spectral slot, xi = pi k / L componentwise.
#[derive(Debug, Clone)]
pub struct WaveNumbers {
    pub grid: GridSpec,
    pub xi_squared: Vec<f64>,
}

impl WaveNumbers {
    pub fn of(grid: GridSpec) -> Self {
        let m = grid.points_per_dim();
        let base = std::f64::consts::PI / grid.half_width();
        let axis: Vec<f64> = (0..m)
            .map(|k| {
                let ks = if k <= m / 2 { k as isize } else { k as isize - m as isize };
                let xi = base * ks as f64;
                xi * xi
            })
            .collect();
        let mut xi_squared = vec![0.0; grid.total_points()];
        for (flat, slot) in xi_squared.iter_mut().enumerate() {
            let idx = grid.unravel(flat);
            *slot = (0..grid.ndim()).map(|a| axis[idx[a]]).sum();
        }
        WaveNumbers { grid, xi_squared }
    }
}

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    planner().lock().unwrap().plan_fft(len, direction)
}

fn transform_all_axes(data: &mut [Complex64], grid: &GridSpec, direction: FftDirection) {
    let m = grid.points_per_dim();
    let fft = plan(m, direction);
    let mut line = vec![Complex64::new(0.0, 0.0); m];
    for axis in 0..grid.ndim() {
        let stride = m.pow((grid.ndim() - 1 - axis) as u32);
        let block = m * stride;
        let outer = grid.total_points() / block;
        for o in 0..outer {
            for i in 0..stride {
                let base = o * block + i;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + k * stride];
                }
                fft.process(&mut line);
                for (k, slot) in line.iter().enumerate() {
                    data[base + k * stride] = *slot;
                }
            }
        }
    }
}

/// Discrete Fourier coefficients, normalized so the k = 0 slot is the mean.
pub fn forward_transform(field: &ScalarField) -> SpectralField {
    let mut data: Vec<Complex64> =
        field.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_all_axes(&mut data, &field.grid, FftDirection::Forward);
    let scale = 1.0 / field.grid.total_points() as f64;
    for c in &mut data {
        *c *= scale;
    }
    SpectralField { grid: field.grid, coeffs: data }
}

/// Inverse of `forward_transform`; rejects spectra whose inverse is not real.
///
/// The imaginary residue is measured against the field scale (with floor 1)
/// so that roundoff on large-amplitude fields does not trip the guard while
/// genuinely asymmetric spectra still do.
pub fn inverse_transform(spec: &SpectralField) -> Result<ScalarField> {
    let mut data = spec.coeffs.clone();
    transform_all_axes(&mut data, &spec.grid, FftDirection::Inverse);
    let mut residue = 0.0f64;
    let mut scale = 1.0f64;
    let values: Vec<f64> = data
        .iter()
        .map(|c| {
            residue = residue.max(c.im.abs());
            scale = scale.max(c.re.abs());
            c.re
        })
        .collect();
    if residue > 1e-9 * scale {
        return Err(Error::SymmetryViolation { residue });
    }
    Ok(ScalarField { grid: spec.grid, values })
}

/// Periodically wrapped Gaussian a exp(-|x - c|^2 / (2 w^2)).
///
/// Requires w <= L/8 so the tail is below ~1e-14 at the seam and the
/// minimum-image wrap is an adequate periodization.
pub fn gaussian_initial(
    grid: GridSpec,
    amplitude: f64,
    width: f64,
    center: &[f64],
) -> Result<ScalarField> {
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::domain(format!("amplitude must be >= 0, got {amplitude}")));
    }
    if !(width > 0.0) || width > grid.half_width() / 8.0 {
        return Err(Error::domain(format!(
            "width must satisfy 0 < w <= L/8 = {}, got {width}",
            grid.half_width() / 8.0
        )));
    }
    let inv_two_w2 = 1.0 / (2.0 * width * width);
    let values = (0..grid.total_points())
        .map(|flat| {
            let d = grid.min_image_distance(flat, center);
            amplitude * (-d * d * inv_two_w2).exp()
        })
        .collect();
    Ok(ScalarField { grid, values })
}

/// Discrete L^p norms with volume weight dx^N; max-abs for infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    LInf,
}

impl Norm {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Norm::L1),
            "2" => Ok(Norm::L2),
            "inf" | "Inf" | "INF" => Ok(Norm::LInf),
            other => Err(Error::domain(format!("unsupported norm p = {other} (use 1, 2, inf)"))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Norm::L1 => "1",
            Norm::L2 => "2",
            Norm::LInf => "inf",
        }
    }
}

pub fn field_norm(field: &ScalarField, p: Norm) -> f64 {
    let vol = field.grid.cell_volume();
    match p {
        Norm::L1 => field.values.iter().map(|v| v.abs()).sum::<f64>() * vol,
        Norm::L2 => (field.values.iter().map(|v| v * v).sum::<f64>() * vol).sqrt(),
        Norm::LInf => field.max_abs(),
    }
}

const FRDF_MAGIC: &[u8; 4] = b"FRDF";
const FRDF_VERSION: u32 = 1;

/// Write the field in the FRDF binary format (little-endian).
pub fn write_frdf<W: Write>(field: &ScalarField, mut w: W) -> Result<()> {
    w.write_all(FRDF_MAGIC)?;
    w.write_all(&FRDF_VERSION.to_le_bytes())?;
    w.write_all(&(field.grid.ndim() as u32).to_le_bytes())?;
    for _ in 0..field.grid.ndim() {
        w.write_all(&(field.grid.points_per_dim() as u64).to_le_bytes())?;
    }
    w.write_all(&field.grid.half_width().to_le_bytes())?;
    for v in &field.values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Read a field in the FRDF binary format.
pub fn read_frdf<R: Read>(mut r: R) -> Result<ScalarField> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != FRDF_MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}, expected \"FRDF\"")));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let version = u32::from_le_bytes(u32buf);
    if version != FRDF_VERSION {
        return Err(Error::Format(format!("unsupported FRDF version {version}")));
    }
    r.read_exact(&mut u32buf)?;
    let ndim = u32::from_le_bytes(u32buf) as usize;
    let mut dims = [0usize; 3];
    let mut u64buf = [0u8; 8];
    if !(1..=3).contains(&ndim) {
        return Err(Error::Format(format!("FRDF ndim {ndim} out of range")));
    }
    for d in dims.iter_mut().take(ndim) {
        r.read_exact(&mut u64buf)?;
        *d = u64::from_le_bytes(u64buf) as usize;
    }
    if dims[..ndim].iter().any(|&d| d != dims[0]) {
        return Err(Error::Format("FRDF grid must be cubic".into()));
    }
    let mut f64buf = [0u8; 8];
    r.read_exact(&mut f64buf)?;
    let half_width = f64::from_le_bytes(f64buf);
    let grid = GridSpec::new(ndim, dims[0], half_width)?;
    let mut values = Vec::with_capacity(grid.total_points());
    for _ in 0..grid.total_points() {
        r.read_exact(&mut f64buf)?;
        values.push(f64::from_le_bytes(f64buf));
    }
    ScalarField::new(grid, values)
}
