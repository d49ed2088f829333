//! Probability densities on a periodic line and their entropy-conserving
//! evolution.
//!
//! A density `f(z)` is sampled on `N` equispaced points (`N` a power of two)
//! of a periodic domain of length `L = N·dz`. With scale constant `h` the
//! information is `I = h ∫ f² dz` and the logical entropy `S_L = 1 − I`.
//!
//! The evolution `∂f/∂t = (1/h) ∫ m(z − z') f(z') dz'` with an odd kernel is a
//! convolution. Writing the kernel through its Fourier symbol
//! `m̂(λ) = Ω(a + λ/2) − Ω(a − λ/2)` and taking `λ` conjugate to `z` via
//! `exp(2πi z λ / h)`, every Fourier mode of `f` evolves as
//! `f̂(λ, t) = exp(i m̂(λ) t) f̂(λ, 0)`. On the grid the conjugate values are
//! `λ_k = k h / L` for `k = −N/2 .. N/2 − 1`; the unpaired Nyquist mode gets a
//! zero symbol so the evolved density stays real.

use std::io::{BufRead, Write};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::Table;
use crate::io::{fmt17, read_table, write_table};

/// Tolerance on `Σ f dz = 1`.
pub const NORM_TOL: f64 = 1e-9;

/// Uniform periodic grid. Serializes as the JSON sidecar `{h, dz, z0, N}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    pub h: f64,
    pub dz: f64,
    pub z0: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

impl GridParams {
    pub fn new(n: usize, z0: f64, dz: f64, h: f64) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("grid size {n} must be a power of two >= 4")));
        }
        if !(dz > 0.0) || !dz.is_finite() {
            return Err(Error::InvalidParameter(format!("grid spacing {dz}")));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidParameter(format!("scale constant h = {h}")));
        }
        if !z0.is_finite() {
            return Err(Error::InvalidParameter(format!("grid origin {z0}")));
        }
        Ok(Self { h, dz, z0, n })
    }

    /// Grid of `n` points covering `[−length/2, length/2)`.
    pub fn centered(n: usize, length: f64, h: f64) -> Result<Self> {
        Self::new(n, -length / 2.0, length / n as f64, h)
    }

    pub fn length(&self) -> f64 {
        self.n as f64 * self.dz
    }

    pub fn point(&self, j: usize) -> f64 {
        self.z0 + j as f64 * self.dz
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.point(j))
    }

    /// Signed mode number of FFT slot `k`; `None` for the Nyquist slot.
    pub fn signed_mode(&self, k: usize) -> Option<i64> {
        signed_mode(self.n, k)
    }

    /// Conjugate variable `λ_k = k h / L` for signed mode `k`.
    pub fn lambda(&self, mode: i64) -> f64 {
        mode as f64 * self.h / self.length()
    }

    /// Convolutions only depend on spacing, size and `h`, not on the origin.
    pub fn compatible(&self, other: &GridParams) -> bool {
        self.n == other.n && self.dz == other.dz && self.h == other.h
    }
}

pub(crate) fn signed_mode(n: usize, k: usize) -> Option<i64> {
    use std::cmp::Ordering::*;
    match k.cmp(&(n / 2)) {
        Less => Some(k as i64),
        Equal => None,
        Greater => Some(k as i64 - n as i64),
    }
}

/// Sampled density `f(z_j)` on a periodic grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityGrid {
    params: GridParams,
    values: Vec<f64>,
}

impl DensityGrid {
    /// Validated constructor: finite samples with `Σ f dz = 1`.
    pub fn new(params: GridParams, values: Vec<f64>) -> Result<Self> {
        let g = Self::raw(params, values)?;
        g.check_normalized()?;
        Ok(g)
    }

    /// Checks shape and finiteness only.
    pub fn raw(params: GridParams, values: Vec<f64>) -> Result<Self> {
        if values.len() != params.n {
            return Err(Error::DimensionMismatch(values.len(), params.n));
        }
        if let Some((idx, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { idx, value });
        }
        Ok(Self { params, values })
    }

    pub fn from_fn(params: GridParams, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(params, params.points().map(f).collect())
    }

    /// Normal density with mean `center` and standard deviation `sigma`.
    pub fn gaussian(params: GridParams, center: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma {sigma}")));
        }
        let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * sigma);
        Self::from_fn(params, |z| {
            let u = (z - center) / sigma;
            norm * (-0.5 * u * u).exp()
        })
    }

    /// `f = 1/L` everywhere.
    pub fn uniform(params: GridParams) -> Result<Self> {
        let v = 1.0 / params.length();
        Self::new(params, vec![v; params.n])
    }

    pub fn params(&self) -> &GridParams {
        &self.params
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn total_probability(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.params.dz
    }

    /// `h Σ f² dz`.
    pub fn information(&self) -> f64 {
        self.params.h * self.values.iter().map(|f| f * f).sum::<f64>() * self.params.dz
    }

    pub fn logical_entropy(&self) -> f64 {
        1.0 - self.information()
    }

    pub fn is_admissible(&self) -> bool {
        self.information() <= 1.0 + NORM_TOL
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn check_normalized(&self) -> Result<()> {
        let sum = self.total_probability();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(())
    }

    /// CSV with header `z,f`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let rows = self.params.points().zip(&self.values).map(|(z, &f)| vec![z, f]);
        write_table(w, &["z", "f"], rows, fmt17)
    }

    /// Reads the CSV written by [`DensityGrid::write_csv`] together with its
    /// metadata sidecar.
    pub fn read_csv<R: BufRead>(r: R, params: GridParams) -> Result<Self> {
        let rows = read_table(r, &["z", "f"])?;
        if rows.len() != params.n {
            return Err(Error::DimensionMismatch(rows.len(), params.n));
        }
        for (j, row) in rows.iter().enumerate() {
            let z = params.point(j);
            if (row[0] - z).abs() > 1e-9 * params.dz.max(z.abs()) {
                return Err(Error::GridMismatch(format!(
                    "row {j}: z = {} does not match grid point {z}",
                    row[0]
                )));
            }
        }
        Self::raw(params, rows.into_iter().map(|r| r[1]).collect())
    }

    pub fn write_metadata<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, &self.params)?;
        Ok(())
    }
}

/// `I = h Σ f² dz` of a normalized density.
pub fn continuum_information(f: &DensityGrid) -> Result<f64> {
    f.check_normalized()?;
    Ok(f.information())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeReport {
    pub max_abs: f64,
    /// `√(2I) / h`
    pub bound: f64,
    pub satisfied: bool,
}

impl AmplitudeReport {
    pub fn ratio(&self) -> f64 {
        self.max_abs / self.bound
    }
}

/// Compares `max |f|` with the amplitude bound `√(2I)/h`.
pub fn amplitude_bound_check(f: &DensityGrid) -> AmplitudeReport {
    let max_abs = f.max_abs();
    let bound = (2.0 * f.information()).sqrt() / f.params.h;
    AmplitudeReport { max_abs, bound, satisfied: max_abs <= bound * (1.0 + 1e-9) }
}

/// Pointwise residual of `h f²(z) = ∫ f(z − λ/2) f(z + λ/2) dλ` on the
/// periodic grid, with `λ = 2 j dz` for `−N/4 ≤ j < N/4` so that every pair
/// of grid points is counted once. Vanishes for states that saturate the
/// amplitude bound.
pub fn pure_state_residual(f: &DensityGrid) -> Vec<f64> {
    let n = f.params.n;
    let v = &f.values;
    let q = n / 4;
    (0..n)
        .map(|i| {
            let corr: f64 = (0..2 * q)
                .map(|s| {
                    let j = i + n + s - q;
                    let k = i + n + q - s;
                    v[j % n] * v[k % n]
                })
                .sum();
            f.params.h * v[i] * v[i] - 2.0 * f.params.dz * corr
        })
        .collect()
}

/// Frequency function `Ω` (1/time).
#[derive(Clone)]
pub enum Omega {
    Constant(f64),
    /// `slope·x + intercept`
    Linear {
        slope: f64,
        intercept: f64,
    },
    /// `coeff·x²`
    Harmonic(f64),
    /// `coeff·x⁴`
    Quartic(f64),
    Tabulated(Table),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for Omega {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Omega::Constant(c) => write!(f, "Constant({c})"),
            Omega::Linear { slope, intercept } => write!(f, "Linear({slope}, {intercept})"),
            Omega::Harmonic(c) => write!(f, "Harmonic({c})"),
            Omega::Quartic(c) => write!(f, "Quartic({c})"),
            Omega::Tabulated(t) => write!(f, "Tabulated({} samples)", t.xs().len()),
            Omega::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl Omega {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Omega::Constant(c) => *c,
            Omega::Linear { slope, intercept } => slope * x + intercept,
            Omega::Harmonic(c) => c * x * x,
            Omega::Quartic(c) => c * x * x * x * x,
            Omega::Tabulated(t) => t.eval(x),
            Omega::Custom(f) => f(x),
        }
    }

    /// `Ω(a + λ/2) − Ω(a − λ/2)`
    pub fn symbol(&self, a: f64, lambda: f64) -> f64 {
        self.eval(a + lambda / 2.0) - self.eval(a - lambda / 2.0)
    }
}

/// The odd kernel `m̂(λ_k)` sampled on the conjugate grid of a density grid.
#[derive(Clone, Debug)]
pub struct KernelSpec {
    pub omega: Omega,
    pub a: f64,
    params: GridParams,
    /// `m̂(λ_k)` in FFT order; the multiplier applied to mode `k` is `i·m̂`.
    symbol: Vec<f64>,
}

impl KernelSpec {
    pub fn params(&self) -> &GridParams {
        &self.params
    }

    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    /// Real-space kernel `m(ζ_j)`, `ζ_j = j dz` with `j ≥ N/2` wrapping to
    /// negative separations.
    ///
    /// Evaluates `m(ζ) = i Σ_k m̂(λ_k) exp(2πi ζ λ_k / h) Δλ` as a direct sine
    /// sum. Only `0 < j < N/2` is summed; the other half is filled by
    /// oddness, so `m(ζ_j) + m(−ζ_j) = 0` holds exactly.
    pub fn real_space(&self) -> Vec<f64> {
        let n = self.params.n;
        let dlambda = self.params.h / self.params.length();
        let mut m = vec![0.0; n];
        for j in 1..n / 2 {
            let mut acc = 0.0;
            for k in 1..n / 2 {
                let arg = 2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64;
                acc += self.symbol[k] * arg.sin();
            }
            m[j] = -2.0 * dlambda * acc;
            m[n - j] = -m[j];
        }
        m
    }
}

/// Samples `m̂(λ_k) = Ω(a + λ_k/2) − Ω(a − λ_k/2)` on the grid's conjugate
/// values.
pub fn build_kernel(omega: Omega, a: f64, params: GridParams) -> Result<KernelSpec> {
    if !a.is_finite() {
        return Err(Error::InvalidParameter(format!("offset a = {a}")));
    }
    let symbol = (0..params.n)
        .map(|k| match params.signed_mode(k) {
            None | Some(0) => Ok(0.0),
            Some(mode) => {
                let lam = params.lambda(mode);
                let s = omega.symbol(a, lam);
                if s.is_finite() {
                    Ok(s)
                } else {
                    Err(Error::InvalidParameter(format!("Omega is not finite near a ± {}", lam / 2.0)))
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(KernelSpec { omega, a, params, symbol })
}

/// Normalized spectrum `f̂_k = dz Σ_j f_j exp(−2πi jk/N)` in FFT order, so that
/// `f̂_0` is the total probability.
pub fn spectrum(f: &DensityGrid) -> Vec<Complex64> {
    let n = f.params.n;
    let fft = FftPlanner::new().plan_fft_forward(n);
    let mut buf: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.process(&mut buf);
    buf.iter().map(|c| c * f.params.dz).collect()
}

/// Exact propagator for a fixed time step, diagonal in Fourier space.
pub struct SpectralPropagator {
    params: GridParams,
    phases: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
}

impl SpectralPropagator {
    pub fn new(kernel: &KernelSpec, t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!("time {t}")));
        }
        let n = kernel.params.n;
        let mut planner = FftPlanner::new();
        Ok(Self {
            params: kernel.params,
            phases: kernel.symbol.iter().map(|&s| Complex64::from_polar(1.0, s * t)).collect(),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            buf: vec![Complex64::new(0.0, 0.0); n],
        })
    }

    /// Advances `values` in place by one time step.
    pub fn step(&mut self, values: &mut [f64]) {
        let n = self.params.n;
        for (b, &v) in self.buf.iter_mut().zip(values.iter()) {
            *b = Complex64::new(v, 0.0);
        }
        self.forward.process(&mut self.buf);
        for (b, p) in self.buf.iter_mut().zip(&self.phases) {
            *b *= p;
        }
        self.inverse.process(&mut self.buf);
        let scale = 1.0 / n as f64;
        for (v, b) in values.iter_mut().zip(&self.buf) {
            *v = b.re * scale;
        }
    }

    pub fn apply(&mut self, f: &DensityGrid) -> Result<DensityGrid> {
        if !self.params.compatible(&f.params) {
            return Err(grid_mismatch(&self.params, &f.params));
        }
        let mut values = f.values.clone();
        self.step(&mut values);
        DensityGrid::raw(f.params, values)
    }
}

/// Fixed-size time steps with the state held as Fourier modes.
///
/// After `k` steps mode `j` carries the phase `m̂_j · k·dt`. Real-space
/// samples are reconstructed on demand by one inverse transform, so neither
/// transform round-off nor rounding in the phase factors builds up over many
/// steps.
pub struct SpectralStepper {
    params: GridParams,
    symbol: Vec<f64>,
    modes0: Vec<Complex64>,
    inverse: Arc<dyn Fft<f64>>,
    dt: f64,
    steps: usize,
}

impl SpectralStepper {
    pub fn new(kernel: &KernelSpec, f0: &DensityGrid, dt: f64) -> Result<Self> {
        if !kernel.params.compatible(&f0.params) {
            return Err(grid_mismatch(&kernel.params, &f0.params));
        }
        if !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("time step {dt}")));
        }
        let n = f0.params.n;
        let mut planner = FftPlanner::new();
        let mut modes0: Vec<Complex64> = f0.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        planner.plan_fft_forward(n).process(&mut modes0);
        Ok(Self {
            params: f0.params,
            symbol: kernel.symbol.clone(),
            modes0,
            inverse: planner.plan_fft_inverse(n),
            dt,
            steps: 0,
        })
    }

    pub fn step(&mut self) {
        self.steps += 1;
    }

    pub fn advance(&mut self, steps: usize) {
        self.steps += steps;
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn time(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    fn modes(&self) -> Vec<Complex64> {
        let t = self.time();
        self.modes0.iter().zip(&self.symbol).map(|(m, &s)| m * Complex64::from_polar(1.0, s * t)).collect()
    }

    /// Current Fourier modes scaled by `dz`, as returned by [`spectrum`].
    pub fn spectrum(&self) -> Vec<Complex64> {
        self.modes().iter().map(|c| c * self.params.dz).collect()
    }

    pub fn density(&self) -> Result<DensityGrid> {
        let mut buf = self.modes();
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.params.n as f64;
        DensityGrid::raw(self.params, buf.iter().map(|c| c.re * scale).collect())
    }
}

fn grid_mismatch(a: &GridParams, b: &GridParams) -> Error {
    Error::GridMismatch(format!(
        "kernel grid (N={}, dz={}, h={}) vs density grid (N={}, dz={}, h={})",
        a.n, a.dz, a.h, b.n, b.dz, b.h
    ))
}

/// Evolves `f0` for time `t` by exact phase rotation of every Fourier mode.
pub fn evolve_density(f0: &DensityGrid, kernel: &KernelSpec, t: f64) -> Result<DensityGrid> {
    if t == 0.0 {
        if !kernel.params.compatible(&f0.params) {
            return Err(grid_mismatch(&kernel.params, &f0.params));
        }
        return Ok(f0.clone());
    }
    SpectralPropagator::new(kernel, t)?.apply(f0)
}

/// Evolves `f0` by real-space quadrature of the convolution and implicit
/// midpoint steps of size at most `dt`.
pub fn evolve_density_timestepped(
    f0: &DensityGrid,
    kernel: &KernelSpec,
    t: f64,
    dt: f64,
) -> Result<DensityGrid> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("time step dt = {dt} must be positive")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time t = {t} must be nonnegative")));
    }
    if !kernel.params.compatible(&f0.params) {
        return Err(grid_mismatch(&kernel.params, &f0.params));
    }
    let steps = (t / dt - 1e-9).ceil().max(0.0) as usize;
    if steps == 0 {
        return Ok(f0.clone());
    }
    let step = t / steps as f64;
    let a = convolution_matrix(kernel);
    let n = f0.params.n;
    let id = DMatrix::<f64>::identity(n, n);
    let half = &a * (0.5 * step);
    let cayley = (&id - &half)
        .lu()
        .solve(&(&id + &half))
        .ok_or_else(|| Error::InvalidParameter("singular implicit midpoint system".into()))?;
    let mut v = DVector::from_column_slice(&f0.values);
    for _ in 0..steps {
        v = &cayley * v;
    }
    DensityGrid::raw(f0.params, v.iter().copied().collect())
}

/// `A_ij = (dz/h) m(z_i − z_j)` with periodic wrap-around of `i − j`.
/// Antisymmetric by construction.
pub fn convolution_matrix(kernel: &KernelSpec) -> DMatrix<f64> {
    let p = kernel.params;
    let m = kernel.real_space();
    let n = p.n;
    let w = p.dz / p.h;
    DMatrix::from_fn(n, n, |i, j| w * m[(i + n - j) % n])
}
