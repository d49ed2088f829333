//! Wigner-function dynamics in phase space.
//!
//! The Wigner equation
//!
//! ```text
//! ∂w/∂t + (p/m) ∂w/∂x =
//!     (2πi/h²) ∫∫ [V(x + λ/2) − V(x − λ/2)] exp(2πi (p − p') λ / h) w(x, p') dp' dλ
//! ```
//!
//! conserves `∫∫ w` and `∫∫ w²` but not higher powers of `w`. Two solvers live
//! here:
//!
//! * [`delta_localized_evolve`] handles a state concentrated at `x = a`, where
//!   the equation reduces to a momentum-only integral equation with
//!   `Ω(x) = 2π V(x)/h`. The kernel is built by direct quadrature over `λ`
//!   and `p'` and propagated with a dense matrix exponential.
//! * [`wigner_evolve`] integrates the full equation on a periodic
//!   `(x, p)` grid by symmetric splitting: a half kick (diagonal in the
//!   Fourier variable conjugate to `p`), free transport (diagonal in the
//!   Fourier variable conjugate to `x`), and another half kick.
//!
//! Test suites use `mass = 1` and `h = 1`; nothing here assumes those values.

use std::f64::consts::PI;
use std::io::{BufRead, Write};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::continuum::{signed_mode, DensityGrid, GridParams};
use crate::error::{Error, Result};
use crate::interp::Table;
use crate::io::{fmt15, fmt17, read_table, write_table};

/// Potential energy `V(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Constant {
        value: f64,
    },
    /// `V = slope · x`
    Linear {
        slope: f64,
    },
    /// `V = ½ m ω² x²`
    Harmonic {
        mass: f64,
        omega: f64,
    },
    /// `V = β x⁴`
    Quartic {
        beta: f64,
    },
    /// Linear interpolation, constant past the ends.
    Tabulated {
        table: Table,
    },
}

impl PotentialSpec {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            PotentialSpec::Constant { value } => *value,
            PotentialSpec::Linear { slope } => slope * x,
            PotentialSpec::Harmonic { mass, omega } => 0.5 * mass * omega * omega * x * x,
            PotentialSpec::Quartic { beta } => beta * x.powi(4),
            PotentialSpec::Tabulated { table } => table.eval(x),
        }
    }

    /// `(2π/h) [V(x + λ/2) − V(x − λ/2)]`, the kick rate of Fourier mode `λ`.
    pub fn kick_rate(&self, x: f64, lambda: f64, h: f64) -> f64 {
        2.0 * PI / h * (self.eval(x + lambda / 2.0) - self.eval(x - lambda / 2.0))
    }
}

/// Periodic phase-space grid and physical constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    pub nx: usize,
    pub x0: f64,
    pub dx: f64,
    pub np: usize,
    pub p0: f64,
    pub dp: f64,
    pub h: f64,
    pub mass: f64,
}

impl PhaseSpaceGrid {
    /// Checks that both axes have a power-of-two size of at least 4 and
    /// that all spacings and constants are positive.
    pub fn validated(self) -> Result<Self> {
        for (name, n) in [("nx", self.nx), ("np", self.np)] {
            if n < 4 || !n.is_power_of_two() {
                return Err(Error::InvalidParameter(format!("{name} = {n} must be a power of two >= 4")));
            }
        }
        for (name, v) in [("dx", self.dx), ("dp", self.dp), ("h", self.h), ("mass", self.mass)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        if !self.x0.is_finite() || !self.p0.is_finite() {
            return Err(Error::InvalidParameter("grid origin must be finite".into()));
        }
        Ok(self)
    }

    /// Square grid centred on the origin.
    pub fn centered(n: usize, x_length: f64, p_length: f64, h: f64, mass: f64) -> Result<Self> {
        Self {
            nx: n,
            x0: -x_length / 2.0,
            dx: x_length / n as f64,
            np: n,
            p0: -p_length / 2.0,
            dp: p_length / n as f64,
            h,
            mass,
        }
        .validated()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p0 + j as f64 * self.dp
    }

    pub fn x_length(&self) -> f64 {
        self.nx as f64 * self.dx
    }

    pub fn p_length(&self) -> f64 {
        self.np as f64 * self.dp
    }

    pub fn len(&self) -> usize {
        self.nx * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The momentum axis as a 1D grid with the same `h`.
    pub fn momentum_grid(&self) -> Result<GridParams> {
        GridParams::new(self.np, self.p0, self.dp, self.h)
    }
}

/// Phase-space density sampled on a [`PhaseSpaceGrid`], stored row-major with
/// momentum contiguous: `values[i * np + j] = w(x_i, p_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    grid: PhaseSpaceGrid,
    values: Vec<f64>,
}

impl WignerGrid {
    /// Validated constructor: finite samples with `ΣΣ w dx dp = 1`.
    pub fn new(grid: PhaseSpaceGrid, values: Vec<f64>) -> Result<Self> {
        let w = Self::raw(grid, values)?;
        let sum = w.total();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { sum });
        }
        Ok(w)
    }

    pub fn raw(grid: PhaseSpaceGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(values.len(), grid.len()));
        }
        if let Some((idx, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { idx, value });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: PhaseSpaceGrid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nx {
            for j in 0..grid.np {
                values.push(f(grid.x(i), grid.p(j)));
            }
        }
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.np + j]
    }

    fn cell(&self) -> f64 {
        self.grid.dx * self.grid.dp
    }

    /// `ΣΣ w dx dp`
    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell()
    }

    /// `h ΣΣ w² dx dp`
    pub fn information(&self) -> f64 {
        self.grid.h * self.values.iter().map(|w| w * w).sum::<f64>() * self.cell()
    }

    pub fn is_admissible(&self) -> bool {
        self.information() <= 1.0 + 1e-9
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max |w| ≤ (2/h)(1 + 1e-9)`
    pub fn satisfies_amplitude_bound(&self) -> bool {
        self.max_abs() <= 2.0 / self.grid.h * (1.0 + 1e-9)
    }

    /// `∫ w dp` at every `x_i`.
    pub fn position_marginal(&self) -> Vec<f64> {
        self.values.chunks(self.grid.np).map(|row| row.iter().sum::<f64>() * self.grid.dp).collect()
    }

    /// `sqrt(h ΣΣ (w − v)² dx dp)`, which is 1 for a pure state against zero.
    pub fn l2_distance(&self, other: &WignerGrid) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("phase-space grids differ".into()));
        }
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b) * (a - b)).sum();
        Ok((self.grid.h * s * self.cell()).sqrt())
    }

    /// Flat CSV `x,p,w` at 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let g = self.grid;
        let rows = (0..g.nx).flat_map(move |i| (0..g.np).map(move |j| (i, j)));
        let rows = rows.map(|(i, j)| vec![g.x(i), g.p(j), self.get(i, j)]);
        write_table(w, &["x", "p", "w"], rows, fmt17)
    }

    pub fn read_csv<R: BufRead>(r: R, grid: PhaseSpaceGrid) -> Result<Self> {
        let rows = read_table(r, &["x", "p", "w"])?;
        if rows.len() != grid.len() {
            return Err(Error::DimensionMismatch(rows.len(), grid.len()));
        }
        let tol = 1e-9 * grid.dx.min(grid.dp);
        for (k, row) in rows.iter().enumerate() {
            let (i, j) = (k / grid.np, k % grid.np);
            let scale = 1.0f64.max(grid.x(i).abs()).max(grid.p(j).abs());
            if (row[0] - grid.x(i)).abs() > tol * scale || (row[1] - grid.p(j)).abs() > tol * scale {
                return Err(Error::GridMismatch(format!("row {k} does not match the grid")));
            }
        }
        Self::raw(grid, rows.into_iter().map(|r| r[2]).collect())
    }

    pub fn write_metadata<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, &self.grid)?;
        Ok(())
    }
}

/// `h^(r−1) ΣΣ w^r dx dp`, dimensionless.
pub fn higher_moment(w: &WignerGrid, r: u32) -> Result<f64> {
    if r < 2 {
        return Err(Error::InvalidParameter(format!("moment order {r} must be >= 2")));
    }
    let s: f64 = w.values.iter().map(|v| v.powi(r as i32)).sum();
    Ok(w.grid.h.powi(r as i32 - 1) * s * w.cell())
}

/// Minimum-uncertainty Gaussian centred at `(x_center, p_center)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    pub x_center: f64,
    pub p_center: f64,
    pub sigma_x: f64,
}

impl GaussianState {
    /// Momentum width `σp = h / (4π σx)`.
    pub fn sigma_p(&self, h: f64) -> f64 {
        h / (4.0 * PI * self.sigma_x)
    }

    /// `(2/h) exp(−(x−xc)²/2σx² − (p−pc)²/2σp²)`
    pub fn eval(&self, x: f64, p: f64, h: f64) -> f64 {
        let sp = self.sigma_p(h);
        let u = (x - self.x_center) / self.sigma_x;
        let v = (p - self.p_center) / sp;
        2.0 / h * (-0.5 * (u * u + v * v)).exp()
    }
}

/// Pure Gaussian Wigner function, `I = 1` and `max w = 2/h`.
pub fn gaussian_pure_wigner(grid: PhaseSpaceGrid, state: GaussianState) -> Result<WignerGrid> {
    if !(state.sigma_x > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma_x {}", state.sigma_x)));
    }
    let sp = state.sigma_p(grid.h);
    let edge = |c: f64, lo: f64, len: f64, s: f64| {
        let d = (c - lo).min(lo + len - c);
        if d <= 0.0 {
            f64::INFINITY
        } else {
            (-0.5 * (d / s).powi(2)).exp()
        }
    };
    let tail = edge(state.x_center, grid.x0, grid.x_length(), state.sigma_x).max(edge(
        state.p_center,
        grid.p0,
        grid.p_length(),
        sp,
    ));
    if tail > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "grid too small for the Gaussian: relative amplitude {tail:e} at the boundary"
        )));
    }
    WignerGrid::from_fn(grid, |x, p| state.eval(x, p, grid.h))
}

/// Phase-space point that the harmonic flow carries to `(x, p)` after time `t`.
///
/// Harmonic Wigner dynamics is the classical rotation, so
/// `w(x, p, t) = w0(harmonic_flow_preimage(x, p, …))`.
pub fn harmonic_flow_preimage(x: f64, p: f64, mass: f64, omega: f64, t: f64) -> (f64, f64) {
    let (s, c) = (omega * t).sin_cos();
    let mw = mass * omega;
    (x * c - p / mw * s, p * c + mw * x * s)
}

/// Generator of the delta-localized momentum dynamics at `x = a`.
///
/// The real-space kernel is obtained by quadrature of
/// `m(ζ) = i ∫ m̂(λ) exp(2πiζλ/h) dλ` over the conjugate values
/// `λ_k = k h / L` (`|k| < N/2`), with `m̂(λ) = (2π/h)[V(a+λ/2) − V(a−λ/2)]`,
/// and the `p'` integral uses the rectangle rule on the periodic grid.
#[derive(Clone, Debug)]
pub struct DeltaLocalizedGenerator {
    params: GridParams,
    matrix: DMatrix<f64>,
}

impl DeltaLocalizedGenerator {
    pub fn new(params: GridParams, potential: &PotentialSpec, a: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::InvalidParameter(format!("offset a = {a}")));
        }
        let n = params.n;
        let h = params.h;
        let length = params.length();
        let dlambda = h / length;
        let lambdas: Vec<f64> = (1..n as i64 / 2).map(|k| k as f64 * dlambda).collect();
        let symbol: Vec<f64> = lambdas
            .iter()
            .map(|&l| 2.0 * PI / h * (potential.eval(a + l / 2.0) - potential.eval(a - l / 2.0)))
            .collect();
        if symbol.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter("potential is not finite on the sampled range".into()));
        }
        // m(ζ) for separations ζ = d·dp, d = −N/2 .. N/2 − 1
        let kernel = |d: i64| -> f64 {
            let zeta = d as f64 * params.dz;
            let s: f64 =
                lambdas.iter().zip(&symbol).map(|(&l, &mh)| mh * (2.0 * PI * zeta * l / h).sin()).sum();
            -2.0 * dlambda * s
        };
        let half = n as i64 / 2;
        let table: Vec<f64> = (-half..half).map(kernel).collect();
        let w = params.dz / h;
        let mut matrix = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut d = i as i64 - j as i64;
                if d >= half {
                    d -= n as i64;
                } else if d < -half {
                    d += n as i64;
                }
                matrix[(i, j)] = w * table[(d + half) as usize];
            }
        }
        let matrix = (&matrix - matrix.transpose()) * 0.5;
        Ok(Self { params, matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `exp(t A)`
    pub fn propagator(&self, t: f64) -> DMatrix<f64> {
        (&self.matrix * t).exp()
    }

    pub fn evolve(&self, w0: &DensityGrid, t: f64) -> Result<DensityGrid> {
        if !self.params.compatible(w0.params()) {
            return Err(Error::GridMismatch("momentum grid does not match the generator".into()));
        }
        apply_matrix(&self.propagator(t), w0)
    }
}

/// Applies a dense matrix to a momentum density.
pub fn apply_matrix(u: &DMatrix<f64>, w: &DensityGrid) -> Result<DensityGrid> {
    let v = u * DVector::from_column_slice(w.values());
    DensityGrid::raw(*w.params(), v.iter().copied().collect())
}

/// Evolves a delta-localized momentum density `w̄(p)` at position `a`.
pub fn delta_localized_evolve(
    w0: &DensityGrid,
    potential: &PotentialSpec,
    a: f64,
    t: f64,
) -> Result<DensityGrid> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time {t}")));
    }
    DeltaLocalizedGenerator::new(*w0.params(), potential, a)?.evolve(w0, t)
}

/// Largest phase rotation per unit time on the grid for each substep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseRates {
    pub transport: f64,
    pub kick: f64,
}

impl PhaseRates {
    pub fn max(&self) -> f64 {
        self.transport.max(self.kick)
    }

    /// Step with at most `max_phase` radians per step at the grid extremes.
    pub fn step_for(&self, max_phase: f64) -> f64 {
        max_phase / self.max()
    }
}

/// Phase per step above which [`wigner_evolve`] warns.
pub const PHASE_WARN: f64 = PI;

/// Symmetric split-step integrator for the full Wigner equation.
pub struct SplitStepSolver {
    grid: PhaseSpaceGrid,
    /// kick rate `(2π/h)[V(x_i + λ_k/2) − V(x_i − λ_k/2)]`, row-major in `i`
    kick_rates: Vec<f64>,
    /// transport rate `−2π κ_k p_j / m`, row-major in `j`
    transport_rates: Vec<f64>,
    fft_p: (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>),
    fft_x: (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>),
    buf_p: Vec<Complex64>,
    buf_x: Vec<Complex64>,
}

impl SplitStepSolver {
    pub fn new(grid: PhaseSpaceGrid, potential: &PotentialSpec) -> Result<Self> {
        let (nx, np) = (grid.nx, grid.np);
        let mut kick_rates = vec![0.0; nx * np];
        for i in 0..nx {
            let x = grid.x(i);
            for k in 0..np {
                if let Some(mode) = signed_mode(np, k) {
                    let lam = mode as f64 * grid.h / grid.p_length();
                    kick_rates[i * np + k] = potential.kick_rate(x, lam, grid.h);
                }
            }
        }
        if kick_rates.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidParameter("potential is not finite on the grid".into()));
        }
        let mut transport_rates = vec![0.0; nx * np];
        for j in 0..np {
            let p = grid.p(j);
            for k in 0..nx {
                if let Some(mode) = signed_mode(nx, k) {
                    let kappa = mode as f64 / grid.x_length();
                    transport_rates[j * nx + k] = -2.0 * PI * kappa * p / grid.mass;
                }
            }
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            grid,
            kick_rates,
            transport_rates,
            fft_p: (planner.plan_fft_forward(np), planner.plan_fft_inverse(np)),
            fft_x: (planner.plan_fft_forward(nx), planner.plan_fft_inverse(nx)),
            buf_p: vec![Complex64::default(); np],
            buf_x: vec![Complex64::default(); nx],
        })
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.grid
    }

    pub fn phase_rates(&self) -> PhaseRates {
        let m = |v: &[f64]| v.iter().fold(0.0f64, |a, r| a.max(r.abs()));
        PhaseRates { transport: m(&self.transport_rates), kick: m(&self.kick_rates) }
    }

    /// Potential substep over time `tau`: per `x` column, multiply each
    /// momentum Fourier mode by `exp(i · rate · tau)`.
    pub fn kick(&mut self, values: &mut [f64], tau: f64) {
        let np = self.grid.np;
        let scale = 1.0 / np as f64;
        for (i, row) in values.chunks_mut(np).enumerate() {
            for (b, &v) in self.buf_p.iter_mut().zip(row.iter()) {
                *b = Complex64::new(v, 0.0);
            }
            self.fft_p.0.process(&mut self.buf_p);
            for (b, &r) in self.buf_p.iter_mut().zip(&self.kick_rates[i * np..(i + 1) * np]) {
                *b *= Complex64::from_polar(1.0, r * tau);
            }
            self.fft_p.1.process(&mut self.buf_p);
            for (v, b) in row.iter_mut().zip(&self.buf_p) {
                *v = b.re * scale;
            }
        }
    }

    /// Free-streaming substep over time `tau`: exact shift `x → x − p τ/m`.
    pub fn transport(&mut self, values: &mut [f64], tau: f64) {
        let (nx, np) = (self.grid.nx, self.grid.np);
        let scale = 1.0 / nx as f64;
        for j in 0..np {
            for (i, b) in self.buf_x.iter_mut().enumerate() {
                *b = Complex64::new(values[i * np + j], 0.0);
            }
            self.fft_x.0.process(&mut self.buf_x);
            for (b, &r) in self.buf_x.iter_mut().zip(&self.transport_rates[j * nx..(j + 1) * nx]) {
                *b *= Complex64::from_polar(1.0, r * tau);
            }
            self.fft_x.1.process(&mut self.buf_x);
            for (i, b) in self.buf_x.iter().enumerate() {
                values[i * np + j] = b.re * scale;
            }
        }
    }

    /// `steps` Strang steps of size `dt` (half kick, transport, half kick),
    /// with adjacent half kicks fused.
    pub fn run(&mut self, values: &mut [f64], dt: f64, steps: usize) {
        if steps == 0 {
            return;
        }
        self.kick(values, 0.5 * dt);
        for s in 0..steps {
            self.transport(values, dt);
            let tau = if s + 1 == steps { 0.5 * dt } else { dt };
            self.kick(values, tau);
        }
    }

    pub fn evolve(&mut self, w0: &WignerGrid, dt: f64, steps: usize) -> Result<WignerGrid> {
        if w0.grid != self.grid {
            return Err(Error::GridMismatch("phase-space grids differ".into()));
        }
        let mut values = w0.values.clone();
        self.run(&mut values, dt, steps);
        WignerGrid::raw(self.grid, values)
    }
}

/// Number of steps of size at most `dt` covering `t`, and the step used.
pub fn step_count(t: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("time step dt = {dt} must be positive")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time t = {t} must be nonnegative")));
    }
    let steps = (t / dt - 1e-9).ceil().max(0.0) as usize;
    Ok((steps, if steps == 0 { 0.0 } else { t / steps as f64 }))
}

/// Evolves `w0` to time `t` with split steps of size at most `dt`. Logs a
/// warning when a step rotates some grid phase by more than [`PHASE_WARN`].
pub fn wigner_evolve(w0: &WignerGrid, potential: &PotentialSpec, t: f64, dt: f64) -> Result<WignerGrid> {
    let (steps, step) = step_count(t, dt)?;
    let mut solver = SplitStepSolver::new(w0.grid, potential)?;
    let phase = solver.phase_rates().max() * step;
    if phase > PHASE_WARN {
        log::warn!(
            "time step {step} rotates grid phases by up to {phase:.3} rad per step; \
             extreme modes are under-resolved in time"
        );
    }
    solver.evolve(w0, step, steps)
}

/// One row of a Wigner diagnostic time series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerDiagnostics {
    pub t: f64,
    pub sum: f64,
    pub information: f64,
    pub moment3: f64,
}

impl WignerDiagnostics {
    pub fn of(w: &WignerGrid, t: f64) -> Self {
        Self {
            t,
            sum: w.total(),
            information: w.information(),
            moment3: higher_moment(w, 3).expect("order 3 is valid"),
        }
    }
}

/// CSV `t,sum,I,moment3` at 15 significant digits.
pub fn write_diagnostics_csv<W: Write>(w: W, rows: &[WignerDiagnostics]) -> Result<()> {
    write_table(
        w,
        &["t", "sum", "I", "moment3"],
        rows.iter().map(|d| vec![d.t, d.sum, d.information, d.moment3]),
        fmt15,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid128() -> PhaseSpaceGrid {
        PhaseSpaceGrid::centered(128, 8.0, 8.0, 1.0, 1.0).unwrap()
    }

    fn sigma0() -> f64 {
        (1.0 / (4.0 * PI)).sqrt()
    }

    #[test]
    fn gaussian_is_pure() {
        let g = grid128();
        let w =
            gaussian_pure_wigner(g, GaussianState { x_center: 0.5, p_center: -0.3, sigma_x: 0.4 }).unwrap();
        assert_abs_diff_eq!(w.total(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w.information(), 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(higher_moment(&w, 2).unwrap(), w.information(), epsilon = 1e-15);
        assert!(w.satisfies_amplitude_bound());
        assert!(w.max_abs() <= 2.0 + 1e-9);

        let sx = 0.4;
        for (i, m) in w.position_marginal().iter().enumerate() {
            let x = g.x(i);
            let expect = (-(x - 0.5).powi(2) / (2.0 * sx * sx)).exp() / ((2.0 * PI).sqrt() * sx);
            assert_abs_diff_eq!(*m, expect, epsilon = 1e-10);
        }
    }

    #[test]
    fn gaussian_grid_too_small() {
        let g = PhaseSpaceGrid::centered(32, 2.0, 2.0, 1.0, 1.0).unwrap();
        let err = gaussian_pure_wigner(g, GaussianState { x_center: 0.0, p_center: 0.0, sigma_x: 0.4 });
        assert!(err.is_err());
    }

    #[test]
    fn moment_order_check() {
        let g = grid128();
        let w = gaussian_pure_wigner(g, GaussianState { x_center: 0.0, p_center: 0.0, sigma_x: sigma0() })
            .unwrap();
        assert!(higher_moment(&w, 1).is_err());
        let direct = w.values().iter().map(|v| v.powi(3)).sum::<f64>() * g.dx * g.dp;
        assert_abs_diff_eq!(higher_moment(&w, 3).unwrap(), direct, epsilon = 1e-14);
        // pure Gaussian: h² ∫∫ w³ = 4/3
        assert_abs_diff_eq!(direct, 4.0 / 3.0, epsilon = 1e-6);
    }

    #[test]
    fn free_streaming_is_exact_shift() {
        let g = grid128();
        let state = GaussianState { x_center: -1.0, p_center: 0.8, sigma_x: 0.35 };
        let w0 = gaussian_pure_wigner(g, state).unwrap();
        let t = 1.25;
        let w = wigner_evolve(&w0, &PotentialSpec::Constant { value: 3.0 }, t, 0.05).unwrap();
        let exact = WignerGrid::from_fn(g, |x, p| state.eval(x - p * t / g.mass, p, g.h)).unwrap();
        let err = w.values().iter().zip(exact.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-9, "free streaming error {err}");
    }

    #[test]
    fn linear_kick_is_exact_shift() {
        let g = grid128();
        let state = GaussianState { x_center: 0.0, p_center: -0.5, sigma_x: 0.4 };
        let w0 = gaussian_pure_wigner(g, state).unwrap();
        let mut solver = SplitStepSolver::new(g, &PotentialSpec::Linear { slope: 0.7 }).unwrap();
        let mut v = w0.values().to_vec();
        solver.kick(&mut v, 1.5);
        // force −V' = −0.7 shifts momentum by −0.7·τ
        let exact = WignerGrid::from_fn(g, |x, p| state.eval(x, p + 0.7 * 1.5, g.h)).unwrap();
        let err = v.iter().zip(exact.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-9, "kick error {err}");
    }

    #[test]
    fn substeps_conserve_sum_and_square() {
        let g = grid128();
        let w0 = gaussian_pure_wigner(g, GaussianState { x_center: 1.0, p_center: 0.0, sigma_x: sigma0() })
            .unwrap();
        let mut solver = SplitStepSolver::new(g, &PotentialSpec::Quartic { beta: 1.0 }).unwrap();
        let mut v = w0.values().to_vec();
        let (s0, i0) = (w0.total(), w0.information());
        for _ in 0..20 {
            solver.kick(&mut v, 0.01);
            let w = WignerGrid::raw(g, v.clone()).unwrap();
            assert_abs_diff_eq!(w.total(), s0, epsilon = 1e-13);
            assert_abs_diff_eq!(w.information(), i0, epsilon = 1e-12);
            solver.transport(&mut v, 0.01);
            let w = WignerGrid::raw(g, v.clone()).unwrap();
            assert_abs_diff_eq!(w.total(), s0, epsilon = 1e-13);
            assert_abs_diff_eq!(w.information(), i0, epsilon = 1e-12);
        }
    }

    #[test]
    fn delta_localized_constant_potential_is_identity() {
        let p = GridParams::centered(64, 16.0, 1.0).unwrap();
        let w0 = DensityGrid::gaussian(p, 0.5, 0.7).unwrap();
        let w = delta_localized_evolve(&w0, &PotentialSpec::Constant { value: 2.0 }, 0.3, 4.0).unwrap();
        for (a, b) in w.values().iter().zip(w0.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn delta_localized_linear_is_momentum_shift() {
        let p = GridParams::centered(128, 16.0, 1.0).unwrap();
        let w0 = DensityGrid::gaussian(p, 0.0, 0.5).unwrap();
        let slope = 0.4;
        let t = 2.0;
        let w = delta_localized_evolve(&w0, &PotentialSpec::Linear { slope }, 1.0, t).unwrap();
        let exact = DensityGrid::gaussian(p, -slope * t, 0.5).unwrap();
        let err = w.values().iter().zip(exact.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-9, "shift error {err}");
    }

    #[test]
    fn delta_generator_is_skew() {
        let p = GridParams::centered(64, 16.0, 1.0).unwrap();
        let gen = DeltaLocalizedGenerator::new(p, &PotentialSpec::Quartic { beta: 0.2 }, 0.8).unwrap();
        let a = gen.matrix();
        assert_eq!(a + a.transpose(), DMatrix::zeros(64, 64));
        for i in 0..64 {
            assert!(a.row(i).sum().abs() < 1e-10);
        }
    }

    #[test]
    fn csv_round_trip() {
        let g = PhaseSpaceGrid::centered(32, 8.0, 4.0, 1.0, 1.0).unwrap();
        let w =
            gaussian_pure_wigner(g, GaussianState { x_center: 0.0, p_center: 0.0, sigma_x: 0.5 }).unwrap();
        let mut csv = Vec::new();
        w.write_csv(&mut csv).unwrap();
        let back = WignerGrid::read_csv(csv.as_slice(), g).unwrap();
        assert_eq!(back, w);
        let mut meta = Vec::new();
        w.write_metadata(&mut meta).unwrap();
        let g2: PhaseSpaceGrid = serde_json::from_slice(&meta).unwrap();
        assert_eq!(g2, g);
    }

    #[test]
    fn potential_serde_shape() {
        let v = PotentialSpec::Harmonic { mass: 1.0, omega: 2.0 };
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"family":"harmonic","mass":1.0,"omega":2.0}"#);
        assert_abs_diff_eq!(v.eval(1.5), 0.5 * 4.0 * 2.25);
    }

    #[test]
    fn step_count_rules() {
        assert_eq!(step_count(1.0, 0.25).unwrap(), (4, 0.25));
        assert_eq!(step_count(1.0, 0.3).unwrap().0, 4);
        assert_eq!(step_count(0.0, 0.3).unwrap().0, 0);
        assert!(step_count(1.0, 0.0).is_err());
        assert!(step_count(-1.0, 0.1).is_err());
    }
}
