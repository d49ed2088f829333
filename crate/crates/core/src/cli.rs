//! Command-line front end.
//!
//! [`run`] executes a parsed [`Cli`] and returns the text to print together
//! with the process exit code: 0 on success, 1 when the state under study is
//! inadmissible, 2 for usage and input errors.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::continuum::{build_kernel, DensityGrid, GridParams, Omega, SpectralStepper};
use crate::dynamics::{self, GeneratorMatrix, DEFAULT_SUBSTEP_NORM};
use crate::error::{Error, Result};
use crate::io::{fmt15, write_table};
use crate::maxent::{self, Branch, Observable, ObservableConstraint};
use crate::prob::{self, SignedProbVector, StateClass};
use crate::wigner::{self, GaussianState, PhaseSpaceGrid, PotentialSpec, WignerDiagnostics};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INADMISSIBLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "quasiprob", version, about = "Logical entropy and signed-probability dynamics")]
pub struct Cli {
    /// Print the report as JSON instead of `key: value` lines.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Logical entropy, information and class of a probability vector.
    Entropy {
        /// Comma separated entries, e.g. `0.5,0.5`, or a JSON array.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "file", required_unless_present = "file")]
        p: Option<String>,
        /// File holding the entries (comma, whitespace or newline separated, or JSON).
        #[arg(long)]
        file: Option<PathBuf>,
        /// Tolerance on the unit sum and on the pure/mixed boundary.
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
    },
    /// Equilibrium state under a mean constraint, or the largest admissible mean.
    Maxent {
        /// Observable values, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Target mean.
        #[arg(
            long,
            allow_hyphen_values = true,
            required_unless_present = "find_max",
            conflicts_with = "find_max"
        )]
        m: Option<f64>,
        /// Report the largest mean with an admissible equilibrium.
        #[arg(long)]
        find_max: bool,
        /// With `--find-max`: require nonnegative probabilities.
        #[arg(long, requires = "find_max")]
        nonnegative: bool,
        /// With `--find-max`: report the smallest mean instead.
        #[arg(long, requires = "find_max")]
        lower: bool,
    },
    /// Radii of the feasibility sphere for `n` outcomes.
    Feasibility {
        #[arg(long)]
        n: usize,
        /// Angular samples of the `n = 3` circle on either side of `r_pos`.
        #[arg(long, default_value_t = 360)]
        sweep: usize,
    },
    /// Worked examples.
    Scenario {
        #[arg(value_enum)]
        name: Scenario,
    },
    /// Time evolution with one of the engines, writing data files.
    Evolve {
        #[arg(value_enum)]
        engine: Engine,
        /// TOML configuration; built-in defaults are used when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory, created if needed.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Data file format.
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// continuum: also evolve the delta-localized momentum equation and
        /// report the largest difference.
        #[arg(long)]
        cross_check: bool,
        /// wigner: compare with the exact rotation of a harmonic potential.
        #[arg(long)]
        oracle: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    Marbles,
    Die,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Fd,
    Continuum,
    Wigner,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Text to print and the exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

/// Maps library errors onto exit codes.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Inadmissible { .. } => EXIT_INADMISSIBLE,
        _ => EXIT_USAGE,
    }
}

/// 15 significant digits, plain notation where that stays short.
pub fn num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..15).contains(&exp) {
        return fmt15(x);
    }
    let s = format!("{:.*}", (14 - exp).max(0) as usize, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|&x| num(x)).collect();
    format!("[{}]", items.join(", "))
}

/// Ordered report rendered as text or JSON.
#[derive(Default)]
struct Report {
    rows: Vec<(String, serde_json::Value, String)>,
}

impl Report {
    fn num(&mut self, key: &str, x: f64) -> &mut Self {
        self.rows.push((key.into(), json!(x), num(x)));
        self
    }

    fn vec(&mut self, key: &str, v: &[f64]) -> &mut Self {
        self.rows.push((key.into(), json!(v), list(v)));
        self
    }

    fn text(&mut self, key: &str, s: impl ToString) -> &mut Self {
        let s = s.to_string();
        self.rows.push((key.into(), json!(s), s));
        self
    }

    fn flag(&mut self, key: &str, b: bool) -> &mut Self {
        self.rows.push((key.into(), json!(b), b.to_string()));
        self
    }

    fn render(&self, as_json: bool) -> String {
        if as_json {
            let map: serde_json::Map<String, serde_json::Value> =
                self.rows.iter().map(|(k, v, _)| (k.clone(), v.clone())).collect();
            serde_json::to_string_pretty(&map).expect("report serializes")
        } else {
            self.rows.iter().map(|(k, _, t)| format!("{k}: {t}\n")).collect()
        }
    }
}

/// Runs a command. Errors become an outcome with a message and exit code.
pub fn run(cli: &Cli) -> Outcome {
    let mut code = EXIT_OK;
    match dispatch(cli, &mut code) {
        Ok(r) => Outcome { text: r.render(cli.json), code },
        Err(e) => Outcome { text: format!("error: {e}\n"), code: exit_code(&e) },
    }
}

fn dispatch(cli: &Cli, code: &mut i32) -> Result<Report> {
    match &cli.command {
        Command::Entropy { p, file, tol } => cmd_entropy(p.as_deref(), file.as_deref(), *tol, code),
        Command::Maxent { x, m, find_max, nonnegative, lower } => {
            cmd_maxent(x, *m, *find_max, *nonnegative, *lower, code)
        }
        Command::Feasibility { n, sweep } => cmd_feasibility(*n, *sweep),
        Command::Scenario { name } => match name {
            Scenario::Marbles => scenario_marbles(),
            Scenario::Die => scenario_die(),
        },
        Command::Evolve { engine, config, out, format, cross_check, oracle } => {
            let cfg = match config {
                Some(path) => EvolveConfig::from_toml(&fs::read_to_string(path)?)?,
                None => EvolveConfig::default(),
            };
            fs::create_dir_all(out)?;
            match engine {
                Engine::Fd => evolve_fd(&cfg.fd.unwrap_or_default(), out, *format),
                Engine::Continuum => {
                    evolve_continuum(&cfg.continuum.unwrap_or_default(), out, *format, *cross_check)
                }
                Engine::Wigner => evolve_wigner(&cfg.wigner.unwrap_or_default(), out, *format, *oracle),
            }
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if s.starts_with('[') {
        return Ok(serde_json::from_str(s)?);
    }
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
        .collect()
}

fn cmd_entropy(p: Option<&str>, file: Option<&Path>, tol: f64, code: &mut i32) -> Result<Report> {
    let raw = match (p, file) {
        (Some(s), _) => s.to_string(),
        (None, Some(path)) => fs::read_to_string(path)?,
        (None, None) => return Err(Error::Parse("give --p or --file".into())),
    };
    let p = SignedProbVector::with_tolerance(parse_list(&raw)?, tol)?;
    let class = prob::classify(&p, tol);
    if class == StateClass::Inadmissible {
        *code = EXIT_INADMISSIBLE;
    }
    let radii = prob::feasibility_radii(p.len())?;
    let mut r = Report::default();
    r.vec("p", p.entries())
        .num("n", p.len() as f64)
        .num("sum", p.sum())
        .num("S_L", p.logical_entropy())
        .num("I", p.information())
        .num("R", p.radius())
        .text("class", class)
        .num("r_max", radii.r_max)
        .num("r_pos", radii.r_pos)
        .num("r_min", radii.r_min)
        .flag("negatives_possible", radii.negatives_possible);
    Ok(r)
}

fn cmd_maxent(
    x: &str,
    m: Option<f64>,
    find_max: bool,
    nonnegative: bool,
    lower: bool,
    code: &mut i32,
) -> Result<Report> {
    let values = parse_list(x)?;
    let mut r = Report::default();
    if find_max {
        let obs = Observable::new(values)?;
        let branch = if lower { Branch::Lower } else { Branch::Upper };
        let m = if nonnegative {
            maxent::max_mean_nonnegative(&obs, branch)?
        } else {
            maxent::max_mean(&obs, branch)?
        };
        let sol = maxent::equilibrium(&ObservableConstraint { observable: obs, mean: m })?;
        r.num("m_max", m).vec("p", sol.p.entries()).num("I", sol.information);
        return Ok(r);
    }
    let m = m.ok_or_else(|| Error::Parse("give --m or --find-max".into()))?;
    let sol = maxent::equilibrium(&ObservableConstraint::new(values, m)?)?;
    if !sol.admissible {
        *code = EXIT_INADMISSIBLE;
    }
    r.num("m", m)
        .vec("p", sol.p.entries())
        .num("lambda", sol.lambda)
        .num("mu", sol.mu)
        .num("I", sol.information)
        .num("S_L", 1.0 - sol.information)
        .flag("admissible", sol.admissible);
    Ok(r)
}

fn cmd_feasibility(n: usize, sweep: usize) -> Result<Report> {
    let radii = prob::feasibility_radii(n)?;
    let mut r = Report::default();
    r.num("n", n as f64)
        .num("r_max", radii.r_max)
        .num("r_pos", radii.r_pos)
        .num("r_min", radii.r_min)
        .flag("negatives_possible", radii.negatives_possible);
    if n == 3 && sweep > 0 {
        for (key, radius) in [("below", radii.r_pos - 0.01), ("above", radii.r_pos + 0.01)] {
            let mut lowest = f64::INFINITY;
            for k in 0..sweep {
                let theta = 2.0 * PI * k as f64 / sweep as f64;
                lowest = lowest.min(prob::solve_n3(radius, theta)?.min_entry());
            }
            r.num(&format!("min_entry_{key}_r_pos"), lowest);
        }
    }
    Ok(r)
}

fn scenario_marbles() -> Result<Report> {
    let p = SignedProbVector::new(vec![2.0 / 3.0, 2.0 / 3.0, -1.0 / 3.0])?;
    let q = SignedProbVector::new(vec![-1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0])?;
    let rr_q = prob::pair_outcome_probability(&q, 0, 0)?;
    let not_red_p = prob::pair_outcome_probability(&p, 1, 1)? + prob::pair_outcome_probability(&p, 2, 2)?;
    let mut r = Report::default();
    r.text("colors", "R, B, G")
        .vec("p", p.entries())
        .vec("q", q.entries())
        .num("I_p", p.information())
        .num("I_q", q.information())
        .num("p_dot_q", prob::scalar_product(&p, &q)?)
        .num("Prob_q(RR)", rr_q)
        .num("Prob_p(notR notR)", not_red_p)
        .text("Prob_q(RR) exact", "1/9")
        .text("Prob_p(notR notR) exact", "5/9")
        .flag("consistent", (rr_q - not_red_p).abs() < 1e-12);
    Ok(r)
}

fn scenario_die() -> Result<Report> {
    let obs = Observable::new(vec![-1.0, 0.0, 1.0])?;
    let m_c = maxent::max_mean_nonnegative(&obs, Branch::Upper)?;
    let classical = maxent::equilibrium(&ObservableConstraint { observable: obs.clone(), mean: m_c })?;
    let m_s = maxent::max_mean(&obs, Branch::Upper)?;
    let signed = maxent::equilibrium(&ObservableConstraint { observable: obs, mean: m_s })?;
    let mut r = Report::default();
    r.vec("faces", &[-1.0, 0.0, 1.0])
        .num("classical_m_max", m_c)
        .vec("classical_p", classical.p.entries())
        .num("classical_I", classical.information)
        .num("signed_m_max", m_s)
        .vec("signed_p", signed.p.entries())
        .num("signed_I", signed.information);
    Ok(r)
}

/// Engine settings read from TOML. Every section is optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub fd: Option<FdConfig>,
    pub continuum: Option<ContinuumConfig>,
    pub wigner: Option<WignerConfig>,
}

impl EvolveConfig {
    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(format!("config: {e}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Rotation about `(1,1,1)/√3`, `n = 3`.
    #[default]
    Rotation3,
    /// Seeded random zero-sum generator.
    Random,
}

/// `[fd]`: finite-dimensional evolution. Times are in the units of `1/rate`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FdConfig {
    pub generator: GeneratorKind,
    /// outcomes, random generator only
    pub n: usize,
    pub seed: u64,
    /// overrides the generator rate [1/time]
    pub rate: Option<f64>,
    /// initial state, defaults to the first basis vector
    pub p0: Option<Vec<f64>>,
    /// final time [time]
    pub t_end: f64,
    /// sample spacing [time]
    pub dt: f64,
    /// largest `‖M‖₁ · rate · h` of one implicit midpoint substep [dimensionless]
    pub substep_norm: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            generator: GeneratorKind::Rotation3,
            n: 3,
            seed: 0,
            rate: None,
            p0: None,
            t_end: 10.0,
            dt: 0.1,
            substep_norm: DEFAULT_SUBSTEP_NORM,
        }
    }
}

/// Gaussian initial density on a 1D grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianInit {
    /// [momentum]
    pub center: f64,
    /// [momentum]
    pub sigma: f64,
}

/// `[continuum]`: spectral evolution of a momentum density with
/// `Ω(x) = 2π V(x)/h` at offset `a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContinuumConfig {
    /// grid points, a power of two
    pub n: usize,
    /// periodic domain length [momentum]
    pub length: f64,
    /// Planck constant [action]
    pub h: f64,
    /// localization point [position]
    pub a: f64,
    /// final time [time]
    pub t_end: f64,
    /// diagnostic sample spacing [time]
    pub dt: f64,
    /// [energy]
    pub potential: PotentialSpec,
    pub initial: GaussianInit,
}

impl Default for ContinuumConfig {
    fn default() -> Self {
        Self {
            n: 256,
            length: 16.0,
            h: 1.0,
            a: 0.5,
            t_end: 3.0,
            dt: 0.1,
            potential: PotentialSpec::Harmonic { mass: 1.0, omega: 1.0 },
            initial: GaussianInit { center: 0.0, sigma: 0.5 },
        }
    }
}

/// Gaussian pure state in phase space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerInit {
    /// [position]
    pub x_center: f64,
    /// [momentum]
    pub p_center: f64,
    /// [position]
    pub sigma_x: f64,
}

/// `[wigner]`: split-step evolution on a square phase-space grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WignerConfig {
    /// points per axis, a power of two
    pub n: usize,
    /// [position]
    pub x_length: f64,
    /// [momentum]
    pub p_length: f64,
    /// [action]
    pub h: f64,
    /// [mass]
    pub mass: f64,
    /// final time [time]
    pub t_end: f64,
    /// time step [time]; chosen from the grid phase rates when absent
    pub dt: Option<f64>,
    /// largest phase per step when `dt` is absent [rad]
    pub max_phase: f64,
    /// steps between diagnostic rows
    pub every: usize,
    /// [energy]
    pub potential: PotentialSpec,
    pub initial: WignerInit,
}

impl Default for WignerConfig {
    fn default() -> Self {
        Self {
            n: 128,
            x_length: 16.0,
            p_length: 16.0,
            h: 1.0,
            mass: 1.0,
            t_end: PI / 2.0,
            dt: None,
            max_phase: 0.1,
            every: 10,
            potential: PotentialSpec::Harmonic { mass: 1.0, omega: 1.0 },
            initial: WignerInit { x_center: 2.0, p_center: 0.0, sigma_x: (1.0 / (4.0 * PI)).sqrt() },
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    Ok(())
}

fn evolve_fd(cfg: &FdConfig, out: &Path, format: Format) -> Result<Report> {
    let mut g: GeneratorMatrix = match cfg.generator {
        GeneratorKind::Rotation3 => dynamics::rotation_generator3(),
        GeneratorKind::Random => dynamics::random_generator(cfg.n, cfg.seed)?,
    };
    if let Some(rate) = cfg.rate {
        g = g.with_rate(rate);
    }
    let p0 = match &cfg.p0 {
        Some(v) => SignedProbVector::new(v.clone())?,
        None => SignedProbVector::basis(g.n(), 0)?,
    };
    if !p0.is_admissible() {
        return Err(Error::Inadmissible { information: p0.information() });
    }
    if !(cfg.substep_norm > 0.0) {
        return Err(Error::InvalidParameter(format!("fd.substep_norm = {}", cfg.substep_norm)));
    }
    let rec = dynamics::trajectory_with(&p0, &g, cfg.t_end, cfg.dt, cfg.substep_norm)?;
    let path = match format {
        Format::Csv => {
            let path = out.join("trajectory.csv");
            rec.write_csv(BufWriter::new(File::create(&path)?))?;
            path
        }
        Format::Json => {
            let path = out.join("trajectory.json");
            write_json(&path, &rec)?;
            path
        }
    };
    let last = rec.states.last().expect("trajectory has at least one sample");
    let mut r = Report::default();
    r.text("engine", "fd")
        .num("n", g.n() as f64)
        .num("samples", rec.times.len() as f64)
        .num("t_end", *rec.times.last().unwrap_or(&0.0))
        .vec("p_final", last.entries())
        .num("sum_drift_max", rec.max_probability_drift())
        .num("info_drift_max", rec.max_information_drift())
        .text("output", path.display());
    Ok(r)
}

fn omega_from_potential(v: &PotentialSpec, h: f64) -> Omega {
    let v = v.clone();
    Omega::Custom(Arc::new(move |x| 2.0 * PI / h * v.eval(x)))
}

fn evolve_continuum(cfg: &ContinuumConfig, out: &Path, format: Format, cross_check: bool) -> Result<Report> {
    let params = GridParams::centered(cfg.n, cfg.length, cfg.h)?;
    let f0 = DensityGrid::gaussian(params, cfg.initial.center, cfg.initial.sigma)?;
    if !f0.is_admissible() {
        return Err(Error::Inadmissible { information: f0.information() });
    }
    let kernel = build_kernel(omega_from_potential(&cfg.potential, cfg.h), cfg.a, params)?;
    let (steps, dt) = wigner::step_count(cfg.t_end, cfg.dt)?;
    let mut stepper = SpectralStepper::new(&kernel, &f0, dt)?;
    let (s0, i0) = (f0.total_probability(), f0.information());
    let mut rows = vec![vec![0.0, s0, i0]];
    let (mut sum_drift, mut info_drift) = (0.0f64, 0.0f64);
    for _ in 0..steps {
        stepper.step();
        let f = stepper.density()?;
        let (s, i) = (f.total_probability(), f.information());
        sum_drift = sum_drift.max((s - s0).abs());
        info_drift = info_drift.max((i - i0).abs());
        rows.push(vec![stepper.time(), s, i]);
    }
    let f = stepper.density()?;
    let mut r = Report::default();
    r.text("engine", "continuum")
        .num("N", cfg.n as f64)
        .num("steps", steps as f64)
        .num("t_end", steps as f64 * dt)
        .num("sum_drift_max", sum_drift)
        .num("info_drift_max", info_drift)
        .num("I", f.information());
    if cross_check {
        let delta = wigner::delta_localized_evolve(&f0, &cfg.potential, cfg.a, steps as f64 * dt)?;
        let diff = delta.values().iter().zip(f.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        r.num("cross_check_linf", diff);
    }
    match format {
        Format::Csv => {
            f.write_csv(BufWriter::new(File::create(out.join("density.csv"))?))?;
            f.write_metadata(BufWriter::new(File::create(out.join("density.json"))?))?;
            write_table(
                BufWriter::new(File::create(out.join("diagnostics.csv"))?),
                &["t", "sum", "I"],
                rows,
                fmt15,
            )?;
        }
        Format::Json => {
            let diag: Vec<BTreeMap<&str, f64>> =
                rows.iter().map(|r| BTreeMap::from([("t", r[0]), ("sum", r[1]), ("I", r[2])])).collect();
            write_json(
                &out.join("continuum.json"),
                &json!({ "grid": params, "values": f.values(), "diagnostics": diag }),
            )?;
        }
    }
    r.text("output", out.display());
    Ok(r)
}

fn evolve_wigner(cfg: &WignerConfig, out: &Path, format: Format, oracle: bool) -> Result<Report> {
    let grid = PhaseSpaceGrid::centered(cfg.n, cfg.x_length, cfg.p_length, cfg.h, cfg.mass)?;
    let init = GaussianState {
        x_center: cfg.initial.x_center,
        p_center: cfg.initial.p_center,
        sigma_x: cfg.initial.sigma_x,
    };
    let w0 = wigner::gaussian_pure_wigner(grid, init)?;
    let mut solver = wigner::SplitStepSolver::new(grid, &cfg.potential)?;
    let rates = solver.phase_rates();
    let dt = match cfg.dt {
        Some(dt) => dt,
        None => {
            if !(cfg.max_phase > 0.0) {
                return Err(Error::InvalidParameter(format!("wigner.max_phase = {}", cfg.max_phase)));
            }
            rates.step_for(cfg.max_phase)
        }
    };
    let (steps, dt) = wigner::step_count(cfg.t_end, dt)?;
    let phase = rates.max() * dt;
    let every = cfg.every.max(1);
    let mut values = w0.values().to_vec();
    let mut diag = vec![WignerDiagnostics::of(&w0, 0.0)];
    let mut done = 0;
    while done < steps {
        let chunk = every.min(steps - done);
        solver.run(&mut values, dt, chunk);
        done += chunk;
        diag.push(WignerDiagnostics::of(&wigner::WignerGrid::raw(grid, values.clone())?, done as f64 * dt));
    }
    let w = wigner::WignerGrid::raw(grid, values)?;
    let d0 = diag[0];
    let sum_drift = diag.iter().fold(0.0f64, |m, d| m.max((d.sum - d0.sum).abs()));
    let info_drift = diag.iter().fold(0.0f64, |m, d| m.max((d.information - d0.information).abs()));
    let last = diag.last().expect("diagnostics start at t = 0");
    let mut r = Report::default();
    r.text("engine", "wigner")
        .num("grid", cfg.n as f64)
        .num("steps", steps as f64)
        .num("dt", dt)
        .num("max_phase_per_step", phase);
    if phase > wigner::PHASE_WARN {
        r.text("warning", format!("time step turns some grid modes by {} rad, above π", num(phase)));
    }
    r.num("t_end", steps as f64 * dt)
        .num("sum_drift_max", sum_drift)
        .num("info_drift_max", info_drift)
        .num("moment3_relative_change", (last.moment3 - d0.moment3) / d0.moment3);
    if oracle {
        let PotentialSpec::Harmonic { mass, omega } = cfg.potential else {
            return Err(Error::InvalidParameter("--oracle needs a harmonic potential".into()));
        };
        if (mass - cfg.mass).abs() > 1e-12 * cfg.mass {
            return Err(Error::InvalidParameter("--oracle needs potential.mass equal to wigner.mass".into()));
        }
        let t = steps as f64 * dt;
        let exact = wigner::WignerGrid::raw(grid, {
            let mut v = Vec::with_capacity(grid.len());
            for i in 0..grid.nx {
                for j in 0..grid.np {
                    let (x, p) = wigner::harmonic_flow_preimage(grid.x(i), grid.p(j), mass, omega, t);
                    v.push(init.eval(x, p, grid.h));
                }
            }
            v
        })?;
        r.num("oracle_l2_error", w.l2_distance(&exact)?);
    }
    match format {
        Format::Csv => {
            w.write_csv(BufWriter::new(File::create(out.join("wigner.csv"))?))?;
            w.write_metadata(BufWriter::new(File::create(out.join("wigner.json"))?))?;
            wigner::write_diagnostics_csv(BufWriter::new(File::create(out.join("diagnostics.csv"))?), &diag)?;
        }
        Format::Json => {
            write_json(
                &out.join("wigner.json"),
                &json!({ "grid": grid, "values": w.values(), "diagnostics": diag }),
            )?;
        }
    }
    r.text("output", out.display());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> Outcome {
        let mut full = vec!["quasiprob"];
        full.extend_from_slice(args);
        run(&Cli::try_parse_from(full).unwrap())
    }

    #[test]
    fn number_format() {
        assert_eq!(num(2.0 / 3f64.sqrt()), "1.15470053837925");
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(-1.0 / 3.0), "-0.333333333333333");
        assert_eq!(num(1e-20), "1.00000000000000e-20");
        assert_eq!(num(0.0), "0");
    }

    #[test]
    fn entropy_examples() {
        let o = go(&["entropy", "--p", "0.666667,0.666667,-0.333333"]);
        assert_eq!(o.code, 0);
        assert!(o.text.contains("class: Pure"), "{}", o.text);
        let o = go(&["entropy", "--p", "0.5,0.5"]);
        assert!(o.text.contains("S_L: 0.5\n") && o.text.contains("class: Mixed"));
        let o = go(&["entropy", "--p", "1,1,-1"]);
        assert_eq!(o.code, EXIT_INADMISSIBLE);
        assert!(o.text.contains("Inadmissible"));
        assert_eq!(go(&["entropy", "--p", "0.5,abc"]).code, EXIT_USAGE);
        assert_eq!(go(&["entropy", "--p", "0.5,0.6"]).code, EXIT_USAGE);
    }

    #[test]
    fn maxent_examples() {
        let o = go(&["maxent", "--x", "-1,0,1", "--find-max"]);
        assert!(o.text.starts_with("m_max: 1.15470053837925\n"), "{}", o.text);
        let o = go(&["maxent", "--x", "-1,0,1", "--find-max", "--nonnegative"]);
        assert!(o.text.starts_with("m_max: 0.666666666666667\n"), "{}", o.text);
        let o = go(&["maxent", "--x", "-1,0,1", "--m", "0"]);
        assert!(
            o.text.contains("p: [0.333333333333333, 0.333333333333333, 0.333333333333333]"),
            "{}",
            o.text
        );
        assert_eq!(go(&["maxent", "--x", "-1,0,1", "--m", "2"]).code, EXIT_INADMISSIBLE);
        assert_eq!(go(&["maxent", "--x", "1,1,1", "--m", "1"]).code, EXIT_USAGE);
    }

    #[test]
    fn scenarios_and_json() {
        let o = go(&["scenario", "marbles"]);
        assert!(o.text.contains("consistent: false"));
        let o = go(&["--json", "scenario", "die"]);
        let v: serde_json::Value = serde_json::from_str(&o.text).unwrap();
        assert!((v["classical_I"].as_f64().unwrap() - 5.0 / 9.0).abs() < 1e-15);
        assert!((v["signed_I"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert!(Cli::try_parse_from(["quasiprob", "scenario", "coins"]).is_err());
    }

    #[test]
    fn feasibility_report() {
        let o = go(&["feasibility", "--n", "3"]);
        assert!(o.text.contains("r_pos: 0.707106781186547\n"), "{}", o.text);
        assert!(o.text.contains("r_min: 0.577350269189626\n"));
        assert_eq!(go(&["feasibility", "--n", "1"]).code, EXIT_USAGE);
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(EvolveConfig::from_toml("[fd]\nt_end = 1.0\nbogus = 2\n").is_err());
        assert!(EvolveConfig::from_toml("[nope]\n").is_err());
        assert!(EvolveConfig::from_toml("[wigner.potential]\nfamily = \"quartic\"\nbeta = 1.0\nextra = 1\n")
            .is_err());
        let c = EvolveConfig::from_toml(
            "[continuum]\nn = 64\n[continuum.potential]\nfamily = \"quartic\"\nbeta = 0.5\n",
        )
        .unwrap();
        let cc = c.continuum.unwrap();
        assert_eq!(cc.n, 64);
        assert_eq!(cc.potential, PotentialSpec::Quartic { beta: 0.5 });
        assert_eq!(cc.length, ContinuumConfig::default().length);
    }
}
