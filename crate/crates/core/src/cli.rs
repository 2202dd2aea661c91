//! Command-line front end.
//!
//! Every command writes one artifact, to `--out` or standard output. CSV
//! artifacts open with `#` comment lines recording the crate version, the
//! resolved run parameters and the tolerances in force; JSON artifacts carry
//! the same information under a leading `"header"` key. Output depends only
//! on the arguments: parallel sweeps are merged in grid order.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::closed_form_concurrence_braided;
use crate::coefficients::{closed_form, general_coefficients, MasterEqCoefficients};
use crate::dfi::{scan_dfi_with, DfiReport, DfiTolerances};
use crate::dynamics::{
    amplitude_trajectory, evolve_lindblad_at, recommended_dt, AmplitudeState, DensityMatrix,
};
use crate::error::Error;
use crate::model::{Topology, WaveguideLayout};
use crate::slh::{slh_coefficients, EXTRACTION_TOLERANCE};
use crate::C64;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

/// Largest concurrence disagreement tolerated when several methods are compared.
pub const COMPARE_TOLERANCE: f64 = 1e-6;

/// Environment variable that overrides `--workers`.
pub const WORKERS_ENV: &str = "GAW_SEED_WORKERS";

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "gaw", version, about = "Giant atoms in a mirror-terminated waveguide")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Master-equation coefficients over a θ range (or for a custom layout).
    Coeffs(RunArgs),
    /// Concurrence trajectory at one θ.
    Evolve(RunArgs),
    /// Concurrence on a θ × t grid.
    Sweep(RunArgs),
    /// Locate decoherence-free interaction points.
    DfiScan(RunArgs),
    /// Cross-check pair-sum, closed-form and SLH coefficients.
    VerifySlh(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lindblad,
    Effective,
    Analytic,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Lindblad => "lindblad",
            Method::Effective => "effective",
            Method::Analytic => "analytic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConfigArg {
    Braided,
    Separate,
    Nested,
}

impl From<ConfigArg> for Topology {
    fn from(c: ConfigArg) -> Self {
        match c {
            ConfigArg::Braided => Topology::Braided,
            ConfigArg::Separate => Topology::Separate,
            ConfigArg::Nested => Topology::Nested,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Canonical two-atom layout.
    #[arg(long, value_enum)]
    pub config: Option<ConfigArg>,
    /// JSON file with a custom layout.
    #[arg(long, conflicts_with = "config")]
    pub layout: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Read every θ argument in units of π.
    #[arg(long)]
    pub theta_over_pi: bool,
    #[arg(long, allow_negative_numbers = true)]
    pub theta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta_max: Option<f64>,
    /// Number of θ intervals; the grid has one more point.
    #[arg(long)]
    pub theta_steps: Option<usize>,
    #[arg(long, default_value_t = 4.0)]
    pub t_max: f64,
    /// Number of t intervals; the grid has one more point.
    #[arg(long, default_value_t = 400)]
    pub t_steps: usize,
    /// RK4 step for the Lindblad path; defaults to the recommended step.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Evolution method(s); several comma-separated methods are compared.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "effective")]
    pub method: Vec<Method>,
    /// Initial amplitudes `re_ceg,im_ceg,re_cge,im_cge` (default |eg⟩).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub initial: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_decay: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub tol_exchange: f64,
}

/// Failure of a CLI run, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid run: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Invalid(e.to_string())
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

/// Where the atoms come from.
#[derive(Debug, Clone)]
pub enum Geometry {
    Canonical(Topology),
    Custom(WaveguideLayout),
}

/// Fully resolved parameters of one run. All angles are in radians.
#[derive(Debug, Clone, Serialize)]
pub struct RunSpec {
    pub command: &'static str,
    pub configuration: String,
    pub gamma: f64,
    pub theta: Option<f64>,
    pub theta_range: Option<(f64, f64, usize)>,
    pub t_max: f64,
    pub t_steps: usize,
    pub dt: Option<f64>,
    pub methods: Vec<Method>,
    pub initial: [f64; 4],
    #[serde(skip)]
    pub workers: usize,
    pub tol_decay: f64,
    pub tol_exchange: f64,
    #[serde(skip)]
    pub geometry: Option<Geometry>,
}

impl RunSpec {
    pub fn resolve(command: &'static str, args: &RunArgs, default_steps: usize) -> Result<Self, CliError> {
        let angle = |x: f64| if args.theta_over_pi { x * PI } else { x };
        let geometry = match (&args.config, &args.layout) {
            (Some(c), None) => Some(Geometry::Canonical((*c).into())),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| invalid(format!("cannot read layout {}: {e}", path.display())))?;
                Some(Geometry::Custom(WaveguideLayout::from_json(&text)?))
            }
            (None, None) => None,
            (Some(_), Some(_)) => return Err(invalid("--config and --layout are exclusive")),
        };
        let configuration = match &geometry {
            Some(Geometry::Canonical(t)) => t.name().to_string(),
            Some(Geometry::Custom(_)) => format!(
                "custom:{}",
                args.layout.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
            ),
            None => return Err(invalid("one of --config or --layout is required")),
        };
        if !(args.gamma.is_finite() && args.gamma > 0.0) {
            return Err(invalid(format!("--gamma must be positive, got {}", args.gamma)));
        }
        let theta_range = {
            let min = angle(args.theta_min.unwrap_or(0.0));
            let max = match args.theta_max {
                Some(m) => angle(m),
                None => 2.0 * PI,
            };
            let steps = args.theta_steps.unwrap_or(default_steps);
            if steps < 2 {
                return Err(invalid("--theta-steps must be at least 2"));
            }
            if !(min.is_finite() && max.is_finite() && max > min) {
                return Err(invalid(format!("empty θ range [{min}, {max}]")));
            }
            (min, max, steps)
        };
        if !(args.t_max.is_finite() && args.t_max > 0.0) {
            return Err(invalid("--t-max must be positive"));
        }
        if args.t_steps < 1 {
            return Err(invalid("--t-steps must be at least 1"));
        }
        if let Some(dt) = args.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(invalid("--dt must be positive"));
            }
        }
        for (name, tol) in [("--tol-decay", args.tol_decay), ("--tol-exchange", args.tol_exchange)] {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(invalid(format!("{name} must be positive")));
            }
        }
        let mut methods = args.method.clone();
        methods.dedup();
        if methods.contains(&Method::Analytic) && !matches!(geometry, Some(Geometry::Canonical(Topology::Braided))) {
            return Err(invalid("--method analytic requires --config braided"));
        }
        let initial = match &args.initial {
            None => [1.0, 0.0, 0.0, 0.0],
            Some(v) => {
                let a: [f64; 4] = v
                    .as_slice()
                    .try_into()
                    .map_err(|_| invalid("--initial takes four numbers"))?;
                let norm: f64 = a.iter().map(|x| x * x).sum();
                if (norm - 1.0).abs() > 1e-9 {
                    return Err(invalid(format!("--initial must be normalised, |ψ|² = {norm}")));
                }
                if a != [1.0, 0.0, 0.0, 0.0] && methods.contains(&Method::Analytic) {
                    return Err(invalid("--method analytic only starts from |eg⟩"));
                }
                a
            }
        };
        let workers = worker_count(args.workers)?;
        Ok(RunSpec {
            command,
            configuration,
            gamma: args.gamma,
            theta: args.theta.map(angle),
            theta_range: Some(theta_range),
            t_max: args.t_max,
            t_steps: args.t_steps,
            dt: args.dt,
            methods,
            initial,
            workers,
            tol_decay: args.tol_decay,
            tol_exchange: args.tol_exchange,
            geometry,
        })
    }

    fn geometry(&self) -> &Geometry {
        self.geometry.as_ref().expect("resolved in from_args")
    }

    fn topology(&self) -> Result<Topology, CliError> {
        match self.geometry() {
            Geometry::Canonical(t) => Ok(*t),
            Geometry::Custom(_) => Err(invalid(format!("{} needs --config", self.command))),
        }
    }

    fn theta(&self) -> Result<f64, CliError> {
        self.theta
            .filter(|t| t.is_finite())
            .ok_or_else(|| invalid(format!("{} needs --theta", self.command)))
    }

    fn theta_grid(&self) -> Vec<f64> {
        let (min, max, steps) = self.theta_range.expect("resolved in from_args");
        (0..=steps).map(|i| min + (max - min) * i as f64 / steps as f64).collect()
    }

    fn time_grid(&self) -> Vec<f64> {
        (0..=self.t_steps)
            .map(|i| self.t_max * i as f64 / self.t_steps as f64)
            .collect()
    }

    fn initial_state(&self) -> AmplitudeState {
        let [a, b, c, d] = self.initial;
        AmplitudeState::new(C64::new(a, b), C64::new(c, d))
    }

    /// Two-atom coefficients at the run's θ, or of the custom layout.
    fn coefficients(&self) -> Result<MasterEqCoefficients, CliError> {
        match self.geometry() {
            Geometry::Canonical(t) => Ok(closed_form(*t, self.gamma, self.theta()?)),
            Geometry::Custom(layout) => Ok(general_coefficients(layout)),
        }
    }

    fn header(&self, extra: &[(&str, String)]) -> String {
        let mut h = String::new();
        let _ = writeln!(h, "# gaw {VERSION}");
        let _ = writeln!(h, "# spec: {}", serde_json::to_string(self).unwrap_or_default());
        let _ = writeln!(
            h,
            "# tolerances: tol_decay={:e} tol_exchange={:e} slh_extraction={:e} compare={:e}",
            self.tol_decay, self.tol_exchange, EXTRACTION_TOLERANCE, COMPARE_TOLERANCE
        );
        for (k, v) in extra {
            let _ = writeln!(h, "# {k}: {v}");
        }
        h
    }
}

fn worker_count(flag: Option<usize>) -> Result<usize, CliError> {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        return v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| invalid(format!("{WORKERS_ENV} must be a positive integer, got '{v}'")));
    }
    match flag {
        Some(0) => Err(invalid("--workers must be positive")),
        Some(n) => Ok(n),
        None => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

/// Result of a command: the artifact text and the exit code to report.
#[derive(Debug)]
pub struct Artifact {
    pub text: String,
    pub exit_code: i32,
    /// Short human-readable summary for standard error.
    pub summary: Option<String>,
}

impl Artifact {
    fn ok(text: String) -> Self {
        Artifact {
            text,
            exit_code: EXIT_OK,
            summary: None,
        }
    }
}

pub fn run_coeffs(spec: &RunSpec) -> Result<Artifact, CliError> {
    let mut out = spec.header(&[]);
    match spec.geometry() {
        Geometry::Canonical(kind) => {
            out.push_str("theta,domega_a,domega_b,g_ab,Gamma_a,Gamma_b,Gamma_coll\n");
            for theta in spec.theta_grid() {
                let c = closed_form(*kind, spec.gamma, theta).as_two_atom_array()?;
                let _ = writeln!(out, "{theta},{},{},{},{},{},{}", c[0], c[1], c[2], c[3], c[4], c[5]);
            }
        }
        Geometry::Custom(layout) => {
            out.push_str("quantity,j,k,value\n");
            write_long_coefficients(&mut out, &general_coefficients(layout));
        }
    }
    Ok(Artifact::ok(out))
}

fn write_long_coefficients(out: &mut String, c: &MasterEqCoefficients) {
    let n = c.n_atoms();
    for j in 0..n {
        let _ = writeln!(out, "domega,{j},{j},{}", c.lamb_shifts[j]);
        let _ = writeln!(out, "Gamma,{j},{j},{}", c.individual_decay[j]);
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let _ = writeln!(out, "g,{j},{k},{}", c.exchange[(j, k)]);
            let _ = writeln!(out, "Gamma_coll,{j},{k},{}", c.collective_decay[(j, k)]);
        }
    }
}

/// Concurrence at each time by one method, plus the method's own state columns.
struct MethodRun {
    concurrence: Vec<f64>,
    columns: Vec<[f64; 4]>,
    fallbacks: usize,
}

fn run_method(
    method: Method,
    spec: &RunSpec,
    coeffs: &MasterEqCoefficients,
    theta: Option<f64>,
    times: &[f64],
) -> Result<MethodRun, CliError> {
    match method {
        Method::Effective => {
            let rec = amplitude_trajectory(&spec.initial_state(), coeffs, times)?;
            Ok(MethodRun {
                columns: rec
                    .states
                    .iter()
                    .map(|s| [s.c_eg.re, s.c_eg.im, s.c_ge.re, s.c_ge.im])
                    .collect(),
                concurrence: rec.concurrence,
                fallbacks: 0,
            })
        }
        Method::Lindblad => {
            if coeffs.n_atoms() != 2 {
                return Err(invalid("concurrence needs exactly two atoms"));
            }
            let rho0 = DensityMatrix::from_amplitudes(&spec.initial_state());
            let dt = spec.dt.unwrap_or_else(|| recommended_dt(coeffs));
            let rec = evolve_lindblad_at(&rho0, coeffs, times, dt)?;
            Ok(MethodRun {
                columns: rec
                    .states
                    .iter()
                    .map(|r| {
                        let p = r.populations();
                        [p[0], p[1], p[2], p[3]]
                    })
                    .collect(),
                concurrence: rec.concurrence,
                fallbacks: 0,
            })
        }
        Method::Analytic => {
            let theta = theta.ok_or_else(|| invalid("analytic method needs θ"))?;
            let mut concurrence = Vec::with_capacity(times.len());
            let mut fallbacks = 0;
            for &t in times {
                let c = closed_form_concurrence_braided(theta, spec.gamma, t)?;
                fallbacks += usize::from(c.fallback);
                concurrence.push(c.value);
            }
            Ok(MethodRun {
                columns: Vec::new(),
                concurrence,
                fallbacks,
            })
        }
    }
}

pub fn run_evolve(spec: &RunSpec) -> Result<Artifact, CliError> {
    let coeffs = spec.coefficients()?;
    if coeffs.n_atoms() != 2 {
        return Err(invalid("evolve needs exactly two atoms"));
    }
    let theta = match spec.geometry() {
        Geometry::Canonical(_) => Some(spec.theta()?),
        Geometry::Custom(_) => None,
    };
    let times = spec.time_grid();
    let runs = spec
        .methods
        .iter()
        .map(|&m| run_method(m, spec, &coeffs, theta, &times))
        .collect::<Result<Vec<_>, _>>()?;

    let fallbacks: usize = runs.iter().map(|r| r.fallbacks).sum();
    let mut extra = vec![("analytic_fallbacks", fallbacks.to_string())];
    let mut exit_code = EXIT_OK;
    let mut summary = None;
    if runs.len() > 1 {
        let max_diff = runs[1..]
            .iter()
            .flat_map(|r| r.concurrence.iter().zip(&runs[0].concurrence).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        extra.push(("max_abs_concurrence_difference", max_diff.to_string()));
        summary = Some(format!("max |ΔC| = {max_diff:e}"));
        if max_diff.is_nan() || max_diff >= COMPARE_TOLERANCE {
            exit_code = EXIT_NUMERICAL;
        }
    }

    let mut out = spec.header(&extra);
    if runs.len() == 1 {
        match spec.methods[0] {
            Method::Effective => out.push_str("t,re_ceg,im_ceg,re_cge,im_cge,concurrence\n"),
            Method::Lindblad => out.push_str("t,p_ee,p_eg,p_ge,p_gg,concurrence\n"),
            Method::Analytic => out.push_str("t,concurrence\n"),
        }
        let run = &runs[0];
        for (i, t) in times.iter().enumerate() {
            let _ = write!(out, "{t}");
            if let Some(cols) = run.columns.get(i) {
                for v in cols {
                    let _ = write!(out, ",{v}");
                }
            }
            let _ = writeln!(out, ",{}", run.concurrence[i]);
        }
    } else {
        out.push('t');
        for m in &spec.methods {
            let _ = write!(out, ",concurrence_{}", m.name());
        }
        out.push('\n');
        for (i, t) in times.iter().enumerate() {
            let _ = write!(out, "{t}");
            for r in &runs {
                let _ = write!(out, ",{}", r.concurrence[i]);
            }
            out.push('\n');
        }
    }
    Ok(Artifact {
        text: out,
        exit_code,
        summary,
    })
}

/// Concurrence on the θ × t grid, rows in θ-major grid order.
pub fn sweep_grid(spec: &RunSpec) -> Result<Vec<(f64, f64, f64)>, CliError> {
    let kind = spec.topology()?;
    let method = spec.methods[0];
    let times = spec.time_grid();
    let thetas = spec.theta_grid();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| CliError::Numerical(format!("worker pool: {e}")))?;
    let columns: Vec<Result<Vec<f64>, CliError>> = pool.install(|| {
        thetas
            .par_iter()
            .map(|&theta| {
                let coeffs = closed_form(kind, spec.gamma, theta);
                run_method(method, spec, &coeffs, Some(theta), &times).map(|r| r.concurrence)
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(thetas.len() * times.len());
    for (theta, column) in thetas.iter().zip(columns) {
        for (t, c) in times.iter().zip(column?) {
            rows.push((*theta, *t, c));
        }
    }
    Ok(rows)
}

pub fn run_sweep(spec: &RunSpec) -> Result<Artifact, CliError> {
    if spec.methods.len() != 1 {
        return Err(invalid("sweep takes a single --method"));
    }
    let rows = sweep_grid(spec)?;
    let mut out = spec.header(&[]);
    out.push_str("theta,t,concurrence\n");
    for (theta, t, c) in rows {
        let _ = writeln!(out, "{theta},{t},{c}");
    }
    Ok(Artifact::ok(out))
}

#[derive(Serialize)]
struct DfiFile<'a> {
    header: DfiHeader<'a>,
    #[serde(flatten)]
    report: &'a DfiReport,
}

#[derive(Serialize)]
struct DfiHeader<'a> {
    tool: String,
    spec: &'a RunSpec,
}

pub fn run_dfi_scan(spec: &RunSpec) -> Result<Artifact, CliError> {
    let kind = spec.topology()?;
    let (min, max, steps) = spec.theta_range.expect("resolved in from_args");
    let tolerances = DfiTolerances {
        decay: spec.tol_decay,
        exchange: spec.tol_exchange,
    };
    let report = scan_dfi_with(kind, spec.gamma, min, max, steps, tolerances)?;
    let file = DfiFile {
        header: DfiHeader {
            tool: format!("gaw {VERSION}"),
            spec,
        },
        report: &report,
    };
    let mut text = serde_json::to_string_pretty(&file).map_err(|e| CliError::Numerical(e.to_string()))?;
    text.push('\n');
    Ok(Artifact {
        text,
        exit_code: EXIT_OK,
        summary: Some(format!("{} DFI point(s)", report.points.len())),
    })
}

pub fn run_verify_slh(spec: &RunSpec) -> Result<Artifact, CliError> {
    let (layout, closed) = match spec.geometry() {
        Geometry::Canonical(kind) => {
            let theta = spec.theta()?;
            let layout = crate::model::build_canonical(crate::model::CanonicalConfig::new(*kind, spec.gamma, theta))?;
            (layout, Some(closed_form(*kind, spec.gamma, theta)))
        }
        Geometry::Custom(layout) => (layout.clone(), None),
    };
    let pair_sum = general_coefficients(&layout);
    let slh = slh_coefficients(&layout)?;
    let mut max_diff = slh.max_abs_diff(&pair_sum);
    if let Some(c) = &closed {
        max_diff = max_diff.max(slh.max_abs_diff(c)).max(pair_sum.max_abs_diff(c));
    }
    let exit_code = if max_diff <= EXTRACTION_TOLERANCE {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    };

    let mut out = spec.header(&[("max_abs_diff", max_diff.to_string())]);
    let rows = |c: &MasterEqCoefficients| {
        let mut s = String::new();
        write_long_coefficients(&mut s, c);
        s.lines().map(str::to_owned).collect::<Vec<_>>()
    };
    let pair_rows = rows(&pair_sum);
    let slh_rows = rows(&slh);
    let closed_rows = closed.as_ref().map(rows);
    out.push_str(if closed.is_some() {
        "quantity,j,k,pair_sum,slh,closed_form\n"
    } else {
        "quantity,j,k,pair_sum,slh\n"
    });
    for (i, (p, s)) in pair_rows.iter().zip(&slh_rows).enumerate() {
        let value = |row: &str| row.rsplit(',').next().unwrap_or_default().to_owned();
        let _ = write!(out, "{},{}", p, value(s));
        if let Some(c) = &closed_rows {
            let _ = write!(out, ",{}", value(&c[i]));
        }
        out.push('\n');
    }
    Ok(Artifact {
        text: out,
        exit_code,
        summary: Some(format!("max componentwise |Δ| = {max_diff:e}")),
    })
}

/// Resolve arguments and run a command without touching the filesystem
/// (except to read a `--layout` file).
pub fn execute(command: &Command) -> Result<(Artifact, Option<PathBuf>), CliError> {
    let (args, artifact) = match command {
        Command::Coeffs(a) => (a, run_coeffs(&RunSpec::resolve("coeffs", a, 1000)?)?),
        Command::Evolve(a) => (a, run_evolve(&RunSpec::resolve("evolve", a, 1000)?)?),
        Command::Sweep(a) => (a, run_sweep(&RunSpec::resolve("sweep", a, 400)?)?),
        Command::DfiScan(a) => (a, run_dfi_scan(&RunSpec::resolve("dfi-scan", a, 10_000)?)?),
        Command::VerifySlh(a) => (a, run_verify_slh(&RunSpec::resolve("verify-slh", a, 1000)?)?),
    };
    Ok((artifact, args.out.clone()))
}

/// Parse `args`, run, write the artifact and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok((artifact, out)) => {
            let written = match &out {
                Some(path) => std::fs::write(path, &artifact.text),
                None => std::io::stdout().lock().write_all(artifact.text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("gaw: cannot write output: {e}");
                return EXIT_INVALID;
            }
            if let Some(s) = artifact.summary {
                eprintln!("gaw: {s}");
            }
            artifact.exit_code
        }
        Err(e) => {
            eprintln!("gaw: {e}");
            e.exit_code()
        }
    }
}
