//! The `holocond` command line: radial profiles, convergence tables,
//! finite-difference checks and Monte Carlo experiments as CSV or JSON.
//!
//! Exit codes: 0 success, 1 a tolerance or statistical check failed,
//! 2 invalid arguments, 3 unwritable output.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::kacrice::{
    k_infinity, k_infinity_normal_frame, kn_density_wrt_omega, kn_normal_frame_density_wrt_omega, rescaled_kn,
    rescaled_kn_normal_frame,
};
use crate::kernel::KernelModel;
use crate::lelong::{self, ddbar_log_numeric, potentials, RadialDensity, RadialKind};
use crate::montecarlo::{
    annulus_experiment, Conditioning, CriticalSearchConfig, ExperimentConfig, Reference, ZeroCounting,
};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_BAD_ARGS: i32 = 2;
pub const EXIT_UNWRITABLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "holocond",
    version,
    about = "Conditional zero and critical point densities of random SU(2) polynomials"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Tabulate a radial density on a uniform grid.
    Profile(ProfileArgs),
    /// Distance of finite-n rescaled densities from their limits.
    Converge(ConvergeArgs),
    /// Compare closed-form zero densities with a finite-difference Laplacian.
    CheckFd(CheckFdArgs),
    /// Monte Carlo annulus counts against the analytic densities.
    Mc(McArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    /// Zeros given a critical point, finite n, against Lebesgue measure in z.
    DnSu2,
    RescaledDn,
    DInfinity,
    /// Critical points given a zero, finite n, in z (affine-frame jets).
    KnSu2,
    /// Critical points given a zero, finite n, in z (normal-frame jets).
    KnSu2NormalFrame,
    RescaledKn,
    RescaledKnNormalFrame,
    KInfinity,
    KInfinityNormalFrame,
    ZerosGivenZero,
}

impl ProfileKind {
    fn finite_n(self) -> bool {
        matches!(
            self,
            ProfileKind::DnSu2
                | ProfileKind::RescaledDn
                | ProfileKind::KnSu2
                | ProfileKind::KnSu2NormalFrame
                | ProfileKind::RescaledKn
                | ProfileKind::RescaledKnNormalFrame
        )
    }
}

/// Reference measure for the unrescaled K_n profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    Lebesgue,
    /// The Fubini-Study Kähler form.
    Omega,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProfileArgs {
    #[arg(long, value_enum)]
    pub kind: ProfileKind,
    /// Degree; required exactly for the finite-n kinds.
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long = "rmax")]
    #[serde(rename = "rmax")]
    pub r_max: f64,
    #[arg(long)]
    pub steps: usize,
    /// Measure the density is expressed against (K_n kinds only).
    #[arg(long, value_enum, default_value_t = Measure::Lebesgue)]
    pub wrt: Measure,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergeKind {
    Kn,
    KnNormalFrame,
    Dn,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConvergeArgs {
    #[arg(long, value_enum)]
    pub kind: ConvergeKind,
    /// Comma-separated degrees, in the order the ratio column compares them.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    pub n_list: Vec<u32>,
    /// Comma-separated rescaled radii.
    #[arg(long = "u", value_delimiter = ',', required = true)]
    pub u_list: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FdKind {
    /// Rescaled D_n, checked in the rescaled coordinate.
    Dn,
    DInfinity,
    ZerosGivenZero,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CheckFdArgs {
    #[arg(long, value_enum, default_value_t = FdKind::Dn)]
    pub kind: FdKind,
    #[arg(long)]
    pub n: Option<u32>,
    /// Radii as `start:step:stop` or a comma-separated list.
    #[arg(long = "r-grid", default_value = "0.05:0.05:4")]
    pub r_grid: String,
    #[arg(long, default_value_t = 1e-3)]
    pub h: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct McArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub trials: u64,
    #[arg(long, value_enum, default_value_t = Conditioning::ZeroAtOrigin)]
    pub conditioning: Conditioning,
    /// Rescaled annulus edges as `start:step:stop` or a comma-separated list.
    #[arg(long, default_value = "0:0.5:3")]
    pub edges: String,
    #[arg(long, env = "HOLOCOND_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Density the critical point counts are compared against.
    #[arg(long, value_enum, default_value_t = Reference::KacRice)]
    pub reference: Reference,
    #[arg(long = "zero-counting", value_enum, default_value_t = ZeroCounting::ArgumentPrinciple)]
    pub zero_counting: ZeroCounting,
    /// Critical point seed grid density.
    #[arg(long, default_value_t = 96)]
    pub grid: usize,
    /// Double-density coverage check on every k-th trial (0 disables).
    #[arg(long = "coverage-every", default_value_t = 0)]
    pub coverage_every: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

/// Parses `start:step:stop` (inclusive, tolerant to rounding) or `a,b,c`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("cannot parse grid {s:?}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
                return Err(bad());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            (0..=count).map(|i| start + step * i as f64).collect()
        }
        [_] => s.split(',').map(num).collect::<Result<Vec<_>>>()?,
        _ => return Err(bad()),
    };
    if values.is_empty() {
        return Err(bad());
    }
    Ok(values)
}

/// A table cell: floats print in shortest round-trip form, switching to
/// exponent notation for very small or large magnitudes.
#[derive(Debug, Clone, Copy)]
enum Cell {
    Float(f64),
    Int(u64),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) => format!("{x:?}"),
            Cell::Int(i) => format!("{i}"),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) => json!(x),
            Cell::Int(i) => json!(i),
            Cell::Empty => Value::Null,
        }
    }
}

struct Table {
    header: &'static [&'static str],
    rows: Vec<Vec<Cell>>,
}

struct Report<'a, C: Serialize> {
    command: &'static str,
    config: &'a C,
    seed: Option<u64>,
    table: Table,
}

impl<C: Serialize> Report<'_, C> {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = self.table.header.join(",");
                s.push('\n');
                for row in &self.table.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .table
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> =
                            self.table.header.iter().zip(row).map(|(h, c)| (h.to_string(), c.json())).collect();
                        Value::Object(obj)
                    })
                    .collect();
                let envelope = json!({
                    "version": env!("CARGO_PKG_VERSION"),
                    "command": self.command,
                    "config": self.config,
                    "seed": self.seed,
                    "rows": rows,
                });
                let mut s = serde_json::to_string_pretty(&envelope).expect("envelope serializes");
                s.push('\n');
                s
            }
        }
    }
}

enum Failure {
    BadArgs(String),
    Unwritable(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::BadArgs(e.to_string())
    }
}

fn write_output(output: &OutputArgs, text: &str) -> std::result::Result<(), Failure> {
    let result = match &output.out {
        Some(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            w.write_all(text.as_bytes())?;
            w.flush()
        }),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush())
        }
    };
    result.map_err(|e| {
        let target = output.out.as_ref().map_or("stdout".to_string(), |p| p.display().to_string());
        Failure::Unwritable(format!("cannot write {target}: {e}"))
    })
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match &cli.command {
        Command::Profile(a) => cmd_profile(a),
        Command::Converge(a) => cmd_converge(a),
        Command::CheckFd(a) => cmd_check_fd(a),
        Command::Mc(a) => cmd_mc(a),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::BadArgs(msg)) => {
            eprintln!("error: {msg}");
            EXIT_BAD_ARGS
        }
        Err(Failure::Unwritable(msg)) => {
            eprintln!("error: {msg}");
            EXIT_UNWRITABLE
        }
    }
}

fn bad(msg: impl Into<String>) -> Failure {
    Failure::BadArgs(msg.into())
}

fn cmd_profile(a: &ProfileArgs) -> std::result::Result<i32, Failure> {
    if !(a.r_max > 0.0 && a.r_max.is_finite()) {
        return Err(bad(format!("--rmax must be positive, got {}", a.r_max)));
    }
    if a.steps < 2 {
        return Err(bad(format!("--steps must be at least 2, got {}", a.steps)));
    }
    match (a.kind.finite_n(), a.n) {
        (true, None) => return Err(bad("--n is required for finite-n kinds")),
        (false, Some(_)) => return Err(bad("--n is only accepted for finite-n kinds")),
        _ => {}
    }
    let is_kn = matches!(a.kind, ProfileKind::KnSu2 | ProfileKind::KnSu2NormalFrame);
    if a.wrt == Measure::Omega && !is_kn {
        return Err(bad("--wrt omega applies only to kn-su2 and kn-su2-normal-frame"));
    }
    let n = a.n.unwrap_or(0);
    let density = |r: f64| -> Result<f64> {
        let z = Complex64::new(r, 0.0);
        let radial = |kind| RadialDensity::new(kind).eval(r);
        match a.kind {
            ProfileKind::DnSu2 => radial(RadialKind::DnSu2 { n }),
            ProfileKind::RescaledDn => radial(RadialKind::RescaledDn { n }),
            ProfileKind::DInfinity => radial(RadialKind::DInfinity),
            ProfileKind::RescaledKn => radial(RadialKind::RescaledKn { n }),
            ProfileKind::RescaledKnNormalFrame => radial(RadialKind::RescaledKnNormalFrame { n }),
            ProfileKind::KInfinity => radial(RadialKind::KInfinity),
            ProfileKind::KInfinityNormalFrame => radial(RadialKind::KInfinityNormalFrame),
            ProfileKind::ZerosGivenZero => radial(RadialKind::ZerosGivenZero),
            ProfileKind::KnSu2 | ProfileKind::KnSu2NormalFrame => {
                let omega = if a.kind == ProfileKind::KnSu2 {
                    kn_density_wrt_omega(KernelModel::su2(n)?, z)?
                } else {
                    kn_normal_frame_density_wrt_omega(n, z)?
                };
                Ok(match a.wrt {
                    Measure::Omega => omega,
                    Measure::Lebesgue => omega / (1.0 + r * r).powi(2),
                })
            }
        }
    };
    let mut rows = Vec::with_capacity(a.steps + 1);
    for i in 0..=a.steps {
        let r = i as f64 * a.r_max / a.steps as f64;
        rows.push(vec![Cell::Float(r), Cell::Float(density(r)?)]);
    }
    let report = Report { command: "profile", config: a, seed: None, table: Table { header: &["r", "rho"], rows } };
    write_output(&a.output, &report.render(a.output.format))?;
    Ok(EXIT_OK)
}

fn cmd_converge(a: &ConvergeArgs) -> std::result::Result<i32, Failure> {
    if let Some(&n) = a.n_list.iter().find(|&&n| n < 2) {
        return Err(bad(format!("degrees must be >= 2, got {n}")));
    }
    if let Some(u) = a.u_list.iter().find(|u| !(u.is_finite() && **u >= 0.0)) {
        return Err(bad(format!("radii must be finite and >= 0, got {u}")));
    }
    let mut rows = Vec::new();
    for &u in &a.u_list {
        let uc = Complex64::new(u, 0.0);
        let limit = match a.kind {
            ConvergeKind::Kn => k_infinity(uc),
            ConvergeKind::KnNormalFrame => k_infinity_normal_frame(uc)?,
            ConvergeKind::Dn => lelong::d_infinity(uc),
        };
        let mut previous: Option<f64> = None;
        for &n in &a.n_list {
            let value = match a.kind {
                ConvergeKind::Kn => rescaled_kn(n, uc)?,
                ConvergeKind::KnNormalFrame => rescaled_kn_normal_frame(n, uc)?,
                ConvergeKind::Dn => lelong::rescaled_dn(n, uc)?,
            };
            let error = (value - limit).abs();
            let ratio = match previous {
                Some(p) if error > 0.0 => Cell::Float(p / error),
                _ => Cell::Empty,
            };
            previous = Some(error);
            rows.push(vec![
                Cell::Int(n as u64),
                Cell::Float(u),
                Cell::Float(value),
                Cell::Float(limit),
                Cell::Float(error),
                ratio,
            ]);
        }
    }
    let table = Table { header: &["n", "u", "rescaled", "limit", "error", "ratio"], rows };
    let report = Report { command: "converge", config: a, seed: None, table };
    write_output(&a.output, &report.render(a.output.format))?;
    Ok(EXIT_OK)
}

/// `(closed form, finite difference)` of one zero density at radius `r`.
pub fn fd_pair(kind: FdKind, n: Option<u32>, r: f64, h: f64) -> Result<(f64, f64)> {
    let z = Complex64::new(r, 0.0);
    let pi = std::f64::consts::PI;
    match kind {
        FdKind::Dn => {
            let n = n.ok_or_else(|| Error::InvalidArgument("--n is required for kind dn".into()))?;
            let closed = lelong::rescaled_dn(n, z)?;
            let fd = ddbar_log_numeric(|v| potentials::rescaled_dn(n, v), z, h)? / pi;
            Ok((closed, fd))
        }
        FdKind::DInfinity => Ok((lelong::d_infinity(z), ddbar_log_numeric(potentials::d_infinity, z, h)? / pi)),
        FdKind::ZerosGivenZero => {
            Ok((lelong::zeros_given_zero_density(z)?, ddbar_log_numeric(potentials::zeros_given_zero, z, h)? / pi))
        }
    }
}

fn cmd_check_fd(a: &CheckFdArgs) -> std::result::Result<i32, Failure> {
    if a.kind != FdKind::Dn && a.n.is_some() {
        return Err(bad("--n is only accepted for kind dn"));
    }
    if !(a.h > 0.0) || !(a.tol > 0.0) {
        return Err(bad("--h and --tol must be positive"));
    }
    let grid = parse_grid(&a.r_grid)?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut worst: f64 = 0.0;
    for r in grid {
        if !(r > 0.0) {
            return Err(bad(format!("finite-difference radii must be positive, got {r}")));
        }
        let (closed, fd) = fd_pair(a.kind, a.n, r, a.h)?;
        let err = (closed - fd).abs();
        worst = worst.max(if err.is_nan() { f64::INFINITY } else { err });
        rows.push(vec![Cell::Float(r), Cell::Float(closed), Cell::Float(fd), Cell::Float(err)]);
    }
    let table = Table { header: &["r", "closed_form", "finite_difference", "abs_err"], rows };
    let report = Report { command: "check-fd", config: a, seed: None, table };
    write_output(&a.output, &report.render(a.output.format))?;
    if worst < a.tol {
        Ok(EXIT_OK)
    } else {
        eprintln!("check-fd: max abs error {worst} exceeds {}", a.tol);
        Ok(EXIT_CHECK_FAILED)
    }
}

fn cmd_mc(a: &McArgs) -> std::result::Result<i32, Failure> {
    let edges = parse_grid(&a.edges)?;
    let mut config = ExperimentConfig::new(a.n, a.trials, a.conditioning, edges, a.seed);
    config.threads = a.threads;
    config.reference = a.reference;
    config.zero_counting = a.zero_counting;
    config.search = CriticalSearchConfig { grid: a.grid, ..CriticalSearchConfig::default() };
    config.coverage_check_every = a.coverage_every;
    let hist = annulus_experiment(&config)?;
    let z = hist.z_scores();
    let rows = (0..hist.counts.len())
        .map(|i| {
            vec![
                Cell::Float(hist.edges[i]),
                Cell::Float(hist.edges[i + 1]),
                Cell::Int(hist.counts[i]),
                Cell::Float(hist.predicted[i]),
                Cell::Float(hist.stderr[i]),
                Cell::Float(z[i]),
            ]
        })
        .collect();
    let table = Table { header: &["r_lo", "r_hi", "count", "predicted", "stderr", "z_score"], rows };
    let report = Report { command: "mc", config: a, seed: Some(a.seed), table };
    write_output(&a.output, &report.render(a.output.format))?;
    log::info!(
        "resamples {}, coverage mismatches {}, singular hits {}",
        hist.resamples,
        hist.coverage_mismatches,
        hist.singular_hits
    );
    if hist.within(3.0, 200.0) {
        Ok(EXIT_OK)
    } else {
        eprintln!("mc: an annulus with at least 200 expected points deviates by more than 3 standard errors");
        Ok(EXIT_CHECK_FAILED)
    }
}
