//! The `mcuq` command line: synth, optimize, verify, metrics, sweep and
//! identities. Every command is deterministic for fixed arguments.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::identity_battery;
use crate::circuit::{Circuit, CircuitError};
use crate::linalg::{cis, Unitary2, TOL_IDENTITY};
use crate::optimizer::{run_pass, OptError, PassReport};
use crate::sample::{named_gate, parse_angles, random_u2, SampleError};
use crate::synthesis::{default_aqft_cutoff, synthesize, Method, SynthConfig, SynthError};
use crate::transpile::{compile, measure_circuit, Architecture, MetricsReport, CSV_COLUMNS};
use crate::verify::{circuit_unitary, compare, mcu_oracle, unpermute_rows, verify_mcu_sampled_permuted, VerifyError};

/// Verification tolerance for whole circuits.
pub const VERIFY_TOL: f64 = 1e-9;
/// Widest circuit verified through its dense unitary; wider ones use
/// statevector checks on selected inputs.
pub const DENSE_VERIFY_MAX: usize = 10;
/// Exit status when a verification or identity check fails.
pub const EXIT_CHECK_FAILED: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Pass(#[from] OptError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Errors caused by the arguments themselves rather than by I/O or data.
    pub fn is_usage(&self) -> bool {
        matches!(self, CliError::Usage(_) | CliError::Sample(_) | CliError::Synth(_) | CliError::Pass(_))
    }
}

#[derive(Parser, Debug)]
#[command(name = "mcuq", version, about = "QFT-based multi-controlled unitary synthesis and analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a circuit and write it as JSON.
    Synth(RunArgs),
    /// Apply optimizer passes to a circuit file (or a freshly built circuit).
    Optimize(FileArgs),
    /// Check a circuit against the exact multi-controlled-U matrix.
    Verify(FileArgs),
    /// Native metrics for one configuration.
    Metrics(RunArgs),
    /// Native metrics over a range of widths and methods.
    Sweep(SweepArgs),
    /// Evaluate the gate identity battery.
    Identities(OutArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Default)]
#[group(multiple = false)]
pub struct UArgs {
    /// Named target gate: I, X, Y, Z, H, S, T or SX.
    #[arg(long = "u", value_name = "NAME")]
    pub name: Option<String>,
    /// `d,a,t,b` for e^{i d} Rz(a) Ry(t) Rz(b).
    #[arg(long, value_name = "d,a,t,b", allow_hyphen_values = true)]
    pub angles: Option<String>,
    /// Seed for a random non-trivial U(2) (the default is seed 0).
    #[arg(long, value_name = "S")]
    pub seed: Option<u64>,
}

impl UArgs {
    pub fn unitary(&self) -> Result<Unitary2, CliError> {
        if let Some(n) = &self.name {
            return Ok(named_gate(n)?);
        }
        if let Some(a) = &self.angles {
            return Ok(parse_angles(a)?);
        }
        Ok(random_u2(self.seed.unwrap_or(0)))
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct OutArgs {
    /// Write here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// AQFT cutoff: a fixed root index or `log` for `ceil(log2 n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Aqft {
    Fixed(u32),
    Log,
}

impl FromStr for Aqft {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "log" {
            return Ok(Aqft::Log);
        }
        s.parse().map(Aqft::Fixed).map_err(|_| format!("expected a root index or `log`, got `{s}`"))
    }
}

impl Aqft {
    fn cutoff(self, n: usize) -> u32 {
        match self {
            Aqft::Fixed(m) => m,
            Aqft::Log => default_aqft_cutoff(n),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[arg(long, default_value = "mcu-mod")]
    pub method: Method,
    /// Total width: controls plus the target.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value = "fc")]
    pub arch: Architecture,
    /// Drop controlled roots with index above M (`log` for ceil(log2 n)).
    #[arg(long, value_name = "M")]
    pub aqft: Option<Aqft>,
    #[command(flatten)]
    pub u: UArgs,
    /// Passes to run after synthesis, in order.
    #[arg(long, value_name = "PASS", value_delimiter = ',')]
    pub optimize: Vec<String>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone)]
pub struct FileArgs {
    /// Circuit JSON; built from the other flags when omitted.
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

/// Inclusive width range `A..B` (or `A..=B`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NRange {
    pub start: usize,
    pub end: usize,
}

impl FromStr for NRange {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("expected A..B, got `{s}`");
        let (a, b) = s.split_once("..").ok_or_else(bad)?;
        let b = b.strip_prefix('=').unwrap_or(b);
        let (start, end) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if start > end {
            return Err(format!("empty range `{s}`"));
        }
        Ok(NRange { start, end })
    }
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    /// Comma-separated methods.
    #[arg(long = "method", alias = "methods", value_delimiter = ',', default_value = "mcu-mod,mcu-zyz,ldd")]
    pub methods: Vec<Method>,
    #[arg(long = "n-range", alias = "n", value_name = "A..B")]
    pub n_range: NRange,
    #[arg(long, default_value = "fc")]
    pub arch: Architecture,
    #[arg(long, value_name = "M")]
    pub aqft: Option<Aqft>,
    #[command(flatten)]
    pub u: UArgs,
    #[arg(long, value_name = "PASS", value_delimiter = ',')]
    pub optimize: Vec<String>,
    #[command(flatten)]
    pub out: OutArgs,
}

fn is_merge(p: &str) -> bool {
    p == "merge" || p == "merge_phase_columns"
}

/// Builds the circuit for one configuration and runs the requested passes.
/// `mcx-qft` is left unmerged unless `merge` is among the passes; the MCU
/// builders always merge.
pub fn build(
    method: Method,
    n: usize,
    u: Unitary2,
    aqft: Option<Aqft>,
    passes: &[String],
) -> Result<(Circuit, SynthConfig, Vec<PassReport>), CliError> {
    let mut cfg = SynthConfig::new(method, n, u);
    cfg.aqft_cutoff = aqft.map(|a| a.cutoff(n).min(n as u32));
    if method == Method::McxQft && !passes.iter().any(|p| is_merge(p)) {
        cfg.optimize = false;
    }
    let mut c = synthesize(&cfg)?;
    let mut reports = Vec::new();
    for p in passes {
        let (next, r) = run_pass(p, &c)?;
        c = next;
        reports.push(r);
    }
    Ok((c, cfg, reports))
}

fn need_n(run: &RunArgs) -> Result<usize, CliError> {
    run.n.ok_or_else(|| CliError::Usage("--n is required".into()))
}

fn read_circuit(path: &PathBuf) -> Result<Circuit, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    Ok(Circuit::from_json(&text)?)
}

fn write_out(out: &OutArgs, body: &str) -> Result<(), CliError> {
    match &out.out {
        Some(p) => fs::write(p, body).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => {
            let mut so = io::stdout().lock();
            so.write_all(body.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn json_line<T: Serialize>(v: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub stage: &'static str,
    pub pass: bool,
    pub max_deviation: f64,
    pub global_phase: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub method: Method,
    pub n: usize,
    pub arch: Architecture,
    pub pass: bool,
    pub max_deviation: f64,
    pub global_phase: Option<f64>,
    pub mode: &'static str,
    pub checks: Vec<CheckResult>,
}

/// Inputs for the statevector check: the two states the gate acts on, the
/// extremes, their one-bit neighbours and a seeded handful of others.
fn sample_inputs(n: usize) -> Vec<usize> {
    let dim = 1usize << n;
    let lo = (dim >> 1) - 1;
    let mut v = vec![lo, dim - 1, 0, lo ^ 1, (dim - 1) ^ 1, 1 << (n - 1)];
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    v.extend((0..24).map(|_| rng.gen_range(0..dim)));
    v.dedup();
    v
}

/// Checks the routed abstract circuit and its native lowering against the
/// oracle for `u`.
pub fn verify_circuit(c: &Circuit, u: &Unitary2, method: Method, arch: Architecture) -> Result<VerifyReport, CliError> {
    let compiled = compile(c, arch);
    let perm = compiled.final_perm.clone();
    let n = c.n;
    let mut checks = Vec::new();
    let dense = n <= DENSE_VERIFY_MAX;
    if dense {
        let oracle = mcu_oracle(u, n);
        let a = unpermute_rows(&circuit_unitary(&compiled.abstract_circuit)?, &perm);
        let v = compare(&a, &oracle, VERIFY_TOL)?;
        checks.push(CheckResult {
            stage: "abstract",
            pass: v.pass,
            max_deviation: v.max_deviation,
            global_phase: Some(v.global_phase),
        });
        let nat = circuit_unitary(&compiled.native.circuit)?.scale(cis(compiled.native.global_phase));
        let v = compare(&unpermute_rows(&nat, &perm), &oracle, VERIFY_TOL)?;
        checks.push(CheckResult {
            stage: "native",
            pass: v.pass,
            max_deviation: v.max_deviation,
            global_phase: Some(v.global_phase),
        });
    } else {
        let inputs = sample_inputs(n);
        for (stage, circ) in [("abstract", &compiled.abstract_circuit), ("native", &compiled.native.circuit)] {
            let d = verify_mcu_sampled_permuted(circ, u, &inputs, Some(&perm))?;
            checks.push(CheckResult { stage, pass: d <= VERIFY_TOL, max_deviation: d, global_phase: None });
        }
    }
    let max_deviation = checks.iter().map(|c| c.max_deviation).fold(0.0, f64::max);
    Ok(VerifyReport {
        method,
        n,
        arch,
        pass: checks.iter().all(|c| c.pass),
        max_deviation,
        global_phase: checks[0].global_phase,
        mode: if dense { "dense" } else { "sampled" },
        checks,
    })
}

fn write_rows(out: &OutArgs, rows: &[MetricsReport]) -> Result<(), CliError> {
    match out.format.unwrap_or(Format::Csv) {
        Format::Json => write_out(out, &json_line(&rows)?),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_COLUMNS)?;
            for r in rows {
                w.write_record(r.csv_record())?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
            write_out(out, &String::from_utf8_lossy(&bytes))
        }
    }
}

/// What a command produced: whether its checks passed.
pub struct Outcome {
    pub checks_passed: bool,
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    let ok = Outcome { checks_passed: true };
    match cli.command {
        Command::Synth(run) => {
            let n = need_n(&run)?;
            let (c, _, _) = build(run.method, n, run.u.unitary()?, run.aqft, &run.optimize)?;
            write_out(&run.out, &(c.to_json() + "\n"))?;
            Ok(ok)
        }
        Command::Optimize(FileArgs { input, run }) => {
            let (mut c, mut reports) = match &input {
                Some(p) => (read_circuit(p)?, Vec::new()),
                None => {
                    let (c, _, _) = build(run.method, need_n(&run)?, run.u.unitary()?, run.aqft, &[])?;
                    (c, Vec::new())
                }
            };
            let passes: Vec<String> = if run.optimize.is_empty() {
                vec!["merge_phase_columns".into(), "cancel_cx_pairs".into()]
            } else {
                run.optimize.clone()
            };
            for p in &passes {
                let (next, r) = run_pass(p, &c)?;
                c = next;
                reports.push(r);
            }
            for r in &reports {
                eprintln!("{}", serde_json::to_string(r)?);
            }
            write_out(&run.out, &(c.to_json() + "\n"))?;
            Ok(ok)
        }
        Command::Verify(FileArgs { input, run }) => {
            let u = run.u.unitary()?;
            let c = match &input {
                Some(p) => read_circuit(p)?,
                None => build(run.method, need_n(&run)?, u, run.aqft, &run.optimize)?.0,
            };
            let target = if run.method == Method::McxQft { Unitary2::x() } else { u };
            let report = verify_circuit(&c, &target, run.method, run.arch)?;
            write_out(&run.out, &json_line(&report)?)?;
            Ok(Outcome { checks_passed: report.pass })
        }
        Command::Metrics(run) => {
            let n = need_n(&run)?;
            let (c, cfg, _) = build(run.method, n, run.u.unitary()?, run.aqft, &run.optimize)?;
            let row = measure_circuit(&c, &cfg, run.arch);
            write_rows(&run.out, &[row])?;
            Ok(ok)
        }
        Command::Sweep(s) => {
            let u = s.u.unitary()?;
            let jobs: Vec<(usize, Method)> = (s.n_range.start..=s.n_range.end)
                .flat_map(|n| s.methods.iter().map(move |&m| (n, m)))
                .filter(|&(n, m)| n >= m.min_n())
                .collect();
            let mut rows: Vec<MetricsReport> = jobs
                .par_iter()
                .map(|&(n, m)| {
                    let (c, cfg, _) = build(m, n, u, s.aqft, &s.optimize)?;
                    Ok(measure_circuit(&c, &cfg, s.arch))
                })
                .collect::<Result<_, CliError>>()?;
            rows.sort_by_key(|r| (r.n, r.method));
            write_rows(&s.out, &rows)?;
            Ok(ok)
        }
        Command::Identities(out) => {
            #[derive(Serialize)]
            struct Row {
                name: String,
                max_deviation: f64,
                pass: bool,
            }
            let rows: Vec<Row> = identity_battery()
                .into_iter()
                .map(|(name, d)| Row { name, max_deviation: d, pass: d <= TOL_IDENTITY })
                .collect();
            let pass = rows.iter().all(|r| r.pass);
            match out.format.unwrap_or(Format::Json) {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Battery<'a> {
                        pass: bool,
                        tolerance: f64,
                        identities: &'a [Row],
                    }
                    write_out(&out, &json_line(&Battery { pass, tolerance: TOL_IDENTITY, identities: &rows })?)?;
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["name", "max_deviation", "pass"])?;
                    for r in &rows {
                        w.write_record([r.name.clone(), format!("{:e}", r.max_deviation), r.pass.to_string()])?;
                    }
                    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
                    write_out(&out, &String::from_utf8_lossy(&bytes))?;
                }
            }
            Ok(Outcome { checks_passed: pass })
        }
    }
}

/// Entry point for the binary. Exit status 0 on success, 1 on errors, 2 on
/// usage errors and [`EXIT_CHECK_FAILED`] when a check fails.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(o) if o.checks_passed => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
