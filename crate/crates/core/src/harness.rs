// Copyright 2026 The qss-core Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line front end: `run`, `verify` and `distribution`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 size or oracle cap
//! exceeded, 4 a run or verification check failed.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::error::Error as QssError;
use crate::gates;
use crate::measurement::{outcome_distribution, sample_outcome, trial_rng};
use crate::oracle::{self, Assertion, DEFAULT_ORACLE_CAP};
use crate::protocol::{prepare_joint_with_cap, run_protocol_with, Mode, ProtocolTranscript, Sampled};
use crate::state::{register_size, SecretAmplitudes, DEFAULT_CAP};
use crate::tol;
use crate::trace::{format_decimal, SummaryRow, TraceRecord};

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CAP: u8 = 3;
pub const EXIT_FAILED: u8 = 4;

pub const DEFAULT_GRID: &str = "d=2..4,n=1..3";
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "qss", version, about = "Multiparty qudit information splitting simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run sampled protocol trials and emit traces.
    Run(RunArgs),
    /// Exhaustively cross-check the protocol against the brute-force oracle.
    Verify(VerifyArgs),
    /// Compare sampled frequencies of Alice's outcomes with the exact distribution.
    Distribution(DistributionArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Qudit dimension.
    #[arg(long = "d")]
    pub d: usize,
    /// Number of sharing parties.
    #[arg(long = "n")]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Mode::Sequential)]
    pub mode: Mode,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Secret amplitudes as comma-separated `re,im` pairs; random per trial if omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub secret: Option<String>,
    /// JSON-lines trace output, one line per trial.
    #[arg(long)]
    pub emit_trace: Option<PathBuf>,
    /// CSV summary output.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Largest joint register, in amplitudes.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Inclusive ranges, e.g. "d=2..4,n=1..3".
    #[arg(long, default_value = DEFAULT_GRID)]
    pub grid: String,
    /// JSON report output.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    pub oracle_cap: usize,
}

#[derive(Debug, Args)]
pub struct DistributionArgs {
    #[arg(long = "d")]
    pub d: usize,
    #[arg(long = "n")]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub secret: Option<String>,
    /// CSV output; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Cap(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Usage(_) => EXIT_USAGE,
            HarnessError::Cap(_) => EXIT_CAP,
            _ => EXIT_IO,
        }
    }
}

impl From<QssError> for HarnessError {
    fn from(e: QssError) -> Self {
        match e {
            QssError::CapExceeded { .. } | QssError::OracleCapExceeded { .. } => {
                HarnessError::Cap(e.to_string())
            }
            other => HarnessError::Usage(other.to_string()),
        }
    }
}

type HarnessResult<T> = std::result::Result<T, HarnessError>;

/// Parses arguments, dispatches and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Distribution(args) => cmd_distribution(&args),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn check_shape(d: usize, n: usize) -> HarnessResult<()> {
    if d < 2 {
        return Err(HarnessError::Usage(format!("--d must be at least 2, got {d}")));
    }
    if n < 1 {
        return Err(HarnessError::Usage(format!("--n must be at least 1, got {n}")));
    }
    Ok(())
}

/// Parses `re,im,re,im,...` into a normalized secret of dimension `d`,
/// warning when the raw norm is noticeably off 1.
pub fn parse_secret(raw: &str, d: usize) -> HarnessResult<SecretAmplitudes> {
    let values = raw
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| HarnessError::Usage(format!("invalid --secret value: {e}")))?;
    if values.len() != 2 * d {
        return Err(HarnessError::Usage(format!(
            "--secret needs {} numbers ({d} re,im pairs), got {}",
            2 * d,
            values.len()
        )));
    }
    let alphas: Vec<Complex64> = values.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
    let norm = alphas.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > tol::SECRET_NORM_WARNING {
        log::warn!("secret norm is {norm}; normalizing");
    }
    Ok(SecretAmplitudes::new(alphas)?)
}

fn create(path: &Path) -> HarnessResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Runs the requested trials; returns whether every trial reached unit fidelity.
pub fn cmd_run(args: &RunArgs) -> HarnessResult<bool> {
    check_shape(args.d, args.n)?;
    let secret = args.secret.as_deref().map(|s| parse_secret(s, args.d)).transpose()?;
    register_size(args.d, args.n + 2, args.cap)?;

    let transcripts: Vec<ProtocolTranscript> = (0..args.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(args.seed, trial);
            let secret = match &secret {
                Some(s) => s.clone(),
                None => SecretAmplitudes::random(args.d, &mut rng)?,
            };
            run_protocol_with(&secret, args.n, args.mode, Sampled(rng), args.cap)
        })
        .collect::<crate::Result<_>>()?;

    if let Some(path) = &args.emit_trace {
        let mut out = create(path)?;
        for (trial, t) in (0u64..).zip(&transcripts) {
            writeln!(out, "{}", TraceRecord::new(t, args.seed, trial).to_json_line()?)?;
        }
        out.flush()?;
    }
    if let Some(path) = &args.summary {
        let mut out = csv::Writer::from_writer(create(path)?);
        for (trial, t) in (0u64..).zip(&transcripts) {
            out.serialize(SummaryRow::new(t, trial))?;
        }
        out.flush()?;
    }

    let min_fidelity = transcripts.iter().map(|t| t.final_fidelity).fold(1.0, f64::min);
    let passed = transcripts.iter().all(|t| t.final_fidelity >= 1.0 - tol::FIDELITY);
    println!(
        "d={} n={} mode={} trials={} min_fidelity={} {}",
        args.d,
        args.n,
        args.mode.as_str(),
        args.trials,
        format_decimal(min_fidelity),
        if passed { "PASS" } else { "FAIL" }
    );
    Ok(passed)
}

/// Inclusive `d` and `n` ranges of a verification sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    pub d: RangeInclusive<usize>,
    pub n: RangeInclusive<usize>,
}

impl Grid {
    pub fn points(&self) -> Vec<(usize, usize)> {
        self.d.clone().flat_map(|d| self.n.clone().map(move |n| (d, n))).collect()
    }
}

fn parse_range(s: &str) -> Option<RangeInclusive<usize>> {
    let range = match s.split_once("..") {
        Some((lo, hi)) => lo.trim().parse().ok()?..=hi.trim().parse().ok()?,
        None => {
            let v = s.trim().parse().ok()?;
            v..=v
        }
    };
    (!range.is_empty()).then_some(range)
}

/// Parses `d=LO..HI,n=LO..HI`; either bound pair may be a single value.
pub fn parse_grid(text: &str) -> HarnessResult<Grid> {
    let bad = || HarnessError::Usage(format!("cannot parse grid {text:?}; expected e.g. {DEFAULT_GRID:?}"));
    let (mut d, mut n) = (None, None);
    for part in text.split(',') {
        let (key, value) = part.split_once('=').ok_or_else(bad)?;
        let range = parse_range(value).ok_or_else(bad)?;
        match key.trim() {
            "d" if d.is_none() => d = Some(range),
            "n" if n.is_none() => n = Some(range),
            _ => return Err(bad()),
        }
    }
    let grid = Grid { d: d.ok_or_else(bad)?, n: n.ok_or_else(bad)? };
    if *grid.d.start() < 2 || *grid.n.start() < 1 {
        return Err(HarnessError::Usage(format!("grid {text:?} needs d >= 2 and n >= 1")));
    }
    Ok(grid)
}

/// Deterministic secrets used by `verify`: a basis state, the uniform state
/// and one with unequal magnitudes and phases.
pub fn verification_secrets(d: usize) -> Vec<(&'static str, SecretAmplitudes)> {
    let generic = (0..d)
        .map(|k| Complex64::from_polar(1.0 + 0.5 * k as f64, 0.9 * (k * k) as f64 + 0.2 * k as f64))
        .collect();
    vec![
        ("basis", SecretAmplitudes::basis(d, d - 1).expect("d >= 2")),
        ("uniform", SecretAmplitudes::uniform(d).expect("d >= 2")),
        ("generic", SecretAmplitudes::new(generic).expect("nonzero")),
    ]
}

fn qubit_fixture_inputs() -> Vec<(Complex64, Complex64)> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
        (Complex64::new(h, 0.0), Complex64::new(h, 0.0)),
        (Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)),
        (Complex64::new(0.3f64.cos(), 0.0), Complex64::from_polar(0.3f64.sin(), 1.1)),
    ]
}

#[derive(Debug, Serialize)]
pub struct VerificationReport {
    pub version: u32,
    pub grid: String,
    pub oracle_cap: usize,
    pub total: usize,
    pub failed: usize,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
}

/// Runs every oracle check over `grid`.
pub fn verify_grid(grid: &Grid, oracle_cap: usize) -> HarnessResult<Vec<Assertion>> {
    for (d, n) in grid.points() {
        let fits = u32::try_from(n + 2).ok().and_then(|e| d.checked_pow(e)).is_some_and(|s| s <= oracle_cap);
        if !fits {
            return Err(HarnessError::Cap(format!(
                "grid point d={d}, n={n} needs {d}^{} amplitudes, above the oracle cap of {oracle_cap}; \
                 narrow --grid or raise --oracle-cap",
                n + 2
            )));
        }
    }

    let per_point: Vec<Vec<Assertion>> = grid
        .points()
        .into_par_iter()
        .map(|(d, n)| -> crate::Result<Vec<Assertion>> {
            let mut out = Vec::new();
            for (label, secret) in verification_secrets(d) {
                for mode in [Mode::Sequential, Mode::Parallel] {
                    let report = oracle::dense_protocol_check_with_cap(&secret, n, mode, oracle_cap)?;
                    out.extend(report.assertions().into_iter().map(|mut a| {
                        a.check = format!("{}[{label}]", a.check);
                        a
                    }));
                }
                let marginals = oracle::marginal_sweep_with_cap(&secret, n, oracle_cap)?;
                out.extend(marginals.assertions().into_iter().map(|mut a| {
                    a.check = format!("{}[{label}]", a.check);
                    a
                }));
            }
            Ok(out)
        })
        .collect::<crate::Result<_>>()?;

    let mut assertions: Vec<Assertion> = per_point.into_iter().flatten().collect();
    for (i, (a, b)) in qubit_fixture_inputs().into_iter().enumerate() {
        let report = oracle::qubit_fixture_check(a, b)?;
        assertions.extend(report.assertions().into_iter().map(|mut x| {
            x.check = format!("{}[input{i}]", x.check);
            x
        }));
    }
    Ok(assertions)
}

pub fn cmd_verify(args: &VerifyArgs) -> HarnessResult<bool> {
    let grid = parse_grid(&args.grid)?;
    let assertions = verify_grid(&grid, args.oracle_cap)?;
    let failed = assertions.iter().filter(|a| !a.passed).count();
    for a in assertions.iter().filter(|a| !a.passed) {
        eprintln!(
            "FAIL {} d={} n={} deviation={:e} tolerance={:e}",
            a.check, a.d, a.n, a.deviation, a.tolerance
        );
    }
    let report = VerificationReport {
        version: REPORT_VERSION,
        grid: args.grid.clone(),
        oracle_cap: args.oracle_cap,
        total: assertions.len(),
        failed,
        passed: failed == 0,
        assertions,
    };
    if let Some(path) = &args.report {
        let mut out = create(path)?;
        serde_json::to_writer_pretty(&mut out, &report)?;
        writeln!(out)?;
        out.flush()?;
    }
    println!(
        "verify grid={} assertions={} failed={} {}",
        args.grid,
        report.total,
        failed,
        if report.passed { "PASS" } else { "FAIL" }
    );
    Ok(report.passed)
}

#[derive(Debug, Serialize)]
struct DistributionRow {
    outcome: String,
    exact_probability: String,
    empirical_frequency: String,
    z_score: String,
}

/// Tabulates Alice's `(l, m)` outcomes: exact probability, sampled frequency
/// and binomial z-score. Fails when any `|z|` exceeds the sampling band.
pub fn cmd_distribution(args: &DistributionArgs) -> HarnessResult<bool> {
    check_shape(args.d, args.n)?;
    let given = args.secret.as_deref().map(|s| parse_secret(s, args.d)).transpose()?;
    register_size(args.d, args.n + 2, args.cap)?;

    let mut rng = trial_rng(args.seed, 0);
    let secret = match given {
        Some(s) => s,
        None => SecretAmplitudes::random(args.d, &mut rng)?,
    };
    let joint = prepare_joint_with_cap(&secret, args.n, args.cap)?;
    let encoded = gates::qft_apply(&gates::xor_apply(&joint, 0, args.n + 1)?, 0)?;
    let exact = outcome_distribution(&encoded, &[0, args.n + 1])?;

    let mut counts = vec![0u64; exact.len()];
    for _ in 0..args.samples {
        let outcome = sample_outcome(&exact, &mut rng).expect("normalized distribution");
        let i = exact.keys().position(|k| *k == outcome).expect("sampled from keys");
        counts[i] += 1;
    }

    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut out = csv::Writer::from_writer(sink);
    let mut passed = true;
    let s = args.samples as f64;
    for ((outcome, &p), &count) in exact.iter().zip(&counts) {
        let (empirical, z) = if args.samples == 0 {
            (String::new(), String::new())
        } else {
            let sigma = (s * p * (1.0 - p)).sqrt();
            let diff = count as f64 - s * p;
            let z = if sigma > 0.0 {
                diff / sigma
            } else if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            passed &= z.abs() <= tol::SAMPLING_SIGMAS;
            (format_decimal(count as f64 / s), format_decimal(z))
        };
        out.serialize(DistributionRow {
            outcome: outcome.iter().map(usize::to_string).collect::<Vec<_>>().join(";"),
            exact_probability: format_decimal(p),
            empirical_frequency: empirical,
            z_score: z,
        })?;
    }
    out.flush()?;
    Ok(passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = parse_grid(DEFAULT_GRID).unwrap();
        assert_eq!(g, Grid { d: 2..=4, n: 1..=3 });
        assert_eq!(g.points().len(), 9);
        assert_eq!(parse_grid("n=2,d=3").unwrap(), Grid { d: 3..=3, n: 2..=2 });
        for bad in
            ["", "d=2..4", "d=2..4,n=x", "d=4..2,n=1", "d=1..3,n=1", "d=2,n=0", "d=2,d=3,n=1", "q=1,n=1"]
        {
            assert!(matches!(parse_grid(bad), Err(HarnessError::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn secret_parsing() {
        let s = parse_secret("1,0,0,0,0,0", 3).unwrap();
        assert_eq!(s, SecretAmplitudes::basis(3, 0).unwrap());
        let s = parse_secret("3, 0, 0, -4", 2).unwrap();
        assert!((s.alphas()[1].im + 0.8).abs() < 1e-15);
        assert!(matches!(parse_secret("1,0,0", 2), Err(HarnessError::Usage(_))));
        assert!(matches!(parse_secret("1,0,a,0", 2), Err(HarnessError::Usage(_))));
        assert!(matches!(parse_secret("0,0,0,0", 2), Err(HarnessError::Usage(_))));
    }

    #[test]
    fn cap_maps_to_cap_exit() {
        let e: HarnessError = QssError::CapExceeded { dim: 2, qudits: 30, cap: 4 }.into();
        assert_eq!(e.exit_code(), EXIT_CAP);
        let e: HarnessError = QssError::InvalidDimension(1).into();
        assert_eq!(e.exit_code(), EXIT_USAGE);
    }

    #[test]
    fn oversized_grid_is_rejected_before_work() {
        let grid = parse_grid("d=2..6,n=1..5").unwrap();
        let err = verify_grid(&grid, DEFAULT_ORACLE_CAP).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_CAP);
        assert!(err.to_string().contains("--oracle-cap"));
    }
}
