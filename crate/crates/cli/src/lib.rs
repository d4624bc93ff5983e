//! Command-line plumbing: read lattice and target JSON, compile, verify,
//! write artifacts, and run scaling benchmarks.

use std::fs;
use std::path::{Path, PathBuf};

use echo_compiler::bench::{self, BenchConfig};
use echo_compiler::compile::{compile, CompileOptions, Scheme};
use echo_compiler::error::Error;
use echo_compiler::lattice::{LatticeSpec, TargetPattern};
use echo_compiler::oracle::{self, PatternBasis};
use echo_compiler::schedule::Schedule;
use echo_compiler::verify::{verify_target, VerificationReport};
use echo_compiler::{io, render};
use serde::Serialize;
use serde_json::json;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

/// Largest lattice the oracle runs on without `--long-running`.
pub const ORACLE_DEFAULT_QUBITS: usize = oracle::EXACT_QUBIT_LIMIT;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    Ascii,
    Svg,
}

impl std::str::FromStr for RenderFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ascii" => Ok(RenderFormat::Ascii),
            "svg" => Ok(RenderFormat::Svg),
            other => Err(format!(
                "unknown render format {other:?} (expected ascii or svg)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JobConfig {
    pub lattice: PathBuf,
    pub target: PathBuf,
    /// Verify this schedule instead of compiling one.
    pub schedule: Option<PathBuf>,
    pub scheme: Scheme,
    pub bits: u32,
    pub tolerance: f64,
    pub out: Option<PathBuf>,
    pub render: Option<RenderFormat>,
    pub oracle: bool,
    pub long_running: bool,
    pub allow_angle_wrap: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchJob {
    pub sizes: Vec<(usize, usize)>,
    pub schemes: Vec<Scheme>,
    pub bits: u32,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

/// A failed run: exit code plus a message for the diagnostics record.
#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub exit_code: i32,
    pub category: &'static str,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            exit_code: EXIT_INPUT,
            category: "input",
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        json!({
            "schema_version": io::SCHEMA_VERSION,
            "kind": "error",
            "exit_code": self.exit_code,
            "category": self.category,
            "message": self.message,
        })
        .to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (exit_code, category) = match &e {
            Error::Infeasible(_) | Error::CannotEmbedZ { .. } => (EXIT_INFEASIBLE, "infeasible"),
            Error::LpInfeasible | Error::LpUnbounded | Error::OddParity(_) => {
                (EXIT_VERIFY_FAILED, "internal")
            }
            _ => (EXIT_INPUT, "input"),
        };
        CliError {
            exit_code,
            category,
            message: e.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub kind: &'static str,
    pub exit_code: i32,
    pub passed: bool,
    pub scheme: Option<String>,
    pub total_time_units: String,
    pub total_time_s: f64,
    pub pulse_count: usize,
    pub n_periods: usize,
    pub max_pair_residual_rad: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infeasible_single_pattern: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<serde_json::Value>,
    pub artifacts: Vec<String>,
    #[serde(skip)]
    pub report: Option<VerificationReport>,
    #[serde(skip)]
    pub renderings: Vec<String>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

fn write(
    dir: &Path,
    name: &str,
    contents: &str,
    artifacts: &mut Vec<String>,
) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::input(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
    artifacts.push(path.display().to_string());
    Ok(())
}

pub fn load_inputs(config: &JobConfig) -> Result<(LatticeSpec, TargetPattern), CliError> {
    let lattice = io::lattice_from_json(&read(&config.lattice)?)?;
    let mut target = io::target_from_json(&read(&config.target)?)?;
    if target.needs_wrap() {
        if !config.allow_angle_wrap {
            return Err(CliError::input(
                "target: an angle exceeds 2π; pass --allow-angle-wrap to reduce angles modulo 2π",
            ));
        }
        target = target.wrapped();
    }
    target.validate(&lattice)?;
    Ok((lattice, target))
}

fn pattern_string(mask: u32, n: usize) -> String {
    (0..n)
        .map(|q| {
            if PatternBasis::sign(mask, q) > 0 {
                '+'
            } else {
                '-'
            }
        })
        .collect()
}

fn oracle_record(
    lattice: &LatticeSpec,
    target: &TargetPattern,
    schedule_time: f64,
    long_running: bool,
) -> serde_json::Value {
    let n = lattice.n_qubits();
    let limit = if long_running {
        oracle::DEFAULT_QUBIT_LIMIT
    } else {
        ORACLE_DEFAULT_QUBITS
    };
    if n > limit {
        return json!({
            "status": "skipped",
            "reason": format!("{n} qubits exceeds the oracle limit of {limit}; pass --long-running to allow up to {}", oracle::DEFAULT_QUBIT_LIMIT),
        });
    }
    match oracle::min_time_lp(lattice, target, limit) {
        Ok(lp) => {
            let durations: Vec<_> = lp
                .durations
                .iter()
                .map(|(&m, t)| json!({"pattern": pattern_string(m, n), "units": t.to_string(), "units_f64": t.to_f64()}))
                .collect();
            let ratio = (lp.objective_f64 > 0.0).then(|| schedule_time / lp.objective_f64);
            json!({
                "status": "solved",
                "objective_units": lp.objective.to_string(),
                "objective_f64": lp.objective_f64,
                "exact": lp.exact,
                "pivots": lp.pivots,
                "schedule_to_optimum_ratio": ratio,
                "durations": durations,
            })
        }
        Err(e) => json!({"status": "error", "message": e.to_string()}),
    }
}

/// Compiles (or re-verifies) one job and writes its artifacts.
pub fn run_compile(config: &JobConfig) -> Result<RunSummary, CliError> {
    if config.scheme == Scheme::Binary && config.bits == 0 {
        return Err(CliError::input(
            "--bits must be at least 1 for the binary scheme",
        ));
    }
    if !(config.tolerance.is_finite() && config.tolerance >= 0.0) {
        return Err(CliError::input("--tolerance must be a non-negative number"));
    }
    let (lattice, target) = load_inputs(config)?;

    let (schedule, scheme, colourings, infeasible): (Schedule, Option<Scheme>, _, _) =
        match &config.schedule {
            Some(path) => {
                let s = io::schedule_from_json(&read(path)?)?;
                (s, None, Vec::new(), None)
            }
            None => {
                let c = compile(
                    &lattice,
                    &target,
                    CompileOptions {
                        scheme: config.scheme,
                        bits: config.bits,
                    },
                )?;
                (c.schedule, Some(c.scheme), c.colourings, c.infeasible)
            }
        };

    // The binary scheme only approximates angles; its own error bound sets
    // the acceptance threshold when it is looser than the requested one.
    let tolerance = match scheme {
        Some(Scheme::Binary) => {
            let bound = echo_compiler::timing::plan_binary(
                &lattice,
                &target,
                config.bits,
                &mut echo_compiler::ops::OpCounter::default(),
            )?
            .max_angle_error(&lattice);
            config.tolerance.max(bound * (1.0 + 1e-9))
        }
        _ => config.tolerance,
    };
    let report = verify_target(&schedule, &lattice, &target, tolerance);

    let mut artifacts = Vec::new();
    let mut renderings = Vec::new();
    if let Some(fmt) = config.render {
        for c in &colourings {
            renderings.push(match fmt {
                RenderFormat::Ascii => render::ascii(c),
                RenderFormat::Svg => render::svg(c),
            });
        }
    }
    let oracle = config.oracle.then(|| {
        oracle_record(
            &lattice,
            &target,
            schedule.total_time().to_f64(),
            config.long_running,
        )
    });

    if let Some(dir) = &config.out {
        let scheme_name = scheme.map(|s| s.to_string());
        write(
            dir,
            "schedule.json",
            &io::schedule_to_json(&schedule, scheme_name.as_deref()),
            &mut artifacts,
        )?;
        write(
            dir,
            "report.json",
            &io::report_to_json(&report),
            &mut artifacts,
        )?;
        for (i, c) in colourings.iter().enumerate() {
            write(
                dir,
                &format!("colouring-{i}.json"),
                &io::colouring_to_json(c),
                &mut artifacts,
            )?;
        }
        let ext = match config.render {
            Some(RenderFormat::Ascii) => Some("txt"),
            Some(RenderFormat::Svg) => Some("svg"),
            None => None,
        };
        if let Some(ext) = ext {
            for (i, r) in renderings.iter().enumerate() {
                write(dir, &format!("colouring-{i}.{ext}"), r, &mut artifacts)?;
            }
        }
        if let Some(o) = &oracle {
            let doc = json!({"schema_version": io::SCHEMA_VERSION, "kind": "oracle", "result": o});
            write(
                dir,
                "oracle.json",
                &serde_json::to_string_pretty(&doc).unwrap_or_default(),
                &mut artifacts,
            )?;
        }
    }

    Ok(RunSummary {
        schema_version: io::SCHEMA_VERSION,
        kind: "run-summary",
        exit_code: if report.passed {
            EXIT_PASS
        } else {
            EXIT_VERIFY_FAILED
        },
        passed: report.passed,
        scheme: scheme.map(|s| s.to_string()),
        total_time_units: report.total_time_units.to_string(),
        total_time_s: report.total_time_s,
        pulse_count: report.pulse_count,
        n_periods: report.n_periods,
        max_pair_residual_rad: report.max_pair_residual_rad,
        infeasible_single_pattern: infeasible.map(|r| r.to_string()),
        oracle,
        artifacts,
        report: Some(report),
        renderings,
    })
}

/// Runs the scaling benchmark and writes `benchmark.csv` / `benchmark.json`.
pub fn run_benchmark(job: &BenchJob) -> Result<(Vec<bench::BenchRow>, Vec<String>), CliError> {
    if job.sizes.is_empty() {
        return Err(CliError::input(
            "--benchmark needs at least one lattice size",
        ));
    }
    let rows = bench::run_benchmark(&BenchConfig {
        sizes: job.sizes.clone(),
        schemes: job.schemes.clone(),
        bits: job.bits,
        seed: job.seed,
    })?;
    let mut artifacts = Vec::new();
    if let Some(dir) = &job.out {
        write(dir, "benchmark.csv", &bench::to_csv(&rows), &mut artifacts)?;
        let doc = json!({"schema_version": io::SCHEMA_VERSION, "kind": "benchmark", "rows": rows});
        write(
            dir,
            "benchmark.json",
            &serde_json::to_string_pretty(&doc).unwrap_or_default(),
            &mut artifacts,
        )?;
    }
    Ok((rows, artifacts))
}

/// Caps the global rayon pool at `ECHO_COMPILER_THREADS` when set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("ECHO_COMPILER_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            CliError::input(format!(
                "ECHO_COMPILER_THREADS must be a positive integer, got {value:?}"
            ))
        })?;
    // A second initialisation (e.g. in tests) keeps the existing pool.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}
