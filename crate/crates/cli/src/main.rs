use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use echo_compiler::bench::parse_sizes;
use echo_compiler::compile::Scheme;
use echo_compiler_cli::{
    configure_threads, run_benchmark, run_compile, BenchJob, CliError, JobConfig, RenderFormat,
    EXIT_INPUT,
};

/// Compile target ZZ evolutions on a coupled qubit lattice into refocusing
/// pulse schedules, verify them, and benchmark the synthesis schemes.
#[derive(Debug, Parser)]
#[command(name = "echo-compiler", version)]
struct Args {
    /// Lattice description (JSON).
    #[arg(long, required_unless_present = "benchmark")]
    lattice: Option<PathBuf>,

    /// Target pattern (JSON).
    #[arg(long, required_unless_present = "benchmark")]
    target: Option<PathBuf>,

    /// Re-verify an existing schedule instead of compiling.
    #[arg(long, conflicts_with = "benchmark")]
    schedule: Option<PathBuf>,

    /// auto, single, two-pattern, nested or binary. With --benchmark, a
    /// comma-separated list (default: two-pattern,nested,binary).
    #[arg(long)]
    scheme: Option<String>,

    /// Bit precision for the binary scheme.
    #[arg(long, default_value_t = 20)]
    bits: u32,

    /// Largest accepted angle residual in radians.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,

    /// Directory for schedule, report, colouring and benchmark artifacts.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Draw the colouring(s): ascii or svg.
    #[arg(long)]
    render: Option<RenderFormat>,

    /// Run a scaling benchmark over lattice sizes, e.g. 4x4,8x8,16x16.
    #[arg(long)]
    benchmark: Option<String>,

    /// Seed for benchmark targets.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Compare against the minimum-time linear program.
    #[arg(long)]
    oracle: bool,

    /// Let the oracle run on lattices up to 16 qubits.
    #[arg(long)]
    long_running: bool,

    /// Reduce target angles above 2π modulo 2π instead of rejecting them.
    #[arg(long)]
    allow_angle_wrap: bool,
}

fn run(args: Args) -> Result<i32, CliError> {
    configure_threads()?;
    let input = |m: String| CliError {
        exit_code: EXIT_INPUT,
        category: "input",
        message: m,
    };

    if let Some(sizes) = &args.benchmark {
        let schemes = match &args.scheme {
            None => vec![Scheme::TwoPattern, Scheme::Nested, Scheme::Binary],
            Some(list) => list
                .split(',')
                .map(|s| s.trim().parse::<Scheme>())
                .collect::<Result<_, _>>()
                .map_err(input)?,
        };
        let job = BenchJob {
            sizes: parse_sizes(sizes)?,
            schemes,
            bits: args.bits,
            seed: args.seed,
            out: args.out,
        };
        let (rows, _) = run_benchmark(&job)?;
        print!("{}", echo_compiler::bench::to_csv(&rows));
        return Ok(0);
    }

    let scheme = match &args.scheme {
        Some(s) => s.parse().map_err(input)?,
        None => Scheme::Auto,
    };
    let config = JobConfig {
        lattice: args.lattice.expect("required by clap"),
        target: args.target.expect("required by clap"),
        schedule: args.schedule,
        scheme,
        bits: args.bits,
        tolerance: args.tolerance,
        out: args.out,
        render: args.render,
        oracle: args.oracle,
        long_running: args.long_running,
        allow_angle_wrap: args.allow_angle_wrap,
    };
    let summary = run_compile(&config)?;
    for r in &summary.renderings {
        eprintln!("{r}");
    }
    println!("{}", serde_json::to_string(&summary).unwrap_or_default());
    Ok(summary.exit_code)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code as u8)
        }
    }
}
