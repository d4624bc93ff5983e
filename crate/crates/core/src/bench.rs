//! Scaling runs: design-operation counts, pulse counts and wall time per
//! lattice size, plus a log-log fit for the growth exponent.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compile::{compile_two_pattern, Scheme};
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, TargetPattern};
use crate::ops::OpCounter;
use crate::timing::{plan_binary, plan_nested};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub scheme: Scheme,
    pub rows: usize,
    pub cols: usize,
    pub n_qubits: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bits: Option<u32>,
    pub design_ops: u64,
    pub wall_ms: f64,
    pub pulse_count: usize,
    pub total_time_units: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub sizes: Vec<(usize, usize)>,
    pub schemes: Vec<Scheme>,
    pub bits: u32,
    pub seed: u64,
}

/// Each coupling kept with probability 1/2, all at `angle`.
pub fn random_edge_target<R: Rng>(lattice: &LatticeSpec, rng: &mut R, angle: f64) -> TargetPattern {
    TargetPattern::uniform(
        lattice
            .couplings()
            .keys()
            .copied()
            .filter(|_| rng.gen_bool(0.5)),
        angle,
    )
}

/// Every coupling at a uniform random angle in `(0, π]`.
pub fn random_angle_target<R: Rng>(lattice: &LatticeSpec, rng: &mut R) -> TargetPattern {
    let mut t = TargetPattern::empty();
    for &p in lattice.couplings().keys() {
        t.retained.insert(p, PI - rng.gen_range(0.0..PI));
    }
    t
}

/// Nearest-neighbour strengths drawn from `2π · [0.5, 1.5)` Hz.
pub fn random_strength_lattice<R: Rng>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Result<LatticeSpec> {
    let couplings = crate::lattice::nearest_pairs(rows, cols)
        .map(|p| (p, TAU * rng.gen_range(0.5..1.5)))
        .collect();
    LatticeSpec::with_strengths(rows, cols, couplings, vec![])
}

fn case_seed(seed: u64, rows: usize, cols: usize, scheme: Scheme) -> u64 {
    let tag = match scheme {
        Scheme::TwoPattern => 1,
        Scheme::Nested => 2,
        Scheme::Binary => 3,
        _ => 0,
    };
    seed ^ ((rows as u64) << 40) ^ ((cols as u64) << 20) ^ tag
}

/// One benchmark case. Two-pattern uses a random edge subset at π/2, nested
/// uses every coupling at π/2 with random strengths (so all times differ),
/// binary uses random angles on a uniform lattice.
pub fn bench_case(
    scheme: Scheme,
    rows: usize,
    cols: usize,
    bits: u32,
    seed: u64,
) -> Result<BenchRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(case_seed(seed, rows, cols, scheme));
    let mut ops = OpCounter::default();
    let (pulse_count, total, wall_ms, bits_used) = match scheme {
        Scheme::TwoPattern => {
            let lattice = LatticeSpec::uniform(rows, cols, 1.0, vec![])?;
            let target = random_edge_target(&lattice, &mut rng, FRAC_PI_2);
            let start = Instant::now();
            let compiled = compile_two_pattern(&lattice, &target, &mut ops)?;
            let wall = start.elapsed().as_secs_f64() * 1e3;
            (
                compiled.schedule.pulse_count(),
                compiled.schedule.total_time().to_f64(),
                wall,
                None,
            )
        }
        Scheme::Nested => {
            let lattice = random_strength_lattice(rows, cols, &mut rng)?;
            let target = TargetPattern::uniform(lattice.couplings().keys().copied(), FRAC_PI_2);
            let start = Instant::now();
            let plan = plan_nested(&lattice, &target, &mut ops)?;
            let wall = start.elapsed().as_secs_f64() * 1e3;
            (
                plan.pulse_count(&lattice),
                plan.total_time().to_f64(),
                wall,
                None,
            )
        }
        Scheme::Binary => {
            let lattice = LatticeSpec::uniform(rows, cols, 1.0, vec![])?;
            let target = random_angle_target(&lattice, &mut rng);
            let start = Instant::now();
            let plan = plan_binary(&lattice, &target, bits, &mut ops)?;
            let wall = start.elapsed().as_secs_f64() * 1e3;
            (
                plan.pulse_count(&lattice),
                plan.total_time().to_f64(),
                wall,
                Some(bits),
            )
        }
        other => {
            return Err(Error::Input {
                document: "benchmark",
                message: format!(
                    "scheme {other} cannot be benchmarked; use two-pattern, nested or binary"
                ),
            })
        }
    };
    Ok(BenchRow {
        scheme,
        rows,
        cols,
        n_qubits: rows * cols,
        bits: bits_used,
        design_ops: ops.get(),
        wall_ms,
        pulse_count,
        total_time_units: total,
    })
}

/// Runs every (size, scheme) case in parallel. Rows come back ordered by
/// scheme, then size.
pub fn run_benchmark(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    let cases: Vec<(Scheme, (usize, usize))> = config
        .schemes
        .iter()
        .flat_map(|&s| config.sizes.iter().map(move |&size| (s, size)))
        .collect();
    cases
        .par_iter()
        .map(|&(scheme, (r, c))| bench_case(scheme, r, c, config.bits, config.seed))
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_exponent(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out =
        String::from("scheme,rows,cols,q,bits,design_ops,wall_ms,pulse_count,total_time_units\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{:.3},{},{}\n",
            r.scheme,
            r.rows,
            r.cols,
            r.n_qubits,
            r.bits.map(|b| b.to_string()).unwrap_or_default(),
            r.design_ops,
            r.wall_ms,
            r.pulse_count,
            r.total_time_units
        ));
    }
    out
}

/// Parses `"4x4,8x8"` or `"4,8"` (square) into lattice sizes.
pub fn parse_sizes(spec: &str) -> Result<Vec<(usize, usize)>> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let bad = || Error::Input {
                document: "benchmark",
                message: format!("bad lattice size {s:?}"),
            };
            let (r, c) = match s.split_once(['x', 'X']) {
                Some((r, c)) => (
                    r.trim().parse().map_err(|_| bad())?,
                    c.trim().parse().map_err(|_| bad())?,
                ),
                None => {
                    let n = s.parse().map_err(|_| bad())?;
                    (n, n)
                }
            };
            if r == 0 || c == 0 {
                return Err(bad());
            }
            Ok((r, c))
        })
        .collect()
}
