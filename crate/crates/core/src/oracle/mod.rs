//! Minimum-time lower bound as a linear program over sign patterns.
//!
//! Every decoupling schedule is a weighted sum of frame-sign vectors
//! `s ∈ {±1}^q`. A pair accumulates `Σ τ_s · s_j s_k`, so the shortest
//! schedule realising a target is `min Σ τ_s` subject to one equality per
//! coupled pair. Flipping every sign leaves all pair products unchanged, so
//! only the `2^(q-1)` vectors with qubit 0 at `+1` are kept.
//!
//! Offsets are not constrained: any LP point becomes a schedule of the same
//! length by running each column for half its weight with `s` and half with
//! `-s`, which cancels every single-qubit integral.

pub mod simplex;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::ToPrimitive;

use crate::compile::compile_two_pattern;
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, Pair, TargetPattern};
use crate::ops::OpCounter;
use crate::schedule::Schedule;
use crate::time::Time;
use crate::timing::required_times;

/// Largest lattice the oracle accepts by default.
pub const DEFAULT_QUBIT_LIMIT: usize = 16;
/// Up to this many qubits the LP is solved in exact rationals.
pub const EXACT_QUBIT_LIMIT: usize = 10;

/// Sign vectors stored as bit masks: bit `q` set means qubit `q` is at −1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternBasis {
    pub n_qubits: usize,
    pub columns: Vec<u32>,
}

impl PatternBasis {
    pub fn new(n_qubits: usize) -> Self {
        assert!((1..=31).contains(&n_qubits));
        let columns = (0..1u32 << (n_qubits - 1)).map(|m| m << 1).collect();
        PatternBasis { n_qubits, columns }
    }

    pub fn sign(column: u32, q: usize) -> i8 {
        if column >> q & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn product(column: u32, pair: Pair) -> i8 {
        Self::sign(column, pair.0) * Self::sign(column, pair.1)
    }

    /// Canonical column index of an arbitrary sign vector.
    pub fn index_of(signs: &[i8]) -> usize {
        let flip = signs[0] < 0;
        signs
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &s)| (s < 0) != flip)
            .fold(0, |acc, (q, _)| acc | 1 << (q - 1))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub n_qubits: usize,
    /// Minimum total time in lattice units. Exact when `exact` is set.
    pub objective: Time,
    pub objective_f64: f64,
    pub exact: bool,
    /// Nonzero column weights, keyed by sign mask.
    pub durations: BTreeMap<u32, Time>,
    pub pivots: usize,
    /// Coupled pairs that carried constraints.
    pub constrained_pairs: Vec<Pair>,
}

impl LpSolution {
    /// A schedule of length `objective` realising the LP point, with offsets
    /// refocused by the `s, -s` split.
    pub fn to_schedule(&self, lattice: &LatticeSpec) -> Schedule {
        let q = self.n_qubits;
        let mut rows = vec![Vec::with_capacity(2 * self.durations.len()); q];
        let mut durations = Vec::with_capacity(2 * self.durations.len());
        for (&mask, &tau) in &self.durations {
            for sign in [1i8, -1] {
                for (qubit, row) in rows.iter_mut().enumerate() {
                    row.push(sign * PatternBasis::sign(mask, qubit));
                }
                durations.push(tau.halve());
            }
        }
        Schedule::from_signs(&rows, &durations, lattice.t_max_s(), Some("lp"))
    }
}

fn to_big(t: Time) -> BigRational {
    BigRational::new(BigInt::from(t.numer()), BigInt::from(t.denom()))
}

fn from_big(r: &BigRational) -> Result<Time> {
    match (r.numer().to_i128(), r.denom().to_i128()) {
        (Some(n), Some(d)) => Ok(Time(Ratio::new(n, d))),
        _ => Err(Error::UnrepresentableTime(r.to_f64().unwrap_or(f64::NAN))),
    }
}

/// Solves the minimum-time LP for `target`. Lattices above `qubit_limit`
/// are refused; the search space doubles with every qubit.
pub fn min_time_lp(
    lattice: &LatticeSpec,
    target: &TargetPattern,
    qubit_limit: usize,
) -> Result<LpSolution> {
    let n = lattice.n_qubits();
    if n > qubit_limit || n > 31 {
        return Err(Error::TooManyQubits {
            n_qubits: n,
            limit: qubit_limit.min(31),
        });
    }
    let required = required_times(lattice, target)?;
    let pairs = lattice.hardware_pairs();
    let rhs: Vec<Time> = pairs
        .iter()
        .map(|p| required.get(p).copied().unwrap_or(Time::ZERO))
        .collect();
    let basis = PatternBasis::new(n);

    let (objective, x, pivots, exact) = if n <= EXACT_QUBIT_LIMIT {
        let a: Vec<Vec<BigRational>> = pairs
            .iter()
            .map(|&p| {
                basis
                    .columns
                    .iter()
                    .map(|&c| BigRational::from_integer(PatternBasis::product(c, p).into()))
                    .collect()
            })
            .collect();
        let b: Vec<BigRational> = rhs.iter().map(|&t| to_big(t)).collect();
        let c = vec![BigRational::from_integer(1.into()); basis.columns.len()];
        let out = simplex::solve(&a, &b, &c)?;
        let x = out.x.iter().map(from_big).collect::<Result<Vec<_>>>()?;
        (from_big(&out.objective)?, x, out.pivots, true)
    } else {
        let a: Vec<Vec<f64>> = pairs
            .iter()
            .map(|&p| {
                basis
                    .columns
                    .iter()
                    .map(|&c| f64::from(PatternBasis::product(c, p)))
                    .collect()
            })
            .collect();
        let b: Vec<f64> = rhs.iter().map(|t| t.to_f64()).collect();
        let c = vec![1.0; basis.columns.len()];
        let out = simplex::solve(&a, &b, &c)?;
        let x = out
            .x
            .iter()
            .map(|&v| Time::from_f64(v.max(0.0)))
            .collect::<Result<Vec<_>>>()?;
        (Time::from_f64(out.objective)?, x, out.pivots, false)
    };

    let durations = basis
        .columns
        .iter()
        .zip(x)
        .filter(|(_, t)| t.is_positive())
        .map(|(&c, t)| (c, t))
        .collect();
    Ok(LpSolution {
        n_qubits: n,
        objective_f64: objective.to_f64(),
        objective,
        exact,
        durations,
        pivots,
        constrained_pairs: pairs,
    })
}

/// Collapses a schedule onto the pattern basis: total time spent in each
/// sign vector (up to a global flip).
pub fn schedule_columns(schedule: &Schedule) -> BTreeMap<u32, Time> {
    let trace = schedule.sign_trace();
    let mut out: BTreeMap<u32, Time> = BTreeMap::new();
    for (d, s) in trace.durations.iter().zip(&trace.signs) {
        if d.is_zero() {
            continue;
        }
        let idx = PatternBasis::index_of(s) as u32;
        *out.entry(idx << 1).or_insert(Time::ZERO) += *d;
    }
    out
}

/// Checks that column weights satisfy every pair constraint exactly.
pub fn is_feasible_point(
    lattice: &LatticeSpec,
    target: &TargetPattern,
    columns: &BTreeMap<u32, Time>,
) -> Result<bool> {
    let required = required_times(lattice, target)?;
    for p in lattice.hardware_pairs() {
        let got: Time = columns
            .iter()
            .map(|(&c, &t)| t.mul_int(PatternBasis::product(c, p).into()))
            .sum();
        if got != required.get(&p).copied().unwrap_or(Time::ZERO) {
            return Ok(false);
        }
    }
    Ok(columns.values().all(|t| !t.is_zero() && t.is_positive()))
}

/// Ratio of the two-pattern schedule length to the LP optimum; `None` when
/// the optimum is zero.
pub fn certify_gap(
    lattice: &LatticeSpec,
    target: &TargetPattern,
    qubit_limit: usize,
) -> Result<Option<f64>> {
    let lp = min_time_lp(lattice, target, qubit_limit)?;
    if lp.objective_f64 <= 0.0 || lp.objective.is_zero() {
        return Ok(None);
    }
    let two = compile_two_pattern(lattice, target, &mut OpCounter::default())?;
    Ok(Some(two.schedule.total_time().to_f64() / lp.objective_f64))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;
    use crate::verify::verify_target;

    fn grid(r: usize, c: usize) -> LatticeSpec {
        LatticeSpec::uniform(r, c, 1.0, vec![]).unwrap()
    }

    #[test]
    fn basis_has_half_the_sign_vectors() {
        let b = PatternBasis::new(3);
        assert_eq!(b.columns, vec![0b000, 0b010, 0b100, 0b110]);
        assert_eq!(PatternBasis::index_of(&[-1, 1, -1]), 0b01);
        assert_eq!(PatternBasis::index_of(&[1, -1, 1]), 0b01);
    }

    // Hand enumeration for a 2×2 square keeping only (2,3): every column adds
    // ±τ to each constraint, so the optimum is at least 1, and the four columns
    // ++++, +-++, ++--, +--- at weight 1/4 reach it.
    #[test]
    fn square_single_coupling_takes_one_unit() {
        let lat = grid(2, 2);
        let target = TargetPattern::uniform([Pair(2, 3)], FRAC_PI_2);
        let lp = min_time_lp(&lat, &target, DEFAULT_QUBIT_LIMIT).unwrap();
        assert!(lp.exact);
        assert_eq!(lp.objective, Time::ONE);

        let mut hand = BTreeMap::new();
        for mask in [0b0000u32, 0b0010, 0b1100, 0b1110] {
            hand.insert(mask, Time::new(1, 4));
        }
        assert!(is_feasible_point(&lat, &target, &hand).unwrap());
    }

    #[test]
    fn empty_target_costs_nothing() {
        let lp = min_time_lp(&grid(2, 3), &TargetPattern::empty(), DEFAULT_QUBIT_LIMIT).unwrap();
        assert_eq!(lp.objective, Time::ZERO);
        assert!(certify_gap(&grid(2, 3), &TargetPattern::empty(), 16)
            .unwrap()
            .is_none());
    }

    #[test]
    fn lp_schedule_verifies_exactly() {
        let lat = LatticeSpec::uniform(2, 3, 1.0, vec![0.3, -1.1, 2.0, 0.5, 0.0, 0.7]).unwrap();
        let target = TargetPattern::uniform([Pair(0, 1), Pair(1, 4)], FRAC_PI_2);
        let lp = min_time_lp(&lat, &target, DEFAULT_QUBIT_LIMIT).unwrap();
        let s = lp.to_schedule(&lat);
        assert_eq!(s.total_time(), lp.objective);
        let report = verify_target(&s, &lat, &target, 1e-12);
        assert!(report.passed && report.exact, "{report:?}");
    }

    #[test]
    fn transposed_lattice_has_same_optimum() {
        let target = TargetPattern::uniform([Pair(0, 1), Pair(4, 5)], FRAC_PI_2);
        let transposed = TargetPattern::uniform([Pair(0, 2), Pair(3, 5)], FRAC_PI_2);
        let a = min_time_lp(&grid(2, 3), &target, 16).unwrap();
        let b = min_time_lp(&grid(3, 2), &transposed, 16).unwrap();
        assert_eq!(a.objective, b.objective);
    }

    #[test]
    fn two_pattern_schedule_is_a_feasible_point() {
        let lat = grid(3, 3);
        let target = TargetPattern::uniform([Pair(0, 1), Pair(1, 4), Pair(4, 5)], FRAC_PI_2);
        let two = compile_two_pattern(&lat, &target, &mut OpCounter::default()).unwrap();
        let cols = schedule_columns(&two.schedule);
        assert!(is_feasible_point(&lat, &target, &cols).unwrap());
        let gap = certify_gap(&lat, &target, 16).unwrap().unwrap();
        assert!(gap >= 1.0);
    }

    #[test]
    fn refuses_large_lattices() {
        assert!(matches!(
            min_time_lp(&grid(5, 5), &TargetPattern::empty(), DEFAULT_QUBIT_LIMIT),
            Err(Error::TooManyQubits { .. })
        ));
    }
}
