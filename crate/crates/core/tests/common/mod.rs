//! Test-side reference computations, written without the library's
//! verifier so the two can be checked against each other.

#![allow(dead_code)]

use std::collections::BTreeMap;

use echo_compiler::lattice::{LatticeSpec, Pair};
use echo_compiler::schedule::Schedule;
use echo_compiler::time::Time;

/// Sign-weighted time integrals by direct walk over the segments: every
/// qubit starts at +1 and flips on each pulse at the end of its segment.
pub struct Integrals {
    pub pairs: BTreeMap<Pair, Time>,
    pub offsets: Vec<Time>,
    pub final_signs: Vec<i8>,
}

pub fn integrals(schedule: &Schedule, pairs: &[Pair]) -> Integrals {
    let n = schedule.n_qubits;
    let mut sign = vec![1i128; n];
    let mut pair_acc: BTreeMap<Pair, Time> = pairs.iter().map(|&p| (p, Time::ZERO)).collect();
    let mut offsets = vec![Time::ZERO; n];
    for seg in &schedule.segments {
        for (p, acc) in pair_acc.iter_mut() {
            *acc += seg.duration.mul_int(sign[p.0] * sign[p.1]);
        }
        for (q, acc) in offsets.iter_mut().enumerate() {
            *acc += seg.duration.mul_int(sign[q]);
        }
        for pulse in &seg.pulses {
            sign[pulse.qubit] = -sign[pulse.qubit];
        }
    }
    Integrals {
        pairs: pair_acc,
        offsets,
        final_signs: sign.iter().map(|&s| s as i8).collect(),
    }
}

/// Every nearest-neighbour pair of the grid, plus the diagonal pairs when
/// the lattice has diagonal couplings.
pub fn all_local_pairs(lattice: &LatticeSpec) -> Vec<Pair> {
    let mut out: Vec<Pair> =
        echo_compiler::lattice::nearest_pairs(lattice.rows(), lattice.cols()).collect();
    if lattice.diagonal_couplings_present() {
        out.extend(lattice.diagonal_pairs());
    }
    out
}

/// Required integral, in lattice units, for a coupling at `angle`:
/// `θ = ω ∫ s s dt / 2` with one unit `= π / ω_min`.
pub fn required_units(lattice: &LatticeSpec, pair: Pair, angle: f64) -> f64 {
    let w = lattice.strength(pair).unwrap();
    let w_min = lattice
        .couplings()
        .values()
        .copied()
        .fold(f64::INFINITY, f64::min);
    2.0 * angle / w / (std::f64::consts::PI / w_min)
}
