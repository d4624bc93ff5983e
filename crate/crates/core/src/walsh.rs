//! Walsh-function sequencing of a colouring.
//!
//! Each colour class follows one non-constant Walsh function over equal time
//! slots. Distinct Walsh functions are orthogonal, so couplings between
//! different colours average to zero; equal colours keep a sign product of
//! +1 and evolve at full strength. Every non-constant row also averages to
//! zero, which refocuses the offsets.

use std::f64::consts::TAU;

use crate::colouring::{Colouring, MAX_COLOURS};
use crate::error::{Error, Result};
use crate::schedule::Schedule;
use crate::time::Time;

/// Walsh function of the given sequency (number of sign changes) on
/// `n_slots` slots, `n_slots` a power of two.
pub fn walsh_function(n_slots: usize, sequency: usize) -> Vec<i8> {
    assert!(n_slots.is_power_of_two() && sequency < n_slots);
    (0..n_slots)
        .map(|h| -> Vec<i8> {
            (0..n_slots)
                .map(|t| if (h & t).count_ones() % 2 == 0 { 1 } else { -1 })
                .collect()
        })
        .find(|row| sign_changes(row) == sequency)
        .expect("each sequency occurs once among Hadamard rows")
}

pub fn sign_changes(row: &[i8]) -> usize {
    row.windows(2).filter(|w| w[0] != w[1]).count()
}

/// π pulses needed to follow `row` from a +1 frame and return to it.
pub fn row_pulse_cost(row: &[i8]) -> usize {
    let lead = usize::from(row.first().is_some_and(|&s| s < 0));
    let tail = usize::from(row.last().is_some_and(|&s| s < 0));
    lead + sign_changes(row) + tail
}

/// Per-qubit sign rows over equal-length slots.
#[derive(Clone, Debug, PartialEq)]
pub struct SignMatrix {
    /// `rows[q][slot]`, entries ±1.
    pub rows: Vec<Vec<i8>>,
    pub slot_durations: Vec<Time>,
    pub time_unit_s: f64,
    /// Walsh sequency assigned to each colour index.
    pub colour_sequency: Vec<usize>,
}

impl SignMatrix {
    pub fn n_slots(&self) -> usize {
        self.slot_durations.len()
    }

    /// Σ_slots duration · a · b for two rows.
    pub fn weighted_product(&self, a: usize, b: usize) -> Time {
        self.slot_durations
            .iter()
            .zip(self.rows[a].iter().zip(&self.rows[b]))
            .map(|(&d, (&x, &y))| if x == y { d } else { -d })
            .sum()
    }

    pub fn row_integral(&self, q: usize) -> Time {
        self.slot_durations
            .iter()
            .zip(&self.rows[q])
            .map(|(&d, &s)| if s > 0 { d } else { -d })
            .sum()
    }

    pub fn pulse_count(&self) -> usize {
        self.rows.iter().map(|r| row_pulse_cost(r)).sum()
    }
}

/// Walsh slot count for a palette: four slots hold three non-constant
/// functions, eight hold seven.
pub fn slots_for_palette(palette: usize) -> usize {
    if palette <= 3 {
        4
    } else {
        8
    }
}

/// Assigns Walsh functions to the colours of `colouring` over `total_time`.
///
/// The most common colours get the cheapest functions: sequencies 1 and 2
/// cost two pulses, 3 and 4 cost four.
pub fn assign_walsh(
    colouring: &Colouring,
    total_time: Time,
    time_unit_s: f64,
) -> Result<SignMatrix> {
    if !total_time.is_positive() {
        return Err(Error::NonPositiveTime);
    }
    if colouring.n_qubits() == 0 {
        return Err(Error::InvalidLattice("colouring has no qubits".into()));
    }
    let palette = colouring.palette as usize;
    if palette > MAX_COLOURS {
        return Err(Error::TooManyColours(palette));
    }
    let n_slots = slots_for_palette(palette);
    let mut colour_sequency = vec![0; palette.max(1)];
    for (rank, (colour, _)) in colouring.multiplicities().into_iter().enumerate() {
        colour_sequency[colour as usize] = rank + 1;
    }
    let functions: Vec<Vec<i8>> = (0..n_slots).map(|k| walsh_function(n_slots, k)).collect();
    let rows = colouring
        .colours
        .iter()
        .map(|&c| functions[colour_sequency[c as usize]].clone())
        .collect();
    let slot = total_time.div_int(n_slots as i128);
    Ok(SignMatrix {
        rows,
        slot_durations: vec![slot; n_slots],
        time_unit_s,
        colour_sequency,
    })
}

/// Pulse wherever a row changes sign, plus the restoring pulse for rows that
/// end at −1.
pub fn emit_schedule(matrix: &SignMatrix, stage: Option<&str>) -> Schedule {
    Schedule::from_signs(
        &matrix.rows,
        &matrix.slot_durations,
        matrix.time_unit_s,
        stage,
    )
}

pub fn pulse_count(schedule: &Schedule) -> usize {
    schedule.pulse_count()
}

/// Embeds a z rotation on each listed qubit by shifting the phase of its
/// second π pulse: a pair `π_φ1` then `π_φ2` acts as a z rotation through
/// `2(φ2 − φ1)`. Timing and pulse count are unchanged.
pub fn embed_z_rotations(
    schedule: &Schedule,
    z_targets: &std::collections::BTreeMap<usize, f64>,
) -> Result<Schedule> {
    let mut out = schedule.clone();
    let counts = schedule.pulses_per_qubit();
    for (&q, &angle) in z_targets {
        if q >= schedule.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                n_qubits: schedule.n_qubits,
            });
        }
        let alpha = angle.rem_euclid(TAU);
        if alpha == 0.0 {
            continue;
        }
        if counts[q] < 2 {
            return Err(Error::CannotEmbedZ {
                qubit: q,
                pulses: counts[q],
            });
        }
        let second = out
            .segments
            .iter_mut()
            .flat_map(|s| s.pulses.iter_mut())
            .filter(|p| p.qubit == q)
            .nth(1)
            .expect("counted at least two pulses");
        second.phase = (second.phase + alpha / 2.0).rem_euclid(TAU);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;
    use std::f64::consts::{FRAC_PI_2, PI};

    use super::*;
    use crate::colouring::colour_single_pattern;
    use crate::lattice::{LatticeSpec, TargetPattern};

    #[test]
    fn four_slot_walsh_functions() {
        assert_eq!(walsh_function(4, 0), vec![1, 1, 1, 1]);
        assert_eq!(walsh_function(4, 1), vec![1, 1, -1, -1]);
        assert_eq!(walsh_function(4, 2), vec![1, -1, -1, 1]);
        assert_eq!(walsh_function(4, 3), vec![1, -1, 1, -1]);
    }

    #[test]
    fn pulse_costs_are_two_two_four_four() {
        let costs: Vec<usize> = (1..5)
            .map(|k| row_pulse_cost(&walsh_function(8, k)))
            .collect();
        assert_eq!(costs, vec![2, 2, 4, 4]);
        let costs: Vec<usize> = (1..4)
            .map(|k| row_pulse_cost(&walsh_function(4, k)))
            .collect();
        assert_eq!(costs, vec![2, 2, 4]);
    }

    #[test]
    fn walsh_rows_orthogonal_by_direct_summation() {
        for n in [4usize, 8] {
            for a in 0..n {
                for b in 0..n {
                    let (wa, wb) = (walsh_function(n, a), walsh_function(n, b));
                    let dot: i32 = wa.iter().zip(&wb).map(|(&x, &y)| (x * y) as i32).sum();
                    assert_eq!(dot, if a == b { n as i32 } else { 0 });
                }
            }
        }
    }

    #[test]
    fn checkerboard_gets_two_distinct_two_pulse_rows() {
        let l = LatticeSpec::uniform(3, 3, 1.0, vec![]).unwrap();
        let c = colour_single_pattern(&l, &TargetPattern::empty())
            .unwrap()
            .feasible()
            .unwrap();
        let m = assign_walsh(&c, Time::ONE, 1.0).unwrap();
        assert_eq!(m.n_slots(), 4);
        assert_ne!(m.rows[0], m.rows[1]);
        assert_eq!(row_pulse_cost(&m.rows[0]), 2);
        assert_eq!(row_pulse_cost(&m.rows[1]), 2);
        assert_eq!(m.weighted_product(0, 1), Time::ZERO);
        assert!((0..9).all(|q| m.row_integral(q).is_zero()));
    }

    #[test]
    fn single_qubit_row_costs_two_pulses() {
        let l = LatticeSpec::uniform(1, 1, 1.0, vec![]).unwrap();
        let c = colour_single_pattern(&l, &TargetPattern::empty())
            .unwrap()
            .feasible()
            .unwrap();
        let s = emit_schedule(&assign_walsh(&c, Time::ONE, 1.0).unwrap(), None);
        assert_eq!(pulse_count(&s), 2);
    }

    #[test]
    fn rejects_bad_inputs() {
        let l = LatticeSpec::uniform(2, 2, 1.0, vec![]).unwrap();
        let c = colour_single_pattern(&l, &TargetPattern::empty())
            .unwrap()
            .feasible()
            .unwrap();
        assert!(matches!(
            assign_walsh(&c, Time::ZERO, 1.0),
            Err(Error::NonPositiveTime)
        ));
    }

    #[test]
    fn z_pi_sets_second_phase_to_half_pi() {
        let l = LatticeSpec::uniform(1, 2, 1.0, vec![]).unwrap();
        let c = colour_single_pattern(&l, &TargetPattern::empty())
            .unwrap()
            .feasible()
            .unwrap();
        let s = emit_schedule(&assign_walsh(&c, Time::ONE, 1.0).unwrap(), None);
        let z = BTreeMap::from([(0usize, PI)]);
        let e = embed_z_rotations(&s, &z).unwrap();
        let phases: Vec<f64> = e
            .segments
            .iter()
            .flat_map(|s| &s.pulses)
            .filter(|p| p.qubit == 0)
            .map(|p| p.phase)
            .collect();
        assert_eq!(phases, vec![0.0, FRAC_PI_2]);
        assert_eq!(e.pulse_count(), s.pulse_count());
        assert_eq!(e.total_time(), s.total_time());
    }

    #[test]
    fn zero_z_targets_leave_schedule_unchanged() {
        let l = LatticeSpec::uniform(2, 2, 1.0, vec![]).unwrap();
        let c = colour_single_pattern(&l, &TargetPattern::empty())
            .unwrap()
            .feasible()
            .unwrap();
        let s = emit_schedule(&assign_walsh(&c, Time::ONE, 1.0).unwrap(), None);
        let z = BTreeMap::from([(0usize, 0.0), (3, TAU)]);
        assert_eq!(embed_z_rotations(&s, &z).unwrap(), s);
    }

    #[test]
    fn z_target_without_pulses_is_an_error() {
        let s = Schedule::empty(1, 1.0);
        let z = BTreeMap::from([(0usize, 1.0)]);
        assert!(matches!(
            embed_z_rotations(&s, &z),
            Err(Error::CannotEmbedZ { .. })
        ));
    }
}
