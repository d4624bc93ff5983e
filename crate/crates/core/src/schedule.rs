//! Pulse schedules: free evolutions separated by layers of π pulses.

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::time::Time;

/// A π rotation about the in-plane axis at angle `phase` (0 is a plain NOT).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub qubit: usize,
    #[serde(rename = "phase_rad")]
    pub phase: f64,
}

impl Pulse {
    pub fn not(qubit: usize) -> Self {
        Pulse { qubit, phase: 0.0 }
    }
}

/// Free evolution for `duration`, then the pulse layer.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub duration: Time,
    pub pulses: Vec<Pulse>,
    pub stage: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub n_qubits: usize,
    /// Seconds per unit of `Segment::duration`.
    pub time_unit_s: f64,
    pub segments: Vec<Segment>,
}

/// Frame signs recovered from a schedule: `signs[s][q]` is qubit `q`'s sign
/// during segment `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignTrace {
    pub durations: Vec<Time>,
    pub signs: Vec<Vec<i8>>,
    /// Sign of each qubit after the last pulse layer.
    pub final_signs: Vec<i8>,
}

impl Schedule {
    pub fn empty(n_qubits: usize, time_unit_s: f64) -> Self {
        Schedule {
            n_qubits,
            time_unit_s,
            segments: Vec::new(),
        }
    }

    /// Builds a schedule from per-slot sign rows (`rows[q][slot]`): a pulse
    /// wherever a row changes sign, a leading zero-length segment if any row
    /// starts at −1, and a restoring pulse for rows ending at −1.
    pub fn from_signs(
        rows: &[Vec<i8>],
        durations: &[Time],
        time_unit_s: f64,
        stage: Option<&str>,
    ) -> Self {
        let n_qubits = rows.len();
        let n_slots = durations.len();
        let stage = stage.map(str::to_owned);
        let mut segments = Vec::with_capacity(n_slots + 1);

        let leading: Vec<Pulse> = (0..n_qubits)
            .filter(|&q| n_slots > 0 && rows[q][0] < 0)
            .map(Pulse::not)
            .collect();
        if !leading.is_empty() {
            segments.push(Segment {
                duration: Time::ZERO,
                pulses: leading,
                stage: stage.clone(),
            });
        }
        for s in 0..n_slots {
            let pulses = (0..n_qubits)
                .filter(|&q| {
                    let next = if s + 1 < n_slots { rows[q][s + 1] } else { 1 };
                    rows[q][s] != next
                })
                .map(Pulse::not)
                .collect();
            segments.push(Segment {
                duration: durations[s],
                pulses,
                stage: stage.clone(),
            });
        }
        Schedule {
            n_qubits,
            time_unit_s,
            segments,
        }
    }

    pub fn total_time(&self) -> Time {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn total_time_s(&self) -> f64 {
        self.total_time().to_f64() * self.time_unit_s
    }

    pub fn pulse_count(&self) -> usize {
        self.segments.iter().map(|s| s.pulses.len()).sum()
    }

    pub fn pulses_per_qubit(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_qubits];
        for p in self.segments.iter().flat_map(|s| &s.pulses) {
            counts[p.qubit] += 1;
        }
        counts
    }

    /// Durations of the non-empty free-evolution periods, in order.
    pub fn periods(&self) -> Vec<Time> {
        self.segments
            .iter()
            .map(|s| s.duration)
            .filter(|d| !d.is_zero())
            .collect()
    }

    /// Appends `other`, which must share this schedule's qubit count and unit.
    pub fn append(&mut self, other: Schedule) -> Result<()> {
        if other.n_qubits != self.n_qubits || other.time_unit_s != self.time_unit_s {
            return Err(Error::InvalidSchedule(
                "cannot join schedules with different qubit counts or time units".into(),
            ));
        }
        self.segments.extend(other.segments);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.time_unit_s.is_finite() && self.time_unit_s > 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "time unit must be positive, got {}",
                self.time_unit_s
            )));
        }
        for (i, seg) in self.segments.iter().enumerate() {
            if seg.duration < Time::ZERO {
                return Err(Error::InvalidSchedule(format!(
                    "segment {i} has negative duration"
                )));
            }
            let mut seen = BTreeSet::new();
            for p in &seg.pulses {
                if p.qubit >= self.n_qubits {
                    return Err(Error::QubitOutOfRange {
                        qubit: p.qubit,
                        n_qubits: self.n_qubits,
                    });
                }
                if !p.phase.is_finite() {
                    return Err(Error::InvalidSchedule(format!(
                        "segment {i} has a non-finite pulse phase on qubit {}",
                        p.qubit
                    )));
                }
                if !seen.insert(p.qubit) {
                    return Err(Error::InvalidSchedule(format!(
                        "segment {i} pulses qubit {} twice",
                        p.qubit
                    )));
                }
            }
        }
        Ok(())
    }

    /// First qubit whose pulse count is odd, if any.
    pub fn odd_parity_qubit(&self) -> Option<usize> {
        self.pulses_per_qubit().iter().position(|n| n % 2 == 1)
    }

    pub fn sign_trace(&self) -> SignTrace {
        let mut current = vec![1i8; self.n_qubits];
        let mut durations = Vec::with_capacity(self.segments.len());
        let mut signs = Vec::with_capacity(self.segments.len());
        for seg in &self.segments {
            durations.push(seg.duration);
            signs.push(current.clone());
            for p in &seg.pulses {
                current[p.qubit] = -current[p.qubit];
            }
        }
        SignTrace {
            durations,
            signs,
            final_signs: current,
        }
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > std::f64::consts::PI {
        r - TAU
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_signs_handles_leading_negative_rows() {
        let rows = vec![vec![-1, 1], vec![1, 1]];
        let d = vec![Time::ONE, Time::ONE];
        let s = Schedule::from_signs(&rows, &d, 1.0, None);
        assert_eq!(s.segments.len(), 3);
        assert_eq!(s.segments[0].duration, Time::ZERO);
        assert_eq!(s.pulse_count(), 2);
        assert!(s.odd_parity_qubit().is_none());
        let trace = s.sign_trace();
        assert_eq!(trace.signs[1], vec![-1, 1]);
        assert_eq!(trace.signs[2], vec![1, 1]);
        assert_eq!(trace.final_signs, vec![1, 1]);
    }

    #[test]
    fn validate_catches_duplicates() {
        let mut s = Schedule::empty(2, 1.0);
        s.segments.push(Segment {
            duration: Time::ONE,
            pulses: vec![Pulse::not(0), Pulse::not(0)],
            stage: None,
        });
        assert!(s.validate().is_err());
        s.segments[0].pulses = vec![Pulse::not(5)];
        assert!(s.validate().is_err());
    }

    #[test]
    fn wraps_angles() {
        assert!((wrap_angle(3.0 * std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-12);
        assert!((wrap_angle(-0.5) + 0.5).abs() < 1e-15);
    }
}
