//! Effective evolution of a schedule, by sign tracking and by brute force.
//!
//! A π pulse conjugates Z to −Z, so in the toggling frame every diagonal term
//! just picks up the product of its qubits' current signs. The net evolution
//! is then `exp(-i H_eff)` with
//!
//! * pair angle `θ_jk = ω_jk ∫ s_j s_k dt / 2`
//! * z angle `Ω_j ∫ s_j dt`, plus `−2 Σ_m (−1)^m φ_m` over the qubit's pulse
//!   phases in time order.
//!
//! `statevector_check` recomputes the propagator from the lab-frame
//! Hamiltonian and pulse matrices without using any of this algebra.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, Pair, PairKind, Qubit, TargetPattern};
use crate::schedule::{wrap_angle, Schedule};
use crate::time::Time;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairEvolution {
    /// Sign-weighted time integral, in schedule units.
    pub integral: Time,
    /// `None` for diagonal pairs of unspecified strength.
    pub angle: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveEvolution {
    pub pairs: BTreeMap<Pair, PairEvolution>,
    pub offset_integrals: Vec<Time>,
    /// Net z angle per qubit (offset evolution plus pulse-phase rotations),
    /// not wrapped.
    pub z_angles: Vec<f64>,
    /// The pulse-phase part of `z_angles`.
    pub phase_z: Vec<f64>,
    pub frame_parity: Vec<u8>,
    pub total_time: Time,
}

impl EffectiveEvolution {
    pub fn angle(&self, pair: Pair) -> Option<f64> {
        self.pairs.get(&pair).and_then(|p| p.angle)
    }

    pub fn integral(&self, pair: Pair) -> Option<Time> {
        self.pairs.get(&pair).map(|p| p.integral)
    }
}

fn check_compatible(schedule: &Schedule, lattice: &LatticeSpec) -> Result<()> {
    schedule.validate()?;
    if schedule.n_qubits != lattice.n_qubits() {
        return Err(Error::InvalidSchedule(format!(
            "schedule has {} qubits, lattice has {}",
            schedule.n_qubits,
            lattice.n_qubits()
        )));
    }
    Ok(())
}

pub fn effective_evolution(
    schedule: &Schedule,
    lattice: &LatticeSpec,
) -> Result<EffectiveEvolution> {
    check_compatible(schedule, lattice)?;
    let counts = schedule.pulses_per_qubit();
    if let Some(q) = counts.iter().position(|n| n % 2 == 1) {
        return Err(Error::OddParity(q));
    }
    let n = schedule.n_qubits;
    let trace = schedule.sign_trace();

    // Transpose to per-qubit rows so each pair walks two contiguous slices.
    let live: Vec<usize> = (0..trace.durations.len())
        .filter(|&s| !trace.durations[s].is_zero())
        .collect();
    let durations: Vec<Time> = live.iter().map(|&s| trace.durations[s]).collect();
    let rows: Vec<Vec<i8>> = (0..n)
        .map(|q| live.iter().map(|&s| trace.signs[s][q]).collect())
        .collect();

    let integral = |a: &[i8], b: &[i8]| -> Time {
        durations
            .iter()
            .zip(a.iter().zip(b))
            .map(|(&d, (&x, &y))| if x == y { d } else { -d })
            .sum()
    };

    let hardware = lattice.hardware_pairs();
    let pairs: BTreeMap<Pair, PairEvolution> = hardware
        .par_iter()
        .map(|&p| {
            let integral = integral(&rows[p.lo()], &rows[p.hi()]);
            let angle = lattice
                .angle_rate(p, schedule.time_unit_s)
                .map(|rate| rate * integral.to_f64());
            (p, PairEvolution { integral, angle })
        })
        .collect();

    let plus = vec![1i8; durations.len()];
    let offset_integrals: Vec<Time> = rows.iter().map(|r| integral(r, &plus)).collect();

    let mut phase_z = vec![0.0; n];
    let mut seen = vec![0usize; n];
    for p in schedule.segments.iter().flat_map(|s| &s.pulses) {
        let sign_before = if seen[p.qubit].is_multiple_of(2) { 1.0 } else { -1.0 };
        phase_z[p.qubit] -= 2.0 * sign_before * p.phase;
        seen[p.qubit] += 1;
    }
    let z_angles = (0..n)
        .map(|q| {
            let offset = lattice.offsets()[q];
            let from_offset = if offset_integrals[q].is_zero() {
                0.0
            } else {
                offset * schedule.time_unit_s * offset_integrals[q].to_f64()
            };
            from_offset + phase_z[q]
        })
        .collect();

    Ok(EffectiveEvolution {
        pairs,
        offset_integrals,
        z_angles,
        phase_z,
        frame_parity: counts.iter().map(|c| (c % 2) as u8).collect(),
        total_time: schedule.total_time(),
    })
}

pub const STATEVECTOR_QUBIT_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StatevectorCheck {
    pub max_deviation: f64,
    pub passed: bool,
}

/// Dense simulation of `schedule` under the lattice Hamiltonian, compared with
/// `exp(-i H_eff)` assembled from [`effective_evolution`].
///
/// The input state carries pseudo-random phases on every basis state, so a
/// propagator that is not diagonal, or diagonal with the wrong phases, shows
/// up as a deviation. The global phase is fixed by the all-zeros amplitude.
pub fn statevector_check(
    schedule: &Schedule,
    lattice: &LatticeSpec,
    tolerance: f64,
) -> Result<StatevectorCheck> {
    let n = lattice.n_qubits();
    if n > STATEVECTOR_QUBIT_LIMIT {
        return Err(Error::TooManyQubits {
            n_qubits: n,
            limit: STATEVECTOR_QUBIT_LIMIT,
        });
    }
    let effective = effective_evolution(schedule, lattice)?;
    let dim = 1usize << n;
    let z = |b: usize, q: Qubit| if b >> q & 1 == 0 { 1.0 } else { -1.0 };

    // Lab-frame energies, including diagonal pairs whose strength is known.
    let terms: Vec<(Pair, f64)> = lattice
        .hardware_pairs()
        .into_iter()
        .filter_map(|p| lattice.strength(p).map(|w| (p, w)))
        .collect();
    let energy: Vec<f64> = (0..dim)
        .map(|b| {
            let single: f64 = (0..n).map(|q| lattice.offsets()[q] * z(b, q) / 2.0).sum();
            let coupled: f64 = terms
                .iter()
                .map(|(p, w)| w * z(b, p.lo()) * z(b, p.hi()) / 4.0)
                .sum();
            single + coupled
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(0x5e_ed0f_7a5e);
    let norm = 1.0 / (dim as f64).sqrt();
    let input: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::from_polar(norm, rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();

    let mut state = input.clone();
    for seg in &schedule.segments {
        let tau = seg.duration.to_f64() * schedule.time_unit_s;
        if tau != 0.0 {
            state
                .par_iter_mut()
                .enumerate()
                .for_each(|(b, amp)| *amp *= Complex64::from_polar(1.0, -energy[b] * tau));
        }
        for p in &seg.pulses {
            // π about (cos φ, sin φ, 0): [[0, -i e^{-iφ}], [-i e^{iφ}, 0]]
            let up = Complex64::new(0.0, -1.0) * Complex64::from_polar(1.0, -p.phase);
            let down = Complex64::new(0.0, -1.0) * Complex64::from_polar(1.0, p.phase);
            let bit = 1usize << p.qubit;
            for b in (0..dim).filter(|b| b & bit == 0) {
                let (a0, a1) = (state[b], state[b | bit]);
                state[b] = up * a1;
                state[b | bit] = down * a0;
            }
        }
    }

    let target_phase = |b: usize| -> f64 {
        let single: f64 = (0..n).map(|q| effective.z_angles[q] * z(b, q) / 2.0).sum();
        let coupled: f64 = effective
            .pairs
            .iter()
            .filter_map(|(p, e)| e.angle.map(|a| a * z(b, p.lo()) * z(b, p.hi()) / 2.0))
            .sum();
        single + coupled
    };
    let realized: Vec<Complex64> = state.iter().zip(&input).map(|(o, i)| o / i).collect();
    let expected: Vec<Complex64> = (0..dim)
        .map(|b| Complex64::from_polar(1.0, -target_phase(b)))
        .collect();
    let global = realized[0] / expected[0];
    let global = global / global.norm();
    let max_deviation = realized
        .iter()
        .zip(&expected)
        .map(|(r, e)| (r - global * e).norm())
        .fold(0.0, f64::max);
    Ok(StatevectorCheck {
        max_deviation,
        passed: max_deviation <= tolerance,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairResidual {
    pub pair: Pair,
    pub target_rad: f64,
    pub realized_rad: f64,
    pub residual_rad: f64,
    /// Sign-weighted time integral realized, in schedule units.
    pub integral: Time,
    /// Free-evolution time the target asks for, in schedule units.
    pub required: Time,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZResidual {
    pub qubit: Qubit,
    pub target_rad: f64,
    pub realized_rad: f64,
    pub residual_rad: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    /// Every coupling integral equals its required time exactly, all offsets
    /// and diagonal integrals are exactly zero.
    pub exact: bool,
    pub tolerance: f64,
    pub error: Option<String>,
    pub total_time_units: Time,
    pub total_time_s: f64,
    pub pulse_count: usize,
    pub n_periods: usize,
    pub max_pair_residual_rad: f64,
    pub max_z_residual_rad: f64,
    pub offsets_refocused: bool,
    /// `None` when the lattice has no diagonal couplings.
    pub diagonal_suppressed: Option<bool>,
    pub unsuppressed_diagonals: Vec<Pair>,
    pub pairs: Vec<PairResidual>,
    pub z: Vec<ZResidual>,
}

impl VerificationReport {
    pub fn pair(&self, pair: Pair) -> Option<&PairResidual> {
        self.pairs.iter().find(|r| r.pair == pair)
    }
}

pub fn verify_target(
    schedule: &Schedule,
    lattice: &LatticeSpec,
    target: &TargetPattern,
    tolerance: f64,
) -> VerificationReport {
    let mut report = VerificationReport {
        passed: false,
        exact: false,
        tolerance,
        error: None,
        total_time_units: schedule.total_time(),
        total_time_s: schedule.total_time_s(),
        pulse_count: schedule.pulse_count(),
        n_periods: schedule.periods().len(),
        max_pair_residual_rad: 0.0,
        max_z_residual_rad: 0.0,
        offsets_refocused: false,
        diagonal_suppressed: None,
        unsuppressed_diagonals: Vec::new(),
        pairs: Vec::new(),
        z: Vec::new(),
    };
    if let Err(e) = target.validate(lattice) {
        report.error = Some(e.to_string());
        return report;
    }
    let effective = match effective_evolution(schedule, lattice) {
        Ok(e) => e,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };

    let mut exact = true;
    for (&pair, evo) in &effective.pairs {
        if lattice.kind(pair) == PairKind::Diagonal && !lattice.couplings().contains_key(&pair) {
            if !evo.integral.is_zero() {
                report.unsuppressed_diagonals.push(pair);
            }
            continue;
        }
        let target_rad = target.angle(pair);
        let required = if target_rad > 0.0 {
            match lattice.required_time(pair, target_rad) {
                Ok(t) => t,
                Err(e) => {
                    report.error = Some(e.to_string());
                    return report;
                }
            }
        } else {
            Time::ZERO
        };
        // Required times are in units of t_max; rescale for foreign units.
        let scale = schedule.time_unit_s / lattice.t_max_s();
        let required = if scale == 1.0 {
            required
        } else {
            Time::from_f64(required.to_f64() / scale).unwrap_or(required)
        };
        let realized_rad = evo.angle.unwrap_or(0.0);
        let residual_rad = realized_rad - target_rad;
        let pair_exact = evo.integral == required;
        exact &= pair_exact;
        report.max_pair_residual_rad = report.max_pair_residual_rad.max(residual_rad.abs());
        report.pairs.push(PairResidual {
            pair,
            target_rad,
            realized_rad,
            residual_rad,
            integral: evo.integral,
            required,
            exact: pair_exact,
        });
    }

    for q in 0..lattice.n_qubits() {
        let target_rad = target.z_rotations.get(&q).copied().unwrap_or(0.0);
        let realized_rad = effective.z_angles[q];
        let residual_rad = wrap_angle(realized_rad - target_rad);
        report.max_z_residual_rad = report.max_z_residual_rad.max(residual_rad.abs());
        report.z.push(ZResidual {
            qubit: q,
            target_rad,
            realized_rad,
            residual_rad,
        });
    }

    report.offsets_refocused = effective.offset_integrals.iter().all(|t| t.is_zero());
    if lattice.diagonal_couplings_present() {
        report.diagonal_suppressed = Some(report.unsuppressed_diagonals.is_empty());
    }
    report.exact = exact && report.offsets_refocused && report.unsuppressed_diagonals.is_empty();
    report.passed = report.offsets_refocused
        && report.unsuppressed_diagonals.is_empty()
        && report.max_pair_residual_rad <= tolerance
        && report.max_z_residual_rad <= tolerance;
    report
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use super::*;
    use crate::schedule::{Pulse, Segment};

    fn free(n: usize, d: Time) -> Schedule {
        Schedule {
            n_qubits: n,
            time_unit_s: 1.0,
            segments: vec![Segment {
                duration: d,
                pulses: vec![],
                stage: None,
            }],
        }
    }

    #[test]
    fn empty_schedule_is_identity() {
        let l = LatticeSpec::uniform(2, 2, 1.0, vec![0.4; 4]).unwrap();
        let e = effective_evolution(&Schedule::empty(4, l.t_max_s()), &l).unwrap();
        assert!(e
            .pairs
            .values()
            .all(|p| p.integral.is_zero() && p.angle == Some(0.0)));
        assert!(e.z_angles.iter().all(|&z| z == 0.0));
    }

    #[test]
    fn free_evolution_matches_exp_of_h() {
        let l = LatticeSpec::uniform(1, 2, 1.0, vec![0.3, -0.2]).unwrap();
        let s = free(2, Time::new(3, 4));
        let e = effective_evolution(&s, &l).unwrap();
        let expected = 2.0 * PI * 0.75 / 2.0;
        assert!((e.angle(Pair(0, 1)).unwrap() - expected).abs() < 1e-15);
        assert!((e.z_angles[0] - 0.3 * 0.75).abs() < 1e-15);
        let check = statevector_check(&s, &l, 1e-12).unwrap();
        assert!(check.passed, "deviation {}", check.max_deviation);
    }

    #[test]
    fn odd_parity_is_rejected() {
        let l = LatticeSpec::uniform(1, 2, 1.0, vec![]).unwrap();
        let mut s = free(2, Time::ONE);
        s.segments[0].pulses.push(Pulse::not(1));
        assert!(matches!(
            effective_evolution(&s, &l),
            Err(Error::OddParity(1))
        ));
        let report = verify_target(&s, &l, &TargetPattern::empty(), 1e-9);
        assert!(!report.passed);
        assert!(report.error.unwrap().contains("odd"));
    }

    #[test]
    fn phase_pair_rotates_z() {
        // π_0, wait, π_{π/4}: z rotation of 2·π/4 = π/2 on top of nothing.
        let l = LatticeSpec::uniform(1, 1, 1.0, vec![0.0]).unwrap();
        let s = Schedule {
            n_qubits: 1,
            time_unit_s: 1.0,
            segments: vec![
                Segment {
                    duration: Time::ZERO,
                    pulses: vec![Pulse::not(0)],
                    stage: None,
                },
                Segment {
                    duration: Time::ONE,
                    pulses: vec![Pulse {
                        qubit: 0,
                        phase: PI / 4.0,
                    }],
                    stage: None,
                },
            ],
        };
        let e = effective_evolution(&s, &l).unwrap();
        assert!((e.z_angles[0] - FRAC_PI_2).abs() < 1e-15);
        assert!(statevector_check(&s, &l, 1e-12).unwrap().passed);
    }

    #[test]
    fn statevector_rejects_large_lattices() {
        let l = LatticeSpec::uniform(4, 4, 1.0, vec![]).unwrap();
        assert!(matches!(
            statevector_check(&Schedule::empty(16, 1.0), &l, 1e-9),
            Err(Error::TooManyQubits { .. })
        ));
    }

    #[test]
    fn scaling_durations_scales_angles() {
        let l = LatticeSpec::uniform(1, 2, 1.0, vec![]).unwrap();
        let a = effective_evolution(&free(2, Time::new(1, 3)), &l).unwrap();
        let b = effective_evolution(&free(2, Time::new(2, 3)), &l).unwrap();
        assert_eq!(
            b.integral(Pair(0, 1)).unwrap(),
            a.integral(Pair(0, 1)).unwrap().mul_int(2)
        );
    }
}
