//! Schedules for couplings that need different evolution times.
//!
//! Nested synthesis sorts the required times of each orientation and runs one
//! stage per distinct time: stage `i` lasts `t_i − t_{i−1}` and retains every
//! edge that still needs time. Binary synthesis instead writes each required
//! time as a k-bit fraction of a window and runs one stage per bit.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::colouring::{line_colours, EdgeFlags};
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, Orientation, Pair, TargetPattern};
use crate::ops::OpCounter;
use crate::patterns::{line_stage_pulse_count, line_stage_schedule};
use crate::schedule::Schedule;
use crate::time::Time;

/// Largest binary precision; finer bits would fall below the time grid.
pub const MAX_BITS: u32 = 56;

const ORIENTATIONS: [Orientation; 2] = [Orientation::Horizontal, Orientation::Vertical];

/// Edges of one orientation with their required times, ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct TimedEdgeGroup {
    pub orientation: Orientation,
    pub entries: Vec<(Pair, Time)>,
}

impl TimedEdgeGroup {
    pub fn max_time(&self) -> Time {
        self.entries.last().map_or(Time::ZERO, |e| e.1)
    }
}

/// Required free-evolution time of every retained edge, in lattice units.
pub fn required_times(
    lattice: &LatticeSpec,
    target: &TargetPattern,
) -> Result<BTreeMap<Pair, Time>> {
    target.validate(lattice)?;
    target
        .retained
        .iter()
        .map(|(&p, &a)| Ok((p, lattice.required_time(p, a)?)))
        .collect()
}

fn timed_groups(
    lattice: &LatticeSpec,
    target: &TargetPattern,
    ops: &mut OpCounter,
) -> Result<[TimedEdgeGroup; 2]> {
    let times = required_times(lattice, target)?;
    ops.add(times.len() as u64);
    let mut groups = ORIENTATIONS.map(|orientation| TimedEdgeGroup {
        orientation,
        entries: Vec::new(),
    });
    for (p, t) in times {
        let slot = match lattice.orientation(p) {
            Some(Orientation::Horizontal) => 0,
            Some(Orientation::Vertical) => 1,
            None => return Err(Error::NotCoupled(p)),
        };
        groups[slot].entries.push((p, t));
    }
    for g in &mut groups {
        g.entries.sort_by(|a, b| {
            ops.tick();
            a.1.cmp(&b.1).then(a.0.cmp(&b.0))
        });
    }
    Ok(groups)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NestedStage {
    pub orientation: Orientation,
    pub duration: Time,
    /// The stage retains `entries[start..]` of its orientation's group.
    pub start: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NestedPlan {
    pub groups: [TimedEdgeGroup; 2],
    pub stages: Vec<NestedStage>,
}

impl NestedPlan {
    pub fn total_time(&self) -> Time {
        self.stages.iter().map(|s| s.duration).sum()
    }

    fn group(&self, orientation: Orientation) -> &TimedEdgeGroup {
        &self.groups[if orientation == Orientation::Horizontal {
            0
        } else {
            1
        }]
    }

    pub fn stage_edges(&self, stage: &NestedStage) -> BTreeSet<Pair> {
        self.group(stage.orientation).entries[stage.start..]
            .iter()
            .map(|e| e.0)
            .collect()
    }

    pub fn to_schedule(&self, lattice: &LatticeSpec) -> Result<Schedule> {
        let mut schedule = Schedule::empty(lattice.n_qubits(), lattice.t_max_s());
        for (i, stage) in self.stages.iter().enumerate() {
            let label = format!("nested-{}-{}", orientation_tag(stage.orientation), i);
            let edges = self.stage_edges(stage);
            schedule.append(line_stage_schedule(
                lattice,
                &edges,
                stage.orientation,
                stage.duration,
                &label,
            )?)?;
        }
        Ok(schedule)
    }

    /// Pulse count of the emitted schedule, without materialising it.
    pub fn pulse_count(&self, lattice: &LatticeSpec) -> usize {
        self.stages
            .iter()
            .map(|stage| {
                let flags = EdgeFlags::from_edges(
                    lattice,
                    self.group(stage.orientation).entries[stage.start..]
                        .iter()
                        .map(|e| e.0),
                );
                let colours = line_colours(
                    lattice,
                    &flags,
                    stage.orientation,
                    &mut OpCounter::default(),
                );
                line_stage_pulse_count(&colours)
            })
            .sum()
    }
}

fn orientation_tag(o: Orientation) -> &'static str {
    match o {
        Orientation::Horizontal => "h",
        Orientation::Vertical => "v",
    }
}

/// Sorts each orientation's required times and derives the nested stages.
/// `ops` counts comparisons and per-edge steps.
pub fn plan_nested(
    lattice: &LatticeSpec,
    target: &TargetPattern,
    ops: &mut OpCounter,
) -> Result<NestedPlan> {
    let groups = timed_groups(lattice, target, ops)?;
    let mut stages = Vec::new();
    for g in &groups {
        let mut previous = Time::ZERO;
        for (i, &(_, t)) in g.entries.iter().enumerate() {
            ops.tick();
            if t > previous {
                stages.push(NestedStage {
                    orientation: g.orientation,
                    duration: t - previous,
                    start: i,
                });
                previous = t;
            }
        }
    }
    Ok(NestedPlan { groups, stages })
}

/// Exact schedule for arbitrary per-edge angles. Total time is the longest
/// horizontal time plus the longest vertical time.
pub fn synthesize_nested(lattice: &LatticeSpec, target: &TargetPattern) -> Result<Schedule> {
    plan_nested(lattice, target, &mut OpCounter::default())?.to_schedule(lattice)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryStage {
    pub orientation: Orientation,
    /// Bit position `i` in `1..=k`; the stage lasts `window / 2^i`.
    pub bit: u32,
    pub duration: Time,
    pub edges: Vec<Pair>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinaryTimingPlan {
    pub k: u32,
    /// Power-of-two window (in lattice units) the fractions refer to; one
    /// unit unless some edge needs longer.
    pub window: Time,
    /// Non-empty stages only, horizontal first, most significant bit first.
    pub stages: Vec<BinaryStage>,
    pub required: BTreeMap<Pair, Time>,
    pub realized: BTreeMap<Pair, Time>,
}

impl BinaryTimingPlan {
    pub fn total_time(&self) -> Time {
        self.stages.iter().map(|s| s.duration).sum()
    }

    pub fn to_schedule(&self, lattice: &LatticeSpec) -> Result<Schedule> {
        let mut schedule = Schedule::empty(lattice.n_qubits(), lattice.t_max_s());
        for stage in &self.stages {
            let label = format!(
                "binary-{}-bit{}",
                orientation_tag(stage.orientation),
                stage.bit
            );
            let edges: BTreeSet<Pair> = stage.edges.iter().copied().collect();
            schedule.append(line_stage_schedule(
                lattice,
                &edges,
                stage.orientation,
                stage.duration,
                &label,
            )?)?;
        }
        Ok(schedule)
    }

    pub fn pulse_count(&self, lattice: &LatticeSpec) -> usize {
        self.stages
            .iter()
            .map(|stage| {
                let flags = EdgeFlags::from_edges(lattice, stage.edges.iter().copied());
                let colours = line_colours(
                    lattice,
                    &flags,
                    stage.orientation,
                    &mut OpCounter::default(),
                );
                line_stage_pulse_count(&colours)
            })
            .sum()
    }

    /// Largest `|realized − target|` angle over the retained edges.
    pub fn max_angle_error(&self, lattice: &LatticeSpec) -> f64 {
        self.required
            .iter()
            .map(|(&p, &t)| {
                let rate = lattice.angle_rate(p, lattice.t_max_s()).unwrap_or(0.0);
                (rate * (t - self.realized[&p]).to_f64()).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Angle range `rate · window` of `pair`; truncation errors are below
    /// `range · 2^-k`.
    pub fn angle_range(&self, lattice: &LatticeSpec, pair: Pair) -> f64 {
        lattice.angle_rate(pair, lattice.t_max_s()).unwrap_or(0.0) * self.window.to_f64()
    }
}

/// Truncates each required time to `k` bits of the window.
pub fn plan_binary(
    lattice: &LatticeSpec,
    target: &TargetPattern,
    k: u32,
    ops: &mut OpCounter,
) -> Result<BinaryTimingPlan> {
    if k == 0 || k > MAX_BITS {
        return Err(Error::InvalidPrecision);
    }
    let required = required_times(lattice, target)?;
    let longest = required.values().copied().max().unwrap_or(Time::ZERO);
    let mut window = Time::ONE;
    while window < longest {
        window = window.mul_int(2);
    }

    let full = 1i128 << k;
    let mut realized = BTreeMap::new();
    let mut bits: Vec<Vec<Vec<Pair>>> = vec![vec![Vec::new(); k as usize]; 2];
    for (&p, &t) in &required {
        let scaled = (t.0 / window.0) * full;
        let n = (scaled.numer() / scaled.denom()).min(full - 1);
        realized.insert(p, Time::new(n, full) * window);
        let slot = usize::from(lattice.orientation(p) != Some(Orientation::Horizontal));
        for i in 1..=k {
            ops.tick();
            if n >> (k - i) & 1 == 1 {
                bits[slot][(i - 1) as usize].push(p);
            }
        }
    }

    let mut stages = Vec::new();
    for (slot, orientation) in ORIENTATIONS.into_iter().enumerate() {
        for i in 1..=k {
            ops.tick();
            let edges = std::mem::take(&mut bits[slot][(i - 1) as usize]);
            if !edges.is_empty() {
                stages.push(BinaryStage {
                    orientation,
                    bit: i,
                    duration: window.div_int(1i128 << i),
                    edges,
                });
            }
        }
    }
    Ok(BinaryTimingPlan {
        k,
        window,
        stages,
        required,
        realized,
    })
}

/// k-bit approximation of every angle; returns the schedule and the largest
/// angle error.
pub fn synthesize_binary(
    lattice: &LatticeSpec,
    target: &TargetPattern,
    k: u32,
) -> Result<(Schedule, f64)> {
    let plan = plan_binary(lattice, target, k, &mut OpCounter::default())?;
    Ok((plan.to_schedule(lattice)?, plan.max_angle_error(lattice)))
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
    fn two_edges_nest_into_two_stages() {
        let l = grid(1, 3);
        let mut t = TargetPattern::empty();
        t.retained.insert(Pair(0, 1), FRAC_PI_2 / 2.0);
        t.retained.insert(Pair(1, 2), FRAC_PI_2);
        let plan = plan_nested(&l, &t, &mut OpCounter::default()).unwrap();
        assert_eq!(plan.stages.len(), 2);
        assert_eq!(plan.stages[0].duration, Time::new(1, 2));
        assert_eq!(plan.stages[1].duration, Time::new(1, 2));
        assert_eq!(
            plan.stage_edges(&plan.stages[0]),
            BTreeSet::from([Pair(0, 1), Pair(1, 2)])
        );
        assert_eq!(
            plan.stage_edges(&plan.stages[1]),
            BTreeSet::from([Pair(1, 2)])
        );
        assert_eq!(plan.total_time(), Time::ONE);
        let s = plan.to_schedule(&l).unwrap();
        let report = verify_target(&s, &l, &t, 1e-12);
        assert!(report.passed && report.exact, "{report:?}");
    }

    #[test]
    fn equal_times_give_one_stage_per_orientation() {
        let l = grid(3, 3);
        let t = TargetPattern::uniform(l.couplings().keys().copied(), FRAC_PI_2);
        let plan = plan_nested(&l, &t, &mut OpCounter::default()).unwrap();
        assert_eq!(plan.stages.len(), 2);
        assert_eq!(plan.total_time(), Time::from_integer(2));
    }

    #[test]
    fn nonpositive_angles_rejected() {
        let l = grid(2, 2);
        let t = TargetPattern::uniform([Pair(0, 1)], 0.0);
        assert!(synthesize_nested(&l, &t).is_err());
        assert!(synthesize_binary(&l, &t, 4).is_err());
    }

    #[test]
    fn binary_half_angle_is_exact() {
        let l = grid(2, 2);
        let t = TargetPattern::uniform([Pair(0, 1)], FRAC_PI_2 / 2.0);
        let (s, err) = synthesize_binary(&l, &t, 6).unwrap();
        assert_eq!(err, 0.0);
        assert!(verify_target(&s, &l, &t, 0.0).exact);
    }

    #[test]
    fn binary_rejects_zero_bits() {
        let l = grid(2, 2);
        let t = TargetPattern::uniform([Pair(0, 1)], 1.0);
        assert!(matches!(
            synthesize_binary(&l, &t, 0),
            Err(Error::InvalidPrecision)
        ));
    }

    #[test]
    fn binary_saturates_full_window() {
        let l = grid(1, 2);
        let t = TargetPattern::uniform([Pair(0, 1)], FRAC_PI_2);
        let plan = plan_binary(&l, &t, 3, &mut OpCounter::default()).unwrap();
        assert_eq!(plan.realized[&Pair(0, 1)], Time::new(7, 8));
        assert_eq!(plan.stages.len(), 3);
        assert_eq!(plan.total_time(), Time::new(7, 8));
    }

    #[test]
    fn binary_widens_window_for_long_times() {
        let l = grid(1, 2);
        let t = TargetPattern::uniform([Pair(0, 1)], 3.0 * FRAC_PI_2);
        let plan = plan_binary(&l, &t, 4, &mut OpCounter::default()).unwrap();
        assert_eq!(plan.window, Time::from_integer(4));
        assert_eq!(plan.realized[&Pair(0, 1)], Time::from_integer(3));
    }
}
