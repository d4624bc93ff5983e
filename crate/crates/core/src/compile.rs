//! Scheme selection: one colouring when the target allows it, the row/column
//! pair otherwise, and the staged schemes when evolution times differ.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::colouring::{
    colour_single_pattern, line_pattern_counted, Colouring, EdgeFlags, InfeasibleReport,
    SinglePattern,
};
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, Orientation, TargetPattern};
use crate::ops::OpCounter;
use crate::patterns::colouring_schedule;
use crate::schedule::Schedule;
use crate::time::Time;
use crate::timing::{plan_binary, plan_nested, required_times};
use crate::walsh::embed_z_rotations;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Auto,
    Single,
    TwoPattern,
    Nested,
    Binary,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Auto => "auto",
            Scheme::Single => "single",
            Scheme::TwoPattern => "two-pattern",
            Scheme::Nested => "nested",
            Scheme::Binary => "binary",
        })
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Scheme::Auto),
            "single" => Ok(Scheme::Single),
            "two-pattern" => Ok(Scheme::TwoPattern),
            "nested" => Ok(Scheme::Nested),
            "binary" => Ok(Scheme::Binary),
            other => Err(format!("unknown scheme {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompileOptions {
    pub scheme: Scheme,
    /// Bit precision for the binary scheme.
    pub bits: u32,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            scheme: Scheme::Auto,
            bits: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Compiled {
    /// Scheme actually used (never `Auto`).
    pub scheme: Scheme,
    pub schedule: Schedule,
    /// The colouring(s) behind single and two-pattern schedules.
    pub colourings: Vec<Colouring>,
    /// Why the single pattern was rejected, when `Auto` fell back.
    pub infeasible: Option<InfeasibleReport>,
    /// Largest angle error of the binary scheme.
    pub max_angle_error: Option<f64>,
}

/// Shared evolution time of all retained edges: `Ok(None)` when they differ,
/// one unit for an empty target.
pub fn uniform_time(lattice: &LatticeSpec, target: &TargetPattern) -> Result<Option<Time>> {
    let times = required_times(lattice, target)?;
    let mut values = times.values().copied();
    let Some(first) = values.next() else {
        return Ok(Some(Time::ONE));
    };
    Ok(values.all(|t| t == first).then_some(first))
}

pub fn compile(
    lattice: &LatticeSpec,
    target: &TargetPattern,
    options: CompileOptions,
) -> Result<Compiled> {
    target.validate(lattice)?;
    let mut compiled = match options.scheme {
        Scheme::Auto => {
            if uniform_time(lattice, target)?.is_some() {
                match colour_single_pattern(lattice, target)? {
                    SinglePattern::Feasible(c) => single_from_colouring(lattice, target, c)?,
                    SinglePattern::Infeasible(report) => {
                        let mut compiled =
                            compile_two_pattern(lattice, target, &mut OpCounter::default())?;
                        compiled.infeasible = Some(report);
                        compiled
                    }
                }
            } else {
                compile_nested(lattice, target)?
            }
        }
        Scheme::Single => compile_single(lattice, target)?,
        Scheme::TwoPattern => compile_two_pattern(lattice, target, &mut OpCounter::default())?,
        Scheme::Nested => compile_nested(lattice, target)?,
        Scheme::Binary => compile_binary(lattice, target, options.bits)?,
    };
    compiled.schedule = embed_z_rotations(&compiled.schedule, &target.z_rotations)?;
    Ok(compiled)
}

/// One colouring for the whole target; fails with the infeasibility report
/// when the target's islands are incomplete.
pub fn compile_single(lattice: &LatticeSpec, target: &TargetPattern) -> Result<Compiled> {
    match colour_single_pattern(lattice, target)? {
        SinglePattern::Feasible(c) => single_from_colouring(lattice, target, c),
        SinglePattern::Infeasible(report) => Err(Error::Infeasible(report)),
    }
}

fn single_from_colouring(
    lattice: &LatticeSpec,
    target: &TargetPattern,
    colouring: Colouring,
) -> Result<Compiled> {
    let duration = uniform_time(lattice, target)?.ok_or(Error::NonUniformTimes)?;
    let schedule = colouring_schedule(lattice, &colouring, duration, "single")?;
    Ok(Compiled {
        scheme: Scheme::Single,
        schedule,
        colourings: vec![colouring],
        infeasible: None,
        max_angle_error: None,
    })
}

/// Row pattern then column pattern, each running for the shared evolution
/// time. Works for any target whose edges share one evolution time.
pub fn compile_two_pattern(
    lattice: &LatticeSpec,
    target: &TargetPattern,
    ops: &mut OpCounter,
) -> Result<Compiled> {
    let duration = uniform_time(lattice, target)?.ok_or(Error::NonUniformTimes)?;
    ops.add(target.retained.len() as u64);
    let flags = EdgeFlags::from_edges(lattice, target.retained.keys().copied());
    let mut schedule = Schedule::empty(lattice.n_qubits(), lattice.t_max_s());
    let mut colourings = Vec::with_capacity(2);
    for (orientation, label) in [
        (Orientation::Horizontal, "row-pattern"),
        (Orientation::Vertical, "column-pattern"),
    ] {
        let colouring = line_pattern_counted(lattice, &flags, orientation, ops);
        let part = colouring_schedule(lattice, &colouring, duration, label)?;
        // Walsh assignment plus one sign comparison per qubit per slot.
        ops.add((lattice.n_qubits() * (1 + part.segments.len())) as u64);
        schedule.append(part)?;
        colourings.push(colouring);
    }
    Ok(Compiled {
        scheme: Scheme::TwoPattern,
        schedule,
        colourings,
        infeasible: None,
        max_angle_error: None,
    })
}

fn compile_nested(lattice: &LatticeSpec, target: &TargetPattern) -> Result<Compiled> {
    let plan = plan_nested(lattice, target, &mut OpCounter::default())?;
    Ok(Compiled {
        scheme: Scheme::Nested,
        schedule: plan.to_schedule(lattice)?,
        colourings: Vec::new(),
        infeasible: None,
        max_angle_error: Some(0.0),
    })
}

fn compile_binary(lattice: &LatticeSpec, target: &TargetPattern, bits: u32) -> Result<Compiled> {
    let plan = plan_binary(lattice, target, bits, &mut OpCounter::default())?;
    Ok(Compiled {
        scheme: Scheme::Binary,
        schedule: plan.to_schedule(lattice)?,
        colourings: Vec::new(),
        infeasible: None,
        max_angle_error: Some(plan.max_angle_error(lattice)),
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;
    use crate::figures;
    use crate::lattice::Pair;

    fn grid(r: usize, c: usize) -> LatticeSpec {
        LatticeSpec::uniform(r, c, 1.0, vec![]).unwrap()
    }

    #[test]
    fn auto_picks_single_for_complete_islands() {
        let c = compile(
            &grid(4, 4),
            &figures::four_colour_target(),
            CompileOptions::default(),
        )
        .unwrap();
        assert_eq!(c.scheme, Scheme::Single);
        assert_eq!(c.schedule.total_time(), Time::ONE);
    }

    #[test]
    fn auto_falls_back_to_two_patterns() {
        let c = compile(
            &grid(4, 4),
            &figures::missing_coupling_target(),
            CompileOptions::default(),
        )
        .unwrap();
        assert_eq!(c.scheme, Scheme::TwoPattern);
        assert_eq!(c.schedule.total_time(), Time::from_integer(2));
        assert!(c.infeasible.is_some());
    }

    #[test]
    fn auto_uses_nested_for_mixed_angles() {
        let mut t = TargetPattern::empty();
        t.retained.insert(Pair(0, 1), FRAC_PI_2);
        t.retained.insert(Pair(1, 2), FRAC_PI_2 / 3.0);
        let c = compile(&grid(2, 3), &t, CompileOptions::default()).unwrap();
        assert_eq!(c.scheme, Scheme::Nested);
    }

    #[test]
    fn explicit_single_reports_infeasibility() {
        let err = compile(
            &grid(4, 4),
            &figures::missing_coupling_target(),
            CompileOptions {
                scheme: Scheme::Single,
                bits: 0,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
    }

    #[test]
    fn two_pattern_needs_uniform_times() {
        let mut t = TargetPattern::empty();
        t.retained.insert(Pair(0, 1), FRAC_PI_2);
        t.retained.insert(Pair(1, 2), 1.0);
        assert!(matches!(
            compile_two_pattern(&grid(1, 3), &t, &mut OpCounter::default()),
            Err(Error::NonUniformTimes)
        ));
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in [
            Scheme::Auto,
            Scheme::Single,
            Scheme::TwoPattern,
            Scheme::Nested,
            Scheme::Binary,
        ] {
            assert_eq!(s.to_string().parse::<Scheme>().unwrap(), s);
        }
        assert!("fast".parse::<Scheme>().is_err());
    }
}
