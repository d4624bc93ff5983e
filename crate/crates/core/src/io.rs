//! JSON documents for lattices, targets, schedules, colourings and reports.
//!
//! Every document carries `"schema_version": 1` and a `"kind"` tag. Parse
//! errors name the JSON path of the offending field.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::colouring::Colouring;
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, Pair, Qubit, TargetPattern};
use crate::schedule::{Pulse, Schedule, Segment};
use crate::time::Time;
use crate::verify::VerificationReport;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingDoc {
    pub a: Qubit,
    pub b: Qubit,
    pub omega_rad_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDoc {
    pub schema_version: u32,
    #[serde(default)]
    pub kind: Option<String>,
    pub rows: usize,
    pub cols: usize,
    /// Uniform nearest-neighbour coupling `J` in Hz (`ω = 2πJ`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_hz: Option<f64>,
    /// Explicit per-pair strengths; used instead of `coupling_hz`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Vec<CouplingDoc>>,
    #[serde(default)]
    pub offsets_rad_s: Vec<f64>,
    #[serde(default)]
    pub diagonal_couplings_present: bool,
    #[serde(default)]
    pub diagonal_couplings: Vec<CouplingDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetainedDoc {
    pub a: Qubit,
    pub b: Qubit,
    pub angle_rad: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZDoc {
    pub qubit: Qubit,
    pub angle_rad: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetDoc {
    pub schema_version: u32,
    #[serde(default)]
    pub kind: Option<String>,
    pub retained: Vec<RetainedDoc>,
    #[serde(default)]
    pub z_rotations: Vec<ZDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentDoc {
    /// Exact duration in units of `time_unit_s`, as `"n"` or `"n/d"`.
    pub duration_units: Time,
    /// Informational; `duration_units` is authoritative on input.
    #[serde(default)]
    pub duration_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
    pub pulses: Vec<Pulse>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleDoc {
    pub schema_version: u32,
    #[serde(default)]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    pub n_qubits: usize,
    pub time_unit_s: f64,
    #[serde(default)]
    pub total_time_s: f64,
    #[serde(default)]
    pub pulse_count: usize,
    pub segments: Vec<SegmentDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColouringDoc {
    pub schema_version: u32,
    pub kind: String,
    pub rows: usize,
    pub cols: usize,
    pub palette: u8,
    pub n_colours: usize,
    /// Row-major colour index per qubit.
    pub colours: Vec<u8>,
    pub retained_edges: Vec<Pair>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub schema_version: u32,
    pub kind: String,
    #[serde(flatten)]
    pub report: VerificationReport,
}

fn parse<T: DeserializeOwned>(document: &'static str, text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let message = if path == "." || path.is_empty() {
            inner.to_string()
        } else {
            format!("field `{path}`: {inner}")
        };
        Error::Input { document, message }
    })
}

fn check_version(document: &'static str, version: u32) -> Result<()> {
    if version == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(Error::Input {
            document,
            message: format!(
                "field `schema_version`: unsupported version {version}, expected {SCHEMA_VERSION}"
            ),
        })
    }
}

fn pretty<T: Serialize>(doc: &T) -> String {
    // Serialising these plain structs cannot fail.
    serde_json::to_string_pretty(doc).expect("serialisable document")
}

fn input(document: &'static str, e: Error) -> Error {
    match e {
        Error::Input { .. } => e,
        other => Error::Input {
            document,
            message: other.to_string(),
        },
    }
}

pub fn lattice_from_json(text: &str) -> Result<LatticeSpec> {
    let doc: LatticeDoc = parse("lattice", text)?;
    check_version("lattice", doc.schema_version)?;
    let lattice = match (doc.coupling_hz, &doc.couplings) {
        (Some(j), None) => LatticeSpec::uniform(doc.rows, doc.cols, j, doc.offsets_rad_s.clone()),
        (None, Some(list)) => {
            let couplings = list
                .iter()
                .map(|c| (Pair::new(c.a, c.b), c.omega_rad_s))
                .collect();
            LatticeSpec::with_strengths(doc.rows, doc.cols, couplings, doc.offsets_rad_s.clone())
        }
        (Some(_), Some(_)) => {
            return Err(Error::Input {
                document: "lattice",
                message: "fields `coupling_hz` and `couplings` are mutually exclusive".into(),
            })
        }
        (None, None) => {
            return Err(Error::Input {
                document: "lattice",
                message: "missing field `coupling_hz` (or `couplings`)".into(),
            })
        }
    }
    .map_err(|e| input("lattice", e))?;
    if doc.diagonal_couplings_present || !doc.diagonal_couplings.is_empty() {
        let strengths: BTreeMap<Pair, f64> = doc
            .diagonal_couplings
            .iter()
            .map(|c| (Pair::new(c.a, c.b), c.omega_rad_s))
            .collect();
        return lattice
            .with_diagonals(strengths)
            .map_err(|e| input("lattice", e));
    }
    Ok(lattice)
}

pub fn lattice_to_doc(lattice: &LatticeSpec) -> LatticeDoc {
    LatticeDoc {
        schema_version: SCHEMA_VERSION,
        kind: Some("lattice".into()),
        rows: lattice.rows(),
        cols: lattice.cols(),
        coupling_hz: None,
        couplings: Some(
            lattice
                .couplings()
                .iter()
                .map(|(p, &w)| CouplingDoc {
                    a: p.0,
                    b: p.1,
                    omega_rad_s: w,
                })
                .collect(),
        ),
        offsets_rad_s: lattice.offsets().to_vec(),
        diagonal_couplings_present: lattice.diagonal_couplings_present(),
        diagonal_couplings: lattice
            .diagonal_strengths()
            .iter()
            .map(|(p, &w)| CouplingDoc {
                a: p.0,
                b: p.1,
                omega_rad_s: w,
            })
            .collect(),
    }
}

pub fn lattice_to_json(lattice: &LatticeSpec) -> String {
    pretty(&lattice_to_doc(lattice))
}

pub fn target_from_json(text: &str) -> Result<TargetPattern> {
    let doc: TargetDoc = parse("target", text)?;
    check_version("target", doc.schema_version)?;
    let mut target = TargetPattern::empty();
    for (i, r) in doc.retained.iter().enumerate() {
        if r.a == r.b {
            return Err(Error::Input {
                document: "target",
                message: format!("field `retained[{i}]`: a equals b"),
            });
        }
        if target
            .retained
            .insert(Pair::new(r.a, r.b), r.angle_rad)
            .is_some()
        {
            return Err(Error::Input {
                document: "target",
                message: format!(
                    "field `retained[{i}]`: pair {} listed twice",
                    Pair::new(r.a, r.b)
                ),
            });
        }
    }
    for (i, z) in doc.z_rotations.iter().enumerate() {
        if !z.angle_rad.is_finite() {
            return Err(Error::Input {
                document: "target",
                message: format!("field `z_rotations[{i}].angle_rad`: not finite"),
            });
        }
        target.z_rotations.insert(z.qubit, z.angle_rad);
    }
    Ok(target)
}

pub fn target_to_json(target: &TargetPattern) -> String {
    pretty(&TargetDoc {
        schema_version: SCHEMA_VERSION,
        kind: Some("target".into()),
        retained: target
            .retained
            .iter()
            .map(|(p, &a)| RetainedDoc {
                a: p.0,
                b: p.1,
                angle_rad: a,
            })
            .collect(),
        z_rotations: target
            .z_rotations
            .iter()
            .map(|(&q, &a)| ZDoc {
                qubit: q,
                angle_rad: a,
            })
            .collect(),
    })
}

pub fn schedule_to_doc(schedule: &Schedule, scheme: Option<&str>) -> ScheduleDoc {
    ScheduleDoc {
        schema_version: SCHEMA_VERSION,
        kind: Some("schedule".into()),
        scheme: scheme.map(str::to_owned),
        n_qubits: schedule.n_qubits,
        time_unit_s: schedule.time_unit_s,
        total_time_s: schedule.total_time_s(),
        pulse_count: schedule.pulse_count(),
        segments: schedule
            .segments
            .iter()
            .map(|s| SegmentDoc {
                duration_units: s.duration,
                duration_s: s.duration.to_f64() * schedule.time_unit_s,
                stage: s.stage.clone(),
                pulses: s.pulses.clone(),
            })
            .collect(),
    }
}

pub fn schedule_to_json(schedule: &Schedule, scheme: Option<&str>) -> String {
    pretty(&schedule_to_doc(schedule, scheme))
}

pub fn schedule_from_json(text: &str) -> Result<Schedule> {
    let doc: ScheduleDoc = parse("schedule", text)?;
    check_version("schedule", doc.schema_version)?;
    let schedule = Schedule {
        n_qubits: doc.n_qubits,
        time_unit_s: doc.time_unit_s,
        segments: doc
            .segments
            .into_iter()
            .map(|s| Segment {
                duration: s.duration_units,
                pulses: s.pulses,
                stage: s.stage,
            })
            .collect(),
    };
    schedule.validate().map_err(|e| input("schedule", e))?;
    Ok(schedule)
}

pub fn colouring_to_json(colouring: &Colouring) -> String {
    pretty(&ColouringDoc {
        schema_version: SCHEMA_VERSION,
        kind: "colouring".into(),
        rows: colouring.rows,
        cols: colouring.cols,
        palette: colouring.palette,
        n_colours: colouring.n_colours(),
        colours: colouring.colours.clone(),
        retained_edges: colouring.retained_edges().iter().copied().collect(),
    })
}

pub fn report_to_json(report: &VerificationReport) -> String {
    pretty(&ReportDoc {
        schema_version: SCHEMA_VERSION,
        kind: "verification-report".into(),
        report: report.clone(),
    })
}

pub fn report_from_json(text: &str) -> Result<VerificationReport> {
    let doc: ReportDoc = parse("report", text)?;
    check_version("report", doc.schema_version)?;
    Ok(doc.report)
}
