use thiserror::Error;

use crate::colouring::InfeasibleReport;
use crate::lattice::Pair;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid target: {0}")]
    InvalidTarget(String),

    #[error("pair {0} is not a hardware coupling of this lattice")]
    NotCoupled(Pair),

    #[error("qubit {qubit} out of range for a lattice of {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("colouring uses {0} colours, at most 4 are supported")]
    TooManyColours(usize),

    #[error("total time must be positive")]
    NonPositiveTime,

    #[error("time value {0} cannot be represented on the dyadic time grid")]
    UnrepresentableTime(f64),

    #[error("qubit {qubit} has a z-rotation target but only {pulses} pulse(s) to carry it")]
    CannotEmbedZ { qubit: usize, pulses: usize },

    #[error("qubit {0} receives an odd number of pulses; schedule does not restore the frame")]
    OddParity(usize),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("single colouring pattern is infeasible: {0}")]
    Infeasible(InfeasibleReport),

    #[error("retained couplings need different evolution times; use the nested or binary scheme")]
    NonUniformTimes,

    #[error("binary precision k must be between 1 and 56")]
    InvalidPrecision,

    #[error("{n_qubits} qubits exceeds the limit of {limit}")]
    TooManyQubits { n_qubits: usize, limit: usize },

    #[error("linear program is infeasible")]
    LpInfeasible,

    #[error("linear program is unbounded")]
    LpUnbounded,

    #[error("{document}: {message}")]
    Input {
        document: &'static str,
        message: String,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
