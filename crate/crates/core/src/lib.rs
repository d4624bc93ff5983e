//! Compiler from target two-qubit evolutions on a square lattice of
//! always-on ZZ couplings to echo (π-pulse) schedules.

pub mod bench;
pub mod colouring;
pub mod compile;
pub mod error;
pub mod figures;
pub mod io;
pub mod lattice;
pub mod ops;
pub mod oracle;
pub mod patterns;
pub mod render;
pub mod schedule;
pub mod time;
pub mod timing;
pub mod unionfind;
pub mod verify;
pub mod walsh;

pub use compile::{compile, CompileOptions, Compiled, Scheme};
pub use error::{Error, Result};
pub use lattice::{LatticeSpec, Pair, TargetPattern};
pub use schedule::{Pulse, Schedule, Segment};
pub use time::Time;
pub use verify::{verify_target, VerificationReport};
