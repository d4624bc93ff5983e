//! Reference targets on a 4×4 lattice (qubits numbered row-major).
//!
//! ```text
//!  0  1  2  3
//!  4  5  6  7
//!  8  9 10 11
//! 12 13 14 15
//! ```

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use crate::lattice::{Pair, TargetPattern};

/// Qubit left as an island of its own in [`four_colour_target`].
pub const FOUR_COLOUR_LONE_QUBIT: usize = 13;

/// Complete islands whose adjacency graph is an odd wheel: the 2×2 block
/// {5,6,9,10} touches a ring of five islands ({0..3}, {4,8,12}, {13},
/// {14,15}, {7,11}), so a single pattern needs all four colours.
pub fn four_colour_target() -> TargetPattern {
    let edges = [
        Pair(0, 1),
        Pair(1, 2),
        Pair(2, 3),
        Pair(4, 8),
        Pair(8, 12),
        Pair(5, 6),
        Pair(9, 10),
        Pair(5, 9),
        Pair(6, 10),
        Pair(7, 11),
        Pair(14, 15),
    ];
    TargetPattern::uniform(edges, FRAC_PI_2)
}

/// One island {1,2,5,6,9,10} that omits two of its internal couplings, so no
/// single colouring can reproduce it; the remaining qubits are decoupled.
pub fn missing_coupling_target() -> TargetPattern {
    let edges = [Pair(1, 2), Pair(1, 5), Pair(5, 6), Pair(6, 10), Pair(9, 10)];
    TargetPattern::uniform(edges, FRAC_PI_2)
}

/// Couplings a single colouring of [`missing_coupling_target`] would retain
/// against the target's wishes.
pub fn missing_coupling_offenders() -> Vec<Pair> {
    vec![Pair(2, 6), Pair(5, 9)]
}

/// Single retained coupling in the middle of a 4×4 patch.
pub fn single_coupling_target() -> TargetPattern {
    TargetPattern::uniform([Pair(5, 6)], FRAC_PI_2)
}

/// Retains the coupling between qubits 2 and 3 of a 2×2 square (qubit labels
/// 3 and 4 when counted from one around the square).
pub fn square_single_coupling() -> TargetPattern {
    TargetPattern {
        retained: BTreeMap::from([(Pair(2, 3), FRAC_PI_2)]),
        z_rotations: BTreeMap::new(),
    }
}
