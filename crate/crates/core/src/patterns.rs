//! Building blocks shared by the synthesis schemes: one colouring run through
//! the Walsh sequencer for a given duration.

use std::collections::BTreeSet;

use crate::colouring::{colour_line_pattern, Colouring};
use crate::error::Result;
use crate::lattice::{LatticeSpec, Orientation, Pair};
use crate::schedule::Schedule;
use crate::time::Time;
use crate::walsh::{
    assign_walsh, emit_schedule, row_pulse_cost, slots_for_palette, walsh_function,
};

pub fn colouring_schedule(
    lattice: &LatticeSpec,
    colouring: &Colouring,
    duration: Time,
    label: &str,
) -> Result<Schedule> {
    let matrix = assign_walsh(colouring, duration, lattice.t_max_s())?;
    Ok(emit_schedule(&matrix, Some(label)))
}

/// Row or column pattern retaining `edges` of one orientation for `duration`.
pub fn line_stage_schedule(
    lattice: &LatticeSpec,
    edges: &BTreeSet<Pair>,
    orientation: Orientation,
    duration: Time,
    label: &str,
) -> Result<Schedule> {
    let colouring = colour_line_pattern(lattice, edges, orientation)?;
    colouring_schedule(lattice, &colouring, duration, label)
}

/// Pulses the Walsh sequencer would emit for a colour array over `palette`
/// colours, computed from colour multiplicities alone.
pub fn pulse_count_for_colours(colours: &[u8], palette: usize) -> usize {
    let mut counts = vec![0usize; palette.max(1)];
    for &c in colours {
        counts[c as usize] += 1;
    }
    counts.sort_by(|a, b| b.cmp(a));
    let n_slots = slots_for_palette(palette);
    counts
        .iter()
        .enumerate()
        .map(|(rank, &n)| n * row_pulse_cost(&walsh_function(n_slots, rank + 1)))
        .sum()
}

pub fn line_stage_pulse_count(colours: &[u8]) -> usize {
    pulse_count_for_colours(colours, 4)
}
