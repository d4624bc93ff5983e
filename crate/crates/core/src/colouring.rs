//! Colourings that decide which couplings survive a refocusing pattern.
//!
//! Every qubit gets a colour, every colour gets its own Walsh pulse pattern,
//! and a coupled pair keeps evolving exactly when both ends share a colour.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{islands, LatticeSpec, Orientation, Pair, PairKind, Qubit, TargetPattern};
use crate::ops::OpCounter;

pub const MAX_COLOURS: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Colouring {
    pub rows: usize,
    pub cols: usize,
    /// Colour index per qubit, row-major.
    pub colours: Vec<u8>,
    /// Number of colour classes the scheme reserves. Decides the Walsh slot
    /// count even when some classes end up empty.
    pub palette: u8,
    #[serde(skip)]
    retained_edges: BTreeSet<Pair>,
}

impl Colouring {
    pub fn new(lattice: &LatticeSpec, colours: Vec<u8>, palette: u8) -> Result<Self> {
        if colours.len() != lattice.n_qubits() {
            return Err(Error::InvalidLattice(format!(
                "colouring has {} entries for {} qubits",
                colours.len(),
                lattice.n_qubits()
            )));
        }
        let used = colours.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let palette = palette.max(used as u8);
        if palette as usize > MAX_COLOURS {
            return Err(Error::TooManyColours(palette as usize));
        }
        let retained_edges = lattice
            .hardware_pairs()
            .into_iter()
            .filter(|p| colours[p.lo()] == colours[p.hi()])
            .collect();
        Ok(Colouring {
            rows: lattice.rows(),
            cols: lattice.cols(),
            colours,
            palette,
            retained_edges,
        })
    }

    pub fn colour(&self, q: Qubit) -> u8 {
        self.colours[q]
    }

    pub fn n_qubits(&self) -> usize {
        self.colours.len()
    }

    /// Hardware pairs whose endpoints share a colour.
    pub fn retained_edges(&self) -> &BTreeSet<Pair> {
        &self.retained_edges
    }

    /// Number of distinct colours actually used.
    pub fn n_colours(&self) -> usize {
        self.multiplicities()
            .iter()
            .filter(|&&(_, n)| n > 0)
            .count()
    }

    /// `(colour, count)` for every palette colour, most common first, ties by
    /// colour index.
    pub fn multiplicities(&self) -> Vec<(u8, usize)> {
        let mut counts = vec![0usize; (self.palette as usize).max(1)];
        for &c in &self.colours {
            counts[c as usize] += 1;
        }
        let mut out: Vec<(u8, usize)> = counts
            .into_iter()
            .enumerate()
            .map(|(c, n)| (c as u8, n))
            .collect();
        out.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        out
    }
}

/// Why no single colouring reproduces a target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfeasibleReport {
    /// Hardware pairs inside one island that the target does not retain; any
    /// island-constant colouring would retain them too.
    pub offending_edges: Vec<Pair>,
    /// Set when the islands are complete but greedy colouring of the island
    /// graph needed more than four colours.
    pub colours_needed: Option<usize>,
}

impl fmt::Display for InfeasibleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.offending_edges.is_empty() {
            let list: Vec<String> = self.offending_edges.iter().map(Pair::to_string).collect();
            write!(
                f,
                "unwanted couplings inside retained islands: {}",
                list.join(", ")
            )
        } else {
            write!(
                f,
                "island graph needed {} colours with greedy colouring",
                self.colours_needed.unwrap_or(0)
            )
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SinglePattern {
    Feasible(Colouring),
    Infeasible(InfeasibleReport),
}

impl SinglePattern {
    pub fn feasible(self) -> Option<Colouring> {
        match self {
            SinglePattern::Feasible(c) => Some(c),
            SinglePattern::Infeasible(_) => None,
        }
    }
}

/// Colours each retained-coupling island with one colour so that a single
/// Walsh pattern reproduces the target.
///
/// Islands are coloured greedily, largest first. Islands with couplings take
/// the first free colour starting from 2; lone qubits prefer their
/// checkerboard colour `(row + col) % 2`. On an empty target this yields the
/// plain two-colour checkerboard, and a single retained pair sits on a third
/// colour of its own.
pub fn colour_single_pattern(
    lattice: &LatticeSpec,
    target: &TargetPattern,
) -> Result<SinglePattern> {
    let decomposition = islands(lattice, target)?;
    let retained = target.edges();

    let offending_edges: Vec<Pair> = lattice
        .hardware_pairs()
        .into_iter()
        .filter(|p| {
            decomposition.island_of[p.lo()] == decomposition.island_of[p.hi()]
                && !retained.contains(p)
        })
        .collect();
    if !offending_edges.is_empty() {
        return Ok(SinglePattern::Infeasible(InfeasibleReport {
            offending_edges,
            colours_needed: None,
        }));
    }

    let n_islands = decomposition.islands.len();
    let mut order: Vec<usize> = (0..n_islands).collect();
    order.sort_by(|&a, &b| {
        decomposition.islands[b]
            .len()
            .cmp(&decomposition.islands[a].len())
            .then(a.cmp(&b))
    });

    let mut neighbours = vec![Vec::new(); n_islands];
    for &(a, b) in &decomposition.adjacency {
        neighbours[a].push(b);
        neighbours[b].push(a);
    }

    let mut island_colour: Vec<Option<usize>> = vec![None; n_islands];
    let mut max_colour = 0;
    for &island in &order {
        let members = &decomposition.islands[island];
        let taken: BTreeSet<usize> = neighbours[island]
            .iter()
            .filter_map(|&n| island_colour[n])
            .collect();
        let preference: Vec<usize> = if members.len() == 1 {
            let (r, c) = lattice.position(members[0]);
            let home = (r + c) % 2;
            vec![home, 1 - home, 2, 3]
        } else {
            vec![2, 3, 0, 1]
        };
        let chosen = preference
            .into_iter()
            .chain(MAX_COLOURS..)
            .find(|c| !taken.contains(c))
            .expect("unbounded colour supply");
        max_colour = max_colour.max(chosen + 1);
        island_colour[island] = Some(chosen);
    }

    if max_colour > MAX_COLOURS {
        return Ok(SinglePattern::Infeasible(InfeasibleReport {
            offending_edges: Vec::new(),
            colours_needed: Some(max_colour),
        }));
    }

    // Compact colour indices to 0..n in order of first use so the palette
    // matches the number of colours.
    let mut remap = [usize::MAX; MAX_COLOURS];
    let mut next = 0;
    let mut colours = vec![0u8; lattice.n_qubits()];
    for q in 0..lattice.n_qubits() {
        let c = island_colour[decomposition.island_of[q]].expect("every island coloured");
        if remap[c] == usize::MAX {
            remap[c] = next;
            next += 1;
        }
        colours[q] = remap[c] as u8;
    }
    let palette = (next as u8).max(2);
    let colouring = Colouring::new(lattice, colours, palette)?;
    debug_assert_eq!(colouring.retained_edges(), &retained);
    Ok(SinglePattern::Feasible(colouring))
}

/// Per-qubit flags marking the horizontal edge to the right and the vertical
/// edge below each qubit. Constant-time membership for the line patterns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeFlags {
    right: Vec<bool>,
    down: Vec<bool>,
}

impl EdgeFlags {
    /// Non-nearest-neighbour pairs are ignored.
    pub fn from_edges<I: IntoIterator<Item = Pair>>(lattice: &LatticeSpec, edges: I) -> Self {
        let n = lattice.n_qubits();
        let mut flags = EdgeFlags {
            right: vec![false; n],
            down: vec![false; n],
        };
        for p in edges {
            match lattice.kind(p) {
                PairKind::Horizontal => flags.right[p.lo()] = true,
                PairKind::Vertical => flags.down[p.lo()] = true,
                _ => {}
            }
        }
        flags
    }
}

/// One pattern of the row/column scheme: retains exactly the edges of
/// `edges` with the given orientation and refocuses everything else.
///
/// Lines (rows for horizontal, columns for vertical) alternate between the
/// colour pairs {2,3} (even index) and {0,1} (odd index). Along a line the
/// first qubit takes the pair's first colour and each following qubit repeats
/// its predecessor's colour iff the edge between them is in `edges`.
pub fn colour_line_pattern(
    lattice: &LatticeSpec,
    edges: &BTreeSet<Pair>,
    orientation: Orientation,
) -> Result<Colouring> {
    let flags = EdgeFlags::from_edges(lattice, edges.iter().copied());
    Ok(line_pattern_counted(
        lattice,
        &flags,
        orientation,
        &mut OpCounter::default(),
    ))
}

pub(crate) fn line_pattern_counted(
    lattice: &LatticeSpec,
    flags: &EdgeFlags,
    orientation: Orientation,
    ops: &mut OpCounter,
) -> Colouring {
    let colours = line_colours(lattice, flags, orientation, ops);
    Colouring::new(lattice, colours, MAX_COLOURS as u8).expect("line patterns use four colours")
}

/// Colour array of a line pattern.
pub(crate) fn line_colours(
    lattice: &LatticeSpec,
    flags: &EdgeFlags,
    orientation: Orientation,
    ops: &mut OpCounter,
) -> Vec<u8> {
    let (lines, len, step, stride, joined) = match orientation {
        Orientation::Horizontal => (
            lattice.rows(),
            lattice.cols(),
            1,
            lattice.cols(),
            &flags.right,
        ),
        Orientation::Vertical => (
            lattice.cols(),
            lattice.rows(),
            lattice.cols(),
            1,
            &flags.down,
        ),
    };
    let mut colours = vec![0u8; lattice.n_qubits()];
    for line in 0..lines {
        let base: u8 = if line % 2 == 1 { 0 } else { 2 };
        let mut current = base;
        let mut q = line * stride;
        colours[q] = current;
        ops.tick();
        for _ in 1..len {
            ops.tick();
            if !joined[q] {
                current = base + (1 - (current - base));
            }
            q += step;
            colours[q] = current;
        }
    }
    colours
}

/// Row pattern and column pattern that together retain exactly `edges`.
pub fn colour_two_patterns(
    lattice: &LatticeSpec,
    edges: &BTreeSet<Pair>,
) -> Result<(Colouring, Colouring)> {
    for &p in edges {
        lattice.check_qubit(p.hi())?;
        if !lattice.couplings().contains_key(&p) {
            return Err(Error::NotCoupled(p));
        }
    }
    Ok((
        colour_line_pattern(lattice, edges, Orientation::Horizontal)?,
        colour_line_pattern(lattice, edges, Orientation::Vertical)?,
    ))
}

/// True iff no two diagonally adjacent qubits share a colour.
pub fn diagonal_distinctness(lattice: &LatticeSpec, colouring: &Colouring) -> bool {
    lattice
        .diagonal_pairs()
        .into_iter()
        .all(|p| colouring.colour(p.lo()) != colouring.colour(p.hi()))
}

/// Edges of `edges` lying along `orientation`.
pub fn edges_with_orientation(
    lattice: &LatticeSpec,
    edges: &BTreeSet<Pair>,
    orientation: Orientation,
) -> BTreeSet<Pair> {
    let kind = match orientation {
        Orientation::Horizontal => PairKind::Horizontal,
        Orientation::Vertical => PairKind::Vertical,
    };
    edges
        .iter()
        .copied()
        .filter(|&p| lattice.kind(p) == kind)
        .collect()
}
