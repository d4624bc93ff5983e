//! Qubit lattices with an always-on diagonal Hamiltonian
//!
//! `H/ħ = Σ_j Ω_j Z_j / 2 + Σ_{j<k} ω_jk Z_j Z_k / 4`
//!
//! Qubits live on a `rows × cols` grid, indexed row-major. Nearest-neighbour
//! couplings carry explicit strengths; next-nearest (diagonal) couplings are a
//! presence flag with optional strengths.
//!
//! Angles follow the `exp(-i θ Z_j Z_k / 2)` convention, so a coupling of
//! strength `ω = 2πJ` left on for `T = 1/2J` evolves through `θ = π/2`.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::time::Time;
use crate::unionfind::UnionFind;

pub type Qubit = usize;

/// Unordered qubit pair, stored with the smaller index first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pair(pub Qubit, pub Qubit);

impl Pair {
    pub fn new(a: Qubit, b: Qubit) -> Self {
        if a <= b {
            Pair(a, b)
        } else {
            Pair(b, a)
        }
    }

    pub fn lo(self) -> Qubit {
        self.0
    }

    pub fn hi(self) -> Qubit {
        self.1
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    Horizontal,
    Vertical,
    Diagonal,
    Other,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSpec {
    rows: usize,
    cols: usize,
    couplings: BTreeMap<Pair, f64>,
    offsets: Vec<f64>,
    diagonal_couplings_present: bool,
    diagonal_strengths: BTreeMap<Pair, f64>,
}

impl LatticeSpec {
    /// Grid with every horizontal and vertical neighbour coupled at `ω = 2πJ`.
    pub fn uniform(rows: usize, cols: usize, j_hz: f64, offsets: Vec<f64>) -> Result<Self> {
        if !(j_hz.is_finite() && j_hz > 0.0) {
            return Err(Error::InvalidLattice(format!(
                "coupling J must be positive and finite, got {j_hz}"
            )));
        }
        check_dims(rows, cols)?;
        let omega = TAU * j_hz;
        let couplings = nearest_pairs(rows, cols).map(|p| (p, omega)).collect();
        Self::with_strengths(rows, cols, couplings, offsets)
    }

    /// Grid with per-pair strengths in rad/s. Pairs not listed are uncoupled.
    pub fn with_strengths(
        rows: usize,
        cols: usize,
        couplings: BTreeMap<Pair, f64>,
        offsets: Vec<f64>,
    ) -> Result<Self> {
        check_dims(rows, cols)?;
        let n = rows * cols;
        let offsets = if offsets.is_empty() {
            vec![0.0; n]
        } else {
            offsets
        };
        if offsets.len() != n {
            return Err(Error::InvalidLattice(format!(
                "offsets has {} entries, expected {n}",
                offsets.len()
            )));
        }
        if let Some((j, w)) = offsets.iter().enumerate().find(|(_, w)| !w.is_finite()) {
            return Err(Error::InvalidLattice(format!(
                "offset of qubit {j} is not finite ({w})"
            )));
        }
        let lattice = LatticeSpec {
            rows,
            cols,
            couplings: BTreeMap::new(),
            offsets,
            diagonal_couplings_present: false,
            diagonal_strengths: BTreeMap::new(),
        };
        for (&pair, &omega) in &couplings {
            lattice.check_pair_in_range(pair)?;
            if lattice.kind(pair) != PairKind::Horizontal
                && lattice.kind(pair) != PairKind::Vertical
            {
                return Err(Error::InvalidLattice(format!(
                    "coupling {pair} is not between nearest neighbours"
                )));
            }
            if !(omega.is_finite() && omega > 0.0) {
                return Err(Error::InvalidLattice(format!(
                    "coupling {pair} must have positive finite strength, got {omega}"
                )));
            }
        }
        Ok(LatticeSpec {
            couplings,
            ..lattice
        })
    }

    /// Marks next-nearest (diagonal) couplings as present. Strengths are
    /// optional; listed pairs must be diagonal neighbours.
    pub fn with_diagonals(mut self, strengths: BTreeMap<Pair, f64>) -> Result<Self> {
        for (&pair, &omega) in &strengths {
            self.check_pair_in_range(pair)?;
            if self.kind(pair) != PairKind::Diagonal {
                return Err(Error::InvalidLattice(format!(
                    "{pair} is not a diagonal pair"
                )));
            }
            if !omega.is_finite() {
                return Err(Error::InvalidLattice(format!(
                    "diagonal coupling {pair} is not finite ({omega})"
                )));
            }
        }
        self.diagonal_couplings_present = true;
        self.diagonal_strengths = strengths;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n_qubits(&self) -> usize {
        self.rows * self.cols
    }

    pub fn qubit(&self, row: usize, col: usize) -> Qubit {
        row * self.cols + col
    }

    pub fn position(&self, q: Qubit) -> (usize, usize) {
        (q / self.cols, q % self.cols)
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn couplings(&self) -> &BTreeMap<Pair, f64> {
        &self.couplings
    }

    pub fn diagonal_couplings_present(&self) -> bool {
        self.diagonal_couplings_present
    }

    pub fn diagonal_strengths(&self) -> &BTreeMap<Pair, f64> {
        &self.diagonal_strengths
    }

    pub fn kind(&self, pair: Pair) -> PairKind {
        let (ra, ca) = self.position(pair.lo());
        let (rb, cb) = self.position(pair.hi());
        match (ra.abs_diff(rb), ca.abs_diff(cb)) {
            (0, 1) => PairKind::Horizontal,
            (1, 0) => PairKind::Vertical,
            (1, 1) => PairKind::Diagonal,
            _ => PairKind::Other,
        }
    }

    pub fn orientation(&self, pair: Pair) -> Option<Orientation> {
        match self.kind(pair) {
            PairKind::Horizontal => Some(Orientation::Horizontal),
            PairKind::Vertical => Some(Orientation::Vertical),
            _ => None,
        }
    }

    /// Every geometric diagonal pair of the grid, whether or not it is coupled.
    pub fn diagonal_pairs(&self) -> Vec<Pair> {
        let mut out = Vec::new();
        for r in 0..self.rows.saturating_sub(1) {
            for c in 0..self.cols {
                let q = self.qubit(r, c);
                if c + 1 < self.cols {
                    out.push(Pair::new(q, self.qubit(r + 1, c + 1)));
                }
                if c > 0 {
                    out.push(Pair::new(q, self.qubit(r + 1, c - 1)));
                }
            }
        }
        out.sort();
        out
    }

    /// Nearest-neighbour couplings plus diagonal pairs when flagged present.
    pub fn hardware_pairs(&self) -> Vec<Pair> {
        let mut out: Vec<Pair> = self.couplings.keys().copied().collect();
        if self.diagonal_couplings_present {
            out.extend(self.diagonal_pairs());
            out.sort();
        }
        out
    }

    pub fn is_hardware_pair(&self, pair: Pair) -> bool {
        self.couplings.contains_key(&pair)
            || (self.diagonal_couplings_present && self.kind(pair) == PairKind::Diagonal)
    }

    /// Strength in rad/s, `None` for diagonal pairs with unspecified strength
    /// and for uncoupled pairs.
    pub fn strength(&self, pair: Pair) -> Option<f64> {
        self.couplings
            .get(&pair)
            .or_else(|| self.diagonal_strengths.get(&pair))
            .copied()
    }

    /// Adjacency lists over hardware pairs.
    pub fn neighbours(&self) -> Vec<Vec<Qubit>> {
        let mut adj = vec![Vec::new(); self.n_qubits()];
        for p in self.hardware_pairs() {
            adj[p.lo()].push(p.hi());
            adj[p.hi()].push(p.lo());
        }
        adj
    }

    /// Weakest nearest-neighbour strength.
    pub fn omega_min(&self) -> Option<f64> {
        self.couplings.values().copied().reduce(f64::min)
    }

    /// Reference time unit in seconds: the π/2 evolution time of the weakest
    /// coupling, `π/ω_min = 1/2J_min`. One second when nothing is coupled.
    pub fn t_max_s(&self) -> f64 {
        self.omega_min().map_or(1.0, |w| PI / w)
    }

    /// Angle accumulated per unit of sign-weighted time integral on `pair`,
    /// for a schedule measured in units of `unit_s` seconds.
    pub fn angle_rate(&self, pair: Pair, unit_s: f64) -> Option<f64> {
        let omega = self.strength(pair)?;
        if unit_s == self.t_max_s() {
            let w_min = self.omega_min().unwrap_or(omega);
            Some(FRAC_PI_2 * (omega / w_min))
        } else {
            Some(omega * unit_s / 2.0)
        }
    }

    /// Free-evolution time, in units of [`t_max_s`](Self::t_max_s), needed for
    /// `pair` to reach `angle`.
    pub fn required_units(&self, pair: Pair, angle: f64) -> Result<f64> {
        let omega = self.couplings.get(&pair).ok_or(Error::NotCoupled(pair))?;
        let w_min = self.omega_min().unwrap_or(*omega);
        Ok((angle / FRAC_PI_2) * (w_min / omega))
    }

    pub fn required_time(&self, pair: Pair, angle: f64) -> Result<Time> {
        Time::from_f64(self.required_units(pair, angle)?)
    }

    pub fn check_qubit(&self, q: Qubit) -> Result<()> {
        if q >= self.n_qubits() {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                n_qubits: self.n_qubits(),
            });
        }
        Ok(())
    }

    fn check_pair_in_range(&self, pair: Pair) -> Result<()> {
        self.check_qubit(pair.hi())?;
        if pair.lo() == pair.hi() {
            return Err(Error::InvalidLattice(format!("self-pair {pair}")));
        }
        Ok(())
    }
}

fn check_dims(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidLattice(format!(
            "dimensions must be positive, got {rows}x{cols}"
        )));
    }
    Ok(())
}

/// Horizontal and vertical neighbour pairs of a `rows × cols` grid.
pub fn nearest_pairs(rows: usize, cols: usize) -> impl Iterator<Item = Pair> {
    (0..rows).flat_map(move |r| {
        (0..cols).flat_map(move |c| {
            let q = r * cols + c;
            let right = (c + 1 < cols).then(|| Pair::new(q, q + 1));
            let down = (r + 1 < rows).then(|| Pair::new(q, q + cols));
            right.into_iter().chain(down)
        })
    })
}

/// Retained couplings with their target ZZ angles, plus per-qubit z targets.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TargetPattern {
    pub retained: BTreeMap<Pair, f64>,
    pub z_rotations: BTreeMap<Qubit, f64>,
}

impl TargetPattern {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Every listed edge retained at the same angle.
    pub fn uniform<I: IntoIterator<Item = Pair>>(edges: I, angle: f64) -> Self {
        TargetPattern {
            retained: edges.into_iter().map(|p| (p, angle)).collect(),
            z_rotations: BTreeMap::new(),
        }
    }

    pub fn with_z(mut self, z: BTreeMap<Qubit, f64>) -> Self {
        self.z_rotations = z;
        self
    }

    pub fn edges(&self) -> BTreeSet<Pair> {
        self.retained.keys().copied().collect()
    }

    pub fn angle(&self, pair: Pair) -> f64 {
        self.retained.get(&pair).copied().unwrap_or(0.0)
    }

    pub fn validate(&self, lattice: &LatticeSpec) -> Result<()> {
        for (&pair, &angle) in &self.retained {
            lattice.check_qubit(pair.hi())?;
            if !lattice.couplings().contains_key(&pair) {
                return Err(Error::NotCoupled(pair));
            }
            if !(angle.is_finite() && angle > 0.0) {
                return Err(Error::InvalidTarget(format!(
                    "angle for {pair} must be positive and finite, got {angle}"
                )));
            }
        }
        for (&q, &angle) in &self.z_rotations {
            lattice.check_qubit(q)?;
            if !angle.is_finite() {
                return Err(Error::InvalidTarget(format!(
                    "z-rotation for qubit {q} is not finite ({angle})"
                )));
            }
        }
        Ok(())
    }

    /// True when some angle lies beyond one period (2π) of the ZZ evolution.
    pub fn needs_wrap(&self) -> bool {
        self.retained.values().any(|&a| a > TAU)
    }

    /// Reduces every retained angle into `(0, 2π]`; angles that are whole
    /// periods drop out of the pattern.
    pub fn wrapped(&self) -> Self {
        let retained = self
            .retained
            .iter()
            .filter_map(|(&p, &a)| {
                let r = a.rem_euclid(TAU);
                if r == 0.0 {
                    None
                } else {
                    Some((p, r))
                }
            })
            .collect();
        TargetPattern {
            retained,
            z_rotations: self.z_rotations.clone(),
        }
    }
}

/// Connected components of the retained-coupling graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IslandDecomposition {
    /// Islands ordered by their smallest qubit; members ascending.
    pub islands: Vec<Vec<Qubit>>,
    pub island_of: Vec<usize>,
    /// Island pairs `(a, b)`, `a < b`, joined by at least one hardware pair.
    pub adjacency: BTreeSet<(usize, usize)>,
}

impl IslandDecomposition {
    pub fn neighbours(&self, island: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.iter().filter_map(move |&(a, b)| {
            if a == island {
                Some(b)
            } else if b == island {
                Some(a)
            } else {
                None
            }
        })
    }
}

pub fn islands(lattice: &LatticeSpec, target: &TargetPattern) -> Result<IslandDecomposition> {
    target.validate(lattice)?;
    let n = lattice.n_qubits();
    let mut uf = UnionFind::new(n);
    for pair in target.retained.keys() {
        uf.union(pair.lo(), pair.hi());
    }
    let mut root_to_island = vec![usize::MAX; n];
    let mut islands: Vec<Vec<Qubit>> = Vec::new();
    let mut island_of = vec![0; n];
    for q in 0..n {
        let root = uf.find(q);
        if root_to_island[root] == usize::MAX {
            root_to_island[root] = islands.len();
            islands.push(Vec::new());
        }
        island_of[q] = root_to_island[root];
        islands[island_of[q]].push(q);
    }
    let adjacency = lattice
        .hardware_pairs()
        .into_iter()
        .filter_map(|p| {
            let (a, b) = (island_of[p.lo()], island_of[p.hi()]);
            (a != b).then(|| (a.min(b), a.max(b)))
        })
        .collect();
    Ok(IslandDecomposition {
        islands,
        island_of,
        adjacency,
    })
}
