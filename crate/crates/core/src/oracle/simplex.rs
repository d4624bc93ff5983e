//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Solves `min cᵀx  s.t.  A x = b, x ≥ 0`. Generic over the scalar so the
//! same code runs in exact rationals and in `f64` with a tolerance.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, Zero};

use crate::error::{Error, Result};

pub trait LpScalar: Clone + Debug + Num + Signed + PartialOrd {
    /// Values within `eps` of zero count as zero.
    fn eps() -> Self;

    fn from_i64(v: i64) -> Self;
}

impl LpScalar for BigRational {
    fn eps() -> Self {
        BigRational::zero()
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

impl LpScalar for f64 {
    fn eps() -> Self {
        1e-9
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpOutcome<T> {
    pub x: Vec<T>,
    pub objective: T,
    pub pivots: usize,
}

/// Consecutive degenerate pivots tolerated before pricing falls back to
/// Bland's rule.
const DEGENERATE_LIMIT: usize = 50;

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    cost: Vec<T>,
    basis: Vec<usize>,
    /// Columns allowed to enter the basis.
    n_enter: usize,
    pivots: usize,
}

impl<T: LpScalar> Tableau<T> {
    fn rhs(&self) -> usize {
        self.cost.len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<T>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Runs simplex iterations on the current cost row until optimal.
    ///
    /// Prices by most negative reduced cost, switching to Bland's rule after
    /// a run of degenerate pivots so the method cannot cycle.
    fn optimise(&mut self) -> Result<()> {
        let eps = T::eps();
        let neg_eps = -eps.clone();
        let rhs = self.rhs();
        let mut degenerate_run = 0usize;
        loop {
            let bland = degenerate_run >= DEGENERATE_LIMIT;
            let enter = if bland {
                (0..self.n_enter).find(|&j| self.cost[j] < neg_eps)
            } else {
                let mut best: Option<usize> = None;
                for j in 0..self.n_enter {
                    if self.cost[j] < neg_eps && best.is_none_or(|b| self.cost[j] < self.cost[b])
                    {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(enter) = enter else {
                return Ok(());
            };
            let mut leave: Option<(usize, T)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[enter] > eps {
                    let ratio = row[rhs].clone() / row[enter].clone();
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, ratio)) => {
                    if ratio > eps {
                        degenerate_run = 0;
                    } else {
                        degenerate_run += 1;
                    }
                    self.pivot(r, enter)
                }
                None => return Err(Error::LpUnbounded),
            }
        }
    }
}

/// `a` is row-major with `b.len()` rows of `c.len()` entries.
pub fn solve<T: LpScalar>(a: &[Vec<T>], b: &[T], c: &[T]) -> Result<LpOutcome<T>> {
    let m = b.len();
    let n = c.len();
    let width = n + m + 1;

    let mut rows = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut r = Vec::with_capacity(width);
        r.extend(
            row.iter()
                .map(|v| if flip { -v.clone() } else { v.clone() }),
        );
        r.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
        r.push(if flip { -bi.clone() } else { bi.clone() });
        rows.push(r);
    }

    // Phase one: minimise the sum of artificials.
    let mut cost = vec![T::zero(); width];
    for row in &rows {
        for j in 0..n {
            cost[j] = cost[j].clone() - row[j].clone();
        }
        cost[width - 1] = cost[width - 1].clone() - row[width - 1].clone();
    }
    let mut t = Tableau {
        rows,
        cost,
        basis: (n..n + m).collect(),
        n_enter: n,
        pivots: 0,
    };
    t.optimise()?;
    if -t.cost[width - 1].clone() > T::eps() {
        return Err(Error::LpInfeasible);
    }

    // Drive artificials out of the basis; rows where that is impossible are
    // redundant and get dropped.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            match (0..n).find(|&j| t.rows[r][j].abs() > T::eps()) {
                Some(j) => {
                    t.pivot(r, j);
                    r += 1;
                }
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                }
            }
        } else {
            r += 1;
        }
    }

    // Phase two with the real costs, reduced against the current basis.
    let mut cost = vec![T::zero(); width];
    cost[..n].clone_from_slice(c);
    for (i, row) in t.rows.iter().enumerate() {
        let cb = c[t.basis[i]].clone();
        if !cb.is_zero() {
            for (v, rv) in cost.iter_mut().zip(row) {
                *v = v.clone() - cb.clone() * rv.clone();
            }
        }
    }
    t.cost = cost;
    t.optimise()?;

    let mut x = vec![T::zero(); n];
    for (i, &j) in t.basis.iter().enumerate() {
        if j < n {
            x[j] = t.rows[i][width - 1].clone();
        }
    }
    let objective = x
        .iter()
        .zip(c)
        .fold(T::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
    Ok(LpOutcome {
        x,
        objective,
        pivots: t.pivots,
    })
}
