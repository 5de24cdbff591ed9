//! Exact convex-hull membership by phase-1 simplex over the rationals (Bland's rule),
//! with a Farkas separator on infeasibility.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{OrbitopeError, Result};
use crate::math::scalar::{serde_rat, serde_rat_vec};
use crate::math::Rat;

/// Witness for or against `point ∈ conv(vertices)`, checked exactly before it is returned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Membership {
    /// Nonnegative weights summing to 1 with `∑ w_i v_i = point`.
    Inside {
        #[serde(with = "serde_rat_vec")]
        weights: Vec<Rat>,
    },
    /// `⟨ℓ, v_i⟩ ≤ t` for every vertex while `⟨ℓ, point⟩ > t`.
    Outside {
        #[serde(with = "serde_rat_vec")]
        functional: Vec<Rat>,
        #[serde(with = "serde_rat")]
        threshold: Rat,
    },
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpStats {
    pub rows: usize,
    pub columns: usize,
    pub pivots: usize,
}

pub fn hull_membership(vertices: &[Vec<Rat>], point: &[Rat]) -> Result<Membership> {
    hull_membership_with_stats(vertices, point).map(|(m, _)| m)
}

pub fn hull_membership_with_stats(vertices: &[Vec<Rat>], point: &[Rat]) -> Result<(Membership, LpStats)> {
    if vertices.is_empty() {
        return Err(OrbitopeError::InvalidArgument("vertex list is empty".into()));
    }
    let d = point.len();
    if let Some(v) = vertices.iter().find(|v| v.len() != d) {
        return Err(OrbitopeError::DimensionMismatch {
            expected: d,
            got: v.len(),
        });
    }
    let mut tab = Tableau::new(vertices, point);
    tab.solve();
    let stats = LpStats {
        rows: tab.m,
        columns: tab.n,
        pivots: tab.pivots,
    };
    let result = if tab.objective().is_zero() {
        let mut weights = vec![Rat::zero(); tab.n];
        for (i, &b) in tab.basis.iter().enumerate() {
            if b < tab.n {
                weights[b] = tab.rhs(i).clone();
            }
        }
        Membership::Inside { weights }
    } else {
        let y = tab.duals();
        let functional = y[..d].to_vec();
        let threshold = -y[d].clone();
        Membership::Outside {
            functional,
            threshold,
        }
    };
    verify(vertices, point, &result)?;
    Ok((result, stats))
}

/// Exact check of a membership witness.
pub fn verify(vertices: &[Vec<Rat>], point: &[Rat], m: &Membership) -> Result<()> {
    let fail = |msg: &str| Err(OrbitopeError::Invariant(format!("membership certificate: {msg}")));
    match m {
        Membership::Inside { weights } => {
            if weights.len() != vertices.len() {
                return fail("weight count");
            }
            if weights.iter().any(|w| w.is_negative()) {
                return fail("negative weight");
            }
            if weights.iter().sum::<Rat>() != Rat::one() {
                return fail("weights do not sum to 1");
            }
            for (k, p) in point.iter().enumerate() {
                let s: Rat = weights
                    .iter()
                    .zip(vertices)
                    .filter(|(w, _)| !w.is_zero())
                    .map(|(w, v)| w * &v[k])
                    .sum();
                if &s != p {
                    return fail("combination does not reproduce the point");
                }
            }
        }
        Membership::Outside {
            functional,
            threshold,
        } => {
            let eval = |x: &[Rat]| -> Rat {
                functional
                    .iter()
                    .zip(x)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            };
            if vertices.iter().any(|v| eval(v) > *threshold) {
                return fail("separator violated by a vertex");
            }
            if eval(point) <= *threshold {
                return fail("separator does not cut off the point");
            }
        }
    }
    Ok(())
}

/// Dense tableau for `min ∑ a  s.t.  A λ + a = b,  λ, a ≥ 0`, where the columns of `A`
/// are `(v_j, 1)` and `b = (point, 1)` with rows sign-flipped so that `b ≥ 0`.
struct Tableau {
    m: usize,
    n: usize,
    /// `m` rows of `n + m + 1` entries; the last is the right-hand side.
    rows: Vec<Vec<Rat>>,
    /// Reduced costs for all `n + m` columns, then minus the objective value.
    cost: Vec<Rat>,
    basis: Vec<usize>,
    flipped: Vec<bool>,
    pivots: usize,
}

impl Tableau {
    fn new(vertices: &[Vec<Rat>], point: &[Rat]) -> Self {
        let d = point.len();
        let m = d + 1;
        let n = vertices.len();
        let width = n + m + 1;
        let mut rows = Vec::with_capacity(m);
        let mut flipped = Vec::with_capacity(m);
        for i in 0..m {
            let mut row = vec![Rat::zero(); width];
            for (j, v) in vertices.iter().enumerate() {
                row[j] = if i < d { v[i].clone() } else { Rat::one() };
            }
            row[n + i] = Rat::one();
            let b = if i < d { point[i].clone() } else { Rat::one() };
            let flip = b.is_negative();
            row[n + m] = b;
            if flip {
                for (j, e) in row.iter_mut().enumerate() {
                    if j != n + i {
                        *e = -e.clone();
                    }
                }
            }
            flipped.push(flip);
            rows.push(row);
        }
        let mut cost = vec![Rat::zero(); width];
        for row in &rows {
            for j in 0..n {
                cost[j] -= &row[j];
            }
            cost[n + m] -= &row[n + m];
        }
        Tableau {
            m,
            n,
            rows,
            cost,
            basis: (n..n + m).collect(),
            flipped,
            pivots: 0,
        }
    }

    fn rhs(&self, i: usize) -> &Rat {
        &self.rows[i][self.n + self.m]
    }

    fn objective(&self) -> Rat {
        -self.cost[self.n + self.m].clone()
    }

    fn solve(&mut self) {
        let cols = self.n + self.m;
        while let Some(enter) = (0..cols).find(|&j| self.cost[j].is_negative()) {
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.m {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            // The phase-1 objective is bounded below by zero, so a leaving row always exists.
            let (r, _) = leave.expect("phase-1 problem is bounded");
            self.pivot(r, enter);
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let inv = self.rows[r][c].recip();
        let pivot_row: Vec<Rat> = self.rows[r].iter().map(|e| e * &inv).collect();
        let nz: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        let eliminate = |row: &mut Vec<Rat>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for &j in &nz {
                row[j] -= &f * &pivot_row[j];
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Phase-1 duals `y` in the original row signs: `yᵀA ≤ 0` and `yᵀb > 0` at an
    /// infeasible optimum.
    fn duals(&self) -> Vec<Rat> {
        (0..self.m)
            .map(|i| {
                let y = Rat::one() - &self.cost[self.n + i];
                if self.flipped[i] {
                    -y
                } else {
                    y
                }
            })
            .collect()
    }
}
