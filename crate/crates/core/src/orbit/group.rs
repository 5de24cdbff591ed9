use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, OrbitopeError, Result};
use crate::math::{Rat, SeededRng};

/// Largest finite group the exact path will average over.
pub const MAX_GROUP_ORDER: usize = 10_000_000;

/// An orthogonal transformation with rational entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupElement {
    /// `y[perm[i]] = sign[i] · x[i]`.
    SignedPerm { perm: Vec<usize>, sign: Vec<i8> },
    /// Dense matrix, by rows.
    Matrix(Vec<Vec<Rat>>),
}

impl GroupElement {
    pub fn perm(perm: Vec<usize>) -> Self {
        let sign = vec![1; perm.len()];
        GroupElement::SignedPerm { perm, sign }
    }

    pub fn dim(&self) -> usize {
        match self {
            GroupElement::SignedPerm { perm, .. } => perm.len(),
            GroupElement::Matrix(rows) => rows.len(),
        }
    }

    pub fn apply(&self, x: &[Rat]) -> Vec<Rat> {
        match self {
            GroupElement::SignedPerm { perm, sign } => {
                let mut y = vec![Rat::zero(); x.len()];
                for (i, xi) in x.iter().enumerate() {
                    y[perm[i]] = if sign[i] < 0 { -xi.clone() } else { xi.clone() };
                }
                y
            }
            GroupElement::Matrix(rows) => rows
                .iter()
                .map(|r| {
                    r.iter()
                        .zip(x)
                        .filter(|(a, _)| !a.is_zero())
                        .map(|(a, b)| a * b)
                        .sum()
                })
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Vec<Vec<Rat>> {
        match self {
            GroupElement::Matrix(rows) => rows.clone(),
            GroupElement::SignedPerm { perm, sign } => {
                let n = perm.len();
                let mut rows = vec![vec![Rat::zero(); n]; n];
                for i in 0..n {
                    rows[perm[i]][i] = Rat::from_integer(sign[i].into());
                }
                rows
            }
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        match (self, other) {
            (
                GroupElement::SignedPerm { perm: p, sign: s },
                GroupElement::SignedPerm { perm: q, sign: t },
            ) => {
                let perm = q.iter().map(|&j| p[j]).collect();
                let sign = q.iter().zip(t).map(|(&j, &tj)| s[j] * tj).collect();
                GroupElement::SignedPerm { perm, sign }
            }
            _ => {
                let a = self.to_matrix();
                let b = other.to_matrix();
                let n = a.len();
                GroupElement::Matrix(
                    (0..n)
                        .map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect())
                        .collect(),
                )
            }
        }
    }

    fn canonical(&self) -> Vec<Vec<Rat>> {
        self.to_matrix()
    }

    pub fn is_orthogonal(&self) -> bool {
        match self {
            GroupElement::SignedPerm { perm, sign } => {
                let mut seen = vec![false; perm.len()];
                perm.iter().all(|&p| p < seen.len() && !std::mem::replace(&mut seen[p], true))
                    && sign.len() == perm.len()
                    && sign.iter().all(|s| *s == 1 || *s == -1)
            }
            GroupElement::Matrix(a) => {
                let n = a.len();
                a.iter().all(|r| r.len() == n)
                    && (0..n).all(|i| {
                        (0..n).all(|j| {
                            let d: Rat = (0..n).map(|k| &a[k][i] * &a[k][j]).sum();
                            d == if i == j { Rat::one() } else { Rat::zero() }
                        })
                    })
            }
        }
    }
}

/// Explicit element list of a finite group of orthogonal maps.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    dim: usize,
    elements: Vec<GroupElement>,
}

impl FiniteGroup {
    /// Validates dimensions, orthogonality and (on a deterministic sample of pairs) closure.
    pub fn new(dim: usize, elements: Vec<GroupElement>) -> Result<Self> {
        if elements.is_empty() {
            return invalid("group has no elements");
        }
        if elements.len() > MAX_GROUP_ORDER {
            return Err(OrbitopeError::Budget(format!(
                "group of order {} exceeds the limit {MAX_GROUP_ORDER}",
                elements.len()
            )));
        }
        for g in &elements {
            if g.dim() != dim {
                return Err(OrbitopeError::DimensionMismatch {
                    expected: dim,
                    got: g.dim(),
                });
            }
            if !g.is_orthogonal() {
                return invalid("group element is not orthogonal");
            }
        }
        let group = FiniteGroup { dim, elements };
        group.spot_check_closure(64)?;
        Ok(group)
    }

    fn spot_check_closure(&self, pairs: usize) -> Result<()> {
        let n = self.elements.len();
        let set: HashSet<Vec<Vec<Rat>>> = if n <= 50_000 {
            self.elements.iter().map(GroupElement::canonical).collect()
        } else {
            return Ok(());
        };
        let mut a = 0usize;
        let mut b = n / 2;
        for _ in 0..pairs.min(n * n) {
            let g = self.elements[a].compose(&self.elements[b]);
            if !set.contains(&g.canonical()) {
                return invalid(format!("element list is not closed: g{a}·g{b} missing"));
            }
            a = (a * 31 + 7) % n;
            b = (b * 17 + 3) % n;
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    /// Every element of `{±I}`.
    pub fn plus_minus_identity(dim: usize) -> Self {
        let id = GroupElement::perm((0..dim).collect());
        let neg = GroupElement::SignedPerm {
            perm: (0..dim).collect(),
            sign: vec![-1; dim],
        };
        FiniteGroup::new(dim, vec![id, neg]).expect("valid group")
    }

    /// Rotations of the plane by multiples of 90°.
    pub fn quarter_turns() -> Self {
        let r = GroupElement::SignedPerm {
            perm: vec![1, 0],
            sign: vec![1, -1],
        };
        let mut els = vec![GroupElement::perm(vec![0, 1])];
        for _ in 0..3 {
            let next = r.compose(els.last().unwrap());
            els.push(next);
        }
        FiniteGroup::new(2, els).expect("valid group")
    }

    /// Cyclic group generated by an orthogonal `generator`, listed up to its order.
    pub fn cyclic(generator: GroupElement, max_order: usize) -> Result<Self> {
        let dim = generator.dim();
        let id = GroupElement::perm((0..dim).collect()).canonical();
        let mut els = vec![GroupElement::Matrix(id.clone())];
        let mut cur = generator.clone();
        while cur.canonical() != id {
            if els.len() >= max_order {
                return invalid(format!("generator order exceeds {max_order}"));
            }
            els.push(cur.clone());
            cur = generator.compose(&cur);
        }
        FiniteGroup::new(dim, els)
    }

    /// `S_n` acting on `n × n` matrices (flattened row-major) by `x_{ij} ↦ x_{σ(i)σ(j)}`.
    pub fn symmetric_on_matrices(n: usize) -> Result<Self> {
        if !(1..=9).contains(&n) {
            return invalid(format!("S_n on matrices supports 1 ≤ n ≤ 9, got {n}"));
        }
        let els = permutations(n)
            .into_iter()
            .map(|s| {
                let mut perm = vec![0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        perm[i * n + j] = s[i] * n + s[j];
                    }
                }
                GroupElement::perm(perm)
            })
            .collect();
        FiniteGroup::new(n * n, els)
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

type DrawFn = dyn Fn(&mut SeededRng) -> Vec<f64> + Send + Sync;

/// Haar sampler for a compact group, returning orbit points `g·v` directly so that
/// induced actions on large representations are never materialized.
#[derive(Clone)]
pub struct CompactSampler {
    pub name: String,
    pub dim: usize,
    draw: Arc<DrawFn>,
}

impl CompactSampler {
    pub fn new(name: impl Into<String>, dim: usize, draw: impl Fn(&mut SeededRng) -> Vec<f64> + Send + Sync + 'static) -> Self {
        CompactSampler {
            name: name.into(),
            dim,
            draw: Arc::new(draw),
        }
    }

    pub fn draw(&self, rng: &mut SeededRng) -> Vec<f64> {
        (self.draw)(rng)
    }
}

impl fmt::Debug for CompactSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompactSampler")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CenterMode {
    PreCentered,
    AutoCenter,
}

#[derive(Debug, Clone)]
pub enum OrbitSpec {
    Finite {
        group: FiniteGroup,
        base_point: Vec<Rat>,
        center_mode: CenterMode,
    },
    Compact {
        sampler: CompactSampler,
        base_point: Vec<f64>,
        center_mode: CenterMode,
    },
}

impl OrbitSpec {
    pub fn finite(group: FiniteGroup, base_point: Vec<Rat>, center_mode: CenterMode) -> Result<Self> {
        if base_point.len() != group.dim() {
            return Err(OrbitopeError::DimensionMismatch {
                expected: group.dim(),
                got: base_point.len(),
            });
        }
        if base_point.iter().all(Zero::is_zero) {
            return Err(OrbitopeError::DegenerateOrbit("base point is zero".into()));
        }
        Ok(OrbitSpec::Finite {
            group,
            base_point,
            center_mode,
        })
    }

    pub fn compact(sampler: CompactSampler, base_point: Vec<f64>, center_mode: CenterMode) -> Result<Self> {
        if base_point.len() != sampler.dim {
            return Err(OrbitopeError::DimensionMismatch {
                expected: sampler.dim,
                got: base_point.len(),
            });
        }
        if base_point.iter().all(|x| *x == 0.0) {
            return Err(OrbitopeError::DegenerateOrbit("base point is zero".into()));
        }
        Ok(OrbitSpec::Compact {
            sampler,
            base_point,
            center_mode,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            OrbitSpec::Finite { group, .. } => group.dim(),
            OrbitSpec::Compact { sampler, .. } => sampler.dim,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_counts() {
        assert_eq!(permutations(1).len(), 1);
        assert_eq!(permutations(4).len(), 24);
        let p = permutations(5);
        assert_eq!(p.len(), 120);
        assert_eq!(p.iter().collect::<HashSet<_>>().len(), 120);
    }

    #[test]
    fn small_groups() {
        assert_eq!(FiniteGroup::quarter_turns().order(), 4);
        assert_eq!(FiniteGroup::plus_minus_identity(3).order(), 2);
        let g = FiniteGroup::symmetric_on_matrices(4).unwrap();
        assert_eq!(g.order(), 24);
        let rot = GroupElement::SignedPerm {
            perm: vec![1, 2, 0],
            sign: vec![1, 1, 1],
        };
        assert_eq!(FiniteGroup::cyclic(rot, 10).unwrap().order(), 3);
    }

    #[test]
    fn rejects_non_closed_or_non_orthogonal() {
        let swap = GroupElement::perm(vec![1, 0, 2]);
        let cyc = GroupElement::perm(vec![1, 2, 0]);
        let id = GroupElement::perm(vec![0, 1, 2]);
        assert!(FiniteGroup::new(3, vec![id.clone(), swap, cyc]).is_err());
        let shear = GroupElement::Matrix(vec![
            vec![Rat::one(), Rat::one()],
            vec![Rat::zero(), Rat::one()],
        ]);
        assert!(FiniteGroup::new(2, vec![shear]).is_err());
    }

    #[test]
    fn compose_matches_matrix_product() {
        let a = GroupElement::SignedPerm {
            perm: vec![2, 0, 1],
            sign: vec![1, -1, 1],
        };
        let b = GroupElement::SignedPerm {
            perm: vec![1, 0, 2],
            sign: vec![-1, 1, -1],
        };
        let ab = a.compose(&b);
        let dense = GroupElement::Matrix(a.to_matrix()).compose(&GroupElement::Matrix(b.to_matrix()));
        assert_eq!(ab.to_matrix(), dense.to_matrix());
        let x: Vec<Rat> = (1..=3).map(|i| Rat::from_integer(i.into())).collect();
        assert_eq!(ab.apply(&x), a.apply(&b.apply(&x)));
    }
}
