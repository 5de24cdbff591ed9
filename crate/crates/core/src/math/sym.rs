//! Dense symmetric matrices (upper triangle stored) and the cyclic Jacobi eigensolver.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::scalar::{Rat, Scalar};
use crate::error::{OrbitopeError, Result};

/// Symmetric matrix with packed upper-triangular storage; symmetry holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<S> {
    dim: usize,
    data: Vec<S>,
}

#[inline]
fn packed(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * (i + 1) / 2 + j
}

impl<S: Scalar> SymMatrix<S> {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix {
            dim,
            data: vec![S::zero(); dim * (dim + 1) / 2],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[packed(self.dim, i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        let k = packed(self.dim, i, j);
        self.data[k] = v;
    }

    /// `self += w · x xᵀ`
    pub fn add_outer(&mut self, x: &[S], w: &S) {
        assert_eq!(x.len(), self.dim);
        for i in 0..self.dim {
            if x[i].is_zero() {
                continue;
            }
            let wi = w.clone() * x[i].clone();
            for j in i..self.dim {
                if x[j].is_zero() {
                    continue;
                }
                let k = packed(self.dim, i, j);
                self.data[k] = self.data[k].clone() + wi.clone() * x[j].clone();
            }
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        SymMatrix {
            dim: self.dim,
            data: self.data.iter().map(|v| v.clone() * s.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        SymMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn mul_vec(&self, x: &[S]) -> Vec<S> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                (0..self.dim).fold(S::zero(), |acc, j| {
                    if x[j].is_zero() {
                        acc
                    } else {
                        acc + self.get(i, j).clone() * x[j].clone()
                    }
                })
            })
            .collect()
    }

    /// `xᵀ self y`
    pub fn bilinear(&self, x: &[S], y: &[S]) -> S {
        self.mul_vec(y)
            .into_iter()
            .zip(x)
            .fold(S::zero(), |acc, (a, b)| acc + a * b.clone())
    }

    pub fn quad_form(&self, x: &[S]) -> S {
        self.bilinear(x, x)
    }

    pub fn trace(&self) -> S {
        (0..self.dim).fold(S::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    /// Product of two symmetric matrices whose product is symmetric (commuting pair,
    /// e.g. polynomials in one matrix). Only the upper triangle is computed.
    pub fn mul_commuting(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let a = self.to_rows();
        let b = other.to_rows();
        Self::from_fn(n, |i, j| {
            (0..n).fold(S::zero(), |acc, k| {
                if a[i][k].is_zero() || b[k][j].is_zero() {
                    acc
                } else {
                    acc + a[i][k].clone() * b[k][j].clone()
                }
            })
        })
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }

    pub fn to_f64(&self) -> SymMatrix<f64> {
        SymMatrix {
            dim: self.dim,
            data: self.data.iter().map(|v| v.as_f64()).collect(),
        }
    }

    /// Induced ∞-norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j).as_f64().abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// True iff `self · g = g · self` for the dense matrix `g` (given by rows).
    pub fn commutes_with(&self, g: &[Vec<S>]) -> bool {
        let n = self.dim;
        let a = self.to_rows();
        for i in 0..n {
            for j in 0..n {
                let ag = (0..n).fold(S::zero(), |acc, k| acc + a[i][k].clone() * g[k][j].clone());
                let ga = (0..n).fold(S::zero(), |acc, k| acc + g[i][k].clone() * a[k][j].clone());
                if !(ag - ga).is_negligible(1e-9) {
                    return false;
                }
            }
        }
        true
    }
}

impl SymMatrix<f64> {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl<S: Scalar> Serialize for SymMatrix<S> {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        // Dense rows of floats, or "num/den" strings on the exact path.
        if S::EXACT {
            let rows: Vec<Vec<String>> = (0..self.dim)
                .map(|i| {
                    (0..self.dim)
                        .map(|j| format_scalar(self.get(i, j)))
                        .collect()
                })
                .collect();
            rows.serialize(s)
        } else {
            let rows: Vec<Vec<f64>> = (0..self.dim)
                .map(|i| (0..self.dim).map(|j| self.get(i, j).as_f64()).collect())
                .collect();
            rows.serialize(s)
        }
    }
}

fn format_scalar<S: Scalar>(v: &S) -> String {
    let any: &dyn std::any::Any = v;
    match any.downcast_ref::<Rat>() {
        Some(r) => super::scalar::format_rat(r),
        None => format!("{}", v.as_f64()),
    }
}

impl<'de> Deserialize<'de> for SymMatrix<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("matrix must be square"));
        }
        Ok(SymMatrix::from_fn(n, |i, j| rows[i][j]))
    }
}

/// Eigen-decomposition `Q = V diag(λ) Vᵀ`, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// `vectors[j]` is the unit eigenvector for `values[j]`.
    pub vectors: Vec<Vec<f64>>,
}

impl SymEigen {
    /// `max_ij |(QV − VΛ)_ij|`
    pub fn residual(&self, q: &SymMatrix<f64>) -> f64 {
        self.vectors
            .iter()
            .zip(&self.values)
            .map(|(v, &l)| {
                q.mul_vec(v)
                    .iter()
                    .zip(v)
                    .map(|(a, b)| (a - l * b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

const JACOBI_MAX_SWEEPS: usize = 80;

/// Cyclic Jacobi with row-by-row sweep order.
pub fn sym_eig(q: &SymMatrix<f64>) -> Result<SymEigen> {
    let n = q.dim();
    if q.data.iter().any(|v| !v.is_finite()) {
        return Err(OrbitopeError::InvalidArgument(
            "matrix has non-finite entries".into(),
        ));
    }
    let mut a = q.to_rows();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let frob: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let off = |a: &Vec<Vec<f64>>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i][j] * a[i][j];
                }
            }
        }
        s.sqrt()
    };
    let target = 1e-15 * frob;
    let mut sweeps = 0;
    loop {
        let o = off(&a);
        if o <= target || o == 0.0 {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(OrbitopeError::EigenNoConvergence {
                sweeps,
                residual: o,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for r in (p + 1)..n {
                let apq = a[p][r];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[r][r] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akr = a[k][r];
                    a[k][p] = c * akp - s * akr;
                    a[k][r] = s * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let ark = a[r][k];
                    a[p][k] = c * apk - s * ark;
                    a[r][k] = s * apk + c * ark;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkr = row[r];
                    row[p] = c * vkp - s * vkr;
                    row[r] = s * vkp + c * vkr;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&j| (0..n).map(|i| v[i][j]).collect())
        .collect();
    Ok(SymEigen { values, vectors })
}

/// Incremental exact row echelon form, for ranks over ℚ.
#[derive(Debug, Default, Clone)]
pub struct ExactEchelon {
    rows: Vec<(usize, Vec<Rat>)>,
}

impl ExactEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the basis; returns true if it was independent.
    pub fn insert(&mut self, mut row: Vec<Rat>) -> bool {
        for (pivot, basis) in &self.rows {
            if row[*pivot].is_zero() {
                continue;
            }
            let f = row[*pivot].clone();
            for (x, b) in row.iter_mut().zip(basis) {
                if !b.is_zero() {
                    *x -= &f * b;
                }
            }
        }
        match row.iter().position(|x| !x.is_zero()) {
            None => false,
            Some(p) => {
                let inv = num_traits::Inv::inv(row[p].clone());
                for x in row.iter_mut() {
                    *x *= &inv;
                }
                // Keep the basis fully reduced in the new pivot column.
                for (_, basis) in self.rows.iter_mut() {
                    if !basis[p].is_zero() {
                        let f = basis[p].clone();
                        for (b, x) in basis.iter_mut().zip(&row) {
                            if !x.is_zero() {
                                *b -= &f * x;
                            }
                        }
                    }
                }
                self.rows.push((p, row));
                true
            }
        }
    }
}

pub fn exact_rank(rows: impl IntoIterator<Item = Vec<Rat>>) -> usize {
    let mut e = ExactEchelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::rng::{RngSeed, SeededRng};
    use crate::math::scalar::{rat, rat_int};

    #[test]
    fn identity_eigenvalues() {
        let e = sym_eig(&SymMatrix::<f64>::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_eigenpairs() {
        let mut q = SymMatrix::<f64>::zeros(2);
        q.set(0, 0, 1.0);
        q.set(1, 1, 2.0);
        let e = sym_eig(&q).unwrap();
        assert_eq!(e.values, vec![2.0, 1.0]);
        assert_eq!(e.vectors[0].iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![0.0, 1.0]);
        assert_eq!(e.vectors[1].iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![1.0, 0.0]);
    }

    #[test]
    fn rank_one_eigenvalues() {
        // (2-λ)... characteristic polynomial of [[1,1],[1,1]] is λ² − 2λ.
        let q = SymMatrix::from_fn(2, |_, _| 1.0);
        let e = sym_eig(&q).unwrap();
        assert!((e.values[0] - 2.0).abs() < 1e-14);
        assert!(e.values[1].abs() < 1e-14);
    }

    #[test]
    fn residual_bound_on_random_matrices() {
        let mut rng = SeededRng::new(RngSeed(7));
        for trial in 0..1000 {
            let n = 1 + (trial % 40);
            let q = SymMatrix::from_fn(n, |_, _| rng.gaussian());
            let e = sym_eig(&q).unwrap();
            let res = e.residual(&q);
            assert!(res <= 1e-10 * q.norm_inf(), "n={n} residual {res}");
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
            for (i, vi) in e.vectors.iter().enumerate() {
                for (j, vj) in e.vectors.iter().enumerate() {
                    let d: f64 = vi.iter().zip(vj).map(|(a, b)| a * b).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((d - expect).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_nan() {
        let mut q = SymMatrix::<f64>::zeros(2);
        q.set(0, 1, f64::NAN);
        assert!(sym_eig(&q).is_err());
    }

    #[test]
    fn exact_rank_counts_dependencies() {
        let rows = vec![
            vec![rat_int(1), rat_int(2), rat_int(3)],
            vec![rat_int(2), rat_int(4), rat_int(6)],
            vec![rat(1, 2), rat_int(0), rat_int(1)],
        ];
        assert_eq!(exact_rank(rows), 2);
    }

    #[test]
    fn packed_storage_is_symmetric() {
        let m = SymMatrix::<Rat>::from_fn(4, |i, j| rat_int((10 * i + j) as i64));
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
        let json = serde_json::to_string(&SymMatrix::<Rat>::identity(2).scale(&rat(1, 2))).unwrap();
        assert_eq!(json, r#"[["1/2","0"],["0","1/2"]]"#);
    }
}
