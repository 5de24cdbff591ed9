use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed};
use serde::Serialize;

use super::frame::haar_pluecker_dense;
use super::multivector::ExteriorTables;
use crate::error::{invalid, OrbitopeError, Result};
use crate::math::{binomial, factorial, sym_eig, Rat, RngSeed, SeededRng, SymMatrix};

/// Dimension of the `GL_n`-module of the rectangular `m × k` diagram:
/// `∏_{i=1}^m ∏_{j=1}^k (n + j − i) / (m + k − i − j + 1)`, checked to be an integer.
pub fn d_k_rect(m: usize, n: usize, k: usize) -> Result<BigUint> {
    if m == 0 || m > n || k == 0 {
        return invalid(format!("d_k needs 1 <= m <= n and k >= 1 (m = {m}, n = {n}, k = {k})"));
    }
    let mut acc = Rat::one();
    for i in 1..=m as i64 {
        for j in 1..=k as i64 {
            acc *= Rat::new(BigInt::from(n as i64 + j - i), BigInt::from(m as i64 + k as i64 - i - j + 1));
        }
    }
    if !acc.is_integer() || acc.is_negative() {
        return Err(OrbitopeError::Invariant(format!("d_k product is not a nonnegative integer: {acc}")));
    }
    Ok(acc.to_integer().to_biguint().expect("nonnegative"))
}

pub const MAX_RANK_FEATURES: usize = 600;
pub const RANK_REL_TOL: f64 = 1e-9;

/// Numerical dimension of `span{ y^{⊗k} }` over Haar-random Plücker points `y`.
#[derive(Debug, Clone, Serialize)]
pub struct TensorRank {
    pub rank: usize,
    pub samples: usize,
    /// Size of the matrix whose spectrum was thresholded.
    pub matrix_dim: usize,
    pub rel_tol: f64,
    /// Leading eigenvalues, descending, normalized by the largest.
    pub spectrum: Vec<f64>,
}

fn rank_of(mat: &SymMatrix<f64>, samples: usize) -> Result<TensorRank> {
    let eig = sym_eig(mat)?;
    let top = eig.values.first().copied().unwrap_or(0.0);
    if !(top > 0.0) {
        return Err(OrbitopeError::DegenerateOrbit("zero tensor-power span".into()));
    }
    let rank = eig.values.iter().filter(|&&v| v > RANK_REL_TOL * top).count();
    let keep = (rank + 4).min(eig.values.len());
    Ok(TensorRank {
        rank,
        samples,
        matrix_dim: mat.dim(),
        rel_tol: RANK_REL_TOL,
        spectrum: eig.values[..keep].iter().map(|v| v / top).collect(),
    })
}

fn haar_points(n: usize, m: usize, samples: usize, seed: RngSeed) -> Result<Vec<Vec<f64>>> {
    if m == 0 || m > n {
        return invalid(format!("need 1 <= m <= n (n = {n}, m = {m})"));
    }
    let t = ExteriorTables::new(n, m)?;
    let mut rng = SeededRng::new(seed);
    Ok((0..samples).map(|_| haar_pluecker_dense(&t, m, &mut rng)).collect())
}

/// Rank of the Gram matrix `G_ab = ⟨y_a, y_b⟩^k = ⟨y_a^{⊗k}, y_b^{⊗k}⟩`.
pub fn orbit_tensor_rank_gram(n: usize, m: usize, k: usize, samples: usize, seed: RngSeed) -> Result<TensorRank> {
    if k == 0 || samples == 0 {
        return invalid("k and samples must be positive");
    }
    let ys = haar_points(n, m, samples, seed)?;
    let g = SymMatrix::from_fn(samples, |a, b| {
        ys[a].iter().zip(&ys[b]).map(|(x, y)| x * y).sum::<f64>().powi(k as i32)
    });
    rank_of(&g, samples)
}

/// Rank of the scatter matrix `Σ_a φ(y_a) φ(y_a)ᵀ`, where `φ_α(y) = √(k!/α!) y^α` runs over
/// degree-`k` monomials, so that `⟨φ(y), φ(z)⟩ = ⟨y, z⟩^k`; same rank as the Gram matrix.
pub fn orbit_tensor_rank(n: usize, m: usize, k: usize, samples: usize, seed: RngSeed) -> Result<TensorRank> {
    if k == 0 || samples == 0 {
        return invalid("k and samples must be positive");
    }
    let dim = num_traits::ToPrimitive::to_usize(&binomial(n as i64, m as i64)).unwrap_or(usize::MAX);
    let features = num_traits::ToPrimitive::to_usize(&binomial((dim + k - 1) as i64, k as i64)).unwrap_or(usize::MAX);
    if features > MAX_RANK_FEATURES {
        return Err(OrbitopeError::Budget(format!(
            "{features} degree-{k} monomials in {dim} Plücker coordinates (limit {MAX_RANK_FEATURES})"
        )));
    }
    let monos = monomials(dim, k);
    let kf = num_traits::ToPrimitive::to_f64(&factorial(k as u32)).unwrap();
    let weights: Vec<f64> = monos
        .iter()
        .map(|alpha| {
            let den: f64 = alpha
                .iter()
                .map(|&a| num_traits::ToPrimitive::to_f64(&factorial(a)).unwrap())
                .product();
            (kf / den).sqrt()
        })
        .collect();
    let ys = haar_points(n, m, samples, seed)?;
    let mut s = SymMatrix::zeros(monos.len());
    let w = 1.0 / samples as f64;
    for y in &ys {
        let phi: Vec<f64> = monos
            .iter()
            .zip(&weights)
            .map(|(alpha, c)| c * alpha.iter().zip(y).map(|(&a, &x)| x.powi(a as i32)).product::<f64>())
            .collect();
        s.add_outer(&phi, &w);
    }
    rank_of(&s, samples)
}

fn monomials(vars: usize, degree: usize) -> Vec<Vec<u32>> {
    fn rec(vars: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() + 1 == vars {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in (0..=left).rev() {
            cur.push(a);
            rec(vars, left - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(vars, degree as u32, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::rng::RngSeed;

    #[test]
    fn examples() {
        assert_eq!(d_k_rect(2, 4, 1).unwrap(), BigUint::from(6u32));
        assert_eq!(d_k_rect(2, 4, 2).unwrap(), BigUint::from(20u32));
        assert!(d_k_rect(3, 2, 1).is_err());
        assert!(d_k_rect(1, 2, 0).is_err());
    }

    #[test]
    fn monomial_count() {
        assert_eq!(monomials(6, 2).len(), 21);
        assert_eq!(monomials(3, 4).len(), 15);
    }

    #[test]
    fn scatter_rank_small() {
        // Linear forms on the circle: span of x^{⊗2} is Sym², dimension 3.
        let r = orbit_tensor_rank(2, 1, 2, 40, RngSeed(1)).unwrap();
        assert_eq!(r.rank, 3);
        let r = orbit_tensor_rank(4, 2, 2, 200, RngSeed(2)).unwrap();
        assert_eq!(r.rank, 20);
    }
}
