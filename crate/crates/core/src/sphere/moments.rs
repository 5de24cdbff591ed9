//! Exact integrals of monomials over the unit sphere with the rotation-invariant
//! probability measure.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::Zero;

use super::poly::HomPoly;
use crate::error::{invalid, OrbitopeError, Result};
use crate::math::{odd_double_factorial, par_blocks, MeanVar, MultiIndex, Rat, RngSeed, Scalar};

/// `∫_{S^{n−1}} ∏ x_i^{α_i} dσ`: zero if some exponent is odd, otherwise
/// `∏ (α_i − 1)!!` divided by `n (n+2) ··· (n + |α| − 2)`.
pub fn monomial_moment(n: usize, alpha: &MultiIndex) -> Result<Rat> {
    if n < 1 {
        return invalid("sphere dimension n must be at least 1");
    }
    if alpha.len() != n {
        return Err(OrbitopeError::DimensionMismatch {
            expected: n,
            got: alpha.len(),
        });
    }
    if !alpha.all_even() {
        return Ok(Rat::zero());
    }
    let num = alpha
        .exponents()
        .iter()
        .fold(BigInt::from(1), |acc, &a| acc * BigInt::from(odd_double_factorial(a / 2)));
    let half = alpha.degree() / 2;
    let den = (0..half).fold(BigInt::from(1), |acc, j| acc * BigInt::from(n as u64 + 2 * j as u64));
    Ok(Rat::new(num, den))
}

/// Memoized moments for repeated inner products in a fixed dimension.
#[derive(Debug, Default)]
pub struct MomentTable {
    n: usize,
    cache: Mutex<HashMap<MultiIndex, Rat>>,
}

impl MomentTable {
    pub fn new(n: usize) -> Self {
        MomentTable {
            n,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn get(&self, alpha: &MultiIndex) -> Result<Rat> {
        if !alpha.all_even() {
            return Ok(Rat::zero());
        }
        if let Some(v) = self.cache.lock().unwrap().get(alpha) {
            return Ok(v.clone());
        }
        let v = monomial_moment(self.n, alpha)?;
        self.cache.lock().unwrap().insert(alpha.clone(), v.clone());
        Ok(v)
    }

    /// `⟨p, q⟩ = ∫ p q dσ` by bilinear expansion.
    pub fn inner<S: Scalar>(&self, p: &HomPoly<S>, q: &HomPoly<S>) -> Result<S> {
        if p.n() != self.n || q.n() != self.n {
            return Err(OrbitopeError::DimensionMismatch {
                expected: self.n,
                got: if p.n() != self.n { p.n() } else { q.n() },
            });
        }
        let mut acc = S::zero();
        for (a, ca) in p.terms() {
            for (b, cb) in q.terms() {
                let ab = a.add(b);
                if !ab.all_even() {
                    continue;
                }
                acc = acc + ca.clone() * cb.clone() * S::from_rat(&self.get(&ab)?);
            }
        }
        Ok(acc)
    }

    /// `∫ p dσ`
    pub fn mean<S: Scalar>(&self, p: &HomPoly<S>) -> Result<S> {
        let mut acc = S::zero();
        for (a, c) in p.terms() {
            acc = acc + c.clone() * S::from_rat(&self.get(a)?);
        }
        Ok(acc)
    }
}

/// Exact (or float, for float coefficients) L² inner product on the sphere.
pub fn l2_inner<S: Scalar>(p: &HomPoly<S>, q: &HomPoly<S>) -> Result<S> {
    if p.n() != q.n() {
        return Err(OrbitopeError::DimensionMismatch {
            expected: p.n(),
            got: q.n(),
        });
    }
    MomentTable::new(p.n()).inner(p, q)
}

pub fn sphere_mean<S: Scalar>(p: &HomPoly<S>) -> Result<S> {
    MomentTable::new(p.n()).mean(p)
}

/// Monte Carlo estimates of several moments in dimension `n` from one shared stream of
/// uniform sphere points.
pub fn mc_monomial_moments(n: usize, alphas: &[MultiIndex], samples: usize, seed: RngSeed) -> Result<Vec<MeanVar>> {
    if let Some(a) = alphas.iter().find(|a| a.len() != n) {
        return Err(OrbitopeError::DimensionMismatch { expected: n, got: a.len() });
    }
    let blocks = par_blocks(samples, seed, |_, rng, count| {
        let mut acc = vec![MeanVar::default(); alphas.len()];
        for _ in 0..count {
            let x = rng.unit_vector(n);
            for (mv, a) in acc.iter_mut().zip(alphas) {
                mv.push(a.exponents().iter().zip(&x).map(|(&e, xi)| xi.powi(e as i32)).product());
            }
        }
        acc
    });
    Ok(blocks.into_iter().fold(vec![MeanVar::default(); alphas.len()], |mut tot, b| {
        tot.iter_mut().zip(&b).for_each(|(t, x)| t.merge(x));
        tot
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{rat, rat_int};
    use num_traits::One;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn moment_examples() {
        assert_eq!(monomial_moment(3, &mi(&[1, 0, 0])).unwrap(), Rat::zero());
        assert_eq!(monomial_moment(3, &mi(&[2, 0, 0])).unwrap(), rat(1, 3));
        assert_eq!(monomial_moment(3, &mi(&[4, 0, 0])).unwrap(), rat(1, 5));
        assert_eq!(monomial_moment(3, &mi(&[2, 2, 0])).unwrap(), rat(1, 15));
        assert_eq!(monomial_moment(5, &mi(&[0; 5])).unwrap(), Rat::one());
        assert!(monomial_moment(0, &mi(&[])).is_err());
        assert!(monomial_moment(3, &mi(&[2, 0])).is_err());
    }

    #[test]
    fn second_moments_sum_to_one() {
        for n in 1..=12 {
            let s: Rat = (0..n)
                .map(|i| monomial_moment(n, &MultiIndex::unit(n, i, 2)).unwrap())
                .sum();
            assert_eq!(s, Rat::one(), "n = {n}");
        }
    }

    #[test]
    fn circle_moments_match_beta_function() {
        // On S¹: ∫cos^{2a} sin^{2b} dθ/2π = (2a−1)!!(2b−1)!!/(2^{a+b}(a+b)!)
        for a in 0..5u32 {
            for b in 0..5u32 {
                let m = monomial_moment(2, &mi(&[2 * a, 2 * b])).unwrap();
                let expect = Rat::new(
                    BigInt::from(odd_double_factorial(a) * odd_double_factorial(b)),
                    BigInt::from(crate::math::factorial(a + b)) * (BigInt::one() << (a + b)),
                );
                assert_eq!(m, expect);
            }
        }
    }

    #[test]
    fn inner_product_examples() {
        let x1 = HomPoly::<Rat>::variable(2, 0);
        assert_eq!(l2_inner(&x1, &x1).unwrap(), rat(1, 2));
        let p = HomPoly::monomial(mi(&[2, 0, 0]), rat_int(1));
        let q = HomPoly::monomial(mi(&[0, 2, 0]), rat_int(1));
        assert_eq!(l2_inner(&p, &q).unwrap(), rat(1, 15));
        let xy = HomPoly::monomial(mi(&[1, 1, 0]), rat_int(1));
        assert_eq!(l2_inner(&xy, &xy).unwrap(), rat(1, 15));
        assert!(l2_inner(&x1, &HomPoly::<Rat>::variable(3, 0)).is_err());
    }

    #[test]
    fn sphere_power_integrates_to_one() {
        for n in 2..6 {
            for k in 0..4 {
                assert_eq!(sphere_mean(&HomPoly::<Rat>::sphere_power(n, k)).unwrap(), Rat::one());
            }
        }
    }
}
