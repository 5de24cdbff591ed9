use num_traits::Zero;

use super::moments::MomentTable;
use super::poly::HomPoly;
use crate::error::{invalid, OrbitopeError, Result};
use crate::math::{binomial, rat_to_f64, MultiIndex, Rat, SeededRng};

pub const MAX_BASIS: usize = 5000;

/// Orthonormal basis of `U_{m,n}`, the degree-`m` forms with zero sphere mean.
#[derive(Debug, Clone)]
pub struct PolyBasis {
    pub n: usize,
    pub m: u32,
    /// Orthonormal elements in floating point.
    pub elements: Vec<HomPoly<f64>>,
    /// Exactly orthogonal elements before normalization.
    pub orthogonal: Vec<HomPoly<Rat>>,
    /// Exact squared L² norms of `orthogonal`.
    pub norms_sq: Vec<Rat>,
    pub gram_tol: f64,
}

/// `dim U_{m,n}`.
pub fn dim_u(n: usize, m: u32) -> u128 {
    let all = u128::try_from(binomial(n as i64 + m as i64 - 1, m as i64)).unwrap_or(u128::MAX);
    if m.is_multiple_of(2) {
        all - 1
    } else {
        all
    }
}

/// Exact Gram–Schmidt over graded-lex monomials after the mean-zero projection.
#[allow(non_snake_case)]
pub fn orthonormal_basis_U(n: usize, m: u32) -> Result<PolyBasis> {
    if n < 2 || m < 1 {
        return invalid(format!("need n ≥ 2 and m ≥ 1, got n = {n}, m = {m}"));
    }
    let dim = dim_u(n, m);
    if dim > MAX_BASIS as u128 {
        return Err(OrbitopeError::Budget(format!(
            "dim U_{{{m},{n}}} = {dim} exceeds the basis guard of {MAX_BASIS}"
        )));
    }
    let table = MomentTable::new(n);
    let r_pow = m.is_multiple_of(2).then(|| HomPoly::<Rat>::sphere_power(n, m / 2));
    let mut orthogonal: Vec<HomPoly<Rat>> = Vec::new();
    let mut norms_sq: Vec<Rat> = Vec::new();
    for alpha in MultiIndex::all_of_degree(n, m) {
        let mut f = HomPoly::monomial(alpha.clone(), Rat::from_integer(1.into()));
        if let Some(r) = &r_pow {
            let mean = table.get(&alpha)?;
            f.axpy(&-mean, r);
        }
        for (b, nb) in orthogonal.iter().zip(&norms_sq) {
            let c = table.inner(&f, b)?;
            if !c.is_zero() {
                f.axpy(&-(c / nb), b);
            }
        }
        if f.is_zero() {
            continue;
        }
        let nsq = table.inner(&f, &f)?;
        orthogonal.push(f);
        norms_sq.push(nsq);
    }
    if orthogonal.len() as u128 != dim {
        return Err(OrbitopeError::Invariant(format!(
            "basis of U_{{{m},{n}}} has {} elements, expected {dim}",
            orthogonal.len()
        )));
    }
    let elements = orthogonal
        .iter()
        .zip(&norms_sq)
        .map(|(b, nsq)| {
            let s = 1.0 / rat_to_f64(nsq).sqrt();
            b.to_f64().scale(&s)
        })
        .collect();
    Ok(PolyBasis {
        n,
        m,
        elements,
        orthogonal,
        norms_sq,
        gram_tol: 1e-12,
    })
}

impl PolyBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `∑ c_i e_i`.
    pub fn combine(&self, coeffs: &[f64]) -> Result<HomPoly<f64>> {
        if coeffs.len() != self.len() {
            return Err(OrbitopeError::DimensionMismatch {
                expected: self.len(),
                got: coeffs.len(),
            });
        }
        let mut p = HomPoly::zero(self.n, self.m);
        for (c, e) in coeffs.iter().zip(&self.elements) {
            p.axpy(c, e);
        }
        Ok(p)
    }

    /// Uniform draw from the unit L² sphere of `U_{m,n}`.
    pub fn random_unit(&self, rng: &mut SeededRng) -> HomPoly<f64> {
        let c = rng.unit_vector(self.len());
        self.combine(&c).expect("length matches")
    }

    /// Largest deviation of the float Gram matrix from the identity.
    pub fn gram_defect(&self) -> Result<f64> {
        let table = MomentTable::new(self.n);
        let mut worst = 0.0f64;
        for (i, a) in self.elements.iter().enumerate() {
            for b in &self.elements[i..] {
                let g = table.inner(a, b)?;
                let target = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn sizes_match_dimension_formula() {
        for (n, m, size) in [(2, 2, 2), (3, 2, 5), (3, 3, 10), (3, 4, 14), (4, 2, 9), (2, 5, 6)] {
            let b = orthonormal_basis_U(n, m).unwrap();
            assert_eq!(b.len(), size, "n={n} m={m}");
        }
        assert!(orthonormal_basis_U(1, 2).is_err());
        assert!(orthonormal_basis_U(3, 0).is_err());
        assert!(matches!(orthonormal_basis_U(10, 9), Err(OrbitopeError::Budget(_))));
    }

    #[test]
    fn exact_orthogonality_and_zero_mean() {
        for (n, m) in [(3, 2), (3, 3), (3, 4), (4, 2)] {
            let b = orthonormal_basis_U(n, m).unwrap();
            let t = MomentTable::new(n);
            for (i, p) in b.orthogonal.iter().enumerate() {
                assert!(t.mean(p).unwrap().is_zero());
                for (j, q) in b.orthogonal.iter().enumerate() {
                    let g = t.inner(p, q).unwrap();
                    if i == j {
                        assert_eq!(g, b.norms_sq[i]);
                    } else {
                        assert!(g.is_zero());
                    }
                }
            }
            assert!(b.gram_defect().unwrap() <= b.gram_tol);
        }
    }

    #[test]
    fn odd_degree_mean_constraint_is_vacuous() {
        let t = MomentTable::new(3);
        for a in MultiIndex::all_of_degree(3, 3) {
            assert!(t.get(&a).unwrap().is_zero());
        }
        let b = orthonormal_basis_U(3, 3).unwrap();
        assert_eq!(b.len(), 10);
        assert!(b.norms_sq.iter().all(|x| *x > Rat::zero() && *x <= Rat::one()));
    }
}
