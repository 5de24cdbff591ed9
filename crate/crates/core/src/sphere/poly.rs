use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{invalid, OrbitopeError, Result};
use crate::math::{format_rat, parse_rat, MultiIndex, Rat, Scalar};

/// Homogeneous polynomial of degree `m` in `n` variables, stored sparsely.
///
/// Every key has degree exactly `m`; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct HomPoly<S> {
    n: usize,
    m: u32,
    terms: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> HomPoly<S> {
    pub fn zero(n: usize, m: u32) -> Self {
        HomPoly {
            n,
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        n: usize,
        m: u32,
        terms: impl IntoIterator<Item = (MultiIndex, S)>,
    ) -> Result<Self> {
        let mut p = Self::zero(n, m);
        for (alpha, c) in terms {
            if alpha.len() != n {
                return Err(OrbitopeError::DimensionMismatch {
                    expected: n,
                    got: alpha.len(),
                });
            }
            if alpha.degree() != m {
                return invalid(format!(
                    "monomial {:?} has degree {} in a degree-{m} polynomial",
                    alpha.exponents(),
                    alpha.degree()
                ));
            }
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    pub fn monomial(alpha: MultiIndex, coef: S) -> Self {
        let mut p = Self::zero(alpha.len(), alpha.degree());
        p.add_term(alpha, coef);
        p
    }

    /// `x_i` as a polynomial in `n` variables.
    pub fn variable(n: usize, i: usize) -> Self {
        Self::monomial(MultiIndex::unit(n, i, 1), S::one())
    }

    /// `(x_1² + … + x_n²)^k`, identically 1 on the sphere.
    pub fn sphere_power(n: usize, k: u32) -> Self {
        let r = Self::from_terms(
            n,
            2,
            (0..n).map(|i| (MultiIndex::unit(n, i, 2), S::one())),
        )
        .expect("well-formed");
        r.pow(k)
    }

    fn add_term(&mut self, alpha: MultiIndex, c: S) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(alpha);
        match slot {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.terms.iter()
    }

    pub fn coef(&self, alpha: &MultiIndex) -> S {
        self.terms.get(alpha).cloned().unwrap_or_else(S::zero)
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut p = Self::zero(self.n, self.m);
        for (a, c) in &self.terms {
            p.add_term(a.clone(), c.clone() * s.clone());
        }
        p
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        let mut p = self.clone();
        for (a, c) in &other.terms {
            p.add_term(a.clone(), c.clone());
        }
        Ok(p)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-S::one()))
    }

    /// Adds `s · other` in place.
    pub fn axpy(&mut self, s: &S, other: &Self) {
        debug_assert!(self.n == other.n && self.m == other.m);
        for (a, c) in &other.terms {
            self.add_term(a.clone(), c.clone() * s.clone());
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(OrbitopeError::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let mut p = Self::zero(self.n, self.m + other.m);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                p.add_term(a.add(b), ca.clone() * cb.clone());
            }
        }
        Ok(p)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::monomial(MultiIndex::zeros(self.n), S::one());
        for _ in 0..k {
            acc = acc.mul(self).expect("same n");
        }
        acc
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(OrbitopeError::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        if self.m != other.m {
            return invalid(format!("degree mismatch: {} vs {}", self.m, other.m));
        }
        Ok(())
    }

    pub fn to_f64(&self) -> HomPoly<f64> {
        HomPoly {
            n: self.n,
            m: self.m,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (a.clone(), c.as_f64()))
                .filter(|(_, c)| *c != 0.0)
                .collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        PolyEvaluator::new(&self.to_f64()).eval(x)
    }
}

/// Flattened polynomial for repeated floating-point evaluation.
#[derive(Debug, Clone)]
pub struct PolyEvaluator {
    n: usize,
    m: u32,
    coefs: Vec<f64>,
    exps: Vec<Vec<u32>>,
}

impl PolyEvaluator {
    pub fn new(p: &HomPoly<f64>) -> Self {
        PolyEvaluator {
            n: p.n,
            m: p.m,
            coefs: p.terms.values().copied().collect(),
            exps: p.terms.keys().map(|a| a.0.clone()).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn powers(&self, x: &[f64]) -> Vec<Vec<f64>> {
        x.iter()
            .map(|&xi| {
                let mut pw = Vec::with_capacity(self.m as usize + 1);
                let mut acc = 1.0;
                for _ in 0..=self.m {
                    pw.push(acc);
                    acc *= xi;
                }
                pw
            })
            .collect()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let pw = self.powers(x);
        self.coefs
            .iter()
            .zip(&self.exps)
            .map(|(c, e)| {
                e.iter()
                    .enumerate()
                    .fold(*c, |acc, (i, &k)| acc * pw[i][k as usize])
            })
            .sum()
    }

    /// Value and Euclidean gradient.
    pub fn eval_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let pw = self.powers(x);
        let mut val = 0.0;
        let mut grad = vec![0.0; self.n];
        for (c, e) in self.coefs.iter().zip(&self.exps) {
            val += e
                .iter()
                .enumerate()
                .fold(*c, |acc, (i, &k)| acc * pw[i][k as usize]);
            for j in 0..self.n {
                if e[j] == 0 {
                    continue;
                }
                let mut t = c * e[j] as f64;
                for (i, &k) in e.iter().enumerate() {
                    let k = if i == j { k - 1 } else { k };
                    t *= pw[i][k as usize];
                }
                grad[j] += t;
            }
        }
        (val, grad)
    }
}

/// Polynomial read from JSON: exact when every coefficient is a rational string or an
/// integer, floating otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyPoly {
    Exact(HomPoly<Rat>),
    Float(HomPoly<f64>),
}

impl AnyPoly {
    pub fn n(&self) -> usize {
        match self {
            AnyPoly::Exact(p) => p.n(),
            AnyPoly::Float(p) => p.n(),
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            AnyPoly::Exact(p) => p.degree(),
            AnyPoly::Float(p) => p.degree(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: PolyJson = serde_json::from_str(text)
            .map_err(|e| OrbitopeError::Parse(format!("polynomial JSON: {e}")))?;
        let exact = v.terms.iter().all(|t| match &t.coef {
            Value::String(_) => true,
            Value::Number(num) => num.is_i64(),
            _ => false,
        });
        let alpha = |t: &TermJson| MultiIndex(t.alpha.clone());
        if exact {
            let terms = v
                .terms
                .iter()
                .map(|t| {
                    let c = match &t.coef {
                        Value::String(s) => parse_rat(s)?,
                        Value::Number(num) => crate::math::rat_int(num.as_i64().unwrap()),
                        _ => unreachable!(),
                    };
                    Ok((alpha(t), c))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(AnyPoly::Exact(HomPoly::from_terms(v.n, v.m, terms)?))
        } else {
            let terms = v
                .terms
                .iter()
                .map(|t| {
                    let c = match &t.coef {
                        Value::String(s) => crate::math::rat_to_f64(&parse_rat(s)?),
                        Value::Number(num) => num.as_f64().unwrap_or(f64::NAN),
                        other => {
                            return Err(OrbitopeError::Parse(format!("bad coefficient {other}")))
                        }
                    };
                    Ok((alpha(t), c))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(AnyPoly::Float(HomPoly::from_terms(v.n, v.m, terms)?))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    n: usize,
    m: u32,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    alpha: Vec<u32>,
    coef: Value,
}

impl<S: Scalar> Serialize for HomPoly<S> {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let terms = self
            .terms
            .iter()
            .map(|(a, c)| {
                let any: &dyn std::any::Any = c;
                let coef = match any.downcast_ref::<Rat>() {
                    Some(r) => Value::String(format_rat(r)),
                    None => serde_json::Number::from_f64(c.as_f64())
                        .map(Value::Number)
                        .unwrap_or(Value::Null),
                };
                TermJson {
                    alpha: a.0.clone(),
                    coef,
                }
            })
            .collect();
        PolyJson {
            n: self.n,
            m: self.m,
            terms,
        }
        .serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{rat, rat_int};

    #[test]
    fn arithmetic_and_degree_checks() {
        let x = HomPoly::<Rat>::variable(2, 0);
        let y = HomPoly::<Rat>::variable(2, 1);
        let s = x.add(&y).unwrap();
        let sq = s.pow(2);
        assert_eq!(sq.num_terms(), 3);
        assert_eq!(sq.coef(&MultiIndex(vec![1, 1])), rat_int(2));
        assert!(x.sub(&x).unwrap().is_zero());
        assert!(HomPoly::<Rat>::from_terms(2, 2, [(MultiIndex(vec![1, 0]), rat_int(1))]).is_err());
        assert!(x.add(&sq).is_err());
    }

    #[test]
    fn evaluation_and_gradient() {
        // p = 3 x0² x1 − x1³
        let p = HomPoly::from_terms(
            2,
            3,
            [(MultiIndex(vec![2, 1]), 3.0), (MultiIndex(vec![0, 3]), -1.0)],
        )
        .unwrap();
        let ev = PolyEvaluator::new(&p);
        let (v, g) = ev.eval_grad(&[0.5, 2.0]);
        assert!((v - (3.0 * 0.25 * 2.0 - 8.0)).abs() < 1e-14);
        assert!((g[0] - 6.0 * 0.5 * 2.0).abs() < 1e-14);
        assert!((g[1] - (3.0 * 0.25 - 12.0)).abs() < 1e-14);
    }

    #[test]
    fn json_round_trip_exact_and_float() {
        let p = HomPoly::from_terms(
            3,
            2,
            [(MultiIndex(vec![2, 0, 0]), rat(1, 3)), (MultiIndex(vec![0, 1, 1]), rat_int(-2))],
        )
        .unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(AnyPoly::from_json(&text).unwrap(), AnyPoly::Exact(p));

        let text = r#"{"n":2,"m":1,"terms":[{"alpha":[1,0],"coef":0.5},{"alpha":[0,1],"coef":"1/4"}]}"#;
        match AnyPoly::from_json(text).unwrap() {
            AnyPoly::Float(q) => {
                assert_eq!(q.coef(&MultiIndex(vec![1, 0])), 0.5);
                assert_eq!(q.coef(&MultiIndex(vec![0, 1])), 0.25);
            }
            other => panic!("expected float polynomial, got {other:?}"),
        }
        assert!(AnyPoly::from_json(r#"{"n":2,"m":1,"terms":[{"alpha":[2,0],"coef":1}]}"#).is_err());
    }
}
