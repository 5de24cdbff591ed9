use std::collections::BTreeMap;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::error::{invalid, OrbitopeError, Result};
use crate::math::scalar::scalar_to_json;
use crate::math::{parse_rat, rat_int, rat_to_f64, Rat, Scalar};

/// Largest `C(n, m)` for which dense coordinates are built.
pub const MAX_COORDS: usize = 1 << 20;

/// Subsets of `{0..n}` as bit masks, graded by size and listed in colex order,
/// so the rank of a subset is `Σ_i C(b_i, i + 1)` over its sorted elements `b_i`.
#[derive(Debug, Clone)]
pub struct ExteriorTables {
    n: usize,
    levels: Vec<Vec<u64>>,
    binom: Vec<Vec<usize>>,
}

impl ExteriorTables {
    /// Tables for all subset sizes `0..=top`.
    pub fn new(n: usize, top: usize) -> Result<Self> {
        if n == 0 || n > 40 || top > n {
            return invalid(format!("exterior tables need 1 <= n <= 40 and m <= n (n = {n}, m = {top})"));
        }
        let mut binom = vec![vec![0usize; n + 2]; n + 1];
        for a in 0..=n {
            binom[a][0] = 1;
            for b in 1..=a {
                binom[a][b] = binom[a - 1][b - 1] + if b < a { binom[a - 1][b] } else { 0 };
            }
        }
        let mut levels = Vec::with_capacity(top + 1);
        for k in 0..=top {
            let count = binom[n][k];
            if count > MAX_COORDS {
                return Err(OrbitopeError::Budget(format!("C({n},{k}) = {count} coordinates")));
            }
            let mut masks = Vec::with_capacity(count);
            if k == 0 {
                masks.push(0);
            } else {
                let mut s: u64 = (1 << k) - 1;
                while s < (1u64 << n) {
                    masks.push(s);
                    let c = s & s.wrapping_neg();
                    let r = s + c;
                    s = (((r ^ s) >> 2) / c) | r;
                }
            }
            levels.push(masks);
        }
        Ok(ExteriorTables { n, levels, binom })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, k: usize) -> &[u64] {
        &self.levels[k]
    }

    pub fn len(&self, k: usize) -> usize {
        self.levels[k].len()
    }

    pub fn rank(&self, mut mask: u64) -> usize {
        let mut r = 0;
        let mut i = 1;
        while mask != 0 {
            let b = mask.trailing_zeros() as usize;
            r += self.binom[b][i];
            i += 1;
            mask &= mask - 1;
        }
        r
    }

    /// `a ∧ x` for a dense `k`-vector `a` and a vector `x`.
    pub fn wedge_vec(&self, k: usize, a: &[f64], x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len(k + 1)];
        for (&s, &av) in self.levels[k].iter().zip(a) {
            if av == 0.0 {
                continue;
            }
            for (r, &xr) in x.iter().enumerate() {
                if s >> r & 1 == 1 || xr == 0.0 {
                    continue;
                }
                let sign = if (s >> (r + 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                out[self.rank(s | 1 << r)] += sign * av * xr;
            }
        }
        out
    }

    /// `x_1 ∧ … ∧ x_k` in dense coordinates.
    pub fn wedge_all<'a>(&self, cols: impl IntoIterator<Item = &'a Vec<f64>>) -> Vec<f64> {
        let mut cur = vec![1.0];
        for (k, x) in cols.into_iter().enumerate() {
            cur = self.wedge_vec(k, &cur, x);
        }
        cur
    }

    /// The vector `r ↦ ⟨c, e_r ∧ w⟩` for a dense `(k−1)`-vector `w` and `k`-vector `c`.
    pub fn contract(&self, k: usize, w: &[f64], c: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.n];
        for (&s, &wv) in self.levels[k - 1].iter().zip(w) {
            if wv == 0.0 {
                continue;
            }
            for (r, gr) in g.iter_mut().enumerate() {
                if s >> r & 1 == 1 {
                    continue;
                }
                let below = (s & ((1u64 << r) - 1)).count_ones();
                let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
                *gr += sign * wv * c[self.rank(s | 1 << r)];
            }
        }
        g
    }
}

pub(crate) fn mask_of(idx: &[usize]) -> u64 {
    idx.iter().fold(0, |m, &i| m | 1 << i)
}

pub(crate) fn indices_of(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        out.push(mask.trailing_zeros() as usize);
        mask &= mask - 1;
    }
    out
}

/// Element of `∧^m R^n`: sorted 0-based index tuples mapped to nonzero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiVector<S> {
    n: usize,
    m: usize,
    coords: BTreeMap<Vec<usize>, S>,
}

impl<S: Scalar> MultiVector<S> {
    pub fn zero(n: usize, m: usize) -> Result<Self> {
        if m > n || n == 0 || n > 40 {
            return invalid(format!("need 0 <= m <= n <= 40 (n = {n}, m = {m})"));
        }
        Ok(MultiVector {
            n,
            m,
            coords: BTreeMap::new(),
        })
    }

    /// Builds from `(I, c)` pairs with strictly increasing 0-based `I`; repeated keys add up.
    pub fn from_coords(n: usize, m: usize, coords: impl IntoIterator<Item = (Vec<usize>, S)>) -> Result<Self> {
        let mut out = Self::zero(n, m)?;
        for (idx, c) in coords {
            if idx.len() != m {
                return invalid(format!("index {idx:?} has length {}, expected {m}", idx.len()));
            }
            if idx.windows(2).any(|w| w[0] >= w[1]) || idx.iter().any(|&i| i >= n) {
                return invalid(format!("index {idx:?} must be strictly increasing within 0..{n}"));
            }
            out.add_at(idx, c);
        }
        Ok(out)
    }

    /// `e_{i_1} ∧ … ∧ e_{i_m}` for sorted 0-based indices.
    pub fn basis(n: usize, idx: &[usize]) -> Result<Self> {
        Self::from_coords(n, idx.len(), [(idx.to_vec(), S::one())])
    }

    fn add_at(&mut self, idx: Vec<usize>, c: S) {
        let slot = self.coords.entry(idx.clone()).or_insert_with(S::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.coords.remove(&idx);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn coords(&self) -> &BTreeMap<Vec<usize>, S> {
        &self.coords
    }

    pub fn get(&self, idx: &[usize]) -> S {
        self.coords.get(idx).cloned().unwrap_or_else(S::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.coords.len()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.m != other.m {
            return invalid(format!(
                "multivectors live in different spaces: ∧^{}R^{} vs ∧^{}R^{}",
                self.m, self.n, other.m, other.n
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (k, v) in &other.coords {
            out.add_at(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = self.clone();
        out.coords = self
            .coords
            .iter()
            .map(|(k, v)| (k.clone(), v.clone() * s.clone()))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        out
    }

    pub fn dot(&self, other: &Self) -> Result<S> {
        self.check_same(other)?;
        Ok(self
            .coords
            .iter()
            .filter_map(|(k, v)| other.coords.get(k).map(|w| v.clone() * w.clone()))
            .fold(S::zero(), |a, b| a + b))
    }

    pub fn norm_sq(&self) -> S {
        self.coords.values().fold(S::zero(), |a, v| a + v.clone() * v.clone())
    }

    /// Exterior product `self ∧ other`.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return invalid("wedge factors must share n");
        }
        let mut out = Self::zero(self.n, self.m + other.m)?;
        for (a, x) in &self.coords {
            for (b, y) in &other.coords {
                if let Some((merged, sign)) = merge_sign(a, b) {
                    let c = x.clone() * y.clone();
                    out.add_at(merged, if sign { c } else { -c });
                }
            }
        }
        Ok(out)
    }

    pub fn to_f64(&self) -> MultiVector<f64> {
        MultiVector {
            n: self.n,
            m: self.m,
            coords: self.coords.iter().map(|(k, v)| (k.clone(), v.as_f64())).collect(),
        }
    }

    /// Dense coordinates in the colex order of `tables`.
    pub fn to_dense(&self, tables: &ExteriorTables) -> Vec<f64> {
        let mut out = vec![0.0; tables.len(self.m)];
        for (k, v) in &self.coords {
            out[tables.rank(mask_of(k))] = v.as_f64();
        }
        out
    }
}

impl MultiVector<f64> {
    pub fn from_dense(tables: &ExteriorTables, m: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != tables.len(m) {
            return Err(OrbitopeError::DimensionMismatch {
                expected: tables.len(m),
                got: dense.len(),
            });
        }
        Self::from_coords(
            tables.n(),
            m,
            tables
                .level(m)
                .iter()
                .zip(dense)
                .filter(|(_, &v)| v != 0.0)
                .map(|(&s, &v)| (indices_of(s), v)),
        )
    }
}

/// Sorted union of disjoint index lists and whether the merge permutation is even.
fn merge_sign(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut inversions = 0usize;
    for &x in a {
        for &y in b {
            if x == y {
                return None;
            }
            if x > y {
                inversions += 1;
            }
        }
    }
    let mut merged: Vec<usize> = a.iter().chain(b).copied().collect();
    merged.sort_unstable();
    Some((merged, inversions.is_multiple_of(2)))
}

impl<S: Scalar> Serialize for MultiVector<S> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let coords: Vec<Value> = self
            .coords
            .iter()
            .map(|(k, v)| {
                serde_json::json!({
                    "I": k.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "c": scalar_to_json(v),
                })
            })
            .collect();
        let mut st = s.serialize_struct("MultiVector", 3)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("m", &self.m)?;
        st.serialize_field("coords", &coords)?;
        st.end()
    }
}

#[derive(Deserialize)]
struct MultiVectorJson {
    n: usize,
    m: usize,
    coords: Vec<CoordJson>,
}

#[derive(Deserialize)]
struct CoordJson {
    #[serde(rename = "I")]
    index: Vec<usize>,
    c: Value,
}

/// A parsed multivector: exact when every coefficient is an integer or `"num/den"` string.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMultiVector {
    Exact(MultiVector<Rat>),
    Float(MultiVector<f64>),
}

impl AnyMultiVector {
    /// Parses `{"n":…,"m":…,"coords":[{"I":[1-based indices],"c":…}]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: MultiVectorJson =
            serde_json::from_str(text).map_err(|e| OrbitopeError::Parse(format!("multivector JSON: {e}")))?;
        let mut keys = Vec::with_capacity(v.coords.len());
        for c in &v.coords {
            if c.index.contains(&0) {
                return Err(OrbitopeError::Parse(format!("indices are 1-based, got {:?}", c.index)));
            }
            keys.push(c.index.iter().map(|i| i - 1).collect::<Vec<_>>());
        }
        let exact = v.coords.iter().all(|c| match &c.c {
            Value::String(_) => true,
            Value::Number(num) => num.is_i64(),
            _ => false,
        });
        let rat_of = |c: &Value| -> Result<Rat> {
            match c {
                Value::String(s) => parse_rat(s),
                Value::Number(num) if num.is_i64() => Ok(rat_int(num.as_i64().unwrap())),
                other => Err(OrbitopeError::Parse(format!("bad coefficient {other}"))),
            }
        };
        if exact {
            let pairs = keys
                .into_iter()
                .zip(&v.coords)
                .map(|(k, c)| Ok((k, rat_of(&c.c)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(AnyMultiVector::Exact(MultiVector::from_coords(v.n, v.m, pairs)?))
        } else {
            let pairs = keys
                .into_iter()
                .zip(&v.coords)
                .map(|(k, c)| {
                    let x = match &c.c {
                        Value::Number(num) => num.as_f64().unwrap_or(f64::NAN),
                        other => rat_to_f64(&rat_of(other)?),
                    };
                    if !x.is_finite() {
                        return Err(OrbitopeError::Parse(format!("non-finite coefficient for {k:?}")));
                    }
                    Ok((k, x))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(AnyMultiVector::Float(MultiVector::from_coords(v.n, v.m, pairs)?))
        }
    }

    pub fn to_f64(&self) -> MultiVector<f64> {
        match self {
            AnyMultiVector::Exact(v) => v.to_f64(),
            AnyMultiVector::Float(v) => v.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::rat;

    #[test]
    fn colex_ranks_are_dense() {
        let t = ExteriorTables::new(7, 7).unwrap();
        for k in 0..=7 {
            for (i, &s) in t.level(k).iter().enumerate() {
                assert_eq!(t.rank(s), i);
                assert_eq!(s.count_ones() as usize, k);
            }
        }
        assert_eq!(t.len(3), 35);
    }

    #[test]
    fn wedge_signs() {
        let e = |i| MultiVector::<Rat>::basis(4, &[i]).unwrap();
        let e21 = e(1).wedge(&e(0)).unwrap();
        assert_eq!(e21.get(&[0, 1]), rat(-1, 1));
        assert!(e(2).wedge(&e(2)).unwrap().coords().is_empty());
        let a = e(0).wedge(&e(2)).unwrap();
        let b = e(1).wedge(&e(3)).unwrap();
        // e1∧e3∧e2∧e4 = −e1∧e2∧e3∧e4
        assert_eq!(a.wedge(&b).unwrap().get(&[0, 1, 2, 3]), rat(-1, 1));
    }

    #[test]
    fn dense_wedge_matches_sparse() {
        let t = ExteriorTables::new(5, 3).unwrap();
        let x = vec![1.0, 2.0, 0.0, -1.0, 0.5];
        let y = vec![0.0, 1.0, 3.0, 1.0, -2.0];
        let z = vec![2.0, 0.0, 1.0, 1.0, 1.0];
        let dense = t.wedge_all([&x, &y, &z]);
        let lift = |v: &Vec<f64>| {
            MultiVector::from_coords(5, 1, v.iter().enumerate().map(|(i, &c)| (vec![i], c))).unwrap()
        };
        let sparse = lift(&x).wedge(&lift(&y)).unwrap().wedge(&lift(&z)).unwrap();
        let sd = sparse.to_dense(&t);
        for (a, b) in dense.iter().zip(&sd) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn json_round_trip() {
        let v = MultiVector::from_coords(4, 2, [(vec![0, 1], rat(1, 1)), (vec![2, 3], rat(-1, 2))]).unwrap();
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(text, r#"{"n":4,"m":2,"coords":[{"I":[1,2],"c":"1"},{"I":[3,4],"c":"-1/2"}]}"#);
        assert_eq!(AnyMultiVector::from_json(&text).unwrap(), AnyMultiVector::Exact(v));
        let f = AnyMultiVector::from_json(r#"{"n":3,"m":1,"coords":[{"I":[2],"c":0.25}]}"#).unwrap();
        assert_eq!(f.to_f64().get(&[1]), 0.25);
        assert!(AnyMultiVector::from_json(r#"{"n":3,"m":2,"coords":[{"I":[2,1],"c":1}]}"#).is_err());
        assert!(AnyMultiVector::from_json(r#"{"n":3,"m":1,"coords":[{"I":[0],"c":1}]}"#).is_err());
    }
}
