//! Exact rationals and the scalar trait shared by the exact and floating paths.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{OrbitopeError, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // Ratio::to_f64 handles huge numerators/denominators without overflow.
    ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// `"num/den"` or `"num"`.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| OrbitopeError::Parse(format!("bad rational {s:?}: {e}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(OrbitopeError::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rat::new(parse_int(n)?, d))
        }
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

/// Best rational approximation with denominator at most `max_den` (continued fractions).
pub fn rat_from_f64_approx(x: f64, max_den: i64) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    let sign = if x < 0.0 { -1 } else { 1 };
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1): (i128, i128, i128, i128) = (0, 1, 1, 0);
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e15 {
            break;
        }
        let a = a as i128;
        let p2 = a * p1 + p0;
        let q2 = a * q1 + q0;
        if q2 > max_den as i128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a as f64;
        if frac < 1e-13 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    Some(Rat::new(BigInt::from(sign * p1), BigInt::from(q1)))
}

/// Field scalars usable by both regimes: exact [`Rat`] and `f64`.
pub trait Scalar:
    Clone + PartialEq + Debug + Num + Neg<Output = Self> + Send + Sync + 'static
{
    const EXACT: bool;
    fn from_rat(r: &Rat) -> Self;
    fn from_i64(v: i64) -> Self;
    fn as_f64(&self) -> f64;
    fn abs_val(&self) -> Self;
    /// Exact zero test for `Rat`; magnitude below `tol` for floats.
    fn is_negligible(&self, tol: f64) -> bool;
}

impl Scalar for Rat {
    const EXACT: bool = true;
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
    fn from_i64(v: i64) -> Self {
        rat_int(v)
    }
    fn as_f64(&self) -> f64 {
        rat_to_f64(self)
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn from_rat(r: &Rat) -> Self {
        rat_to_f64(r)
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }
}

/// JSON form of a scalar: `"num/den"` for [`Rat`], a number for `f64`.
pub fn scalar_to_json<S: Scalar>(v: &S) -> serde_json::Value {
    let any: &dyn std::any::Any = v;
    match any.downcast_ref::<Rat>() {
        Some(r) => serde_json::Value::String(format_rat(r)),
        None => serde_json::Number::from_f64(v.as_f64())
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null),
    }
}

/// Serialize-only adapters for generic scalars (`serialize_with`).
pub mod serde_scalar {
    use super::*;
    use serde::{Serialize, Serializer};

    pub fn one<S: Scalar, Ser: Serializer>(v: &S, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        scalar_to_json(v).serialize(s)
    }

    pub fn vec<S: Scalar, Ser: Serializer>(v: &[S], s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        v.iter().map(scalar_to_json).collect::<Vec<_>>().serialize(s)
    }

    pub fn vecs<S: Scalar, Ser: Serializer>(
        v: &[Vec<S>],
        s: Ser,
    ) -> std::result::Result<Ser::Ok, Ser::Error> {
        v.iter()
            .map(|r| r.iter().map(scalar_to_json).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }
}

/// Serde adapter writing a [`Rat`] as `"num/den"`.
pub mod serde_rat {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Option<Rat>`.
pub mod serde_rat_opt {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rat>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rat(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Rat>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| parse_rat(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Serde adapter for `Vec<Rat>`.
pub mod serde_rat_vec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(format_rat).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rat>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rat(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rat(" -7 ").unwrap(), rat_int(-7));
        assert_eq!(format_rat(&rat(-10, 4)), "-5/2");
        assert_eq!(format_rat(&rat(8, 4)), "2");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn continued_fraction_recovery() {
        assert_eq!(rat_from_f64_approx(2.0 / 3.0, 1000).unwrap(), rat(2, 3));
        assert_eq!(rat_from_f64_approx(-0.2, 1000).unwrap(), rat(-1, 5));
        assert_eq!(rat_from_f64_approx(36.0 / 5.0, 1000).unwrap(), rat(36, 5));
        assert_eq!(rat_from_f64_approx(0.0, 10).unwrap(), rat_int(0));
    }

    fn arb_rat() -> impl Strategy<Value = Rat> {
        (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn rat_field_laws(a in arb_rat(), b in arb_rat(), c in arb_rat()) {
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        }

        #[test]
        fn normalization_idempotent(n in -10_000i64..10_000, d in 1i64..10_000, s in 1i64..50) {
            let r = Rat::new(BigInt::from(n * s), BigInt::from(d * s));
            prop_assert_eq!(&r, &rat(n, d));
            prop_assert!(r.denom().is_positive());
            let again = Rat::new(r.numer().clone(), r.denom().clone());
            prop_assert_eq!(again.numer(), r.numer());
            prop_assert_eq!(again.denom(), r.denom());
            prop_assert_eq!(parse_rat(&format_rat(&r)).unwrap(), r);
        }
    }
}
