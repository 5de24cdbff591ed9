//! Classical calibrations. Coordinates are paired as `(e_1, e_2), (e_3, e_4), …`,
//! i.e. `e_{2j−1} + i e_{2j}` spans the `j`-th complex line.

use super::multivector::MultiVector;
use crate::error::{invalid, Result};
use crate::math::Rat;
use num_traits::One;

/// `ω^p / p!` with `ω = Σ_{j=1}^{q} e_{2j−1} ∧ e_{2j}`, an element of `∧^{2p} R^{2q}`.
pub fn kaehler_power(p: usize, q: usize) -> Result<MultiVector<Rat>> {
    if p == 0 || p > q {
        return invalid(format!("Kähler power needs 1 <= p <= q (p = {p}, q = {q})"));
    }
    let mut terms = Vec::new();
    let mut pick: Vec<usize> = (0..p).collect();
    loop {
        terms.push((pick.iter().flat_map(|&j| [2 * j, 2 * j + 1]).collect(), Rat::one()));
        let Some(i) = (0..p).rev().find(|&i| pick[i] < q - p + i) else {
            break;
        };
        pick[i] += 1;
        for l in i + 1..p {
            pick[l] = pick[l - 1] + 1;
        }
    }
    MultiVector::from_coords(2 * q, 2 * p, terms)
}

/// The Kähler calibration of degree `m` on `R^n`; both must be even.
pub fn kaehler_calibration(n: usize, m: usize) -> Result<MultiVector<Rat>> {
    if n % 2 == 1 || m % 2 == 1 {
        return invalid(format!("the Kähler calibration needs even n and m (n = {n}, m = {m})"));
    }
    kaehler_power(m / 2, n / 2)
}

/// `Re (e_1 + i e_2) ∧ … ∧ (e_{2m−1} + i e_{2m})` in `∧^m R^{2m}`.
pub fn special_lagrangian(m: usize) -> Result<MultiVector<Rat>> {
    if m == 0 || m > 20 {
        return invalid(format!("special Lagrangian degree must be in 1..=20, got {m}"));
    }
    let terms = (0u32..1 << m).filter(|s| s.count_ones() % 2 == 0).map(|s| {
        let idx = (0..m).map(|j| 2 * j + (s >> j & 1) as usize).collect();
        let sign = if (s.count_ones() / 2) % 2 == 0 { 1 } else { -1 };
        (idx, Rat::from_integer(sign.into()))
    });
    MultiVector::from_coords(2 * m, m, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{binomial, factorial, rat, rat_int};
    use num_bigint::BigInt;
    use num_traits::Zero;

    fn e(n: usize, idx: &[usize]) -> MultiVector<Rat> {
        MultiVector::basis(n, idx).unwrap()
    }

    fn big(x: num_bigint::BigUint) -> Rat {
        Rat::from_integer(BigInt::from(x))
    }

    #[test]
    fn kaehler_examples() {
        let f = kaehler_power(1, 2).unwrap();
        assert_eq!(f, e(4, &[0, 1]).add(&e(4, &[2, 3])).unwrap());
        assert_eq!(f.norm_sq(), rat_int(2));
        let g = kaehler_power(2, 2).unwrap();
        assert_eq!(g, e(4, &[0, 1, 2, 3]));
        let h = kaehler_power(1, 3).unwrap();
        assert_eq!(h.num_terms(), 3);
        assert_eq!(h.norm_sq(), rat_int(3));
        assert!(kaehler_power(3, 2).is_err());
        assert!(kaehler_calibration(5, 2).is_err());
        assert_eq!(kaehler_calibration(6, 4).unwrap(), kaehler_power(2, 3).unwrap());
    }

    #[test]
    fn kaehler_equals_wedge_power_over_factorial() {
        for q in 1..=4 {
            let omega = (0..q)
                .map(|j| e(2 * q, &[2 * j, 2 * j + 1]))
                .reduce(|a, b| a.add(&b).unwrap())
                .unwrap();
            let mut power = omega.clone();
            for p in 1..=q {
                if p > 1 {
                    power = power.wedge(&omega).unwrap();
                }
                let want = power.scale(&big(factorial(p as u32)).recip());
                let got = kaehler_power(p, q).unwrap();
                assert_eq!(got, want, "p = {p}, q = {q}");
                assert_eq!(got.norm_sq(), big(binomial(q as i64, p as i64)));
            }
        }
    }

    #[test]
    fn special_lagrangian_examples() {
        let a = special_lagrangian(2).unwrap();
        assert_eq!(a, e(4, &[0, 2]).add(&e(4, &[1, 3]).scale(&rat(-1, 1))).unwrap());
        assert_eq!(a.norm_sq(), rat_int(2));
        assert_eq!(special_lagrangian(3).unwrap().norm_sq(), rat_int(4));
    }

    #[test]
    fn special_lagrangian_equals_complex_wedge() {
        for m in 1..=5 {
            let n = 2 * m;
            let (mut re, mut im) = (e(n, &[0]), e(n, &[1]));
            for j in 1..m {
                let (a, b) = (e(n, &[2 * j]), e(n, &[2 * j + 1]));
                let nre = re.wedge(&a).unwrap().add(&im.wedge(&b).unwrap().scale(&rat(-1, 1))).unwrap();
                let nim = re.wedge(&b).unwrap().add(&im.wedge(&a).unwrap()).unwrap();
                re = nre;
                im = nim;
            }
            assert_eq!(special_lagrangian(m).unwrap(), re, "m = {m}");
            let want: Rat = (0..=m / 2).map(|j| big(binomial(m as i64, 2 * j as i64))).sum();
            assert_eq!(re.norm_sq(), want);
            assert!(!im.norm_sq().is_zero());
        }
    }
}
