use num_bigint::BigUint;
use num_traits::One;

/// Exact binomial coefficient; zero outside `0 <= b <= a`.
pub fn binomial(a: i64, b: i64) -> BigUint {
    if b < 0 || a < 0 || b > a {
        return BigUint::from(0u32);
    }
    let b = b.min(a - b) as u64;
    let a = a as u64;
    let mut acc = BigUint::one();
    for i in 0..b {
        // Each prefix product is itself a binomial coefficient, so the division is exact.
        acc = acc * BigUint::from(a - i) / BigUint::from(i + 1);
    }
    acc
}

/// `binomial` as `f64` for size guards and float formulas.
pub fn binomial_f64(a: i64, b: i64) -> f64 {
    use num_traits::ToPrimitive;
    binomial(a, b).to_f64().unwrap_or(f64::INFINITY)
}

/// `(2k-1)!! = 1·3·5···(2k-1)`, with the empty product for `k = 0`.
pub fn odd_double_factorial(k: u32) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(2 * i - 1))
}

pub fn factorial(k: u32) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Natural logarithm of a positive big integer, without overflowing `f64`.
pub fn big_ln(x: &BigUint) -> f64 {
    use num_traits::ToPrimitive;
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal(rows: usize) -> Vec<Vec<BigUint>> {
        let mut t: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
        for a in 1..=rows {
            let prev = &t[a - 1];
            let mut row = vec![BigUint::one(); a + 1];
            for b in 1..a {
                row[b] = &prev[b - 1] + &prev[b];
            }
            t.push(row);
        }
        t
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(4, 2), BigUint::from(6u32));
        assert_eq!(binomial(6, 2), BigUint::from(15u32));
        assert_eq!(binomial(10, 5), BigUint::from(252u32));
        assert_eq!(binomial(3, 5), BigUint::from(0u32));
        assert_eq!(binomial(3, -1), BigUint::from(0u32));
    }

    #[test]
    fn binomial_matches_pascal() {
        let t = pascal(60);
        for a in 0..=60 {
            for b in 0..=a {
                assert_eq!(binomial(a as i64, b as i64), t[a][b], "C({a},{b})");
            }
        }
    }

    #[test]
    fn double_factorial_examples() {
        assert_eq!(odd_double_factorial(0), BigUint::from(1u32));
        assert_eq!(odd_double_factorial(1), BigUint::from(1u32));
        assert_eq!(odd_double_factorial(3), BigUint::from(15u32));
    }

    #[test]
    fn big_ln_agrees_with_float() {
        let x = factorial(30);
        assert!((big_ln(&x) - (1..=30).map(|i| (i as f64).ln()).sum::<f64>()).abs() < 1e-10);
        let y = factorial(400);
        let want: f64 = (1..=400).map(|i| (i as f64).ln()).sum();
        assert!((big_ln(&y) - want).abs() < 1e-9 * want);
    }

    #[test]
    fn double_factorial_identity() {
        for k in 0..=20u32 {
            let lhs = odd_double_factorial(k) * (BigUint::one() << k) * factorial(k);
            assert_eq!(lhs, factorial(2 * k), "k = {k}");
        }
    }
}
