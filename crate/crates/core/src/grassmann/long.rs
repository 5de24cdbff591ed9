use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::comass::{comass_lower, dk_factor, ser_big, Functional, DEFAULT_RESTARTS, MIN_COMASS_SAMPLES};
use super::dk::d_k_rect;
use super::frame::haar_pluecker_dense;
use super::multivector::{ExteriorTables, MultiVector};
use crate::error::{invalid, Result};
use crate::math::dense::dot;
use crate::math::{binomial, par_blocks, RngSeed, SeededRng};

pub const MIN_POOL: usize = 10;
pub const DEFAULT_LONG_SAMPLES: usize = 20_000;

#[derive(Debug, Clone, Serialize)]
pub struct LongCalibrationReport {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub pool: usize,
    pub mc_samples: usize,
    pub restarts: usize,
    pub seed: RngSeed,
    #[serde(serialize_with = "ser_big")]
    pub d_k: BigUint,
    /// `C(n, m)`, the dimension of `∧^m R^n`.
    pub dim: usize,
    pub chosen: usize,
    /// `d_k^{1/2k} ‖c‖_{2k}` of the chosen unit vector before rescaling.
    pub unit_upper: f64,
    /// `⟨c, c⟩` after rescaling to upper bound 1.
    pub length_sq: f64,
    /// `C(n, m) / (n m ln(m+1))`.
    pub growth_scale: f64,
    pub ratio_to_growth_scale: f64,
    /// `C(n, m)`: no functional of comass 1 is longer.
    pub ceiling: f64,
    pub ratio_to_ceiling: f64,
    /// Ascent lower bound for the comass of the rescaled `c` (at most 1 up to sampling error).
    pub comass_lower: f64,
    /// `C(n/2, m/2)` when both are even.
    pub kaehler_length_sq: Option<f64>,
    /// `Σ_j C(m, 2j)` when `n = 2m`.
    pub special_lagrangian_length_sq: Option<f64>,
    pub exceeds_kaehler: Option<bool>,
}

fn binom_f64(a: usize, b: usize) -> f64 {
    binomial(a as i64, b as i64).to_f64().unwrap_or(f64::INFINITY)
}

/// Searches a pool of random unit functionals on `∧^m R^n` for one whose `d_k` upper bound
/// on the comass is smallest, and rescales it so that bound equals 1.
pub fn long_calibration(n: usize, m: usize, pool: usize, k: usize, seed: RngSeed) -> Result<(MultiVector<f64>, LongCalibrationReport)> {
    long_calibration_with(n, m, pool, k, DEFAULT_LONG_SAMPLES, DEFAULT_RESTARTS, seed)
}

pub fn long_calibration_with(
    n: usize,
    m: usize,
    pool: usize,
    k: usize,
    mc_samples: usize,
    restarts: usize,
    seed: RngSeed,
) -> Result<(MultiVector<f64>, LongCalibrationReport)> {
    if pool < MIN_POOL {
        return invalid(format!("pool must be at least {MIN_POOL}, got {pool}"));
    }
    if mc_samples < MIN_COMASS_SAMPLES {
        return invalid(format!("need at least {MIN_COMASS_SAMPLES} Monte Carlo samples, got {mc_samples}"));
    }
    let d_k = d_k_rect(m, n, k)?;
    let tables = ExteriorTables::new(n, m)?;
    let dim = tables.len(m);
    let mut rng = SeededRng::new(seed.derive(0));
    let candidates: Vec<Vec<f64>> = (0..pool).map(|_| rng.unit_vector(dim)).collect();
    // Common Haar sample for every candidate.
    let e = 2 * k as i32;
    let sums = par_blocks(mc_samples, seed.derive(1), |_, rng, count| {
        let mut acc = vec![0.0; pool];
        for _ in 0..count {
            let y = haar_pluecker_dense(&tables, m, rng);
            for (a, c) in acc.iter_mut().zip(&candidates) {
                *a += dot(c, &y).powi(e);
            }
        }
        acc
    })
    .into_iter()
    .fold(vec![0.0; pool], |mut a, b| {
        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        a
    });
    let factor = dk_factor(&d_k, k);
    let uppers: Vec<f64> = sums
        .iter()
        .map(|s| factor * (s / mc_samples as f64).powf(1.0 / e as f64))
        .collect();
    let mut chosen = 0;
    for (i, u) in uppers.iter().enumerate() {
        if *u < uppers[chosen] {
            chosen = i;
        }
    }
    let unit_upper = uppers[chosen];
    let scaled: Vec<f64> = candidates[chosen].iter().map(|x| x / unit_upper).collect();
    let c = MultiVector::from_dense(&tables, m, &scaled)?;
    let f = Functional::new(&c)?;
    let (lower, _) = comass_lower(&f, restarts, seed.derive(2))?;

    let length_sq = 1.0 / (unit_upper * unit_upper);
    let ceiling = dim as f64;
    let growth_scale = ceiling / ((n * m) as f64 * ((m + 1) as f64).ln());
    let kaehler_length_sq = (n.is_multiple_of(2) && m.is_multiple_of(2)).then(|| binom_f64(n / 2, m / 2));
    let special_lagrangian_length_sq = (n == 2 * m).then(|| (0..=m / 2).map(|j| binom_f64(m, 2 * j)).sum());
    let report = LongCalibrationReport {
        n,
        m,
        k,
        pool,
        mc_samples,
        restarts,
        seed,
        d_k,
        dim,
        chosen,
        unit_upper,
        length_sq,
        growth_scale,
        ratio_to_growth_scale: length_sq / growth_scale,
        ceiling,
        ratio_to_ceiling: length_sq / ceiling,
        comass_lower: lower,
        kaehler_length_sq,
        special_lagrangian_length_sq,
        exceeds_kaehler: kaehler_length_sq.map(|l| length_sq > l),
    };
    Ok((c, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn within_ceiling_and_comass_bounded() {
        let (c, r) = long_calibration_with(4, 2, 20, 3, 5000, 8, RngSeed(1)).unwrap();
        assert!(r.ratio_to_ceiling <= 1.0, "{r:?}");
        assert!((c.norm_sq() - r.length_sq).abs() < 1e-9);
        assert!(r.comass_lower <= 1.0 + 0.05, "{r:?}");
        assert_eq!(r.kaehler_length_sq, Some(2.0));
        assert_eq!(r.special_lagrangian_length_sq, Some(2.0));
        assert!(long_calibration(4, 2, 5, 2, RngSeed(0)).is_err());
    }

    #[test]
    fn kaehler_reference_at_six() {
        let (_, r) = long_calibration_with(6, 2, 10, 2, 2000, 4, RngSeed(2)).unwrap();
        assert_eq!(r.kaehler_length_sq, Some(3.0));
        assert_eq!(r.special_lagrangian_length_sq, None);
    }
}
