//! Sandwich bounds for maxima of functionals on orbits, and the experiments built on them.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, OrbitopeError, Result};
use crate::grassmann::comass::{dk_factor, ser_big};
use crate::grassmann::frame::haar_pluecker_dense;
use crate::grassmann::ExteriorTables;
use crate::math::dense::dot;
use crate::math::{binomial, MeanVar, MultiIndex, Rat, RngSeed, Scalar, SeededRng};
use crate::sphere::grid::{sup_norm_on_grid, DEFAULT_GRID, DEFAULT_STARTS, DEFAULT_STEPS};
use crate::sphere::norm::exact_within_budget;
use crate::sphere::{lp_norm_2k, orthonormal_basis_U, HomPoly, MomentTable, NormMethod, PolyEvaluator, SphereGrid};

#[derive(Debug, Clone, Serialize)]
pub struct SandwichBound {
    /// Lower bound on `max |p|` (or on `max p` in centered mode).
    pub lower: f64,
    pub upper: f64,
    /// `‖p‖_{2k}`.
    pub norm: f64,
    pub norm_std_err: f64,
    #[serde(serialize_with = "ser_big")]
    pub d_k: BigUint,
    pub k: u32,
    pub centered: bool,
    pub exact_norm: bool,
}

/// `d_k = C(n + mk − 1, mk)`, the dimension of the symmetric power spanned by `x^{⊗mk}`.
pub fn sphere_d_k(n: usize, m: u32, k: u32) -> BigUint {
    let d = (m * k) as i64;
    binomial(n as i64 + d - 1, d)
}

/// `‖p‖_{2k} ≤ max |p| ≤ d_k^{1/2k} ‖p‖_{2k}`. In centered mode (`k` odd and `∫ p^k = 0`)
/// the bounds are `d_k^{−1/2k} ‖p‖_{2k} ≤ max p ≤ d_k^{1/2k} ‖p‖_{2k}`.
/// The norm is exact when the expansion fits the budget, otherwise `mc_fallback` is used.
pub fn sphere_sandwich<S: Scalar>(p: &HomPoly<S>, k: u32, centered: bool, mc_fallback: NormMethod) -> Result<SandwichBound> {
    if k == 0 {
        return invalid("k must be positive");
    }
    let (n, m) = (p.n(), p.degree());
    if centered {
        if k.is_multiple_of(2) {
            return invalid(format!("centered mode needs odd k, got {k}"));
        }
        if !exact_within_budget(n, m, k.div_ceil(2)) {
            return invalid("centered mode needs ∫ p^k to be computed exactly; expansion is over budget");
        }
        let pk = p.pow(k);
        let mean = MomentTable::new(n).mean(&pk)?;
        let scale = MomentTable::new(n).inner(&pk, &pk)?.as_f64().sqrt();
        if !mean.is_negligible(1e-12 * scale.max(1e-300)) {
            return Err(OrbitopeError::InvalidArgument(format!(
                "centered mode needs ∫ p^k dσ = 0, got {:e}",
                mean.as_f64()
            )));
        }
    }
    let method = if exact_within_budget(n, m, k) {
        NormMethod::Exact
    } else {
        mc_fallback
    };
    let est = lp_norm_2k(p, k, method)?;
    let d_k = sphere_d_k(n, m, k);
    let f = dk_factor(&d_k, k as usize);
    Ok(SandwichBound {
        lower: if centered { est.value / f } else { est.value },
        upper: est.value * f,
        norm: est.value,
        norm_std_err: est.std_err,
        d_k,
        k,
        centered,
        exact_norm: est.exact,
    })
}

/// Binary entropy `H(x) = x ln(1/x) + (1−x) ln(1/(1−x))`, with `H(0) = H(1) = 0`.
pub fn entropy(x: f64) -> f64 {
    let t = |y: f64| if y <= 0.0 { 0.0 } else { -y * y.ln() };
    t(x) + t(1.0 - x)
}

/// `exp(a H(b/a)) ≥ C(a, b)`.
pub fn entropy_bound(a: u64, b: u64) -> Result<f64> {
    if a == 0 || b > a {
        return invalid(format!("entropy bound needs 0 <= b <= a and a >= 1 (a = {a}, b = {b})"));
    }
    Ok((a as f64 * entropy(b as f64 / a as f64)).exp())
}

/// `√(2k ⟨v,v⟩ / d)`: bound on the average over unit `c` of `‖⟨c, g v⟩‖_{2k}`.
pub fn expected_norm_bound(d: usize, k: u32, v_norm_sq: f64) -> Result<f64> {
    if d == 0 || k == 0 {
        return invalid("d and k must be positive");
    }
    Ok((2.0 * k as f64 * v_norm_sq / d as f64).sqrt())
}

/// Average over random unit functionals `c` on `∧^m R^n` of `‖⟨c, ·⟩‖_{2k}` on the Grassmannian.
#[derive(Debug, Clone, Serialize)]
pub struct GrassmannNormAverage {
    pub n: usize,
    pub m: usize,
    pub k: u32,
    pub d: usize,
    pub functionals: usize,
    pub samples_per_functional: usize,
    pub seed: RngSeed,
    pub mean: f64,
    pub std_err: f64,
    /// `√(2k / d)` (the orbit point has unit length).
    pub bound: f64,
    pub ratio: f64,
    /// `mean ≤ bound + 3σ`.
    pub within: bool,
}

pub fn grassmann_norm_average(
    n: usize,
    m: usize,
    k: u32,
    functionals: usize,
    samples: usize,
    seed: RngSeed,
) -> Result<GrassmannNormAverage> {
    if functionals < 2 || samples < 100 || k == 0 {
        return invalid("need k >= 1, at least 2 functionals and 100 samples per functional");
    }
    let tables = ExteriorTables::new(n, m)?;
    let d = tables.len(m);
    let norms: Vec<f64> = (0..functionals)
        .into_par_iter()
        .map(|i| {
            let mut rng = SeededRng::new(seed.derive(i as u64));
            let c = rng.unit_vector(d);
            let mut acc = 0.0;
            for _ in 0..samples {
                acc += dot(&c, &haar_pluecker_dense(&tables, m, &mut rng)).powi(2 * k as i32);
            }
            (acc / samples as f64).powf(1.0 / (2 * k) as f64)
        })
        .collect();
    let stats: MeanVar = norms.into_iter().collect();
    let bound = expected_norm_bound(d, k, 1.0)?;
    Ok(GrassmannNormAverage {
        n,
        m,
        k,
        d,
        functionals,
        samples_per_functional: samples,
        seed,
        mean: stats.mean,
        std_err: stats.std_err(),
        bound,
        ratio: stats.mean / bound,
        within: stats.mean <= bound + 3.0 * stats.std_err(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AvgSupReport {
    pub n: usize,
    pub m: u32,
    pub dim_u: usize,
    pub samples: usize,
    pub seed: RngSeed,
    pub grid_points: usize,
    pub starts: usize,
    pub steps: usize,
    /// Mean of `‖p‖_∞` over the unit L² sphere of `U_{m,n}`.
    pub mean: f64,
    pub std_err: f64,
    pub min: f64,
    pub max: f64,
    /// `√(n ln(m+1))`.
    pub scale: f64,
    pub ratio: f64,
    /// `⌈n ln(m+1)⌉`.
    pub k_default: u32,
    /// `‖x_1^m‖_∞` after projecting to `U_{m,n}` and normalizing in L².
    pub spike_sup: f64,
}

/// `⌈n ln(m+1)⌉`.
pub fn default_sphere_k(n: usize, m: u32) -> u32 {
    ((n as f64 * (m as f64 + 1.0).ln()).ceil() as u32).max(1)
}

pub fn avg_sup_norm_experiment(n: usize, m: u32, samples: usize, seed: RngSeed) -> Result<AvgSupReport> {
    avg_sup_norm_experiment_with(n, m, samples, seed, DEFAULT_GRID)
}

pub fn avg_sup_norm_experiment_with(n: usize, m: u32, samples: usize, seed: RngSeed, grid_points: usize) -> Result<AvgSupReport> {
    if samples < 50 {
        return invalid(format!("need at least 50 samples, got {samples}"));
    }
    let basis = orthonormal_basis_U(n, m)?;
    let grid = SphereGrid::new(n, grid_points)?;
    let sups: Vec<f64> = (0..samples)
        .map(|i| {
            let p = basis.random_unit(&mut SeededRng::new(seed.derive(i as u64)));
            sup_norm_on_grid(&PolyEvaluator::new(&p), &grid, DEFAULT_STARTS, DEFAULT_STEPS).value
        })
        .collect();
    let stats: MeanVar = sups.iter().copied().collect();
    let spike = spike_polynomial(n, m)?;
    let spike_sup = sup_norm_on_grid(&PolyEvaluator::new(&spike), &grid, DEFAULT_STARTS, DEFAULT_STEPS).value;
    let scale = (n as f64 * (m as f64 + 1.0).ln()).sqrt();
    Ok(AvgSupReport {
        n,
        m,
        dim_u: basis.len(),
        samples,
        seed,
        grid_points: grid.len(),
        starts: DEFAULT_STARTS,
        steps: DEFAULT_STEPS,
        mean: stats.mean,
        std_err: stats.std_err(),
        min: sups.iter().copied().fold(f64::INFINITY, f64::min),
        max: sups.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        scale,
        ratio: stats.mean / scale,
        k_default: default_sphere_k(n, m),
        spike_sup,
    })
}

/// `x_1^m` minus its sphere mean times `(Σ x_i²)^{m/2}`, scaled to unit L² norm.
pub fn spike_polynomial(n: usize, m: u32) -> Result<HomPoly<f64>> {
    let alpha = MultiIndex::unit(n, 0, m);
    let table = MomentTable::new(n);
    let mut p = HomPoly::monomial(alpha.clone(), Rat::from_integer(1.into()));
    if m.is_multiple_of(2) {
        let mean = table.get(&alpha)?;
        p.axpy(&-mean, &HomPoly::sphere_power(n, m / 2));
    }
    let nsq = table.inner(&p, &p)?;
    Ok(p.to_f64().scale(&(1.0 / crate::math::rat_to_f64(&nsq).sqrt())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{rat, rat_int};

    #[test]
    fn linear_sandwich_is_tight_on_the_circle() {
        let x = HomPoly::<Rat>::variable(2, 0);
        let b = sphere_sandwich(&x, 1, false, NormMethod::Exact).unwrap();
        assert!((b.lower - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((b.upper - 1.0).abs() < 1e-12);
        assert_eq!(b.d_k, BigUint::from(2u32));
    }

    #[test]
    fn centered_mode() {
        let p = HomPoly::monomial(MultiIndex(vec![3, 0, 0]), rat_int(1));
        let b = sphere_sandwich(&p, 1, true, NormMethod::Exact).unwrap();
        assert!(b.centered);
        assert!(b.lower <= 1.0 && 1.0 <= b.upper);
        assert!((b.upper / b.lower - (b.d_k.to_string().parse::<f64>().unwrap())).abs() < 1e-9);
        assert!(sphere_sandwich(&p, 2, true, NormMethod::Exact).is_err());
        let q = HomPoly::monomial(MultiIndex(vec![2, 0, 0]), rat(1, 1));
        assert!(sphere_sandwich(&q, 1, true, NormMethod::Exact).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy_bound(4, 0).unwrap(), 1.0);
        assert!((entropy_bound(4, 2).unwrap() - 16.0).abs() < 1e-12);
        assert!(entropy_bound(10, 3).unwrap() >= 120.0);
        assert!(entropy_bound(0, 0).is_err());
        assert!(entropy_bound(3, 4).is_err());
    }

    #[test]
    fn entropy_dominates_binomial() {
        for a in 1..=40u64 {
            for b in 0..=a {
                let c = crate::math::binomial_f64(a as i64, b as i64);
                assert!(entropy_bound(a, b).unwrap() >= c * (1.0 - 1e-12), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn expected_norm_examples() {
        assert!((expected_norm_bound(1, 1, 1.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((expected_norm_bound(10, 2, 1.0).unwrap() - 0.4f64.sqrt()).abs() < 1e-15);
        // ⟨v,v⟩ = d gives √(2k).
        assert!((expected_norm_bound(14, 3, 14.0).unwrap() - 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn linear_forms_have_sup_sqrt_n() {
        let r = avg_sup_norm_experiment_with(3, 1, 50, RngSeed(2), 20_000).unwrap();
        assert!((r.min - 3f64.sqrt()).abs() < 1e-9 && (r.max - 3f64.sqrt()).abs() < 1e-9, "{r:?}");
    }
}
