use serde::{Deserialize, Serialize};

use super::moments::MomentTable;
use super::poly::{HomPoly, PolyEvaluator};
use crate::error::{invalid, OrbitopeError, Result};
use crate::math::{binomial, par_blocks, MeanVar, RngSeed, Scalar};

/// Largest monomial count `C(n + 2km − 1, 2km)` the exact path will expand.
pub const EXPANSION_BUDGET: u128 = 1_000_000;

pub const MIN_MC_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum NormMethod {
    Exact,
    Mc { samples: usize, seed: RngSeed },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    /// Zero on the exact path.
    pub std_err: f64,
    /// `∫ p^{2k} dσ` before taking the root.
    pub moment: f64,
    pub moment_std_err: f64,
    pub exact: bool,
}

/// Number of monomials in the expansion of `p^{2k}`.
pub fn expansion_terms(n: usize, m: u32, k: u32) -> u128 {
    let d = 2 * k as i64 * m as i64;
    let b = binomial(n as i64 + d - 1, d);
    u128::try_from(b).unwrap_or(u128::MAX)
}

pub fn exact_within_budget(n: usize, m: u32, k: u32) -> bool {
    expansion_terms(n, m, k) <= EXPANSION_BUDGET
}

/// `(∫_{S^{n−1}} p^{2k} dσ)^{1/2k}`.
pub fn lp_norm_2k<S: Scalar>(p: &HomPoly<S>, k: u32, method: NormMethod) -> Result<NormEstimate> {
    if k == 0 {
        return invalid("k must be positive");
    }
    match method {
        NormMethod::Exact => {
            let terms = expansion_terms(p.n(), p.degree(), k);
            if terms > EXPANSION_BUDGET {
                return Err(OrbitopeError::ExpansionBudget {
                    terms,
                    budget: EXPANSION_BUDGET,
                });
            }
            let pk = p.pow(k);
            let moment = MomentTable::new(p.n()).inner(&pk, &pk)?.as_f64().max(0.0);
            Ok(NormEstimate {
                value: moment.powf(1.0 / (2 * k) as f64),
                std_err: 0.0,
                moment,
                moment_std_err: 0.0,
                exact: true,
            })
        }
        NormMethod::Mc { samples, seed } => {
            let ev = PolyEvaluator::new(&p.to_f64());
            mc_power_mean(&ev, 2 * k, samples, seed)
        }
    }
}

/// Monte Carlo `(E p(x)^{e})^{1/e}` over uniform sphere points, with a delta-method error.
pub fn mc_power_mean(ev: &PolyEvaluator, e: u32, samples: usize, seed: RngSeed) -> Result<NormEstimate> {
    if samples < MIN_MC_SAMPLES {
        return invalid(format!("Monte Carlo needs at least {MIN_MC_SAMPLES} samples, got {samples}"));
    }
    let n = ev.n();
    let stats = par_blocks(samples, seed, |_, rng, count| {
        let mut mv = MeanVar::default();
        for _ in 0..count {
            let x = rng.unit_vector(n);
            mv.push(ev.eval(&x).powi(e as i32));
        }
        mv
    })
    .into_iter()
    .fold(MeanVar::default(), |mut acc, b| {
        acc.merge(&b);
        acc
    });
    let moment = stats.mean.max(0.0);
    let value = moment.powf(1.0 / e as f64);
    let std_err = if moment > 0.0 {
        value * stats.std_err() / (e as f64 * moment)
    } else {
        0.0
    };
    Ok(NormEstimate {
        value,
        std_err,
        moment,
        moment_std_err: stats.std_err(),
        exact: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{MultiIndex, Rat};

    #[test]
    fn spec_examples() {
        let r = HomPoly::<Rat>::sphere_power(3, 1);
        assert!((lp_norm_2k(&r, 1, NormMethod::Exact).unwrap().value - 1.0).abs() < 1e-15);
        let x = HomPoly::<Rat>::variable(2, 0);
        let v = lp_norm_2k(&x, 1, NormMethod::Exact).unwrap().value;
        assert!((v - 0.5f64.sqrt()).abs() < 1e-15);
        let x = HomPoly::<Rat>::variable(3, 0);
        let v = lp_norm_2k(&x, 2, NormMethod::Exact).unwrap().value;
        assert!((v - 0.2f64.powf(0.25)).abs() < 1e-15);
    }

    #[test]
    fn budget_and_sample_guards() {
        let p = HomPoly::<f64>::monomial(MultiIndex::unit(10, 0, 6), 1.0);
        match lp_norm_2k(&p, 6, NormMethod::Exact) {
            Err(OrbitopeError::ExpansionBudget { .. }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
        let m = NormMethod::Mc {
            samples: 50,
            seed: RngSeed(1),
        };
        assert!(lp_norm_2k(&p, 1, m).is_err());
        assert!(lp_norm_2k(&p, 0, NormMethod::Exact).is_err());
    }

    #[test]
    fn mc_matches_exact_on_linear_form() {
        let x = HomPoly::<Rat>::variable(3, 0);
        let mc = lp_norm_2k(
            &x,
            2,
            NormMethod::Mc {
                samples: 200_000,
                seed: RngSeed(9),
            },
        )
        .unwrap();
        let exact = 0.2f64.powf(0.25);
        assert!((mc.value - exact).abs() < 4.0 * mc.std_err, "{mc:?}");
    }
}
