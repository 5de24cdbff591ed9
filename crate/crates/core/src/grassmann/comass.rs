use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use super::dk::d_k_rect;
use super::frame::{haar_pluecker_dense, random_frame, Frame};
use super::multivector::{ExteriorTables, MultiVector};
use crate::error::{invalid, Result};
use crate::math::dense::{dot, norm, orthonormalize, ColMatrix};
use crate::math::{big_ln, par_blocks, MeanVar, RngSeed, Scalar, SeededRng};

pub const DEFAULT_RESTARTS: usize = 64;
pub const DEFAULT_MC_SAMPLES: usize = 100_000;
pub const MIN_COMASS_SAMPLES: usize = 1000;
const MAX_ASCENT_STEPS: usize = 20_000;
const STOP_IMPROVEMENT: f64 = 1e-12;
const ARMIJO: f64 = 0.5;

#[derive(Debug, Clone, Serialize)]
pub struct ComassEstimate {
    /// Best value of `⟨c, x⟩` found by local ascent over oriented planes.
    pub lower: f64,
    /// `d_k^{1/2k} · ‖c‖_{2k}`.
    pub upper: f64,
    /// Monte Carlo `‖c‖_{2k}` over Haar planes.
    pub norm: f64,
    pub norm_std_err: f64,
    /// Standard error of `upper`.
    pub upper_std_err: f64,
    #[serde(serialize_with = "ser_big")]
    pub d_k: BigUint,
    pub k_used: usize,
    pub restarts: usize,
    pub mc_samples: usize,
    pub seed: RngSeed,
    /// Frame attaining `lower`.
    pub argmax: Frame,
}

pub(crate) fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Dense target functional with its exterior tables.
pub struct Functional {
    pub tables: ExteriorTables,
    pub m: usize,
    pub coeffs: Vec<f64>,
}

impl Functional {
    pub fn new<S: Scalar>(c: &MultiVector<S>) -> Result<Self> {
        if c.m() == 0 {
            return invalid("comass needs degree m >= 1");
        }
        let tables = ExteriorTables::new(c.n(), c.m())?;
        let coeffs = c.to_dense(&tables);
        Ok(Functional {
            m: c.m(),
            coeffs,
            tables,
        })
    }

    pub fn value(&self, cols: &[Vec<f64>]) -> f64 {
        dot(&self.coeffs, &self.tables.wedge_all(cols))
    }

    /// Value and Euclidean gradient: column `j` of the gradient is
    /// `r ↦ ⟨c, x_1 ∧ … ∧ e_r ∧ … ∧ x_m⟩` with `e_r` in slot `j`.
    pub fn value_and_grad(&self, cols: &[Vec<f64>]) -> (f64, Vec<Vec<f64>>) {
        let m = self.m;
        let grad: Vec<Vec<f64>> = (0..m)
            .map(|j| {
                let w = self.tables.wedge_all(cols.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, c)| c));
                let mut g = self.tables.contract(m, &w, &self.coeffs);
                if j % 2 == 1 {
                    g.iter_mut().for_each(|x| *x = -*x);
                }
                g
            })
            .collect();
        let value = dot(&cols[0], &grad[0]);
        (value, grad)
    }
}

/// Riemannian gradient ascent on the Stiefel manifold: tangent projection
/// `G − X sym(XᵀG)`, retraction by re-orthonormalization, step doubled on success and
/// halved on failure, where success means a gain of at least half the linear prediction;
/// stops once an accepted step gains less than `1e−12`.
pub fn ascend(f: &Functional, start: Frame) -> (f64, Frame, usize) {
    let m = f.m;
    let mut x = start.columns;
    let (mut val, mut grad) = f.value_and_grad(&x);
    let mut step = 0.5;
    let mut iters = 0;
    while iters < MAX_ASCENT_STEPS {
        iters += 1;
        let xtg: Vec<Vec<f64>> = (0..m).map(|a| (0..m).map(|b| dot(&x[a], &grad[b])).collect()).collect();
        let xi: Vec<Vec<f64>> = (0..m)
            .map(|b| {
                let mut col = grad[b].clone();
                for a in 0..m {
                    let s = 0.5 * (xtg[a][b] + xtg[b][a]);
                    col.iter_mut().zip(&x[a]).for_each(|(c, xa)| *c -= s * xa);
                }
                col
            })
            .collect();
        let gnorm = xi.iter().map(|c| dot(c, c)).sum::<f64>().sqrt();
        if gnorm < 1e-15 {
            break;
        }
        let trial: Vec<Vec<f64>> = x
            .iter()
            .zip(&xi)
            .map(|(a, d)| a.iter().zip(d).map(|(p, q)| p + step * q).collect())
            .collect();
        let Some(q) = orthonormalize(&ColMatrix::new(f.tables.n(), trial)) else {
            step *= 0.5;
            continue;
        };
        let (nv, ng) = f.value_and_grad(&q.cols);
        let gain = nv - val;
        if gain > ARMIJO * step * gnorm * gnorm {
            x = q.cols;
            val = nv;
            grad = ng;
            step *= 2.0;
            if gain < STOP_IMPROVEMENT {
                break;
            }
        } else {
            step *= 0.5;
            if step * gnorm < 1e-16 {
                break;
            }
        }
    }
    let n = f.tables.n();
    (val, Frame { n, m, columns: x }, iters)
}

/// Multistart ascent from Haar-random frames; restart `r` uses stream `seed.derive(r)`.
pub fn comass_lower(f: &Functional, restarts: usize, seed: RngSeed) -> Result<(f64, Frame)> {
    if restarts == 0 {
        return invalid("restarts must be at least 1");
    }
    let n = f.tables.n();
    let runs: Vec<(f64, Frame)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let start = random_frame(n, f.m, &mut SeededRng::new(seed.derive(r as u64)));
            let (v, fr, _) = ascend(f, start);
            (v, fr)
        })
        .collect();
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.0 > runs[best].0 {
            best = i;
        }
    }
    Ok(runs.into_iter().nth(best).unwrap())
}

/// Monte Carlo `(∫ ⟨c, x⟩^{2k} dx)^{1/2k}` over Haar-random oriented planes, with a
/// delta-method standard error.
pub fn grassmann_norm_2k(f: &Functional, k: usize, samples: usize, seed: RngSeed) -> Result<(f64, f64)> {
    if samples < MIN_COMASS_SAMPLES {
        return invalid(format!("need at least {MIN_COMASS_SAMPLES} Monte Carlo samples, got {samples}"));
    }
    if k == 0 {
        return invalid("k must be positive");
    }
    let e = 2 * k as i32;
    let stats = par_blocks(samples, seed, |_, rng, count| {
        let mut mv = MeanVar::default();
        for _ in 0..count {
            let y = haar_pluecker_dense(&f.tables, f.m, rng);
            mv.push(dot(&f.coeffs, &y).powi(e));
        }
        mv
    })
    .into_iter()
    .fold(MeanVar::default(), |mut a, b| {
        a.merge(&b);
        a
    });
    let moment = stats.mean.max(0.0);
    let value = moment.powf(1.0 / e as f64);
    let se = if moment > 0.0 {
        value * stats.std_err() / (e as f64 * moment)
    } else {
        0.0
    };
    Ok((value, se))
}

/// `d_k^{1/2k}` evaluated in log space.
pub fn dk_factor(d_k: &BigUint, k: usize) -> f64 {
    (big_ln(d_k) / (2 * k) as f64).exp()
}

/// Sandwich estimate of the comass of `c`: ascent lower bound and the `d_k` upper bound.
pub fn comass<S: Scalar>(c: &MultiVector<S>, k: usize, restarts: usize, mc_samples: usize, seed: RngSeed) -> Result<ComassEstimate> {
    if k == 0 {
        return invalid("k must be positive");
    }
    let f = Functional::new(c)?;
    let d_k = d_k_rect(c.m(), c.n(), k)?;
    let (norm, norm_se) = grassmann_norm_2k(&f, k, mc_samples, seed.derive(1))?;
    let (lower, argmax) = comass_lower(&f, restarts, seed.derive(0))?;
    let factor = dk_factor(&d_k, k);
    Ok(ComassEstimate {
        lower,
        upper: factor * norm,
        norm,
        norm_std_err: norm_se,
        upper_std_err: factor * norm_se,
        d_k,
        k_used: k,
        restarts,
        mc_samples,
        seed,
        argmax,
    })
}

/// `⌈m n ln(m+1)⌉`, the degree used for the Grassmannian norm approximation.
pub fn default_k(n: usize, m: usize) -> usize {
    ((m * n) as f64 * ((m + 1) as f64).ln()).ceil().max(1.0) as usize
}

/// Euclidean length of the vector `c` (for reports).
pub fn length(c: &MultiVector<f64>) -> f64 {
    norm(&c.coords().values().copied().collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::calibrations::{kaehler_power, special_lagrangian};
    use crate::grassmann::frame::pluecker;

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = SeededRng::new(RngSeed(4));
        let c = MultiVector::from_coords(
            6,
            3,
            crate::grassmann::multivector::ExteriorTables::new(6, 3)
                .unwrap()
                .level(3)
                .iter()
                .map(|&s| (crate::grassmann::multivector::indices_of(s), rng.gaussian())),
        )
        .unwrap();
        let f = Functional::new(&c).unwrap();
        let x: Vec<Vec<f64>> = (0..3).map(|_| rng.gaussian_vec(6)).collect();
        let (v, g) = f.value_and_grad(&x);
        assert!((v - f.value(&x)).abs() < 1e-12);
        let h = 1e-6;
        for j in 0..3 {
            for r in 0..6 {
                let mut xp = x.clone();
                xp[j][r] += h;
                let mut xm = x.clone();
                xm[j][r] -= h;
                let fd = (f.value(&xp) - f.value(&xm)) / (2.0 * h);
                assert!((fd - g[j][r]).abs() < 1e-7, "j={j} r={r}: {fd} vs {}", g[j][r]);
            }
        }
    }

    #[test]
    fn value_is_pluecker_pairing() {
        let c = kaehler_power(1, 3).unwrap();
        let f = Functional::new(&c).unwrap();
        let fr = crate::grassmann::frame::sample_grassmann(6, 2, RngSeed(2)).unwrap();
        let p = pluecker(&fr);
        assert!((f.value(&fr.columns) - c.to_f64().dot(&p).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn calibrations_have_comass_one() {
        for c in [kaehler_power(1, 2).unwrap(), kaehler_power(1, 3).unwrap(), special_lagrangian(2).unwrap()] {
            let est = comass(&c, 2, 16, 5000, RngSeed(1)).unwrap();
            assert!((est.lower - 1.0).abs() < 1e-6, "{est:?}");
            assert!(est.upper >= 1.0);
        }
    }

    #[test]
    fn pluecker_point_is_its_own_maximizer() {
        let c = MultiVector::<f64>::basis(5, &[0, 1, 2]).unwrap();
        let est = comass(&c, 3, 8, 2000, RngSeed(3)).unwrap();
        assert!((est.lower - 1.0).abs() < 1e-9);
        assert!(est.upper >= 1.0);
        assert!(comass(&c, 1, 8, 10, RngSeed(3)).is_err());
        assert!(comass(&c, 1, 0, 2000, RngSeed(3)).is_err());
    }
}
