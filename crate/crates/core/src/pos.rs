//! The cone of nonnegative forms: inscribed ball, symmetry coefficient and Monte Carlo
//! volume ratios of the shifted body `Pos′ = {p ∈ U_{2k,n} : p ≥ −1 on the sphere}`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::math::{big_ln, binomial, rat_int, sym_eig, MeanVar, MultiIndex, Rat, RngSeed, Scalar, SeededRng, SymMatrix};
use crate::math::scalar::serde_rat as ser_rat;
use crate::sphere::grid::min_on_grid;
use crate::sphere::{dim_u, orthonormal_basis_U, HomPoly, PolyEvaluator, SphereGrid};

pub const MAX_VOLUME_DIM: usize = 30;
pub const MIN_VOLUME_SAMPLES: usize = 1000;
pub const VOLUME_GRID: usize = 20_000;
pub const VOLUME_ASCENTS: usize = 10;
pub const BOOTSTRAP_REPLICATES: usize = 200;
pub const MEDIAN_GROUPS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosBallReport {
    pub n: usize,
    pub k: u32,
    /// `dim U_{2k,n}`.
    pub d: u64,
    /// Squared radius of the largest inscribed ball, `1/d`.
    #[serde(with = "ser_rat")]
    pub r_max_sq: Rat,
    /// `(C(n+k−1, k) − 1)^{−1}`.
    #[serde(with = "ser_rat")]
    pub sym_coeff: Rat,
    /// `C(n+k−1, k) − 1`.
    #[serde(with = "ser_rat")]
    pub outer_radius_sq: Rat,
}

pub fn pos_ball_report(n: usize, k: u32) -> Result<PosBallReport> {
    if n < 2 || k < 1 {
        return invalid(format!("need n >= 2 and k >= 1, got n = {n}, k = {k}"));
    }
    let d = binomial(n as i64 + 2 * k as i64 - 1, 2 * k as i64) - BigUint::one();
    let q = binomial(n as i64 + k as i64 - 1, k as i64) - BigUint::one();
    let to_rat = |b: &BigUint| Rat::from_integer(b.clone().into());
    Ok(PosBallReport {
        n,
        k,
        d: d.to_u64().unwrap_or(u64::MAX),
        r_max_sq: to_rat(&d).recip(),
        sym_coeff: to_rat(&q).recip(),
        outer_radius_sq: to_rat(&q),
    })
}

/// Symmetric matrix `A` with `p(x) = xᵀAx`.
pub fn quadratic_matrix<S: Scalar>(p: &HomPoly<S>) -> Result<SymMatrix<f64>> {
    if p.degree() != 2 {
        return invalid(format!("expected a quadratic form, got degree {}", p.degree()));
    }
    let n = p.n();
    let mut a = SymMatrix::zeros(n);
    for (alpha, c) in p.terms() {
        let idx: Vec<usize> = (0..n).filter(|&i| alpha.exponents()[i] > 0).collect();
        match idx[..] {
            [i] => a.set(i, i, c.as_f64()),
            [i, j] => a.set(i, j, 0.5 * c.as_f64()),
            _ => unreachable!(),
        }
    }
    Ok(a)
}

/// Smallest eigenvalue of the coefficient matrix: `min_{S^{n−1}} p` for a quadratic form.
pub fn psd_oracle_quadratic<S: Scalar>(p: &HomPoly<S>) -> Result<f64> {
    let eig = sym_eig(&quadratic_matrix(p)?)?;
    Ok(*eig.values.last().unwrap())
}

/// `2^{4k} C(n+k−1, k)^{1/2} C(n+2k−1, 2k)^{−1/2}`, the structural factor of the
/// sums-of-squares volume bound.
pub fn sq_bound_eval(n: usize, k: u32) -> Result<f64> {
    if n < 1 || k < 1 {
        return invalid("need n >= 1 and k >= 1");
    }
    let a = big_ln(&binomial(n as i64 + k as i64 - 1, k as i64));
    let b = big_ln(&binomial(n as i64 + 2 * k as i64 - 1, 2 * k as i64));
    Ok((4.0 * k as f64 * 2f64.ln() + 0.5 * a - 0.5 * b).exp())
}

#[derive(Debug, Clone, Serialize)]
pub struct VolumeRatioEstimate {
    pub n: usize,
    pub k: u32,
    pub d: usize,
    pub samples: usize,
    pub seed: RngSeed,
    pub grid_points: usize,
    /// `(mean |min p|^{−d})^{1/d}`.
    pub estimate: f64,
    /// Bootstrap standard error of `estimate`.
    pub std_err: f64,
    /// Median of group means of `|min p|^{−d}`, to the power `1/d`.
    pub robust_estimate: f64,
    pub robust_std_err: f64,
    pub median_groups: usize,
    /// `(n ln(2k+1))^{−1/2}`.
    pub scale_lower: f64,
    /// Inscribed-ball radius `d^{−1/2}`.
    pub inscribed_floor: f64,
    /// Largest observed `|min p|` (the smallest radial distance is its inverse).
    pub max_abs_min: f64,
}

/// Radial function of `Pos′` summarized over directions: combines per-direction values
/// `|min p|^{−d}` into the raw, bootstrap and median-of-means estimates.
pub fn summarize_radial(values: &[f64], d: usize, seed: RngSeed) -> (f64, f64, f64, f64) {
    let e = 1.0 / d as f64;
    let s = values.len();
    let mean = values.iter().sum::<f64>() / s as f64;
    let estimate = mean.powf(e);
    let boots: MeanVar = (0..BOOTSTRAP_REPLICATES)
        .into_par_iter()
        .map(|b| {
            let mut rng = SeededRng::new(seed.derive(b as u64));
            let m = (0..s).map(|_| values[rng.below(s)]).sum::<f64>() / s as f64;
            m.powf(e)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    let std_err = boots.variance().sqrt();
    let groups = MEDIAN_GROUPS.min(s);
    let size = s / groups;
    let mut means: Vec<f64> = (0..groups)
        .map(|g| values[g * size..(g + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let med = if groups % 2 == 1 {
        means[groups / 2]
    } else {
        0.5 * (means[groups / 2 - 1] + means[groups / 2])
    };
    let spread: MeanVar = means.iter().copied().collect();
    // Asymptotic standard error of a normal-sample median, then the delta method.
    let med_se = 1.2533 * spread.std_err();
    let robust = med.powf(e);
    (estimate, std_err, robust, robust * e * med_se / med)
}

pub fn volume_ratio_pos(n: usize, k: u32, samples: usize, seed: RngSeed) -> Result<VolumeRatioEstimate> {
    volume_ratio_pos_with(n, k, samples, seed, VOLUME_GRID)
}

/// Directions uniform on the unit sphere of `U_{2k,n}`; each minimum is found by grid
/// search plus local refinement.
pub fn volume_ratio_pos_with(n: usize, k: u32, samples: usize, seed: RngSeed, grid_points: usize) -> Result<VolumeRatioEstimate> {
    if k < 1 {
        return invalid("k must be positive");
    }
    let d = dim_u(n.max(2), 2 * k);
    if d > MAX_VOLUME_DIM as u128 {
        return invalid(format!(
            "dim U_{{{},{n}}} = {d} exceeds the guard {MAX_VOLUME_DIM}; use smaller n or k",
            2 * k
        ));
    }
    if samples < MIN_VOLUME_SAMPLES {
        return invalid(format!("need at least {MIN_VOLUME_SAMPLES} samples, got {samples}"));
    }
    let d = d as usize;
    let basis = orthonormal_basis_U(n, 2 * k)?;
    let grid = SphereGrid::new(n, grid_points)?;
    let mins: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let p = basis.random_unit(&mut SeededRng::new(seed.derive(i as u64)));
            min_on_grid(&PolyEvaluator::new(&p.scale(&-1.0)), &grid, VOLUME_ASCENTS).value
        })
        .collect();
    finish_volume(n, k, d, samples, seed, grid.len(), &mins)
}

fn finish_volume(n: usize, k: u32, d: usize, samples: usize, seed: RngSeed, grid_points: usize, mins: &[f64]) -> Result<VolumeRatioEstimate> {
    if let Some(m) = mins.iter().find(|m| **m >= 0.0) {
        return Err(crate::OrbitopeError::Invariant(format!(
            "a mean-zero direction has nonnegative minimum {m}"
        )));
    }
    let values: Vec<f64> = mins.iter().map(|m| m.abs().powi(-(d as i32))).collect();
    let (estimate, std_err, robust_estimate, robust_std_err) = summarize_radial(&values, d, seed.derive(u64::MAX));
    Ok(VolumeRatioEstimate {
        n,
        k,
        d,
        samples,
        seed,
        grid_points,
        estimate,
        std_err,
        robust_estimate,
        robust_std_err,
        median_groups: MEDIAN_GROUPS.min(samples),
        scale_lower: 1.0 / (n as f64 * (2.0 * k as f64 + 1.0).ln()).sqrt(),
        inscribed_floor: 1.0 / (d as f64).sqrt(),
        max_abs_min: mins.iter().fold(0.0, |a, m| a.max(m.abs())),
    })
}

/// Independent estimate for `k = 1`: traceless Gaussian-orthogonal matrices give uniform
/// directions in `U_{2,n}`, `‖xᵀAx‖₂² = 2 tr(A²) / (n(n+2))`, and the minimum is the
/// smallest eigenvalue. No polynomial basis or sphere grid is involved.
pub fn volume_ratio_quadratic_oracle(n: usize, samples: usize, seed: RngSeed) -> Result<VolumeRatioEstimate> {
    if n < 2 {
        return invalid("need n >= 2");
    }
    if samples < MIN_VOLUME_SAMPLES {
        return invalid(format!("need at least {MIN_VOLUME_SAMPLES} samples, got {samples}"));
    }
    let d = n * (n + 1) / 2 - 1;
    if d > MAX_VOLUME_DIM {
        return invalid(format!("dim U_{{2,{n}}} = {d} exceeds the guard {MAX_VOLUME_DIM}"));
    }
    let mins = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = SeededRng::new(seed.derive(i as u64));
            let mut a = SymMatrix::zeros(n);
            for r in 0..n {
                a.set(r, r, rng.gaussian());
                for c in r + 1..n {
                    a.set(r, c, rng.gaussian() * 0.5f64.sqrt());
                }
            }
            let shift = a.trace() / n as f64;
            for r in 0..n {
                let v = *a.get(r, r) - shift;
                a.set(r, r, v);
            }
            let tr2: f64 = (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).map(|(r, c)| a.get(r, c).powi(2)).sum();
            let l2 = (2.0 * tr2 / (n * (n + 2)) as f64).sqrt();
            let eig = sym_eig(&a)?;
            Ok(eig.values.last().unwrap() / l2)
        })
        .collect::<Result<Vec<f64>>>()?;
    finish_volume(n, 1, d, samples, seed, 0, &mins)
}

/// `Σ x_i²` plus `r q`, with `q` drawn uniformly from the unit sphere of `U_{2,n}`.
pub fn shifted_quadratic(n: usize, r: f64, q: &HomPoly<f64>) -> Result<HomPoly<f64>> {
    HomPoly::<f64>::sphere_power(n, 1).add(&q.scale(&r))
}

/// Ball test for `k = 1`: fraction of `samples` boundary points `1 + scale·r_max·q` that are
/// positive semidefinite, together with the smallest eigenvalue seen.
#[derive(Debug, Clone, Serialize)]
pub struct BallProbe {
    pub n: usize,
    pub scale: f64,
    pub samples: usize,
    pub psd: usize,
    pub min_eigenvalue: f64,
}

pub fn probe_inscribed_ball(n: usize, scale: f64, samples: usize, seed: RngSeed) -> Result<BallProbe> {
    let basis = orthonormal_basis_U(n, 2)?;
    let r = (pos_ball_report(n, 1)?.r_max_sq.as_f64()).sqrt() * scale;
    let eigs = (0..samples)
        .into_par_iter()
        .map(|i| {
            let q = basis.random_unit(&mut SeededRng::new(seed.derive(i as u64)));
            psd_oracle_quadratic(&shifted_quadratic(n, r, &q)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(BallProbe {
        n,
        scale,
        samples,
        psd: eigs.iter().filter(|e| **e >= -1e-9).count(),
        min_eigenvalue: eigs.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

/// `|x|²/n − x_1²`, a unit-ball direction in which `Pos′` is closest to the origin.
pub fn touching_quadratic(n: usize) -> Result<HomPoly<Rat>> {
    if n < 2 {
        return invalid("need n >= 2");
    }
    let mut p = HomPoly::sphere_power(n, 1).scale(&Rat::new(1.into(), (n as i64).into()));
    p.axpy(&rat_int(-1), &HomPoly::monomial(MultiIndex::unit(n, 0, 2), rat_int(1)));
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::rat;

    #[test]
    fn ball_report_examples() {
        let r = pos_ball_report(3, 1).unwrap();
        assert_eq!((r.r_max_sq.clone(), r.sym_coeff.clone(), r.outer_radius_sq.clone()), (rat(1, 5), rat(1, 2), rat_int(2)));
        assert_eq!(pos_ball_report(2, 1).unwrap().r_max_sq, rat(1, 2));
        assert_eq!(pos_ball_report(3, 2).unwrap().r_max_sq, rat(1, 14));
        assert!(pos_ball_report(1, 1).is_err());
    }

    #[test]
    fn oracle_examples() {
        let sum = HomPoly::<Rat>::sphere_power(3, 1);
        assert!((psd_oracle_quadratic(&sum).unwrap() - 1.0).abs() < 1e-14);
        let xy = HomPoly::monomial(MultiIndex(vec![1, 1]), rat_int(1));
        assert!((psd_oracle_quadratic(&xy).unwrap() + 0.5).abs() < 1e-14);
        let diff = HomPoly::from_terms(2, 2, [(MultiIndex(vec![2, 0]), 1.0), (MultiIndex(vec![0, 2]), -1.0)]).unwrap();
        assert!((psd_oracle_quadratic(&diff).unwrap() + 1.0).abs() < 1e-14);
        assert!(psd_oracle_quadratic(&HomPoly::<Rat>::variable(2, 0)).is_err());
    }

    #[test]
    fn sq_bound_examples() {
        assert!((sq_bound_eval(3, 1).unwrap() - 16.0 * 3f64.sqrt() / 6f64.sqrt()).abs() < 1e-12);
        assert!((sq_bound_eval(2, 1).unwrap() - 16.0 * 2f64.sqrt() / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn touching_direction_reaches_the_ball() {
        for n in 2..=4 {
            let p = touching_quadratic(n).unwrap();
            let norm = crate::sphere::l2_inner(&p, &p).unwrap().as_f64().sqrt();
            let min = psd_oracle_quadratic(&p).unwrap() / norm;
            let r = pos_ball_report(n, 1).unwrap().r_max_sq.as_f64().sqrt();
            assert!((min.abs() * r - 1.0).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn guards() {
        assert!(volume_ratio_pos(3, 1, 10, RngSeed(0)).is_err());
        assert!(volume_ratio_pos(4, 2, 1000, RngSeed(0)).is_err());
        assert!(volume_ratio_quadratic_oracle(3, 999, RngSeed(0)).is_err());
    }
}
