use std::collections::HashSet;

use num_traits::Zero;
use serde::Serialize;

use super::group::{CenterMode, OrbitSpec};
use crate::error::{invalid, OrbitopeError, Result};
use crate::math::scalar::serde_scalar;
use crate::math::{par_blocks, Rat, RngSeed, Scalar, SymMatrix};

pub const MIN_COMPACT_SAMPLES: usize = 1000;

/// `M = avg_g (g v − c)(g v − c)ᵀ` together with the orbit center `c`.
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
pub struct SecondMoment<S> {
    #[serde(serialize_with = "serde_scalar::vec")]
    pub center: Vec<S>,
    pub form: SymMatrix<S>,
    /// Per-entry standard errors (sampled path only).
    pub std_err: Option<SymMatrix<f64>>,
    /// Base point `v` in ambient coordinates.
    #[serde(serialize_with = "serde_scalar::vec")]
    pub base_point: Vec<S>,
    /// Distinct orbit points (finite path) or samples drawn (compact path).
    pub points: usize,
    pub group_order: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "representation", rename_all = "snake_case")]
pub enum AnyMoment {
    Exact(SecondMoment<Rat>),
    Float(SecondMoment<f64>),
}

/// Distinct orbit points of a finite group in first-occurrence order. Averaging over
/// the group equals averaging over these, since every point has the same stabilizer size.
pub fn finite_orbit(spec: &OrbitSpec) -> Result<Vec<Vec<Rat>>> {
    let OrbitSpec::Finite { group, base_point, .. } = spec else {
        return invalid("finite_orbit needs a finite-group spec");
    };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for g in group.elements() {
        let p = g.apply(base_point);
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Exact second moment over explicit orbit points.
pub fn second_moment_of_points(points: &[Vec<Rat>], base_point: &[Rat], center_mode: CenterMode) -> Result<SecondMoment<Rat>> {
    let Some(first) = points.first() else {
        return invalid("empty orbit");
    };
    let d = first.len();
    let count = Rat::from_integer(points.len().into());
    let center = match center_mode {
        CenterMode::PreCentered => vec![Rat::zero(); d],
        CenterMode::AutoCenter => (0..d)
            .map(|k| points.iter().map(|p| &p[k]).sum::<Rat>() / &count)
            .collect(),
    };
    let w = count.recip();
    let mut form = SymMatrix::zeros(d);
    for p in points {
        let y: Vec<Rat> = p.iter().zip(&center).map(|(a, b)| a - b).collect();
        form.add_outer(&y, &w);
    }
    if form.trace().is_zero() {
        return Err(OrbitopeError::DegenerateOrbit("orbit is a single point".into()));
    }
    Ok(SecondMoment {
        center,
        form,
        std_err: None,
        base_point: base_point.to_vec(),
        points: points.len(),
        group_order: None,
    })
}

pub fn orbit_second_moment(spec: &OrbitSpec, samples: usize, seed: RngSeed) -> Result<AnyMoment> {
    match spec {
        OrbitSpec::Finite {
            group,
            base_point,
            center_mode,
        } => {
            let pts = finite_orbit(spec)?;
            let mut m = second_moment_of_points(&pts, base_point, *center_mode)?;
            m.group_order = Some(group.order());
            Ok(AnyMoment::Exact(m))
        }
        OrbitSpec::Compact {
            sampler,
            base_point,
            center_mode,
        } => {
            if samples < MIN_COMPACT_SAMPLES {
                return invalid(format!(
                    "compact-group averaging needs at least {MIN_COMPACT_SAMPLES} samples, got {samples}"
                ));
            }
            let d = sampler.dim;
            let packed = d * (d + 1) / 2;
            let blocks = par_blocks(samples, seed, |_, rng, count| {
                let mut s1 = vec![0.0; d];
                let mut s2 = vec![0.0; packed];
                let mut s4 = vec![0.0; packed];
                for _ in 0..count {
                    let x = sampler.draw(rng);
                    debug_assert_eq!(x.len(), d);
                    let mut k = 0;
                    for i in 0..d {
                        s1[i] += x[i];
                        for j in i..d {
                            let v = x[i] * x[j];
                            s2[k] += v;
                            s4[k] += v * v;
                            k += 1;
                        }
                    }
                }
                (s1, s2, s4)
            });
            let mut s1 = vec![0.0; d];
            let mut s2 = vec![0.0; packed];
            let mut s4 = vec![0.0; packed];
            for (a, b, c) in blocks {
                s1.iter_mut().zip(a).for_each(|(x, y)| *x += y);
                s2.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                s4.iter_mut().zip(c).for_each(|(x, y)| *x += y);
            }
            let nf = samples as f64;
            let center: Vec<f64> = match center_mode {
                CenterMode::PreCentered => vec![0.0; d],
                CenterMode::AutoCenter => s1.iter().map(|x| x / nf).collect(),
            };
            let mut form = SymMatrix::zeros(d);
            let mut se = SymMatrix::zeros(d);
            let mut k = 0;
            for i in 0..d {
                for j in i..d {
                    let mean = s2[k] / nf;
                    form.set(i, j, mean - center[i] * center[j]);
                    let var = (s4[k] / nf - mean * mean).max(0.0);
                    se.set(i, j, (var / nf).sqrt());
                    k += 1;
                }
            }
            if form.trace() <= 0.0 {
                return Err(OrbitopeError::DegenerateOrbit("sampled orbit has zero spread".into()));
            }
            Ok(AnyMoment::Float(SecondMoment {
                center,
                form,
                std_err: Some(se),
                base_point: base_point.clone(),
                points: samples,
                group_order: None,
            }))
        }
    }
}

impl AnyMoment {
    pub fn form_f64(&self) -> SymMatrix<f64> {
        match self {
            AnyMoment::Exact(m) => m.form.to_f64(),
            AnyMoment::Float(m) => m.form.clone(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AnyMoment::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&SecondMoment<Rat>> {
        match self {
            AnyMoment::Exact(m) => Some(m),
            AnyMoment::Float(_) => None,
        }
    }
}

impl<S: Scalar> SecondMoment<S> {
    pub fn dim(&self) -> usize {
        self.form.dim()
    }
}
