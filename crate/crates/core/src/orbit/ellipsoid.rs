use num_traits::Zero;
use serde::Serialize;

use super::moment::{AnyMoment, SecondMoment};
use crate::error::{OrbitopeError, Result};
use crate::math::scalar::{rat_from_f64_approx, serde_scalar};
use crate::math::{rat_to_f64, sym_eig, Rat, Scalar, SymMatrix};

pub const DEFAULT_EIG_GAP_TOL: f64 = 1e-6;

/// Largest denominator tried when lifting a clustered eigenvalue to a rational.
const MAX_LAMBDA_DEN: i64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Exact,
    Float,
}

/// `{x : (x − center)ᵀ Q (x − center) ≤ radius_scale}`.
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
pub struct EllipsoidSpec<S> {
    #[serde(serialize_with = "serde_scalar::vec")]
    pub center: Vec<S>,
    pub form: SymMatrix<S>,
    #[serde(serialize_with = "serde_scalar::one")]
    pub radius_scale: S,
    pub representation: Representation,
}

impl<S: Scalar> EllipsoidSpec<S> {
    pub fn unit_ball(dim: usize) -> Self {
        EllipsoidSpec {
            center: vec![S::zero(); dim],
            form: SymMatrix::identity(dim),
            radius_scale: S::one(),
            representation: representation::<S>(),
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }
}

fn representation<S: Scalar>() -> Representation {
    if S::EXACT {
        Representation::Exact
    } else {
        Representation::Float
    }
}

/// `(x − c)ᵀ Q (x − c) − radius_scale`; nonpositive inside.
pub fn ellipsoid_eval<S: Scalar>(e: &EllipsoidSpec<S>, x: &[S]) -> Result<S> {
    if x.len() != e.dim() {
        return Err(OrbitopeError::DimensionMismatch {
            expected: e.dim(),
            got: x.len(),
        });
    }
    let y: Vec<S> = x.iter().zip(&e.center).map(|(a, b)| a.clone() - b.clone()).collect();
    Ok(e.form.quad_form(&y) - e.radius_scale.clone())
}

/// One eigenvalue cluster of the second-moment form.
#[derive(Debug, Clone)]
pub struct Component<S> {
    pub dim: usize,
    pub lambda: S,
    pub projector: SymMatrix<S>,
}

#[derive(Debug, Clone)]
pub struct Spectral<S> {
    /// Clusters with positive eigenvalue, largest first.
    pub components: Vec<Component<S>>,
    pub kernel_dim: usize,
    pub spectrum: Vec<f64>,
    pub effective_tol: f64,
}

/// Components `V_i` with `λ_i = ⟨v_i, v_i⟩ / dim V_i`. Components are eigenvalue
/// clusters: equal `λ` on non-isomorphic pieces is reported as one merged component.
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
pub struct DecompositionReport<S> {
    pub affine_dim: usize,
    pub component_dims: Vec<usize>,
    #[serde(serialize_with = "serde_scalar::vec")]
    pub lambdas: Vec<S>,
    #[serde(serialize_with = "serde_scalar::vec")]
    pub v_component_norms: Vec<S>,
    pub component_projections: Vec<SymMatrix<S>>,
    pub spectrum: Vec<f64>,
    pub eig_gap_tol: f64,
}

/// Splits a descending spectrum into kernel size and cluster lengths.
fn cluster(values: &[f64], tol: f64, kernel_floor: f64) -> Result<(usize, Vec<usize>)> {
    let lmax = values.first().copied().unwrap_or(0.0);
    let range = values.iter().take_while(|&&v| v > kernel_floor).count();
    let mut sizes = Vec::new();
    let mut start = 0;
    for i in 1..=range {
        let split = if i == range {
            true
        } else {
            let gap = (values[i - 1] - values[i]) / lmax;
            if gap > tol / 2.0 && gap <= tol {
                return Err(OrbitopeError::AmbiguousClusters {
                    tol,
                    spectrum: values.to_vec(),
                });
            }
            gap > tol
        };
        if split {
            sizes.push(i - start);
            start = i;
        }
    }
    Ok((values.len() - range, sizes))
}

/// Spectral decomposition into eigenvalue clusters, per scalar regime.
pub trait Decompose: Scalar {
    fn decompose(m: &SymMatrix<Self>, tol: f64) -> Result<Spectral<Self>>;
}

impl Decompose for f64 {
    fn decompose(m: &SymMatrix<f64>, tol: f64) -> Result<Spectral<f64>> {
        let eig = sym_eig(m)?;
        let trace = m.trace();
        let lmax = eig.values.first().copied().unwrap_or(0.0);
        let floor = (1e-12 * trace).max(tol * lmax);
        let (kernel_dim, sizes) = cluster(&eig.values, tol, floor)?;
        let mut components = Vec::new();
        let mut start = 0;
        for size in sizes {
            let idx = start..start + size;
            let lambda = eig.values[idx.clone()].iter().sum::<f64>() / size as f64;
            let mut p = SymMatrix::zeros(m.dim());
            for j in idx {
                p.add_outer(&eig.vectors[j], &1.0);
            }
            components.push(Component {
                dim: size,
                lambda,
                projector: p,
            });
            start += size;
        }
        Ok(Spectral {
            components,
            kernel_dim,
            spectrum: eig.values,
            effective_tol: tol,
        })
    }
}

impl Decompose for Rat {
    /// Clusters the float spectrum, lifts each cluster value to a rational, builds
    /// Lagrange projectors `∏_{j≠i} (M − λ_j)/(λ_i − λ_j)` and verifies
    /// `∑ P_i = I`, `∑ λ_i P_i = M`, `P_i² = P_i` exactly.
    fn decompose(m: &SymMatrix<Rat>, tol: f64) -> Result<Spectral<Rat>> {
        let mf = m.to_f64();
        let eig = sym_eig(&mf)?;
        let trace = mf.trace();
        let (kernel_dim, sizes) = cluster(&eig.values, tol, 1e-12 * trace)?;
        let fail = |msg: String| OrbitopeError::Invariant(format!("exact decomposition: {msg}"));
        let mut lambdas = Vec::new();
        let mut start = 0;
        for &size in &sizes {
            let mean = eig.values[start..start + size].iter().sum::<f64>() / size as f64;
            match rat_from_f64_approx(mean, MAX_LAMBDA_DEN) {
                Some(r) if !r.is_zero() => lambdas.push(r),
                _ => return Err(fail(format!("no rational lift for eigenvalue {mean}"))),
            }
            start += size;
        }
        let mut all = lambdas.clone();
        if kernel_dim > 0 {
            all.push(Rat::zero());
        }
        let d = m.dim();
        let id = SymMatrix::<Rat>::identity(d);
        let projectors: Vec<SymMatrix<Rat>> = (0..all.len())
            .map(|i| {
                let mut p = id.clone();
                for (j, lj) in all.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let factor = m.sub(&id.scale(lj)).scale(&(&all[i] - lj).recip());
                    p = p.mul_commuting(&factor);
                }
                p
            })
            .collect();
        let mut sum = SymMatrix::zeros(d);
        let mut recon = SymMatrix::zeros(d);
        for (p, l) in projectors.iter().zip(&all) {
            sum = sum.add(p);
            recon = recon.add(&p.scale(l));
        }
        if sum != id {
            return Err(fail("projectors do not sum to the identity".into()));
        }
        if &recon != m {
            return Err(fail("Σ λ_i P_i differs from M".into()));
        }
        for p in &projectors {
            if &p.mul_commuting(p) != p {
                return Err(fail("projector is not idempotent".into()));
            }
        }
        let components = lambdas
            .into_iter()
            .zip(projectors)
            .zip(sizes)
            .map(|((lambda, projector), size)| {
                let dim = projector.trace();
                if dim != Rat::from_integer(size.into()) {
                    return Err(fail(format!("projector rank {dim} differs from cluster size {size}")));
                }
                Ok(Component {
                    dim: size,
                    lambda,
                    projector,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Spectral {
            components,
            kernel_dim,
            spectrum: eig.values,
            effective_tol: tol,
        })
    }
}

/// Both Löwner–John ellipsoids of one orbit and the decomposition behind them.
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
pub struct OrbitEllipsoids<S> {
    pub e_min: EllipsoidSpec<S>,
    pub e_max_polar: EllipsoidSpec<S>,
    pub decomposition: DecompositionReport<S>,
    /// `max |Q_min · Q_max − P_range|`.
    pub polarity_defect: f64,
}

/// Cluster tolerance, widened on the sampled path to several times the noise level.
fn effective_tol<S: Scalar>(moment: &SecondMoment<S>, tol: f64) -> f64 {
    match &moment.std_err {
        None => tol,
        Some(se) => {
            let fro = (0..se.dim())
                .flat_map(|i| (0..se.dim()).map(move |j| (i, j)))
                .map(|(i, j)| se.get(i, j).powi(2))
                .sum::<f64>()
                .sqrt();
            let lmax = moment.form.norm_inf().max(f64::MIN_POSITIVE);
            tol.max(4.0 * fro / lmax)
        }
    }
}

pub fn min_volume_ellipsoid<S: Decompose>(
    moment: &SecondMoment<S>,
    eig_gap_tol: f64,
) -> Result<(EllipsoidSpec<S>, DecompositionReport<S>)> {
    let tol = effective_tol(moment, eig_gap_tol);
    let spec = S::decompose(&moment.form, tol)?;
    let affine_dim: usize = spec.components.iter().map(|c| c.dim).sum();
    if affine_dim == 0 {
        return Err(OrbitopeError::DegenerateOrbit("second-moment form vanishes".into()));
    }
    let dim_v = S::from_i64(affine_dim as i64);
    let y: Vec<S> = moment
        .base_point
        .iter()
        .zip(&moment.center)
        .map(|(a, b)| a.clone() - b.clone())
        .collect();
    let mut form = SymMatrix::zeros(moment.dim());
    let mut norms = Vec::new();
    for c in &spec.components {
        let vi = c.projector.quad_form(&y);
        if S::EXACT {
            let expect = c.lambda.clone() * S::from_i64(c.dim as i64);
            if vi != expect {
                return Err(OrbitopeError::Invariant(format!(
                    "⟨v_i, v_i⟩ = {:?} but λ_i · dim V_i = {:?}",
                    vi, expect
                )));
            }
        } else if vi.as_f64() <= 1e-14 * moment.form.trace().as_f64() {
            return Err(OrbitopeError::DegenerateOrbit(
                "base point has no component in an invariant subspace".into(),
            ));
        }
        norms.push(vi);
        let w = S::one() / (c.lambda.clone() * dim_v.clone());
        form = form.add(&c.projector.scale(&w));
    }
    let e = EllipsoidSpec {
        center: moment.center.clone(),
        form,
        radius_scale: S::one(),
        representation: representation::<S>(),
    };
    let report = DecompositionReport {
        affine_dim,
        component_dims: spec.components.iter().map(|c| c.dim).collect(),
        lambdas: spec.components.iter().map(|c| c.lambda.clone()).collect(),
        v_component_norms: norms,
        component_projections: spec.components.into_iter().map(|c| c.projector).collect(),
        spectrum: spec.spectrum,
        eig_gap_tol: tol,
    };
    Ok((e, report))
}

/// `E_max = {ℓ : ℓᵀ M ℓ ≤ 1 / dim V}`, written with form `dim V · M` and radius 1.
pub fn max_volume_ellipsoid_polar<S: Scalar>(moment: &SecondMoment<S>, affine_dim: usize) -> EllipsoidSpec<S> {
    EllipsoidSpec {
        center: vec![S::zero(); moment.dim()],
        form: moment.form.scale(&S::from_i64(affine_dim as i64)),
        radius_scale: S::one(),
        representation: representation::<S>(),
    }
}

/// `max |Q_min Q_max − ∑ P_i|`: zero when the forms are inverse on the affine hull.
pub fn polarity_defect<S: Scalar>(
    e_min: &EllipsoidSpec<S>,
    e_max: &EllipsoidSpec<S>,
    report: &DecompositionReport<S>,
) -> f64 {
    let a = e_min.form.to_f64().to_rows();
    let b = e_max.form.to_f64().to_rows();
    let mut range = SymMatrix::<f64>::zeros(e_min.dim());
    for p in &report.component_projections {
        range = range.add(&p.to_f64());
    }
    let d = a.len();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let s: f64 = (0..d).map(|k| a[i][k] * b[k][j]).sum();
            worst = worst.max((s - range.get(i, j)).abs());
        }
    }
    worst
}

pub fn orbit_ellipsoids<S: Decompose>(moment: &SecondMoment<S>, eig_gap_tol: f64) -> Result<OrbitEllipsoids<S>> {
    let (e_min, decomposition) = min_volume_ellipsoid(moment, eig_gap_tol)?;
    let e_max_polar = max_volume_ellipsoid_polar(moment, decomposition.affine_dim);
    let polarity_defect = polarity_defect(&e_min, &e_max_polar, &decomposition);
    Ok(OrbitEllipsoids {
        e_min,
        e_max_polar,
        decomposition,
        polarity_defect,
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "representation", rename_all = "snake_case")]
pub enum AnyEllipsoids {
    Exact(OrbitEllipsoids<Rat>),
    Float(OrbitEllipsoids<f64>),
}

impl AnyEllipsoids {
    /// Exact when the moment is exact and the rational decomposition verifies; the
    /// float decomposition of the same form otherwise.
    pub fn compute(moment: &AnyMoment, eig_gap_tol: f64) -> Result<Self> {
        match moment {
            AnyMoment::Exact(m) => match orbit_ellipsoids(m, eig_gap_tol) {
                Ok(e) => Ok(AnyEllipsoids::Exact(e)),
                Err(OrbitopeError::Invariant(_)) => {
                    let mf = SecondMoment {
                        center: m.center.iter().map(rat_to_f64).collect(),
                        form: m.form.to_f64(),
                        std_err: None,
                        base_point: m.base_point.iter().map(rat_to_f64).collect(),
                        points: m.points,
                        group_order: m.group_order,
                    };
                    Ok(AnyEllipsoids::Float(orbit_ellipsoids(&mf, eig_gap_tol)?))
                }
                Err(e) => Err(e),
            },
            AnyMoment::Float(m) => Ok(AnyEllipsoids::Float(orbit_ellipsoids(m, eig_gap_tol)?)),
        }
    }

    pub fn affine_dim(&self) -> usize {
        match self {
            AnyEllipsoids::Exact(e) => e.decomposition.affine_dim,
            AnyEllipsoids::Float(e) => e.decomposition.affine_dim,
        }
    }

    pub fn component_dims(&self) -> &[usize] {
        match self {
            AnyEllipsoids::Exact(e) => &e.decomposition.component_dims,
            AnyEllipsoids::Float(e) => &e.decomposition.component_dims,
        }
    }

    pub fn polarity_defect(&self) -> f64 {
        match self {
            AnyEllipsoids::Exact(e) => e.polarity_defect,
            AnyEllipsoids::Float(e) => e.polarity_defect,
        }
    }
}

impl<S: Scalar> DecompositionReport<S> {
    /// Squared E_min radius when E_min is a ball: `λ · dim V` for a single component.
    pub fn ball_radius_sq(&self) -> Option<S> {
        match self.lambdas.as_slice() {
            [l] => Some(l.clone() * S::from_i64(self.affine_dim as i64)),
            _ => None,
        }
    }
}

/// Both sides of `∫ (c, g v)² dg = (c, c) / dim V`, where `(a, b) = aᵀ Q_min b`.
pub fn rescaled_average_identity<S: Scalar>(moment: &SecondMoment<S>, e_min: &EllipsoidSpec<S>, affine_dim: usize, c: &[S]) -> (S, S) {
    let qc = e_min.form.mul_vec(c);
    let lhs = moment.form.quad_form(&qc);
    let rhs = e_min.form.quad_form(c) / S::from_i64(affine_dim as i64);
    (lhs, rhs)
}
