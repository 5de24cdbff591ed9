//! Vertices of the symmetric and asymmetric Traveling Salesman Polytopes and exact
//! checks of their ellipsoids, inscribed balls and symmetry coefficients.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, OrbitopeError, Result};
use crate::lp::{self, Membership};
use crate::math::scalar::{serde_rat, serde_rat_opt, serde_rat_vec};
use crate::math::{exact_rank, factorial, rat, rat_int, rat_to_f64, Rat};
use crate::orbit::group::permutations;

pub const MIN_N: usize = 4;
pub const MAX_N: usize = 9;

/// A Hamiltonian cycle (undirected) or circuit (directed) through cities `0..n`.
///
/// Canonical form starts at city 0; undirected tours are stored in the direction
/// whose second city is smaller than the last.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tour {
    pub order: Vec<usize>,
    pub symmetric: bool,
}

impl Tour {
    pub fn new(order: Vec<usize>, symmetric: bool) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        if n < 3 || order.iter().any(|&c| c >= n || std::mem::replace(&mut seen[c], true)) {
            return invalid(format!("{order:?} is not a permutation of 0..{n}"));
        }
        let start = order.iter().position(|&c| c == 0).unwrap();
        let mut o: Vec<usize> = order[start..].iter().chain(&order[..start]).copied().collect();
        if symmetric && o[1] > o[n - 1] {
            o[1..].reverse();
        }
        Ok(Tour { order: o, symmetric })
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn to_matrix(&self) -> TourMatrix {
        let n = self.n();
        let mut entries = vec![0u8; n * n];
        for k in 0..n {
            let (a, b) = (self.order[k], self.order[(k + 1) % n]);
            entries[a * n + b] = 1;
            if self.symmetric {
                entries[b * n + a] = 1;
            }
        }
        TourMatrix {
            n,
            symmetric: self.symmetric,
            entries,
        }
    }
}

/// 0/1 adjacency matrix of a tour, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TourMatrix {
    pub n: usize,
    pub symmetric: bool,
    pub entries: Vec<u8>,
}

impl TourMatrix {
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[i * self.n + j]
    }

    /// Zero diagonal and 0/1 entries; symmetric with row sums 2, or row and column sums 1.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let bad = |msg: &str| invalid(format!("not a tour matrix: {msg}"));
        if self.entries.len() != n * n {
            return bad("wrong size");
        }
        if self.entries.iter().any(|&e| e > 1) {
            return bad("entries must be 0 or 1");
        }
        if (0..n).any(|i| self.get(i, i) != 0) {
            return bad("nonzero diagonal");
        }
        let row = |i: usize| (0..n).map(|j| self.get(i, j) as usize).sum::<usize>();
        let col = |j: usize| (0..n).map(|i| self.get(i, j) as usize).sum::<usize>();
        if self.symmetric {
            if (0..n).any(|i| (0..n).any(|j| self.get(i, j) != self.get(j, i))) {
                return bad("not symmetric");
            }
            if (0..n).any(|i| row(i) != 2) {
                return bad("row sums must be 2");
            }
        } else if (0..n).any(|i| row(i) != 1 || col(i) != 1) {
            return bad("row and column sums must be 1");
        }
        Ok(())
    }

    pub fn to_rat_vec(&self) -> Vec<Rat> {
        self.entries.iter().map(|&e| rat_int(e as i64)).collect()
    }

    /// `⟨self, other⟩`: twice the number of shared edges (symmetric) or shared arcs.
    pub fn inner(&self, other: &TourMatrix) -> usize {
        self.entries
            .iter()
            .zip(&other.entries)
            .filter(|(a, b)| **a == 1 && **b == 1)
            .count()
    }
}

fn check_n(n: usize) -> Result<()> {
    if !(MIN_N..=MAX_N).contains(&n) {
        return invalid(format!("tour enumeration supports {MIN_N} ≤ n ≤ {MAX_N}, got {n}"));
    }
    Ok(())
}

pub fn enumerate_tour_orders(n: usize, symmetric: bool) -> Result<Vec<Tour>> {
    check_n(n)?;
    Ok(permutations(n - 1)
        .into_iter()
        .filter(|p| !symmetric || p[0] < p[n - 2])
        .map(|p| {
            let order = std::iter::once(0).chain(p.into_iter().map(|c| c + 1)).collect();
            Tour { order, symmetric }
        })
        .collect())
}

/// All `(n−1)!/2` undirected or `(n−1)!` directed tours.
pub fn enumerate_tours(n: usize, symmetric: bool) -> Result<Vec<TourMatrix>> {
    Ok(enumerate_tour_orders(n, symmetric)?
        .iter()
        .map(Tour::to_matrix)
        .collect())
}

/// The tour `0 → 1 → … → n−1 → 0`.
pub fn standard_tour(n: usize, symmetric: bool) -> TourMatrix {
    Tour {
        order: (0..n).collect(),
        symmetric,
    }
    .to_matrix()
}

/// Center of `ST_n` (`symmetric`, off-diagonal `2/(n−1)`) or `AT_n` (`1/(n−1)`).
pub fn center(n: usize, symmetric: bool) -> Vec<Rat> {
    let c = rat(if symmetric { 2 } else { 1 }, n as i64 - 1);
    (0..n * n)
        .map(|k| if k / n == k % n { Rat::zero() } else { c.clone() })
        .collect()
}

fn sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

/// Closed-form point where the inscribed ball touches the facet `x_12 = 0`: entries
/// `0` on the `{0,1}` block, `2/(n−2)` between `{0,1}` and the rest, and
/// `2(n−4)/((n−2)(n−3))` off the diagonal among the rest.
pub fn deep_point(n: usize) -> Vec<Rat> {
    let ni = n as i64;
    let mixed = rat(2, ni - 2);
    let rest = rat(2 * (ni - 4), (ni - 2) * (ni - 3));
    (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            if i == j || (i < 2 && j < 2) {
                Rat::zero()
            } else if i < 2 || j < 2 {
                mixed.clone()
            } else {
                rest.clone()
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

/// Exact constants of `ST_n`; radii are stored squared.
#[derive(Debug, Clone, Serialize)]
pub struct StnReport {
    pub n: usize,
    pub vertices: usize,
    pub dim: usize,
    #[serde(with = "serde_rat")]
    pub center_offdiag: Rat,
    #[serde(with = "serde_rat")]
    pub r_min_sq: Rat,
    pub r_min: f64,
    #[serde(with = "serde_rat_opt")]
    pub r_max_sq: Option<Rat>,
    pub r_max: Option<f64>,
    #[serde(with = "serde_rat_opt")]
    pub sym_coeff: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt_vec")]
    pub deep_point: Option<Vec<Rat>>,
    pub checks: Vec<Check>,
}

fn ser_opt_vec<Ser: serde::Serializer>(v: &Option<Vec<Rat>>, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
    match v {
        Some(v) => serde_rat_vec::serialize(v, s),
        None => s.serialize_none(),
    }
}

impl StnReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Closed forms for `ST_n` with exact verification against the enumerated vertices.
pub fn stn_closed_forms(n: usize) -> Result<StnReport> {
    check_n(n)?;
    let ni = n as i64;
    let verts = enumerate_tours(n, true)?;
    let c = center(n, true);
    let r_min_sq = rat(2 * ni * (ni - 3), ni - 1);
    let mut checks = Vec::new();

    let far = verts
        .iter()
        .filter(|v| {
            let y = sub(&v.to_rat_vec(), &c);
            dot(&y, &y) != r_min_sq
        })
        .count();
    checks.push(Check::new(
        "vertices_at_r_min",
        far == 0,
        format!("{} of {} vertices at squared distance {r_min_sq}", verts.len() - far, verts.len()),
    ));
    let expected_count = u64::try_from(factorial(n as u32 - 1)).unwrap() / 2;
    checks.push(Check::new(
        "vertex_count",
        verts.len() as u64 == expected_count,
        format!("{} tours, expected (n−1)!/2 = {expected_count}", verts.len()),
    ));

    let (r_max_sq, sym_coeff, deep) = if n >= 5 {
        let r_max_sq = rat(8, (ni - 1) * (ni - 3));
        let b = deep_point(n);
        let bc = sub(&b, &c);
        let dist = dot(&bc, &bc);
        checks.push(Check::new(
            "deep_point_distance",
            dist == r_max_sq,
            format!("‖b − c‖² = {dist}, expected {r_max_sq}"),
        ));
        let face: Vec<&TourMatrix> = verts.iter().filter(|v| v.get(0, 1) == 0).collect();
        let centroid: Vec<Rat> = (0..n * n)
            .map(|k| {
                rat_int(face.iter().map(|v| v.entries[k] as i64).sum::<i64>()) / rat_int(face.len() as i64)
            })
            .collect();
        checks.push(Check::new(
            "deep_point_is_face_centroid",
            centroid == b,
            format!("centroid of the {} vertices with x_12 = 0", face.len()),
        ));
        (Some(r_max_sq), Some(rat(2, ni - 3)), Some(b))
    } else {
        (None, None, None)
    };

    Ok(StnReport {
        n,
        vertices: verts.len(),
        dim: (n * n - 3 * n) / 2,
        center_offdiag: rat(2, ni - 1),
        r_min: rat_to_f64(&r_min_sq).sqrt(),
        r_min_sq,
        r_max: r_max_sq.as_ref().map(|r| rat_to_f64(r).sqrt()),
        r_max_sq,
        sym_coeff,
        deep_point: deep,
        checks,
    })
}

pub fn hull_membership(vertices: &[TourMatrix], point: &[Rat]) -> Result<Membership> {
    let vs: Vec<Vec<Rat>> = vertices.iter().map(TourMatrix::to_rat_vec).collect();
    lp::hull_membership(&vs, point)
}

/// Tours sharing no edge (or arc) with `v`.
pub fn disjoint_face(vertices: &[TourMatrix], v: &TourMatrix) -> Vec<TourMatrix> {
    vertices.iter().filter(|h| h.inner(v) == 0).cloned().collect()
}

/// Result of testing `−λ(v − c) + c ∈ F_v` with `λ = 2/(n−3)`.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetryCertificate {
    pub n: usize,
    #[serde(with = "serde_rat")]
    pub lambda: Rat,
    pub face_size: usize,
    pub membership: Membership,
}

pub fn stn_symmetry_certificate(n: usize) -> Result<SymmetryCertificate> {
    check_n(n)?;
    if n < 5 {
        return invalid("the symmetry coefficient needs n ≥ 5");
    }
    let verts = enumerate_tours(n, true)?;
    let v = standard_tour(n, true);
    let face = disjoint_face(&verts, &v);
    let c = center(n, true);
    let lambda = rat(2, n as i64 - 3);
    let target: Vec<Rat> = v
        .to_rat_vec()
        .iter()
        .zip(&c)
        .map(|(vi, ci)| ci - &lambda * (vi - ci))
        .collect();
    let membership = hull_membership(&face, &target)?;
    Ok(SymmetryCertificate {
        n,
        lambda,
        face_size: face.len(),
        membership,
    })
}

/// Extremes of `ℓ(x) = ⟨v − c, x − c⟩` over the vertices of `ST_n`, and the number of
/// minimizers that lie in `F_v`.
#[derive(Debug, Clone, Serialize)]
pub struct FunctionalRange {
    #[serde(with = "serde_rat")]
    pub max: Rat,
    #[serde(with = "serde_rat")]
    pub min: Rat,
    pub minimizers: usize,
    pub minimizers_in_face: usize,
    pub face_size: usize,
}

pub fn stn_functional_range(n: usize) -> Result<FunctionalRange> {
    let verts = enumerate_tours(n, true)?;
    let v = standard_tour(n, true);
    let c = center(n, true);
    let vc = sub(&v.to_rat_vec(), &c);
    let vals: Vec<Rat> = verts.iter().map(|x| dot(&vc, &sub(&x.to_rat_vec(), &c))).collect();
    let max = vals.iter().max().unwrap().clone();
    let min = vals.iter().min().unwrap().clone();
    let mins: Vec<usize> = (0..verts.len()).filter(|&i| vals[i] == min).collect();
    Ok(FunctionalRange {
        max,
        minimizers: mins.len(),
        minimizers_in_face: mins.iter().filter(|&&i| verts[i].inner(&v) == 0).count(),
        face_size: verts.iter().filter(|h| h.inner(&v) == 0).count(),
        min,
    })
}

/// `(n−1) ∑_{i≠j} ((x_ij + x_ji)/2 − 1/(n−1))² + ((n−1)(n−2)/n) ∑_{i≠j} ((x_ij − x_ji)/2)² − (n² − 3n + 1)`.
pub fn atn_ellipsoid_residual(n: usize, x: &TourMatrix) -> Result<Rat> {
    if x.n != n || x.symmetric {
        return invalid("expected a directed tour matrix of matching size");
    }
    x.validate()?;
    atn_ellipsoid_residual_relaxed(n, &x.to_rat_vec())
}

/// The residual at an arbitrary `n × n` point (row-major).
pub fn atn_ellipsoid_residual_relaxed(n: usize, x: &[Rat]) -> Result<Rat> {
    if x.len() != n * n {
        return Err(OrbitopeError::DimensionMismatch {
            expected: n * n,
            got: x.len(),
        });
    }
    if n < 3 {
        return invalid("n must be at least 3");
    }
    let ni = n as i64;
    let half = rat(1, 2);
    let c = rat(1, ni - 1);
    let mut sym = Rat::zero();
    let mut skew = Rat::zero();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let s = (&x[i * n + j] + &x[j * n + i]) * &half - &c;
            let a = (&x[i * n + j] - &x[j * n + i]) * &half;
            sym += &s * &s;
            skew += &a * &a;
        }
    }
    Ok(rat_int(ni - 1) * sym + rat((ni - 1) * (ni - 2), ni) * skew - rat_int(ni * ni - 3 * ni + 1))
}

/// Dimension of the affine hull, by exact rank of differences from the first vertex.
pub fn affine_hull_dim(vertices: &[TourMatrix]) -> usize {
    let Some(first) = vertices.first() else {
        return 0;
    };
    let v0 = first.to_rat_vec();
    exact_rank(vertices[1..].iter().map(|v| sub(&v.to_rat_vec(), &v0)))
}

/// `dim ST_n = (n² − 3n)/2`, `dim AT_n = n² − 3n + 1`.
pub fn expected_hull_dim(n: usize, symmetric: bool) -> usize {
    if symmetric {
        (n * n - 3 * n) / 2
    } else {
        n * n - 3 * n + 1
    }
}

/// One row of the asymmetric residual table.
#[derive(Debug, Clone, Serialize)]
pub struct AtnReport {
    pub n: usize,
    pub vertices: usize,
    pub dim: usize,
    pub nonzero_residuals: usize,
    #[serde(with = "serde_rat")]
    pub center_residual: Rat,
    pub checks: Vec<Check>,
}

pub fn atn_report(n: usize) -> Result<AtnReport> {
    let verts = enumerate_tours(n, false)?;
    let mut nonzero = 0;
    for v in &verts {
        if !atn_ellipsoid_residual(n, v)?.is_zero() {
            nonzero += 1;
        }
    }
    let center_residual = atn_ellipsoid_residual_relaxed(n, &center(n, false))?;
    let expected_center = -rat_int((n * n - 3 * n + 1) as i64);
    let count = u64::try_from(factorial(n as u32 - 1)).unwrap();
    let checks = vec![
        Check::new(
            "vertex_count",
            verts.len() as u64 == count,
            format!("{} circuits, expected (n−1)! = {count}", verts.len()),
        ),
        Check::new(
            "vertices_on_boundary",
            nonzero == 0,
            format!("{nonzero} of {} vertices with nonzero residual", verts.len()),
        ),
        Check::new(
            "center_residual",
            center_residual == expected_center,
            format!("residual at c = {center_residual}"),
        ),
    ];
    Ok(AtnReport {
        n,
        vertices: verts.len(),
        dim: expected_hull_dim(n, false),
        nonzero_residuals: nonzero,
        center_residual,
        checks,
    })
}

impl AtnReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn enumeration_counts_and_invariants() {
        for (n, sym, count) in [(4, true, 3), (5, true, 12), (5, false, 24), (6, true, 60), (6, false, 120)] {
            let ts = enumerate_tours(n, sym).unwrap();
            assert_eq!(ts.len(), count);
            assert_eq!(ts.iter().collect::<HashSet<_>>().len(), count);
            for t in &ts {
                t.validate().unwrap();
            }
        }
        assert!(enumerate_tours(3, true).is_err());
        assert!(enumerate_tours(10, true).is_err());
    }

    #[test]
    fn canonical_tours() {
        let a = Tour::new(vec![2, 0, 1, 3], true).unwrap();
        let b = Tour::new(vec![3, 1, 0, 2], true).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.order, vec![0, 1, 3, 2]);
        assert_eq!(a.to_matrix(), b.to_matrix());
        let d = Tour::new(vec![2, 0, 1, 3], false).unwrap();
        assert_eq!(d.order, vec![0, 1, 3, 2]);
        assert!(Tour::new(vec![0, 0, 1], true).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let r5 = stn_closed_forms(5).unwrap();
        assert_eq!((r5.dim, r5.r_min_sq.clone()), (5, rat_int(5)));
        assert_eq!(r5.r_max_sq, Some(rat_int(1)));
        assert_eq!(r5.sym_coeff, Some(rat_int(1)));
        assert!(r5.all_pass(), "{:?}", r5.checks);
        let r6 = stn_closed_forms(6).unwrap();
        assert_eq!(r6.r_min_sq, rat(36, 5));
        assert_eq!(r6.r_max_sq, Some(rat(8, 15)));
        assert_eq!(r6.sym_coeff, Some(rat(2, 3)));
        assert!(r6.all_pass());
        let r4 = stn_closed_forms(4).unwrap();
        assert!(r4.sym_coeff.is_none() && r4.deep_point.is_none());
        assert!(r4.all_pass());
    }

    #[test]
    fn atn_residuals() {
        let r = atn_report(5).unwrap();
        assert!(r.all_pass(), "{:?}", r.checks);
        assert_eq!(r.center_residual, rat_int(-11));
        let sym = standard_tour(5, true);
        assert!(atn_ellipsoid_residual(5, &sym).is_err());
    }

    #[test]
    fn membership_examples() {
        let verts = enumerate_tours(5, true).unwrap();
        let c = center(5, true);
        assert!(hull_membership(&verts, &c).unwrap().is_inside());
        let v = standard_tour(5, true).to_rat_vec();
        let out: Vec<Rat> = v.iter().zip(&c).map(|(a, b)| b + rat(101, 100) * (a - b)).collect();
        assert!(!hull_membership(&verts, &out).unwrap().is_inside());
        let cert = stn_symmetry_certificate(5).unwrap();
        assert!(cert.membership.is_inside());
    }

    #[test]
    fn functional_extremes() {
        for n in 5..=6 {
            let ni = n as i64;
            let r = stn_functional_range(n).unwrap();
            assert_eq!(r.max, rat(2 * ni * (ni - 3), ni - 1));
            assert_eq!(r.min, rat(-4 * ni, ni - 1));
            assert_eq!(r.minimizers, r.minimizers_in_face);
            assert_eq!(r.minimizers, r.face_size);
        }
    }

    #[test]
    fn hull_dimensions() {
        for n in 5..=6 {
            assert_eq!(affine_hull_dim(&enumerate_tours(n, true).unwrap()), expected_hull_dim(n, true));
            assert_eq!(affine_hull_dim(&enumerate_tours(n, false).unwrap()), expected_hull_dim(n, false));
        }
    }
}
