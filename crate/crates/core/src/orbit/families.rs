//! Orbit specifications for the families used throughout the crate.

use num_traits::{One, Zero};

use super::group::{CenterMode, CompactSampler, FiniteGroup, GroupElement, OrbitSpec};
use crate::error::{invalid, Result};
use crate::grassmann::frame::haar_pluecker_dense;
use crate::grassmann::ExteriorTables;
use crate::math::{rat_int, Rat};
use crate::sphere::{orthonormal_basis_U, PolyEvaluator};

/// Adjacency matrix of the cycle `1 → 2 → … → n → 1`, flattened row-major.
/// Undirected when `symmetric` is set.
pub fn cycle_matrix(n: usize, symmetric: bool) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); n * n];
    for i in 0..n {
        let j = (i + 1) % n;
        v[i * n + j] = Rat::one();
        if symmetric {
            v[j * n + i] = Rat::one();
        }
    }
    v
}

/// `S_n` orbit of the undirected Hamiltonian cycle: the vertices of `ST_n`.
pub fn symmetric_tsp(n: usize) -> Result<OrbitSpec> {
    OrbitSpec::finite(
        FiniteGroup::symmetric_on_matrices(n)?,
        cycle_matrix(n, true),
        CenterMode::AutoCenter,
    )
}

/// `S_n` orbit of the directed Hamiltonian circuit: the vertices of `AT_n`.
pub fn asymmetric_tsp(n: usize) -> Result<OrbitSpec> {
    OrbitSpec::finite(
        FiniteGroup::symmetric_on_matrices(n)?,
        cycle_matrix(n, false),
        CenterMode::AutoCenter,
    )
}

/// `{±I}` acting on `v`.
pub fn plus_minus(v: Vec<Rat>) -> Result<OrbitSpec> {
    OrbitSpec::finite(FiniteGroup::plus_minus_identity(v.len()), v, CenterMode::AutoCenter)
}

/// Cyclic group generated by the coordinate rotation `x_i ↦ x_{i+1}` acting on `v`.
pub fn coordinate_cycle(v: Vec<Rat>) -> Result<OrbitSpec> {
    let d = v.len();
    let g = GroupElement::perm((0..d).map(|i| (i + 1) % d).collect());
    OrbitSpec::finite(FiniteGroup::cyclic(g, d)?, v, CenterMode::AutoCenter)
}

/// Quarter turns of the plane acting on `v`.
pub fn quarter_turns(v: [i64; 2]) -> Result<OrbitSpec> {
    OrbitSpec::finite(
        FiniteGroup::quarter_turns(),
        v.iter().map(|&x| rat_int(x)).collect(),
        CenterMode::PreCentered,
    )
}

/// `SO(n)` orbit of `e_1 ∧ … ∧ e_m` in `∧^m R^n`: the Plücker-embedded oriented Grassmannian.
/// Coordinates follow the colex order of [`ExteriorTables`].
pub fn grassmannian(n: usize, m: usize) -> Result<OrbitSpec> {
    if m == 0 || m >= n {
        return invalid(format!("Grassmannian orbit needs 1 <= m < n (n = {n}, m = {m})"));
    }
    let t = ExteriorTables::new(n, m)?;
    let dim = t.len(m);
    let mut base = vec![0.0; dim];
    base[0] = 1.0;
    let sampler = CompactSampler::new(format!("G_{m}(R^{n})"), dim, move |rng| haar_pluecker_dense(&t, m, rng));
    OrbitSpec::compact(sampler, base, CenterMode::PreCentered)
}

/// `SO(n)` orbit of point evaluation at `e_1` on `U_{2k,n}`, in orthonormal-basis
/// coordinates: the orbit point for `x ∈ S^{n−1}` is `(b_i(x))_i`.
pub fn pos_orbit(n: usize, k: u32) -> Result<OrbitSpec> {
    if k == 0 {
        return invalid("k must be positive");
    }
    let basis = orthonormal_basis_U(n, 2 * k)?;
    let evs: Vec<PolyEvaluator> = basis.elements.iter().map(PolyEvaluator::new).collect();
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let base: Vec<f64> = evs.iter().map(|e| e.eval(&e1)).collect();
    let dim = evs.len();
    let sampler = CompactSampler::new(format!("Pos_{{{},{n}}}", 2 * k), dim, move |rng| {
        let x = rng.unit_vector(n);
        evs.iter().map(|e| e.eval(&x)).collect()
    });
    OrbitSpec::compact(sampler, base, CenterMode::PreCentered)
}
