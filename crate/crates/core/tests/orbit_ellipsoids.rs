use num_traits::{One, Zero};
use orbitope_core::math::{rat, rat_int, Rat, RngSeed, SeededRng, SymMatrix};
use orbitope_core::orbit::families::{asymmetric_tsp, plus_minus, quarter_turns, symmetric_tsp};
use orbitope_core::orbit::{
    ellipsoid_eval, finite_orbit, orbit_ellipsoids, orbit_second_moment, AnyMoment, EllipsoidSpec, OrbitSpec,
    DEFAULT_EIG_GAP_TOL,
};

fn exact(spec: &OrbitSpec) -> orbitope_core::orbit::SecondMoment<Rat> {
    match orbit_second_moment(spec, 0, RngSeed(0)).unwrap() {
        AnyMoment::Exact(m) => m,
        AnyMoment::Float(_) => panic!("finite group must give an exact moment"),
    }
}

#[test]
fn plus_minus_identity_moment() {
    let spec = plus_minus(vec![rat_int(1), rat_int(0)]).unwrap();
    let m = exact(&spec);
    assert_eq!(m.form, SymMatrix::from_fn(2, |i, j| if i == 0 && j == 0 { Rat::one() } else { Rat::zero() }));
    assert!(m.center.iter().all(Zero::is_zero));
    let e = orbit_ellipsoids(&m, DEFAULT_EIG_GAP_TOL).unwrap();
    // Segment {±1}: E_max is ℓ² ≤ 1 on the hull direction.
    assert_eq!(e.decomposition.affine_dim, 1);
    assert_eq!(*e.e_max_polar.form.get(0, 0), Rat::one());
    assert_eq!(ellipsoid_eval(&e.e_min, &[rat_int(1), rat_int(0)]).unwrap(), Rat::zero());
}

#[test]
fn quarter_turn_moment() {
    let m = exact(&quarter_turns([1, 0]).unwrap());
    assert_eq!(m.form, SymMatrix::from_fn(2, |i, j| if i == j { rat(1, 2) } else { Rat::zero() }));
    let e = orbit_ellipsoids(&m, DEFAULT_EIG_GAP_TOL).unwrap();
    // ⟨v,v⟩ = 1 on a 2-dimensional hull: E_min is the unit disc.
    assert_eq!(e.decomposition.component_dims, vec![2]);
    assert_eq!(e.decomposition.ball_radius_sq().unwrap(), Rat::one());
}

#[test]
fn unit_ball_eval() {
    let b = EllipsoidSpec::<Rat>::unit_ball(3);
    let zero = vec![Rat::zero(); 3];
    assert_eq!(ellipsoid_eval(&b, &zero).unwrap(), rat_int(-1));
    assert_eq!(ellipsoid_eval(&b, &[rat_int(1), rat_int(0), rat_int(0)]).unwrap(), Rat::zero());
    assert!(ellipsoid_eval(&b, &[Rat::zero()]).is_err());
}

#[test]
fn symmetric_tsp_is_a_ball_through_every_vertex() {
    for n in 5..=6 {
        let spec = symmetric_tsp(n).unwrap();
        let m = exact(&spec);
        let OrbitSpec::Finite { group, .. } = &spec else { unreachable!() };
        for g in group.elements().iter().step_by(7) {
            assert!(m.form.commutes_with(&g.to_matrix()));
        }
        let e = orbit_ellipsoids(&m, DEFAULT_EIG_GAP_TOL).unwrap();
        let nn = n as i64;
        assert_eq!(e.decomposition.component_dims, vec![(n * n - 3 * n) / 2]);
        assert_eq!(e.decomposition.ball_radius_sq().unwrap(), rat(2 * nn * (nn - 3), nn - 1));
        for x in finite_orbit(&spec).unwrap() {
            assert_eq!(ellipsoid_eval(&e.e_min, &x).unwrap(), Rat::zero());
        }
        assert!(e.polarity_defect < 1e-8);
    }
}

#[test]
fn asymmetric_tsp_components() {
    let n = 5;
    let m = exact(&asymmetric_tsp(n).unwrap());
    let e = orbit_ellipsoids(&m, DEFAULT_EIG_GAP_TOL).unwrap();
    let mut dims = e.decomposition.component_dims.clone();
    dims.sort();
    assert_eq!(dims, vec![5, 6]);
    assert_eq!(e.decomposition.affine_dim, 11);
    let mut l = e.decomposition.lambdas.clone();
    l.sort();
    assert_eq!(l, vec![rat(1, 4), rat(5, 12)]);
}

#[test]
fn rescaled_average_identity_on_random_vectors() {
    let mut rng = SeededRng::new(RngSeed(5));
    for n in 4..=6 {
        for spec in [symmetric_tsp(n).unwrap(), asymmetric_tsp(n).unwrap()] {
            let m = exact(&spec);
            let e = orbit_ellipsoids(&m, DEFAULT_EIG_GAP_TOL).unwrap();
            for _ in 0..3 {
                let c: Vec<Rat> = (0..n * n).map(|_| rat(rng.below(11) as i64 - 5, 1 + rng.below(4) as i64)).collect();
                let (lhs, rhs) = orbitope_core::orbit::ellipsoid::rescaled_average_identity(
                    &m,
                    &e.e_min,
                    e.decomposition.affine_dim,
                    &c,
                );
                assert_eq!(lhs, rhs);
            }
        }
    }
}
