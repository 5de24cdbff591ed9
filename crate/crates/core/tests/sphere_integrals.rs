use std::collections::BTreeMap;
use std::time::Instant;

use orbitope_core::math::{rat_to_f64, MultiIndex, Rat, RngSeed, SeededRng};
use orbitope_core::sphere::{l2_inner, lp_norm_2k, mc_monomial_moments, monomial_moment, HomPoly, NormMethod};
use proptest::prelude::*;

/// Twenty multi-indices with `n ≤ 6` and degree at most 8, odd ones included.
pub fn moment_suite() -> Vec<Vec<u32>> {
    vec![
        vec![2, 0],
        vec![4, 4],
        vec![6, 2],
        vec![1, 1],
        vec![2, 0, 0],
        vec![4, 0, 0],
        vec![2, 2, 0],
        vec![2, 2, 2],
        vec![8, 0, 0],
        vec![3, 1, 0],
        vec![2, 2, 2, 2],
        vec![4, 2, 0, 0],
        vec![6, 0, 0, 2],
        vec![2, 0, 0, 0, 0],
        vec![2, 2, 2, 0, 2],
        vec![4, 4, 0, 0, 0],
        vec![2, 2, 0, 0, 0, 0],
        vec![2, 2, 2, 2, 0, 0],
        vec![4, 2, 2, 0, 0, 0],
        vec![1, 2, 2, 0, 0, 1],
    ]
}

#[test]
fn exact_moments_match_monte_carlo() {
    let t = Instant::now();
    let mut by_n: BTreeMap<usize, Vec<MultiIndex>> = BTreeMap::new();
    for a in moment_suite() {
        by_n.entry(a.len()).or_default().push(MultiIndex(a));
    }
    for (n, alphas) in by_n {
        let est = mc_monomial_moments(n, &alphas, 10_000_000, RngSeed(2000 + n as u64)).unwrap();
        for (a, mv) in alphas.iter().zip(est) {
            let exact = rat_to_f64(&monomial_moment(n, a).unwrap());
            assert!((mv.mean - exact).abs() <= 3.0 * mv.std_err(), "{:?}: {} vs {exact} (σ {})", a.exponents(), mv.mean, mv.std_err());
        }
    }
    eprintln!("moment suite: {:?}", t.elapsed());
}

#[test]
fn second_moments_sum_to_one_up_to_twelve() {
    for n in 1..=12 {
        let s: Rat = (0..n).map(|i| monomial_moment(n, &MultiIndex::unit(n, i, 2)).unwrap()).sum();
        assert_eq!(s, Rat::from_integer(1.into()));
    }
}

fn random_poly(n: usize, m: u32, rng: &mut SeededRng) -> HomPoly<f64> {
    HomPoly::from_terms(n, m, MultiIndex::all_of_degree(n, m).into_iter().map(|a| (a, rng.gaussian()))).unwrap()
}

#[test]
fn norms_are_monotone_in_k() {
    let mut rng = SeededRng::new(RngSeed(50));
    for i in 0..50 {
        let p = random_poly(3, 1 + i % 3, &mut rng);
        let vals: Vec<f64> = (1..=4).map(|k| lp_norm_2k(&p, k, NormMethod::Exact).unwrap().value).collect();
        assert!(vals.windows(2).all(|w| w[1] >= w[0] - 1e-9), "{vals:?}");
    }
}

#[test]
fn monte_carlo_norm_agrees_with_exact() {
    let mut rng = SeededRng::new(RngSeed(51));
    for m in 1..=4 {
        for k in 1..=3 {
            let p = random_poly(3, m, &mut rng);
            let exact = lp_norm_2k(&p, k, NormMethod::Exact).unwrap();
            let mc = lp_norm_2k(&p, k, NormMethod::Mc { samples: 200_000, seed: RngSeed(m as u64 * 10 + k as u64) }).unwrap();
            assert!((mc.value - exact.value).abs() <= 4.0 * mc.std_err, "m={m} k={k}: {mc:?} vs {exact:?}");
        }
    }
}

fn small_poly(n: usize, m: u32) -> impl Strategy<Value = HomPoly<Rat>> {
    let monos = MultiIndex::all_of_degree(n, m);
    proptest::collection::vec(-5i64..=5, monos.len()).prop_map(move |cs| {
        HomPoly::from_terms(n, m, monos.clone().into_iter().zip(cs).map(|(a, c)| (a, Rat::from_integer(c.into())))).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(32) })]

    #[test]
    fn multiplying_by_the_sphere_form_is_self_adjoint(p in small_poly(3, 2), q in small_poly(3, 3)) {
        let r = HomPoly::<Rat>::sphere_power(3, 1);
        let lhs = l2_inner(&r.mul(&p).unwrap(), &q).unwrap();
        let rhs = l2_inner(&p, &r.mul(&q).unwrap()).unwrap();
        prop_assert_eq!(lhs.clone(), rhs);
        // r ≡ 1 on the sphere.
        prop_assert_eq!(lhs, l2_inner(&p, &q).unwrap());
    }
}
