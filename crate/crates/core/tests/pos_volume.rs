use std::time::Instant;

use orbitope_core::math::{rat, MultiIndex, RngSeed, SeededRng};
use orbitope_core::pos::{
    pos_ball_report, probe_inscribed_ball, psd_oracle_quadratic, sq_bound_eval, volume_ratio_pos, volume_ratio_pos_with,
    volume_ratio_quadratic_oracle,
};
use orbitope_core::sphere::{min_on_sphere, HomPoly};

fn random_quadratic(n: usize, rng: &mut SeededRng) -> HomPoly<f64> {
    HomPoly::from_terms(n, 2, MultiIndex::all_of_degree(n, 2).into_iter().map(|a| (a, rng.gaussian()))).unwrap()
}

#[test]
fn ball_report_chain() {
    for n in 2..=6 {
        for k in 1..=3 {
            let r = pos_ball_report(n, k).unwrap();
            // d · r_max² = 1 and α · outer² = 1, so outer² = r_max² · d / α.
            assert_eq!(r.outer_radius_sq.clone(), r.r_max_sq.clone() * rat(r.d as i64, 1) / r.sym_coeff.clone());
        }
    }
}

#[test]
fn grid_minimum_matches_eigenvalue() {
    let mut rng = SeededRng::new(RngSeed(90));
    for i in 0..1000 {
        let p = random_quadratic(3, &mut rng);
        let grid = min_on_sphere(&p, 20_000, 10).unwrap().value;
        let eig = psd_oracle_quadratic(&p).unwrap();
        assert!((grid - eig).abs() < 1e-6, "quadratic {i}: {grid} vs {eig}");
    }
}

#[test]
fn inscribed_ball_is_inside_and_nearly_maximal() {
    let inside = probe_inscribed_ball(3, 1.0, 1000, RngSeed(11)).unwrap();
    assert_eq!(inside.psd, 1000, "{inside:?}");
    let inflated = probe_inscribed_ball(3, 1.05, 1000, RngSeed(11)).unwrap();
    assert!(inflated.psd < 1000, "{inflated:?}");
}

#[test]
fn binary_quadratics_give_a_disk() {
    // U_{2,2} is two-dimensional and every unit direction has minimum −√2.
    let r = volume_ratio_pos_with(2, 1, 1000, RngSeed(5), 4000).unwrap();
    assert!((r.estimate - 0.5f64.sqrt()).abs() < 1e-9, "{r:?}");
    assert!((r.max_abs_min - 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn volume_ratio_agrees_with_eigenvalue_oracle() {
    let t = Instant::now();
    let main = volume_ratio_pos(3, 1, 10_000, RngSeed(12)).unwrap();
    let oracle = volume_ratio_quadratic_oracle(3, 10_000, RngSeed(13)).unwrap();
    let sigma = (main.std_err.powi(2) + oracle.std_err.powi(2)).sqrt();
    let diff = (main.estimate - oracle.estimate).abs();
    assert!(diff <= (0.05 * oracle.estimate).max(3.0 * sigma), "{main:?}\n{oracle:?}");
    assert!(main.estimate >= main.inscribed_floor && oracle.estimate >= oracle.inscribed_floor);
    assert!(main.estimate >= 0.2);
    let robust_sigma = (main.std_err.powi(2) + main.robust_std_err.powi(2)).sqrt();
    assert!((main.estimate - main.robust_estimate).abs() <= 3.0 * robust_sigma, "{main:?}");
    eprintln!("volume ratio: {:?}", t.elapsed());
}

#[test]
fn sq_bound_decays_like_n_to_minus_half_k() {
    for k in 1..=2u32 {
        let r1 = sq_bound_eval(20, k).unwrap() / sq_bound_eval(10, k).unwrap();
        let r2 = sq_bound_eval(40, k).unwrap() / sq_bound_eval(20, k).unwrap();
        let want = 2f64.powf(-(k as f64) / 2.0);
        assert!((r2 / want - 1.0).abs() < (r1 / want - 1.0).abs() + 1e-12);
        assert!((r2 / want - 1.0).abs() < 0.15, "k = {k}: {r2} vs {want}");
    }
}
