use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use orbitope_core::grassmann::comass::{comass_lower, Functional};
use orbitope_core::grassmann::{kaehler_power, pluecker, random_frame};
use orbitope_core::math::{MultiIndex, RngSeed, SeededRng};
use orbitope_core::sphere::grid::{sup_norm_on_grid, DEFAULT_STARTS, DEFAULT_STEPS};
use orbitope_core::sphere::{lp_norm_2k, mc_monomial_moments, monomial_moment, HomPoly, NormMethod, PolyEvaluator, SphereGrid};
use orbitope_core::tsp::stn_symmetry_certificate;

fn quartic() -> HomPoly<f64> {
    let mut rng = SeededRng::new(RngSeed(1));
    HomPoly::from_terms(3, 4, MultiIndex::all_of_degree(3, 4).into_iter().map(|a| (a, rng.gaussian()))).unwrap()
}

fn moments(c: &mut Criterion) {
    let alpha = MultiIndex(vec![4, 2, 2, 0, 0, 0]);
    c.bench_function("monomial_moment n=6 deg 8", |b| b.iter(|| monomial_moment(6, black_box(&alpha)).unwrap()));
    let alphas = vec![MultiIndex(vec![2, 2, 2]), MultiIndex(vec![8, 0, 0])];
    c.bench_function("mc_monomial_moments 1e5", |b| {
        b.iter(|| mc_monomial_moments(3, black_box(&alphas), 100_000, RngSeed(2)).unwrap())
    });
}

fn grassmann(c: &mut Criterion) {
    let mut rng = SeededRng::new(RngSeed(3));
    c.bench_function("pluecker random G_3(R^8)", |b| b.iter(|| pluecker(&random_frame(8, 3, &mut rng))));
    let f = Functional::new(&kaehler_power(1, 3).unwrap()).unwrap();
    c.bench_function("comass ascent kaehler(1,3) x4", |b| b.iter(|| comass_lower(&f, 4, RngSeed(4)).unwrap()));
}

fn sphere(c: &mut Criterion) {
    let p = quartic();
    let grid = SphereGrid::new(3, 20_000).unwrap();
    let ev = PolyEvaluator::new(&p);
    c.bench_function("sup norm quartic 2e4 grid", |b| {
        b.iter(|| sup_norm_on_grid(black_box(&ev), &grid, DEFAULT_STARTS, DEFAULT_STEPS))
    });
    c.bench_function("exact L^6 norm quartic", |b| b.iter(|| lp_norm_2k(black_box(&p), 3, NormMethod::Exact).unwrap()));
}

fn lp(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact_lp");
    g.sample_size(10);
    g.bench_function("ST_6 symmetry certificate", |b| b.iter(|| stn_symmetry_certificate(6).unwrap()));
    g.finish();
}

criterion_group!(benches, moments, grassmann, sphere, lp);
criterion_main!(benches);
