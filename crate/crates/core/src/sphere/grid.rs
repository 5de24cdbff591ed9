//! Deterministic point sets on low-dimensional spheres and grid-plus-ascent extremization.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::poly::{HomPoly, PolyEvaluator};
use crate::error::{OrbitopeError, Result};
use crate::math::dense::norm;

pub const DEFAULT_GRID: usize = 200_000;
pub const DEFAULT_STARTS: usize = 10;
pub const DEFAULT_STEPS: usize = 20;

/// Points on `S^{n−1}` for `n ∈ {2, 3, 4}`, stored row-major.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    n: usize,
    coords: Vec<f64>,
}

impl SphereGrid {
    /// Equally spaced angles (n = 2), a Fibonacci lattice (n = 3) or an equal-area
    /// product grid in Hopf coordinates (n = 4), with roughly `target` points.
    pub fn new(n: usize, target: usize) -> Result<Self> {
        let target = target.max(8);
        let mut coords = Vec::new();
        match n {
            2 => {
                for i in 0..target {
                    let t = 2.0 * PI * i as f64 / target as f64;
                    coords.extend([t.cos(), t.sin()]);
                }
            }
            3 => {
                let golden = PI * (3.0 - 5f64.sqrt());
                for i in 0..target {
                    let z = 1.0 - (2 * i + 1) as f64 / target as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden * i as f64;
                    coords.extend([r * phi.cos(), r * phi.sin(), z]);
                }
            }
            4 => {
                let side = (target as f64).cbrt().ceil() as usize;
                for ia in 0..side {
                    let u = (ia as f64 + 0.5) / side as f64;
                    let a = u.sqrt().asin();
                    let (sa, ca) = a.sin_cos();
                    for ib in 0..side {
                        let b = 2.0 * PI * ib as f64 / side as f64;
                        for ic in 0..side {
                            let c = 2.0 * PI * (ic as f64 + 0.5 * (ib % 2) as f64) / side as f64;
                            coords.extend([ca * b.cos(), ca * b.sin(), sa * c.cos(), sa * c.sin()]);
                        }
                    }
                }
            }
            _ => return Err(OrbitopeError::UnsupportedDimension(n)),
        }
        Ok(SphereGrid { n, coords })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.n..(i + 1) * self.n]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    /// Best value after refinement.
    pub value: f64,
    pub point: Vec<f64>,
    /// Best value on the grid alone.
    pub grid_value: f64,
    pub grid_points: usize,
}

/// Maximizes `obj(x) = sign(x) · p(x)` where `sign` is fixed per start: with
/// `absolute` set the objective is `|p|`, otherwise `p`.
fn extremize(ev: &PolyEvaluator, grid: &SphereGrid, starts: usize, steps: usize, absolute: bool) -> Extremum {
    let vals: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .with_min_len(1024)
        .map(|i| {
            let v = ev.eval(grid.point(i));
            if absolute {
                v.abs()
            } else {
                v
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..vals.len()).collect();
    let starts = starts.clamp(1, vals.len());
    let cmp = |a: &usize, b: &usize| vals[*b].total_cmp(&vals[*a]).then(a.cmp(b));
    order.select_nth_unstable_by(starts - 1, cmp);
    order.truncate(starts);
    order.sort_by(cmp);
    let grid_value = vals[order[0]];

    let refined: Vec<(f64, Vec<f64>)> = order
        .par_iter()
        .map(|&i| {
            let x0 = grid.point(i).to_vec();
            let sign = if absolute && ev.eval(&x0) < 0.0 { -1.0 } else { 1.0 };
            let (v, x) = ascend(ev, x0, sign, steps);
            (sign * v, x)
        })
        .collect();
    let (value, point) = refined
        .into_iter()
        .fold((f64::NEG_INFINITY, Vec::new()), |best, cand| {
            if cand.0 > best.0 {
                cand
            } else {
                best
            }
        });
    Extremum {
        value: value.max(grid_value),
        point,
        grid_value,
        grid_points: grid.len(),
    }
}

/// Riemannian gradient ascent of `sign · p` with backtracking (a step is accepted when it
/// gains at least half the linear prediction); returns `p` at the end point.
fn ascend(ev: &PolyEvaluator, mut x: Vec<f64>, sign: f64, steps: usize) -> (f64, Vec<f64>) {
    let f = |y: &[f64]| sign * ev.eval(y);
    let mut fx = f(&x);
    let mut t = f64::NAN;
    for _ in 0..steps {
        let (_, g) = ev.eval_grad(&x);
        let gx: f64 = g.iter().zip(&x).map(|(a, b)| a * b).sum();
        let gt: Vec<f64> = g.iter().zip(&x).map(|(a, b)| sign * (a - gx * b)).collect();
        let gn = norm(&gt);
        if gn <= 1e-15 * (1.0 + fx.abs()) {
            break;
        }
        if t.is_nan() {
            t = 0.25 / gn;
        }
        let mut moved = false;
        for _ in 0..60 {
            let mut y: Vec<f64> = x.iter().zip(&gt).map(|(a, b)| a + t * b).collect();
            let ny = norm(&y);
            y.iter_mut().for_each(|v| *v /= ny);
            let fy = f(&y);
            if fy >= fx + 0.5 * t * gn * gn {
                x = y;
                fx = fy;
                t *= 2.0;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (sign * fx, x)
}

pub fn maximize_on_grid(ev: &PolyEvaluator, grid: &SphereGrid, starts: usize, steps: usize) -> Extremum {
    extremize(ev, grid, starts, steps, false)
}

/// Estimated `max_{S^{n−1}} |p|`.
pub fn sup_norm_on_grid(ev: &PolyEvaluator, grid: &SphereGrid, starts: usize, steps: usize) -> Extremum {
    extremize(ev, grid, starts, steps, true)
}

pub fn sup_norm(p: &HomPoly<f64>, grid_points: usize) -> Result<Extremum> {
    let grid = SphereGrid::new(p.n(), grid_points)?;
    Ok(sup_norm_on_grid(&PolyEvaluator::new(p), &grid, DEFAULT_STARTS, DEFAULT_STEPS))
}

/// Estimated `min_{S^{n−1}} p`, refined from the best `ascents` grid points.
pub fn min_on_sphere(p: &HomPoly<f64>, grid_points: usize, ascents: usize) -> Result<Extremum> {
    let grid = SphereGrid::new(p.n(), grid_points)?;
    Ok(min_on_grid(&PolyEvaluator::new(&p.scale(&-1.0)), &grid, ascents))
}

/// Minimum of the polynomial whose negation is `neg_ev`.
pub fn min_on_grid(neg_ev: &PolyEvaluator, grid: &SphereGrid, ascents: usize) -> Extremum {
    let mut e = extremize(neg_ev, grid, ascents, DEFAULT_STEPS, false);
    e.value = -e.value;
    e.grid_value = -e.grid_value;
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::MultiIndex;

    #[test]
    fn grids_lie_on_sphere() {
        for n in 2..=4 {
            let g = SphereGrid::new(n, 5000).unwrap();
            assert!(g.len() >= 5000);
            for i in 0..g.len() {
                assert!((norm(g.point(i)) - 1.0).abs() < 1e-12);
            }
        }
        assert!(SphereGrid::new(5, 100).is_err());
    }

    #[test]
    fn grid_averages_approximate_moments() {
        for (n, exact) in [(2, 1.0 / 2.0), (3, 1.0 / 3.0), (4, 1.0 / 4.0)] {
            let g = SphereGrid::new(n, 100_000).unwrap();
            let m: f64 = (0..g.len()).map(|i| g.point(i)[0].powi(2)).sum::<f64>() / g.len() as f64;
            assert!((m - exact).abs() < 1e-3, "n={n} m={m}");
        }
    }

    #[test]
    fn min_examples() {
        let r = HomPoly::<f64>::sphere_power(3, 1);
        assert!((min_on_sphere(&r, 2000, 5).unwrap().value - 1.0).abs() < 1e-12);
        let p = HomPoly::from_terms(2, 2, [(MultiIndex(vec![2, 0]), 1.0), (MultiIndex(vec![0, 2]), -1.0)]).unwrap();
        assert!((min_on_sphere(&p, 1000, 5).unwrap().value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn sup_norm_of_linear_form_is_coefficient_norm() {
        let p = HomPoly::from_terms(
            3,
            1,
            [(MultiIndex(vec![1, 0, 0]), 0.3), (MultiIndex(vec![0, 1, 0]), -1.2), (MultiIndex(vec![0, 0, 1]), 0.7)],
        )
        .unwrap();
        let s = sup_norm(&p, 20_000).unwrap();
        let exact = (0.09f64 + 1.44 + 0.49).sqrt();
        assert!((s.value - exact).abs() < 1e-10, "{} vs {exact}", s.value);
        assert!(s.value >= s.grid_value);
    }
}
