//! Small dense float kernels: thin QR, determinants, Haar orthogonal matrices.

use super::rng::SeededRng;

/// Column-major `n × m` matrix of floats.
#[derive(Debug, Clone, PartialEq)]
pub struct ColMatrix {
    pub rows: usize,
    pub cols: Vec<Vec<f64>>,
}

impl ColMatrix {
    pub fn new(rows: usize, cols: Vec<Vec<f64>>) -> Self {
        debug_assert!(cols.iter().all(|c| c.len() == rows));
        ColMatrix { rows, cols }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn gaussian(rows: usize, cols: usize, rng: &mut SeededRng) -> Self {
        ColMatrix {
            rows,
            cols: (0..cols).map(|_| rng.gaussian_vec(rows)).collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.cols[j][i]
    }

    /// `max |AᵀA − I|`
    pub fn orthonormality_defect(&self) -> f64 {
        let m = self.ncols();
        let mut worst: f64 = 0.0;
        for a in 0..m {
            for b in 0..m {
                let d = dot(&self.cols[a], &self.cols[b]);
                let e = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((d - e).abs());
            }
        }
        worst
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for (c, &xj) in self.cols.iter().zip(x) {
            for (o, v) in out.iter_mut().zip(c) {
                *o += v * xj;
            }
        }
        out
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Thin QR by modified Gram–Schmidt with re-orthogonalization; returns `Q` with the
/// triangular factor's diagonal positive. `None` if the columns are dependent.
pub fn orthonormalize(a: &ColMatrix) -> Option<ColMatrix> {
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(a.ncols());
    for col in &a.cols {
        let mut v = col.clone();
        let scale = norm(col);
        for _ in 0..2 {
            for u in &q {
                let p = dot(u, &v);
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= p * y);
            }
        }
        let r = norm(&v);
        if !(r > 1e-12 * scale.max(1e-300)) {
            return None;
        }
        v.iter_mut().for_each(|x| *x /= r);
        q.push(v);
    }
    Some(ColMatrix::new(a.rows, q))
}

/// Determinant by Gaussian elimination with partial pivoting (row-major input, consumed).
pub fn det(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let piv = a[c][c];
        d *= piv;
        for r in (c + 1)..n {
            let f = a[r][c] / piv;
            if f != 0.0 {
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    d
}

/// Haar-distributed element of SO(n): QR of a Gaussian matrix with positive
/// triangular diagonal, then the last column negated if the determinant is −1.
pub fn haar_so(n: usize, rng: &mut SeededRng) -> ColMatrix {
    loop {
        let g = ColMatrix::gaussian(n, n, rng);
        if let Some(mut q) = orthonormalize(&g) {
            let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| q.get(i, j)).collect()).collect();
            if det(rows) < 0.0 {
                q.cols[n - 1].iter_mut().for_each(|x| *x = -*x);
            }
            return q;
        }
    }
}
