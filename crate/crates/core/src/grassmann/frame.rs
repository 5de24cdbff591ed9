use serde::Serialize;

use super::multivector::{ExteriorTables, MultiVector};
use crate::error::{invalid, OrbitopeError, Result};
use crate::math::dense::{norm, orthonormalize, ColMatrix};
use crate::math::{RngSeed, SeededRng};

pub const FRAME_TOL: f64 = 1e-10;

/// Orthonormal `n × m` frame; column order fixes the orientation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Frame {
    pub n: usize,
    pub m: usize,
    pub columns: Vec<Vec<f64>>,
}

impl Frame {
    pub fn new(columns: Vec<Vec<f64>>) -> Result<Self> {
        let Some(n) = columns.first().map(Vec::len) else {
            return invalid("frame needs at least one column");
        };
        if columns.iter().any(|c| c.len() != n) {
            return invalid("frame columns have different lengths");
        }
        let m = columns.len();
        if m > n {
            return invalid(format!("{m} columns cannot be orthonormal in R^{n}"));
        }
        let defect = ColMatrix::new(n, columns.clone()).orthonormality_defect();
        if !(defect <= FRAME_TOL) {
            return Err(OrbitopeError::Invariant(format!(
                "frame columns are not orthonormal (defect {defect:e})"
            )));
        }
        Ok(Frame { n, m, columns })
    }

    /// `(e_1, …, e_m)`.
    pub fn standard(n: usize, m: usize) -> Result<Self> {
        if m == 0 || m > n {
            return invalid(format!("need 1 <= m <= n (n = {n}, m = {m})"));
        }
        Frame::new(
            (0..m)
                .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }
}

/// Haar-random oriented `m`-plane: a Gaussian `n × m` matrix put through thin QR with
/// positive triangular diagonal.
pub fn random_frame(n: usize, m: usize, rng: &mut SeededRng) -> Frame {
    loop {
        if let Some(q) = orthonormalize(&ColMatrix::gaussian(n, m, rng)) {
            return Frame { n, m, columns: q.cols };
        }
    }
}

pub fn sample_grassmann(n: usize, m: usize, seed: RngSeed) -> Result<Frame> {
    if m == 0 || m > n {
        return invalid(format!("need 1 <= m <= n (n = {n}, m = {m})"));
    }
    Ok(random_frame(n, m, &mut SeededRng::new(seed)))
}

/// Plücker coordinates: the `m × m` minors of the frame, indexed by row subsets.
pub fn pluecker(f: &Frame) -> MultiVector<f64> {
    let t = ExteriorTables::new(f.n, f.m).expect("frame dimensions were validated");
    MultiVector::from_dense(&t, f.m, &t.wedge_all(&f.columns)).expect("dense length matches the table")
}

/// Haar-random Plücker point in dense colex coordinates. Since the Plücker vector of
/// `QR` is `det(R)` times that of `Q`, normalizing the Gaussian matrix's Plücker vector
/// gives the same point as orthonormalizing first.
pub fn haar_pluecker_dense(t: &ExteriorTables, m: usize, rng: &mut SeededRng) -> Vec<f64> {
    loop {
        let g = ColMatrix::gaussian(t.n(), m, rng);
        let mut y = t.wedge_all(&g.cols);
        let r = norm(&y);
        if r > 1e-150 {
            y.iter_mut().for_each(|x| *x /= r);
            return y;
        }
    }
}
