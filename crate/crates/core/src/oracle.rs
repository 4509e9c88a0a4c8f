//! Brute-force reference routes.
//!
//! These deliberately avoid the spectral machinery so they can serve as
//! independent cross-checks: power iteration for stationary distributions,
//! explicit matrix powers for occupation probabilities. The CLI `--check`
//! flag and the test suites run them against the closed forms.

use nalgebra::{DMatrix, DVector, RowDVector};

use crate::error::{Error, Result};

const POWER_TOL: f64 = 1e-15;
const POWER_MAX_ITER: usize = 2_000_000;

/// Stationary distribution of a row-stochastic matrix by power iteration.
///
/// Iterates the lazy chain `(I + M) / 2`, which has the same stationary
/// vector but no eigenvalue at -1, so periodic chains converge too.
pub fn stationary_power_iteration(m: &DMatrix<f64>) -> Result<DVector<f64>> {
    let n = m.nrows();
    let mut pi = RowDVector::from_element(n, 1.0 / n as f64);
    for _ in 0..POWER_MAX_ITER {
        let mut next = (&pi * m + &pi) * 0.5;
        next /= next.sum();
        let delta = (&next - &pi).amax();
        pi = next;
        if delta < POWER_TOL {
            return Ok(pi.transpose());
        }
    }
    Err(Error::Numerical(
        "power iteration did not converge; is the chain connected?".into(),
    ))
}

/// `M^t` by repeated multiplication.
pub fn matrix_power(m: &DMatrix<f64>, t: u32) -> DMatrix<f64> {
    let n = m.nrows();
    let mut p = DMatrix::identity(n, n);
    for _ in 0..t {
        p *= m;
    }
    p
}

/// `<i| M^t |j>` by propagating a row vector, O(t n^2).
pub fn occupation_matrix_power(m: &DMatrix<f64>, i: usize, j: usize, t: u32) -> f64 {
    let n = m.nrows();
    let mut row = RowDVector::zeros(n);
    row[i] = 1.0;
    for _ in 0..t {
        row *= m;
    }
    row[j]
}
