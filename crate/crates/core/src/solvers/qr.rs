//! Householder QR least squares.
//!
//! Direct dense solve of `min ||b - A x||` used by the naive reference
//! solver. Deliberately shares nothing with the incremental Cholesky path so
//! the two can check each other.

use num_complex::Complex64;

/// Solution of a tall least-squares system plus the magnitudes of the
/// diagonal of `R`. The last diagonal magnitude equals the distance from the
/// last column to the span of the preceding ones, which callers use as a
/// rank test.
pub struct QrLeastSquares {
    pub solution: Vec<Complex64>,
    pub diag_magnitudes: Vec<f64>,
}

/// Factor the matrix whose columns are `columns` (all of length `rows`) and
/// solve `R x = Q^H rhs`. Returns `None` when a diagonal of `R` is exactly
/// zero, which only happens for structurally rank-deficient inputs.
pub fn least_squares(columns: &[&[Complex64]], rhs: &[Complex64]) -> Option<QrLeastSquares> {
    let rows = rhs.len();
    let n = columns.len();
    debug_assert!(columns.iter().all(|c| c.len() == rows));
    debug_assert!(rows >= n);

    let mut work: Vec<Vec<Complex64>> = columns.iter().map(|c| c.to_vec()).collect();
    let mut b = rhs.to_vec();
    let mut diag_magnitudes = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);

    for j in 0..n {
        let tail_norm = work[j][j..]
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt();
        diag_magnitudes.push(tail_norm);
        if tail_norm == 0.0 {
            diag.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let x0 = work[j][j];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let beta = -phase * tail_norm;
        // reflector v = x - beta e1 over the tail rows
        let mut v: Vec<Complex64> = work[j][j..].to_vec();
        v[0] -= beta;
        let vns: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        if vns > 0.0 {
            for col in work.iter_mut().skip(j + 1) {
                apply_reflector(&v, &mut col[j..], vns);
            }
            apply_reflector(&v, &mut b[j..], vns);
        }
        work[j][j] = beta;
        for row in work[j][j + 1..].iter_mut() {
            *row = Complex64::new(0.0, 0.0);
        }
        diag.push(beta);
    }

    // Back substitution on the upper-triangular block R[i][j] = work[j][i].
    let mut solution = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        if diag[i].norm() == 0.0 {
            return None;
        }
        let mut acc = b[i];
        for j in i + 1..n {
            acc -= work[j][i] * solution[j];
        }
        solution[i] = acc / diag[i];
    }
    Some(QrLeastSquares {
        solution,
        diag_magnitudes,
    })
}

/// In-place `u <- u - 2 (v^H u / v^H v) v`.
fn apply_reflector(v: &[Complex64], u: &mut [Complex64], vns: f64) {
    let proj: Complex64 = v.iter().zip(u.iter()).map(|(a, b)| a.conj() * b).sum();
    let scale = proj * (2.0 / vns);
    for (ui, vi) in u.iter_mut().zip(v) {
        *ui -= scale * vi;
    }
}
