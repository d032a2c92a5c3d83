//! Incremental Cholesky factorization of a growing Gram matrix.
//!
//! The greedy solver adds one reference column per iteration, so the Gram
//! matrix of the selected columns grows by one bordered row and column at a
//! time. Instead of refactorizing, the existing lower-triangular factor is
//! extended by one forward substitution: with `G' = [[G, g], [g^H, s]]` and
//! `G = L L^H`, the factor of `G'` is `[[L, 0], [w^H, d]]` where `L w = g`
//! and `d = sqrt(s - ||w||^2)`, O(k^2) work for a size-k state.

// triangular substitution reads clearest with explicit indices
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Augmented pivots at or below this value mark a column as linearly
/// dependent on the current selection.
pub const PIVOT_THRESHOLD: f64 = 1e-12;

/// Lower-triangular Cholesky factor of the Gram matrix of the currently
/// selected columns, together with the selected column indices.
#[derive(Debug, Clone, Default)]
pub struct CholeskyState {
    /// Row `i` holds the `i + 1` entries `L[i][0..=i]`; diagonals are real
    /// and positive.
    rows: Vec<Vec<Complex64>>,
    support: Vec<usize>,
}

impl CholeskyState {
    pub fn empty() -> Self {
        CholeskyState::default()
    }

    pub fn size(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn factor_rows(&self) -> &[Vec<Complex64>] {
        &self.rows
    }

    /// Extend the factor with one more column of the Gram matrix.
    ///
    /// `gram_column` holds the inner products of the candidate against each
    /// selected column in order, followed by the candidate's self inner
    /// product; `index` is the candidate's dictionary index. Fails with
    /// [`Error::DegenerateColumn`] when the new pivot `s - ||w||^2` does not
    /// exceed [`PIVOT_THRESHOLD`].
    pub fn augment(&self, gram_column: &[Complex64], index: usize) -> Result<CholeskyState> {
        let k = self.size();
        if gram_column.len() != k + 1 {
            return Err(Error::LengthMismatch {
                context: "gram column for Cholesky augmentation",
                expected: k + 1,
                got: gram_column.len(),
            });
        }
        // Forward substitution L w = g over the existing factor.
        let mut w: Vec<Complex64> = Vec::with_capacity(k);
        for i in 0..k {
            let mut acc = gram_column[i];
            for (l, x) in self.rows[i].iter().zip(&w) {
                acc -= l * x;
            }
            w.push(acc / self.rows[i][i]);
        }
        let self_term = gram_column[k].re;
        let pivot = self_term - w.iter().map(|v: &Complex64| v.norm_sqr()).sum::<f64>();
        if pivot <= PIVOT_THRESHOLD {
            return Err(Error::DegenerateColumn { pivot });
        }
        let mut new_row: Vec<Complex64> = w.iter().map(|v| v.conj()).collect();
        new_row.push(Complex64::new(pivot.sqrt(), 0.0));
        let mut rows = self.rows.clone();
        rows.push(new_row);
        let mut support = self.support.clone();
        support.push(index);
        Ok(CholeskyState { rows, support })
    }

    /// Solve `(L L^H) x = rhs` by forward then back substitution.
    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let k = self.size();
        debug_assert_eq!(rhs.len(), k);
        let mut y: Vec<Complex64> = Vec::with_capacity(k);
        for i in 0..k {
            let mut acc = rhs[i];
            for (l, v) in self.rows[i].iter().zip(&y) {
                acc -= l * v;
            }
            y.push(acc / self.rows[i][i]);
        }
        let mut x = vec![Complex64::new(0.0, 0.0); k];
        for i in (0..k).rev() {
            let mut acc = y[i];
            for j in i + 1..k {
                acc -= self.rows[j][i].conj() * x[j];
            }
            x[i] = acc / self.rows[i][i];
        }
        x
    }
}

/// From-scratch Cholesky of a Hermitian matrix given as dense rows.
/// Returns the lower factor, or the offending `(index, pivot)` when a pivot
/// is not positive.
pub fn dense_cholesky(
    matrix: &[Vec<Complex64>],
) -> std::result::Result<Vec<Vec<Complex64>>, (usize, f64)> {
    let n = matrix.len();
    let mut factor: Vec<Vec<Complex64>> = (0..n)
        .map(|i| vec![Complex64::new(0.0, 0.0); i + 1])
        .collect();
    for j in 0..n {
        let mut pivot = matrix[j][j].re;
        for v in &factor[j][..j] {
            pivot -= v.norm_sqr();
        }
        if pivot <= 0.0 {
            return Err((j, pivot));
        }
        let diag = pivot.sqrt();
        factor[j][j] = Complex64::new(diag, 0.0);
        for i in j + 1..n {
            let mut acc = matrix[i][j];
            for (a, b) in factor[i][..j].iter().zip(&factor[j][..j]) {
                acc -= a * b.conj();
            }
            factor[i][j] = acc / diag;
        }
    }
    Ok(factor)
}

/// Solve `(L L^H) x = rhs` for a dense lower factor.
pub fn dense_cholesky_solve(factor: &[Vec<Complex64>], rhs: &[Complex64]) -> Vec<Complex64> {
    let n = factor.len();
    let mut y: Vec<Complex64> = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = rhs[i];
        for (l, v) in factor[i].iter().zip(&y) {
            acc -= l * v;
        }
        y.push(acc / factor[i][i]);
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        for j in i + 1..n {
            acc -= factor[j][i].conj() * x[j];
        }
        x[i] = acc / factor[i][i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_columns(rows: usize, cols: usize, seed: u64) -> Vec<Vec<Complex64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..cols)
            .map(|_| {
                let raw: Vec<Complex64> = (0..rows)
                    .map(|_| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        c(re, im)
                    })
                    .collect();
                let norm = raw.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                raw.into_iter().map(|v| v / norm).collect()
            })
            .collect()
    }

    fn gram(cols: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let n = cols.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        cols[i]
                            .iter()
                            .zip(&cols[j])
                            .map(|(a, b)| a.conj() * b)
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn empty_plus_unit_column_gives_scalar_factor() {
        let state = CholeskyState::empty().augment(&[c(1.0, 0.0)], 0).unwrap();
        assert_eq!(state.size(), 1);
        assert!((state.factor_rows()[0][0] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn two_orthogonal_unit_columns_give_identity_factor() {
        let state = CholeskyState::empty()
            .augment(&[c(1.0, 0.0)], 0)
            .unwrap()
            .augment(&[c(0.0, 0.0), c(1.0, 0.0)], 1)
            .unwrap();
        assert!((state.factor_rows()[1][0]).norm() < 1e-15);
        assert!((state.factor_rows()[1][1] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn degenerate_pivot_is_rejected() {
        // Second column identical to the first: cross term 1, pivot 0.
        let state = CholeskyState::empty().augment(&[c(1.0, 0.0)], 0).unwrap();
        let err = state.augment(&[c(1.0, 0.0), c(1.0, 0.0)], 1);
        assert!(matches!(err, Err(Error::DegenerateColumn { .. })));
    }

    #[test]
    fn chained_augmentation_matches_from_scratch_factorization() {
        let cols = random_columns(64, 6, 42);
        let full_gram = gram(&cols);
        let mut state = CholeskyState::empty();
        for k in 0..6 {
            let gram_col: Vec<Complex64> = (0..=k).map(|i| full_gram[i][k]).collect();
            state = state.augment(&gram_col, k).unwrap();

            // compare against a from-scratch factor of the leading block
            let block: Vec<Vec<Complex64>> = (0..=k)
                .map(|i| (0..=k).map(|j| full_gram[i][j]).collect())
                .collect();
            let scratch = dense_cholesky(&block).unwrap();
            let mut err2 = 0.0;
            for i in 0..=k {
                for j in 0..=i {
                    err2 += (state.factor_rows()[i][j] - scratch[i][j]).norm_sqr();
                }
            }
            assert!(
                err2.sqrt() <= 1e-10,
                "step {k}: Frobenius error {}",
                err2.sqrt()
            );
        }
    }

    #[test]
    fn factor_reproduces_gram_product() {
        let cols = random_columns(48, 5, 7);
        let full_gram = gram(&cols);
        let mut state = CholeskyState::empty();
        for k in 0..5 {
            let gram_col: Vec<Complex64> = (0..=k).map(|i| full_gram[i][k]).collect();
            state = state.augment(&gram_col, k).unwrap();
        }
        // L L^H == G within 1e-10 relative Frobenius
        let rows = state.factor_rows();
        let mut err2 = 0.0;
        let mut ref2 = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                let mut acc = c(0.0, 0.0);
                for k in 0..=i.min(j) {
                    acc += rows[i][k] * rows[j][k].conj();
                }
                err2 += (acc - full_gram[i][j]).norm_sqr();
                ref2 += full_gram[i][j].norm_sqr();
            }
        }
        assert!(err2.sqrt() <= 1e-10 * ref2.sqrt());
    }

    #[test]
    fn solve_matches_direct_substitution() {
        let cols = random_columns(32, 4, 9);
        let full_gram = gram(&cols);
        let mut state = CholeskyState::empty();
        for k in 0..4 {
            let gram_col: Vec<Complex64> = (0..=k).map(|i| full_gram[i][k]).collect();
            state = state.augment(&gram_col, k).unwrap();
        }
        let rhs: Vec<Complex64> = (0..4).map(|i| c(i as f64 + 0.5, -(i as f64))).collect();
        let x = state.solve(&rhs);
        // verify G x == rhs
        for i in 0..4 {
            let mut acc = c(0.0, 0.0);
            for j in 0..4 {
                acc += full_gram[i][j] * x[j];
            }
            assert!((acc - rhs[i]).norm() <= 1e-10);
        }
    }

    #[test]
    fn gram_column_length_is_checked() {
        let state = CholeskyState::empty().augment(&[c(1.0, 0.0)], 0).unwrap();
        assert!(state.augment(&[c(1.0, 0.0)], 1).is_err());
    }
}
