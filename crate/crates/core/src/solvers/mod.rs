//! Coefficient estimators for reference dictionaries.
//!
//! Two estimation routes are provided. [`lls_solve`] fits all columns at
//! once through the normal equations, factorizing the auto-correlation
//! matrix `D^H D` by Cholesky (with one diagonal-loading retry when a pivot
//! fails). [`omp_solve`] builds a sparse fit greedily: each iteration picks
//! the column most correlated with the current residual, refits by least
//! squares on the grown support through an incrementally augmented Cholesky
//! factor, and updates the residual. [`omp_solve_reference`] runs the same
//! greedy selection but solves every support fit from scratch with dense QR;
//! it exists to pin the incremental path down in tests.
//!
//! All coefficient outputs are de-normalized: they apply to the raw
//! (pre-normalization) reference signal of each column.

// symmetric Gram fills read clearest with explicit indices
#![allow(clippy::needless_range_loop)]

mod cholesky;
mod qr;

pub use cholesky::{dense_cholesky, dense_cholesky_solve, CholeskyState, PIVOT_THRESHOLD};

use num_complex::Complex64;

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::signal::BasebandSignal;

/// Relative residual below which further iterations only chase round-off.
const RESIDUAL_FLOOR: f64 = 1e-12;
/// Relative correlation below which no candidate is meaningfully matched.
const CORRELATION_FLOOR: f64 = 1e-14;
/// Relative diagonal loading applied when the plain factorization fails.
const LOADING_EPSILON: f64 = 1e-10;

/// Full least-squares fit over every dictionary column.
#[derive(Debug, Clone)]
pub struct LlsSolution {
    /// De-normalized coefficients, one per column.
    pub coefficients: Vec<Complex64>,
    /// Euclidean norm of `r - D v`.
    pub residual_norm: f64,
    /// True when diagonal loading was needed to factorize `D^H D`.
    pub regularized: bool,
}

/// Why the greedy solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Ran the full requested number of iterations.
    ReachedSparsity,
    /// Residual fell to the numerical floor early.
    ResidualFloor,
    /// Every remaining column had negligible correlation with the residual.
    CorrelationFloor,
    /// Every usefully correlated candidate was linearly dependent on the
    /// current selection.
    DegenerateCandidates,
}

/// Sparse greedy fit.
#[derive(Debug, Clone)]
pub struct OmpSolution {
    /// Selected column indices in selection order.
    pub support: Vec<usize>,
    /// De-normalized coefficients over all columns; nonzero only on the
    /// support.
    pub coefficients: Vec<Complex64>,
    /// Residual norm after each completed iteration.
    pub residual_norms: Vec<f64>,
    /// Winning correlation score of each iteration.
    pub selection_scores: Vec<f64>,
    pub termination: Termination,
}

impl OmpSolution {
    pub fn iterations(&self) -> usize {
        self.support.len()
    }
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn check_observation(dict: &Dictionary, observation: &BasebandSignal) -> Result<()> {
    if observation.len() != dict.rows() {
        return Err(Error::LengthMismatch {
            context: "observation block vs dictionary rows",
            expected: dict.rows(),
            got: observation.len(),
        });
    }
    Ok(())
}

/// Solve `min ||r - D v||` over all columns via the normal equations.
///
/// The Gram matrix is factorized by Cholesky; if a pivot is non-positive the
/// factorization is retried once with `eps * trace / J` added to the
/// diagonal (`eps = 1e-10`) and the solution is flagged as regularized.
pub fn lls_solve(dict: &Dictionary, observation: &BasebandSignal) -> Result<LlsSolution> {
    check_observation(dict, observation)?;
    let rows = dict.rows();
    let cols = dict.num_columns();
    if rows < cols {
        return Err(Error::Underdetermined { rows, cols });
    }

    // Gram matrix of the unit-norm columns and cross-correlation vector.
    let mut gram: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); cols]; cols];
    for i in 0..cols {
        for j in i..cols {
            let entry = dict.correlate(i, dict.column(j));
            gram[i][j] = entry;
            gram[j][i] = entry.conj();
        }
    }
    let rhs: Vec<Complex64> = (0..cols)
        .map(|i| dict.correlate(i, observation.samples()))
        .collect();

    let (factor, regularized) = match dense_cholesky(&gram) {
        Ok(f) => (f, false),
        Err(_) => {
            let trace: f64 = (0..cols).map(|i| gram[i][i].re).sum();
            let loading = LOADING_EPSILON * trace / cols as f64;
            let mut loaded = gram.clone();
            for (i, row) in loaded.iter_mut().enumerate() {
                row[i] += Complex64::new(loading, 0.0);
            }
            match dense_cholesky(&loaded) {
                Ok(f) => (f, true),
                Err((index, pivot)) => return Err(Error::SingularDictionary { index, pivot }),
            }
        }
    };
    let normalized = dense_cholesky_solve(&factor, &rhs);

    // Residual against the stored unit-norm columns.
    let mut residual = observation.samples().to_vec();
    for (j, &v) in normalized.iter().enumerate() {
        let col = dict.column(j);
        for (r, &d) in residual.iter_mut().zip(col) {
            *r -= v * d;
        }
    }
    let coefficients = normalized
        .iter()
        .zip(dict.norms())
        .map(|(&v, &n)| v / n)
        .collect();
    Ok(LlsSolution {
        coefficients,
        residual_norm: vec_norm(&residual),
        regularized,
    })
}

/// Candidate scores of one greedy iteration, ordered best-first with ties
/// broken toward the lowest column index.
fn ranked_candidates(
    dict: &Dictionary,
    residual: &[Complex64],
    selected: &[bool],
) -> Vec<(f64, usize)> {
    let mut scores: Vec<(f64, usize)> = (0..dict.num_columns())
        .filter(|&i| !selected[i])
        .map(|i| (dict.correlate(i, residual).norm(), i))
        .collect();
    scores.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    scores
}

fn denormalized(dict: &Dictionary, support: &[usize], on_support: &[Complex64]) -> Vec<Complex64> {
    let mut full = vec![Complex64::new(0.0, 0.0); dict.num_columns()];
    for (&idx, &v) in support.iter().zip(on_support) {
        full[idx] = v / dict.norms()[idx];
    }
    full
}

fn validate_sparsity(dict: &Dictionary, sparsity: usize) -> Result<()> {
    let limit = dict.num_columns().min(dict.rows());
    if sparsity == 0 || sparsity > limit {
        return Err(Error::InvalidArgument(format!(
            "sparsity must lie in 1..={limit}, got {sparsity}"
        )));
    }
    Ok(())
}

/// Greedy sparse fit with at most `sparsity` selected columns.
///
/// Runs exactly `sparsity` iterations unless the residual or the best
/// remaining correlation falls to its numerical floor first. A candidate
/// whose augmented Cholesky pivot is at or below [`PIVOT_THRESHOLD`] is
/// skipped in favor of the next-best score.
pub fn omp_solve(
    dict: &Dictionary,
    observation: &BasebandSignal,
    sparsity: usize,
) -> Result<OmpSolution> {
    check_observation(dict, observation)?;
    validate_sparsity(dict, sparsity)?;

    let base_norm = observation.norm();
    let mut residual = observation.samples().to_vec();
    let mut state = CholeskyState::empty();
    let mut rhs_support: Vec<Complex64> = Vec::new();
    let mut on_support: Vec<Complex64> = Vec::new();
    let mut residual_norms = Vec::new();
    let mut selection_scores = Vec::new();
    let mut selected = vec![false; dict.num_columns()];
    let mut termination = Termination::ReachedSparsity;

    for _ in 0..sparsity {
        if vec_norm(&residual) <= RESIDUAL_FLOOR * base_norm {
            termination = Termination::ResidualFloor;
            break;
        }
        let candidates = ranked_candidates(dict, &residual, &selected);
        if candidates
            .first()
            .is_none_or(|&(score, _)| score <= CORRELATION_FLOOR * base_norm)
        {
            termination = Termination::CorrelationFloor;
            break;
        }

        let mut accepted = None;
        for &(score, index) in &candidates {
            if score <= CORRELATION_FLOOR * base_norm {
                break;
            }
            let mut gram_column: Vec<Complex64> = state
                .support()
                .iter()
                .map(|&s| dict.correlate(s, dict.column(index)))
                .collect();
            gram_column.push(dict.correlate(index, dict.column(index)));
            match state.augment(&gram_column, index) {
                Ok(next) => {
                    accepted = Some((score, index, next));
                    break;
                }
                Err(Error::DegenerateColumn { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        let Some((score, index, next_state)) = accepted else {
            termination = Termination::DegenerateCandidates;
            break;
        };

        state = next_state;
        selected[index] = true;
        rhs_support.push(dict.correlate(index, observation.samples()));
        on_support = state.solve(&rhs_support);

        residual = observation.samples().to_vec();
        for (&idx, &v) in state.support().iter().zip(&on_support) {
            let col = dict.column(idx);
            for (r, &d) in residual.iter_mut().zip(col) {
                *r -= v * d;
            }
        }
        selection_scores.push(score);
        residual_norms.push(vec_norm(&residual));
    }

    let support = state.support().to_vec();
    let coefficients = denormalized(dict, &support, &on_support);
    Ok(OmpSolution {
        support,
        coefficients,
        residual_norms,
        selection_scores,
        termination,
    })
}

/// Naive greedy solver with identical selection rules to [`omp_solve`] but
/// with every support refit done from scratch by dense QR. Test oracle.
pub fn omp_solve_reference(
    dict: &Dictionary,
    observation: &BasebandSignal,
    sparsity: usize,
) -> Result<OmpSolution> {
    check_observation(dict, observation)?;
    validate_sparsity(dict, sparsity)?;

    let base_norm = observation.norm();
    let mut residual = observation.samples().to_vec();
    let mut support: Vec<usize> = Vec::new();
    let mut on_support: Vec<Complex64> = Vec::new();
    let mut residual_norms = Vec::new();
    let mut selection_scores = Vec::new();
    let mut selected = vec![false; dict.num_columns()];
    let mut termination = Termination::ReachedSparsity;

    for _ in 0..sparsity {
        if vec_norm(&residual) <= RESIDUAL_FLOOR * base_norm {
            termination = Termination::ResidualFloor;
            break;
        }
        let candidates = ranked_candidates(dict, &residual, &selected);
        if candidates
            .first()
            .is_none_or(|&(score, _)| score <= CORRELATION_FLOOR * base_norm)
        {
            termination = Termination::CorrelationFloor;
            break;
        }

        let mut accepted = None;
        for &(score, index) in &candidates {
            if score <= CORRELATION_FLOOR * base_norm {
                break;
            }
            let columns: Vec<&[Complex64]> = support
                .iter()
                .chain(std::iter::once(&index))
                .map(|&i| dict.column(i))
                .collect();
            // The last diagonal of R is the candidate's distance to the span
            // of the current support; squared it matches the Cholesky pivot.
            match qr::least_squares(&columns, observation.samples()) {
                Some(out)
                    if out.diag_magnitudes.last().map(|d| d * d)
                        > Some(cholesky::PIVOT_THRESHOLD) =>
                {
                    accepted = Some((score, index, out.solution));
                    break;
                }
                _ => continue,
            }
        }
        let Some((score, index, solution)) = accepted else {
            termination = Termination::DegenerateCandidates;
            break;
        };

        support.push(index);
        selected[index] = true;
        on_support = solution;

        residual = observation.samples().to_vec();
        for (&idx, &v) in support.iter().zip(&on_support) {
            let col = dict.column(idx);
            for (r, &d) in residual.iter_mut().zip(col) {
                *r -= v * d;
            }
        }
        selection_scores.push(score);
        residual_norms.push(vec_norm(&residual));
    }

    let coefficients = denormalized(dict, &support, &on_support);
    Ok(OmpSolution {
        support,
        coefficients,
        residual_norms,
        selection_scores,
        termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_dictionary(rows: usize, cols: usize, seed: u64) -> Dictionary {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let columns: Vec<Vec<Complex64>> = (0..cols)
            .map(|_| {
                (0..rows)
                    .map(|_| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        c(re, im)
                    })
                    .collect()
            })
            .collect();
        Dictionary::from_columns(columns).unwrap()
    }

    fn orthonormal_dictionary(rows: usize, cols: usize) -> Dictionary {
        let columns: Vec<Vec<Complex64>> = (0..cols)
            .map(|j| {
                let mut col = vec![c(0.0, 0.0); rows];
                col[j] = c(1.0, 0.0);
                col
            })
            .collect();
        Dictionary::from_columns(columns).unwrap()
    }

    fn signal_from(samples: Vec<Complex64>) -> BasebandSignal {
        BasebandSignal::new(samples, "test").unwrap()
    }

    fn combine(dict: &Dictionary, weights: &[(usize, Complex64)]) -> BasebandSignal {
        let mut samples = vec![c(0.0, 0.0); dict.rows()];
        for &(j, w) in weights {
            for (s, &d) in samples.iter_mut().zip(dict.column(j)) {
                *s += w * d;
            }
        }
        signal_from(samples)
    }

    #[test]
    fn lls_on_orthonormal_columns_equals_correlations() {
        let dict = orthonormal_dictionary(16, 8);
        let r = signal_from(
            (0..16)
                .map(|i| c((i % 5) as f64 - 2.0, (i % 3) as f64))
                .collect(),
        );
        let sol = lls_solve(&dict, &r).unwrap();
        for j in 0..8 {
            let expected = dict.correlate(j, r.samples());
            assert!((sol.coefficients[j] - expected).norm() <= 1e-12);
        }
        assert!(!sol.regularized);
    }

    #[test]
    fn lls_recovers_planted_coefficients() {
        let dict = random_dictionary(64, 8, 3);
        let truth: Vec<Complex64> = (0..8).map(|j| c(j as f64 - 3.5, 0.25 * j as f64)).collect();
        // r is built from RAW columns so recovered de-normalized coefficients
        // must match the plant.
        let mut samples = vec![c(0.0, 0.0); 64];
        for j in 0..8 {
            let raw = dict.raw_column(j);
            for (s, &d) in samples.iter_mut().zip(&raw) {
                *s += truth[j] * d;
            }
        }
        let sol = lls_solve(&dict, &signal_from(samples)).unwrap();
        let err: f64 = sol
            .coefficients
            .iter()
            .zip(&truth)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale: f64 = truth.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!(err <= 1e-8 * scale, "relative error {}", err / scale);
        assert!(sol.residual_norm <= 1e-8 * vec_norm(signal_from_ref(&dict, &truth).samples()));
    }

    fn signal_from_ref(dict: &Dictionary, truth: &[Complex64]) -> BasebandSignal {
        let mut samples = vec![c(0.0, 0.0); dict.rows()];
        for (j, &t) in truth.iter().enumerate() {
            let raw = dict.raw_column(j);
            for (s, &d) in samples.iter_mut().zip(&raw) {
                *s += t * d;
            }
        }
        signal_from(samples)
    }

    #[test]
    fn lls_satisfies_normal_equations() {
        for seed in 0..10u64 {
            let dict = random_dictionary(48, 6, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 1000);
            let r = signal_from(
                (0..48)
                    .map(|_| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        c(re, im)
                    })
                    .collect(),
            );
            let sol = lls_solve(&dict, &r).unwrap();
            // stationarity on the unit-norm columns
            let mut fitted = r.samples().to_vec();
            for j in 0..6 {
                let v = sol.coefficients[j] * dict.norms()[j];
                for (f, &d) in fitted.iter_mut().zip(dict.column(j)) {
                    *f -= v * d;
                }
            }
            let grad_inf = (0..6)
                .map(|j| dict.correlate(j, &fitted).norm())
                .fold(0.0f64, f64::max);
            let rhs_inf = (0..6)
                .map(|j| dict.correlate(j, r.samples()).norm())
                .fold(0.0f64, f64::max);
            assert!(
                grad_inf <= 1e-9 * rhs_inf,
                "seed {seed}: {grad_inf} vs {rhs_inf}"
            );
        }
    }

    #[test]
    fn lls_rejects_underdetermined_systems() {
        let dict = random_dictionary(4, 8, 5);
        let r = signal_from(vec![c(1.0, 0.0); 4]);
        assert!(matches!(
            lls_solve(&dict, &r),
            Err(Error::Underdetermined { .. })
        ));
    }

    #[test]
    fn lls_flags_regularization_on_duplicate_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let base: Vec<Complex64> = (0..32)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                c(re, im)
            })
            .collect();
        let dict = Dictionary::from_columns(vec![base.clone(), base.clone()]).unwrap();
        let r = signal_from(base);
        let sol = lls_solve(&dict, &r).unwrap();
        assert!(sol.regularized);
        assert!(sol.residual_norm <= 1e-6);
    }

    #[test]
    fn omp_recovers_orthogonal_mixture_in_score_order() {
        let dict = orthonormal_dictionary(16, 8);
        let r = combine(&dict, &[(5, c(3.0, 0.0)), (2, c(1.0, 0.0))]);
        let sol = omp_solve(&dict, &r, 2).unwrap();
        assert_eq!(sol.support, vec![5, 2]);
        assert!((sol.coefficients[5] - c(3.0, 0.0)).norm() <= 1e-12);
        assert!((sol.coefficients[2] - c(1.0, 0.0)).norm() <= 1e-12);
        assert_eq!(sol.termination, Termination::ReachedSparsity);
    }

    #[test]
    fn omp_single_iteration_takes_best_match() {
        let dict = orthonormal_dictionary(12, 6);
        let r = combine(&dict, &[(4, c(0.0, 2.0)), (1, c(0.5, 0.0))]);
        for solver in [omp_solve, omp_solve_reference] {
            let sol = solver(&dict, &r, 1).unwrap();
            assert_eq!(sol.support, vec![4]);
        }
    }

    #[test]
    fn omp_ties_break_to_lowest_index() {
        let dict = orthonormal_dictionary(8, 4);
        let r = combine(&dict, &[(1, c(1.0, 0.0)), (3, c(1.0, 0.0))]);
        let sol = omp_solve(&dict, &r, 2).unwrap();
        assert_eq!(sol.support[0], 1);
        let reference = omp_solve_reference(&dict, &r, 2).unwrap();
        assert_eq!(reference.support[0], 1);
    }

    #[test]
    fn omp_full_support_matches_lls() {
        let dict = random_dictionary(64, 6, 21);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let r = signal_from(
            (0..64)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    c(re, im)
                })
                .collect(),
        );
        let full = omp_solve(&dict, &r, 6).unwrap();
        let lls = lls_solve(&dict, &r).unwrap();
        let scale: f64 = lls
            .coefficients
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt();
        let err: f64 = full
            .coefficients
            .iter()
            .zip(&lls.coefficients)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-8 * scale);
    }

    #[test]
    fn omp_agrees_with_reference_on_random_instances() {
        for seed in 0..25u64 {
            let dict = random_dictionary(96, 12, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xAB);
            let r = signal_from(
                (0..96)
                    .map(|_| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        c(re, im)
                    })
                    .collect(),
            );
            let sparsity = 1 + (seed as usize % 6);
            let a = omp_solve(&dict, &r, sparsity).unwrap();
            let b = omp_solve_reference(&dict, &r, sparsity).unwrap();
            assert_eq!(a.support, b.support, "seed {seed}");
            let scale: f64 = b
                .coefficients
                .iter()
                .map(|v| v.norm_sqr())
                .sum::<f64>()
                .sqrt();
            let err: f64 = a
                .coefficients
                .iter()
                .zip(&b.coefficients)
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err <= 1e-9 * scale.max(1e-30), "seed {seed}: {err}");
        }
    }

    #[test]
    fn omp_residual_is_orthogonal_to_selection_and_monotone() {
        let dict = random_dictionary(80, 10, 31);
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let r = signal_from(
            (0..80)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    c(re, im)
                })
                .collect(),
        );
        let sol = omp_solve(&dict, &r, 6).unwrap();
        assert!(sol
            .residual_norms
            .windows(2)
            .all(|w| w[1] <= w[0] + 1e-12 * r.norm()));
        // rebuild the final residual and check orthogonality
        let mut residual = r.samples().to_vec();
        for &idx in &sol.support {
            let v = sol.coefficients[idx] * dict.norms()[idx];
            for (res, &d) in residual.iter_mut().zip(dict.column(idx)) {
                *res -= v * d;
            }
        }
        for &idx in &sol.support {
            let dot = dict.correlate(idx, &residual).norm();
            assert!(dot <= 1e-9 * r.norm(), "column {idx}: {dot}");
        }
    }

    #[test]
    fn omp_never_reselects_and_respects_sparsity() {
        let dict = random_dictionary(64, 9, 41);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let r = signal_from(
            (0..64)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    c(re, im)
                })
                .collect(),
        );
        let sol = omp_solve(&dict, &r, 7).unwrap();
        let unique: std::collections::HashSet<_> = sol.support.iter().collect();
        assert_eq!(unique.len(), sol.support.len());
        assert!(sol.support.len() <= 7);
    }

    #[test]
    fn omp_is_scale_equivariant() {
        let dict = random_dictionary(64, 8, 51);
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let r = signal_from(
            (0..64)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    c(re, im)
                })
                .collect(),
        );
        let alpha = 3.75f64;
        let a = omp_solve(&dict, &r, 4).unwrap();
        let b = omp_solve(&dict, &r.scaled(c(alpha, 0.0)), 4).unwrap();
        assert_eq!(a.support, b.support);
        for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
            assert!((x * alpha - y).norm() <= 1e-9 * (y.norm().max(1e-30)));
        }
    }

    #[test]
    fn omp_skips_duplicate_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let base: Vec<Complex64> = (0..32)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                c(re, im)
            })
            .collect();
        let other: Vec<Complex64> = (0..32)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                c(re, im)
            })
            .collect();
        // columns 0 and 1 are identical; a 2-sparse fit must take 0 then 2.
        let dict = Dictionary::from_columns(vec![base.clone(), base.clone(), other]).unwrap();
        let mut samples = vec![c(0.0, 0.0); 32];
        for (s, (&b, &o)) in samples
            .iter_mut()
            .zip(dict.column(0).iter().zip(dict.column(2)))
        {
            *s = 2.0 * b + 0.5 * o;
        }
        let sol = omp_solve(&dict, &signal_from(samples), 2).unwrap();
        assert_eq!(sol.support, vec![0, 2]);
    }

    #[test]
    fn omp_flags_fully_degenerate_candidates() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let base: Vec<Complex64> = (0..16)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                c(re, im)
            })
            .collect();
        let dict = Dictionary::from_columns(vec![base.clone(), base.clone()]).unwrap();
        let r = signal_from(base);
        let sol = omp_solve(&dict, &r, 2).unwrap();
        // after the first pick the residual is ~0, so the run ends at the
        // residual floor rather than selecting the duplicate
        assert_eq!(sol.support.len(), 1);
        assert!(matches!(
            sol.termination,
            Termination::ResidualFloor | Termination::DegenerateCandidates
        ));
    }

    #[test]
    fn omp_validates_sparsity() {
        let dict = random_dictionary(16, 4, 81);
        let r = signal_from(vec![c(1.0, 0.0); 16]);
        assert!(omp_solve(&dict, &r, 0).is_err());
        assert!(omp_solve(&dict, &r, 5).is_err());
        assert!(omp_solve_reference(&dict, &r, 5).is_err());
    }

    #[test]
    fn omp_zero_observation_returns_empty_support() {
        let dict = random_dictionary(16, 4, 91);
        let r = signal_from(vec![c(0.0, 0.0); 16]);
        let sol = omp_solve(&dict, &r, 2).unwrap();
        assert!(sol.support.is_empty());
        assert_eq!(sol.termination, Termination::ResidualFloor);
    }

    #[test]
    fn omp_exact_support_recovery_on_incoherent_dictionaries() {
        let mut hits = 0;
        for seed in 0..20u64 {
            let dict = random_dictionary(520, 18, seed);
            let planted: Vec<usize> = vec![0, 4, 9, 13, 17];
            let mut samples = vec![c(0.0, 0.0); 520];
            for (pos, &j) in planted.iter().enumerate() {
                let w = c(1.0 + pos as f64 * 0.3, -0.2 * pos as f64);
                for (s, &d) in samples.iter_mut().zip(dict.column(j)) {
                    *s += w * d;
                }
            }
            let sol = omp_solve(&dict, &signal_from(samples), 5).unwrap();
            let mut found = sol.support.clone();
            found.sort_unstable();
            if found == planted {
                hits += 1;
            }
        }
        assert_eq!(hits, 20);
    }
}
