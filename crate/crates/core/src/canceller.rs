//! Distortion reconstruction and cancellation figures of merit.
//!
//! The estimated distortion is rebuilt from dictionary columns and estimated
//! coefficients, and cancellation quality is measured against the simulator's
//! ground-truth distortion component: residual power is
//! `measure_power(p_true - p_hat)`, which isolates the canceller from the
//! realized downlink and noise blocks.

use num_complex::Complex64;

use crate::dictionary::Dictionary;
use crate::distortion::ReceiveFrame;
use crate::error::{Error, Result};
use crate::signal::{measure_power, BasebandSignal, PowerLevel};

/// Summary of one cancellation run.
#[derive(Debug, Clone, PartialEq)]
pub struct CancellationReport {
    pub solver_id: String,
    pub taps_used: usize,
    pub original_distortion_dbm: PowerLevel,
    pub residual_distortion_dbm: PowerLevel,
    /// `original - residual`; positive means the canceller helped.
    pub suppression_db: f64,
    /// Distortion-to-noise ratio of the frame.
    pub inr_db: f64,
    /// Distortion-to-downlink-signal ratio of the frame.
    pub isr_db: f64,
}

/// Rebuild the estimated distortion `sum_j v_j * raw_column_j` from
/// de-normalized coefficients.
pub fn reconstruct(dict: &Dictionary, coefficients: &[Complex64]) -> Result<BasebandSignal> {
    if coefficients.len() != dict.num_columns() {
        return Err(Error::LengthMismatch {
            context: "coefficient vector vs dictionary columns",
            expected: dict.num_columns(),
            got: coefficients.len(),
        });
    }
    let mut samples = vec![Complex64::new(0.0, 0.0); dict.rows()];
    for (j, &v) in coefficients.iter().enumerate() {
        if v.norm_sqr() == 0.0 {
            continue;
        }
        // raw column = stored unit-norm column scaled back by its norm
        let scale = v * dict.norms()[j];
        for (s, &d) in samples.iter_mut().zip(dict.column(j)) {
            *s += scale * d;
        }
    }
    BasebandSignal::new(samples, "reconstructed-distortion")
}

/// Power of the uncancelled distortion `p_true - p_hat`; the `-inf` sentinel
/// marks perfect cancellation.
pub fn residual_distortion_power(
    frame: &ReceiveFrame,
    estimate: &BasebandSignal,
) -> Result<PowerLevel> {
    Ok(measure_power(&frame.distortion.sub(estimate)?))
}

/// Assemble the full report for one solver run on one frame.
pub fn make_report(
    frame: &ReceiveFrame,
    estimate: &BasebandSignal,
    solver_id: impl Into<String>,
    taps_used: usize,
) -> Result<CancellationReport> {
    let original = frame.levels.distortion_dbm;
    let residual = residual_distortion_power(frame, estimate)?;
    Ok(CancellationReport {
        solver_id: solver_id.into(),
        taps_used,
        original_distortion_dbm: original,
        residual_distortion_dbm: residual,
        suppression_db: original.value_dbm() - residual.value_dbm(),
        inr_db: original.value_dbm() - frame.levels.noise_dbm.value_dbm(),
        isr_db: original.value_dbm() - frame.levels.signal_dbm.value_dbm(),
    })
}
