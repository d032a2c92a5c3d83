//! Complex-baseband signal blocks: generation, FIR filtering, power scaling
//! and measurement.
//!
//! All operations work on fixed-length blocks of `Complex64` samples. The
//! power convention is digital: a block with unit mean-square amplitude has
//! 0 dBm (1.0 amplitude-squared == 1 mW), and every generator realizes its
//! target power exactly on the emitted block rather than in expectation.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use crate::error::{Error, Result};

/// Block power in dBm under the crate convention
/// `dbm = 10 * log10(mean |s(n)|^2)`.
///
/// An all-zero block measures as the `-inf` sentinel ([`PowerLevel::SILENT`]).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PowerLevel(f64);

impl PowerLevel {
    /// Sentinel for zero power (all-zero block).
    pub const SILENT: PowerLevel = PowerLevel(f64::NEG_INFINITY);

    pub fn dbm(value: f64) -> Self {
        PowerLevel(value)
    }

    pub fn value_dbm(self) -> f64 {
        self.0
    }

    /// Mean-square amplitude corresponding to this level (mW).
    pub fn linear(self) -> f64 {
        10f64.powf(self.0 / 10.0)
    }

    pub fn is_silent(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl fmt::Display for PowerLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} dBm", self.0)
    }
}

/// A finite block of complex baseband samples plus a free-form origin tag.
///
/// Invariants enforced at construction: at least one sample, all samples
/// finite. The length is fixed for the lifetime of the value.
#[derive(Debug, Clone, PartialEq)]
pub struct BasebandSignal {
    samples: Vec<Complex64>,
    label: String,
}

impl BasebandSignal {
    pub fn new(samples: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument(
                "signal block must contain at least one sample".into(),
            ));
        }
        if let Some(idx) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite sample at index {idx}"
            )));
        }
        Ok(BasebandSignal {
            samples,
            label: label.into(),
        })
    }

    pub fn zeros(len: usize, label: impl Into<String>) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); len], label)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Blocks are never empty; kept for clippy's sake.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Elementwise sum; both blocks must share a length.
    pub fn add(&self, other: &BasebandSignal) -> Result<BasebandSignal> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Elementwise difference; both blocks must share a length.
    pub fn sub(&self, other: &BasebandSignal) -> Result<BasebandSignal> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Multiply every sample by a complex factor.
    pub fn scaled(&self, factor: Complex64) -> BasebandSignal {
        BasebandSignal {
            samples: self.samples.iter().map(|s| s * factor).collect(),
            label: self.label.clone(),
        }
    }

    fn zip_with(
        &self,
        other: &BasebandSignal,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<BasebandSignal> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                context: "elementwise combination of signal blocks",
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(BasebandSignal {
            samples: self
                .samples
                .iter()
                .zip(other.samples.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
            label: self.label.clone(),
        })
    }

    /// Mean-square amplitude of the block.
    pub fn mean_square(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    /// Euclidean norm of the block viewed as a vector.
    pub fn norm(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// FIR chip-leakage channel: an ordered complex tap vector `h(0..L-1)`.
///
/// Invariants: `L >= 1`, all taps finite, at least one tap nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipChannel {
    taps: Vec<Complex64>,
}

impl ChipChannel {
    pub fn new(taps: Vec<Complex64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::InvalidArgument(
                "channel must have at least one tap".into(),
            ));
        }
        if let Some(idx) = taps.iter().position(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite channel tap at index {idx}"
            )));
        }
        if taps.iter().all(|t| t.norm_sqr() == 0.0) {
            return Err(Error::InvalidArgument("all channel taps are zero".into()));
        }
        Ok(ChipChannel { taps })
    }

    /// Unit impulse channel (identity under filtering).
    pub fn impulse() -> Self {
        ChipChannel {
            taps: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn taps(&self) -> &[Complex64] {
        &self.taps
    }

    /// Total tap energy `sum |h(k)|^2`.
    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t.norm_sqr()).sum()
    }
}

/// Modulation of a generated block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    /// Circularly symmetric complex Gaussian samples.
    #[default]
    Gaussian,
    /// Uniform draws from {(+-1 +- i)/sqrt(2)}.
    Qpsk,
    /// Uniform draws from the 16-QAM grid {+-1, +-3}^2 / sqrt(10).
    Qam16,
}

impl fmt::Display for SignalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SignalKind::Gaussian => "gaussian",
            SignalKind::Qpsk => "qpsk",
            SignalKind::Qam16 => "qam16",
        };
        f.write_str(s)
    }
}

fn draw_circular_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    // Unit-power circular Gaussian: each component N(0, 1/2).
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Generate a length-`len` block of the given kind, normalized so the
/// realized block power is exactly 0 dBm. Bit-deterministic per
/// `(len, kind, seed)`.
pub fn generate_block(len: usize, kind: SignalKind, seed: u64) -> Result<BasebandSignal> {
    if len == 0 {
        return Err(Error::InvalidArgument("block length must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<Complex64> = match kind {
        SignalKind::Gaussian => (0..len).map(|_| draw_circular_gaussian(&mut rng)).collect(),
        SignalKind::Qpsk => (0..len)
            .map(|_| {
                let bits = rng.random_range(0..4u8);
                let re = if bits & 1 == 0 { 1.0 } else { -1.0 };
                let im = if bits & 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
            })
            .collect(),
        SignalKind::Qam16 => {
            const LEVELS: [f64; 4] = [-3.0, -1.0, 1.0, 3.0];
            let scale = 1.0 / 10f64.sqrt();
            (0..len)
                .map(|_| {
                    let re = LEVELS[rng.random_range(0..4usize)];
                    let im = LEVELS[rng.random_range(0..4usize)];
                    Complex64::new(re * scale, im * scale)
                })
                .collect()
        }
    };
    let block = BasebandSignal::new(samples, kind.to_string())?;
    // The raw draw already has ~unit power; pin it exactly.
    set_power(&block, PowerLevel::dbm(0.0))
}

/// Convolve a block with an FIR channel using the zero-prefix convention
/// (`s(m) = 0` for `m < 0`); the output has the input's length.
pub fn fir_filter(signal: &BasebandSignal, channel: &ChipChannel) -> BasebandSignal {
    let s = signal.samples();
    let taps = channel.taps();
    let out: Vec<Complex64> = (0..s.len())
        .map(|n| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &h) in taps.iter().enumerate().take(n + 1) {
                acc += h * s[n - k];
            }
            acc
        })
        .collect();
    BasebandSignal {
        samples: out,
        label: format!("fir({})", signal.label()),
    }
}

/// Measure realized block power; all-zero blocks report the `-inf` sentinel.
pub fn measure_power(signal: &BasebandSignal) -> PowerLevel {
    let ms = signal.mean_square();
    if ms == 0.0 {
        PowerLevel::SILENT
    } else {
        PowerLevel::dbm(10.0 * ms.log10())
    }
}

/// Rescale a block by a single positive real factor so its realized power
/// equals `target` exactly. Errors on an all-zero block or non-finite target.
pub fn set_power(signal: &BasebandSignal, target: PowerLevel) -> Result<BasebandSignal> {
    if !target.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "target power must be finite, got {target}"
        )));
    }
    let ms = signal.mean_square();
    if ms == 0.0 {
        return Err(Error::InvalidArgument(
            "cannot set the power of an all-zero block".into(),
        ));
    }
    let factor = (target.linear() / ms).sqrt();
    Ok(signal.scaled(Complex64::new(factor, 0.0)))
}

/// Circularly symmetric complex Gaussian block whose realized power equals
/// `power` exactly; a `-inf` target yields the all-zero block. Deterministic
/// per seed.
pub fn awgn_block(len: usize, power: PowerLevel, seed: u64) -> Result<BasebandSignal> {
    if len == 0 {
        return Err(Error::InvalidArgument("block length must be >= 1".into()));
    }
    if power.is_silent() {
        return BasebandSignal::zeros(len, "awgn(silent)");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<Complex64> = (0..len).map(|_| draw_circular_gaussian(&mut rng)).collect();
    let block = BasebandSignal::new(raw, "awgn")?;
    set_power(&block, power)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn generate_block_rejects_empty() {
        assert!(generate_block(0, SignalKind::Gaussian, 7).is_err());
    }

    #[test]
    fn gaussian_block_is_near_unit_power_before_normalization() {
        // Redo the raw draw and check the pre-normalization statistic.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let raw: Vec<Complex64> = (0..520).map(|_| draw_circular_gaussian(&mut rng)).collect();
        let ms = raw.iter().map(|s| s.norm_sqr()).sum::<f64>() / 520.0;
        assert!((ms - 1.0).abs() <= 0.15, "raw mean square {ms}");
        let block = generate_block(520, SignalKind::Gaussian, 7).unwrap();
        assert_eq!(block.len(), 520);
        assert_abs_diff_eq!(block.mean_square(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn qpsk_block_stays_on_constellation() {
        let block = generate_block(520, SignalKind::Qpsk, 1).unwrap();
        for s in block.samples() {
            assert_abs_diff_eq!(s.re.abs(), FRAC_1_SQRT_2, epsilon = 1e-12);
            assert_abs_diff_eq!(s.im.abs(), FRAC_1_SQRT_2, epsilon = 1e-12);
        }
    }

    #[test]
    fn qam16_block_has_unit_power() {
        let block = generate_block(1024, SignalKind::Qam16, 3).unwrap();
        assert_abs_diff_eq!(block.mean_square(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn generators_are_deterministic() {
        for kind in [SignalKind::Gaussian, SignalKind::Qpsk, SignalKind::Qam16] {
            let a = generate_block(128, kind, 99).unwrap();
            let b = generate_block(128, kind, 99).unwrap();
            assert_eq!(a, b);
            let c = generate_block(128, kind, 100).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn impulse_channel_is_identity() {
        let s = generate_block(64, SignalKind::Gaussian, 5).unwrap();
        let out = fir_filter(&s, &ChipChannel::impulse());
        assert_eq!(out.samples(), s.samples());
    }

    #[test]
    fn pure_delay_shifts_with_zero_prefix() {
        let s = BasebandSignal::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)], "s").unwrap();
        let h = ChipChannel::new(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let out = fir_filter(&s, &h);
        assert_eq!(out.samples(), &[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
    }

    #[test]
    fn fir_matches_direct_convolution() {
        let s = generate_block(32, SignalKind::Gaussian, 11).unwrap();
        let h = ChipChannel::new(vec![c(1.0, 0.0), c(0.0, 0.5)]).unwrap();
        let out = fir_filter(&s, &h);
        let expected = s.samples()[2] + c(0.0, 0.5) * s.samples()[1];
        assert_abs_diff_eq!(out.samples()[2].re, expected.re, epsilon = 1e-15);
        assert_abs_diff_eq!(out.samples()[2].im, expected.im, epsilon = 1e-15);
    }

    #[test]
    fn fir_is_linear() {
        let s1 = generate_block(48, SignalKind::Gaussian, 1).unwrap();
        let s2 = generate_block(48, SignalKind::Gaussian, 2).unwrap();
        let h = ChipChannel::new(vec![c(0.3, -0.2), c(0.0, 1.0), c(0.5, 0.0)]).unwrap();
        let alpha = c(1.7, -0.4);
        let beta = c(-0.3, 0.9);
        let lhs = fir_filter(&s1.scaled(alpha).add(&s2.scaled(beta)).unwrap(), &h);
        let rhs = fir_filter(&s1, &h)
            .scaled(alpha)
            .add(&fir_filter(&s2, &h).scaled(beta))
            .unwrap();
        for (a, b) in lhs.samples().iter().zip(rhs.samples()) {
            assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0));
        }
    }

    #[test]
    fn measure_power_known_blocks() {
        let ones = BasebandSignal::new(vec![c(1.0, 0.0); 8], "ones").unwrap();
        assert_abs_diff_eq!(measure_power(&ones).value_dbm(), 0.0, epsilon = 1e-12);

        let tenth = BasebandSignal::new(vec![c(0.1, 0.0); 8], "tenth").unwrap();
        assert_abs_diff_eq!(measure_power(&tenth).value_dbm(), -20.0, epsilon = 1e-12);

        let ring = BasebandSignal::new(
            vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)],
            "ring",
        )
        .unwrap();
        assert_abs_diff_eq!(measure_power(&ring).value_dbm(), 0.0, epsilon = 1e-12);

        let silent = BasebandSignal::zeros(4, "z").unwrap();
        assert!(measure_power(&silent).is_silent());
    }

    #[test]
    fn set_power_scales_by_expected_factor() {
        let unit = BasebandSignal::new(vec![c(1.0, 0.0); 16], "unit").unwrap();
        let scaled = set_power(&unit, PowerLevel::dbm(-20.0)).unwrap();
        for s in scaled.samples() {
            assert_abs_diff_eq!(s.re, 0.1, epsilon = 1e-15);
        }
        let unchanged = set_power(&unit, PowerLevel::dbm(0.0)).unwrap();
        assert_eq!(unchanged.samples(), unit.samples());
    }

    #[test]
    fn set_power_rejects_zero_block_and_silent_target() {
        let z = BasebandSignal::zeros(4, "z").unwrap();
        assert!(set_power(&z, PowerLevel::dbm(0.0)).is_err());
        let s = BasebandSignal::new(vec![c(1.0, 0.0)], "s").unwrap();
        assert!(set_power(&s, PowerLevel::SILENT).is_err());
    }

    #[test]
    fn awgn_block_hits_target_power_exactly() {
        let block = awgn_block(520, PowerLevel::dbm(0.0), 17).unwrap();
        assert_abs_diff_eq!(measure_power(&block).value_dbm(), 0.0, epsilon = 1e-9);
        let faint = awgn_block(520, PowerLevel::dbm(-85.0), 17).unwrap();
        assert_abs_diff_eq!(measure_power(&faint).value_dbm(), -85.0, epsilon = 1e-9);
        assert!(awgn_block(520, PowerLevel::SILENT, 17)
            .unwrap()
            .samples()
            .iter()
            .all(|s| s.norm_sqr() == 0.0));
    }

    #[test]
    fn awgn_component_means_within_gaussian_tail_bound() {
        let p = 520usize;
        let bound = 4.0 / (p as f64).sqrt();
        for seed in 0..100u64 {
            let block = awgn_block(p, PowerLevel::dbm(0.0), seed).unwrap();
            let mean_re = block.samples().iter().map(|s| s.re).sum::<f64>() / p as f64;
            let mean_im = block.samples().iter().map(|s| s.im).sum::<f64>() / p as f64;
            assert!(mean_re.abs() <= bound, "seed {seed}: re mean {mean_re}");
            assert!(mean_im.abs() <= bound, "seed {seed}: im mean {mean_im}");
        }
    }

    #[test]
    fn awgn_blocks_differ_across_seeds() {
        let a = awgn_block(64, PowerLevel::dbm(0.0), 1).unwrap();
        let b = awgn_block(64, PowerLevel::dbm(0.0), 2).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn signal_invariants_are_enforced() {
        assert!(BasebandSignal::new(vec![], "empty").is_err());
        assert!(BasebandSignal::new(vec![c(f64::NAN, 0.0)], "nan").is_err());
        assert!(ChipChannel::new(vec![]).is_err());
        assert!(ChipChannel::new(vec![c(0.0, 0.0)]).is_err());
        assert!(ChipChannel::new(vec![c(f64::INFINITY, 0.0)]).is_err());
    }

    proptest! {
        #[test]
        fn set_then_measure_round_trips(target in -120.0f64..20.0, seed in 0u64..1000) {
            let block = generate_block(64, SignalKind::Gaussian, seed).unwrap();
            let scaled = set_power(&block, PowerLevel::dbm(target)).unwrap();
            let measured = measure_power(&scaled).value_dbm();
            prop_assert!((measured - target).abs() <= 1e-9);
        }

        #[test]
        fn fir_output_length_matches_input(len in 1usize..64, taps in 1usize..6, seed in 0u64..100) {
            let s = generate_block(len, SignalKind::Gaussian, seed).unwrap();
            let h = ChipChannel::new(
                (0..taps).map(|k| Complex64::new(1.0 / (k + 1) as f64, 0.1)).collect(),
            ).unwrap();
            prop_assert_eq!(fir_filter(&s, &h).len(), len);
        }
    }
}
