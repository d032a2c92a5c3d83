//! Receiver-nonlinearity distortion synthesis and frame assembly.
//!
//! Two mechanisms are modeled at complex baseband. Harmonic distortion raises
//! one leaked uplink signal to an integer power, `p(n) = c0 * x(n)^Q`.
//! Inter-modulation distortion multiplies integer powers of two leaked
//! signals, `p(n) = c0 * u1(n)^|p| * u2(n)^|q|`, where a source with a
//! negative exponent enters conjugated. Both are literal complex powers; no
//! extra conjugate products are introduced beyond the negative-exponent rule.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::seed::{child_seed, role};
use crate::signal::{awgn_block, measure_power, set_power, BasebandSignal, PowerLevel};

/// Which nonlinear mechanism a [`DistortionSpec`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistortionKind {
    /// Q-th order harmonic of a single leaked signal.
    Harmonic { order: u32 },
    /// Inter-modulation of two leaked signals with integer exponents
    /// `(p, q)`; the order is `|p| + |q|`.
    Intermod { p: i32, q: i32 },
}

/// Nonlinearity description: mechanism plus complex gain `c0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionSpec {
    kind: DistortionKind,
    c0: Complex64,
}

impl DistortionSpec {
    /// Harmonic distortion of order `Q >= 2`.
    pub fn harmonic(order: u32, c0: Complex64) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidArgument(format!(
                "harmonic order must be >= 2, got {order}"
            )));
        }
        Self::checked(DistortionKind::Harmonic { order }, c0)
    }

    /// Inter-modulation distortion with nonzero integer exponents.
    pub fn intermod(p: i32, q: i32, c0: Complex64) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidArgument(
                "inter-modulation exponents must be nonzero".into(),
            ));
        }
        Self::checked(DistortionKind::Intermod { p, q }, c0)
    }

    fn checked(kind: DistortionKind, c0: Complex64) -> Result<Self> {
        if !c0.is_finite() || c0.norm_sqr() == 0.0 {
            return Err(Error::InvalidArgument(
                "distortion gain c0 must be finite and nonzero".into(),
            ));
        }
        Ok(DistortionSpec { kind, c0 })
    }

    pub fn kind(&self) -> DistortionKind {
        self.kind
    }

    pub fn gain(&self) -> Complex64 {
        self.c0
    }

    /// Total distortion order: `Q` for harmonic, `|p| + |q|` for
    /// inter-modulation.
    pub fn order(&self) -> u32 {
        match self.kind {
            DistortionKind::Harmonic { order } => order,
            DistortionKind::Intermod { p, q } => p.unsigned_abs() + q.unsigned_abs(),
        }
    }
}

/// Harmonic distortion of a leaked signal: `out(n) = c0 * x(n)^Q`.
pub fn hd_distortion(x: &BasebandSignal, spec: &DistortionSpec) -> Result<BasebandSignal> {
    let DistortionKind::Harmonic { order } = spec.kind() else {
        return Err(Error::InvalidArgument(
            "hd_distortion requires a harmonic spec".into(),
        ));
    };
    let c0 = spec.gain();
    let samples = x.samples().iter().map(|&s| c0 * s.powu(order)).collect();
    BasebandSignal::new(samples, format!("hd{order}({})", x.label()))
}

/// Inter-modulation distortion of two leaked signals:
/// `out(n) = c0 * u1(n)^|p| * u2(n)^|q|`, conjugating the source whose
/// exponent is negative.
pub fn imd_distortion(
    x1: &BasebandSignal,
    x2: &BasebandSignal,
    spec: &DistortionSpec,
) -> Result<BasebandSignal> {
    let DistortionKind::Intermod { p, q } = spec.kind() else {
        return Err(Error::InvalidArgument(
            "imd_distortion requires an inter-modulation spec".into(),
        ));
    };
    if x1.len() != x2.len() {
        return Err(Error::LengthMismatch {
            context: "inter-modulation inputs",
            expected: x1.len(),
            got: x2.len(),
        });
    }
    let c0 = spec.gain();
    let samples = x1
        .samples()
        .iter()
        .zip(x2.samples())
        .map(|(&a, &b)| {
            let u1 = if p < 0 { a.conj() } else { a };
            let u2 = if q < 0 { b.conj() } else { b };
            c0 * u1.powu(p.unsigned_abs()) * u2.powu(q.unsigned_abs())
        })
        .collect();
    BasebandSignal::new(samples, format!("imd({},{})", p, q))
}

/// Power levels recorded when a frame is assembled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameLevels {
    pub distortion_dbm: PowerLevel,
    pub signal_dbm: PowerLevel,
    pub noise_dbm: PowerLevel,
}

/// One observed receive block together with its ground-truth decomposition.
///
/// `observed(n) = distortion(n) + downlink(n) + noise(n)` holds bit-exactly
/// with left-to-right summation; the decomposition is a simulator diagnostic
/// the estimators never see.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiveFrame {
    pub observed: BasebandSignal,
    pub distortion: BasebandSignal,
    pub downlink: BasebandSignal,
    pub noise: BasebandSignal,
    pub levels: FrameLevels,
}

impl ReceiveFrame {
    /// Assemble a frame from its three components, measuring the levels.
    pub fn assemble(
        distortion: BasebandSignal,
        downlink: BasebandSignal,
        noise: BasebandSignal,
    ) -> Result<Self> {
        let observed = distortion
            .add(&downlink)?
            .add(&noise)?
            .with_label("observed");
        let levels = FrameLevels {
            distortion_dbm: measure_power(&distortion),
            signal_dbm: measure_power(&downlink),
            noise_dbm: measure_power(&noise),
        };
        Ok(ReceiveFrame {
            observed,
            distortion,
            downlink,
            noise,
            levels,
        })
    }

    pub fn len(&self) -> usize {
        self.observed.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Scale a raw distortion block to `distortion_dbm`, add a Gaussian downlink
/// block at `signal_dbm` and white noise at `distortion_dbm - inr_db`, and
/// return the assembled frame. `inr_db = +inf` selects the noiseless mode
/// (`noise` identically zero). The recorded levels are the requested targets;
/// realized block powers match them to better than 1e-9 dB.
pub fn make_frame(
    raw_distortion: &BasebandSignal,
    distortion_dbm: PowerLevel,
    signal_dbm: PowerLevel,
    inr_db: f64,
    seed: u64,
) -> Result<ReceiveFrame> {
    if !distortion_dbm.is_finite() {
        return Err(Error::InvalidArgument(
            "distortion level must be finite".into(),
        ));
    }
    if !signal_dbm.is_finite() {
        return Err(Error::InvalidArgument(
            "downlink signal level must be finite".into(),
        ));
    }
    if inr_db.is_nan() || inr_db == f64::NEG_INFINITY {
        return Err(Error::InvalidArgument(format!(
            "INR must be finite or +inf, got {inr_db}"
        )));
    }
    let len = raw_distortion.len();
    let distortion = set_power(raw_distortion, distortion_dbm)?;
    let downlink =
        awgn_block(len, signal_dbm, child_seed(seed, &[role::DOWNLINK]))?.with_label("downlink");
    let noise_dbm = if inr_db == f64::INFINITY {
        PowerLevel::SILENT
    } else {
        PowerLevel::dbm(distortion_dbm.value_dbm() - inr_db)
    };
    let noise = awgn_block(len, noise_dbm, child_seed(seed, &[role::NOISE]))?.with_label("noise");
    let mut frame = ReceiveFrame::assemble(distortion, downlink, noise)?;
    // Record the requested targets, not the measured values, so derived
    // ratios (INR, ISR) come out exact.
    frame.levels = FrameLevels {
        distortion_dbm,
        signal_dbm,
        noise_dbm,
    };
    Ok(frame)
}
