//! Simulation and digital baseband cancellation of receiver-nonlinearity
//! self-interference.
//!
//! When several bands transmit and receive at once, an uplink signal can leak
//! through the chip into a receiver's LNA, whose nonlinearity lands harmonic
//! or inter-modulation products of the leakage right on a downlink band. The
//! distortion is a nonlinear function of the unknown leakage channel, but
//! expanding the distortion polynomial term by term turns estimation linear:
//! every delayed-power product of the known uplink baseband signals becomes a
//! reference column of a dictionary matrix, and the distortion is a linear
//! combination of columns.
//!
//! This crate synthesizes such scenarios and cancels the distortion two
//! ways: full least squares over all expansion terms, and greedy sparse
//! selection of a tap budget's worth of the best-matching terms, refit by
//! least squares on the growing support via an incrementally augmented
//! Cholesky factorization. Single-lag (`prior`) and shared-lag
//! (`hammerstein`) baseline dictionaries are included for comparison, and a
//! seeded Monte-Carlo harness turns configurations into CSV result tables.
//!
//! ```
//! use num_complex::Complex64;
//! use sicancel::{
//!     build_dictionary, fir_filter, generate_block, hd_distortion, lls_solve, make_frame,
//!     omp_solve, reconstruct, residual_distortion_power, set_power, DistortionSpec, Lengths,
//!     ModelKind, PowerLevel, SignalKind,
//! };
//!
//! // a 3rd-order harmonic of an uplink block leaked through a 2-tap channel
//! let uplink = generate_block(520, SignalKind::Gaussian, 7).unwrap();
//! let channel = sicancel::random_channel(2, 0.6, 3).unwrap();
//! let spec = DistortionSpec::harmonic(3, Complex64::new(1.0, 0.0)).unwrap();
//! let distortion = hd_distortion(&fir_filter(&uplink, &channel), &spec).unwrap();
//!
//! // received frame at -85 dBm distortion, -95 dBm downlink, 0 dB INR
//! let frame = make_frame(
//!     &distortion,
//!     PowerLevel::dbm(-85.0),
//!     PowerLevel::dbm(-95.0),
//!     0.0,
//!     42,
//! )
//! .unwrap();
//!
//! // sparse cancellation with 3 of the 4 expansion terms
//! let dict = build_dictionary(ModelKind::Exact, &uplink, None, &spec, Lengths::Single(2))
//!     .unwrap();
//! let sparse = omp_solve(&dict, &frame.observed, 3).unwrap();
//! let estimate = reconstruct(&dict, &sparse.coefficients).unwrap();
//! let residual = residual_distortion_power(&frame, &estimate).unwrap();
//! assert!(residual.value_dbm() < -85.0);
//!
//! // or the full fit, which nails the distortion to numerical precision
//! let full = lls_solve(&dict, &frame.observed).unwrap();
//! # let _ = (set_power, full);
//! ```

pub mod canceller;
pub mod dictionary;
pub mod distortion;
pub mod error;
pub mod harness;
pub mod seed;
pub mod signal;
pub mod solvers;

pub use canceller::{make_report, reconstruct, residual_distortion_power, CancellationReport};
pub use dictionary::{
    build_dictionary, enumerate_terms, hd_term_count, imd_term_count, Dictionary, Lengths,
    ModelKind, TermDescriptor, TermFactor,
};
pub use distortion::{
    hd_distortion, imd_distortion, make_frame, DistortionKind, DistortionSpec, FrameLevels,
    ReceiveFrame,
};
pub use error::{Error, Result};
pub use harness::{
    random_channel, run_sweep, run_sweep_to_files, run_trial, ResultRow, ScenarioConfig,
    ScenarioKind, SolverKind, SweepOutput,
};
pub use signal::{
    awgn_block, fir_filter, generate_block, measure_power, set_power, BasebandSignal, ChipChannel,
    PowerLevel, SignalKind,
};
pub use solvers::{
    lls_solve, omp_solve, omp_solve_reference, CholeskyState, LlsSolution, OmpSolution, Termination,
};
