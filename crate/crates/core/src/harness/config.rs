//! Scenario configuration: TOML schema, validation, and derived quantities.
//!
//! The configuration file is a flat TOML document whose keys mirror
//! [`ScenarioConfig`] field names exactly; unknown keys are rejected. See the
//! project README for the full reference.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

use crate::dictionary::{hd_term_count, imd_term_count};
use crate::distortion::DistortionSpec;
use crate::error::{Error, Result};
use crate::signal::SignalKind;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    /// Harmonic distortion of one uplink signal.
    Hd,
    /// Inter-modulation of two uplink signals.
    Imd,
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::Hd => "hd",
            ScenarioKind::Imd => "imd",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Greedy sparse estimation on the exact dictionary.
    Sparse,
    /// Full least squares on the exact dictionary.
    Full,
    /// Least squares on the single-lag-per-source dictionary.
    Prior,
    /// Least squares on the shared-lag dictionary.
    Hammerstein,
}

impl SolverKind {
    pub fn id(self) -> &'static str {
        match self {
            SolverKind::Sparse => "sparse",
            SolverKind::Full => "full",
            SolverKind::Prior => "prior",
            SolverKind::Hammerstein => "hammerstein",
        }
    }

    /// Whether a taps sweep applies its axis value to this solver.
    pub fn sweeps_taps(self) -> bool {
        matches!(self, SolverKind::Sparse | SolverKind::Hammerstein)
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// One entry of the solver list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub kind: SolverKind,
    /// Cancellation taps `J`: the sparsity level for `sparse`, the column
    /// budget for `hammerstein`. Optional (and checked against the
    /// structural count) for `full` and `prior`; forbidden for swept kinds
    /// when the sweep axis is `taps`.
    #[serde(default)]
    pub taps: Option<usize>,
}

/// Sweep axis: either a list of downlink power levels at fixed per-solver
/// taps, or a list of tap counts at a fixed downlink power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub signal_power_dbm: Option<Vec<f64>>,
    #[serde(default)]
    pub taps: Option<Vec<usize>>,
    #[serde(default)]
    pub fixed_signal_power_dbm: Option<f64>,
}

/// Full description of one Monte-Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    /// First inter-modulation exponent; present exactly for `imd`.
    #[serde(default)]
    pub p: Option<i32>,
    /// Harmonic order (`hd`, >= 2) or second inter-modulation exponent
    /// (`imd`, nonzero).
    pub q: i32,
    /// Samples per block.
    pub block_size: usize,
    /// Distortion level before cancellation.
    pub distortion_dbm: f64,
    /// Distortion-to-noise ratio; `inf` disables noise.
    pub inr_db: f64,
    /// Modulation of the uplink blocks.
    #[serde(default)]
    pub signal_kind: SignalKind,
    /// True chip-channel lengths: `[L]` for `hd`, `[L1, L2]` for `imd`.
    pub true_lengths: Vec<usize>,
    /// Channel lengths assumed when building dictionaries (same shape).
    pub model_lengths: Vec<usize>,
    /// Exponential tap-energy decay of the random channels, in (0, 1].
    #[serde(default = "default_channel_decay")]
    pub channel_decay: f64,
    /// Draw one channel per trial (false, default) or reuse a single
    /// channel realization across all trials (true).
    #[serde(default)]
    pub fixed_channel: bool,
    pub trials: usize,
    pub master_seed: u64,
    pub solvers: Vec<SolverSpec>,
    pub sweep: SweepSpec,
}

fn default_channel_decay() -> f64 {
    0.6
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// The distortion nonlinearity described by this config (unit gain; the
    /// absolute level is set per frame).
    pub fn distortion_spec(&self) -> Result<DistortionSpec> {
        let unit = Complex64::new(1.0, 0.0);
        match self.scenario {
            ScenarioKind::Hd => DistortionSpec::harmonic(self.q as u32, unit),
            ScenarioKind::Imd => {
                let p = self.p.ok_or_else(|| {
                    Error::Config("imd scenario requires the exponent `p`".into())
                })?;
                DistortionSpec::intermod(p, self.q, unit)
            }
        }
    }

    /// Column count of the exact dictionary under the model lengths.
    pub fn exact_columns(&self) -> Result<u64> {
        match self.scenario {
            ScenarioKind::Hd => hd_term_count(self.q as u32, self.model_lengths[0]),
            ScenarioKind::Imd => imd_term_count(
                self.p.unwrap_or(0),
                self.q,
                self.model_lengths[0],
                self.model_lengths[1],
            ),
        }
    }

    /// Sweep points in axis order: `(signal_power_dbm, taps_override)`.
    pub fn sweep_points(&self) -> Vec<(f64, Option<usize>)> {
        if let Some(powers) = &self.sweep.signal_power_dbm {
            powers.iter().map(|&p| (p, None)).collect()
        } else if let (Some(taps), Some(fixed)) =
            (&self.sweep.taps, self.sweep.fixed_signal_power_dbm)
        {
            taps.iter().map(|&t| (fixed, Some(t))).collect()
        } else {
            Vec::new()
        }
    }

    /// Taps used by one solver at one sweep point, and the resulting
    /// reported `J`.
    pub fn solver_taps(&self, solver: &SolverSpec, taps_override: Option<usize>) -> Result<usize> {
        let exact = self.exact_columns()? as usize;
        match solver.kind {
            SolverKind::Sparse | SolverKind::Hammerstein => match taps_override {
                Some(t) if solver.kind.sweeps_taps() => Ok(t),
                _ => solver
                    .taps
                    .ok_or_else(|| Error::Config(format!("solver `{}` needs `taps`", solver.kind))),
            },
            SolverKind::Full => Ok(exact),
            SolverKind::Prior => Ok(self.model_lengths[0] * self.model_lengths[1]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));

        match self.scenario {
            ScenarioKind::Hd => {
                if self.p.is_some() {
                    return fail("hd scenario takes no exponent `p`".into());
                }
                if self.q < 2 {
                    return fail(format!("hd order must be >= 2, got {}", self.q));
                }
                if self.true_lengths.len() != 1 || self.model_lengths.len() != 1 {
                    return fail("hd scenario takes one true length and one model length".into());
                }
            }
            ScenarioKind::Imd => {
                let Some(p) = self.p else {
                    return fail("imd scenario requires the exponent `p`".into());
                };
                if p == 0 || self.q == 0 {
                    return fail("imd exponents must be nonzero".into());
                }
                if self.true_lengths.len() != 2 || self.model_lengths.len() != 2 {
                    return fail(
                        "imd scenario takes two true lengths and two model lengths".into(),
                    );
                }
            }
        }
        if self.block_size == 0 {
            return fail("block_size must be >= 1".into());
        }
        if self.trials == 0 {
            return fail("trials must be >= 1".into());
        }
        if self.true_lengths.contains(&0) || self.model_lengths.contains(&0) {
            return fail("channel lengths must be >= 1".into());
        }
        if !self.distortion_dbm.is_finite() {
            return fail("distortion_dbm must be finite".into());
        }
        if self.inr_db.is_nan() || self.inr_db == f64::NEG_INFINITY {
            return fail("inr_db must be finite or inf".into());
        }
        if !(self.channel_decay > 0.0 && self.channel_decay <= 1.0) {
            return fail(format!(
                "channel_decay must lie in (0, 1], got {}",
                self.channel_decay
            ));
        }
        if self.solvers.is_empty() {
            return fail("at least one solver is required".into());
        }

        // exactly one sweep axis
        let has_power_axis = self.sweep.signal_power_dbm.is_some();
        let has_taps_axis = self.sweep.taps.is_some();
        match (has_power_axis, has_taps_axis) {
            (true, true) | (false, false) => {
                return fail("sweep needs exactly one axis: `signal_power_dbm` or `taps`".into())
            }
            (true, false) => {
                let powers = self.sweep.signal_power_dbm.as_ref().unwrap();
                if powers.is_empty() {
                    return fail("sweep.signal_power_dbm must be nonempty".into());
                }
                if powers.iter().any(|p| !p.is_finite()) {
                    return fail("sweep.signal_power_dbm values must be finite".into());
                }
                if self.sweep.fixed_signal_power_dbm.is_some() {
                    return fail(
                        "sweep.fixed_signal_power_dbm only applies to a taps sweep".into(),
                    );
                }
            }
            (false, true) => {
                let taps = self.sweep.taps.as_ref().unwrap();
                if taps.is_empty() {
                    return fail("sweep.taps must be nonempty".into());
                }
                if taps.contains(&0) {
                    return fail("sweep.taps values must be >= 1".into());
                }
                let Some(fixed) = self.sweep.fixed_signal_power_dbm else {
                    return fail("a taps sweep requires sweep.fixed_signal_power_dbm".into());
                };
                if !fixed.is_finite() {
                    return fail("sweep.fixed_signal_power_dbm must be finite".into());
                }
                if !self.solvers.iter().any(|s| s.kind.sweeps_taps()) {
                    return fail(
                        "a taps sweep needs at least one sparse or hammerstein solver".into(),
                    );
                }
                for s in &self.solvers {
                    if s.kind.sweeps_taps() && s.taps.is_some() {
                        return fail(format!(
                            "solver `{}` must not set `taps`: the sweep axis provides it",
                            s.kind
                        ));
                    }
                }
            }
        }

        // structural consistency of the solver list
        let exact = self.exact_columns()?;
        let exact = usize::try_from(exact)
            .map_err(|_| Error::Config(format!("exact dictionary too large: {exact} columns")))?;
        let prior_cols = match self.scenario {
            ScenarioKind::Imd => Some(self.model_lengths[0] * self.model_lengths[1]),
            ScenarioKind::Hd => None,
        };
        let mut max_taps = 0usize;
        for solver in &self.solvers {
            match solver.kind {
                SolverKind::Sparse => {
                    if !has_taps_axis {
                        let Some(t) = solver.taps else {
                            return fail("solver `sparse` needs `taps`".into());
                        };
                        if t == 0 || t > exact {
                            return fail(format!("sparse taps must lie in 1..={exact}, got {t}"));
                        }
                        max_taps = max_taps.max(t);
                    }
                }
                SolverKind::Hammerstein => {
                    if !has_taps_axis {
                        let Some(t) = solver.taps else {
                            return fail("solver `hammerstein` needs `taps`".into());
                        };
                        if t == 0 {
                            return fail("hammerstein taps must be >= 1".into());
                        }
                        max_taps = max_taps.max(t);
                    }
                }
                SolverKind::Full => {
                    if let Some(t) = solver.taps {
                        if t != exact {
                            return fail(format!(
                                "solver `full` uses every exact column ({} of them); taps {} disagrees",
                                exact, t
                            ));
                        }
                    }
                    max_taps = max_taps.max(exact);
                }
                SolverKind::Prior => {
                    let Some(cols) = prior_cols else {
                        return fail("solver `prior` is only defined for the imd scenario".into());
                    };
                    if let Some(t) = solver.taps {
                        if t != cols {
                            return fail(format!(
                                "solver `prior` has {} structural columns; taps {} disagrees",
                                cols, t
                            ));
                        }
                    }
                    max_taps = max_taps.max(cols);
                }
            }
        }
        if has_taps_axis {
            let axis_max = *self.sweep.taps.as_ref().unwrap().iter().max().unwrap();
            let has_sparse = self.solvers.iter().any(|s| s.kind == SolverKind::Sparse);
            if has_sparse && axis_max > exact {
                return fail(format!(
                    "taps sweep reaches {axis_max} but the exact dictionary has {exact} columns"
                ));
            }
            max_taps = max_taps.max(axis_max);
        }
        if self.block_size < max_taps.max(exact) {
            return fail(format!(
                "block_size {} is smaller than the largest dictionary ({})",
                self.block_size,
                max_taps.max(exact)
            ));
        }
        Ok(())
    }
}
