//! Monte-Carlo experiment runner.
//!
//! A sweep iterates its axis points and, per point, runs `trials`
//! independent trials. Each trial generates fresh uplink blocks and chip
//! channels, synthesizes the distorted frame, and lets every configured
//! solver estimate and cancel the distortion. All randomness derives from
//! `(master_seed, point index, trial index, role)` through
//! [`crate::seed::child_seed`], so results do not depend on execution order
//! or thread count. One [`ResultRow`] is emitted per solver per trial;
//! solver or dictionary failures become rows with a diagnostic tag (and NaN
//! power fields in the CSV) rather than aborting the sweep.

use rayon::prelude::*;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::canceller::{make_report, reconstruct};
use crate::dictionary::{build_dictionary, Dictionary, Lengths, ModelKind};
use crate::distortion::{hd_distortion, imd_distortion, make_frame, ReceiveFrame};
use crate::error::{Error, Result};
use crate::harness::channel::random_channel;
use crate::harness::config::{ScenarioConfig, ScenarioKind, SolverKind, SolverSpec};
use crate::seed::{child_seed, role};
use crate::signal::{fir_filter, generate_block, BasebandSignal, PowerLevel};

/// Exact CSV header of the per-trial results file.
pub const ROWS_HEADER: &str =
    "scenario,solver,J,P_s_dbm,trial,original_dbm,residual_dbm,suppression_db,seed";
/// Exact CSV header of the aggregate file.
pub const AGGREGATE_HEADER: &str = "scenario,solver,J,P_s_dbm,metric,value";

/// One solver result on one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: ScenarioKind,
    pub solver: String,
    pub taps: usize,
    pub signal_power_dbm: f64,
    pub trial: usize,
    pub original_dbm: f64,
    pub residual_dbm: f64,
    pub suppression_db: f64,
    pub seed: u64,
    /// Diagnostic tag when the solver or dictionary failed; the three power
    /// fields are NaN in that case.
    pub failure: Option<String>,
}

impl ResultRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.scenario,
            self.solver,
            self.taps,
            self.signal_power_dbm,
            self.trial,
            self.original_dbm,
            self.residual_dbm,
            self.suppression_db,
            self.seed
        )
    }
}

/// One aggregate statistic for a (sweep point, solver) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub scenario: ScenarioKind,
    pub solver: String,
    pub taps: usize,
    pub signal_power_dbm: f64,
    pub metric: &'static str,
    pub value: f64,
}

impl AggregateRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.scenario, self.solver, self.taps, self.signal_power_dbm, self.metric, self.value
        )
    }
}

/// Rows plus aggregates of a completed sweep, in output order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<ResultRow>,
    pub aggregates: Vec<AggregateRow>,
}

impl SweepOutput {
    pub fn rows_csv(&self) -> String {
        let mut out = String::from(ROWS_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv_line());
            out.push('\n');
        }
        out
    }

    pub fn aggregates_csv(&self) -> String {
        let mut out = String::from(AGGREGATE_HEADER);
        out.push('\n');
        for row in &self.aggregates {
            out.push_str(&row.csv_line());
            out.push('\n');
        }
        out
    }
}

/// Everything shared by the solvers within one trial.
struct TrialContext {
    frame: ReceiveFrame,
    uplink_1: BasebandSignal,
    uplink_2: Option<BasebandSignal>,
    /// Built once when any solver wants the exact dictionary; kept as a
    /// result so a failure taints only the solvers that need it.
    exact_dict: Option<std::result::Result<Dictionary, String>>,
}

fn build_trial_context(
    cfg: &ScenarioConfig,
    signal_power_dbm: f64,
    trial_seed: u64,
) -> Result<TrialContext> {
    let spec = cfg.distortion_spec()?;
    let len = cfg.block_size;
    let kind = cfg.signal_kind;

    let channel_seed = |role_tag: u64| {
        if cfg.fixed_channel {
            child_seed(cfg.master_seed, &[role_tag])
        } else {
            child_seed(trial_seed, &[role_tag])
        }
    };

    let uplink_1 = generate_block(len, kind, child_seed(trial_seed, &[role::UPLINK_1]))?;
    let channel_1 = random_channel(
        cfg.true_lengths[0],
        cfg.channel_decay,
        channel_seed(role::CHANNEL_1),
    )?;
    let leaked_1 = fir_filter(&uplink_1, &channel_1);

    let (raw_distortion, uplink_2) = match cfg.scenario {
        ScenarioKind::Hd => (hd_distortion(&leaked_1, &spec)?, None),
        ScenarioKind::Imd => {
            let uplink_2 = generate_block(len, kind, child_seed(trial_seed, &[role::UPLINK_2]))?;
            let channel_2 = random_channel(
                cfg.true_lengths[1],
                cfg.channel_decay,
                channel_seed(role::CHANNEL_2),
            )?;
            let leaked_2 = fir_filter(&uplink_2, &channel_2);
            (imd_distortion(&leaked_1, &leaked_2, &spec)?, Some(uplink_2))
        }
    };

    let frame = make_frame(
        &raw_distortion,
        PowerLevel::dbm(cfg.distortion_dbm),
        PowerLevel::dbm(signal_power_dbm),
        cfg.inr_db,
        child_seed(trial_seed, &[role::FRAME]),
    )?;

    let needs_exact = cfg
        .solvers
        .iter()
        .any(|s| matches!(s.kind, SolverKind::Sparse | SolverKind::Full));
    let exact_dict = needs_exact.then(|| {
        let lengths = match cfg.scenario {
            ScenarioKind::Hd => Lengths::Single(cfg.model_lengths[0]),
            ScenarioKind::Imd => Lengths::Pair(cfg.model_lengths[0], cfg.model_lengths[1]),
        };
        build_dictionary(
            ModelKind::Exact,
            &uplink_1,
            uplink_2.as_ref(),
            &spec,
            lengths,
        )
        .map_err(|e| e.to_string())
    });

    Ok(TrialContext {
        frame,
        uplink_1,
        uplink_2,
        exact_dict,
    })
}

fn run_solver(
    cfg: &ScenarioConfig,
    ctx: &TrialContext,
    solver: &SolverSpec,
    taps_override: Option<usize>,
) -> std::result::Result<(usize, f64, f64, f64), String> {
    let err_str = |e: Error| e.to_string();
    let taps = cfg.solver_taps(solver, taps_override).map_err(err_str)?;
    let spec = cfg.distortion_spec().map_err(err_str)?;

    let built;
    let dict: &Dictionary = match solver.kind {
        SolverKind::Sparse | SolverKind::Full => match ctx.exact_dict.as_ref().unwrap() {
            Ok(d) => d,
            Err(tag) => return Err(tag.clone()),
        },
        SolverKind::Prior => {
            built = build_dictionary(
                ModelKind::PriorArt,
                &ctx.uplink_1,
                ctx.uplink_2.as_ref(),
                &spec,
                Lengths::Pair(cfg.model_lengths[0], cfg.model_lengths[1]),
            )
            .map_err(err_str)?;
            &built
        }
        SolverKind::Hammerstein => {
            built = build_dictionary(
                ModelKind::Hammerstein,
                &ctx.uplink_1,
                ctx.uplink_2.as_ref(),
                &spec,
                Lengths::Single(taps),
            )
            .map_err(err_str)?;
            &built
        }
    };

    let coefficients = match solver.kind {
        SolverKind::Sparse => {
            crate::solvers::omp_solve(dict, &ctx.frame.observed, taps)
                .map_err(err_str)?
                .coefficients
        }
        _ => {
            crate::solvers::lls_solve(dict, &ctx.frame.observed)
                .map_err(err_str)?
                .coefficients
        }
    };
    let estimate = reconstruct(dict, &coefficients).map_err(err_str)?;
    let report = make_report(&ctx.frame, &estimate, solver.kind.id(), taps).map_err(err_str)?;
    Ok((
        taps,
        report.original_distortion_dbm.value_dbm(),
        report.residual_distortion_dbm.value_dbm(),
        report.suppression_db,
    ))
}

/// Run one trial at one sweep point: one row per configured solver, in
/// config order. Failures are recorded in the rows, not propagated.
pub fn run_trial(cfg: &ScenarioConfig, point_index: usize, trial: usize) -> Vec<ResultRow> {
    let points = cfg.sweep_points();
    let (signal_power_dbm, taps_override) = points[point_index];
    let trial_seed = child_seed(cfg.master_seed, &[point_index as u64, trial as u64]);

    let ctx = build_trial_context(cfg, signal_power_dbm, trial_seed);
    cfg.solvers
        .iter()
        .map(|solver| {
            let outcome = match &ctx {
                Ok(ctx) => run_solver(cfg, ctx, solver, taps_override),
                Err(e) => Err(e.to_string()),
            };
            let taps_guess = cfg.solver_taps(solver, taps_override).unwrap_or(0);
            match outcome {
                Ok((taps, original, residual, suppression)) => ResultRow {
                    scenario: cfg.scenario,
                    solver: solver.kind.id().to_string(),
                    taps,
                    signal_power_dbm,
                    trial,
                    original_dbm: original,
                    residual_dbm: residual,
                    suppression_db: suppression,
                    seed: trial_seed,
                    failure: None,
                },
                Err(tag) => ResultRow {
                    scenario: cfg.scenario,
                    solver: solver.kind.id().to_string(),
                    taps: taps_guess,
                    signal_power_dbm,
                    trial,
                    original_dbm: f64::NAN,
                    residual_dbm: f64::NAN,
                    suppression_db: f64::NAN,
                    seed: trial_seed,
                    failure: Some(tag),
                },
            }
        })
        .collect()
}

/// Median of already-finite values; the caller guarantees `values` nonempty.
fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn aggregate(cfg: &ScenarioConfig, rows: &[ResultRow]) -> Vec<AggregateRow> {
    let mut out = Vec::new();
    for &(signal_power_dbm, taps_override) in &cfg.sweep_points() {
        for solver in &cfg.solvers {
            let id = solver.kind.id();
            let taps = cfg.solver_taps(solver, taps_override).unwrap_or(0);
            let cell: Vec<&ResultRow> = rows
                .iter()
                .filter(|r| {
                    r.solver == id && r.signal_power_dbm == signal_power_dbm && r.taps == taps
                })
                .collect();
            let mut residuals: Vec<f64> = cell
                .iter()
                .filter(|r| r.failure.is_none())
                .map(|r| r.residual_dbm)
                .collect();
            let (med, mean) = if residuals.is_empty() {
                (f64::NAN, f64::NAN)
            } else {
                let mean = residuals.iter().sum::<f64>() / residuals.len() as f64;
                (median(&mut residuals), mean)
            };
            out.push(AggregateRow {
                scenario: cfg.scenario,
                solver: id.to_string(),
                taps,
                signal_power_dbm,
                metric: "median_residual_dbm",
                value: med,
            });
            out.push(AggregateRow {
                scenario: cfg.scenario,
                solver: id.to_string(),
                taps,
                signal_power_dbm,
                metric: "mean_residual_dbm",
                value: mean,
            });
        }
    }
    out
}

/// Run the whole sweep in memory. `threads` bounds the worker pool; `None`
/// uses the process-global default. Output row order is
/// (sweep point, trial, solver) regardless of parallelism.
pub fn run_sweep(cfg: &ScenarioConfig, threads: Option<usize>) -> Result<SweepOutput> {
    cfg.validate()?;
    let points = cfg.sweep_points();
    let tasks: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..cfg.trials).map(move |t| (p, t)))
        .collect();

    let run_all = || -> Vec<Vec<ResultRow>> {
        tasks
            .par_iter()
            .map(|&(point, trial)| run_trial(cfg, point, trial))
            .collect()
    };
    let nested: Vec<Vec<ResultRow>> = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(run_all),
        None => run_all(),
    };
    let rows: Vec<ResultRow> = nested.into_iter().flatten().collect();
    let aggregates = aggregate(cfg, &rows);
    Ok(SweepOutput { rows, aggregates })
}

/// Path of the aggregate file for a given rows path: `<out>.agg.csv`.
pub fn aggregate_path(out: &Path) -> std::path::PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".agg.csv");
    std::path::PathBuf::from(name)
}

/// Run a sweep and write both CSV files. The output paths are opened before
/// any computation so an unwritable destination fails fast.
pub fn run_sweep_to_files(
    cfg: &ScenarioConfig,
    out: &Path,
    threads: Option<usize>,
) -> Result<SweepOutput> {
    cfg.validate()?;
    let rows_file = File::create(out)?;
    let agg_file = File::create(aggregate_path(out))?;

    let output = run_sweep(cfg, threads)?;

    let mut w = BufWriter::new(rows_file);
    w.write_all(output.rows_csv().as_bytes())?;
    w.flush()?;
    let mut w = BufWriter::new(agg_file);
    w.write_all(output.aggregates_csv().as_bytes())?;
    w.flush()?;

    // failures are diagnostics, not row data; surface them on stderr
    for row in output.rows.iter().filter(|r| r.failure.is_some()) {
        eprintln!(
            "warning: {} trial {} (P_s = {} dBm): {}",
            row.solver,
            row.trial,
            row.signal_power_dbm,
            row.failure.as_deref().unwrap_or("")
        );
    }
    Ok(output)
}
