//! Configuration-driven Monte-Carlo experiments with deterministic seeding
//! and CSV output.

pub mod channel;
pub mod config;
pub mod runner;

pub use channel::random_channel;
pub use config::{ScenarioConfig, ScenarioKind, SolverKind, SolverSpec, SweepSpec};
pub use runner::{
    aggregate_path, run_sweep, run_sweep_to_files, run_trial, AggregateRow, ResultRow, SweepOutput,
    AGGREGATE_HEADER, ROWS_HEADER,
};
