//! Experiment harness for `sparsedepth`: configuration parsing, Monte-Carlo trials,
//! parameter sweeps, convergence traces and an interpolation baseline.

pub mod baseline;
pub mod config;
pub mod error;
pub mod experiment;

pub use config::{ExperimentConfig, Input, Method, SweepParam, SweepSpec};
pub use error::{BenchError, BenchResult};
pub use experiment::{
    emit_convergence, level_spans, run_experiment, run_sweep, run_trial, ExperimentResult, LevelSpan, Stat, Summary,
    SweepRow, TrialOutcome, TrialRow,
};
