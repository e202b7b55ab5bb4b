//! Experiment harness: configuration, file formats, parallel runs, ground truth and reports.

pub mod config;
pub mod io;
pub mod report;
pub mod runner;
pub mod synth;
pub mod truth;

pub use config::{BudgetMode, ExperimentConfig, Target, TargetConfig};
pub use report::{aggregate, survival_table, AggregateOptions, SummaryRow, SurvivalRow};
pub use runner::{derive_seeds, run_coupled, run_naive, CoupledOutput, NaiveBudget, NaiveRecord, RunOptions, WallTimeRow};
pub use truth::{ground_truth, GroundTruth, TruthSource};
