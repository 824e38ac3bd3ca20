//! Monte Carlo experiments: simulate, run every estimator on common draws,
//! and report bias and RMSE.

pub mod config;
pub mod run;
pub mod summary;

pub use config::{EstimatorKind, ExperimentConfig, Knowledge, OutputFormat};
pub use run::{run_experiment, run_rows, Cell, Experiment, ReplicationRow};
pub use summary::{emit, parse_csv, parse_json, write_summary, McSummary, SummaryRow};
