//! Configuration, sweep execution, record files and comparison reports.

pub mod compare;
pub mod config;
pub mod records;
pub mod sweep;

pub use compare::{compare, render_table, summarize};
pub use config::{ExperimentConfig, Regime};
pub use records::{read_records, CompareRow, Record, Summary, TrialRecord};
pub use sweep::{run_sweep, Prepared, SweepOutcome};
