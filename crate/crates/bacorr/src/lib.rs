//! Experiment harness around `bacorr-core`: sweep configuration and
//! execution, result files, convergence diagnostics, graph dumps and the
//! asymptotic-estimate table.

pub mod config;
pub mod diagnostic;
pub mod dump;
pub mod results;
pub mod sweep;
pub mod theory_table;

pub use config::{ConfigError, Density, ExperimentConfig};
pub use diagnostic::{convergence_diagnostic, Classification, Diagnostic, DiagnosticError};
pub use results::{read_csv, write_csv, CsvError, SweepResult, SweepRow};
pub use sweep::{run_replicate, run_sweep, Case, SweepError, SweepOptions, SweepOutcome};
