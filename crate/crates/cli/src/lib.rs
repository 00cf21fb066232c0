//! Experiment runner comparing the infinite-population SGA over 𝔅_o with
//! finite populations under noisy fitness.
//!
//! Each experiment writes `ipsga2.csv`, `sfsga_mean.csv`, `sfsga_std.csv`,
//! `fvalues.csv` and `manifest.txt` into its output directory, plus
//! `rescue_report.csv` for presets 7 to 12. Re-running a manifest reproduces
//! every file byte for byte.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;

pub use config::{preset, resolve, ExperimentConfig, FValues, Overrides};
pub use error::{CliError, Result};
pub use experiment::{
    compute, read_manifest, resolve_fvalues, run_convergence_sweep, run_experiment,
    ExperimentResult, SweepAxis, SweepRow,
};
