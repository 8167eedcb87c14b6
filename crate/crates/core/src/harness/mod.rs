//! Replicated experiments: data draws, member training, every selector on a
//! shared cube, weighted variants, summaries and tables.

mod config;
mod run;
mod tables;

pub use config::{
    derive_seed, reference_architecture, Algorithm, DatasetSpec, ExperimentConfig, InputScaling, NoiseLevel,
    ValidationScheme, Weighting,
};
pub use run::{
    alpha_sweep, prepare_replication, run_experiment, sweep_prepared, AlphaSweep, ExperimentResult, Replication,
    RunRecord, SweepPoint,
};
pub use tables::{emit_tables, SignRow, Summary, SummaryRow, Tables};
