//! Regression data sets: synthetic benchmark generators, chaotic time series,
//! delay embeddings and CSV ingestion.

mod csv_io;
mod dataset;
mod friedman;
mod series;

pub use csv_io::{load_csv, write_csv};
pub use dataset::{NoiseSpec, RegressionDataset, Standardizer};
pub use friedman::{
    friedman1_target, friedman2_target, friedman3_target, gen_friedman1, gen_friedman1_opts,
    gen_friedman2, gen_friedman3, noise_sigma_for_ratio, FriedmanKind,
};
pub use series::{
    embed_series, gen_ikeda, ikeda_orbit, ikeda_step, mackey_glass_rhs, MackeyGlass,
    SeriesEmbedding,
};
