//! Neural-network regression ensembles built from training snapshots.
//!
//! Each ensemble member is a single-hidden-layer perceptron trained on a
//! bootstrap re-sample while `T` intermediate parameter states are kept.
//! Building an ensemble then reduces to picking one snapshot per member, and
//! this crate provides five ways to do it:
//!
//! - **Bagging**: every member stopped at its own validation minimum.
//! - **Epoch**: one common stopping snapshot minimizing the ensemble error.
//! - **NeuralBAG**: member `n` stopped where the whole ensemble (all members at
//!   the same snapshot) does best on the member's out-of-bag patterns.
//! - **SECA**: members added one at a time, each stopped where the growing
//!   simple average does best ("late stopping").
//! - **SimAnn**: simulated annealing over the vector of stopping snapshots.
//!
//! Any selection can be re-weighted by a decreasing function of each
//! member's error over the data set (W-Bagging, W-SECA, W-SimAnn).
//!
//! The [`harness`] module wires everything into replicated experiments on the
//! synthetic benchmarks in [`data`] and writes CSV and markdown result tables.
//!
//! ```
//! use snapens::ensemble::{PredictionCube, ValidationMode};
//! use snapens::selectors;
//!
//! // 2 members, 3 snapshots, 2 points.
//! let cube = PredictionCube::new(
//!     2,
//!     3,
//!     2,
//!     vec![
//!         0.0, 0.0, 0.5, 0.5, 1.0, 1.0, // member 0
//!         2.0, 2.0, 1.5, 1.5, 1.2, 1.2, // member 1
//!     ],
//!     vec![1.0, 1.0],
//! )
//! .unwrap();
//! let sel = selectors::select_bagging(&cube, ValidationMode::External).unwrap();
//! assert_eq!(sel.tau(), &[2, 2]);
//! ```

pub mod data;
pub mod ensemble;
pub mod error;
pub mod harness;
pub mod mlp;
pub mod resample;
pub mod selectors;
pub mod weighting;

pub use error::{Error, Result};
