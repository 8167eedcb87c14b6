//! Single-hidden-layer tanh perceptrons trained by gradient descent with
//! periodic parameter snapshots.

mod params;
pub(crate) mod store;
mod train;

pub use params::MlpParams;
pub use store::SnapshotStore;
pub use train::{predict_cube, train_with_snapshots, BatchMode, TrainConfig};
