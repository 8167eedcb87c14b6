use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{MlpParams, SnapshotStore};
use crate::data::RegressionDataset;
use crate::ensemble::PredictionCube;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BatchMode {
    /// One step per epoch along the mean gradient over all patterns.
    FullBatch,
    /// One step per pattern, patterns visited in a fresh random order each epoch.
    PerPattern,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub hidden_units: usize,
    pub total_epochs: usize,
    /// Snapshots kept, evenly spaced; must divide `total_epochs`.
    pub snapshot_count: usize,
    pub learning_rate: f64,
    pub batch_mode: BatchMode,
    pub seed: u64,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_units == 0 {
            return Err(invalid("hidden units must be >= 1"));
        }
        if self.snapshot_count == 0 || self.total_epochs == 0 {
            return Err(invalid("epochs and snapshot count must be >= 1"));
        }
        if !self.total_epochs.is_multiple_of(self.snapshot_count) {
            return Err(invalid(format!(
                "total epochs {} not divisible by snapshot count {}",
                self.total_epochs, self.snapshot_count
            )));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(invalid("learning rate must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Trains one network on `data`, keeping `snapshot_count` parameter states.
///
/// Targets are standardized with the mean and deviation of `data`; the
/// returned store maps network outputs back to target units. The objective is
/// the mean of `½(f(x) − t)²` over patterns (in standardized units).
pub fn train_with_snapshots(data: &RegressionDataset, cfg: &TrainConfig) -> Result<SnapshotStore> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(invalid("training set is empty"));
    }
    let d = data.dim();
    let n = data.len();
    let target_mean = data.targets().iter().sum::<f64>() / n as f64;
    let var = data
        .targets()
        .iter()
        .map(|t| (t - target_mean) * (t - target_mean))
        .sum::<f64>()
        / n as f64;
    let target_scale = if var > 0.0 { var.sqrt() } else { 1.0 };
    let targets: Vec<f64> = data
        .targets()
        .iter()
        .map(|t| (t - target_mean) / target_scale)
        .collect();

    let mut params = MlpParams::init(d, cfg.hidden_units, cfg.seed)?;
    let mut grad = MlpParams::zeros(d, cfg.hidden_units);
    let mut act = vec![0.0; cfg.hidden_units];
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);

    let stride = cfg.total_epochs / cfg.snapshot_count;
    let mut store = SnapshotStore::empty(d, cfg.hidden_units, target_mean, target_scale);
    for epoch in 1..=cfg.total_epochs {
        match cfg.batch_mode {
            BatchMode::PerPattern => {
                order.shuffle(&mut rng);
                for &i in &order {
                    grad.clear();
                    let r = params.accumulate_gradient(data.row(i), targets[i], 1.0, &mut grad, &mut act);
                    if !r.is_finite() {
                        return Err(Error::Divergence { epoch, loss: r * r });
                    }
                    params.step(&grad, cfg.learning_rate);
                }
            }
            BatchMode::FullBatch => {
                grad.clear();
                let scale = 1.0 / n as f64;
                let mut sse = 0.0;
                for (i, t) in targets.iter().enumerate() {
                    let r = params.accumulate_gradient(data.row(i), *t, scale, &mut grad, &mut act);
                    sse += r * r;
                }
                if !sse.is_finite() {
                    return Err(Error::Divergence { epoch, loss: sse / n as f64 });
                }
                params.step(&grad, cfg.learning_rate);
            }
        }
        if epoch % stride == 0 {
            let mse = data
                .rows()
                .zip(data.targets())
                .map(|(x, t)| {
                    let r = target_mean + target_scale * params.forward_unchecked(x) - t;
                    r * r
                })
                .sum::<f64>()
                / n as f64;
            if !mse.is_finite() || !params.is_finite() {
                return Err(Error::Divergence { epoch, loss: mse });
            }
            store.push(epoch, params.clone(), mse);
        }
    }
    Ok(store)
}

/// Predictions of every snapshot of every store on every point of `points`.
pub fn predict_cube(stores: &[SnapshotStore], points: &RegressionDataset) -> Result<PredictionCube> {
    let first = stores.first().ok_or_else(|| invalid("no snapshot stores"))?;
    let t = first.len();
    for s in stores {
        if s.dim() != points.dim() {
            return Err(Error::DimensionMismatch {
                expected: s.dim(),
                got: points.dim(),
            });
        }
        if s.len() != t {
            return Err(invalid("stores hold different snapshot counts"));
        }
    }
    let p = points.len();
    let mut values = Vec::with_capacity(stores.len() * t * p);
    for store in stores {
        for tau in 0..t {
            values.extend(points.rows().map(|x| store.predict_unchecked(tau, x)));
        }
    }
    PredictionCube::new(stores.len(), t, p, values, points.targets().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{gen_friedman1, NoiseSpec};
    use rand::Rng;

    fn cfg(lr: f64, mode: BatchMode) -> TrainConfig {
        TrainConfig {
            hidden_units: 3,
            total_epochs: 40,
            snapshot_count: 8,
            learning_rate: lr,
            batch_mode: mode,
            seed: 5,
        }
    }

    #[test]
    fn zero_learning_rate_keeps_init() {
        let data = gen_friedman1(30, NoiseSpec::None, 1).unwrap();
        for mode in [BatchMode::FullBatch, BatchMode::PerPattern] {
            let store = train_with_snapshots(&data, &cfg(0.0, mode)).unwrap();
            let init = MlpParams::init(10, 3, 5).unwrap();
            assert_eq!(store.len(), 8);
            assert!(store.snapshots().iter().all(|s| *s == init));
        }
    }

    #[test]
    fn snapshot_epochs_are_even_and_end_at_total() {
        let data = gen_friedman1(10, NoiseSpec::None, 1).unwrap();
        let store = train_with_snapshots(&data, &cfg(0.01, BatchMode::FullBatch)).unwrap();
        assert_eq!(store.epochs(), &[5, 10, 15, 20, 25, 30, 35, 40]);
        assert!(store.epochs().windows(2).all(|w| w[0] < w[1]));
        let bad = TrainConfig { total_epochs: 41, ..cfg(0.01, BatchMode::FullBatch) };
        assert!(train_with_snapshots(&data, &bad).is_err());
    }

    #[test]
    fn single_pattern_loss_decreases() {
        let data = RegressionDataset::new("one", 2, vec![0.1, -0.2], vec![0.7]).unwrap();
        let c = TrainConfig {
            hidden_units: 2,
            total_epochs: 50,
            snapshot_count: 5,
            learning_rate: 0.05,
            batch_mode: BatchMode::FullBatch,
            seed: 3,
        };
        // Single pattern has zero target variance: scale 1, mean 0.7.
        let store = train_with_snapshots(&data, &c).unwrap();
        let losses = store.train_losses();
        assert!(losses[4] < losses[0], "{losses:?}");
    }

    #[test]
    fn constant_targets_converge() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let inputs: Vec<f64> = (0..40).map(|_| rng.random_range(-1.0..1.0)).collect();
        let data = RegressionDataset::new("const", 2, inputs, vec![3.0; 20]).unwrap();
        let c = TrainConfig {
            hidden_units: 1,
            total_epochs: 4000,
            snapshot_count: 10,
            learning_rate: 0.3,
            batch_mode: BatchMode::FullBatch,
            seed: 4,
        };
        let store = train_with_snapshots(&data, &c).unwrap();
        assert!(*store.train_losses().last().unwrap() < 1e-4, "{:?}", store.train_losses());
    }

    #[test]
    fn divergence_reports_epoch() {
        let data = gen_friedman1(30, NoiseSpec::None, 1).unwrap();
        let c = TrainConfig {
            hidden_units: 4,
            total_epochs: 100,
            snapshot_count: 10,
            learning_rate: 1e6,
            batch_mode: BatchMode::FullBatch,
            seed: 1,
        };
        match train_with_snapshots(&data, &c) {
            Err(Error::Divergence { epoch, .. }) => assert!(epoch >= 1 && epoch <= 100),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn training_is_deterministic() {
        let data = gen_friedman1(25, NoiseSpec::GaussianSigma(1.0), 3).unwrap();
        let a = train_with_snapshots(&data, &cfg(0.02, BatchMode::PerPattern)).unwrap();
        let b = train_with_snapshots(&data, &cfg(0.02, BatchMode::PerPattern)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cube_matches_direct_forward() {
        let data = gen_friedman1(30, NoiseSpec::None, 1).unwrap();
        let stores: Vec<_> = (0..3)
            .map(|s| {
                let c = TrainConfig { seed: s, ..cfg(0.02, BatchMode::PerPattern) };
                train_with_snapshots(&data, &c).unwrap()
            })
            .collect();
        let points = gen_friedman1(12, NoiseSpec::None, 2).unwrap();
        let cube = predict_cube(&stores, &points).unwrap();
        assert_eq!((cube.members(), cube.snapshots(), cube.points()), (3, 8, 12));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            let (n, tau, p) = (rng.random_range(0..3), rng.random_range(0..8), rng.random_range(0..12));
            let s = &stores[n];
            let direct = s.target_mean()
                + s.target_scale() * s.snapshots()[tau].forward(points.row(p)).unwrap();
            assert_eq!(cube.value(n, tau, p), direct);
        }

        let one = predict_cube(&stores[..1], &points.select(&[0])).unwrap();
        assert_eq!(one.value(0, 0, 0), stores[0].predict(0, points.row(0)).unwrap());

        let wrong = gen_friedman1(3, NoiseSpec::None, 2).unwrap();
        let wrong = RegressionDataset::new("w", 5, wrong.inputs()[..15].to_vec(), vec![0.0; 3]).unwrap();
        assert!(predict_cube(&stores, &wrong).is_err());
    }
}
