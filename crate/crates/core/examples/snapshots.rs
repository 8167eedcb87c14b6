//! Train one network, keep its snapshots and watch the held-out error.

use snapens::data::{gen_friedman1, NoiseSpec, Standardizer};
use snapens::mlp::{predict_cube, train_with_snapshots, BatchMode, TrainConfig};
use snapens::weighting::nmse;

fn main() -> snapens::Result<()> {
    let mut train = gen_friedman1(100, NoiseSpec::GaussianSigma(1.0), 7)?;
    let mut test = gen_friedman1(1000, NoiseSpec::None, 8)?;
    let scaler = Standardizer::fit_unit_range(&train);
    scaler.apply(&mut train);
    scaler.apply(&mut test);

    let cfg = TrainConfig {
        hidden_units: 10,
        total_epochs: 1000,
        snapshot_count: 20,
        learning_rate: 0.005,
        batch_mode: BatchMode::PerPattern,
        seed: 3,
    };
    let store = train_with_snapshots(&train, &cfg)?;
    let cube = predict_cube(std::slice::from_ref(&store), &test)?;
    let var = test.target_variance();

    println!("snapshot  epoch  train loss  test NMSE");
    for tau in 0..store.len() {
        let err = nmse(cube.row(0, tau), test.targets(), var)?;
        println!("{tau:>8} {:>6} {:>11.5} {err:>10.4}", store.epochs()[tau], store.train_losses()[tau]);
    }

    let mut bytes = Vec::new();
    store.write_to(&mut bytes)?;
    println!("store serializes to {} bytes", bytes.len());
    Ok(())
}
