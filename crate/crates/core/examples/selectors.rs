//! Build a small snapshot ensemble and compare every selector on it.

use snapens::data::{gen_friedman1, NoiseSpec, Standardizer};
use snapens::ensemble::{ensemble_predict, ValidationMode};
use snapens::mlp::{predict_cube, train_with_snapshots, BatchMode, TrainConfig};
use snapens::resample::{make_bootstrap_plan, oob_prediction_weights};
use snapens::selectors::{member_order, Objective, SimAnnConfig};
use snapens::weighting::nmse;

fn main() -> snapens::Result<()> {
    let (m, t) = (8, 50);
    let mut data = gen_friedman1(100, NoiseSpec::GaussianSigma(1.0), 21)?;
    let mut test = gen_friedman1(1000, NoiseSpec::None, 22)?;
    let scaler = Standardizer::fit_unit_range(&data);
    scaler.apply(&mut data);
    scaler.apply(&mut test);

    let plan = make_bootstrap_plan(data.len(), m, 23)?;
    let stores = (0..m)
        .map(|k| {
            let cfg = TrainConfig {
                hidden_units: 10,
                total_epochs: 2000,
                snapshot_count: t,
                learning_rate: 0.005,
                batch_mode: BatchMode::PerPattern,
                seed: 100 + k as u64,
            };
            train_with_snapshots(&data.select(plan.train_indices(k)), &cfg)
        })
        .collect::<snapens::Result<Vec<_>>>()?;

    let cube = predict_cube(&stores, &data)?.with_oob_weights(oob_prediction_weights(plan.gamma(), m)?)?;
    let test_cube = predict_cube(&stores, &test)?;
    let var = test.target_variance();

    let obj = Objective::new(&cube, ValidationMode::OutOfBag)?;
    let bagging = obj.bagging()?;
    let runs = [
        ("Bagging", bagging.clone()),
        ("Epoch", obj.epoch()?),
        ("NeuralBAG", obj.neuralbag()?),
        ("SECA", obj.seca(&member_order(m, None))?),
        ("SimAnn", obj.simann(&SimAnnConfig::for_snapshots(t, 15, 5), &bagging)?),
    ];
    for (name, sel) in runs {
        let err = nmse(&ensemble_predict(&test_cube, &sel)?, test.targets(), var)?;
        println!("{name:<10} test NMSE {err:.4}  tau {:?}", sel.tau());
    }
    println!("objective evaluations so far: {}", obj.evaluations());
    Ok(())
}
