//! Test NMSE of weighted SECA as the weighting exponent grows.

use snapens::harness::{alpha_sweep, Algorithm, DatasetSpec, ExperimentConfig, NoiseLevel};
use snapens::weighting::WeightLaw;

fn main() -> snapens::Result<()> {
    let mut cfg = ExperimentConfig::for_dataset(DatasetSpec::Friedman1 { pi: false }, NoiseLevel::High, 100);
    cfg.members = 8;
    cfg.snapshots = 50;
    cfg.total_epochs = 500;
    cfg.test_size = 500;
    cfg.replications = 3;

    let alphas = [0.0, 1.0, 2.0, 5.0, 10.0];
    let sweep = alpha_sweep(&cfg, Algorithm::Seca, &[WeightLaw::Power, WeightLaw::Exp], &alphas)?;
    let base = sweep.unweighted.iter().sum::<f64>() / sweep.unweighted.len() as f64;
    println!("unweighted SECA {base:.4}");
    for p in &sweep.points {
        println!("{:<5} alpha {:>4}: {:.4}", p.law.to_string(), p.alpha, p.mean_nmse);
    }
    sweep.write_csv(std::io::stdout())
}
