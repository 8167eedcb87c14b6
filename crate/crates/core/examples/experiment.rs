//! A short replicated experiment with CSV and markdown output.
//!
//! `cargo run --release --example experiment -- /tmp/snapens-demo`

use snapens::harness::{emit_tables, run_experiment, DatasetSpec, ExperimentConfig, NoiseLevel};

fn main() -> snapens::Result<()> {
    let mut cfg = ExperimentConfig::for_dataset(DatasetSpec::Friedman2, NoiseLevel::Low, 50);
    cfg.members = 8;
    cfg.snapshots = 50;
    cfg.total_epochs = 500;
    cfg.test_size = 500;
    cfg.replications = 4;
    cfg.out_dir = std::env::args().nth(1).map(Into::into);

    let result = run_experiment(&cfg)?;
    for record in &result.records {
        let line: Vec<String> = record
            .reports
            .iter()
            .map(|r| format!("{} {:.4}", r.algorithm, r.nmse))
            .collect();
        println!("run {}: {}", record.run_id, line.join(", "));
    }
    print!("{}", emit_tables(&result.summary, None)?.markdown);
    Ok(())
}
