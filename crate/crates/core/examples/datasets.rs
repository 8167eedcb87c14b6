//! Generate each benchmark and print its shape and target spread.

use snapens::data::{
    embed_series, gen_friedman1, gen_friedman2, gen_friedman3, gen_ikeda, MackeyGlass, NoiseSpec,
    RegressionDataset, SeriesEmbedding,
};

fn show(name: &str, d: &RegressionDataset) {
    println!(
        "{name:<14} n={:<5} dim={:<2} var(y)={:.4}  first row {:?} -> {:.4}",
        d.len(),
        d.dim(),
        d.target_variance(),
        d.row(0).iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
        d.targets()[0]
    );
}

fn main() -> snapens::Result<()> {
    show("friedman1", &gen_friedman1(200, NoiseSpec::GaussianSigma(1.0), 1)?);
    show("friedman2", &gen_friedman2(200, NoiseSpec::NoiseToSignal(1.0 / 9.0), 1)?);
    show("friedman3", &gen_friedman3(200, NoiseSpec::NoiseToSignal(1.0 / 3.0), 1)?);

    let ikeda = gen_ikeda(205, 100, 1)?;
    let spec = SeriesEmbedding { dimension: 5, lag: 1, horizon: 1 };
    show("ikeda", &embed_series(&ikeda, spec)?);

    let spec = SeriesEmbedding { dimension: 6, lag: 6, horizon: 6 };
    let mg = MackeyGlass::default().generate(spec.len_for(300), 1)?;
    show("mackey-glass", &embed_series(&mg, spec)?);
    Ok(())
}
