use std::fs;
use std::path::Path;

use super::config::{derive_seed, Algorithm, DatasetSpec, ExperimentConfig, InputScaling, ValidationScheme};
use super::tables::Summary;
use crate::data::{
    embed_series, gen_friedman1_opts, gen_friedman2, gen_friedman3, gen_ikeda, load_csv, MackeyGlass,
    RegressionDataset, SeriesEmbedding, Standardizer,
};
use crate::ensemble::{ensemble_predict, PredictionCube, Selection};
use crate::error::{invalid, Error, Result};
use crate::mlp::{predict_cube, train_with_snapshots, SnapshotStore, TrainConfig};
use crate::resample::{external_split, make_bootstrap_plan, oob_prediction_weights};
use crate::selectors::{member_order, Objective, SimAnnConfig};
use crate::weighting::{accuracy_diversity, nmse, weight_selection, EvalReport, WeightLaw};

const STREAM_DATA: u64 = 1;
const STREAM_TEST: u64 = 2;
const STREAM_SPLIT: u64 = 3;
const STREAM_BOOTSTRAP: u64 = 4;
const STREAM_ANNEAL: u64 = 5;
const STREAM_ORDER: u64 = 6;
const STREAM_MEMBER: u64 = 1000;

const IKEDA_BURN_IN: usize = 100;
const IKEDA_EMBEDDING: SeriesEmbedding = SeriesEmbedding {
    dimension: 5,
    lag: 1,
    horizon: 1,
};
const MACKEY_GLASS_EMBEDDING: SeriesEmbedding = SeriesEmbedding {
    dimension: 6,
    lag: 6,
    horizon: 6,
};

/// Data loaded once per experiment.
#[derive(Debug)]
enum Source {
    Generated,
    Table(RegressionDataset),
}

impl Source {
    fn open(cfg: &ExperimentConfig) -> Result<Self> {
        match &cfg.dataset {
            DatasetSpec::Csv { path, target_column } => {
                let data = load_csv(path, *target_column, false)?;
                if data.len() < cfg.train_size + cfg.test_size {
                    return Err(invalid(format!(
                        "{} has {} rows, {} + {} requested",
                        path.display(),
                        data.len(),
                        cfg.train_size,
                        cfg.test_size
                    )));
                }
                Ok(Self::Table(data))
            }
            _ => Ok(Self::Generated),
        }
    }

    /// Training set `D` and test set for one replication, before input scaling.
    fn draw(&self, cfg: &ExperimentConfig, run: usize) -> Result<(RegressionDataset, RegressionDataset)> {
        let (n, test) = (cfg.train_size, cfg.test_size);
        let seed = |s| derive_seed(cfg.seed, run, s);
        let noise = cfg.dataset.noise_spec(cfg.noise);
        match (&cfg.dataset, self) {
            (DatasetSpec::Friedman1 { pi }, _) => Ok((
                gen_friedman1_opts(n, noise, seed(STREAM_DATA), *pi)?,
                gen_friedman1_opts(test, noise, seed(STREAM_TEST), *pi)?,
            )),
            (DatasetSpec::Friedman2, _) => Ok((
                gen_friedman2(n, noise, seed(STREAM_DATA))?,
                gen_friedman2(test, noise, seed(STREAM_TEST))?,
            )),
            (DatasetSpec::Friedman3, _) => Ok((
                gen_friedman3(n, noise, seed(STREAM_DATA))?,
                gen_friedman3(test, noise, seed(STREAM_TEST))?,
            )),
            (DatasetSpec::Ikeda, _) => {
                let len = IKEDA_EMBEDDING.len_for(n + test);
                let series = gen_ikeda(len, IKEDA_BURN_IN, seed(STREAM_DATA))?;
                split_series(&series, IKEDA_EMBEDDING, n, "ikeda")
            }
            (DatasetSpec::MackeyGlass, _) => {
                let len = MACKEY_GLASS_EMBEDDING.len_for(n + test);
                let series = MackeyGlass::default().generate(len, seed(STREAM_DATA))?;
                split_series(&series, MACKEY_GLASS_EMBEDDING, n, "mackey-glass")
            }
            (DatasetSpec::Csv { .. }, Source::Table(all)) => {
                let mut idx: Vec<usize> = (0..all.len()).collect();
                use rand::seq::SliceRandom;
                use rand::SeedableRng;
                idx.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed(STREAM_DATA)));
                Ok((all.select(&idx[..n]), all.select(&idx[n..n + test])))
            }
            (DatasetSpec::Csv { .. }, Source::Generated) => unreachable!("csv source is loaded in open"),
        }
    }
}

/// Chronological split: the first `n` embedded rows train, the rest test.
fn split_series(
    series: &[f64],
    spec: SeriesEmbedding,
    n: usize,
    name: &str,
) -> Result<(RegressionDataset, RegressionDataset)> {
    let mut all = embed_series(series, spec)?;
    all.name = name.into();
    let idx: Vec<usize> = (0..all.len()).collect();
    Ok((all.select(&idx[..n]), all.select(&idx[n..])))
}

fn concat(a: &RegressionDataset, b: &RegressionDataset) -> Result<RegressionDataset> {
    let mut inputs = a.inputs().to_vec();
    inputs.extend_from_slice(b.inputs());
    let mut targets = a.targets().to_vec();
    targets.extend_from_slice(b.targets());
    RegressionDataset::new(a.name.clone(), a.dim(), inputs, targets)
}

/// Cubes of one replication. All three are slices of one prediction pass
/// over `D ∪ test`.
#[derive(Debug, Clone)]
pub struct Replication {
    pub run_id: usize,
    /// Points the selectors see: the validation set, or all of `D` with
    /// out-of-bag weights.
    pub selector_cube: PredictionCube,
    /// All of `D`, used for member weighting.
    pub data_cube: PredictionCube,
    pub test_cube: PredictionCube,
    /// Target variance of `D`.
    pub data_variance: f64,
    /// Members that diverged once and were retrained at half the learning rate.
    pub retrained: Vec<usize>,
}

fn train_member(cfg: &ExperimentConfig, data: &RegressionDataset, seed: u64) -> Result<(SnapshotStore, bool)> {
    let mut tc = TrainConfig {
        hidden_units: cfg.hidden_units,
        total_epochs: cfg.total_epochs,
        snapshot_count: cfg.snapshots,
        learning_rate: cfg.learning_rate,
        batch_mode: cfg.batch_mode,
        seed,
    };
    match train_with_snapshots(data, &tc) {
        Ok(store) => Ok((store, false)),
        Err(Error::Divergence { .. }) => {
            tc.learning_rate /= 2.0;
            Ok((train_with_snapshots(data, &tc)?, true))
        }
        Err(e) => Err(e),
    }
}

fn prepare_with(cfg: &ExperimentConfig, source: &Source, run: usize) -> Result<Replication> {
    let (mut data, mut test) = source.draw(cfg, run)?;
    let scaler = match cfg.input_scaling {
        InputScaling::None => None,
        InputScaling::UnitRange => Some(Standardizer::fit_unit_range(&data)),
        InputScaling::Standardize => Some(Standardizer::fit(&data)),
    };
    if let Some(s) = scaler {
        s.apply(&mut data);
        s.apply(&mut test);
    }
    let n = data.len();
    let m = cfg.members;

    // Training pool (indices into D) and, for external validation, the held-out part.
    let (pool, validation) = match cfg.validation {
        ValidationScheme::OutOfBag => ((0..n).collect::<Vec<_>>(), None),
        ValidationScheme::External(f) => {
            let (learn, val) = external_split(n, f, derive_seed(cfg.seed, run, STREAM_SPLIT))?;
            (learn, Some(val))
        }
    };
    let plan = make_bootstrap_plan(pool.len(), m, derive_seed(cfg.seed, run, STREAM_BOOTSTRAP))?;
    let mut stores = Vec::with_capacity(m);
    let mut retrained = Vec::new();
    for member in 0..m {
        let rows: Vec<usize> = plan.train_indices(member).iter().map(|&i| pool[i]).collect();
        let seed = derive_seed(cfg.seed, run, STREAM_MEMBER + member as u64);
        let (store, retried) = train_member(cfg, &data.select(&rows), seed)?;
        if retried {
            retrained.push(member);
        }
        stores.push(store);
    }

    let full = predict_cube(&stores, &concat(&data, &test)?)?;
    let data_idx: Vec<usize> = (0..n).collect();
    let test_idx: Vec<usize> = (n..n + test.len()).collect();
    let data_cube = full.select_points(&data_idx)?;
    let test_cube = full.select_points(&test_idx)?;
    let (selector_idx, selector_cube) = match validation {
        None => {
            let w = oob_prediction_weights(plan.gamma(), m)?;
            (data_idx, data_cube.clone().with_oob_weights(w)?)
        }
        Some(val) => (val.clone(), full.select_points(&val)?),
    };
    assert!(
        selector_idx.iter().all(|&i| i < n) && test_idx.iter().all(|&i| i >= n),
        "test points leaked into the selector slice"
    );
    Ok(Replication {
        run_id: run,
        selector_cube,
        data_cube,
        test_cube,
        data_variance: data.target_variance(),
        retrained,
    })
}

/// Draws data, trains the members and builds the cubes of replication `run`.
pub fn prepare_replication(cfg: &ExperimentConfig, run: usize) -> Result<Replication> {
    cfg.validate()?;
    prepare_with(cfg, &Source::open(cfg)?, run)
}

/// Reports and selections of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run_id: usize,
    pub reports: Vec<EvalReport>,
    pub selections: Vec<(String, Selection)>,
    /// Content hash of the cube every selector consumed.
    pub cube_hash: u64,
}

impl RunRecord {
    pub fn nmse_of(&self, algorithm: &str) -> Option<f64> {
        self.reports.iter().find(|r| r.algorithm == algorithm).map(|r| r.nmse)
    }
}

impl Replication {
    pub fn test_nmse(&self, sel: &Selection) -> Result<f64> {
        let pred = ensemble_predict(&self.test_cube, sel)?;
        nmse(&pred, self.test_cube.targets(), self.data_variance)
    }

    /// Selection chosen by `alg` (Single reports the Bagging snapshots).
    pub fn select(&self, cfg: &ExperimentConfig, alg: Algorithm, bagging: &Selection) -> Result<Selection> {
        let obj = Objective::new(&self.selector_cube, cfg.validation.mode())?;
        match alg {
            Algorithm::Single | Algorithm::Bagging => Ok(bagging.clone()),
            Algorithm::Epoch => obj.epoch(),
            Algorithm::NeuralBag => obj.neuralbag(),
            Algorithm::Seca => {
                let order_seed = cfg
                    .shuffle_seca_order
                    .then(|| derive_seed(cfg.seed, self.run_id, STREAM_ORDER));
                obj.seca(&member_order(cfg.members, order_seed))
            }
            Algorithm::SimAnn => {
                let sa = SimAnnConfig::for_snapshots(
                    cfg.snapshots,
                    cfg.anneal_sweeps,
                    derive_seed(cfg.seed, self.run_id, STREAM_ANNEAL),
                );
                obj.simann(&sa, bagging)
            }
        }
    }

    pub fn bagging(&self, cfg: &ExperimentConfig) -> Result<Selection> {
        Objective::new(&self.selector_cube, cfg.validation.mode())?.bagging()
    }

    /// Runs every configured selector and weighted variant.
    pub fn evaluate(&self, cfg: &ExperimentConfig) -> Result<RunRecord> {
        let hash = self.selector_cube.content_hash();
        let report = |algorithm: String, nmse: f64, decomposition: Option<(f64, f64)>| EvalReport {
            run_id: self.run_id,
            dataset: cfg.dataset.name(),
            noise: cfg.noise.to_string(),
            length: cfg.train_size,
            algorithm,
            nmse,
            mean_error: decomposition.map(|d| d.0),
            variance: decomposition.map(|d| d.1),
        };
        let bagging = self.bagging(cfg)?;
        let mut reports = Vec::new();
        let mut selections = Vec::new();
        for &alg in &cfg.selectors {
            let sel = self.select(cfg, alg, &bagging)?;
            assert_eq!(self.selector_cube.content_hash(), hash, "selector cube changed");
            if alg == Algorithm::Single {
                let m = cfg.members as f64;
                let mut mean = 0.0;
                for (n, &tau) in sel.tau().iter().enumerate() {
                    mean += nmse(self.test_cube.row(n, tau), self.test_cube.targets(), self.data_variance)? / m;
                }
                reports.push(report(alg.label().into(), mean, None));
                continue;
            }
            let (err, var) = accuracy_diversity(&self.test_cube, &sel)?;
            let scale = 1.0 / self.data_variance;
            reports.push(report(alg.label().into(), self.test_nmse(&sel)?, Some((err * scale, var * scale))));
            if let Some(w) = cfg.weighting.filter(|_| cfg.weighted.contains(&alg)) {
                let wsel = weight_selection(&sel, &self.data_cube, w.law, w.alpha)?;
                reports.push(report(alg.weighted_label(), self.test_nmse(&wsel)?, None));
                selections.push((alg.weighted_label(), wsel));
            }
            selections.push((alg.label().into(), sel));
        }
        Ok(RunRecord {
            run_id: self.run_id,
            reports,
            selections,
            cube_hash: hash,
        })
    }
}

/// Records of every replication and their summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub records: Vec<RunRecord>,
    pub summary: Summary,
}

/// Runs all replications of `cfg`, writing outputs under `cfg.out_dir` if set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let source = Source::open(cfg)?;
    let mut records = Vec::with_capacity(cfg.replications);
    for run in 0..cfg.replications {
        let rep = prepare_with(cfg, &source, run)?;
        let record = rep.evaluate(cfg)?;
        if let Some(dir) = &cfg.out_dir {
            persist_replication(dir, cfg, &rep, &record)?;
        }
        records.push(record);
    }
    let summary = Summary::from_records(cfg, &records)?;
    if let Some(dir) = &cfg.out_dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("config.txt"), cfg.to_kv())?;
        let reports: Vec<EvalReport> = records.iter().flat_map(|r| r.reports.clone()).collect();
        EvalReport::write_csv(&reports, fs::File::create(dir.join("runs.csv"))?)?;
        summary.write_dir(dir)?;
        super::tables::emit_tables(&summary, Some(dir))?;
    }
    Ok(ExperimentResult { records, summary })
}

fn persist_replication(dir: &Path, cfg: &ExperimentConfig, rep: &Replication, record: &RunRecord) -> Result<()> {
    let sel_dir = dir.join("selections");
    fs::create_dir_all(&sel_dir)?;
    for (name, sel) in &record.selections {
        fs::write(sel_dir.join(format!("run{:03}_{name}.txt", rep.run_id)), sel.to_text())?;
    }
    if cfg.save_cubes {
        let cube_dir = dir.join("cubes");
        fs::create_dir_all(&cube_dir)?;
        for (part, cube) in [
            ("selector", &rep.selector_cube),
            ("data", &rep.data_cube),
            ("test", &rep.test_cube),
        ] {
            let f = fs::File::create(cube_dir.join(format!("run{:03}_{part}.cube", rep.run_id)))?;
            cube.write_to(std::io::BufWriter::new(f))?;
        }
    }
    Ok(())
}

/// Test NMSE of the weighted base selection at each `(law, α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub law: WeightLaw,
    pub alpha: f64,
    pub mean_nmse: f64,
    pub per_run: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSweep {
    pub base: Algorithm,
    /// Unweighted test NMSE of the base selection per run.
    pub unweighted: Vec<f64>,
    pub points: Vec<SweepPoint>,
}

impl AlphaSweep {
    pub fn point(&self, law: WeightLaw, alpha: f64) -> Option<&SweepPoint> {
        self.points.iter().find(|p| p.law == law && p.alpha == alpha)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["algorithm", "law", "alpha", "mean_nmse"])?;
        for p in &self.points {
            w.write_record([
                self.base.weighted_label(),
                p.law.to_string(),
                format!("{}", p.alpha),
                format!("{}", p.mean_nmse),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Trains once per replication, then re-weights the `base` selection for
/// every `(law, α)`.
pub fn alpha_sweep(cfg: &ExperimentConfig, base: Algorithm, laws: &[WeightLaw], alphas: &[f64]) -> Result<AlphaSweep> {
    if alphas.is_empty() || laws.is_empty() {
        return Err(invalid("alpha sweep needs at least one law and one alpha"));
    }
    let reps = (0..cfg.replications)
        .map(|run| {
            let rep = prepare_replication(cfg, run)?;
            let bagging = rep.bagging(cfg)?;
            let sel = rep.select(cfg, base, &bagging)?;
            Ok((rep, sel))
        })
        .collect::<Result<Vec<_>>>()?;
    sweep_prepared(&reps, base, laws, alphas)
}

/// [`alpha_sweep`] over replications that are already trained.
pub fn sweep_prepared(
    reps: &[(Replication, Selection)],
    base: Algorithm,
    laws: &[WeightLaw],
    alphas: &[f64],
) -> Result<AlphaSweep> {
    if alphas.is_empty() || laws.is_empty() {
        return Err(invalid("alpha sweep needs at least one law and one alpha"));
    }
    let unweighted = reps
        .iter()
        .map(|(rep, sel)| rep.test_nmse(sel))
        .collect::<Result<Vec<_>>>()?;
    let mut points = Vec::new();
    for &law in laws {
        for &alpha in alphas {
            let per_run = reps
                .iter()
                .map(|(rep, sel)| rep.test_nmse(&weight_selection(sel, &rep.data_cube, law, alpha)?))
                .collect::<Result<Vec<_>>>()?;
            let mean_nmse = per_run.iter().sum::<f64>() / per_run.len() as f64;
            points.push(SweepPoint {
                law,
                alpha,
                mean_nmse,
                per_run,
            });
        }
    }
    Ok(AlphaSweep {
        base,
        unweighted,
        points,
    })
}
