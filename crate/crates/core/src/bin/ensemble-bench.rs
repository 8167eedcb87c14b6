//! Command-line runner for snapshot-ensemble experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use snapens::harness::{self, Algorithm, ExperimentConfig, Summary};
use snapens::weighting::WeightLaw;

#[derive(Parser)]
#[command(name = "ensemble-bench", version, about = "Snapshot-ensemble selection benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train, select and evaluate over all replications.
    Run(ExperimentArgs),
    /// Test NMSE of a weighted selector across weighting exponents.
    SweepAlpha {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Comma-separated exponents.
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2,5,10,20")]
        alphas: Vec<f64>,
        /// Comma-separated laws (power, exp).
        #[arg(long, value_delimiter = ',', default_value = "power,exp")]
        laws: Vec<String>,
        /// Selector whose members are re-weighted.
        #[arg(long, default_value = "SECA")]
        base: String,
    },
    /// Merge summaries from run directories into one set of tables.
    Tables {
        /// Directories written by `run`.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// key = value file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// friedman1|friedman2|friedman3|ikeda|mackey-glass|<file>.csv
    #[arg(long)]
    dataset: Option<String>,
    /// free|low|high
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    train_size: Option<usize>,
    /// external20|external37|oob
    #[arg(long)]
    validation: Option<String>,
    /// Comma-separated, or `all`.
    #[arg(long)]
    selectors: Option<String>,
    /// law:alpha, or `none`.
    #[arg(long)]
    weighting: Option<String>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Published architecture, test size, M, T and annealing length.
    #[arg(long)]
    paper_defaults: bool,
    /// With --paper-defaults: 50 replications.
    #[arg(long)]
    full: bool,
    /// Extra key=value overrides.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

impl ExperimentArgs {
    fn build(&self) -> snapens::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let size_given = self.train_size.is_some() || self.dataset.is_some();
        let flags = [
            ("dataset", self.dataset.clone()),
            ("noise", self.noise.clone()),
            ("train_size", self.train_size.map(|n| n.to_string())),
            ("validation", self.validation.clone()),
            ("selectors", self.selectors.clone()),
            ("weighting", self.weighting.clone()),
            ("reps", self.reps.map(|n| n.to_string())),
            ("seed", self.seed.map(|n| n.to_string())),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        if size_given && !self.paper_defaults {
            if let Some((h, test)) = harness::reference_architecture(&cfg.dataset, cfg.train_size) {
                cfg.hidden_units = h;
                cfg.test_size = test;
            }
        }
        if self.paper_defaults {
            cfg.apply_paper_defaults(self.full)?;
            if let Some(reps) = self.reps {
                cfg.replications = reps;
            }
        }
        for kv in &self.sets {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| snapens::Error::InvalidArgument(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> snapens::Result<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.build()?;
            let result = harness::run_experiment(&cfg)?;
            print!("{}", harness::emit_tables(&result.summary, None)?.markdown);
        }
        Command::SweepAlpha { exp, alphas, laws, base } => {
            let cfg = exp.build()?;
            let laws = laws.iter().map(|l| l.parse()).collect::<snapens::Result<Vec<WeightLaw>>>()?;
            let base: Algorithm = base.parse()?;
            let sweep = harness::alpha_sweep(&cfg, base, &laws, &alphas)?;
            match &cfg.out_dir {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    std::fs::write(dir.join("config.txt"), cfg.to_kv())?;
                    sweep.write_csv(std::fs::File::create(dir.join("alpha_sweep.csv"))?)?;
                }
                None => sweep.write_csv(std::io::stdout().lock())?,
            }
            if cfg.out_dir.is_some() {
                sweep.write_csv(std::io::stdout().lock())?;
            }
        }
        Command::Tables { inputs, out } => {
            let mut summary = Summary::default();
            for dir in &inputs {
                summary.extend(Summary::read_dir(dir)?);
            }
            print!("{}", harness::emit_tables(&summary, out.as_deref())?.markdown);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
