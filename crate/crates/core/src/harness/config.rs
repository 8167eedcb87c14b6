use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::data::NoiseSpec;
use crate::error::{invalid, Error, Result};
use crate::mlp::BatchMode;
use crate::weighting::WeightLaw;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NoiseLevel {
    Free,
    Low,
    High,
}

impl NoiseLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Free => "free",
            Self::Low => "low",
            Self::High => "high",
        }
    }
}

impl fmt::Display for NoiseLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NoiseLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" | "none" => Ok(Self::Free),
            "low" => Ok(Self::Low),
            "high" => Ok(Self::High),
            _ => Err(invalid(format!("unknown noise level {s:?} (free|low|high)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSpec {
    Friedman1 { pi: bool },
    Friedman2,
    Friedman3,
    Ikeda,
    MackeyGlass,
    /// Numeric CSV, target in `target_column`; each replication reshuffles it.
    Csv { path: PathBuf, target_column: usize },
}

impl DatasetSpec {
    pub fn name(&self) -> String {
        match self {
            Self::Friedman1 { pi: false } => "friedman1".into(),
            Self::Friedman1 { pi: true } => "friedman1-pi".into(),
            Self::Friedman2 => "friedman2".into(),
            Self::Friedman3 => "friedman3".into(),
            Self::Ikeda => "ikeda".into(),
            Self::MackeyGlass => "mackey-glass".into(),
            Self::Csv { path, .. } => path
                .file_stem()
                .map_or_else(|| "csv".into(), |s| s.to_string_lossy().into_owned()),
        }
    }

    /// Generator noise for a level: absolute sigma 0/1/2 for Friedman #1,
    /// noise-to-signal ratio 0, 1/9, 1/3 for #2 and #3.
    pub fn noise_spec(&self, level: NoiseLevel) -> NoiseSpec {
        match (self, level) {
            (_, NoiseLevel::Free) => NoiseSpec::None,
            (Self::Friedman1 { .. }, NoiseLevel::Low) => NoiseSpec::GaussianSigma(1.0),
            (Self::Friedman1 { .. }, NoiseLevel::High) => NoiseSpec::GaussianSigma(2.0),
            (_, NoiseLevel::Low) => NoiseSpec::NoiseToSignal(1.0 / 9.0),
            (_, NoiseLevel::High) => NoiseSpec::NoiseToSignal(1.0 / 3.0),
        }
    }

    fn parse(name: &str, pi: bool, target_column: usize) -> Result<Self> {
        Ok(match name {
            "friedman1" | "f1" => Self::Friedman1 { pi },
            "friedman2" | "f2" => Self::Friedman2,
            "friedman3" | "f3" => Self::Friedman3,
            "ikeda" => Self::Ikeda,
            "mackey-glass" | "mackeyglass" | "mg" => Self::MackeyGlass,
            other => {
                let path = other.strip_prefix("csv:").unwrap_or(other);
                if !path.ends_with(".csv") && !other.starts_with("csv:") {
                    return Err(invalid(format!("unknown dataset {other:?}")));
                }
                Self::Csv {
                    path: path.into(),
                    target_column,
                }
            }
        })
    }

    fn key(&self) -> String {
        match self {
            Self::Friedman1 { .. } => "friedman1".into(),
            Self::Csv { path, .. } => format!("csv:{}", path.display()),
            other => other.name(),
        }
    }
}

/// How validation points are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValidationScheme {
    /// A random held-out fraction of the data shared by all members.
    External(f64),
    OutOfBag,
}

impl ValidationScheme {
    pub fn mode(self) -> crate::ensemble::ValidationMode {
        match self {
            Self::External(_) => crate::ensemble::ValidationMode::External,
            Self::OutOfBag => crate::ensemble::ValidationMode::OutOfBag,
        }
    }
}

impl fmt::Display for ValidationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::OutOfBag => f.write_str("oob"),
            Self::External(frac) => write!(f, "external{}", (frac * 100.0).round()),
        }
    }
}

impl FromStr for ValidationScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "oob" {
            return Ok(Self::OutOfBag);
        }
        let pct: f64 = s
            .strip_prefix("external")
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| invalid(format!("unknown validation {s:?} (external20|external37|oob)")))?;
        if !(pct > 0.0 && pct < 100.0) {
            return Err(invalid(format!("validation percentage {pct} out of range")));
        }
        Ok(Self::External(pct / 100.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    /// Average over members of each member's own test error.
    Single,
    Bagging,
    Epoch,
    NeuralBag,
    Seca,
    SimAnn,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Self::Single,
        Self::Bagging,
        Self::Epoch,
        Self::NeuralBag,
        Self::Seca,
        Self::SimAnn,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::Single => "Single",
            Self::Bagging => "Bagging",
            Self::Epoch => "Epoch",
            Self::NeuralBag => "NeuralBAG",
            Self::Seca => "SECA",
            Self::SimAnn => "SimAnn",
        }
    }

    pub fn weighted_label(self) -> String {
        format!("W-{}", self.label())
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| invalid(format!("unknown selector {s:?}")))
    }
}

/// Weighting law and exponent, written `law:alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weighting {
    pub law: WeightLaw,
    pub alpha: f64,
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.law, self.alpha)
    }
}

impl FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (law, alpha) = s
            .split_once(':')
            .ok_or_else(|| invalid(format!("weighting must be law:alpha, got {s:?}")))?;
        let alpha: f64 = alpha
            .parse()
            .map_err(|_| invalid(format!("bad weighting exponent {alpha:?}")))?;
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(invalid("weighting exponent must be >= 0"));
        }
        Ok(Self {
            law: law.parse()?,
            alpha,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputScaling {
    None,
    /// Each column mapped from its range over the training data onto `[0, 1]`.
    UnitRange,
    /// Zero mean and unit variance over the training data.
    Standardize,
}

impl fmt::Display for InputScaling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::None => "none",
            Self::UnitRange => "unit-range",
            Self::Standardize => "standardize",
        })
    }
}

impl FromStr for InputScaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "unit-range" => Ok(Self::UnitRange),
            "standardize" => Ok(Self::Standardize),
            _ => Err(invalid(format!("unknown input scaling {s:?}"))),
        }
    }
}

/// Everything needed to rerun an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub noise: NoiseLevel,
    pub train_size: usize,
    pub test_size: usize,
    pub validation: ValidationScheme,
    pub members: usize,
    pub snapshots: usize,
    pub total_epochs: usize,
    pub hidden_units: usize,
    pub learning_rate: f64,
    pub batch_mode: BatchMode,
    pub input_scaling: InputScaling,
    /// Annealing length in sweeps over `T`; steps = `anneal_sweeps · T`.
    pub anneal_sweeps: usize,
    pub selectors: Vec<Algorithm>,
    pub weighting: Option<Weighting>,
    /// Selectors that also get a weighted variant.
    pub weighted: Vec<Algorithm>,
    pub baseline: Algorithm,
    pub shuffle_seca_order: bool,
    pub replications: usize,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub save_cubes: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: DatasetSpec::Friedman1 { pi: false },
            noise: NoiseLevel::Free,
            train_size: 200,
            test_size: 1000,
            validation: ValidationScheme::OutOfBag,
            members: 20,
            snapshots: 200,
            total_epochs: 2000,
            hidden_units: 15,
            learning_rate: 0.005,
            batch_mode: BatchMode::PerPattern,
            input_scaling: InputScaling::UnitRange,
            anneal_sweeps: 15,
            selectors: Algorithm::ALL.to_vec(),
            weighting: Some(Weighting {
                law: WeightLaw::Power,
                alpha: 2.0,
            }),
            weighted: vec![Algorithm::Bagging, Algorithm::Seca, Algorithm::SimAnn],
            baseline: Algorithm::Bagging,
            shuffle_seca_order: false,
            replications: 10,
            seed: 1,
            out_dir: None,
            save_cubes: false,
        }
    }
}

/// `(hidden units, test size)` of a published benchmark setting.
pub fn reference_architecture(dataset: &DatasetSpec, train_size: usize) -> Option<(usize, usize)> {
    let table: &[(usize, usize, usize)] = match dataset {
        DatasetSpec::Friedman1 { .. } => &[(50, 6, 1000), (100, 10, 1000), (200, 15, 1000)],
        DatasetSpec::Friedman2 => &[(20, 4, 1000), (50, 6, 1000), (100, 8, 1000)],
        DatasetSpec::Friedman3 => &[(100, 6, 1000), (200, 8, 1000), (400, 12, 1000)],
        DatasetSpec::Ikeda => &[(100, 10, 1000)],
        DatasetSpec::MackeyGlass => &[(1194, 40, 1000)],
        DatasetSpec::Csv { .. } => match dataset.name().to_ascii_lowercase().as_str() {
            "abalone" => &[(3132, 5, 1045)],
            "boston" | "housing" => &[(450, 5, 56)],
            "ozone" => &[(295, 5, 35)],
            "servo" => &[(150, 15, 17)],
            _ => &[],
        },
    };
    table
        .iter()
        .find(|(n, _, _)| *n == train_size)
        .map(|&(_, h, test)| (h, test))
}

impl ExperimentConfig {
    /// Defaults for `dataset` at `train_size`, with the published architecture
    /// and test size when the pair is a published setting.
    pub fn for_dataset(dataset: DatasetSpec, noise: NoiseLevel, train_size: usize) -> Self {
        let mut cfg = Self {
            dataset,
            noise,
            train_size,
            ..Self::default()
        };
        cfg.hidden_units = 10;
        cfg.apply_architecture();
        cfg
    }

    fn apply_architecture(&mut self) -> bool {
        match reference_architecture(&self.dataset, self.train_size) {
            Some((h, test)) => {
                self.hidden_units = h;
                self.test_size = test;
                true
            }
            None => false,
        }
    }

    /// Forces the published setting: architecture and test size for the
    /// dataset, `M = 20`, `T = 200`, 15 annealing sweeps, and 10 replications
    /// (50 with `full`).
    pub fn apply_paper_defaults(&mut self, full: bool) -> Result<()> {
        if !self.apply_architecture() {
            return Err(invalid(format!(
                "no published setting for {} with {} training patterns",
                self.dataset.name(),
                self.train_size
            )));
        }
        self.members = 20;
        self.snapshots = 200;
        self.anneal_sweeps = 15;
        self.replications = if full { 50 } else { 10 };
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.members == 0 || self.snapshots == 0 || self.hidden_units == 0 {
            return Err(invalid("members, snapshots and hidden units must be >= 1"));
        }
        if self.total_epochs == 0 || !self.total_epochs.is_multiple_of(self.snapshots) {
            return Err(invalid("total_epochs must be a positive multiple of snapshots"));
        }
        if self.train_size < 2 || self.test_size == 0 {
            return Err(invalid("need at least 2 training and 1 test pattern"));
        }
        if self.replications == 0 {
            return Err(invalid("replications must be >= 1"));
        }
        if self.selectors.is_empty() {
            return Err(invalid("no selectors configured"));
        }
        if matches!(self.validation, ValidationScheme::External(_))
            && self.selectors.contains(&Algorithm::NeuralBag)
        {
            return Err(invalid("NeuralBAG needs oob validation"));
        }
        if !self.selectors.contains(&self.baseline) {
            return Err(invalid(format!("baseline {} is not among the selectors", self.baseline)));
        }
        Ok(())
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let bad = |what: &str| invalid(format!("bad value {value:?} for {what}"));
        let num = |what: &str| value.parse::<usize>().map_err(|_| bad(what));
        match key.trim().replace('-', "_").as_str() {
            "dataset" => {
                let (pi, col) = match &self.dataset {
                    DatasetSpec::Friedman1 { pi } => (*pi, 0),
                    DatasetSpec::Csv { target_column, .. } => (false, *target_column),
                    _ => (false, 0),
                };
                self.dataset = DatasetSpec::parse(value, pi, col)?;
            }
            "friedman1_pi" => {
                let flag = parse_bool(value).ok_or_else(|| bad(key))?;
                if let DatasetSpec::Friedman1 { pi } = &mut self.dataset {
                    *pi = flag;
                }
            }
            "target_column" => {
                let c = num(key)?;
                if let DatasetSpec::Csv { target_column, .. } = &mut self.dataset {
                    *target_column = c;
                }
            }
            "noise" => self.noise = value.parse()?,
            "train_size" => self.train_size = num(key)?,
            "test_size" => self.test_size = num(key)?,
            "validation" => self.validation = value.parse()?,
            "members" => self.members = num(key)?,
            "snapshots" => self.snapshots = num(key)?,
            "total_epochs" => self.total_epochs = num(key)?,
            "hidden_units" => self.hidden_units = num(key)?,
            "learning_rate" => {
                self.learning_rate = value.parse().map_err(|_| bad(key))?;
            }
            "batch_mode" => {
                self.batch_mode = match value {
                    "per-pattern" => BatchMode::PerPattern,
                    "full-batch" => BatchMode::FullBatch,
                    _ => return Err(bad(key)),
                }
            }
            "input_scaling" => self.input_scaling = value.parse()?,
            "anneal_sweeps" => self.anneal_sweeps = num(key)?,
            "selectors" => self.selectors = parse_list(value)?,
            "weighting" => {
                self.weighting = match value {
                    "none" | "" => None,
                    w => Some(w.parse()?),
                }
            }
            "weighted" => self.weighted = parse_list(value)?,
            "baseline" => self.baseline = value.parse()?,
            "shuffle_seca_order" => self.shuffle_seca_order = parse_bool(value).ok_or_else(|| bad(key))?,
            "reps" | "replications" => self.replications = num(key)?,
            "seed" => self.seed = value.parse().map_err(|_| bad(key))?,
            "out" | "out_dir" => self.out_dir = Some(value.into()),
            "save_cubes" => self.save_cubes = parse_bool(value).ok_or_else(|| bad(key))?,
            other => return Err(invalid(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Settings from `key = value` lines; `#` starts a comment.
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("config line {}: expected key = value", i + 1)))?;
            self.set(k, v)
                .map_err(|e| invalid(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_kv(text)?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_kv(&std::fs::read_to_string(path)?)
    }

    /// Inverse of [`from_kv`](Self::from_kv).
    pub fn to_kv(&self) -> String {
        let list = |v: &[Algorithm]| v.iter().map(|a| a.label()).collect::<Vec<_>>().join(",");
        let mut lines = vec![format!("dataset = {}", self.dataset.key())];
        match &self.dataset {
            DatasetSpec::Friedman1 { pi } => lines.push(format!("friedman1_pi = {pi}")),
            DatasetSpec::Csv { target_column, .. } => lines.push(format!("target_column = {target_column}")),
            _ => {}
        }
        lines.extend([
            format!("noise = {}", self.noise),
            format!("train_size = {}", self.train_size),
            format!("test_size = {}", self.test_size),
            format!("validation = {}", self.validation),
            format!("members = {}", self.members),
            format!("snapshots = {}", self.snapshots),
            format!("total_epochs = {}", self.total_epochs),
            format!("hidden_units = {}", self.hidden_units),
            format!("learning_rate = {}", self.learning_rate),
            format!(
                "batch_mode = {}",
                match self.batch_mode {
                    BatchMode::PerPattern => "per-pattern",
                    BatchMode::FullBatch => "full-batch",
                }
            ),
            format!("input_scaling = {}", self.input_scaling),
            format!("anneal_sweeps = {}", self.anneal_sweeps),
            format!("selectors = {}", list(&self.selectors)),
            format!(
                "weighting = {}",
                self.weighting.map_or_else(|| "none".into(), |w| w.to_string())
            ),
            format!("weighted = {}", list(&self.weighted)),
            format!("baseline = {}", self.baseline),
            format!("shuffle_seca_order = {}", self.shuffle_seca_order),
            format!("reps = {}", self.replications),
            format!("seed = {}", self.seed),
            format!("save_cubes = {}", self.save_cubes),
        ]);
        if let Some(out) = &self.out_dir {
            lines.push(format!("out = {}", out.display()));
        }
        lines.join("\n") + "\n"
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

fn parse_list(s: &str) -> Result<Vec<Algorithm>> {
    if s == "all" {
        return Ok(Algorithm::ALL.to_vec());
    }
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(str::parse)
        .collect()
}

/// Seed for stream `stream` of replication `replication`.
///
/// `splitmix64(master ⊕ splitmix64(replication · 2³² + stream))`, so any single
/// replication can be regenerated from the master seed and its index.
pub fn derive_seed(master: u64, replication: usize, stream: u64) -> u64 {
    splitmix64(master ^ splitmix64(((replication as u64) << 32).wrapping_add(stream)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
