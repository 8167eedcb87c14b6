use crate::error::{invalid, Error, Result};

/// Additive target noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    None,
    /// Gaussian noise with this standard deviation, in target units.
    GaussianSigma(f64),
    /// Gaussian noise whose variance is `ratio` times the signal variance.
    NoiseToSignal(f64),
}

impl NoiseSpec {
    pub(crate) fn validate(self) -> Result<Self> {
        match self {
            NoiseSpec::GaussianSigma(s) if !(s >= 0.0 && s.is_finite()) => {
                Err(invalid(format!("noise sigma must be finite and >= 0, got {s}")))
            }
            NoiseSpec::NoiseToSignal(r) if !(r >= 0.0 && r.is_finite()) => {
                Err(invalid(format!("noise-to-signal ratio must be finite and >= 0, got {r}")))
            }
            other => Ok(other),
        }
    }
}

/// Inputs (row-major, `len × dim`) and targets of a regression problem.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionDataset {
    inputs: Vec<f64>,
    targets: Vec<f64>,
    dim: usize,
    pub name: String,
    /// Standard deviation of the additive target noise, in target units.
    pub noise_sigma: f64,
    /// Rows whose target formula needed clipping to stay finite.
    pub clipped_rows: usize,
}

impl RegressionDataset {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        inputs: Vec<f64>,
        targets: Vec<f64>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("input dimension must be >= 1"));
        }
        if inputs.len() != dim * targets.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * targets.len(),
                got: inputs.len(),
            });
        }
        if inputs.iter().chain(&targets).any(|v| !v.is_finite()) {
            return Err(invalid("data set contains non-finite values"));
        }
        Ok(Self {
            inputs,
            targets,
            dim,
            name: name.into(),
            noise_sigma: 0.0,
            clipped_rows: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.inputs.chunks_exact(self.dim)
    }

    pub fn inputs(&self) -> &[f64] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// New data set made of the given rows, in order. Repeats are allowed.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut inputs = Vec::with_capacity(indices.len() * self.dim);
        let mut targets = Vec::with_capacity(indices.len());
        for &i in indices {
            inputs.extend_from_slice(self.row(i));
            targets.push(self.targets[i]);
        }
        Self {
            inputs,
            targets,
            dim: self.dim,
            name: self.name.clone(),
            noise_sigma: self.noise_sigma,
            clipped_rows: 0,
        }
    }

    /// Population variance of the targets.
    pub fn target_variance(&self) -> f64 {
        variance(&self.targets)
    }

    pub(crate) fn inputs_mut(&mut self) -> &mut [f64] {
        &mut self.inputs
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub(crate) fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

/// Per-column affine map to zero mean and unit variance.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
}

impl Standardizer {
    /// Column statistics of `data`. Constant columns get scale 1.
    pub fn fit(data: &RegressionDataset) -> Self {
        let d = data.dim();
        let n = data.len() as f64;
        let mut means = vec![0.0; d];
        for row in data.rows() {
            for (m, x) in means.iter_mut().zip(row) {
                *m += x;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut vars = vec![0.0; d];
        for row in data.rows() {
            for ((v, x), m) in vars.iter_mut().zip(row).zip(&means) {
                *v += (x - m) * (x - m);
            }
        }
        let scales = vars
            .into_iter()
            .map(|v| {
                let s = (v / n).sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Self { means, scales }
    }

    /// Per-column map of `data`'s range onto `[0, 1]`. Constant columns are
    /// only shifted.
    pub fn fit_unit_range(data: &RegressionDataset) -> Self {
        let d = data.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for row in data.rows() {
            for ((l, h), &x) in lo.iter_mut().zip(hi.iter_mut()).zip(row) {
                *l = l.min(x);
                *h = h.max(x);
            }
        }
        let scales = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| if h > l { h - l } else { 1.0 })
            .collect();
        Self { means: lo, scales }
    }

    pub fn apply(&self, data: &mut RegressionDataset) {
        let d = data.dim();
        for row in data.inputs_mut().chunks_exact_mut(d) {
            for ((x, m), s) in row.iter_mut().zip(&self.means).zip(&self.scales) {
                *x = (*x - m) / s;
            }
        }
    }
}
