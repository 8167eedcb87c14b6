use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};

/// Parameters of a `d:h:1` network with tanh hidden units and a linear output.
///
/// `output = output_bias + Σ_j output_weights[j] · tanh(hidden_weights[j]·x + hidden_biases[j])`
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    dim: usize,
    hidden: usize,
    /// Row-major `hidden × dim`.
    pub hidden_weights: Vec<f64>,
    pub hidden_biases: Vec<f64>,
    pub output_weights: Vec<f64>,
    pub output_bias: f64,
}

impl MlpParams {
    pub fn zeros(dim: usize, hidden: usize) -> Self {
        Self {
            dim,
            hidden,
            hidden_weights: vec![0.0; hidden * dim],
            hidden_biases: vec![0.0; hidden],
            output_weights: vec![0.0; hidden],
            output_bias: 0.0,
        }
    }

    /// Uniform on `[-1/√fan_in, 1/√fan_in]` per layer, biases included.
    pub fn init(dim: usize, hidden: usize, seed: u64) -> Result<Self> {
        if dim == 0 || hidden == 0 {
            return Err(invalid("input dimension and hidden units must be >= 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = Self::zeros(dim, hidden);
        let b1 = 1.0 / (dim as f64).sqrt();
        let b2 = 1.0 / (hidden as f64).sqrt();
        for w in p.hidden_weights.iter_mut().chain(p.hidden_biases.iter_mut()) {
            *w = rng.random_range(-b1..=b1);
        }
        for w in p.output_weights.iter_mut() {
            *w = rng.random_range(-b2..=b2);
        }
        p.output_bias = rng.random_range(-b2..=b2);
        Ok(p)
    }

    /// Builds a network from its flat parameter vector (see [`Self::to_flat`]).
    pub fn from_flat(dim: usize, hidden: usize, flat: &[f64]) -> Result<Self> {
        let expected = Self::count(dim, hidden);
        if flat.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: flat.len(),
            });
        }
        let (hw, rest) = flat.split_at(hidden * dim);
        let (hb, rest) = rest.split_at(hidden);
        let (ow, rest) = rest.split_at(hidden);
        Ok(Self {
            dim,
            hidden,
            hidden_weights: hw.to_vec(),
            hidden_biases: hb.to_vec(),
            output_weights: ow.to_vec(),
            output_bias: rest[0],
        })
    }

    /// Hidden weights, hidden biases, output weights, output bias.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.param_count());
        v.extend_from_slice(&self.hidden_weights);
        v.extend_from_slice(&self.hidden_biases);
        v.extend_from_slice(&self.output_weights);
        v.push(self.output_bias);
        v
    }

    fn count(dim: usize, hidden: usize) -> usize {
        hidden * dim + 2 * hidden + 1
    }

    pub fn param_count(&self) -> usize {
        Self::count(self.dim, self.hidden)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn is_finite(&self) -> bool {
        self.output_bias.is_finite()
            && self
                .hidden_weights
                .iter()
                .chain(&self.hidden_biases)
                .chain(&self.output_weights)
                .all(|v| v.is_finite())
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.forward_unchecked(x))
    }

    #[inline]
    pub(crate) fn forward_unchecked(&self, x: &[f64]) -> f64 {
        let mut out = self.output_bias;
        for ((row, b), v) in self
            .hidden_weights
            .chunks_exact(self.dim)
            .zip(&self.hidden_biases)
            .zip(&self.output_weights)
        {
            out += v * (dot(row, x) + b).tanh();
        }
        out
    }

    /// Adds `scale · ∇(½(f(x) − t)²)` into `grad` and returns the residual `f(x) − t`.
    ///
    /// `act` is scratch space of length `hidden`.
    #[inline]
    pub(crate) fn accumulate_gradient(
        &self,
        x: &[f64],
        t: f64,
        scale: f64,
        grad: &mut MlpParams,
        act: &mut [f64],
    ) -> f64 {
        let mut out = self.output_bias;
        for (((a, row), b), v) in act
            .iter_mut()
            .zip(self.hidden_weights.chunks_exact(self.dim))
            .zip(&self.hidden_biases)
            .zip(&self.output_weights)
        {
            *a = (dot(row, x) + b).tanh();
            out += v * *a;
        }
        let r = out - t;
        let g = scale * r;
        grad.output_bias += g;
        for ((((a, v), gv), gb), grow) in act
            .iter()
            .zip(&self.output_weights)
            .zip(grad.output_weights.iter_mut())
            .zip(grad.hidden_biases.iter_mut())
            .zip(grad.hidden_weights.chunks_exact_mut(self.dim))
        {
            *gv += g * a;
            let delta = g * v * (1.0 - a * a);
            *gb += delta;
            for (gw, xi) in grow.iter_mut().zip(x) {
                *gw += delta * xi;
            }
        }
        r
    }

    /// Gradient of `½(f(x) − t)²` with respect to all parameters.
    pub fn pattern_gradient(&self, x: &[f64], t: f64) -> Result<MlpParams> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut grad = Self::zeros(self.dim, self.hidden);
        let mut act = vec![0.0; self.hidden];
        self.accumulate_gradient(x, t, 1.0, &mut grad, &mut act);
        Ok(grad)
    }

    /// `self -= lr · grad`
    #[inline]
    pub(crate) fn step(&mut self, grad: &MlpParams, lr: f64) {
        for (w, g) in self.hidden_weights.iter_mut().zip(&grad.hidden_weights) {
            *w -= lr * g;
        }
        for (w, g) in self.hidden_biases.iter_mut().zip(&grad.hidden_biases) {
            *w -= lr * g;
        }
        for (w, g) in self.output_weights.iter_mut().zip(&grad.output_weights) {
            *w -= lr * g;
        }
        self.output_bias -= lr * grad.output_bias;
    }

    pub(crate) fn clear(&mut self) {
        self.hidden_weights.fill(0.0);
        self.hidden_biases.fill(0.0);
        self.output_weights.fill(0.0);
        self.output_bias = 0.0;
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
