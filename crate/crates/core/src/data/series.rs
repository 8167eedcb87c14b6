//! Chaotic time series and their delay embeddings.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dataset::RegressionDataset;
use crate::error::{invalid, Error, Result};

/// One iterate of the Ikeda laser map.
pub fn ikeda_step(z: Complex64) -> Complex64 {
    let phase = 0.4 - 6.0 / (1.0 + z.norm_sqr());
    1.0 + 0.9 * z * Complex64::new(0.0, phase).exp()
}

/// `z0, z1, …, z_steps` starting from `z0`.
pub fn ikeda_orbit(z0: Complex64, steps: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut z = z0;
    out.push(z);
    for _ in 0..steps {
        z = ikeda_step(z);
        out.push(z);
    }
    out
}

/// Real parts of `n` Ikeda iterates following `burn_in` discarded ones.
///
/// The starting point is drawn uniformly from the square `[-0.5, 0.5]²`.
pub fn gen_ikeda(n: usize, burn_in: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("series length must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z0 = Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
    let orbit = ikeda_orbit(z0, burn_in + n);
    Ok(orbit[burn_in + 1..].iter().map(|z| z.re).collect())
}

/// Right-hand side of the Mackey-Glass equation.
pub fn mackey_glass_rhs(x: f64, x_delayed: f64) -> f64 {
    0.2 * x_delayed / (1.0 + x_delayed.powi(10)) - 0.1 * x
}

/// Mackey-Glass integrator: classic RK4 on a fixed grid, with the delayed
/// state linearly interpolated from the stored history and `x(t) = 0` for
/// `t < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MackeyGlass {
    pub delay: f64,
    pub dt: f64,
    /// Integration steps between consecutive samples.
    pub sample_stride: usize,
    /// Time units discarded before sampling starts.
    pub burn_in: f64,
    pub x0: f64,
}

impl Default for MackeyGlass {
    fn default() -> Self {
        Self {
            delay: 17.0,
            dt: 0.1,
            sample_stride: 10,
            burn_in: 1000.0,
            x0: 1.2,
        }
    }
}

impl MackeyGlass {
    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(invalid(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.sample_stride < 1 {
            return Err(invalid("sample stride must be >= 1"));
        }
        if !(self.delay >= self.dt) {
            return Err(invalid("delay must be at least one integration step"));
        }
        if !(self.burn_in >= 0.0) {
            return Err(invalid("burn-in must be >= 0"));
        }
        Ok(())
    }

    /// Grid values `x(k·dt)` for `k = 0..=steps`.
    pub fn integrate(&self, steps: usize) -> Result<Vec<f64>> {
        self.validate()?;
        let dt = self.dt;
        let mut xs = Vec::with_capacity(steps + 1);
        xs.push(self.x0);
        let delayed = |xs: &[f64], t: f64| -> f64 {
            let s = t - self.delay;
            if s < 0.0 {
                return 0.0;
            }
            let pos = s / dt;
            let k = pos.floor() as usize;
            let frac = pos - k as f64;
            match xs.get(k + 1) {
                Some(&next) => xs[k] + frac * (next - xs[k]),
                None => xs[k],
            }
        };
        for k in 0..steps {
            let t = k as f64 * dt;
            let x = xs[k];
            let d0 = delayed(&xs, t);
            let dh = delayed(&xs, t + 0.5 * dt);
            let d1 = delayed(&xs, t + dt);
            let k1 = mackey_glass_rhs(x, d0);
            let k2 = mackey_glass_rhs(x + 0.5 * dt * k1, dh);
            let k3 = mackey_glass_rhs(x + 0.5 * dt * k2, dh);
            let k4 = mackey_glass_rhs(x + dt * k3, d1);
            xs.push(x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        }
        Ok(xs)
    }

    /// `n` samples taken every `sample_stride` steps after the burn-in.
    ///
    /// The seed adds a random extra burn-in of 0..500 time units so that
    /// different seeds see different stretches of the attractor.
    pub fn generate(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        self.validate()?;
        if n == 0 {
            return Err(invalid("series length must be >= 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let extra_samples: usize = rng.random_range(0..500);
        let sample_dt = self.dt * self.sample_stride as f64;
        let skip = (self.burn_in / sample_dt).ceil() as usize + extra_samples;
        let steps = (skip + n - 1) * self.sample_stride;
        let xs = self.integrate(steps)?;
        Ok(xs
            .iter()
            .step_by(self.sample_stride)
            .skip(skip)
            .take(n)
            .copied()
            .collect())
    }
}

/// Delay-embedding layout: `dimension` inputs spaced `lag` apart, target
/// `horizon` steps after the last input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesEmbedding {
    pub dimension: usize,
    pub lag: usize,
    pub horizon: usize,
}

impl SeriesEmbedding {
    /// Rows produced from a series of length `len` (0 if too short).
    pub fn rows_for(&self, len: usize) -> usize {
        len.saturating_sub((self.dimension - 1) * self.lag + self.horizon)
    }

    /// Series length needed for `rows` rows.
    pub fn len_for(&self, rows: usize) -> usize {
        rows + (self.dimension - 1) * self.lag + self.horizon
    }
}

pub fn embed_series(series: &[f64], spec: SeriesEmbedding) -> Result<RegressionDataset> {
    if spec.dimension == 0 || spec.lag == 0 || spec.horizon == 0 {
        return Err(invalid("embedding dimension, lag and horizon must be >= 1"));
    }
    let rows = spec.rows_for(series.len());
    if rows == 0 {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            needed: spec.len_for(1),
        });
    }
    let last = (spec.dimension - 1) * spec.lag;
    let mut inputs = Vec::with_capacity(rows * spec.dimension);
    let mut targets = Vec::with_capacity(rows);
    for i in 0..rows {
        inputs.extend((0..spec.dimension).map(|j| series[i + j * spec.lag]));
        targets.push(series[i + last + spec.horizon]);
    }
    RegressionDataset::new("series", spec.dimension, inputs, targets)
}
