//! Friedman #1, #2 and #3 regression benchmarks.
//!
//! Formulas follow the printed definitions: `10·sin(x1·x2)` in #1 (the
//! conventional `π` factor is available through [`gen_friedman1_opts`]) and
//! the `(x2·x4)^-2` term in #2 and #3.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::dataset::{variance, NoiseSpec, RegressionDataset};
use crate::error::{invalid, Error, Result};

const CALIBRATION_SAMPLES: usize = 1_000_000;
const CALIBRATION_SEED: u64 = 0x5EED_CA1B;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FriedmanKind {
    One,
    Two,
    Three,
}

pub fn friedman1_target(x: &[f64], with_pi: bool) -> f64 {
    let k = if with_pi { PI } else { 1.0 };
    10.0 * (k * x[0] * x[1]).sin() + 20.0 * (x[2] - 0.5).powi(2) + 10.0 * x[3] + 5.0 * x[4]
}

/// Returns the target and whether the radicand had to be clipped at zero.
pub fn friedman2_target(x: &[f64]) -> (f64, bool) {
    let radicand = x[1] * x[2] - (x[1] * x[3]).powi(-2);
    let clipped = radicand < 0.0;
    (x[0] * x[0] + radicand.max(0.0).sqrt(), clipped)
}

pub fn friedman3_target(x: &[f64]) -> f64 {
    let numerator = x[1] * x[2] - (x[1] * x[3]).powi(-2);
    // atan2 keeps x1 -> 0+ finite (pi/2 for a positive numerator).
    numerator.atan2(x[0])
}

fn sample_friedman1_inputs<R: Rng>(rng: &mut R, out: &mut Vec<f64>) {
    for _ in 0..10 {
        out.push(rng.random::<f64>());
    }
}

fn sample_friedman23_inputs<R: Rng>(rng: &mut R, out: &mut Vec<f64>) {
    out.push(rng.random_range(0.0..100.0));
    out.push(2.0 * PI * rng.random_range(20.0..280.0));
    out.push(rng.random::<f64>());
    out.push(rng.random_range(1.0..11.0));
}

fn signal_variance(kind: FriedmanKind) -> f64 {
    static CACHE: [OnceLock<f64>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let slot = match kind {
        FriedmanKind::One => &CACHE[0],
        FriedmanKind::Two => &CACHE[1],
        FriedmanKind::Three => &CACHE[2],
    };
    *slot.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(CALIBRATION_SEED);
        let mut x = Vec::with_capacity(10);
        let ys: Vec<f64> = (0..CALIBRATION_SAMPLES)
            .map(|_| {
                x.clear();
                match kind {
                    FriedmanKind::One => {
                        sample_friedman1_inputs(&mut rng, &mut x);
                        friedman1_target(&x, false)
                    }
                    FriedmanKind::Two => {
                        sample_friedman23_inputs(&mut rng, &mut x);
                        friedman2_target(&x).0
                    }
                    FriedmanKind::Three => {
                        sample_friedman23_inputs(&mut rng, &mut x);
                        friedman3_target(&x)
                    }
                }
            })
            .collect();
        variance(&ys)
    })
}

/// Noise standard deviation giving the requested noise-to-signal power ratio.
///
/// The signal variance is estimated once per generator from 10^6 noise-free
/// samples drawn with a fixed seed.
pub fn noise_sigma_for_ratio(kind: FriedmanKind, ratio: f64) -> Result<f64> {
    if !(ratio >= 0.0 && ratio.is_finite()) {
        return Err(invalid(format!("noise-to-signal ratio must be >= 0, got {ratio}")));
    }
    if ratio == 0.0 {
        return Ok(0.0);
    }
    Ok((ratio * signal_variance(kind)).sqrt())
}

pub fn gen_friedman1(n: usize, noise: NoiseSpec, seed: u64) -> Result<RegressionDataset> {
    gen_friedman1_opts(n, noise, seed, false)
}

/// Friedman #1 with an optional `π` inside the sine.
pub fn gen_friedman1_opts(
    n: usize,
    noise: NoiseSpec,
    seed: u64,
    with_pi: bool,
) -> Result<RegressionDataset> {
    let sigma = match noise.validate()? {
        NoiseSpec::None => 0.0,
        NoiseSpec::GaussianSigma(s) => s,
        NoiseSpec::NoiseToSignal(_) => {
            return Err(Error::UnsupportedNoise {
                generator: "friedman1",
                reason: "uses an absolute noise sigma".into(),
            })
        }
    };
    check_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = Vec::with_capacity(n * 10);
    let mut targets = Vec::with_capacity(n);
    let mut row = Vec::with_capacity(10);
    for _ in 0..n {
        row.clear();
        sample_friedman1_inputs(&mut rng, &mut row);
        targets.push(friedman1_target(&row, with_pi));
        inputs.extend_from_slice(&row);
    }
    add_noise(&mut targets, sigma, &mut rng);
    let name = if with_pi { "friedman1-pi" } else { "friedman1" };
    let mut ds = RegressionDataset::new(name, 10, inputs, targets)?;
    ds.noise_sigma = sigma;
    Ok(ds)
}

pub fn gen_friedman2(n: usize, noise: NoiseSpec, seed: u64) -> Result<RegressionDataset> {
    gen_friedman23(FriedmanKind::Two, n, noise, seed)
}

pub fn gen_friedman3(n: usize, noise: NoiseSpec, seed: u64) -> Result<RegressionDataset> {
    gen_friedman23(FriedmanKind::Three, n, noise, seed)
}

fn gen_friedman23(
    kind: FriedmanKind,
    n: usize,
    noise: NoiseSpec,
    seed: u64,
) -> Result<RegressionDataset> {
    let name = if kind == FriedmanKind::Two { "friedman2" } else { "friedman3" };
    let sigma = match noise.validate()? {
        NoiseSpec::None => 0.0,
        NoiseSpec::NoiseToSignal(r) => noise_sigma_for_ratio(kind, r)?,
        NoiseSpec::GaussianSigma(_) => {
            return Err(Error::UnsupportedNoise {
                generator: name,
                reason: "noise is specified as a noise-to-signal ratio".into(),
            })
        }
    };
    check_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = Vec::with_capacity(n * 4);
    let mut targets = Vec::with_capacity(n);
    let mut clipped_rows = 0;
    let mut row = Vec::with_capacity(4);
    for _ in 0..n {
        row.clear();
        sample_friedman23_inputs(&mut rng, &mut row);
        let t = match kind {
            FriedmanKind::Two => {
                let (t, clipped) = friedman2_target(&row);
                clipped_rows += usize::from(clipped);
                t
            }
            _ => friedman3_target(&row),
        };
        targets.push(t);
        inputs.extend_from_slice(&row);
    }
    add_noise(&mut targets, sigma, &mut rng);
    let mut ds = RegressionDataset::new(name, 4, inputs, targets)?;
    ds.noise_sigma = sigma;
    ds.clipped_rows = clipped_rows;
    Ok(ds)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("sample count must be >= 1"));
    }
    Ok(())
}

fn add_noise<R: Rng>(targets: &mut [f64], sigma: f64, rng: &mut R) {
    if sigma > 0.0 {
        let normal = Normal::new(0.0, sigma).expect("sigma validated");
        for t in targets {
            *t += normal.sample(rng);
        }
    }
}
