use std::fmt::Write as _;

use super::PredictionCube;
use crate::error::{invalid, Error, Result};

/// One snapshot index and one combination weight per member.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    tau: Vec<usize>,
    weights: Vec<f64>,
}

impl Selection {
    /// Weights must be non-negative and sum to 1 within 1e-12.
    pub fn new(tau: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        if tau.is_empty() {
            return Err(invalid("selection needs at least one member"));
        }
        if tau.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: tau.len(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(invalid("weights must be finite and >= 0"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self { tau, weights })
    }

    /// Equal weights `1/M`.
    ///
    /// # Panics
    /// If `tau` is empty.
    pub fn uniform(tau: Vec<usize>) -> Self {
        assert!(!tau.is_empty(), "selection needs at least one member");
        let w = 1.0 / tau.len() as f64;
        let weights = vec![w; tau.len()];
        Self { tau, weights }
    }

    pub fn tau(&self) -> &[usize] {
        &self.tau
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn members(&self) -> usize {
        self.tau.len()
    }

    pub fn is_uniform(&self) -> bool {
        let w = 1.0 / self.tau.len() as f64;
        self.weights.iter().all(|&x| x == w)
    }

    /// Same snapshots, new weights.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        Self::new(self.tau.clone(), weights)
    }

    pub fn check_against(&self, cube: &PredictionCube) -> Result<()> {
        super::check_tau(cube, &self.tau)
    }

    /// One line `net_index tau weight` per member.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (n, (t, w)) in self.tau.iter().zip(&self.weights).enumerate() {
            writeln!(s, "{n} {t} {w}").expect("writing to a String");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut tau = Vec::new();
        let mut weights = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::Format(format!("selection line {}: {line:?}", i + 1));
            let mut fields = line.split_whitespace();
            let (Some(n), Some(t), Some(w), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(bad());
            };
            let n: usize = n.parse().map_err(|_| bad())?;
            if n != tau.len() {
                return Err(bad());
            }
            tau.push(t.parse().map_err(|_| bad())?);
            weights.push(w.parse().map_err(|_| bad())?);
        }
        Self::new(tau, weights)
    }
}
