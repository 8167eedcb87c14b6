//! Precomputed member predictions and their binary file format.
//!
//! ```text
//! magic    8 bytes "SNAPCUBE"
//! version  u32     1
//! M, T, P  u64 × 3
//! has_oob  u8      0 or 1
//! values   f64 × M·T·P   (member-major, then snapshot, then point)
//! targets  f64 × P
//! oob      f64 × P·M     (only when has_oob = 1)
//! ```
//! All numbers little-endian.

use std::hash::{DefaultHasher, Hash, Hasher};
use std::io::{Read, Write};

use super::ValidationMode;
use crate::error::{invalid, Error, Result};
use crate::mlp::store::{read_f64, read_u32, read_u64};
use crate::resample::OobWeights;

const MAGIC: &[u8; 8] = b"SNAPCUBE";
const VERSION: u32 = 1;

/// Predictions `values[n][τ][p]` of every snapshot of every member on a fixed
/// point set, with the point targets and optional out-of-bag weights.
///
/// Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionCube {
    m: usize,
    t: usize,
    p: usize,
    values: Vec<f64>,
    targets: Vec<f64>,
    oob: Option<Vec<f64>>,
    /// Out-of-bag points of each member (derived from `oob`).
    oob_points: Vec<Vec<usize>>,
}

impl PredictionCube {
    pub fn new(m: usize, t: usize, p: usize, values: Vec<f64>, targets: Vec<f64>) -> Result<Self> {
        if m == 0 || t == 0 {
            return Err(invalid("cube needs at least one member and one snapshot"));
        }
        if values.len() != m * t * p {
            return Err(Error::DimensionMismatch {
                expected: m * t * p,
                got: values.len(),
            });
        }
        if targets.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: targets.len(),
            });
        }
        if values.iter().chain(&targets).any(|v| !v.is_finite()) {
            return Err(invalid("cube contains non-finite values"));
        }
        Ok(Self {
            m,
            t,
            p,
            values,
            targets,
            oob: None,
            oob_points: Vec::new(),
        })
    }

    pub fn with_oob_weights(self, w: OobWeights) -> Result<Self> {
        self.with_oob_matrix(w.weights, w.members)
    }

    fn with_oob_matrix(mut self, weights: Vec<f64>, members: usize) -> Result<Self> {
        if members != self.m || weights.len() != self.p * self.m {
            return Err(Error::DimensionMismatch {
                expected: self.p * self.m,
                got: weights.len(),
            });
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(invalid("out-of-bag weights must be finite and >= 0"));
        }
        self.oob_points = (0..self.m)
            .map(|n| (0..self.p).filter(|&p| weights[p * self.m + n] > 0.0).collect())
            .collect();
        self.oob = Some(weights);
        Ok(self)
    }

    pub fn members(&self) -> usize {
        self.m
    }

    pub fn snapshots(&self) -> usize {
        self.t
    }

    pub fn points(&self) -> usize {
        self.p
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, member: usize, tau: usize, point: usize) -> f64 {
        self.values[(member * self.t + tau) * self.p + point]
    }

    /// Predictions of one snapshot on all points.
    #[inline]
    pub fn row(&self, member: usize, tau: usize) -> &[f64] {
        let start = (member * self.t + tau) * self.p;
        &self.values[start..start + self.p]
    }

    /// Row-major `P × M` out-of-bag weights, if present.
    pub fn oob_weights(&self) -> Option<&[f64]> {
        self.oob.as_deref()
    }

    /// Points on which member `member` is validated.
    pub(crate) fn validation_points(&self, member: usize, mode: ValidationMode) -> Result<std::borrow::Cow<'_, [usize]>> {
        match mode {
            ValidationMode::External => Ok((0..self.p).collect::<Vec<_>>().into()),
            ValidationMode::OutOfBag => {
                if self.oob.is_none() {
                    return Err(Error::MissingOobWeights);
                }
                Ok(self.oob_points[member].as_slice().into())
            }
        }
    }

    /// Cube restricted to the given points, in order. Out-of-bag weights are dropped.
    pub fn select_points(&self, points: &[usize]) -> Result<Self> {
        if let Some(&bad) = points.iter().find(|&&i| i >= self.p) {
            return Err(Error::IndexOutOfRange { index: bad, len: self.p });
        }
        let mut values = Vec::with_capacity(self.m * self.t * points.len());
        for n in 0..self.m {
            for tau in 0..self.t {
                let row = self.row(n, tau);
                values.extend(points.iter().map(|&i| row[i]));
            }
        }
        let targets = points.iter().map(|&i| self.targets[i]).collect();
        Self::new(self.m, self.t, points.len(), values, targets)
    }

    /// Cube whose member `i` is member `perm[i]` of `self`.
    pub fn permute_members(&self, perm: &[usize]) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        for &src in perm {
            for tau in 0..self.t {
                values.extend_from_slice(self.row(src, tau));
            }
        }
        let mut out = Self::new(self.m, self.t, self.p, values, self.targets.clone())
            .expect("permutation of a valid cube");
        if let Some(w) = &self.oob {
            let mut pw = vec![0.0; w.len()];
            for p in 0..self.p {
                for (i, &src) in perm.iter().enumerate() {
                    pw[p * self.m + i] = w[p * self.m + src];
                }
            }
            out = out.with_oob_matrix(pw, self.m).expect("same shape");
        }
        out
    }

    /// Same cube with every prediction and target multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let values = self.values.iter().map(|v| v * c).collect();
        let targets = self.targets.iter().map(|v| v * c).collect();
        let out = Self::new(self.m, self.t, self.p, values, targets)?;
        match &self.oob {
            Some(w) => out.with_oob_matrix(w.clone(), self.m),
            None => Ok(out),
        }
    }

    /// Hash of the full contents (bit patterns), stable across runs.
    pub fn content_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        (self.m, self.t, self.p).hash(&mut h);
        for v in self.values.iter().chain(&self.targets) {
            v.to_bits().hash(&mut h);
        }
        if let Some(w) = &self.oob {
            for v in w {
                v.to_bits().hash(&mut h);
            }
        }
        h.finish()
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        for v in [self.m, self.t, self.p] {
            w.write_all(&(v as u64).to_le_bytes())?;
        }
        w.write_all(&[u8::from(self.oob.is_some())])?;
        let oob = self.oob.as_deref().unwrap_or(&[]);
        for v in self.values.iter().chain(&self.targets).chain(oob) {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("not a prediction cube".into()));
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let m = read_u64(&mut r)? as usize;
        let t = read_u64(&mut r)? as usize;
        let p = read_u64(&mut r)? as usize;
        let mut flag = [0u8; 1];
        r.read_exact(&mut flag)?;
        let mut read_n = |n: usize| (0..n).map(|_| read_f64(&mut r)).collect::<Result<Vec<_>>>();
        let values = read_n(m * t * p)?;
        let targets = read_n(p)?;
        let cube = Self::new(m, t, p, values, targets)?;
        match flag[0] {
            0 => Ok(cube),
            1 => {
                let w = read_n(p * m)?;
                cube.with_oob_matrix(w, m)
            }
            f => Err(Error::Format(format!("bad oob flag {f}"))),
        }
    }
}
