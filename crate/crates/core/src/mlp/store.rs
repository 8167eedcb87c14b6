//! Snapshot sequences and their binary file format.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic        8 bytes  "SNAPSTOR"
//! version      u32      1
//! d, h, T      u32 × 3
//! epochs       u64 × T
//! target_mean  f64
//! target_scale f64
//! train_loss   f64 × T
//! snapshots    T × (h·d hidden weights, h hidden biases, h output weights, output bias) f64
//! ```

use std::io::{Read, Write};

use super::MlpParams;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"SNAPSTOR";
const VERSION: u32 = 1;

/// The saved parameter states of one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotStore {
    dim: usize,
    hidden: usize,
    snapshots: Vec<MlpParams>,
    epochs: Vec<usize>,
    train_losses: Vec<f64>,
    target_mean: f64,
    target_scale: f64,
}

impl SnapshotStore {
    pub(crate) fn empty(dim: usize, hidden: usize, target_mean: f64, target_scale: f64) -> Self {
        Self {
            dim,
            hidden,
            snapshots: Vec::new(),
            epochs: Vec::new(),
            train_losses: Vec::new(),
            target_mean,
            target_scale,
        }
    }

    pub(crate) fn push(&mut self, epoch: usize, params: MlpParams, train_loss: f64) {
        debug_assert!(self.epochs.last().is_none_or(|&e| e < epoch));
        self.epochs.push(epoch);
        self.snapshots.push(params);
        self.train_losses.push(train_loss);
    }

    /// Store holding the given snapshots with an identity target map.
    pub fn from_snapshots(snapshots: Vec<MlpParams>, epochs: Vec<usize>) -> Result<Self> {
        let first = snapshots
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty snapshot list".into()))?;
        if snapshots.len() != epochs.len() {
            return Err(Error::DimensionMismatch {
                expected: snapshots.len(),
                got: epochs.len(),
            });
        }
        if !epochs.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("epochs must be strictly increasing".into()));
        }
        let (dim, hidden) = (first.dim(), first.hidden());
        if snapshots.iter().any(|s| s.dim() != dim || s.hidden() != hidden) {
            return Err(Error::InvalidArgument("snapshots differ in shape".into()));
        }
        let t = snapshots.len();
        Ok(Self {
            dim,
            hidden,
            snapshots,
            epochs,
            train_losses: vec![f64::NAN; t],
            target_mean: 0.0,
            target_scale: 1.0,
        })
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn snapshots(&self) -> &[MlpParams] {
        &self.snapshots
    }

    /// Training epoch at which each snapshot was taken.
    pub fn epochs(&self) -> &[usize] {
        &self.epochs
    }

    /// Mean squared error on the training set at each snapshot, in target units.
    pub fn train_losses(&self) -> &[f64] {
        &self.train_losses
    }

    pub fn target_mean(&self) -> f64 {
        self.target_mean
    }

    pub fn target_scale(&self) -> f64 {
        self.target_scale
    }

    /// Prediction of snapshot `tau`, in target units.
    pub fn predict(&self, tau: usize, x: &[f64]) -> Result<f64> {
        let s = self.snapshots.get(tau).ok_or(Error::IndexOutOfRange {
            index: tau,
            len: self.len(),
        })?;
        Ok(self.target_mean + self.target_scale * s.forward(x)?)
    }

    #[inline]
    pub(crate) fn predict_unchecked(&self, tau: usize, x: &[f64]) -> f64 {
        self.target_mean + self.target_scale * self.snapshots[tau].forward_unchecked(x)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        for v in [self.dim, self.hidden, self.len()] {
            w.write_all(&u32::try_from(v).map_err(|_| Error::Format("size exceeds u32".into()))?.to_le_bytes())?;
        }
        for &e in &self.epochs {
            w.write_all(&(e as u64).to_le_bytes())?;
        }
        w.write_all(&self.target_mean.to_le_bytes())?;
        w.write_all(&self.target_scale.to_le_bytes())?;
        for v in &self.train_losses {
            w.write_all(&v.to_le_bytes())?;
        }
        for s in &self.snapshots {
            for v in s.to_flat() {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("not a snapshot store".into()));
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let dim = read_u32(&mut r)? as usize;
        let hidden = read_u32(&mut r)? as usize;
        let t = read_u32(&mut r)? as usize;
        let epochs = (0..t)
            .map(|_| read_u64(&mut r).map(|e| e as usize))
            .collect::<Result<Vec<_>>>()?;
        let target_mean = read_f64(&mut r)?;
        let target_scale = read_f64(&mut r)?;
        let train_losses = (0..t).map(|_| read_f64(&mut r)).collect::<Result<Vec<_>>>()?;
        let per = hidden * dim + 2 * hidden + 1;
        let mut snapshots = Vec::with_capacity(t);
        let mut flat = vec![0.0; per];
        for _ in 0..t {
            for v in flat.iter_mut() {
                *v = read_f64(&mut r)?;
            }
            snapshots.push(MlpParams::from_flat(dim, hidden, &flat)?);
        }
        Ok(Self {
            dim,
            hidden,
            snapshots,
            epochs,
            train_losses,
            target_mean,
            target_scale,
        })
    }
}

pub(crate) fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub(crate) fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

pub(crate) fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}
