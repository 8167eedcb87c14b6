//! Ensemble predictions over precomputed snapshot outputs and the validation
//! error functionals the selectors minimize.
//!
//! Errors here are sums of squares; normalization happens in
//! [`crate::weighting`].

mod cube;
mod selection;

pub use cube::PredictionCube;
pub use selection::Selection;

use crate::error::{Error, Result};

/// Where validation errors are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValidationMode {
    /// Every cube point is a held-out validation point shared by all members.
    External,
    /// Member `n` is validated on its out-of-bag points; the cube must carry
    /// out-of-bag weights.
    OutOfBag,
}

/// `Σ_n w_n · f_n[τ_n](x_p)` for every point.
pub fn ensemble_predict(cube: &PredictionCube, sel: &Selection) -> Result<Vec<f64>> {
    sel.check_against(cube)?;
    let mut out = vec![0.0; cube.points()];
    for (n, (&tau, &w)) in sel.tau().iter().zip(sel.weights()).enumerate() {
        for (o, v) in out.iter_mut().zip(cube.row(n, tau)) {
            *o += w * v;
        }
    }
    Ok(out)
}

/// `Σ_p (t_p − Φ(x_p))²`
pub fn ensemble_sse(cube: &PredictionCube, sel: &Selection) -> Result<f64> {
    let pred = ensemble_predict(cube, sel)?;
    Ok(sse(cube.targets(), &pred))
}

/// `Σ_p (t_p − Σ_n w_pn f_n[τ_n](x_p))²` over patterns with out-of-bag cover.
pub fn oob_ensemble_sse(cube: &PredictionCube, tau: &[usize]) -> Result<f64> {
    let w = cube.oob_weights().ok_or(Error::MissingOobWeights)?;
    check_tau(cube, tau)?;
    let m = cube.members();
    let mut total = 0.0;
    for (p, (t, wrow)) in cube.targets().iter().zip(w.chunks_exact(m)).enumerate() {
        if wrow.iter().all(|&x| x == 0.0) {
            continue;
        }
        let phi: f64 = wrow
            .iter()
            .zip(tau)
            .enumerate()
            .filter(|(_, (wpn, _))| **wpn != 0.0)
            .map(|(n, (wpn, &tn))| wpn * cube.value(n, tn, p))
            .sum();
        total += (t - phi) * (t - phi);
    }
    Ok(total)
}

/// Validation error of member `net` at every snapshot.
pub fn per_net_val_sse(cube: &PredictionCube, net: usize, mode: ValidationMode) -> Result<Vec<f64>> {
    if net >= cube.members() {
        return Err(Error::IndexOutOfRange {
            index: net,
            len: cube.members(),
        });
    }
    let points = cube.validation_points(net, mode)?;
    Ok((0..cube.snapshots())
        .map(|tau| {
            let row = cube.row(net, tau);
            points
                .iter()
                .map(|&p| {
                    let r = cube.targets()[p] - row[p];
                    r * r
                })
                .sum()
        })
        .collect())
}

pub(crate) fn check_tau(cube: &PredictionCube, tau: &[usize]) -> Result<()> {
    if tau.len() != cube.members() {
        return Err(Error::DimensionMismatch {
            expected: cube.members(),
            got: tau.len(),
        });
    }
    if let Some(&bad) = tau.iter().find(|&&t| t >= cube.snapshots()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: cube.snapshots(),
        });
    }
    Ok(())
}

pub(crate) fn sse(targets: &[f64], pred: &[f64]) -> f64 {
    targets
        .iter()
        .zip(pred)
        .map(|(t, y)| (t - y) * (t - y))
        .sum()
}
