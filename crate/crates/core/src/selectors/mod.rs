//! Snapshot selection algorithms.
//!
//! Every selector maps a [`PredictionCube`] to a [`Selection`] with uniform
//! weights. Ties between snapshots always go to the smallest index.
//!
//! [`Objective`] carries the cube and validation mode and counts how many
//! member predictions enter ensemble error evaluations. One evaluation of a
//! single member's error costs 1, one evaluation of an `m`-member aggregate
//! costs `m`.

mod simann;

use std::cell::Cell;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use simann::SimAnnConfig;

use crate::ensemble::{check_tau, oob_ensemble_sse, PredictionCube, Selection, ValidationMode};
use crate::error::{invalid, Error, Result};

/// Error functionals over one cube, with an evaluation counter.
#[derive(Debug)]
pub struct Objective<'a> {
    cube: &'a PredictionCube,
    mode: ValidationMode,
    evaluations: Cell<u64>,
    setup_evaluations: Cell<u64>,
}

impl<'a> Objective<'a> {
    pub fn new(cube: &'a PredictionCube, mode: ValidationMode) -> Result<Self> {
        if mode == ValidationMode::OutOfBag && cube.oob_weights().is_none() {
            return Err(Error::MissingOobWeights);
        }
        Ok(Self {
            cube,
            mode,
            evaluations: Cell::new(0),
            setup_evaluations: Cell::new(0),
        })
    }

    pub fn cube(&self) -> &PredictionCube {
        self.cube
    }

    pub fn mode(&self) -> ValidationMode {
        self.mode
    }

    /// Member evaluations spent by the search itself.
    pub fn evaluations(&self) -> u64 {
        self.evaluations.get()
    }

    /// Evaluations spent outside the search loop (the annealing start energy).
    pub fn setup_evaluations(&self) -> u64 {
        self.setup_evaluations.get()
    }

    pub fn reset(&self) {
        self.evaluations.set(0);
        self.setup_evaluations.set(0);
    }

    fn charge(&self, n: usize) {
        self.evaluations.set(self.evaluations.get() + n as u64);
    }

    fn points(&self, net: usize) -> Result<std::borrow::Cow<'_, [usize]>> {
        self.cube.validation_points(net, self.mode)
    }

    /// Error of member `net` at snapshot `tau` on its validation points.
    pub fn member_error(&self, net: usize, tau: usize) -> Result<f64> {
        let points = self.points(net)?;
        self.charge(1);
        let row = self.cube.row(net, tau);
        let t = self.cube.targets();
        Ok(points.iter().map(|&p| (t[p] - row[p]).powi(2)).sum())
    }

    /// Ensemble validation error of the full snapshot vector: the shared
    /// validation set in external mode, the out-of-bag aggregate otherwise.
    pub fn ensemble_error(&self, tau: &[usize]) -> Result<f64> {
        check_tau(self.cube, tau)?;
        self.charge(tau.len());
        match self.mode {
            ValidationMode::External => Ok(self.uniform_sse(tau, &self.all_points())),
            ValidationMode::OutOfBag => oob_ensemble_sse(self.cube, tau),
        }
    }

    fn all_points(&self) -> Vec<usize> {
        (0..self.cube.points()).collect()
    }

    /// Simple average of `members[i]` at `tau[i]`, squared error over `points`.
    fn partial_sse(&self, members: &[usize], tau: &[usize], points: &[usize]) -> f64 {
        let inv = 1.0 / members.len() as f64;
        let t = self.cube.targets();
        points
            .iter()
            .map(|&p| {
                let phi: f64 = members
                    .iter()
                    .zip(tau)
                    .map(|(&n, &tn)| inv * self.cube.value(n, tn, p))
                    .sum();
                (t[p] - phi).powi(2)
            })
            .sum()
    }

    fn uniform_sse(&self, tau: &[usize], points: &[usize]) -> f64 {
        let members: Vec<usize> = (0..tau.len()).collect();
        self.partial_sse(&members, tau, points)
    }

    pub fn bagging(&self) -> Result<Selection> {
        let cube = self.cube;
        let tau = (0..cube.members())
            .map(|n| argmin((0..cube.snapshots()).map(|t| self.member_error(n, t))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Selection::uniform(tau))
    }

    pub fn epoch(&self) -> Result<Selection> {
        let m = self.cube.members();
        let best = argmin((0..self.cube.snapshots()).map(|t| self.ensemble_error(&vec![t; m])))?;
        Ok(Selection::uniform(vec![best; m]))
    }

    pub fn neuralbag(&self) -> Result<Selection> {
        if self.mode != ValidationMode::OutOfBag {
            return Err(invalid("NeuralBAG needs out-of-bag validation"));
        }
        let cube = self.cube;
        let m = cube.members();
        let w = cube.oob_weights().ok_or(Error::MissingOobWeights)?;
        let t = cube.targets();
        let mut tau = Vec::with_capacity(m);
        for n in 0..m {
            let points = self.points(n)?;
            let errors = (0..cube.snapshots()).map(|s| {
                self.charge(m);
                points
                    .iter()
                    .map(|&p| {
                        let wrow = &w[p * m..(p + 1) * m];
                        let phi: f64 = wrow
                            .iter()
                            .enumerate()
                            .filter(|(_, wpk)| **wpk != 0.0)
                            .map(|(k, wpk)| wpk * cube.value(k, s, p))
                            .sum();
                        (t[p] - phi).powi(2)
                    })
                    .sum::<f64>()
            });
            tau.push(argmin(errors.map(Ok))?);
        }
        Ok(Selection::uniform(tau))
    }

    /// Stagewise construction. `order[i]` is the member added at stage `i + 1`.
    pub fn seca(&self, order: &[usize]) -> Result<Selection> {
        let m = self.cube.members();
        check_permutation(order, m)?;
        let mut frozen: Vec<usize> = Vec::with_capacity(m);
        let mut tau = vec![0; m];
        for (stage, &net) in order.iter().enumerate() {
            let points = self.points(net)?;
            let members = &order[..=stage];
            let best = argmin((0..self.cube.snapshots()).map(|s| {
                frozen.push(s);
                self.charge(stage + 1);
                let e = self.partial_sse(members, &frozen, &points);
                frozen.pop();
                Ok(e)
            }))?;
            frozen.push(best);
            tau[net] = best;
        }
        Ok(Selection::uniform(tau))
    }

    pub fn simann(&self, cfg: &SimAnnConfig, start: &Selection) -> Result<Selection> {
        simann::run(self, cfg, start)
    }
}

/// First index of the smallest value.
fn argmin(values: impl Iterator<Item = Result<f64>>) -> Result<usize> {
    let mut best = (0, f64::INFINITY);
    for (i, v) in values.enumerate() {
        let v = v?;
        if v < best.1 {
            best = (i, v);
        }
    }
    Ok(best.0)
}

fn check_permutation(order: &[usize], m: usize) -> Result<()> {
    let mut seen = vec![false; m];
    if order.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: order.len(),
        });
    }
    for &i in order {
        if i >= m || std::mem::replace(&mut seen[i], true) {
            return Err(invalid("SECA order is not a permutation of the members"));
        }
    }
    Ok(())
}

/// Members in index order, or shuffled by `seed`.
pub fn member_order(m: usize, seed: Option<u64>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m).collect();
    if let Some(seed) = seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    order
}

pub fn select_bagging(cube: &PredictionCube, mode: ValidationMode) -> Result<Selection> {
    Objective::new(cube, mode)?.bagging()
}

pub fn select_epoch(cube: &PredictionCube, mode: ValidationMode) -> Result<Selection> {
    Objective::new(cube, mode)?.epoch()
}

pub fn select_neuralbag(cube: &PredictionCube) -> Result<Selection> {
    Objective::new(cube, ValidationMode::OutOfBag)?.neuralbag()
}

pub fn select_seca(cube: &PredictionCube, mode: ValidationMode, order: &[usize]) -> Result<Selection> {
    Objective::new(cube, mode)?.seca(order)
}

pub fn select_simann(
    cube: &PredictionCube,
    mode: ValidationMode,
    cfg: &SimAnnConfig,
    start: &Selection,
) -> Result<Selection> {
    Objective::new(cube, mode)?.simann(cfg, start)
}
