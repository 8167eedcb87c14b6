use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Objective;
use crate::ensemble::Selection;
use crate::error::{invalid, Result};

/// Annealing schedule over the vector of stopping snapshots.
#[derive(Debug, Clone, PartialEq)]
pub struct SimAnnConfig {
    pub steps: usize,
    /// Proposal half-width in snapshot units; a move is `round(r · delta_scale)`
    /// with `r` uniform on `[-1, 1]`.
    pub delta_scale: f64,
    pub cooling_base: f64,
    pub seed: u64,
}

impl SimAnnConfig {
    /// `steps = sweeps · T`, `delta_scale = T / 20`, cooling base 0.995.
    pub fn for_snapshots(t: usize, sweeps: usize, seed: u64) -> Self {
        Self {
            steps: sweeps * t,
            delta_scale: t as f64 / 20.0,
            cooling_base: 0.995,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cooling_base > 0.0 && self.cooling_base < 1.0) {
            return Err(invalid("cooling_base must lie in (0, 1)"));
        }
        if !(self.delta_scale.is_finite() && self.delta_scale >= 0.0) {
            return Err(invalid("delta_scale must be finite and >= 0"));
        }
        Ok(())
    }
}

pub(super) fn run(obj: &Objective<'_>, cfg: &SimAnnConfig, start: &Selection) -> Result<Selection> {
    cfg.validate()?;
    let cube = obj.cube();
    start.check_against(cube)?;
    let m = cube.members();
    let t_max = cube.snapshots() as i64 - 1;

    let before = obj.evaluations();
    let e_start = obj.ensemble_error(start.tau())?;
    obj.evaluations.set(before);
    obj.setup_evaluations.set(obj.setup_evaluations() + m as u64);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut cur = start.tau().to_vec();
    let mut e_cur = e_start;
    let mut best = cur.clone();
    let mut e_best = e_cur;
    let mut temperature = e_start / 2.0;

    for q in 0..cfg.steps {
        temperature *= cfg.cooling_base;
        let n = q % m;
        let r: f64 = rng.random_range(-1.0..=1.0);
        let mut step = (r * cfg.delta_scale).round() as i64;
        if step == 0 {
            step = if r < 0.0 { -1 } else { 1 };
        }
        let old = cur[n];
        cur[n] = (old as i64 + step).clamp(0, t_max) as usize;
        let e = obj.ensemble_error(&cur)?;
        let delta = e - e_cur;
        let u: f64 = rng.random();
        let accept = delta < 0.0 || (temperature > 0.0 && u < 1.0 / (1.0 + (delta / temperature).exp()));
        if accept {
            e_cur = e;
            if e < e_best {
                e_best = e;
                best.copy_from_slice(&cur);
            }
        } else {
            cur[n] = old;
        }
    }
    Ok(Selection::uniform(best))
}
