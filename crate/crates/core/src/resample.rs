//! Bootstrap re-samples, out-of-bag membership and external validation splits.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};

/// `M` bootstrap re-samples of `0..N` and their out-of-bag complements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BootstrapPlan {
    n: usize,
    train: Vec<Vec<usize>>,
    oob: Vec<Vec<usize>>,
    /// Row-major `N × M`: `gamma[p·M + m]` is true iff `p` is out of bag for `m`.
    gamma: Vec<bool>,
}

impl BootstrapPlan {
    fn from_train(n: usize, train: Vec<Vec<usize>>) -> Result<Self> {
        let m = train.len();
        let mut gamma = vec![true; n * m];
        for (net, draws) in train.iter().enumerate() {
            for &p in draws {
                if p >= n {
                    return Err(Error::IndexOutOfRange { index: p, len: n });
                }
                gamma[p * m + net] = false;
            }
        }
        let oob = (0..m)
            .map(|net| (0..n).filter(|p| gamma[p * m + net]).collect())
            .collect();
        Ok(Self { n, train, oob, gamma })
    }

    pub fn data_len(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> usize {
        self.train.len()
    }

    /// Training multiset `L_m` (draw order preserved).
    pub fn train_indices(&self, member: usize) -> &[usize] {
        &self.train[member]
    }

    /// Out-of-bag set `V_m`, sorted.
    pub fn oob_indices(&self, member: usize) -> &[usize] {
        &self.oob[member]
    }

    pub fn in_oob(&self, point: usize, member: usize) -> bool {
        self.gamma[point * self.members() + member]
    }

    pub fn gamma(&self) -> &[bool] {
        &self.gamma
    }

    /// One line per member with its training indices; a leading comment line
    /// records `N` and `M`.
    pub fn to_text(&self) -> String {
        let mut s = format!("# bootstrap N={} M={}\n", self.n, self.members());
        for draws in &self.train {
            let mut first = true;
            for i in draws {
                if !std::mem::take(&mut first) {
                    s.push(' ');
                }
                let _ = write!(s, "{i}");
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut n = None;
        let mut train = Vec::new();
        for line in text.lines() {
            if let Some(header) = line.strip_prefix('#') {
                for tok in header.split_whitespace() {
                    if let Some(v) = tok.strip_prefix("N=") {
                        n = Some(v.parse().map_err(|_| Error::Format(format!("bad N: {v}")))?);
                    }
                }
                continue;
            }
            let draws = line
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| Error::Format(format!("bad index: {t}"))))
                .collect::<Result<Vec<_>>>()?;
            train.push(draws);
        }
        let n = n.ok_or_else(|| Error::Format("missing `# bootstrap N=` header".into()))?;
        Self::from_train(n, train)
    }
}

/// `m` uniform with-replacement draws of size `n` from `0..n`.
pub fn make_bootstrap_plan(n: usize, m: usize, seed: u64) -> Result<BootstrapPlan> {
    if n < 2 {
        return Err(invalid(format!("bootstrap needs at least 2 patterns, got {n}")));
    }
    if m < 1 {
        return Err(invalid("bootstrap needs at least 1 member"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let train = (0..m)
        .map(|_| (0..n).map(|_| rng.random_range(0..n)).collect())
        .collect();
    BootstrapPlan::from_train(n, train)
}

/// Random partition of `0..n` into (learn, validation) with
/// `round(fraction·n)` validation indices. Both parts are returned sorted.
pub fn external_split(n: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(invalid(format!("validation fraction must lie in (0, 1), got {fraction}")));
    }
    let v = (fraction * n as f64).round() as usize;
    if v == 0 || v >= n {
        return Err(invalid(format!(
            "fraction {fraction} of {n} patterns leaves an empty part"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut validation = idx[..v].to_vec();
    let mut learn = idx[v..].to_vec();
    validation.sort_unstable();
    learn.sort_unstable();
    Ok((learn, validation))
}

/// Out-of-bag averaging weights `w_pm = γ_pm / Σ_m γ_pm`.
#[derive(Debug, Clone, PartialEq)]
pub struct OobWeights {
    pub members: usize,
    /// Row-major `P × M`; all-zero rows for uncovered patterns.
    pub weights: Vec<f64>,
    /// Patterns that are in every training set and so have no out-of-bag member.
    pub uncovered: Vec<usize>,
}

/// `gamma` is row-major `P × members`.
pub fn oob_prediction_weights(gamma: &[bool], members: usize) -> Result<OobWeights> {
    if members == 0 || !gamma.len().is_multiple_of(members) {
        return Err(invalid("gamma length is not a multiple of the member count"));
    }
    let mut weights = vec![0.0; gamma.len()];
    let mut uncovered = Vec::new();
    for (p, (row, out)) in gamma
        .chunks_exact(members)
        .zip(weights.chunks_exact_mut(members))
        .enumerate()
    {
        let k = row.iter().filter(|&&g| g).count();
        if k == 0 {
            uncovered.push(p);
            continue;
        }
        let w = 1.0 / k as f64;
        for (o, &g) in out.iter_mut().zip(row) {
            if g {
                *o = w;
            }
        }
    }
    Ok(OobWeights {
        members,
        weights,
        uncovered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_single_pattern() {
        assert!(make_bootstrap_plan(1, 5, 0).is_err());
        assert!(make_bootstrap_plan(5, 0, 0).is_err());
    }

    #[test]
    fn distinct_and_oob_fractions() {
        let plan = make_bootstrap_plan(1000, 200, 7).unwrap();
        let mut distinct = 0.0;
        let mut oob = 0.0;
        for m in 0..200 {
            let mut seen = plan.train_indices(m).to_vec();
            seen.sort_unstable();
            seen.dedup();
            distinct += seen.len() as f64 / 1000.0;
            oob += plan.oob_indices(m).len() as f64 / 1000.0;
        }
        assert!((distinct / 200.0 - 0.632).abs() < 0.01);
        assert!((oob / 200.0 - 0.368).abs() < 0.01);
    }

    #[test]
    fn split_sizes() {
        let (l, v) = external_split(10, 0.2, 1).unwrap();
        assert_eq!((l.len(), v.len()), (8, 2));
        let (l, v) = external_split(200, 0.37, 1).unwrap();
        assert_eq!((l.len(), v.len()), (126, 74));
        assert!(external_split(10, 0.0, 1).is_err());
        assert!(external_split(10, 1.0, 1).is_err());
        assert!(external_split(3, 0.1, 1).is_err());
    }

    #[test]
    fn oob_weight_cases() {
        // p0 only in V_1, p1 in all, p2 in none
        let gamma = [false, true, false, true, true, true, false, false, false];
        let w = oob_prediction_weights(&gamma, 3).unwrap();
        assert_eq!(&w.weights[0..3], &[0.0, 1.0, 0.0]);
        assert_eq!(&w.weights[3..6], &[1.0 / 3.0; 3]);
        assert_eq!(&w.weights[6..9], &[0.0; 3]);
        assert_eq!(w.uncovered, vec![2]);
    }

    #[test]
    fn oob_support_is_about_37_percent() {
        let mut total = 0.0;
        let mut count = 0.0;
        for seed in 0..50 {
            let plan = make_bootstrap_plan(200, 20, seed).unwrap();
            for row in plan.gamma().chunks_exact(20) {
                total += row.iter().filter(|&&g| g).count() as f64;
                count += 1.0;
            }
        }
        let mean = total / count;
        assert!((mean / 20.0 - 0.368).abs() < 0.01, "{mean}");
    }

    #[test]
    fn text_round_trip() {
        let plan = make_bootstrap_plan(12, 3, 4).unwrap();
        let text = plan.to_text();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(BootstrapPlan::from_text(&text).unwrap(), plan);
    }

    proptest! {
        #[test]
        fn plan_invariants(n in 2usize..60, m in 1usize..8, seed in any::<u64>()) {
            let plan = make_bootstrap_plan(n, m, seed).unwrap();
            prop_assert_eq!(plan.clone(), make_bootstrap_plan(n, m, seed).unwrap());
            for net in 0..m {
                prop_assert_eq!(plan.train_indices(net).len(), n);
                let mut covered: Vec<usize> = plan.train_indices(net).to_vec();
                covered.extend_from_slice(plan.oob_indices(net));
                covered.sort_unstable();
                covered.dedup();
                prop_assert_eq!(covered, (0..n).collect::<Vec<_>>());
                for p in 0..n {
                    let brute = !plan.train_indices(net).contains(&p);
                    prop_assert_eq!(plan.in_oob(p, net), brute);
                }
            }
            let w = oob_prediction_weights(plan.gamma(), m).unwrap();
            for (p, row) in w.weights.chunks_exact(m).enumerate() {
                let s: f64 = row.iter().sum();
                if w.uncovered.contains(&p) {
                    prop_assert_eq!(s, 0.0);
                } else {
                    prop_assert!((s - 1.0).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn split_is_a_partition(n in 2usize..300, frac in 0.05f64..0.95, seed in any::<u64>()) {
            if let Ok((l, v)) = external_split(n, frac, seed) {
                prop_assert_eq!(v.len(), (frac * n as f64).round() as usize);
                let mut all = l.clone();
                all.extend(&v);
                all.sort_unstable();
                prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            }
        }
    }
}
