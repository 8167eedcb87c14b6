//! Member weighting laws, normalized errors, the accuracy/diversity split and
//! the paired sign test.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use statrs::distribution::{Binomial, DiscreteCDF};

use crate::ensemble::{ensemble_predict, PredictionCube, Selection};
use crate::error::{invalid, Error, Result};

/// Decreasing function of member error used to weight an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightLaw {
    /// `w ∝ e^{-α}`
    Power,
    /// `w ∝ exp(-α e)`
    Exp,
}

impl fmt::Display for WeightLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Power => "power",
            Self::Exp => "exp",
        })
    }
}

impl FromStr for WeightLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" | "pow" => Ok(Self::Power),
            "exp" | "exponential" => Ok(Self::Exp),
            _ => Err(invalid(format!("unknown weighting law {s:?}"))),
        }
    }
}

fn check_errors(e: &[f64], alpha: f64) -> Result<()> {
    if e.is_empty() {
        return Err(invalid("no member errors"));
    }
    if e.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(invalid("member errors must be finite and >= 0"));
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(invalid("alpha must be finite and >= 0"));
    }
    Ok(())
}

/// `w_i = e_i^{-α} / Σ_j e_j^{-α}`.
///
/// With `α > 0`, members with zero error share all the weight equally.
pub fn weights_power(e: &[f64], alpha: f64) -> Result<Vec<f64>> {
    check_errors(e, alpha)?;
    let m = e.len();
    if alpha == 0.0 {
        return Ok(vec![1.0 / m as f64; m]);
    }
    let zeros = e.iter().filter(|&&v| v == 0.0).count();
    if zeros > 0 {
        let w = 1.0 / zeros as f64;
        return Ok(e.iter().map(|&v| if v == 0.0 { w } else { 0.0 }).collect());
    }
    // Log space keeps large α from overflowing.
    let logs: Vec<f64> = e.iter().map(|v| -alpha * v.ln()).collect();
    Ok(softmax(&logs))
}

/// `w_i = exp(-α e_i) / Σ_j exp(-α e_j)`.
pub fn weights_exp(e: &[f64], alpha: f64) -> Result<Vec<f64>> {
    check_errors(e, alpha)?;
    let logs: Vec<f64> = e.iter().map(|v| -alpha * v).collect();
    Ok(softmax(&logs))
}

fn softmax(logs: &[f64]) -> Vec<f64> {
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|r| r / total).collect()
}

pub fn weights(law: WeightLaw, e: &[f64], alpha: f64) -> Result<Vec<f64>> {
    match law {
        WeightLaw::Power => weights_power(e, alpha),
        WeightLaw::Exp => weights_exp(e, alpha),
    }
}

/// Mean squared error divided by the data-set target variance.
pub fn nmse(predictions: &[f64], targets: &[f64], total_variance: f64) -> Result<f64> {
    if predictions.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: targets.len(),
            got: predictions.len(),
        });
    }
    if targets.is_empty() {
        return Err(invalid("no points"));
    }
    if !(total_variance > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let mse = crate::ensemble::sse(targets, predictions) / targets.len() as f64;
    Ok(mse / total_variance)
}

/// `(mean member error, mean across-member variance)` of a uniformly weighted
/// selection over all cube points. Their difference is the ensemble MSE.
pub fn accuracy_diversity(cube: &PredictionCube, sel: &Selection) -> Result<(f64, f64)> {
    sel.check_against(cube)?;
    if !sel.is_uniform() {
        return Err(invalid("accuracy/diversity split needs uniform weights"));
    }
    let p = cube.points();
    if p == 0 {
        return Err(invalid("no points"));
    }
    let m = sel.members() as f64;
    let mean = ensemble_predict(cube, sel)?;
    let (mut err, mut var) = (0.0, 0.0);
    for (n, &tau) in sel.tau().iter().enumerate() {
        for ((y, t), phi) in cube.row(n, tau).iter().zip(cube.targets()).zip(&mean) {
            err += (t - y) * (t - y);
            var += (y - phi) * (y - phi);
        }
    }
    let scale = 1.0 / (m * p as f64);
    Ok((err * scale, var * scale))
}

/// Win fraction and two-sided exact binomial significance at the 5% level
/// against a fair coin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignTest {
    pub wins: usize,
    pub runs: usize,
    pub fraction: f64,
    pub p_value: f64,
    pub significant: bool,
}

pub fn sign_test(wins: usize, runs: usize) -> Result<SignTest> {
    if runs == 0 {
        return Err(invalid("sign test needs at least one run"));
    }
    if wins > runs {
        return Err(invalid("more wins than runs"));
    }
    let dist = Binomial::new(0.5, runs as u64).map_err(|e| invalid(e.to_string()))?;
    let k = wins.min(runs - wins) as u64;
    let p_value = (2.0 * dist.cdf(k)).min(1.0);
    Ok(SignTest {
        wins,
        runs,
        fraction: wins as f64 / runs as f64,
        p_value,
        significant: p_value < 0.05,
    })
}

/// Per-member MSE at the selected snapshots, over every cube point.
pub fn member_errors(cube: &PredictionCube, sel: &Selection) -> Result<Vec<f64>> {
    sel.check_against(cube)?;
    let p = cube.points();
    if p == 0 {
        return Err(invalid("no points"));
    }
    Ok(sel
        .tau()
        .iter()
        .enumerate()
        .map(|(n, &tau)| crate::ensemble::sse(cube.targets(), cube.row(n, tau)) / p as f64)
        .collect())
}

/// Replace the weights of `sel` by `law(α)` of the member errors over
/// `data_cube` (all training data, never test points).
pub fn weight_selection(sel: &Selection, data_cube: &PredictionCube, law: WeightLaw, alpha: f64) -> Result<Selection> {
    let e = member_errors(data_cube, sel)?;
    sel.with_weights(weights(law, &e, alpha)?)
}

/// One algorithm's outcome on one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub run_id: usize,
    pub dataset: String,
    pub noise: String,
    pub length: usize,
    pub algorithm: String,
    pub nmse: f64,
    /// Present for uniformly weighted ensembles only.
    pub mean_error: Option<f64>,
    pub variance: Option<f64>,
}

impl EvalReport {
    pub const CSV_HEADER: [&'static str; 8] =
        ["run_id", "dataset", "noise", "length", "algorithm", "nmse", "mean_error", "variance"];

    fn csv_fields(&self) -> [String; 8] {
        let opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        [
            self.run_id.to_string(),
            self.dataset.clone(),
            self.noise.clone(),
            self.length.to_string(),
            self.algorithm.clone(),
            format!("{}", self.nmse),
            opt(self.mean_error),
            opt(self.variance),
        ]
    }

    pub fn write_csv<W: Write>(reports: &[EvalReport], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::CSV_HEADER)?;
        for r in reports {
            w.write_record(r.csv_fields())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<EvalReport>> {
        let mut rd = csv::Reader::from_reader(input);
        let mut out = Vec::new();
        for (i, rec) in rd.records().enumerate() {
            let rec = rec?;
            let line = i as u64 + 2;
            let bad = |what: &str| Error::Parse {
                path: "<report>".into(),
                line,
                message: format!("bad {what}"),
            };
            let get = |k: usize| rec.get(k).ok_or_else(|| bad("column count"));
            let num = |k: usize, what: &str| -> Result<f64> { get(k)?.parse().map_err(|_| bad(what)) };
            let opt = |k: usize, what: &str| -> Result<Option<f64>> {
                match get(k)? {
                    "" => Ok(None),
                    s => s.parse().map(Some).map_err(|_| bad(what)),
                }
            };
            out.push(EvalReport {
                run_id: get(0)?.parse().map_err(|_| bad("run_id"))?,
                dataset: get(1)?.to_string(),
                noise: get(2)?.to_string(),
                length: get(3)?.parse().map_err(|_| bad("length"))?,
                algorithm: get(4)?.to_string(),
                nmse: num(5, "nmse")?,
                mean_error: opt(6, "mean_error")?,
                variance: opt(7, "variance")?,
            });
        }
        Ok(out)
    }
}
