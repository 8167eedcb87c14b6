use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::config::{ExperimentConfig, NoiseLevel};
use super::run::RunRecord;
use crate::error::{Error, Result};
use crate::weighting::sign_test;

/// Mean outcome of one algorithm over all replications of one setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub dataset: String,
    pub validation: String,
    pub noise: String,
    pub length: usize,
    pub algorithm: String,
    pub runs: usize,
    pub mean_nmse: f64,
    pub mean_error: Option<f64>,
    pub variance: Option<f64>,
}

/// Fraction of runs in which `algorithm` had lower test NMSE than `baseline`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignRow {
    pub dataset: String,
    pub validation: String,
    pub noise: String,
    pub length: usize,
    pub algorithm: String,
    pub baseline: String,
    pub wins: usize,
    pub runs: usize,
    pub fraction: f64,
    pub p_value: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
    pub signs: Vec<SignRow>,
}

const SUMMARY_HEADER: [&str; 9] = [
    "dataset",
    "validation",
    "noise",
    "length",
    "algorithm",
    "runs",
    "mean_nmse",
    "mean_error",
    "variance",
];
const SIGN_HEADER: [&str; 11] = [
    "dataset",
    "validation",
    "noise",
    "length",
    "algorithm",
    "baseline",
    "wins",
    "runs",
    "fraction",
    "p_value",
    "significant",
];

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

impl Summary {
    /// Mean NMSE per algorithm, sign tests of every algorithm against the
    /// baseline and of every weighted variant against its unweighted selector.
    pub fn from_records(cfg: &ExperimentConfig, records: &[RunRecord]) -> Result<Self> {
        let meta = (cfg.dataset.name(), cfg.validation.to_string(), cfg.noise.to_string(), cfg.train_size);
        let mut labels: Vec<String> = Vec::new();
        for r in records.iter().flat_map(|r| &r.reports) {
            if !labels.contains(&r.algorithm) {
                labels.push(r.algorithm.clone());
            }
        }
        let values = |label: &str| -> Vec<_> {
            records
                .iter()
                .filter_map(|rec| rec.reports.iter().find(|r| r.algorithm == label))
                .collect()
        };
        let mut out = Summary::default();
        for label in &labels {
            let reps = values(label);
            let opt = |f: fn(&crate::weighting::EvalReport) -> Option<f64>| {
                reps.iter().map(|r| f(r)).collect::<Option<Vec<_>>>().map(|v| mean(v.into_iter()))
            };
            out.rows.push(SummaryRow {
                dataset: meta.0.clone(),
                validation: meta.1.clone(),
                noise: meta.2.clone(),
                length: meta.3,
                algorithm: label.clone(),
                runs: reps.len(),
                mean_nmse: mean(reps.iter().map(|r| r.nmse)),
                mean_error: opt(|r| r.mean_error),
                variance: opt(|r| r.variance),
            });
        }
        let base = cfg.baseline.label();
        let mut pairs: Vec<(String, String)> = labels
            .iter()
            .filter(|l| *l != base)
            .map(|l| (l.clone(), base.to_string()))
            .collect();
        for l in &labels {
            if let Some(plain) = l.strip_prefix("W-") {
                if plain != base && labels.iter().any(|x| x == plain) {
                    pairs.push((l.clone(), plain.to_string()));
                }
            }
        }
        for (alg, against) in pairs {
            let mut wins = 0;
            let mut runs = 0;
            for rec in records {
                if let (Some(a), Some(b)) = (rec.nmse_of(&alg), rec.nmse_of(&against)) {
                    runs += 1;
                    wins += usize::from(a < b);
                }
            }
            if runs == 0 {
                continue;
            }
            let t = sign_test(wins, runs)?;
            out.signs.push(SignRow {
                dataset: meta.0.clone(),
                validation: meta.1.clone(),
                noise: meta.2.clone(),
                length: meta.3,
                algorithm: alg,
                baseline: against,
                wins,
                runs,
                fraction: t.fraction,
                p_value: t.p_value,
                significant: t.significant,
            });
        }
        Ok(out)
    }

    pub fn extend(&mut self, other: Summary) {
        self.rows.extend(other.rows);
        self.signs.extend(other.signs);
    }

    pub fn row(&self, algorithm: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.algorithm == algorithm)
    }

    pub fn sign(&self, algorithm: &str, baseline: &str) -> Option<&SignRow> {
        self.signs
            .iter()
            .find(|s| s.algorithm == algorithm && s.baseline == baseline)
    }

    /// Writes `summary.csv` and `signs.csv`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
        w.write_record(SUMMARY_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.dataset.clone(),
                r.validation.clone(),
                r.noise.clone(),
                r.length.to_string(),
                r.algorithm.clone(),
                r.runs.to_string(),
                format!("{}", r.mean_nmse),
                opt(r.mean_error),
                opt(r.variance),
            ])?;
        }
        w.flush()?;
        let mut w = csv::Writer::from_path(dir.join("signs.csv"))?;
        w.write_record(SIGN_HEADER)?;
        for s in &self.signs {
            w.write_record([
                s.dataset.clone(),
                s.validation.clone(),
                s.noise.clone(),
                s.length.to_string(),
                s.algorithm.clone(),
                s.baseline.clone(),
                s.wins.to_string(),
                s.runs.to_string(),
                format!("{}", s.fraction),
                format!("{}", s.p_value),
                s.significant.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads what [`write_dir`](Self::write_dir) wrote.
    pub fn read_dir(dir: &Path) -> Result<Self> {
        let mut out = Summary::default();
        for_each_record(&dir.join("summary.csv"), SUMMARY_HEADER.len(), |f| {
            out.rows.push(SummaryRow {
                dataset: f.text(0),
                validation: f.text(1),
                noise: f.text(2),
                length: f.parse(3)?,
                algorithm: f.text(4),
                runs: f.parse(5)?,
                mean_nmse: f.parse(6)?,
                mean_error: f.optional(7)?,
                variance: f.optional(8)?,
            });
            Ok(())
        })?;
        for_each_record(&dir.join("signs.csv"), SIGN_HEADER.len(), |f| {
            out.signs.push(SignRow {
                dataset: f.text(0),
                validation: f.text(1),
                noise: f.text(2),
                length: f.parse(3)?,
                algorithm: f.text(4),
                baseline: f.text(5),
                wins: f.parse(6)?,
                runs: f.parse(7)?,
                fraction: f.parse(8)?,
                p_value: f.parse(9)?,
                significant: f.parse(10)?,
            });
            Ok(())
        })?;
        Ok(out)
    }
}

struct Fields<'a> {
    record: &'a csv::StringRecord,
    path: &'a Path,
    line: u64,
}

impl Fields<'_> {
    fn text(&self, i: usize) -> String {
        self.record[i].to_string()
    }

    fn error(&self, i: usize) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line: self.line,
            message: format!("bad field {} {:?}", i + 1, &self.record[i]),
        }
    }

    fn parse<T: std::str::FromStr>(&self, i: usize) -> Result<T> {
        self.record[i].parse().map_err(|_| self.error(i))
    }

    fn optional(&self, i: usize) -> Result<Option<f64>> {
        match &self.record[i] {
            "" => Ok(None),
            _ => self.parse(i).map(Some),
        }
    }
}

fn for_each_record(path: &Path, width: usize, mut f: impl FnMut(&Fields<'_>) -> Result<()>) -> Result<()> {
    let mut rd = csv::Reader::from_path(path)?;
    for rec in rd.records() {
        let record = rec?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("expected {width} fields, got {}", record.len()),
            });
        }
        f(&Fields {
            record: &record,
            path,
            line,
        })?;
    }
    Ok(())
}

/// Rendered tables: markdown plus flat CSV views.
#[derive(Debug, Clone, PartialEq)]
pub struct Tables {
    pub markdown: String,
    pub nmse_csv: String,
    pub sign_csv: String,
}

type SettingKey = (String, String);
type RowKey = (u8, String, usize);

fn row_key(noise: &str, length: usize) -> RowKey {
    let rank = noise.parse::<NoiseLevel>().map_or(u8::MAX, |n| n as u8);
    (rank, noise.to_string(), length)
}

/// One NMSE table (units of 10⁻², best per row in bold) and one sign-test
/// table per dataset and validation scheme. Writes `tables.md`,
/// `nmse_table.csv` and `sign_table.csv` when `dir` is given.
pub fn emit_tables(summary: &Summary, dir: Option<&Path>) -> Result<Tables> {
    let mut groups: BTreeMap<SettingKey, (Vec<String>, BTreeMap<RowKey, Vec<(String, f64)>>)> = BTreeMap::new();
    for r in &summary.rows {
        let (cols, rows) = groups
            .entry((r.dataset.clone(), r.validation.clone()))
            .or_default();
        if !cols.contains(&r.algorithm) {
            cols.push(r.algorithm.clone());
        }
        rows.entry(row_key(&r.noise, r.length))
            .or_default()
            .push((r.algorithm.clone(), r.mean_nmse));
    }
    let mut sign_groups: BTreeMap<SettingKey, (Vec<String>, BTreeMap<RowKey, Vec<(String, &SignRow)>>)> =
        BTreeMap::new();
    for s in &summary.signs {
        let label = format!("{} vs {}", s.algorithm, s.baseline);
        let (cols, rows) = sign_groups
            .entry((s.dataset.clone(), s.validation.clone()))
            .or_default();
        if !cols.contains(&label) {
            cols.push(label.clone());
        }
        rows.entry(row_key(&s.noise, s.length)).or_default().push((label, s));
    }

    let mut md = String::new();
    let mut nmse_csv = csv::Writer::from_writer(Vec::new());
    nmse_csv.write_record(["dataset", "validation", "noise", "length", "algorithm", "nmse_e2", "best"])?;
    let mut sign_csv = csv::Writer::from_writer(Vec::new());
    sign_csv.write_record(["dataset", "validation", "noise", "length", "comparison", "fraction", "significant"])?;

    if groups.is_empty() {
        md.push_str("| Noise | Length |\n|---|---|\n");
    }
    for ((dataset, validation), (cols, rows)) in &groups {
        writeln!(md, "## {dataset}, {validation}\n").unwrap();
        write_header(&mut md, cols);
        for ((_, noise, length), cells) in rows {
            let best = cells.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
            write!(md, "| {noise} | {length} |").unwrap();
            for col in cols {
                match cells.iter().find(|c| &c.0 == col) {
                    Some(&(_, v)) => {
                        let cell = format!("{:.2}", v * 100.0);
                        if v == best {
                            write!(md, " **{cell}** |").unwrap();
                        } else {
                            write!(md, " {cell} |").unwrap();
                        }
                        nmse_csv.write_record([
                            dataset.clone(),
                            validation.clone(),
                            noise.clone(),
                            length.to_string(),
                            col.clone(),
                            format!("{}", v * 100.0),
                            (v == best).to_string(),
                        ])?;
                    }
                    None => md.push_str(" |"),
                }
            }
            md.push('\n');
        }
        md.push('\n');
        if let Some((scols, srows)) = sign_groups.get(&(dataset.clone(), validation.clone())) {
            writeln!(md, "Fraction of runs won (bold: significant at 95%)\n").unwrap();
            write_header(&mut md, scols);
            for ((_, noise, length), cells) in srows {
                write!(md, "| {noise} | {length} |").unwrap();
                for col in scols {
                    match cells.iter().find(|c| &c.0 == col) {
                        Some((_, s)) => {
                            if s.significant {
                                write!(md, " **{:.2}** |", s.fraction).unwrap();
                            } else {
                                write!(md, " {:.2} |", s.fraction).unwrap();
                            }
                            sign_csv.write_record([
                                dataset.clone(),
                                validation.clone(),
                                noise.clone(),
                                length.to_string(),
                                col.clone(),
                                format!("{}", s.fraction),
                                s.significant.to_string(),
                            ])?;
                        }
                        None => md.push_str(" |"),
                    }
                }
                md.push('\n');
            }
            md.push('\n');
        }
    }
    let into_string = |w: csv::Writer<Vec<u8>>| -> Result<String> {
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    };
    let tables = Tables {
        markdown: md,
        nmse_csv: into_string(nmse_csv)?,
        sign_csv: into_string(sign_csv)?,
    };
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("tables.md"), &tables.markdown)?;
        fs::write(dir.join("nmse_table.csv"), &tables.nmse_csv)?;
        fs::write(dir.join("sign_table.csv"), &tables.sign_csv)?;
    }
    Ok(tables)
}

fn write_header(md: &mut String, cols: &[String]) {
    md.push_str("| Noise | Length |");
    for c in cols {
        write!(md, " {c} |").unwrap();
    }
    md.push_str("\n|---|---|");
    for _ in cols {
        md.push_str("---|");
    }
    md.push('\n');
}
