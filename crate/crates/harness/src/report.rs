//! Output files and aggregation of records.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::{ExperimentConfig, Task};
use crate::error::{HarnessError, Result};
use crate::run::ExperimentRecord;

pub const METADATA_FILE: &str = "metadata.json";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const REPORTS_FILE: &str = "reports.txt";

#[derive(Serialize)]
struct InequalityRow<'a> {
    instance_id: &'a str,
    d: usize,
    n: usize,
    lhs: f64,
    rhs: f64,
    ratio: f64,
    field: &'a str,
    seed: u64,
}

#[derive(Serialize)]
struct LearnRow<'a> {
    instance_id: &'a str,
    task: &'a str,
    d: usize,
    n: usize,
    seed: u64,
    shot_multiplier: f64,
    shots_override: Option<u128>,
    total_queries: u128,
    metric: &'a str,
    error: f64,
    success: bool,
}

/// Per-record CSV. Inequality tasks use `instance_id,d,n,lhs,rhs,ratio,field,seed`.
pub fn write_csv(records: &[ExperimentRecord], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        if let Some(q) = &r.inequality {
            out.serialize(InequalityRow {
                instance_id: &r.instance_id,
                d: r.d,
                n: r.n,
                lhs: q.lhs,
                rhs: q.rhs,
                ratio: q.ratio,
                field: q.field.name(),
                seed: r.seed,
            })?;
        } else if let Some(l) = &r.learn {
            out.serialize(LearnRow {
                instance_id: &r.instance_id,
                task: r.task.name(),
                d: r.d,
                n: r.n,
                seed: r.seed,
                shot_multiplier: r.shot_multiplier,
                shots_override: r.shots_override,
                total_queries: l.total_queries,
                metric: &l.metric,
                error: l.error,
                success: l.success,
            })?;
        }
    }
    out.flush()?;
    Ok(())
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Median of unsorted values (mean of the middle pair for even counts).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        return f64::NAN;
    }
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Aggregate over records sharing task, degree, size and shot setting.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub task: String,
    pub d: usize,
    pub n: usize,
    pub shot_multiplier: f64,
    pub shots_override: Option<u128>,
    pub runs: usize,
    pub median_error: f64,
    pub p90_error: f64,
    pub success_fraction: f64,
    pub total_queries: u128,
    pub max_ratio: f64,
}

type GroupKey = (usize, usize, u64, Option<u128>);

/// Groups records; fails on mixed tasks.
pub fn summarize(records: &[ExperimentRecord]) -> Result<Vec<SummaryRow>> {
    let Some(first) = records.first() else {
        return Ok(Vec::new());
    };
    let task = first.task;
    if let Some(other) = records.iter().find(|r| r.task != task) {
        return Err(HarnessError::config(format!(
            "mixed-task input: {} and {}",
            task.name(),
            other.task.name()
        )));
    }
    let mut groups: BTreeMap<GroupKey, Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.d, r.n, r.shot_multiplier.to_bits(), r.shots_override))
            .or_default()
            .push(r);
    }
    let mut rows = Vec::new();
    for ((d, n, mult, shots), rs) in groups {
        let mut errors: Vec<f64> = rs.iter().filter_map(|r| r.learn.as_ref().map(|l| l.error)).collect();
        errors.sort_by(f64::total_cmp);
        let successes = rs.iter().filter(|r| r.learn.as_ref().is_some_and(|l| l.success)).count();
        rows.push(SummaryRow {
            task: task.name().to_string(),
            d,
            n,
            shot_multiplier: f64::from_bits(mult),
            shots_override: shots,
            runs: rs.len(),
            median_error: median(&errors),
            p90_error: quantile(&errors, 0.9),
            success_fraction: if task.is_inequality() {
                f64::NAN
            } else {
                successes as f64 / rs.len() as f64
            },
            total_queries: rs.iter().filter_map(|r| r.learn.as_ref()).map(|l| l.total_queries).sum(),
            max_ratio: rs
                .iter()
                .filter_map(|r| r.inequality.as_ref().map(|q| q.ratio))
                .fold(f64::NAN, f64::max),
        });
    }
    Ok(rows)
}

pub fn write_summary(rows: &[SummaryRow], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

/// Plain-text table of the summary; inequality tasks get the max ratio per `d`.
pub fn summary_table(rows: &[SummaryRow]) -> String {
    let mut s = String::new();
    let Some(first) = rows.first() else {
        return "no records\n".into();
    };
    if first.max_ratio.is_nan() {
        let _ = writeln!(
            s,
            "{:<22} {:>3} {:>4} {:>8} {:>6} {:>13} {:>13} {:>8} {:>22}",
            "task", "d", "n", "mult", "runs", "median_err", "p90_err", "success", "total_queries"
        );
        for r in rows {
            let _ = writeln!(
                s,
                "{:<22} {:>3} {:>4} {:>8} {:>6} {:>13.6e} {:>13.6e} {:>8.3} {:>22}",
                r.task,
                r.d,
                r.n,
                r.shots_override.map_or_else(|| r.shot_multiplier.to_string(), |t| format!("T={t}")),
                r.runs,
                r.median_error,
                r.p90_error,
                r.success_fraction,
                r.total_queries
            );
        }
    } else {
        let mut per_d: BTreeMap<usize, f64> = BTreeMap::new();
        for r in rows {
            let e = per_d.entry(r.d).or_insert(f64::NAN);
            *e = e.max(r.max_ratio);
        }
        let _ = writeln!(s, "{:>3} {:>20}", "d", "max_ratio");
        for (d, m) in per_d {
            let _ = writeln!(s, "{d:>3} {m:>20.15}");
        }
    }
    s
}

#[derive(Serialize)]
struct Metadata<'a> {
    verb: &'a str,
    created_unix: u64,
    version: &'a str,
    threads: usize,
    records: usize,
    config: &'a ExperimentConfig,
}

/// Writes records, CSV, summary, structured reports, tensors and metadata to
/// `dir`. Everything except `metadata.json` is a pure function of the records.
pub fn write_outputs(
    dir: &Path,
    cfg: &ExperimentConfig,
    records: &[ExperimentRecord],
    verb: &str,
    threads: usize,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut f = File::create(dir.join(&cfg.output.records))?;
    for r in records {
        writeln!(f, "{}", r.to_json_line())?;
    }
    write_csv(records, File::create(dir.join(&cfg.output.csv))?)?;
    write_summary(&summarize(records)?, File::create(dir.join(SUMMARY_FILE))?)?;
    if cfg.task.is_inequality() {
        let mut f = File::create(dir.join(REPORTS_FILE))?;
        for r in records {
            if let Some(q) = &r.inequality {
                writeln!(f, "instance_id: {}\nrepetition: {}\n{q}", r.instance_id, r.repetition)?;
            }
        }
    }
    let tensors: Vec<&ExperimentRecord> = records.iter().filter(|r| r.tensor.is_some()).collect();
    if !tensors.is_empty() {
        let tdir = dir.join("tensors");
        fs::create_dir_all(&tdir)?;
        for r in tensors {
            let t = r.tensor.as_ref().expect("filtered");
            t.write_csv(File::create(tdir.join(format!("{}-r{}.csv", r.instance_id, r.repetition)))?)?;
        }
    }
    let meta = Metadata {
        verb,
        created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        version: env!("CARGO_PKG_VERSION"),
        threads,
        records: records.len(),
        config: cfg,
    };
    fs::write(dir.join(METADATA_FILE), serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(())
}

/// Reads records from JSONL files.
pub fn read_records(paths: &[PathBuf]) -> Result<Vec<ExperimentRecord>> {
    let mut out = Vec::new();
    for p in paths {
        let f = File::open(p).map_err(|e| HarnessError::config(format!("cannot open {}: {e}", p.display())))?;
        for (i, line) in BufReader::new(f).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let r: ExperimentRecord = serde_json::from_str(&line)
                .map_err(|e| HarnessError::config(format!("{}:{}: {e}", p.display(), i + 1)))?;
            out.push(r);
        }
    }
    Ok(out)
}

/// Task of a homogeneous record set.
pub fn task_of(records: &[ExperimentRecord]) -> Option<Task> {
    records.first().map(|r| r.task)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
        assert_eq!(quantile(&v, 0.9), 9.0);
        assert_eq!(median(&v), 5.5);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
    }
}
