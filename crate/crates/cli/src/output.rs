//! Artifact files of `run` and `compare`.
//!
//! Everything except `timing.csv` (and the time columns of `compare.csv`)
//! is a pure function of the flags and the seed.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use hybrid_table::{MetricsSummary, Mode};
use serde::Serialize;

use crate::experiment::{mean_rehash_by_size, ComparisonRow, RunConfig, TrialResult, WorkloadSpec};
use crate::CliError;

pub const MANIFEST_SCHEMA: u32 = 1;
pub const RNG_NOTE: &str =
    "ChaCha8 seeded with --seed; stream 4*trial + purpose (0 workload, 1 driver, 2 salt)";

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub schema: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub workload: &'a WorkloadSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policy: Option<hybrid_table::ResizePolicy>,
    pub mode: Mode,
    pub seed: u64,
    pub trials: u64,
    pub rng: &'static str,
    pub files: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct TrialSummary {
    pub trial: u64,
    pub ops: u64,
    pub len: usize,
    pub hash_capacity: usize,
    pub array_capacity: usize,
    pub metrics: MetricsSummary,
}

#[derive(Debug, Default, Serialize)]
pub struct Means {
    pub ops: f64,
    pub insertion_calls: f64,
    pub new_key_calls: f64,
    pub cost_c: f64,
    pub rehash_count: f64,
    pub hash_growing_cost: f64,
    pub array_growing_rehashes: f64,
    pub relocation_probes: f64,
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub trials: usize,
    pub mean: Means,
    pub mean_rehash_by_size: BTreeMap<usize, f64>,
    pub per_trial: Vec<TrialSummary>,
}

pub fn summarize(trials: &[TrialResult]) -> RunSummary {
    let n = trials.len().max(1) as f64;
    let mut mean = Means::default();
    let per_trial = trials
        .iter()
        .map(|t| {
            let m = t.metrics.summary();
            mean.ops += t.ops as f64 / n;
            mean.insertion_calls += m.insertion_calls as f64 / n;
            mean.new_key_calls += m.new_key_calls as f64 / n;
            mean.cost_c += m.cost_c as f64 / n;
            mean.rehash_count += m.rehash_count as f64 / n;
            mean.hash_growing_cost += m.hash_growing_cost as f64 / n;
            mean.array_growing_rehashes += m.array_growing_rehashes as f64 / n;
            mean.relocation_probes += m.relocation_probes as f64 / n;
            TrialSummary {
                trial: t.trial,
                ops: t.ops,
                len: t.len,
                hash_capacity: t.hash_capacity,
                array_capacity: t.array_capacity,
                metrics: m,
            }
        })
        .collect();
    RunSummary {
        trials: trials.len(),
        mean,
        mean_rehash_by_size: mean_rehash_by_size(trials),
        per_trial,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::io(path, e.into()))?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::io(path, io::Error::other(e))
}

fn write_csv<F>(path: &Path, header: &[&str], fill: F) -> Result<(), CliError>
where
    F: FnOnce(&mut csv::Writer<BufWriter<File>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    fill(&mut w).map_err(|e| csv_err(path, e))?;
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn events_file_name(trial: u64) -> String {
    format!("events/trial-{trial:04}.csv")
}

pub fn write_run(
    out: &Path,
    spec: &WorkloadSpec,
    config: &RunConfig,
    trials: &[TrialResult],
) -> Result<(), CliError> {
    let events_dir = out.join("events");
    fs::create_dir_all(&events_dir).map_err(|e| CliError::io(&events_dir, e))?;

    let mut files = vec![
        "summary.json".to_string(),
        "rehash_by_size.csv".to_string(),
        "checkpoints.csv".to_string(),
        "timing.csv".to_string(),
    ];
    for t in trials {
        let name = events_file_name(t.trial);
        let path = out.join(&name);
        let w = create(&path)?;
        t.metrics
            .write_events_csv(w)
            .map_err(|e| csv_err(&path, e))?;
        files.push(name);
    }

    write_json(
        &out.join("manifest.json"),
        &Manifest {
            schema: MANIFEST_SCHEMA,
            tool: "hybrid-table",
            version: env!("CARGO_PKG_VERSION"),
            command: "run",
            workload: spec,
            policy: Some(config.policy),
            mode: config.mode,
            seed: config.seed,
            trials: config.trials,
            rng: RNG_NOTE,
            files,
        },
    )?;
    write_json(&out.join("summary.json"), &summarize(trials))?;

    let reaching = |size: usize| {
        trials
            .iter()
            .filter(|t| t.metrics.rehash_events().iter().any(|e| e.new_m == size))
            .count()
    };
    write_csv(
        &out.join("rehash_by_size.csv"),
        &["size", "mean_rehash_count", "trials_reaching"],
        |w| {
            for (size, mean) in mean_rehash_by_size(trials) {
                w.write_record([
                    size.to_string(),
                    mean.to_string(),
                    reaching(size).to_string(),
                ])?;
            }
            Ok(())
        },
    )?;

    write_csv(
        &out.join("checkpoints.csv"),
        &[
            "trial",
            "T",
            "insertion_calls",
            "new_key_calls",
            "cost_C",
            "rehash_events",
            "calls_per_op",
        ],
        |w| {
            for t in trials {
                for c in &t.checkpoints {
                    w.write_record([
                        t.trial.to_string(),
                        c.t.to_string(),
                        c.insertion_calls.to_string(),
                        c.new_key_calls.to_string(),
                        c.cost_c.to_string(),
                        c.rehash_events.to_string(),
                        c.calls_per_op().to_string(),
                    ])?;
                }
            }
            Ok(())
        },
    )?;

    // Every trial of a workload has the same length, so checkpoint rows line up.
    write_csv(
        &out.join("timing.csv"),
        &["T", "seconds", "us_per_op"],
        |w| {
            let Some(first) = trials.first() else {
                return Ok(());
            };
            for (i, c) in first.checkpoints.iter().enumerate() {
                let secs = trials.iter().map(|t| t.checkpoints[i].seconds).sum::<f64>()
                    / trials.len() as f64;
                let us = secs * 1e6 / c.t as f64;
                w.write_record([c.t.to_string(), secs.to_string(), us.to_string()])?;
            }
            Ok(())
        },
    )
}

pub fn write_compare(
    out: &Path,
    spec: &WorkloadSpec,
    mode: Mode,
    seed: u64,
    trials: u64,
    rows: &[ComparisonRow],
) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    write_json(
        &out.join("manifest.json"),
        &Manifest {
            schema: MANIFEST_SCHEMA,
            tool: "hybrid-table",
            version: env!("CARGO_PKG_VERSION"),
            command: "compare",
            workload: spec,
            policy: None,
            mode,
            seed,
            trials,
            rng: RNG_NOTE,
            files: vec!["compare.csv".into()],
        },
    )?;
    write_csv(
        &out.join("compare.csv"),
        &[
            "trial",
            "original_insertion_calls",
            "fixed_insertion_calls",
            "calls_ratio",
            "original_cost_C",
            "fixed_cost_C",
            "cost_ratio",
            "original_seconds",
            "fixed_seconds",
            "time_ratio",
        ],
        |w| {
            for r in rows {
                w.write_record([
                    r.trial.to_string(),
                    r.original.insertion_calls.to_string(),
                    r.fixed.insertion_calls.to_string(),
                    r.calls_ratio().to_string(),
                    r.original.cost_c.to_string(),
                    r.fixed.cost_c.to_string(),
                    r.cost_ratio().to_string(),
                    r.original.seconds.to_string(),
                    r.fixed.seconds.to_string(),
                    r.time_ratio().to_string(),
                ])?;
            }
            Ok(())
        },
    )
}
