//! Trial execution: workload generation, timed replay and checkpointing.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use hybrid_table::workloads::{
    gen_adversarial_permutation, gen_full_table_churn, gen_mixed_sign, gen_random_permutation,
    gen_stochastic, parse_workload, trial_rng, trial_salt, Driver, RngPurpose, StochasticConfig,
    WorkloadOp,
};
use hybrid_table::{HybridTable, MetricsLog, Mode, ResizePolicy};
use rayon::prelude::*;
use serde::Serialize;

use crate::CliError;

/// Operations are generated this many at a time, outside the timed region.
pub const CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WorkloadSpec {
    Stochastic { p: f64, ops: u64 },
    Churn { m: u32, rounds: u64 },
    MixedSign { k: u32 },
    AdvPerm { k: u32 },
    RandPerm { n: u64 },
    File { path: PathBuf },
}

impl WorkloadSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if let WorkloadSpec::Stochastic { p, ops } = *self {
            StochasticConfig::new(p, ops, 0).validate()?;
        }
        Ok(())
    }

    /// Reads the workload file, if any, so trials share one parsed copy.
    pub fn load(&self) -> Result<LoadedWorkload<'_>, CliError> {
        let file_ops = match self {
            WorkloadSpec::File { path } => Some(read_workload_file(path)?),
            _ => None,
        };
        Ok(LoadedWorkload {
            spec: self,
            file_ops,
        })
    }
}

pub fn read_workload_file(path: &PathBuf) -> Result<Vec<WorkloadOp>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_workload(&text).map_err(|source| CliError::Parse {
        path: path.clone(),
        source,
    })
}

pub struct LoadedWorkload<'a> {
    spec: &'a WorkloadSpec,
    file_ops: Option<Vec<WorkloadOp>>,
}

pub type OpStream<'a> = Box<dyn Iterator<Item = WorkloadOp> + Send + 'a>;

impl LoadedWorkload<'_> {
    /// The operation stream of one trial. Its size hint is exact.
    pub fn ops(&self, seed: u64, trial: u64) -> Result<OpStream<'_>, CliError> {
        Ok(match *self.spec {
            WorkloadSpec::Stochastic { p, ops } => Box::new(gen_stochastic(&StochasticConfig {
                p,
                ops,
                seed,
                trial,
            })?),
            WorkloadSpec::Churn { m, rounds } => {
                Box::new(gen_full_table_churn(m, rounds)?.into_iter())
            }
            WorkloadSpec::MixedSign { k } => Box::new(gen_mixed_sign(k)?.into_iter()),
            WorkloadSpec::AdvPerm { k } => Box::new(gen_adversarial_permutation(k)?.into_iter()),
            WorkloadSpec::RandPerm { n } => {
                Box::new(gen_random_permutation(n, seed, trial)?.into_iter())
            }
            WorkloadSpec::File { .. } => {
                Box::new(self.file_ops.as_deref().unwrap_or_default().iter().copied())
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub policy: ResizePolicy,
    pub mode: Mode,
    pub seed: u64,
    pub trials: u64,
}

/// Counters after the first `t` operations of a trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checkpoint {
    pub t: u64,
    pub insertion_calls: u64,
    pub new_key_calls: u64,
    pub cost_c: u64,
    pub rehash_events: usize,
    /// Replay time only; generation is excluded.
    pub seconds: f64,
}

impl Checkpoint {
    pub fn calls_per_op(&self) -> f64 {
        self.insertion_calls as f64 / self.t as f64
    }

    pub fn micros_per_op(&self) -> f64 {
        self.seconds * 1e6 / self.t as f64
    }
}

#[derive(Debug, Clone)]
pub struct TrialResult {
    pub trial: u64,
    pub ops: u64,
    pub metrics: MetricsLog,
    pub len: usize,
    pub hash_capacity: usize,
    pub array_capacity: usize,
    pub checkpoints: Vec<Checkpoint>,
    pub seconds: f64,
}

/// `1, 2, 5, 10, 20, 50, ...` below `total`, then `total` itself.
pub fn checkpoint_schedule(total: u64) -> Vec<u64> {
    let mut marks = Vec::new();
    let mut decade = 1u64;
    'outer: loop {
        for m in [1, 2, 5] {
            match decade.checked_mul(m) {
                Some(v) if v < total => marks.push(v),
                _ => break 'outer,
            }
        }
        decade = match decade.checked_mul(10) {
            Some(d) => d,
            None => break,
        };
    }
    if total > 0 {
        marks.push(total);
    }
    marks
}

pub fn run_trial(
    work: &LoadedWorkload<'_>,
    config: &RunConfig,
    trial: u64,
) -> Result<TrialResult, CliError> {
    let table = HybridTable::new(config.mode, config.policy, trial_salt(config.seed, trial));
    let mut driver = Driver::new(table, trial_rng(config.seed, trial, RngPurpose::Driver));
    let mut stream = work.ops(config.seed, trial)?;
    let total = stream.size_hint().0 as u64;

    let mut chunk = Vec::with_capacity(CHUNK);
    let mut done = 0u64;
    let mut elapsed = Duration::ZERO;
    let mut checkpoints = Vec::new();
    for mark in checkpoint_schedule(total) {
        while done < mark {
            chunk.clear();
            chunk.extend(stream.by_ref().take(CHUNK.min((mark - done) as usize)));
            if chunk.is_empty() {
                break;
            }
            let start = Instant::now();
            for op in &chunk {
                driver.apply(op)?;
            }
            elapsed += start.elapsed();
            done += chunk.len() as u64;
        }
        let m = driver.table().metrics();
        checkpoints.push(Checkpoint {
            t: done,
            insertion_calls: m.insertion_calls(),
            new_key_calls: m.new_key_calls(),
            cost_c: m.cost_c(),
            rehash_events: m.rehash_events().len(),
            seconds: elapsed.as_secs_f64(),
        });
    }

    let table = driver.into_table();
    Ok(TrialResult {
        trial,
        ops: done,
        len: table.len(),
        hash_capacity: table.hash().capacity(),
        array_capacity: table.array().capacity(),
        metrics: table.into_metrics(),
        checkpoints,
        seconds: elapsed.as_secs_f64(),
    })
}

/// Runs every trial on the current rayon pool; results come back in trial order.
pub fn run_trials(spec: &WorkloadSpec, config: &RunConfig) -> Result<Vec<TrialResult>, CliError> {
    let work = spec.load()?;
    (0..config.trials)
        .into_par_iter()
        .map(|trial| run_trial(&work, config, trial))
        .collect()
}

/// Mean number of rehashes producing each hash size, averaged over all
/// trials (a trial that never reached a size contributes zero).
pub fn mean_rehash_by_size(trials: &[TrialResult]) -> BTreeMap<usize, f64> {
    let mut sums: BTreeMap<usize, u64> = BTreeMap::new();
    for t in trials {
        for (size, n) in t.metrics.rehash_count_by_size() {
            *sums.entry(size).or_default() += n;
        }
    }
    sums.into_iter()
        .map(|(size, n)| (size, n as f64 / trials.len() as f64))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolicyTotals {
    pub insertion_calls: u64,
    pub cost_c: u64,
    pub seconds: f64,
}

impl From<&TrialResult> for PolicyTotals {
    fn from(t: &TrialResult) -> Self {
        PolicyTotals {
            insertion_calls: t.metrics.insertion_calls(),
            cost_c: t.metrics.cost_c(),
            seconds: t.seconds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub trial: u64,
    pub original: PolicyTotals,
    pub fixed: PolicyTotals,
}

impl ComparisonRow {
    pub fn calls_ratio(&self) -> f64 {
        ratio(
            self.original.insertion_calls as f64,
            self.fixed.insertion_calls as f64,
        )
    }

    pub fn cost_ratio(&self) -> f64 {
        ratio(self.original.cost_c as f64, self.fixed.cost_c as f64)
    }

    pub fn time_ratio(&self) -> f64 {
        ratio(self.original.seconds, self.fixed.seconds)
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        f64::NAN
    } else {
        a / b
    }
}

/// Runs the workload under both policies with identical seeds, trial by trial.
pub fn compare(
    spec: &WorkloadSpec,
    mode: Mode,
    seed: u64,
    trials: u64,
) -> Result<Vec<ComparisonRow>, CliError> {
    let work = spec.load()?;
    let config = |policy| RunConfig {
        policy,
        mode,
        seed,
        trials,
    };
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let original = run_trial(&work, &config(ResizePolicy::Original), trial)?;
            let fixed = run_trial(&work, &config(ResizePolicy::FixedHeadroom), trial)?;
            Ok(ComparisonRow {
                trial,
                original: (&original).into(),
                fixed: (&fixed).into(),
            })
        })
        .collect()
}
