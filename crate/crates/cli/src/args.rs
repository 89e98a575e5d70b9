use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hybrid_table::{Mode, ResizePolicy};

use crate::experiment::{RunConfig, WorkloadSpec};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "hybrid-table",
    version,
    about = "Rehash-cost experiments on a Lua-style hybrid table"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run independent trials of one workload and write per-trial and aggregate results.
    Run(RunArgs),
    /// Replay a workload file and dump the final table state.
    Replay(ReplayArgs),
    /// Run one workload under both resize policies with the same seeds.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WorkloadKind {
    Stochastic,
    Churn,
    MixedSign,
    AdvPerm,
    RandPerm,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Original,
    Fixed,
}

impl From<PolicyArg> for ResizePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Original => ResizePolicy::Original,
            PolicyArg::Fixed => ResizePolicy::FixedHeadroom,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Hybrid,
    PureHash,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Hybrid => Mode::Hybrid,
            ModeArg::PureHash => Mode::PureHash,
        }
    }
}

/// Accepts plain integers and exact scientific notation such as `1e7`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("not a count: {s:?}"))?;
    if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(format!("not a whole non-negative count: {s:?}"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct WorkloadArgs {
    #[arg(long, value_enum)]
    pub workload: WorkloadKind,
    /// Insertion probability of the stochastic workload.
    #[arg(long)]
    pub p: Option<f64>,
    /// Number of operations of the stochastic workload.
    #[arg(long = "T", value_parser = parse_count)]
    pub t: Option<u64>,
    /// Size exponent: table of 2^k slots for churn, 2^k keys per block for
    /// mixed-sign and adv-perm.
    #[arg(long)]
    pub k: Option<u32>,
    /// Number of keys of the random permutation.
    #[arg(long, value_parser = parse_count)]
    pub n: Option<u64>,
    /// Delete-then-insert rounds of the churn workload.
    #[arg(long, value_parser = parse_count)]
    pub rounds: Option<u64>,
    /// Workload file for `--workload file`.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

impl WorkloadArgs {
    pub fn spec(&self) -> Result<WorkloadSpec, CliError> {
        fn need<T>(v: Option<T>, flag: &str, kind: &str) -> Result<T, CliError> {
            v.ok_or_else(|| CliError::Usage(format!("--workload {kind} requires {flag}")))
        }
        let spec = match self.workload {
            WorkloadKind::Stochastic => WorkloadSpec::Stochastic {
                p: need(self.p, "--p", "stochastic")?,
                ops: need(self.t, "--T", "stochastic")?,
            },
            WorkloadKind::Churn => WorkloadSpec::Churn {
                m: need(self.k, "--k", "churn")?,
                rounds: need(self.rounds, "--rounds", "churn")?,
            },
            WorkloadKind::MixedSign => WorkloadSpec::MixedSign {
                k: need(self.k, "--k", "mixed-sign")?,
            },
            WorkloadKind::AdvPerm => WorkloadSpec::AdvPerm {
                k: need(self.k, "--k", "adv-perm")?,
            },
            WorkloadKind::RandPerm => WorkloadSpec::RandPerm {
                n: need(self.n, "--n", "rand-perm")?,
            },
            WorkloadKind::File => WorkloadSpec::File {
                path: need(self.file.clone(), "--file", "file")?,
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub workload: WorkloadArgs,
    #[arg(long, value_enum, default_value = "original")]
    pub policy: PolicyArg,
    #[arg(long, value_enum, default_value = "hybrid")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

impl RunArgs {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            policy: self.policy.into(),
            mode: self.mode.into(),
            seed: self.seed,
            trials: self.trials,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub workload: WorkloadArgs,
    #[arg(long, value_enum, default_value = "hybrid")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of seeds (trials) run under each policy.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Workload file, one `I key value`, `D key` or `L key` per line.
    #[arg(long)]
    pub file: PathBuf,
    #[arg(long, value_enum, default_value = "original")]
    pub policy: PolicyArg,
    #[arg(long, value_enum, default_value = "hybrid")]
    pub mode: ModeArg,
    /// Master salt seed of the replayed table.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Path of the JSON dump.
    #[arg(long)]
    pub out: PathBuf,
}
