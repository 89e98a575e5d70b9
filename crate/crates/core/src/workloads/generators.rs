use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{trial_rng, RngPurpose, WorkloadOp};
use crate::error::TableError;
use crate::key::{Key, Value};

/// Insert with probability `p`, delete a uniformly chosen present key
/// otherwise, `ops` times. Keys are never integers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StochasticConfig {
    pub p: f64,
    pub ops: u64,
    pub seed: u64,
    /// Which ChaCha stream of `seed` drives the coin flips.
    #[serde(default)]
    pub trial: u64,
}

impl StochasticConfig {
    pub fn new(p: f64, ops: u64, seed: u64) -> Self {
        StochasticConfig {
            p,
            ops,
            seed,
            trial: 0,
        }
    }

    pub fn validate(&self) -> Result<(), TableError> {
        if !(self.p > 0.5 && self.p < 1.0) {
            return Err(TableError::Config(format!(
                "insertion probability must lie in (1/2, 1), got {}",
                self.p
            )));
        }
        if self.ops == 0 {
            return Err(TableError::Config(
                "operation count must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Lazy stream produced by [`gen_stochastic`].
///
/// The stream tracks how many keys its own operations leave present, so it
/// never asks for a deletion from an empty table.
#[derive(Debug, Clone)]
pub struct StochasticOps {
    rng: ChaCha8Rng,
    p: f64,
    remaining: u64,
    present: u64,
    next_token: u64,
}

impl Iterator for StochasticOps {
    type Item = WorkloadOp;

    fn next(&mut self) -> Option<WorkloadOp> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        if self.present == 0 || self.rng.random_bool(self.p) {
            let id = self.next_token;
            self.next_token += 1;
            self.present += 1;
            Some(WorkloadOp::InsertFresh(Key::token(id), Value(id)))
        } else {
            self.present -= 1;
            Some(WorkloadOp::DeleteRandomPresent)
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining as usize, Some(self.remaining as usize))
    }
}

pub fn gen_stochastic(cfg: &StochasticConfig) -> Result<StochasticOps, TableError> {
    cfg.validate()?;
    Ok(StochasticOps {
        rng: trial_rng(cfg.seed, cfg.trial, RngPurpose::Workload),
        p: cfg.p,
        remaining: cfg.ops,
        present: 0,
        next_token: 1,
    })
}

/// Fills `2^m` fresh keys, then alternates deleting the oldest present key
/// with inserting a fresh one, `rounds` times.
pub fn gen_full_table_churn(m: u32, rounds: u64) -> Result<Vec<WorkloadOp>, TableError> {
    if m == 0 || m > 30 {
        return Err(TableError::Config(format!(
            "churn exponent must be in 1..=30, got {m}"
        )));
    }
    let fill = 1u64 << m;
    let mut ops = Vec::with_capacity((fill + 2 * rounds) as usize);
    ops.extend((1..=fill).map(|id| WorkloadOp::InsertFresh(Key::token(id), Value(id))));
    for r in 1..=rounds {
        ops.push(WorkloadOp::DeleteKey(Key::token(r)));
        let id = fill + r;
        ops.push(WorkloadOp::InsertFresh(Key::token(id), Value(id)));
    }
    Ok(ops)
}

/// `2^k` non-array keys standing in for `-(2^k - 1)..=0`, then the integers
/// `1..=2^k` in increasing order.
pub fn gen_mixed_sign(k: u32) -> Result<Vec<WorkloadOp>, TableError> {
    if k == 0 || k > 30 {
        return Err(TableError::Config(format!(
            "mixed-sign exponent must be in 1..=30, got {k}"
        )));
    }
    let half = 1u64 << k;
    let mut ops = Vec::with_capacity(2 * half as usize);
    ops.extend((0..half).map(|i| WorkloadOp::InsertFresh(Key::token(i), Value(i))));
    ops.extend((1..=half).map(|i| WorkloadOp::InsertAt(Key::int(i), Value(i))));
    Ok(ops)
}

/// With `n = 3 * 2^k`: the keys `2*2^k + 1 ..= 3*2^k` first, then
/// `1 ..= 2*2^k`. The first block cannot reach the array part until half of
/// `1..=4*2^k` is present, so it stays in the hash part and is reinserted at
/// every array doubling.
pub fn gen_adversarial_permutation(k: u32) -> Result<Vec<WorkloadOp>, TableError> {
    if k == 0 || k > 28 {
        return Err(TableError::Config(format!(
            "permutation exponent must be in 1..=28, got {k}"
        )));
    }
    let block = 1u64 << k;
    let keys = (2 * block + 1..=3 * block).chain(1..=2 * block);
    Ok(keys
        .map(|i| WorkloadOp::InsertAt(Key::int(i), Value(i)))
        .collect())
}

/// Uniform random permutation of `1..=n` (Fisher-Yates), inserted in order.
pub fn gen_random_permutation(
    n: u64,
    seed: u64,
    trial: u64,
) -> Result<Vec<WorkloadOp>, TableError> {
    if n == 0 {
        return Err(TableError::Config(
            "permutation length must be at least 1".into(),
        ));
    }
    let mut keys: Vec<u64> = (1..=n).collect();
    keys.shuffle(&mut trial_rng(seed, trial, RngPurpose::Workload));
    Ok(keys
        .into_iter()
        .map(|i| WorkloadOp::InsertAt(Key::int(i), Value(i)))
        .collect())
}
