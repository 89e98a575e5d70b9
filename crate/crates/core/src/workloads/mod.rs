//! Seeded, replayable operation streams for every scenario under study.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`): the run
//! seed picks the key, and each trial and purpose gets its own stream via
//! [`trial_rng`], so trials are independent and reproducible on any
//! platform.

mod driver;
mod generators;
mod tail;
mod text;

pub use driver::{resolve, Applied, Driver, PresentSet};
pub use generators::{
    gen_adversarial_permutation, gen_full_table_churn, gen_mixed_sign, gen_random_permutation,
    gen_stochastic, StochasticConfig, StochasticOps,
};
pub use tail::{half_full_tail_estimate, TailEstimate};
pub use text::{parse_workload, write_workload, ParseError};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hash_policy::SaltState;
use crate::key::{Key, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WorkloadOp {
    /// Insert a key that has never appeared before in this workload.
    InsertFresh(Key, Value),
    /// Delete a key chosen uniformly among the present ones; resolved by the
    /// [`Driver`].
    DeleteRandomPresent,
    /// Assign to an arbitrary key (insert or update).
    InsertAt(Key, Value),
    DeleteKey(Key),
    Lookup(Key),
}

impl WorkloadOp {
    pub fn is_insert(&self) -> bool {
        matches!(self, WorkloadOp::InsertFresh(..) | WorkloadOp::InsertAt(..))
    }

    pub fn key(&self) -> Option<Key> {
        match *self {
            WorkloadOp::InsertFresh(k, _)
            | WorkloadOp::InsertAt(k, _)
            | WorkloadOp::DeleteKey(k)
            | WorkloadOp::Lookup(k) => Some(k),
            WorkloadOp::DeleteRandomPresent => None,
        }
    }
}

/// What a stream of randomness is used for within one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RngPurpose {
    Workload = 0,
    Driver = 1,
    Salt = 2,
    Sampling = 3,
}

/// Independent ChaCha8 stream for (`seed`, `trial`, `purpose`).
pub fn trial_rng(seed: u64, trial: u64, purpose: RngPurpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial * 4 + purpose as u64);
    rng
}

/// Salt state for the table of one trial, drawn from its salt stream.
pub fn trial_salt(seed: u64, trial: u64) -> SaltState {
    SaltState::new(trial_rng(seed, trial, RngPurpose::Salt).next_u64())
}
