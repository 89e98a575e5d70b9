//! `replay`: run a workload file and dump the resulting table.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hybrid_table::workloads::{trial_rng, Driver, RngPurpose};
use hybrid_table::{HybridTable, Mode, ResizePolicy, SaltState, SlotState};
use serde::Serialize;

use crate::experiment::read_workload_file;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotDump {
    pub index: usize,
    pub state: &'static str,
    pub key: Option<String>,
    pub value: Option<u64>,
    pub next: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrayDump {
    pub capacity: usize,
    pub cells: Vec<Option<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HashDump {
    pub capacity: usize,
    pub last_free: isize,
    pub slots: Vec<SlotDump>,
}

/// Aggregate counters only: per-event op clocks would differ between
/// workloads that differ by no-op lines.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterDump {
    pub insertion_calls: u64,
    pub new_key_calls: u64,
    pub reinserted_total: u64,
    pub relocation_probes: u64,
    pub rehash_count: usize,
    pub cost_c: u64,
    pub rehash_count_by_size: BTreeMap<usize, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateDump {
    pub policy: ResizePolicy,
    pub mode: Mode,
    pub salt: SaltState,
    pub len: usize,
    pub array: ArrayDump,
    pub hash: HashDump,
    pub metrics: CounterDump,
}

pub fn dump(table: &HybridTable) -> StateDump {
    let slots = table
        .hash()
        .slots()
        .iter()
        .enumerate()
        .map(|(index, s)| SlotDump {
            index,
            state: match s.state() {
                SlotState::Free => "free",
                SlotState::Deleted => "deleted",
                SlotState::Used => "used",
                SlotState::Invalid => "invalid",
            },
            key: s.key().map(|k| k.to_string()),
            value: s.value().map(|v| v.0),
            next: s.next(),
        })
        .collect();
    let m = table.metrics().summary();
    StateDump {
        policy: table.policy(),
        mode: table.mode(),
        salt: *table.salt(),
        len: table.len(),
        array: ArrayDump {
            capacity: table.array().capacity(),
            cells: table
                .array()
                .cells()
                .iter()
                .map(|c| c.map(|v| v.0))
                .collect(),
        },
        hash: HashDump {
            capacity: table.hash().capacity(),
            last_free: table.hash().last_free(),
            slots,
        },
        metrics: CounterDump {
            insertion_calls: m.insertion_calls,
            new_key_calls: m.new_key_calls,
            reinserted_total: m.reinserted_total,
            relocation_probes: m.relocation_probes,
            rehash_count: m.rehash_count,
            cost_c: m.cost_c,
            rehash_count_by_size: m.rehash_count_by_size,
        },
    }
}

pub fn replay_file(
    path: &PathBuf,
    policy: ResizePolicy,
    mode: Mode,
    seed: u64,
) -> Result<StateDump, CliError> {
    let ops = read_workload_file(path)?;
    let table = HybridTable::new(mode, policy, SaltState::new(seed));
    let mut driver = Driver::new(table, trial_rng(seed, 0, RngPurpose::Driver));
    driver.apply_all(&ops)?;
    Ok(dump(driver.table()))
}

pub fn write_dump(path: &Path, dump: &StateDump) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(dump).map_err(|e| CliError::io(path, e.into()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
