//! Instrumentation counters and the rehash event log.
//!
//! Cost is measured the way the analysis measures it: one unit per call of
//! the insertion function, whether it comes from a fresh insertion or from
//! reinserting an element during a rebuild. Array-part placements are plain
//! writes and are not charged.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};

/// One rebuild of the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RehashEvent {
    /// Op clock when the triggering operation was applied (1-based).
    pub t: u64,
    pub old_m: usize,
    pub new_m: usize,
    pub old_a: usize,
    pub new_a: usize,
    /// Slot census of the old hash part just before the rebuild.
    pub used_before: usize,
    pub deleted_before: usize,
    pub free_before: usize,
    /// Insertion-function calls made to repopulate the new hash part. The
    /// pending key is not included; its call was charged when it arrived.
    pub reinserted: u64,
    pub array_grew: bool,
    /// Used slots in the new hash part once the rebuild (pending key
    /// included) is complete.
    pub used_after: usize,
}

impl RehashEvent {
    pub fn free_after(&self) -> usize {
        self.new_m - self.used_after
    }

    /// `β_i` grew: the hash part got bigger.
    pub fn hash_grew(&self) -> bool {
        self.new_m > self.old_m
    }
}

/// Column order of the per-event CSV.
pub const EVENT_CSV_HEADER: [&str; 10] = [
    "t",
    "old_M",
    "new_M",
    "old_A",
    "new_A",
    "used_before",
    "deleted_before",
    "free_before",
    "reinserted",
    "array_grew",
];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsLog {
    insertion_calls: u64,
    new_key_calls: u64,
    search_probes_success: u64,
    searches_success: u64,
    search_probes_fail: u64,
    searches_fail: u64,
    relocation_probes: u64,
    op_clock: u64,
    rehash_events: Vec<RehashEvent>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeAverages {
    pub successful: Option<f64>,
    pub unsuccessful: Option<f64>,
}

/// Everything in a [`MetricsLog`] except the per-event list, in a form that
/// serializes to the summary JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub op_clock: u64,
    pub insertion_calls: u64,
    pub new_key_calls: u64,
    pub reinserted_total: u64,
    pub relocation_probes: u64,
    pub searches_success: u64,
    pub search_probes_success: u64,
    pub searches_fail: u64,
    pub search_probes_fail: u64,
    pub rehash_count: usize,
    pub cost_c: u64,
    pub hash_growing_cost: u64,
    pub array_growing_rehashes: usize,
    pub rehash_count_by_size: BTreeMap<usize, u64>,
}

impl MetricsLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insertion_calls(&self) -> u64 {
        self.insertion_calls
    }

    /// Insertions that reached the insertion function directly (not as part
    /// of a rebuild).
    pub fn new_key_calls(&self) -> u64 {
        self.new_key_calls
    }

    pub fn relocation_probes(&self) -> u64 {
        self.relocation_probes
    }

    pub fn op_clock(&self) -> u64 {
        self.op_clock
    }

    pub fn rehash_events(&self) -> &[RehashEvent] {
        &self.rehash_events
    }

    pub fn searches(&self) -> (u64, u64) {
        (self.searches_success, self.searches_fail)
    }

    pub fn advance_clock(&mut self) {
        self.op_clock += 1;
    }

    /// Zeroes the search-probe counters, leaving everything else intact.
    pub fn reset_search_stats(&mut self) {
        self.search_probes_success = 0;
        self.searches_success = 0;
        self.search_probes_fail = 0;
        self.searches_fail = 0;
    }

    pub(crate) fn record_new_key(&mut self) {
        self.insertion_calls += 1;
        self.new_key_calls += 1;
    }

    pub(crate) fn record_reinsertion(&mut self) {
        self.insertion_calls += 1;
    }

    pub(crate) fn record_search(&mut self, found: bool, probes: u64) {
        if found {
            self.searches_success += 1;
            self.search_probes_success += probes;
        } else {
            self.searches_fail += 1;
            self.search_probes_fail += probes;
        }
    }

    pub(crate) fn record_relocation_probes(&mut self, probes: u64) {
        self.relocation_probes += probes;
    }

    pub(crate) fn record_rehash(&mut self, event: RehashEvent) {
        self.rehash_events.push(event);
    }

    /// `C = Σ β_i`: the sum of the hash capacities produced by every rehash.
    pub fn cost_c(&self) -> u64 {
        self.rehash_events.iter().map(|e| e.new_m as u64).sum()
    }

    /// `Σ β_i` restricted to rehashes that grew the hash part.
    pub fn hash_growing_cost(&self) -> u64 {
        self.rehash_events
            .iter()
            .filter(|e| e.hash_grew())
            .map(|e| e.new_m as u64)
            .sum()
    }

    pub fn array_growing_rehashes(&self) -> usize {
        self.rehash_events.iter().filter(|e| e.array_grew).count()
    }

    /// Number of rehashes that produced a hash part of each size.
    pub fn rehash_count_by_size(&self) -> BTreeMap<usize, u64> {
        let mut by_size = BTreeMap::new();
        for e in &self.rehash_events {
            *by_size.entry(e.new_m).or_insert(0) += 1;
        }
        by_size
    }

    /// `deleted_before / old_M` for each event, paired with the event index.
    /// Events rebuilding an empty hash part report 0.
    pub fn deleted_fraction_before_rehash(&self) -> Vec<(usize, f64)> {
        self.rehash_events
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let frac = if e.old_m == 0 {
                    0.0
                } else {
                    e.deleted_before as f64 / e.old_m as f64
                };
                (i, frac)
            })
            .collect()
    }

    /// Mean probes per successful and unsuccessful search.
    pub fn probe_averages(&self) -> ProbeAverages {
        let mean = |probes: u64, n: u64| (n > 0).then(|| probes as f64 / n as f64);
        ProbeAverages {
            successful: mean(self.search_probes_success, self.searches_success),
            unsuccessful: mean(self.search_probes_fail, self.searches_fail),
        }
    }

    pub fn summary(&self) -> MetricsSummary {
        MetricsSummary {
            op_clock: self.op_clock,
            insertion_calls: self.insertion_calls,
            new_key_calls: self.new_key_calls,
            reinserted_total: self.rehash_events.iter().map(|e| e.reinserted).sum(),
            relocation_probes: self.relocation_probes,
            searches_success: self.searches_success,
            search_probes_success: self.search_probes_success,
            searches_fail: self.searches_fail,
            search_probes_fail: self.search_probes_fail,
            rehash_count: self.rehash_events.len(),
            cost_c: self.cost_c(),
            hash_growing_cost: self.hash_growing_cost(),
            array_growing_rehashes: self.array_growing_rehashes(),
            rehash_count_by_size: self.rehash_count_by_size(),
        }
    }

    /// One CSV row per rehash event, columns as in [`EVENT_CSV_HEADER`].
    pub fn write_events_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(EVENT_CSV_HEADER)?;
        for e in &self.rehash_events {
            w.write_record([
                e.t.to_string(),
                e.old_m.to_string(),
                e.new_m.to_string(),
                e.old_a.to_string(),
                e.new_a.to_string(),
                e.used_before.to_string(),
                e.deleted_before.to_string(),
                e.free_before.to_string(),
                e.reinserted.to_string(),
                e.array_grew.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(&self.summary())
    }
}
