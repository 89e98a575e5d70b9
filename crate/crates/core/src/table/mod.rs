//! The hybrid table: array part, chained scatter hash part, and rehash.

mod array;
mod audit;
mod sizing;
mod slot;

use std::mem;

use serde::{Deserialize, Serialize};

pub use array::ArrayPart;
pub use audit::{AuditReport, Violation};
pub use sizing::{ceil_log2, compute_array_capacity, IntegerCensus, ResizePolicy, MAX_ARRAY_BITS};
pub use slot::{HashPart, Slot, SlotState};

use crate::hash_policy::SaltState;
use crate::key::{Key, Value};
use crate::metrics::{MetricsLog, RehashEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Everything lives in the hash part; the array part stays empty.
    PureHash,
    Hybrid,
}

/// Result of an uninstrumented hash-part search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOutcome {
    pub value: Option<Value>,
    /// Slot holding the key, used or deleted.
    pub slot: Option<usize>,
    /// Slots inspected along the chain. Zero for array hits and empty hash parts.
    pub probes: u64,
    pub in_array: bool,
}

#[derive(Debug, Clone)]
pub struct HybridTable {
    array: ArrayPart,
    hash: HashPart,
    policy: ResizePolicy,
    mode: Mode,
    salt: SaltState,
    metrics: MetricsLog,
}

impl HybridTable {
    /// An empty table: no array cells, no hash slots.
    pub fn new(mode: Mode, policy: ResizePolicy, salt: SaltState) -> Self {
        HybridTable {
            array: ArrayPart::default(),
            hash: HashPart::empty(),
            policy,
            mode,
            salt,
            metrics: MetricsLog::new(),
        }
    }

    pub fn with_seed(mode: Mode, policy: ResizePolicy, seed: u64) -> Self {
        Self::new(mode, policy, SaltState::new(seed))
    }

    pub fn array(&self) -> &ArrayPart {
        &self.array
    }

    pub fn hash(&self) -> &HashPart {
        &self.hash
    }

    pub fn policy(&self) -> ResizePolicy {
        self.policy
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn salt(&self) -> &SaltState {
        &self.salt
    }

    pub fn metrics(&self) -> &MetricsLog {
        &self.metrics
    }

    pub fn metrics_mut(&mut self) -> &mut MetricsLog {
        &mut self.metrics
    }

    pub fn into_metrics(self) -> MetricsLog {
        self.metrics
    }

    /// Number of keys with a value, in both parts.
    pub fn len(&self) -> usize {
        self.array.occupied() + self.hash.census().0
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Live entries: array cells in index order, then hash slots in slot order.
    pub fn entries(&self) -> impl Iterator<Item = (Key, Value)> + '_ {
        let array = self
            .array
            .cells
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|v| (Key::int(i as u64 + 1), v)));
        let hash = self
            .hash
            .slots
            .iter()
            .filter_map(|s| Some((s.key?, s.value?)));
        array.chain(hash)
    }

    #[inline]
    fn array_index(&self, key: &Key) -> Option<usize> {
        key.as_positive_int().and_then(|k| self.array.index_of(k))
    }

    /// Looks `key` up without touching the metrics.
    pub fn find(&self, key: &Key) -> SearchOutcome {
        if let Some(idx) = self.array_index(key) {
            return SearchOutcome {
                value: self.array.cells[idx],
                slot: None,
                probes: 0,
                in_array: true,
            };
        }
        let (slot, probes) = self.hash.locate(key);
        SearchOutcome {
            value: slot.and_then(|i| self.hash.slots[i].value),
            slot,
            probes,
            in_array: false,
        }
    }

    pub fn peek(&self, key: &Key) -> Option<Value> {
        self.find(key).value
    }

    /// Instrumented lookup: hash-part searches are recorded as successful or
    /// unsuccessful together with their probe counts.
    pub fn get(&mut self, key: &Key) -> Option<Value> {
        let out = self.find(key);
        if !out.in_array {
            self.metrics.record_search(out.value.is_some(), out.probes);
        }
        out.value
    }

    /// `H[key] = value`.
    pub fn set(&mut self, key: Key, value: Value) {
        if let Some(idx) = self.array_index(&key) {
            self.array.cells[idx] = Some(value);
            return;
        }
        if let (Some(i), _) = self.hash.locate(&key) {
            // Used or deleted: update in place, key and link untouched.
            self.hash.slots[i].value = Some(value);
            return;
        }
        self.new_key(key, value);
    }

    /// `H[key] = nil`. Deleting an absent key changes nothing.
    pub fn delete(&mut self, key: &Key) {
        if let Some(idx) = self.array_index(key) {
            self.array.cells[idx] = None;
            return;
        }
        if let (Some(i), _) = self.hash.locate(key) {
            self.hash.slots[i].value = None;
        }
    }

    fn new_key(&mut self, key: Key, value: Value) {
        self.metrics.record_new_key();
        if self.hash.capacity() == 0 {
            self.rehash(key, value);
            return;
        }
        match self.hash.insert_new(key, value) {
            Ok(placement) => self
                .metrics
                .record_relocation_probes(placement.relocation_probes),
            Err(_) => self.rehash(key, value),
        }
    }

    fn rehash(&mut self, pending_key: Key, pending_value: Value) {
        let (used_before, deleted_before, free_before) = self.hash.census();
        let old_m = self.hash.capacity();
        let old_a = self.array.capacity();

        let mut census = IntegerCensus::new();
        let int_keys = self
            .hash
            .slots
            .iter()
            .filter(|s| s.is_used())
            .filter_map(|s| s.key.and_then(|k| k.as_positive_int()));
        for k in int_keys {
            census.add(k);
        }
        let array_used = self.array.occupied();
        for (idx, cell) in self.array.cells.iter().enumerate() {
            if cell.is_some() {
                census.add(idx as u64 + 1);
            }
        }
        if let Some(k) = pending_key.as_positive_int() {
            census.add(k);
        }
        let total = used_before + array_used + 1;

        let new_a = match self.mode {
            Mode::PureHash => 0,
            Mode::Hybrid => compute_array_capacity(&census),
        };
        let hash_elements = total - census.count_up_to(new_a) as usize;
        let new_m = self.policy.hash_capacity(hash_elements);

        self.salt.advance_generation();
        let old_hash = mem::replace(
            &mut self.hash,
            HashPart::with_capacity(new_m, self.salt.current()),
        );
        let old_array = mem::replace(&mut self.array, ArrayPart::with_capacity(new_a));

        let mut reinserted = 0;
        for slot in old_hash.slots.iter().filter(|s| s.is_used()) {
            let (k, v) = (slot.key.unwrap(), slot.value.unwrap());
            if self.rebuild_place(k, v) {
                self.metrics.record_reinsertion();
                reinserted += 1;
            }
        }
        for (idx, cell) in old_array.cells.iter().enumerate() {
            if let Some(v) = *cell {
                if self.rebuild_place(Key::int(idx as u64 + 1), v) {
                    self.metrics.record_reinsertion();
                    reinserted += 1;
                }
            }
        }
        // Already charged on arrival.
        self.rebuild_place(pending_key, pending_value);

        let event = RehashEvent {
            t: self.metrics.op_clock(),
            old_m,
            new_m,
            old_a,
            new_a,
            used_before,
            deleted_before,
            free_before,
            reinserted,
            array_grew: new_a > old_a,
            used_after: self.hash.census().0,
        };
        self.metrics.record_rehash(event);
    }

    /// Routes one element into the freshly built parts. Returns whether the
    /// hash-part insertion function was used.
    fn rebuild_place(&mut self, key: Key, value: Value) -> bool {
        if let Some(idx) = self.array_index(&key) {
            self.array.cells[idx] = Some(value);
            return false;
        }
        let placement = self
            .hash
            .insert_new(key, value)
            .expect("rebuilt hash part is sized to hold every element");
        self.metrics
            .record_relocation_probes(placement.relocation_probes);
        true
    }

    /// Checks every structural invariant; an empty report means the table is
    /// well formed.
    pub fn audit(&self) -> AuditReport {
        audit::audit(self)
    }

    #[cfg(test)]
    pub(crate) fn hash_mut(&mut self) -> &mut HashPart {
        &mut self.hash
    }
}
