//! Ground truth for testing `hybrid-table`.
//!
//! [`ModelMap`] is the plain partial map every table must agree with.
//! [`brute_force_trace`] replays short operation lists through a separate,
//! deliberately naive rendering of the table's insert and rebuild rules and
//! reports the insertion calls and rebuild schedule it observed. The only
//! code it borrows from the table crate is [`main_position`], so the two
//! agree on where keys land when both use the same pinned salt.

use std::collections::BTreeMap;

use hybrid_table::workloads::WorkloadOp;
use hybrid_table::{main_position, Key, Mode, RehashEvent, ResizePolicy, Value};
use thiserror::Error;

pub const MAX_TRACE_OPS: usize = 64;
pub const MAX_TRACE_CAPACITY: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("operation needs a driver to pick its key: {0:?}")]
pub struct UnresolvedOp(pub WorkloadOp);

/// A mathematical partial map from keys to values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelMap {
    entries: BTreeMap<Key, Value>,
}

impl ModelMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Applies one operation. Lookups return the bound value; every other
    /// operation returns `None`.
    pub fn apply(&mut self, op: &WorkloadOp) -> Result<Option<Value>, UnresolvedOp> {
        match *op {
            WorkloadOp::InsertFresh(k, v) | WorkloadOp::InsertAt(k, v) => {
                self.entries.insert(k, v);
                Ok(None)
            }
            WorkloadOp::DeleteKey(k) => {
                self.entries.remove(&k);
                Ok(None)
            }
            WorkloadOp::Lookup(k) => Ok(self.entries.get(&k).copied()),
            WorkloadOp::DeleteRandomPresent => Err(UnresolvedOp(*op)),
        }
    }

    pub fn get(&self, key: &Key) -> Option<Value> {
        self.entries.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeMap<Key, Value> {
        &self.entries
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceRefusal {
    #[error("{0} operations exceed the limit of {MAX_TRACE_OPS}")]
    TooManyOps(usize),
    #[error("a hash part of {0} slots exceeds the limit of {MAX_TRACE_CAPACITY}")]
    CapacityTooLarge(usize),
    #[error(transparent)]
    Unresolved(#[from] UnresolvedOp),
}

/// What the brute-force replay observed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub insertion_calls: u64,
    pub new_key_calls: u64,
    pub events: Vec<RehashEvent>,
    /// Final contents of the table.
    pub contents: BTreeMap<Key, Value>,
    /// Results of the `Lookup` operations, in order.
    pub lookups: Vec<Option<Value>>,
}

/// Replays `ops` (at most [`MAX_TRACE_OPS`], all keys explicit) through the
/// naive table with a fixed `salt`.
pub fn brute_force_trace(
    ops: &[WorkloadOp],
    policy: ResizePolicy,
    mode: Mode,
    salt: u64,
) -> Result<Trace, TraceRefusal> {
    if ops.len() > MAX_TRACE_OPS {
        return Err(TraceRefusal::TooManyOps(ops.len()));
    }
    let mut t = Naive {
        policy,
        mode,
        salt,
        clock: 0,
        array: Vec::new(),
        keys: Vec::new(),
        vals: Vec::new(),
        links: Vec::new(),
        cursor: 0,
        trace: Trace::default(),
    };
    for (clock, op) in ops.iter().enumerate() {
        t.clock = clock as u64 + 1;
        match *op {
            WorkloadOp::InsertFresh(k, v) | WorkloadOp::InsertAt(k, v) => t.set(k, v)?,
            WorkloadOp::DeleteKey(k) => t.delete(k),
            WorkloadOp::Lookup(k) => {
                let found = t.get(k);
                t.trace.lookups.push(found);
            }
            WorkloadOp::DeleteRandomPresent => return Err(UnresolvedOp(*op).into()),
        }
    }
    t.trace.contents = t.contents();
    Ok(t.trace)
}

#[derive(Debug)]
struct Naive {
    policy: ResizePolicy,
    mode: Mode,
    salt: u64,
    clock: u64,
    array: Vec<Option<Value>>,
    keys: Vec<Option<Key>>,
    vals: Vec<Option<Value>>,
    links: Vec<Option<usize>>,
    // One past the next slot the free-slot cursor will look at.
    cursor: usize,
    trace: Trace,
}

impl Naive {
    fn home(&self, key: Key) -> usize {
        main_position(&key, self.salt, self.keys.len()).expect("non-empty power-of-two hash part")
    }

    fn array_cell(&self, key: Key) -> Option<usize> {
        match key {
            Key::Int(n) if (n.get() as usize) <= self.array.len() => Some(n.get() as usize - 1),
            _ => None,
        }
    }

    /// Slot holding `key`, live or deleted.
    fn slot_of(&self, key: Key) -> Option<usize> {
        if self.keys.is_empty() {
            return None;
        }
        let mut at = Some(self.home(key));
        while let Some(i) = at {
            if self.keys[i] == Some(key) {
                return Some(i);
            }
            at = self.links[i];
        }
        None
    }

    fn get(&self, key: Key) -> Option<Value> {
        match self.array_cell(key) {
            Some(c) => self.array[c],
            None => self.slot_of(key).and_then(|i| self.vals[i]),
        }
    }

    fn delete(&mut self, key: Key) {
        if let Some(c) = self.array_cell(key) {
            self.array[c] = None;
        } else if let Some(i) = self.slot_of(key) {
            self.vals[i] = None;
        }
    }

    fn set(&mut self, key: Key, value: Value) -> Result<(), TraceRefusal> {
        if let Some(c) = self.array_cell(key) {
            self.array[c] = Some(value);
            return Ok(());
        }
        if let Some(i) = self.slot_of(key) {
            self.vals[i] = Some(value);
            return Ok(());
        }
        self.trace.insertion_calls += 1;
        self.trace.new_key_calls += 1;
        if !self.keys.is_empty() && self.place(key, value) {
            return Ok(());
        }
        self.rebuild(key, value)
    }

    /// Hash-part insertion. Returns false when no free slot is left.
    fn place(&mut self, key: Key, value: Value) -> bool {
        let h = self.home(key);
        if self.vals[h].is_none() {
            self.keys[h] = Some(key);
            self.vals[h] = Some(value);
            return true;
        }
        while self.cursor > 0 && self.keys[self.cursor - 1].is_some() {
            self.cursor -= 1;
        }
        if self.cursor == 0 {
            return false;
        }
        let free = self.cursor - 1;
        let squatter = self.keys[h].unwrap();
        let squatter_home = self.home(squatter);
        if squatter_home == h {
            self.keys[free] = Some(key);
            self.vals[free] = Some(value);
            self.links[free] = self.links[h];
            self.links[h] = Some(free);
        } else {
            let mut prev = squatter_home;
            while self.links[prev] != Some(h) {
                prev = self.links[prev].unwrap();
            }
            self.links[prev] = Some(free);
            self.keys[free] = self.keys[h];
            self.vals[free] = self.vals[h];
            self.links[free] = self.links[h];
            self.keys[h] = Some(key);
            self.vals[h] = Some(value);
            self.links[h] = None;
        }
        true
    }

    fn rebuild(&mut self, key: Key, value: Value) -> Result<(), TraceRefusal> {
        let old_m = self.keys.len();
        let old_a = self.array.len();
        let used_before = self.vals.iter().filter(|v| v.is_some()).count();
        let deleted_before = (0..old_m)
            .filter(|&i| self.keys[i].is_some() && self.vals[i].is_none())
            .count();

        let mut live: Vec<(Key, Value)> = (0..old_m)
            .filter_map(|i| Some((self.keys[i]?, self.vals[i]?)))
            .collect();
        for (c, v) in self.array.iter().enumerate() {
            if let Some(v) = v {
                live.push((Key::int(c as u64 + 1), *v));
            }
        }
        let mut all = live.clone();
        all.push((key, value));

        let new_a = match self.mode {
            Mode::PureHash => 0,
            Mode::Hybrid => best_array_size(&all),
        };
        let in_array = |k: &Key| matches!(k, Key::Int(n) if n.get() as usize <= new_a);
        let for_hash = all.iter().filter(|(k, _)| !in_array(k)).count();
        let new_m = hash_size(self.policy, for_hash);
        if new_m > MAX_TRACE_CAPACITY {
            return Err(TraceRefusal::CapacityTooLarge(new_m));
        }

        self.array = vec![None; new_a];
        self.keys = vec![None; new_m];
        self.vals = vec![None; new_m];
        self.links = vec![None; new_m];
        self.cursor = new_m;

        let mut reinserted = 0;
        for &(k, v) in live.iter().chain(std::iter::once(&(key, value))) {
            if in_array(&k) {
                self.array[k.as_positive_int().unwrap() as usize - 1] = Some(v);
            } else {
                assert!(self.place(k, v), "rebuilt hash part overflowed");
                reinserted += 1;
            }
        }
        if !in_array(&key) {
            reinserted -= 1;
        }
        self.trace.insertion_calls += reinserted;

        self.trace.events.push(RehashEvent {
            t: self.clock,
            old_m,
            new_m,
            old_a,
            new_a,
            used_before,
            deleted_before,
            free_before: old_m - used_before - deleted_before,
            reinserted,
            array_grew: new_a > old_a,
            used_after: self.vals.iter().filter(|v| v.is_some()).count(),
        });
        Ok(())
    }

    fn contents(&self) -> BTreeMap<Key, Value> {
        let mut out = BTreeMap::new();
        for (c, v) in self.array.iter().enumerate() {
            if let Some(v) = v {
                out.insert(Key::int(c as u64 + 1), *v);
            }
        }
        for i in 0..self.keys.len() {
            if let (Some(k), Some(v)) = (self.keys[i], self.vals[i]) {
                out.insert(k, v);
            }
        }
        out
    }
}

/// Largest power of two `n` such that more than `n / 2` of the keys
/// `1..=n` are present, or 0 if there is none.
fn best_array_size(entries: &[(Key, Value)]) -> usize {
    let ints: Vec<u64> = entries
        .iter()
        .filter_map(|(k, _)| k.as_positive_int())
        .collect();
    let mut best = 0;
    for bits in 0..=31u32 {
        let n = 1u64 << bits;
        let inside = ints.iter().filter(|&&k| k <= n).count() as u64;
        if 2 * inside > n {
            best = n as usize;
        }
    }
    best
}

fn hash_size(policy: ResizePolicy, elements: usize) -> usize {
    let wanted = match policy {
        ResizePolicy::Original => elements,
        ResizePolicy::FixedHeadroom => elements + elements / 4,
    };
    if wanted == 0 {
        0
    } else {
        wanted.next_power_of_two()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ins(k: Key) -> WorkloadOp {
        WorkloadOp::InsertAt(k, Value(7))
    }

    #[test]
    fn insert_delete_get() {
        let mut m = ModelMap::new();
        let k = Key::token(3);
        m.apply(&ins(k)).unwrap();
        m.apply(&WorkloadOp::DeleteKey(k)).unwrap();
        assert_eq!(m.apply(&WorkloadOp::Lookup(k)).unwrap(), None);
        assert!(m.is_empty());
    }

    #[test]
    fn last_write_wins() {
        let mut m = ModelMap::new();
        let k = Key::int(4);
        m.apply(&WorkloadOp::InsertAt(k, Value(1))).unwrap();
        m.apply(&WorkloadOp::InsertAt(k, Value(2))).unwrap();
        assert_eq!(m.get(&k), Some(Value(2)));
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn random_delete_is_unresolved() {
        let op = WorkloadOp::DeleteRandomPresent;
        assert_eq!(ModelMap::new().apply(&op), Err(UnresolvedOp(op)));
        assert!(matches!(
            brute_force_trace(&[op], ResizePolicy::Original, Mode::Hybrid, 0),
            Err(TraceRefusal::Unresolved(_))
        ));
    }

    #[test]
    fn empty_list_gives_empty_trace() {
        let t = brute_force_trace(&[], ResizePolicy::Original, Mode::Hybrid, 0).unwrap();
        assert_eq!(t, Trace::default());
    }

    #[test]
    fn limits_are_enforced() {
        let many = vec![WorkloadOp::Lookup(Key::int(1)); MAX_TRACE_OPS + 1];
        assert_eq!(
            brute_force_trace(&many, ResizePolicy::Original, Mode::Hybrid, 0),
            Err(TraceRefusal::TooManyOps(MAX_TRACE_OPS + 1))
        );
        let wide: Vec<_> = (0..17).map(|i| ins(Key::token(i))).collect();
        assert_eq!(
            brute_force_trace(&wide, ResizePolicy::Original, Mode::PureHash, 0),
            Err(TraceRefusal::CapacityTooLarge(32))
        );
    }

    #[test]
    fn array_sizes() {
        let e = |ks: &[u64]| {
            ks.iter()
                .map(|&k| (Key::int(k), Value(0)))
                .collect::<Vec<_>>()
        };
        assert_eq!(best_array_size(&e(&[1])), 1);
        assert_eq!(best_array_size(&e(&[2, 3])), 0);
        assert_eq!(best_array_size(&e(&[1, 2, 4, 5, 7, 9, 11, 12])), 8);
        assert_eq!(best_array_size(&[]), 0);
    }

    #[test]
    fn hash_sizes() {
        assert_eq!(hash_size(ResizePolicy::Original, 0), 0);
        assert_eq!(hash_size(ResizePolicy::Original, 5), 8);
        assert_eq!(hash_size(ResizePolicy::FixedHeadroom, 7), 8);
        assert_eq!(hash_size(ResizePolicy::FixedHeadroom, 13), 16);
    }
}
