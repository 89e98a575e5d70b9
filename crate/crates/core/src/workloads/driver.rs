use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::WorkloadOp;
use crate::error::TableError;
use crate::key::{Key, Value};
use crate::table::HybridTable;

/// Mirror of the keys currently holding a value, with O(1) uniform sampling.
#[derive(Debug, Clone, Default)]
pub struct PresentSet {
    keys: Vec<Key>,
    index: HashMap<Key, usize>,
}

impl PresentSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn contains(&self, key: &Key) -> bool {
        self.index.contains_key(key)
    }

    pub fn insert(&mut self, key: Key) {
        if let std::collections::hash_map::Entry::Vacant(e) = self.index.entry(key) {
            e.insert(self.keys.len());
            self.keys.push(key);
        }
    }

    pub fn remove(&mut self, key: &Key) -> bool {
        let Some(i) = self.index.remove(key) else {
            return false;
        };
        self.keys.swap_remove(i);
        if let Some(moved) = self.keys.get(i) {
            self.index.insert(*moved, i);
        }
        true
    }

    pub fn pick(&self, rng: &mut ChaCha8Rng) -> Option<Key> {
        (!self.keys.is_empty()).then(|| self.keys[rng.random_range(0..self.keys.len())])
    }

    /// Replaces `DeleteRandomPresent` by a concrete `DeleteKey` and updates
    /// the mirror for every op.
    fn resolve(&mut self, op: &WorkloadOp, rng: &mut ChaCha8Rng) -> Result<WorkloadOp, TableError> {
        let resolved = match *op {
            WorkloadOp::DeleteRandomPresent => WorkloadOp::DeleteKey(self.pick(rng).ok_or(
                TableError::IllegalState("random deletion from an empty table"),
            )?),
            other => other,
        };
        match resolved {
            WorkloadOp::InsertFresh(k, _) | WorkloadOp::InsertAt(k, _) => self.insert(k),
            WorkloadOp::DeleteKey(k) => {
                self.remove(&k);
            }
            WorkloadOp::Lookup(_) | WorkloadOp::DeleteRandomPresent => {}
        }
        Ok(resolved)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Applied {
    pub op: WorkloadOp,
    /// Result of a `Lookup`; `None` for every other op.
    pub lookup: Option<Option<Value>>,
}

/// Applies workload operations to a table, advancing its op clock and
/// resolving random deletions against a mirror of the present keys.
#[derive(Debug, Clone)]
pub struct Driver {
    table: HybridTable,
    present: PresentSet,
    rng: ChaCha8Rng,
}

impl Driver {
    /// `rng` resolves `DeleteRandomPresent`; see [`super::trial_rng`].
    pub fn new(table: HybridTable, rng: ChaCha8Rng) -> Self {
        Driver {
            table,
            present: PresentSet::new(),
            rng,
        }
    }

    pub fn table(&self) -> &HybridTable {
        &self.table
    }

    pub fn table_mut(&mut self) -> &mut HybridTable {
        &mut self.table
    }

    pub fn into_table(self) -> HybridTable {
        self.table
    }

    pub fn present(&self) -> &PresentSet {
        &self.present
    }

    pub fn apply(&mut self, op: &WorkloadOp) -> Result<Applied, TableError> {
        let resolved = self.present.resolve(op, &mut self.rng)?;
        self.table.metrics_mut().advance_clock();
        let mut lookup = None;
        match resolved {
            WorkloadOp::InsertFresh(k, v) | WorkloadOp::InsertAt(k, v) => self.table.set(k, v),
            WorkloadOp::DeleteKey(k) => self.table.delete(&k),
            WorkloadOp::Lookup(k) => lookup = Some(self.table.get(&k)),
            WorkloadOp::DeleteRandomPresent => unreachable!("resolved above"),
        }
        Ok(Applied {
            op: resolved,
            lookup,
        })
    }

    pub fn apply_all<'a, I>(&mut self, ops: I) -> Result<(), TableError>
    where
        I: IntoIterator<Item = &'a WorkloadOp>,
    {
        for op in ops {
            self.apply(op)?;
        }
        Ok(())
    }
}

/// Resolves every `DeleteRandomPresent` exactly as a [`Driver`] using `rng`
/// would, without building a table.
pub fn resolve<I>(ops: I, mut rng: ChaCha8Rng) -> Result<Vec<WorkloadOp>, TableError>
where
    I: IntoIterator<Item = WorkloadOp>,
{
    let mut present = PresentSet::new();
    ops.into_iter()
        .map(|op| present.resolve(&op, &mut rng))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{Mode, ResizePolicy};
    use crate::workloads::{gen_stochastic, trial_rng, RngPurpose, StochasticConfig};

    fn driver() -> Driver {
        Driver::new(
            HybridTable::with_seed(Mode::PureHash, ResizePolicy::Original, 1),
            trial_rng(1, 0, RngPurpose::Driver),
        )
    }

    #[test]
    fn present_set_tracks_membership() {
        let mut s = PresentSet::new();
        for i in 0..10 {
            s.insert(Key::token(i));
        }
        s.insert(Key::token(3));
        assert_eq!(s.len(), 10);
        assert!(s.remove(&Key::token(3)));
        assert!(!s.remove(&Key::token(3)));
        assert!(!s.contains(&Key::token(3)));
        assert!(s.contains(&Key::token(9)));
        assert!(s.remove(&Key::token(9)));
        assert_eq!(s.len(), 8);
    }

    #[test]
    fn random_deletion_from_empty_is_refused() {
        let mut d = driver();
        assert!(d.apply(&WorkloadOp::DeleteRandomPresent).is_err());
    }

    #[test]
    fn clock_counts_every_op() {
        let mut d = driver();
        let ops = [
            WorkloadOp::InsertFresh(Key::token(1), Value(1)),
            WorkloadOp::Lookup(Key::token(1)),
            WorkloadOp::DeleteRandomPresent,
            WorkloadOp::Lookup(Key::token(1)),
        ];
        let mut lookups = vec![];
        for op in &ops {
            lookups.push(d.apply(op).unwrap().lookup);
        }
        assert_eq!(lookups, vec![None, Some(Some(Value(1))), None, Some(None)]);
        assert_eq!(d.table().metrics().op_clock(), 4);
        assert!(d.present().is_empty());
    }

    #[test]
    fn resolve_matches_driver() {
        let cfg = StochasticConfig::new(0.7, 5_000, 12);
        let resolved = resolve(
            gen_stochastic(&cfg).unwrap(),
            trial_rng(12, 0, RngPurpose::Driver),
        )
        .unwrap();
        let mut d = Driver::new(
            HybridTable::with_seed(Mode::PureHash, ResizePolicy::Original, 3),
            trial_rng(12, 0, RngPurpose::Driver),
        );
        for (op, expect) in gen_stochastic(&cfg).unwrap().zip(&resolved) {
            assert_eq!(d.apply(&op).unwrap().op, *expect);
        }
        assert!(resolved
            .iter()
            .all(|op| *op != WorkloadOp::DeleteRandomPresent));
        assert_eq!(d.present().len(), d.table().len());
    }
}
