use serde::{Deserialize, Serialize};

use crate::hash_policy::slot_of;
use crate::key::{Key, Value};

/// One cell of the hash part.
///
/// | key     | value   | state   |
/// |---------|---------|---------|
/// | absent  | absent  | free    |
/// | present | absent  | deleted |
/// | present | present | used    |
///
/// An absent key with a present value is never constructed by the table.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub(crate) key: Option<Key>,
    pub(crate) value: Option<Value>,
    pub(crate) next: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlotState {
    Free,
    Deleted,
    Used,
    /// Value without a key; only reachable through corruption.
    Invalid,
}

impl Slot {
    pub fn key(&self) -> Option<Key> {
        self.key
    }

    pub fn value(&self) -> Option<Value> {
        self.value
    }

    pub fn next(&self) -> Option<usize> {
        self.next.map(|n| n as usize)
    }

    pub fn state(&self) -> SlotState {
        match (self.key.is_some(), self.value.is_some()) {
            (false, false) => SlotState::Free,
            (true, false) => SlotState::Deleted,
            (true, true) => SlotState::Used,
            (false, true) => SlotState::Invalid,
        }
    }

    pub fn is_used(&self) -> bool {
        self.key.is_some() && self.value.is_some()
    }
}

/// Returned when the free-slot cursor has run off the left end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct NoFreeSlot;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Placement {
    pub slot: usize,
    /// Slots walked while looking for a displaced key's predecessor.
    pub relocation_probes: u64,
}

/// The chained scatter hash part: `M = 2^m` slots (or none), collision
/// chains threaded through `next`, and the right-to-left free-slot cursor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashPart {
    pub(crate) slots: Vec<Slot>,
    pub(crate) last_free: isize,
    pub(crate) salt: u64,
}

impl HashPart {
    pub(crate) const MAX_CAPACITY: usize = 1 << 31;

    pub fn empty() -> Self {
        HashPart {
            slots: Vec::new(),
            last_free: -1,
            salt: 0,
        }
    }

    pub(crate) fn with_capacity(capacity: usize, salt: u64) -> Self {
        assert!(
            capacity == 0 || capacity.is_power_of_two(),
            "hash capacity {capacity} is not a power of two"
        );
        assert!(
            capacity <= Self::MAX_CAPACITY,
            "hash capacity {capacity} too large"
        );
        HashPart {
            slots: vec![Slot::default(); capacity],
            last_free: capacity as isize - 1,
            salt,
        }
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn last_free(&self) -> isize {
        self.last_free
    }

    pub fn salt(&self) -> u64 {
        self.salt
    }

    /// Panics on an empty hash part.
    #[inline]
    pub fn main_position(&self, key: &Key) -> usize {
        slot_of(key, self.salt, self.capacity())
    }

    /// `(used, deleted, free)` slot counts.
    pub fn census(&self) -> (usize, usize, usize) {
        let mut used = 0;
        let mut deleted = 0;
        for s in &self.slots {
            match (s.key.is_some(), s.value.is_some()) {
                (true, true) => used += 1,
                (true, false) => deleted += 1,
                _ => {}
            }
        }
        (used, deleted, self.capacity() - used - deleted)
    }

    /// Walks the chain starting at the main position of `key`. Returns the
    /// slot holding `key` (used or deleted) and the number of slots inspected.
    #[inline]
    pub(crate) fn locate(&self, key: &Key) -> (Option<usize>, u64) {
        if self.slots.is_empty() {
            return (None, 0);
        }
        let mut i = self.main_position(key);
        let mut probes = 1;
        loop {
            let slot = &self.slots[i];
            if slot.key.as_ref() == Some(key) {
                return (Some(i), probes);
            }
            match slot.next {
                Some(n) => {
                    i = n as usize;
                    probes += 1;
                }
                None => return (None, probes),
            }
        }
    }

    /// Moves the cursor left past every slot holding a key (used or deleted)
    /// and returns it, or `None` once it leaves the slot vector.
    pub fn get_free_pos(&mut self) -> Option<usize> {
        while self.last_free >= 0 && self.slots[self.last_free as usize].key.is_some() {
            self.last_free -= 1;
        }
        (self.last_free >= 0).then_some(self.last_free as usize)
    }

    /// Places a key that is not in the hash part in any state.
    pub(crate) fn insert_new(&mut self, key: Key, value: Value) -> Result<Placement, NoFreeSlot> {
        let i = self.main_position(&key);
        if self.slots[i].value.is_none() {
            // Free or deleted: take the slot, keeping a deleted slot's link.
            self.slots[i].key = Some(key);
            self.slots[i].value = Some(value);
            return Ok(Placement {
                slot: i,
                relocation_probes: 0,
            });
        }
        let f = self.get_free_pos().ok_or(NoFreeSlot)?;
        let occupant = self.slots[i].key.expect("used slot has a key");
        let home = self.main_position(&occupant);
        if home == i {
            // Occupant owns the chain: the new key becomes its second element.
            self.slots[f] = Slot {
                key: Some(key),
                value: Some(value),
                next: self.slots[i].next,
            };
            self.slots[i].next = Some(f as u32);
            Ok(Placement {
                slot: f,
                relocation_probes: 0,
            })
        } else {
            // Occupant is squatting: move it to the free slot and repair the
            // link from its predecessor in its own chain.
            let mut p = home;
            let mut probes = 1;
            while self.slots[p].next != Some(i as u32) {
                p = self.slots[p]
                    .next
                    .expect("displaced key is reachable from its main position")
                    as usize;
                probes += 1;
            }
            self.slots[f] = self.slots[i];
            self.slots[p].next = Some(f as u32);
            self.slots[i] = Slot {
                key: Some(key),
                value: Some(value),
                next: None,
            };
            Ok(Placement {
                slot: i,
                relocation_probes: probes,
            })
        }
    }
}
