use serde::{Deserialize, Serialize};

use crate::key::Value;

/// Dense part for keys `1..=A`, `A` zero or a power of two.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayPart {
    pub(crate) cells: Vec<Option<Value>>,
}

impl ArrayPart {
    pub(crate) fn with_capacity(capacity: usize) -> Self {
        assert!(capacity == 0 || capacity.is_power_of_two());
        ArrayPart {
            cells: vec![None; capacity],
        }
    }

    pub fn capacity(&self) -> usize {
        self.cells.len()
    }

    /// Cells in key order: `cells()[i]` holds key `i + 1`.
    pub fn cells(&self) -> &[Option<Value>] {
        &self.cells
    }

    pub fn occupied(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    /// Cell index for `key` when it falls inside `1..=A`.
    #[inline]
    pub(crate) fn index_of(&self, key: u64) -> Option<usize> {
        (key >= 1 && key <= self.cells.len() as u64).then(|| (key - 1) as usize)
    }
}
