//! Capacity rules applied at rehash time.

use serde::{Deserialize, Serialize};

/// Integer keys above `2^MAX_ARRAY_BITS` never go to the array part.
pub const MAX_ARRAY_BITS: usize = 31;

/// How the new hash capacity is derived from the number of elements the
/// rebuilt hash part has to hold (pending key included).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResizePolicy {
    /// Lua 5.4: smallest power of two holding every element, so the new hash
    /// part can come out completely full.
    Original,
    /// Sizes for `n + ⌊n/4⌋` elements, leaving roughly a fifth of the slots
    /// free after every rebuild.
    FixedHeadroom,
}

impl ResizePolicy {
    /// Hash capacity for `elements` entries (0 stays 0).
    pub fn hash_capacity(self, elements: usize) -> usize {
        let size = match self {
            ResizePolicy::Original => elements,
            ResizePolicy::FixedHeadroom => elements + (elements >> 2),
        };
        if size == 0 {
            0
        } else {
            1usize << ceil_log2(size as u64)
        }
    }
}

/// `⌈log2 x⌉` for `x >= 1`.
#[inline]
pub fn ceil_log2(x: u64) -> u32 {
    debug_assert!(x >= 1);
    64 - (x - 1).leading_zeros()
}

/// Integer keys bucketed by binary slice: slice `i` counts keys in
/// `(2^(i-1), 2^i]`, slice 0 counts key 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerCensus {
    slices: [u64; MAX_ARRAY_BITS + 1],
}

impl Default for IntegerCensus {
    fn default() -> Self {
        IntegerCensus {
            slices: [0; MAX_ARRAY_BITS + 1],
        }
    }
}

impl IntegerCensus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_keys<I: IntoIterator<Item = u64>>(keys: I) -> Self {
        let mut c = Self::new();
        for k in keys {
            c.add(k);
        }
        c
    }

    /// Counts `key` if it could ever be an array index.
    pub fn add(&mut self, key: u64) {
        if (1..=1 << MAX_ARRAY_BITS).contains(&key) {
            self.slices[ceil_log2(key) as usize] += 1;
        }
    }

    pub fn slices(&self) -> &[u64] {
        &self.slices
    }

    /// Number of counted keys in `1..=capacity` (`capacity` a power of two or 0).
    pub fn count_up_to(&self, capacity: usize) -> u64 {
        if capacity == 0 {
            return 0;
        }
        let top = capacity.trailing_zeros() as usize;
        self.slices[..=top].iter().sum()
    }
}

/// Largest `2^a` such that more than half of `1..=2^a` is populated, or 0
/// when no range qualifies (key 1 absent).
pub fn compute_array_capacity(census: &IntegerCensus) -> usize {
    let mut cumulative = 0;
    let mut best = 0;
    for (a, count) in census.slices.iter().enumerate() {
        cumulative += count;
        let range = 1u64 << a;
        if cumulative > range / 2 {
            best = range as usize;
        }
    }
    best
}
