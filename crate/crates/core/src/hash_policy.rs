//! Salted hashing under the simple uniform hashing model.
//!
//! Every key is hashed with one 64-bit avalanche mix of (key, salt), reduced
//! modulo the power-of-two hash capacity. The salt is redrawn (derived from a
//! master seed and a generation counter) at every rehash, so bucket choices
//! are resampled exactly when the table is rebuilt.

use serde::{Deserialize, Serialize};

use crate::error::TableError;
use crate::key::Key;

const TOKEN_DOMAIN: u64 = 0x9e37_79b9_7f4a_7c15;
const GENERATION_DOMAIN: u64 = 0xd1b5_4a32_d192_ed03;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn key_word(key: &Key) -> u64 {
    match key {
        Key::Int(n) => n.get(),
        Key::Token(t) => t.wrapping_add(TOKEN_DOMAIN) ^ TOKEN_DOMAIN.rotate_left(17),
    }
}

#[inline]
pub(crate) fn slot_of(key: &Key, salt: u64, capacity: usize) -> usize {
    debug_assert!(capacity.is_power_of_two());
    (mix64(mix64(key_word(key)) ^ salt) as usize) & (capacity - 1)
}

/// Main position of `key` in a hash part of `capacity` slots.
///
/// `capacity` must be a power of two; zero is rejected because nothing may be
/// hashed into an empty hash part.
pub fn main_position(key: &Key, salt: u64, capacity: usize) -> Result<usize, TableError> {
    if capacity == 0 {
        return Err(TableError::IllegalState(
            "main position in an empty hash part",
        ));
    }
    if !capacity.is_power_of_two() {
        return Err(TableError::IllegalState(
            "hash capacity is not a power of two",
        ));
    }
    Ok(slot_of(key, salt, capacity))
}

/// Salt lifecycle of one table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaltState {
    master_seed: u64,
    generation: u64,
    current: u64,
    pinned: bool,
}

impl SaltState {
    pub fn new(master_seed: u64) -> Self {
        SaltState {
            master_seed,
            generation: 0,
            current: derive_salt(master_seed, 0),
            pinned: false,
        }
    }

    /// A salt that never changes across rehashes. Used to line the table up
    /// against independent replays that hash with the same fixed salt.
    pub fn pinned(salt: u64) -> Self {
        SaltState {
            master_seed: salt,
            generation: 0,
            current: salt,
            pinned: true,
        }
    }

    pub fn current(&self) -> u64 {
        self.current
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn is_pinned(&self) -> bool {
        self.pinned
    }

    /// Moves to the next generation. Called once per rehash.
    pub fn advance_generation(&mut self) {
        self.generation += 1;
        if !self.pinned {
            self.current = derive_salt(self.master_seed, self.generation);
        }
    }
}

fn derive_salt(master_seed: u64, generation: u64) -> u64 {
    mix64(master_seed ^ mix64(generation.wrapping_add(GENERATION_DOMAIN)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn single_slot_always_maps_to_zero() {
        for i in 1..100 {
            assert_eq!(main_position(&Key::int(i), i * 31, 1), Ok(0));
            assert_eq!(main_position(&Key::token(i), 7, 1), Ok(0));
        }
    }

    #[test]
    fn empty_or_odd_capacity_is_illegal() {
        assert!(matches!(
            main_position(&Key::int(3), 0, 0),
            Err(TableError::IllegalState(_))
        ));
        assert!(main_position(&Key::int(3), 0, 12).is_err());
    }

    #[test]
    fn deterministic() {
        let k = Key::token(123_456);
        assert_eq!(
            main_position(&k, 99, 1 << 12),
            main_position(&k, 99, 1 << 12)
        );
    }

    #[test]
    fn int_and_token_with_same_id_hash_independently() {
        let collisions = (1..=4096u64)
            .filter(|&i| slot_of(&Key::int(i), 5, 1 << 16) == slot_of(&Key::token(i), 5, 1 << 16))
            .count();
        assert!(collisions < 8, "{collisions}");
    }

    /// Chi-square over 2^10 buckets for 10^6 sequential tokens. The critical
    /// value for 1023 degrees of freedom at significance 1e-6 is ~1258.4
    /// (Wilson-Hilferty: 1023 * (1 - 2/(9*1023) + 4.753 * sqrt(2/(9*1023)))^3).
    #[test]
    fn buckets_pass_chi_square() {
        const M: usize = 1 << 10;
        const N: u64 = 1_000_000;
        let salt = SaltState::new(2024).current();
        let mut counts = vec![0u64; M];
        for i in 0..N {
            counts[main_position(&Key::token(i), salt, M).unwrap()] += 1;
        }
        let expected = N as f64 / M as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        let df = (M - 1) as f64;
        let z = 4.753_424;
        let h = 2.0 / (9.0 * df);
        let critical = df * (1.0 - h + z * h.sqrt()).powi(3);
        assert!(chi2 < critical, "chi2 = {chi2}, critical = {critical}");
    }

    #[test]
    fn equal_seeds_and_generations_agree() {
        let mut a = SaltState::new(42);
        let mut b = SaltState::new(42);
        for _ in 0..5 {
            a.advance_generation();
            b.advance_generation();
        }
        assert_eq!(a, b);
        assert_eq!(a.generation(), 5);
    }

    #[test]
    fn salts_distinct_across_generations() {
        let mut s = SaltState::new(7);
        let mut seen = HashSet::new();
        seen.insert(s.current());
        for _ in 0..10_000 {
            s.advance_generation();
            assert!(seen.insert(s.current()));
        }
    }

    #[test]
    fn pinned_salt_survives_generations() {
        let mut s = SaltState::pinned(0xabc);
        s.advance_generation();
        s.advance_generation();
        assert_eq!(s.current(), 0xabc);
        assert_eq!(s.generation(), 2);
    }

    #[test]
    fn resalting_redistributes() {
        const M: usize = 1 << 10;
        let mut s = SaltState::new(11);
        let before = s.current();
        s.advance_generation();
        let after = s.current();
        let kept = (0..1000u64)
            .filter(|&i| slot_of(&Key::token(i), before, M) == slot_of(&Key::token(i), after, M))
            .count();
        // Expected fraction kept is 1/M, i.e. ~1 key out of 1000.
        assert!((kept as f64 / 1000.0) < 10.0 / M as f64, "{kept}");
    }
}
