//! Keys and values stored in a [`HybridTable`](crate::HybridTable).

use std::fmt;
use std::num::NonZeroU64;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A table key.
///
/// Only `Int` keys are ever candidates for the array part. `Token` stands in
/// for every key Lua would hash (strings, tables, negative integers, ...):
/// the table only ever needs its hash, so an opaque 64-bit id is enough.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Key {
    Int(NonZeroU64),
    Token(u64),
}

impl Key {
    /// Positive integer key. Panics on zero.
    pub fn int(value: u64) -> Key {
        Key::Int(NonZeroU64::new(value).expect("integer keys must be >= 1"))
    }

    pub fn try_int(value: u64) -> Option<Key> {
        NonZeroU64::new(value).map(Key::Int)
    }

    pub fn token(id: u64) -> Key {
        Key::Token(id)
    }

    /// The integer value when this key could live in the array part.
    pub fn as_positive_int(&self) -> Option<u64> {
        match self {
            Key::Int(n) => Some(n.get()),
            Key::Token(_) => None,
        }
    }
}

/// Text form: positive integers print as decimal (`12`), tokens as `@` followed by
/// the decimal id (`@12`).
impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Key::Int(n) => write!(f, "{n}"),
            Key::Token(t) => write!(f, "@{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseKeyError(pub String);

impl fmt::Display for ParseKeyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid key `{}`", self.0)
    }
}

impl std::error::Error for ParseKeyError {}

impl FromStr for Key {
    type Err = ParseKeyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseKeyError(s.to_owned());
        match s.strip_prefix('@') {
            Some(id) => id.parse().map(Key::Token).map_err(|_| err()),
            None => s.parse::<u64>().ok().and_then(Key::try_int).ok_or_else(err),
        }
    }
}

/// Opaque payload. Absence (Lua's `nil`) is modelled as `Option<Value>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Value(pub u64);

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
