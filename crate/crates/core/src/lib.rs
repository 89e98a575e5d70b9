//! A standalone model of Lua 5.4's hybrid table: a dense array part for
//! small positive integer keys next to a chained scatter hash part whose
//! collision chains are threaded through the slot vector itself.
//!
//! The table is fully instrumented (insertion-function calls, probe counts,
//! one [`RehashEvent`] per rebuild) and its hash-part sizing is pluggable
//! through [`ResizePolicy`], so the original Lua behaviour and the
//! fixed-headroom variant can be replayed side by side on the same
//! [`workloads`].

pub mod error;
pub mod hash_policy;
pub mod key;
pub mod metrics;
pub mod table;
pub mod workloads;

pub use error::TableError;
pub use hash_policy::{main_position, SaltState};
pub use key::{Key, Value};
pub use metrics::{MetricsLog, MetricsSummary, RehashEvent};
pub use table::{
    compute_array_capacity, ArrayPart, AuditReport, HashPart, HybridTable, IntegerCensus, Mode,
    ResizePolicy, SearchOutcome, Slot, SlotState,
};
