//! Line-based workload files.
//!
//! ```text
//! I <key> <value>    insert or update
//! D <key>            delete
//! L <key>            lookup
//! ```
//!
//! Keys use the [`Key`] text form (`12` or `@12`), values are unsigned
//! decimals. `#` starts a comment running to the end of the line; blank
//! lines are skipped.

use std::fmt;
use std::io;

use super::WorkloadOp;
use crate::key::{Key, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

pub fn parse_workload(input: &str) -> Result<Vec<WorkloadOp>, ParseError> {
    let mut ops = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ParseError {
            line: idx + 1,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let key = |s: &str| s.parse::<Key>().map_err(|e| err(e.to_string()));
        let op = match fields.as_slice() {
            ["I", k, v] => {
                let value = v
                    .parse::<u64>()
                    .map_err(|_| err(format!("invalid value `{v}`")))?;
                WorkloadOp::InsertAt(key(k)?, Value(value))
            }
            ["D", k] => WorkloadOp::DeleteKey(key(k)?),
            ["L", k] => WorkloadOp::Lookup(key(k)?),
            _ => return Err(err(format!("unrecognised operation `{line}`"))),
        };
        ops.push(op);
    }
    Ok(ops)
}

/// Fresh insertions are written as plain `I` lines. Unresolved random
/// deletions cannot be written; see [`super::resolve`].
pub fn write_workload<'a, W, I>(mut out: W, ops: I) -> io::Result<()>
where
    W: io::Write,
    I: IntoIterator<Item = &'a WorkloadOp>,
{
    for op in ops {
        match op {
            WorkloadOp::InsertFresh(k, v) | WorkloadOp::InsertAt(k, v) => {
                writeln!(out, "I {k} {v}")?
            }
            WorkloadOp::DeleteKey(k) => writeln!(out, "D {k}")?,
            WorkloadOp::Lookup(k) => writeln!(out, "L {k}")?,
            WorkloadOp::DeleteRandomPresent => {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidInput,
                    "random deletions must be resolved before writing",
                ))
            }
        }
    }
    Ok(())
}
