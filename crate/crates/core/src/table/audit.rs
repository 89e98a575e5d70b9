use std::collections::HashSet;
use std::fmt;

use super::{HybridTable, Mode, SlotState};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub slot: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.slot {
            Some(i) => write!(f, "slot {i}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub violations: Vec<Violation>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn flag(&mut self, slot: Option<usize>, message: impl Into<String>) {
        self.violations.push(Violation {
            slot,
            message: message.into(),
        });
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            return f.write_str("clean");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

pub(super) fn audit(table: &HybridTable) -> AuditReport {
    let mut report = AuditReport::default();
    let hash = &table.hash;
    let slots = &hash.slots;
    let m = slots.len();
    let a = table.array.capacity();

    if m != 0 && !m.is_power_of_two() {
        report.flag(None, format!("hash capacity {m} is not a power of two"));
    }
    if a != 0 && !a.is_power_of_two() {
        report.flag(None, format!("array capacity {a} is not a power of two"));
    }
    if table.mode == Mode::PureHash && a != 0 {
        report.flag(None, "pure-hash table has a non-empty array part");
    }
    if hash.last_free < -1 || hash.last_free >= m as isize {
        report.flag(
            None,
            format!("last_free {} outside [-1, {m})", hash.last_free),
        );
    }

    let mut in_degree = vec![0u32; m];
    let mut keys = HashSet::with_capacity(m);
    for (i, s) in slots.iter().enumerate() {
        match s.state() {
            SlotState::Invalid => report.flag(Some(i), "value present without a key"),
            SlotState::Free if s.next.is_some() => report.flag(Some(i), "free slot carries a link"),
            _ => {}
        }
        if (i as isize) > hash.last_free && s.key.is_none() {
            report.flag(Some(i), "free slot to the right of last_free");
        }
        if let Some(n) = s.next {
            match in_degree.get_mut(n as usize) {
                Some(d) => *d += 1,
                None => report.flag(Some(i), format!("next link {n} out of range")),
            }
        }
        if let Some(k) = s.key {
            if !keys.insert(k) {
                report.flag(Some(i), format!("key {k} stored twice"));
            }
            if let Some(n) = k.as_positive_int() {
                if n <= a as u64 {
                    report.flag(Some(i), format!("key {k} belongs to the array part"));
                }
            }
        }
    }
    if !report.is_clean() {
        // Chain walks below assume in-range links.
        return report;
    }
    for (i, &d) in in_degree.iter().enumerate() {
        if d > 1 {
            report.flag(Some(i), format!("{d} links point here"));
        }
    }

    // Walk every chain from its head; whatever has a predecessor but is never
    // reached sits on a cycle.
    let mut reached = vec![false; m];
    for head in (0..m).filter(|&i| in_degree[i] == 0) {
        let mut i = head;
        let mut steps = 0;
        loop {
            reached[i] = true;
            steps += 1;
            match slots[i].next {
                Some(n) if steps <= m => i = n as usize,
                Some(_) => {
                    report.flag(Some(head), "chain does not terminate");
                    break;
                }
                None => break,
            }
        }
    }
    for i in (0..m).filter(|&i| !reached[i]) {
        report.flag(Some(i), "slot lies on a cycle of next links");
    }
    if !report.is_clean() {
        return report;
    }

    for (i, s) in slots.iter().enumerate() {
        let Some(k) = s.key else { continue };
        let mut j = hash.main_position(&k);
        let mut found = j == i;
        while !found {
            match slots[j].next {
                Some(n) => j = n as usize,
                None => break,
            }
            found = j == i;
        }
        if !found {
            report.flag(
                Some(i),
                format!(
                    "key {k} unreachable from its main position {}",
                    hash.main_position(&k)
                ),
            );
        }
    }
    report
}
