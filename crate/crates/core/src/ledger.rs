//! Query ledger: per-label counts of forward, inverse and controlled
//! applications of attributed operators.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Whether a ledger entry counts oracle queries or applications of a
/// composite unitary built on top of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryKind {
    Oracle,
    Composite,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCounts {
    pub forward: u64,
    pub inverse: u64,
    pub controlled_forward: u64,
    pub controlled_inverse: u64,
}

impl QueryCounts {
    pub fn total(&self) -> u64 {
        self.forward + self.inverse + self.controlled_forward + self.controlled_inverse
    }

    pub fn controlled(&self) -> u64 {
        self.controlled_forward + self.controlled_inverse
    }

    fn add(&mut self, other: &QueryCounts) {
        self.forward += other.forward;
        self.inverse += other.inverse;
        self.controlled_forward += other.controlled_forward;
        self.controlled_inverse += other.controlled_inverse;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub kind: QueryKind,
    pub counts: QueryCounts,
}

/// Counters only ever increase; a ledger belongs to one run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryLedger {
    entries: BTreeMap<String, LedgerEntry>,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, label: &str, kind: QueryKind, inverse: bool, controlled: bool) {
        let entry = self
            .entries
            .entry(label.to_string())
            .or_insert(LedgerEntry {
                kind,
                counts: QueryCounts::default(),
            });
        let c = &mut entry.counts;
        match (controlled, inverse) {
            (false, false) => c.forward += 1,
            (false, true) => c.inverse += 1,
            (true, false) => c.controlled_forward += 1,
            (true, true) => c.controlled_inverse += 1,
        }
    }

    /// Counts for one label (zero if never recorded).
    pub fn counts(&self, label: &str) -> QueryCounts {
        self.entries
            .get(label)
            .map(|e| e.counts)
            .unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &LedgerEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Sum over all oracle entries: the measured query complexity.
    pub fn oracle_totals(&self) -> QueryCounts {
        let mut sum = QueryCounts::default();
        for e in self
            .entries
            .values()
            .filter(|e| e.kind == QueryKind::Oracle)
        {
            sum.add(&e.counts);
        }
        sum
    }

    /// Adds every counter of `other` into `self`.
    pub fn absorb(&mut self, other: &QueryLedger) {
        for (label, e) in &other.entries {
            self.entries
                .entry(label.clone())
                .or_insert(LedgerEntry {
                    kind: e.kind,
                    counts: QueryCounts::default(),
                })
                .counts
                .add(&e.counts);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds `times` copies of `other`. With `controlled`, uncontrolled
    /// counts of `other` are booked as controlled ones.
    pub fn absorb_repeated(&mut self, other: &QueryLedger, times: u64, controlled: bool) {
        for (label, e) in &other.entries {
            let c = e.counts;
            let scaled = if controlled {
                QueryCounts {
                    forward: 0,
                    inverse: 0,
                    controlled_forward: (c.forward + c.controlled_forward) * times,
                    controlled_inverse: (c.inverse + c.controlled_inverse) * times,
                }
            } else {
                QueryCounts {
                    forward: c.forward * times,
                    inverse: c.inverse * times,
                    controlled_forward: c.controlled_forward * times,
                    controlled_inverse: c.controlled_inverse * times,
                }
            };
            self.entries
                .entry(label.clone())
                .or_insert(LedgerEntry {
                    kind: e.kind,
                    counts: QueryCounts::default(),
                })
                .counts
                .add(&scaled);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_and_totals() {
        let mut l = QueryLedger::new();
        l.record("p", QueryKind::Oracle, false, false);
        l.record("p", QueryKind::Oracle, true, true);
        l.record("U", QueryKind::Composite, false, false);
        assert_eq!(l.counts("p").forward, 1);
        assert_eq!(l.counts("p").controlled_inverse, 1);
        assert_eq!(l.oracle_totals().total(), 2);
        assert_eq!(l.counts("missing"), QueryCounts::default());
        let mut m = QueryLedger::new();
        m.absorb(&l);
        m.absorb(&l);
        assert_eq!(m.counts("U").forward, 2);
    }
}
