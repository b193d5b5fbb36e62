use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl Verdict {
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fails, _) | (_, Verdict::Fails) => Verdict::Fails,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Holds,
        }
    }

    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub law: String,
    pub cells: Vec<String>,
    pub detail: String,
}

/// Outcome of a law or property check. Only the first `MAX_STORED` violations
/// are kept; `violation_count` counts all of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub verdict: Verdict,
    pub violation_count: usize,
    pub violations: Vec<Violation>,
    pub inconclusive: Vec<String>,
    pub stats: BTreeMap<String, u64>,
}

const MAX_STORED: usize = 64;

impl CheckReport {
    pub fn new(check: impl Into<String>) -> Self {
        CheckReport {
            check: check.into(),
            verdict: Verdict::Holds,
            violation_count: 0,
            violations: Vec::new(),
            inconclusive: Vec::new(),
            stats: BTreeMap::new(),
        }
    }

    pub fn violation(&mut self, law: &str, cells: Vec<String>, detail: impl Into<String>) {
        self.verdict = Verdict::Fails;
        self.violation_count += 1;
        if self.violations.len() < MAX_STORED {
            self.violations.push(Violation {
                law: law.to_string(),
                cells,
                detail: detail.into(),
            });
        }
    }

    pub fn inconclusive(&mut self, why: impl Into<String>) {
        if self.verdict == Verdict::Holds {
            self.verdict = Verdict::Inconclusive;
        }
        if self.inconclusive.len() < MAX_STORED {
            self.inconclusive.push(why.into());
        }
    }

    pub fn count(&mut self, key: &str, n: u64) {
        *self.stats.entry(key.to_string()).or_insert(0) += n;
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.verdict = self.verdict.and(other.verdict);
        self.violation_count += other.violation_count;
        for v in other.violations {
            if self.violations.len() < MAX_STORED {
                self.violations.push(v);
            }
        }
        for i in other.inconclusive {
            if self.inconclusive.len() < MAX_STORED {
                self.inconclusive.push(i);
            }
        }
        for (k, v) in other.stats {
            *self.stats.entry(k).or_insert(0) += v;
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn fails(&self) -> bool {
        self.verdict == Verdict::Fails
    }

    pub fn summary(&self) -> String {
        let mut s = format!("{}: {}", self.check, self.verdict);
        if self.violation_count > 0 {
            s.push_str(&format!(" ({} violations", self.violation_count));
            if let Some(v) = self.violations.first() {
                s.push_str(&format!("; first: {} [{}] {}", v.law, v.cells.join(", "), v.detail));
            }
            s.push(')');
        }
        if !self.inconclusive.is_empty() {
            s.push_str(&format!(" ({} inconclusive)", self.inconclusive.len()));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_combination() {
        assert_eq!(Verdict::Holds.and(Verdict::Holds), Verdict::Holds);
        assert_eq!(Verdict::Holds.and(Verdict::Inconclusive), Verdict::Inconclusive);
        assert_eq!(Verdict::Inconclusive.and(Verdict::Fails), Verdict::Fails);
    }

    #[test]
    fn merge_accumulates() {
        let mut a = CheckReport::new("a");
        let mut b = CheckReport::new("b");
        b.violation("law", vec!["x".into()], "bad");
        b.count("instances", 3);
        a.count("instances", 2);
        a.merge(b);
        assert!(a.fails());
        assert_eq!(a.violation_count, 1);
        assert_eq!(a.stats["instances"], 5);
    }
}
