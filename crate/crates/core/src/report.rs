use std::fmt;

use serde::{Deserialize, Serialize};

/// Cap on witnesses kept per check; the first one in canonical order is
/// always retained.
pub const MAX_WITNESSES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// One failing instance: the indices (coproduct indices or series
/// exponents), the basis vector the maps were applied to, and both sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub indices: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub basis: Option<usize>,
    pub lhs: String,
    pub rhs: String,
}

impl Witness {
    pub fn new(indices: Vec<i64>, basis: Option<usize>, lhs: impl fmt::Display, rhs: impl fmt::Display) -> Self {
        Witness { indices, basis, lhs: lhs.to_string(), rhs: rhs.to_string() }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {:?}", self.indices)?;
        if let Some(b) = self.basis {
            write!(f, " on e{b}")?;
        }
        write!(f, ": lhs = {} ; rhs = {}", self.lhs, self.rhs)
    }
}

/// Outcome of a check, possibly composed of named sub-checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub verdict: Verdict,
    /// Number of instances evaluated (index tuples times basis vectors).
    pub evaluated: u64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub parts: Vec<CheckReport>,
}

impl CheckReport {
    pub fn pass(check: impl Into<String>, evaluated: u64) -> Self {
        CheckReport { check: check.into(), verdict: Verdict::Pass, evaluated, witnesses: vec![], parts: vec![] }
    }

    /// Pass iff `witnesses` is empty. Witnesses are expected in canonical
    /// order; only the first [`MAX_WITNESSES`] are kept.
    pub fn from_witnesses(check: impl Into<String>, evaluated: u64, mut witnesses: Vec<Witness>) -> Self {
        witnesses.truncate(MAX_WITNESSES);
        let verdict = if witnesses.is_empty() { Verdict::Pass } else { Verdict::Fail };
        CheckReport { check: check.into(), verdict, evaluated, witnesses, parts: vec![] }
    }

    /// A failing report with a single free-form witness, for failures that
    /// are not tied to an index tuple.
    pub fn fail(check: impl Into<String>, witness: Witness) -> Self {
        Self::from_witnesses(check, 1, vec![witness])
    }

    /// Combines sub-checks; fails iff any part fails, and then carries the
    /// first witness of each failing part.
    pub fn group(check: impl Into<String>, parts: Vec<CheckReport>) -> Self {
        let evaluated = parts.iter().map(|p| p.evaluated).sum();
        let witnesses: Vec<Witness> = parts
            .iter()
            .filter(|p| !p.verdict.is_pass())
            .filter_map(|p| p.witnesses.first().cloned())
            .take(MAX_WITNESSES)
            .collect();
        let verdict = if parts.iter().all(|p| p.verdict.is_pass()) { Verdict::Pass } else { Verdict::Fail };
        debug_assert!(verdict.is_pass() || !witnesses.is_empty());
        CheckReport { check: check.into(), verdict, evaluated, witnesses, parts }
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }

    /// Depth-first search for a part by name.
    pub fn find(&self, check: &str) -> Option<&CheckReport> {
        if self.check == check {
            return Some(self);
        }
        self.parts.iter().find_map(|p| p.find(check))
    }

    /// Indented one-line-per-check summary.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        self.write_summary(&mut out, 0);
        out
    }

    fn write_summary(&self, out: &mut String, depth: usize) {
        use std::fmt::Write;
        let _ = writeln!(
            out,
            "{:indent$}{}: {} ({} evaluated)",
            "",
            self.check,
            self.verdict,
            self.evaluated,
            indent = depth * 2
        );
        if self.parts.is_empty() {
            for w in &self.witnesses {
                let _ = writeln!(out, "{:indent$}  witness {w}", "", indent = depth * 2);
            }
        }
        for p in &self.parts {
            p.write_summary(out, depth + 1);
        }
    }
}
