use std::fmt;

use crate::term::{SystemFlavor, Term};

/// At most this many violations keep their witnesses; the count is exact.
pub const MAX_RECORDED_VIOLATIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// A failed law together with the terms that witness it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawViolation {
    pub law: String,
    pub witnesses: Vec<Term>,
}

impl LawViolation {
    pub fn new(law: impl Into<String>, witnesses: Vec<Term>) -> Self {
        LawViolation {
            law: law.into(),
            witnesses,
        }
    }
}

/// Outcome of one verification run. Reports from independent shards combine
/// with [`CheckReport::merge`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub flavor: SystemFlavor,
    pub fragment_size: usize,
    pub config: String,
    pub pairs: u64,
    pub triples: u64,
    pub violation_count: u64,
    pub violations: Vec<LawViolation>,
    pub elapsed_ms: u128,
}

impl CheckReport {
    pub fn new(flavor: SystemFlavor, fragment_size: usize, config: impl Into<String>) -> Self {
        CheckReport {
            flavor,
            fragment_size,
            config: config.into(),
            pairs: 0,
            triples: 0,
            violation_count: 0,
            violations: Vec::new(),
            elapsed_ms: 0,
        }
    }

    pub fn record(&mut self, v: LawViolation) {
        self.violation_count += 1;
        if self.violations.len() < MAX_RECORDED_VIOLATIONS {
            self.violations.push(v);
        }
    }

    pub fn verdict(&self) -> Verdict {
        if self.violation_count == 0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict() == Verdict::Pass
    }

    /// Combines two shards. Counters add up; the fragment size and config
    /// are taken from `self` unless it is empty.
    pub fn merge(mut self, other: CheckReport) -> CheckReport {
        if self.fragment_size == 0 {
            self.fragment_size = other.fragment_size;
        }
        if self.config.is_empty() {
            self.config = other.config;
        }
        self.pairs += other.pairs;
        self.triples += other.triples;
        self.elapsed_ms += other.elapsed_ms;
        self.violation_count += other.violation_count;
        let room = MAX_RECORDED_VIOLATIONS.saturating_sub(self.violations.len());
        self.violations
            .extend(other.violations.into_iter().take(room));
        self
    }

    /// `verdict=<pass|fail> pairs=<n> violations=<n> elapsed_ms=<n>`
    pub fn summary_line(&self) -> String {
        format!(
            "verdict={} pairs={} violations={} elapsed_ms={}",
            self.verdict(),
            self.pairs,
            self.violation_count,
            self.elapsed_ms
        )
    }
}
