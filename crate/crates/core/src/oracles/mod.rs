//! Brute-force source solvers and the harness that cross-checks reductions, moment-curve sign patterns and solvers.

mod descartes;
mod equivalence;
pub mod families;
mod reduction;
mod source;

use serde::{Deserialize, Serialize};

pub use descartes::verify_descartes;
pub use equivalence::{verify_oracle_equivalence, EquivalenceConfig};
pub use reduction::{default_families, verify_reduction, CaseFamily, ReductionKind};
pub use source::{solve_gridtiling_inequality, solve_pvc};

/// One checked case: what the source oracle said, what the reduced side said, and whether they agree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub case: String,
    pub source: String,
    pub reduced: String,
    pub matched: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub kind: String,
    pub cases: Vec<CaseResult>,
    /// Individual predicate checks performed besides the case comparisons.
    pub samples: u64,
    pub violations: u64,
    /// One line per violation.
    pub notes: Vec<String>,
    pub wall_time_secs: f64,
}

impl VerificationReport {
    pub fn new(kind: impl Into<String>) -> Self {
        Self { kind: kind.into(), cases: Vec::new(), samples: 0, violations: 0, notes: Vec::new(), wall_time_secs: 0.0 }
    }

    pub fn mismatches(&self) -> usize {
        self.cases.iter().filter(|c| !c.matched).count()
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.mismatches() == 0
    }

    pub fn violation(&mut self, note: String) {
        self.violations += 1;
        self.notes.push(note);
    }

    /// Appends `other`; the combined kind is kept from `self`.
    pub fn merge(&mut self, other: VerificationReport) {
        self.cases.extend(other.cases);
        self.samples += other.samples;
        self.violations += other.violations;
        self.notes.extend(other.notes);
        self.wall_time_secs += other.wall_time_secs;
    }

    /// Same report with the timing zeroed, for comparing runs.
    pub fn without_timing(&self) -> Self {
        Self { wall_time_secs: 0.0, ..self.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_adds_up() {
        let mut a = VerificationReport::new("x");
        a.cases.push(CaseResult { case: "1".into(), source: "true".into(), reduced: "true".into(), matched: true });
        a.samples = 3;
        let mut b = VerificationReport::new("y");
        b.violation("bad".into());
        b.samples = 2;
        a.merge(b);
        assert_eq!(a.kind, "x");
        assert_eq!(a.samples, 5);
        assert_eq!(a.violations, 1);
        assert!(!a.passed());
    }

    #[test]
    fn json_field_order_is_stable() {
        let r = VerificationReport::new("descartes");
        let text = r.to_json();
        let keys = ["\"kind\"", "\"cases\"", "\"samples\"", "\"violations\"", "\"notes\"", "\"wall_time_secs\""];
        let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        let back: VerificationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
