//! Check outcomes shared by the verifier, the axiom harness and the runner.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::variable::RandomVariable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Only a degenerate form of the property is checkable; that form passed.
    Degenerate,
    /// The check's hypothesis does not hold for the input, so it was not run.
    HypothesisUnmet,
}

impl Status {
    /// Pass, degenerate pass, or an unmet hypothesis (which is not a failure
    /// of the property itself).
    pub fn is_ok(self) -> bool {
        !matches!(self, Status::Fail)
    }
}

/// The worst offending comparison of a check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Witness {
    pub detail: String,
    pub leaf: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct CheckReport {
    pub check: String,
    pub status: Status,
    /// Largest violation seen (0 when every comparison holds exactly).
    pub worst: f64,
    /// Number of random-variable comparisons performed.
    pub cases: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status.is_ok()
    }

    pub fn hypothesis_unmet(check: impl Into<String>, note: String) -> Self {
        Self {
            check: check.into(),
            status: Status::HypothesisUnmet,
            worst: 0.0,
            cases: 0,
            witness: None,
            note: Some(note),
        }
    }
}

/// Accumulates comparisons and keeps the worst violation.
#[derive(Debug, Clone)]
pub struct Tally {
    check: String,
    tol: f64,
    worst: f64,
    cases: u64,
    witness: Option<Witness>,
    failed: bool,
    note: Option<String>,
}

impl Tally {
    pub fn new(check: impl Into<String>, tol: f64) -> Self {
        Self {
            check: check.into(),
            tol,
            worst: 0.0,
            cases: 0,
            witness: None,
            failed: false,
            note: None,
        }
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn record(&mut self, leaf: usize, lhs: f64, rhs: f64, gap: f64, detail: &dyn Fn() -> String) {
        let bad = gap.is_nan() || gap > self.tol;
        if bad {
            self.failed = true;
        }
        let gap = if gap.is_nan() { f64::INFINITY } else { gap };
        if gap > self.worst || (bad && self.witness.is_none()) {
            self.worst = self.worst.max(gap);
            if bad {
                self.witness = Some(Witness {
                    detail: detail(),
                    leaf,
                    lhs,
                    rhs,
                    gap,
                });
            }
        }
    }

    /// `lhs = rhs` pointwise within the tolerance.
    pub fn eq(&mut self, lhs: &RandomVariable, rhs: &RandomVariable, detail: impl Fn() -> String) {
        self.eq_on(lhs, rhs, |_| true, detail)
    }

    /// `lhs = rhs` on the leaves selected by `on`.
    pub fn eq_on(
        &mut self,
        lhs: &RandomVariable,
        rhs: &RandomVariable,
        on: impl Fn(usize) -> bool,
        detail: impl Fn() -> String,
    ) {
        self.cases += 1;
        let (mut leaf_worst, mut gap_worst) = (0, -1.0);
        for leaf in (0..lhs.len()).filter(|&l| on(l)) {
            let gap = (lhs[leaf] - rhs[leaf]).abs();
            let gap = if gap.is_nan() { f64::INFINITY } else { gap };
            if gap > gap_worst {
                gap_worst = gap;
                leaf_worst = leaf;
            }
        }
        if gap_worst >= 0.0 {
            self.record(
                leaf_worst,
                lhs[leaf_worst],
                rhs[leaf_worst],
                gap_worst,
                &detail,
            );
        }
    }

    /// `lhs ≤ rhs` pointwise within the tolerance.
    pub fn le(&mut self, lhs: &RandomVariable, rhs: &RandomVariable, detail: impl Fn() -> String) {
        self.cases += 1;
        let (mut leaf_worst, mut gap_worst) = (0, f64::NEG_INFINITY);
        for leaf in 0..lhs.len() {
            let gap = lhs[leaf] - rhs[leaf];
            let gap = if gap.is_nan() { f64::INFINITY } else { gap };
            if gap > gap_worst {
                gap_worst = gap;
                leaf_worst = leaf;
            }
        }
        if !lhs.is_empty() {
            self.record(
                leaf_worst,
                lhs[leaf_worst],
                rhs[leaf_worst],
                gap_worst.max(0.0),
                &detail,
            );
        }
    }

    /// Scalar condition, e.g. a structural property.
    pub fn require(&mut self, ok: bool, detail: impl Fn() -> String) {
        self.cases += 1;
        if !ok {
            self.failed = true;
            self.worst = f64::INFINITY;
            if self.witness.is_none() {
                self.witness = Some(Witness {
                    detail: detail(),
                    leaf: 0,
                    lhs: f64::NAN,
                    rhs: f64::NAN,
                    gap: f64::INFINITY,
                });
            }
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.note = Some(note.into());
    }

    pub fn failed(&self) -> bool {
        self.failed
    }

    pub fn worst(&self) -> f64 {
        self.worst
    }

    pub fn finish(self) -> CheckReport {
        self.finish_with(Status::Pass)
    }

    /// Finishes with `ok_status` when nothing failed.
    pub fn finish_with(self, ok_status: Status) -> CheckReport {
        CheckReport {
            check: self.check,
            status: if self.failed { Status::Fail } else { ok_status },
            worst: self.worst,
            cases: self.cases,
            witness: self.witness,
            note: self.note,
        }
    }
}

/// Folds several reports into one under a new name.
pub fn combine(check: impl Into<String>, parts: Vec<CheckReport>) -> CheckReport {
    let check = check.into();
    if let Some(unmet) = parts.iter().find(|p| p.status == Status::HypothesisUnmet) {
        let mut out = unmet.clone();
        out.check = check;
        return out;
    }
    let failed = parts.iter().any(|p| p.status == Status::Fail);
    let worst = parts.iter().map(|p| p.worst).fold(0.0, f64::max);
    let cases = parts.iter().map(|p| p.cases).sum();
    let witness = parts
        .iter()
        .filter(|p| p.status == Status::Fail)
        .find_map(|p| {
            p.witness.clone().map(|mut w| {
                w.detail = format!("{}: {}", p.check, w.detail);
                w
            })
        });
    let notes: Vec<String> = parts.iter().filter_map(|p| p.note.clone()).collect();
    CheckReport {
        check,
        status: if failed { Status::Fail } else { Status::Pass },
        worst,
        cases,
        witness,
        note: (!notes.is_empty()).then(|| notes.join("; ")),
    }
}
