//! Inequality reports shared by every verification harness.

use serde::{Deserialize, Serialize};

use crate::geometry::{Dissection, Rect, RectPartition};

/// Comparison slack: `lhs <= rhs` passes when
/// `lhs <= rhs + abs + rel * max(|lhs|, |rhs|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    pub fn allowance(&self, lhs: f64, rhs: f64) -> f64 {
        self.abs + self.rel * lhs.abs().max(rhs.abs())
    }

    pub fn le(&self, lhs: f64, rhs: f64) -> bool {
        lhs <= rhs + self.allowance(lhs, rhs)
    }

    pub fn eq(&self, lhs: f64, rhs: f64) -> bool {
        (lhs - rhs).abs() <= self.allowance(lhs, rhs)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-12, 1e-10)
    }
}

/// Object that achieves or violates a bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Indices into a sampled path.
    Path { indices: Vec<usize> },
    /// A pair of dissections (grid-like partition).
    Grid { dx: Dissection, dy: Dissection },
    /// A general rectangulation.
    Partition { partition: RectPartition },
    /// A single rectangle.
    Rect { rect: Rect },
    /// Removal cascade state: dissections before the step and the point
    /// removed.
    Removal {
        dx: Vec<usize>,
        dy: Vec<usize>,
        removed: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: Option<f64>,
    /// `rhs - lhs`; negative on violation.
    pub slack: f64,
    pub pass: bool,
    pub witness: Option<Witness>,
    /// Number of instances folded into this record (see [`WorstCase`]).
    #[serde(default = "one")]
    pub cases: usize,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub title: String,
    pub tolerance: Tolerance,
    pub records: Vec<CheckRecord>,
}

impl InequalityReport {
    pub fn new(title: impl Into<String>, tolerance: Tolerance) -> Self {
        InequalityReport {
            title: title.into(),
            tolerance,
            records: Vec::new(),
        }
    }

    /// Record `lhs <= rhs`.
    pub fn check_le(
        &mut self,
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        constant: Option<f64>,
        witness: Option<Witness>,
    ) -> bool {
        let pass = self.tolerance.le(lhs, rhs);
        self.records.push(CheckRecord {
            name: name.into(),
            lhs,
            rhs,
            constant,
            slack: rhs - lhs,
            pass,
            witness,
            cases: 1,
        });
        pass
    }

    /// Like [`check_le`](Self::check_le) but builds the witness only when
    /// the check fails.
    pub fn check_le_with(
        &mut self,
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        constant: Option<f64>,
        witness: impl FnOnce() -> Witness,
    ) -> bool {
        let pass = self.tolerance.le(lhs, rhs);
        self.records.push(CheckRecord {
            name: name.into(),
            lhs,
            rhs,
            constant,
            slack: rhs - lhs,
            pass,
            witness: (!pass).then(witness),
            cases: 1,
        });
        pass
    }

    /// Record `lhs == rhs`; slack is `-|lhs - rhs|`.
    pub fn check_eq(
        &mut self,
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        witness: Option<Witness>,
    ) -> bool {
        let pass = self.tolerance.eq(lhs, rhs);
        self.records.push(CheckRecord {
            name: name.into(),
            lhs,
            rhs,
            constant: None,
            slack: -(lhs - rhs).abs(),
            pass,
            witness,
            cases: 1,
        });
        pass
    }

    /// Record an outcome decided by the caller.
    pub fn record(&mut self, rec: CheckRecord) {
        self.records.push(rec);
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Record with the smallest slack.
    pub fn worst(&self) -> Option<&CheckRecord> {
        self.records
            .iter()
            .min_by(|a, b| a.slack.total_cmp(&b.slack))
    }

    pub fn worst_slack(&self) -> Option<f64> {
        self.worst().map(|r| r.slack)
    }

    pub fn extend(&mut self, other: InequalityReport) {
        self.records.extend(other.records);
    }
}

/// Folds many instances of one inequality into a single record: the
/// instance with the least margin `rhs + allowance - lhs` is kept, so the
/// folded record passes iff every instance does.
#[derive(Clone, Debug)]
pub struct WorstCase {
    name: String,
    constant: Option<f64>,
    tolerance: Tolerance,
    cases: usize,
    worst: Option<(f64, f64, f64, Option<Witness>)>,
}

impl WorstCase {
    pub fn new(name: impl Into<String>, constant: Option<f64>, tolerance: Tolerance) -> Self {
        WorstCase {
            name: name.into(),
            constant,
            tolerance,
            cases: 0,
            worst: None,
        }
    }

    /// Add one instance of `lhs <= rhs`; `witness` is only built when the
    /// instance becomes the new worst.
    pub fn push(&mut self, lhs: f64, rhs: f64, witness: impl FnOnce() -> Witness) {
        self.cases += 1;
        let margin = rhs + self.tolerance.allowance(lhs, rhs) - lhs;
        let worse = match &self.worst {
            None => true,
            Some((m, ..)) => margin < *m || margin.is_nan(),
        };
        if worse {
            self.worst = Some((margin, lhs, rhs, Some(witness())));
        }
    }

    pub fn cases(&self) -> usize {
        self.cases
    }

    pub fn passed(&self) -> bool {
        match &self.worst {
            None => true,
            Some((m, ..)) => *m >= 0.0,
        }
    }

    /// `None` when nothing was pushed.
    pub fn finish(self) -> Option<CheckRecord> {
        let (margin, lhs, rhs, witness) = self.worst?;
        Some(CheckRecord {
            name: self.name,
            lhs,
            rhs,
            constant: self.constant,
            slack: rhs - lhs,
            pass: margin >= 0.0,
            witness,
            cases: self.cases,
        })
    }

    pub fn finish_into(self, report: &mut InequalityReport) {
        if let Some(rec) = self.finish() {
            report.record(rec);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_is_relative_and_absolute() {
        let t = Tolerance::default();
        assert!(t.le(1.0 + 5e-11, 1.0));
        assert!(!t.le(1.0 + 1e-9, 1.0));
        assert!(t.le(5e-13, 0.0));
        assert!(t.eq(1e6, 1e6 * (1.0 + 1e-11)));
    }

    #[test]
    fn worst_slack_and_failures() {
        let mut r = InequalityReport::new("demo", Tolerance::default());
        r.check_le("a", 1.0, 2.0, None, None);
        r.check_le(
            "b",
            3.0,
            2.0,
            Some(1.0),
            Some(Witness::Path { indices: vec![0, 2] }),
        );
        assert!(!r.passed());
        assert_eq!(r.worst_slack(), Some(-1.0));
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn worst_case_keeps_least_margin() {
        let mut w = WorstCase::new("fold", None, Tolerance::default());
        w.push(1.0, 3.0, || Witness::Path { indices: vec![0] });
        w.push(2.0, 2.5, || Witness::Path { indices: vec![1] });
        w.push(0.0, 4.0, || Witness::Path { indices: vec![2] });
        assert!(w.passed());
        let rec = w.finish().unwrap();
        assert_eq!(rec.cases, 3);
        assert_eq!(rec.lhs, 2.0);
        assert_eq!(rec.witness, Some(Witness::Path { indices: vec![1] }));
    }
}
