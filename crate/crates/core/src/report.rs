//! Verification outcomes.

use std::fmt;

use crate::algebra::GradedSeries;

/// Outcome of one verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub name: String,
    /// Weight through which the check is exact.
    pub weight_bound: i64,
    pub pass: bool,
    /// First offending monomial and coefficient.
    pub counterexample: Option<String>,
}

impl Report {
    /// Passes exactly when there is no counterexample.
    pub fn from_outcome(name: impl Into<String>, weight_bound: i64, counterexample: Option<String>) -> Self {
        Report {
            name: name.into(),
            weight_bound,
            pass: counterexample.is_none(),
            counterexample,
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{status} {} (through weight {})", self.name, self.weight_bound)?;
        if let Some(c) = &self.counterexample {
            write!(f, ": {c}")?;
        }
        Ok(())
    }
}

/// Checks that `residual` vanishes through its cutoff.
pub fn zero_report(name: impl Into<String>, residual: &GradedSeries) -> Report {
    let mut terms: Vec<_> = residual.terms().collect();
    terms.sort_by_key(|(m, _)| (m.weight(), (*m).clone()));
    let sym = residual.family().symbol().to_string();
    Report {
        name: name.into(),
        weight_bound: residual.cutoff(),
        pass: terms.is_empty(),
        counterexample: terms
            .first()
            .map(|(m, c)| format!("coefficient of {} is {c}", m.to_string().replace('x', &sym))),
    }
}
