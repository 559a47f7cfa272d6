//! Verification harness: exact three-path equivalence suites, the Jacobi-like coefficient
//! identity, elliptic identities and numeric modular-transformation checks.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::arith::{format_rational, Q};
use crate::error::{Error, Result};
use crate::qseries::FracQSeries;

mod elliptic_checks;
mod jacobi;
mod modularity;
mod suites;

pub use elliptic_checks::elliptic_identities;
pub use jacobi::{g_reorganization, inner_sum_inputs, jacobi_like_coefficient_identity, random_eisenstein_inputs};
pub use modularity::{
    e2_corrected_evaluator, numeric_modularity_check, numeric_modularity_check_with, test_matrices, ModularityParams,
    SL2Matrix,
};
pub use suites::{run_equivalence_suite, run_suite, square_words, SuiteName, SuiteParams};

/// Outcome of comparing two truncated series on their shared range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesVerdict {
    /// Equal below `up_to` (`None`: both are the exact zero).
    Equal {
        up_to: Option<Q>,
    },
    Mismatch {
        exponent: Q,
        left: Q,
        right: Q,
    },
}

impl SeriesVerdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, SeriesVerdict::Equal { .. })
    }
}

/// Exact comparison on the overlap of known coefficients, reporting the first discrepancy.
pub fn compare_series(a: &FracQSeries, b: &FracQSeries) -> Result<SeriesVerdict> {
    let prec = match (a.precision(), b.precision()) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    };
    let lowest = [a, b].iter().filter(|s| !s.is_zero()).map(|s| s.lead_exp().clone()).min();
    match (&prec, &lowest) {
        (_, None) => return Ok(SeriesVerdict::Equal { up_to: prec }),
        (Some(p), Some(l)) if p <= l => return Err(Error::NoComparableRange),
        _ => {}
    }
    let mut exps = BTreeSet::new();
    for s in [a, b] {
        for (i, c) in s.coeffs().iter().enumerate() {
            if !c.is_zero() {
                exps.insert(s.lead_exp() + Q::from_integer(i.into()));
            }
        }
    }
    for e in exps {
        if prec.as_ref().is_some_and(|p| &e >= p) {
            break;
        }
        let (x, y) = (a.coeff_at(&e).unwrap_or_default(), b.coeff_at(&e).unwrap_or_default());
        if x != y {
            return Ok(SeriesVerdict::Mismatch { exponent: e, left: x, right: y });
        }
    }
    Ok(SeriesVerdict::Equal { up_to: prec })
}

/// What a single case found.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CaseDetail {
    /// Exact agreement below the given exponent.
    Exact {
        up_to: Option<String>,
    },
    /// First differing coefficient between two named routes.
    Mismatch {
        between: String,
        exponent: String,
        left: String,
        right: String,
    },
    Numeric {
        max_deviation: f64,
        tolerance: f64,
    },
    /// A case whose expected outcome is a failure of the underlying check.
    ExpectedFailure {
        max_deviation: f64,
        tolerance: f64,
    },
    /// An operator identity checked on every basis state in range.
    Identity {
        checks: String,
        failures: usize,
        first: Option<String>,
    },
    Error {
        message: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseResult {
    pub description: String,
    pub passed: bool,
    pub detail: CaseDetail,
}

impl CaseResult {
    pub fn error(description: impl Into<String>, e: &Error) -> Self {
        CaseResult {
            description: description.into(),
            passed: false,
            detail: CaseDetail::Error { message: e.to_string() },
        }
    }

    /// Compares named series pairwise against the first; fails on the first mismatch.
    pub fn agreement(description: impl Into<String>, routes: &[(&str, Result<FracQSeries>)]) -> Self {
        let description = description.into();
        let mut values = Vec::with_capacity(routes.len());
        for (name, r) in routes {
            match r {
                Ok(s) => values.push((*name, s)),
                Err(e) => {
                    return CaseResult {
                        description,
                        passed: false,
                        detail: CaseDetail::Error { message: format!("{name}: {e}") },
                    }
                }
            }
        }
        let Some(((base_name, base), rest)) = values.split_first() else {
            return CaseResult { description, passed: true, detail: CaseDetail::Exact { up_to: None } };
        };
        let mut up_to: Option<Q> = None;
        for (name, s) in rest {
            match compare_series(base, s) {
                Ok(SeriesVerdict::Equal { up_to: p }) => {
                    up_to = match (up_to, p) {
                        (Some(a), Some(b)) => Some(a.min(b)),
                        (a, b) => a.or(b),
                    }
                }
                Ok(SeriesVerdict::Mismatch { exponent, left, right }) => {
                    return CaseResult {
                        description,
                        passed: false,
                        detail: CaseDetail::Mismatch {
                            between: format!("{base_name}/{name}"),
                            exponent: format_rational(&exponent),
                            left: format_rational(&left),
                            right: format_rational(&right),
                        },
                    }
                }
                Err(e) => return CaseResult::error(description, &e),
            }
        }
        CaseResult {
            description,
            passed: true,
            detail: CaseDetail::Exact { up_to: up_to.as_ref().map(format_rational) },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ReportParameters {
    pub context: Option<String>,
    pub max_weight: Option<u32>,
    pub q_order: Option<usize>,
    pub samples: Option<usize>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub parameters: ReportParameters,
    pub cases: Vec<CaseResult>,
    /// False when a resource bound cut the enumeration short.
    pub complete: bool,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, parameters: ReportParameters) -> Self {
        VerificationReport { suite: suite.into(), parameters, cases: Vec::new(), complete: true }
    }

    pub fn push(&mut self, case: CaseResult) {
        self.cases.push(case);
    }

    /// Appends the cases of `other`, keeping this report's name and parameters.
    pub fn absorb(&mut self, other: VerificationReport) {
        self.complete &= other.complete;
        self.cases.extend(other.cases);
    }

    pub fn passed(&self) -> bool {
        self.complete && self.cases.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serialization is infallible");
        v["passed"] = self.passed().into();
        v
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let failed = self.failures().count();
        writeln!(
            f,
            "suite {}: {} ({} cases, {} failed{})",
            self.suite,
            if self.passed() { "PASS" } else { "FAIL" },
            self.cases.len(),
            failed,
            if self.complete { "" } else { ", incomplete" }
        )?;
        for c in self.failures() {
            writeln!(f, "  FAIL {}: {:?}", c.description, c.detail)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use crate::context::{Algebra, Context};
    use crate::modforms::{character, eisenstein_e, eisenstein_f, eta_quotient};

    #[test]
    fn identical_series_are_equal() {
        let a = eisenstein_e(4, 10);
        assert!(compare_series(&a, &a).unwrap().is_equal());
    }

    #[test]
    fn e2_and_f2_differ_at_q1() {
        let v = compare_series(&eisenstein_e(2, 10), &eisenstein_f(2, 10)).unwrap();
        assert_eq!(v, SeriesVerdict::Mismatch { exponent: q(1), left: q(2), right: q(-2) });
    }

    #[test]
    fn eta_inverse_is_rank_one_character() {
        let a = eta_quotient(&[(1, -1)], 12).unwrap();
        let b = character(Algebra::M, &Context::Heisenberg { rank: 1 }, 20).unwrap();
        assert_eq!(compare_series(&a, &b).unwrap(), SeriesVerdict::Equal { up_to: Some(q(12) - q(1) / q(24)) });
    }

    #[test]
    fn zero_overlap_is_an_error() {
        let a = FracQSeries::zero_to(q(0));
        let b = FracQSeries::monomial(q(3), 4);
        assert_eq!(compare_series(&a, &b), Err(Error::NoComparableRange));
        assert!(compare_series(&FracQSeries::zero(), &FracQSeries::zero()).unwrap().is_equal());
    }
}
