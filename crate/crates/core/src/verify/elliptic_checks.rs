//! Laurent expansions, parity, the level-2 relation and ellipticity of `Q1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CaseDetail, CaseResult, ReportParameters, VerificationReport};
use crate::arith::q;
use crate::elliptic::{
    lambert_eval, lambert_series, p1_product_eval, q1_product_eval, series, EllipticKind, ZLaurentSeries,
};
use crate::error::Result;

const Z_ORDER: i64 = 10;
const NUMERIC_Z_ORDER: i64 = 16;
const NUMERIC_Q_ORDER: usize = 30;
const NUMERIC_POINTS: usize = 10;
const MAX_M: u32 = 4;
const LAMBERT_N: usize = 200;

fn laurent_agreement(description: String, a: &ZLaurentSeries, b: &ZLaurentSeries) -> CaseResult {
    let mut support = a.support();
    support.extend(b.support());
    support.sort_unstable();
    support.dedup();
    for d in support {
        let case = CaseResult::agreement(
            format!("{description}, z^{d}"),
            &[("left", Ok(a.coeff(d))), ("right", Ok(b.coeff(d)))],
        );
        if !case.passed {
            return case;
        }
    }
    CaseResult { description, passed: true, detail: CaseDetail::Exact { up_to: None } }
}

fn kinds() -> [(EllipticKind, &'static str); 2] {
    [(EllipticKind::P1, "P1"), (EllipticKind::Q1, "Q1")]
}

fn exact_cases(q_order: usize) -> Vec<CaseResult> {
    let mut out = Vec::new();
    for m in 0..=MAX_M {
        for (kind, name) in kinds() {
            out.push(laurent_agreement(
                format!("{name}^({m}) Lambert expansion = Eisenstein form"),
                &lambert_series(kind, m, Z_ORDER, q_order),
                &series(kind, m, Z_ORDER, q_order),
            ));
            let bad: Vec<i64> =
                series(kind, m, Z_ORDER, q_order).support().into_iter().filter(|d| (d + m as i64) % 2 == 0).collect();
            out.push(CaseResult {
                description: format!("{name}^({m}) has only z^d with d + m odd"),
                passed: bad.is_empty(),
                detail: CaseDetail::Identity {
                    checks: format!("z-exponents up to {Z_ORDER}"),
                    failures: bad.len(),
                    first: bad.first().map(|d| format!("z^{d}")),
                },
            });
        }
        let p = series(EllipticKind::P1, m, Z_ORDER, q_order);
        out.push(laurent_agreement(
            format!("Q1^({m}) = 2 P1^({m})(2 tau) - P1^({m})(tau)"),
            &series(EllipticKind::Q1, m, Z_ORDER, q_order),
            &p.rescale_q(2, q_order).scale(&q(2)).sub(&p),
        ));
    }
    out
}

/// Relative deviations collected at one sample point.
struct PointCheck {
    worst: f64,
    failures: Vec<String>,
}

impl PointCheck {
    fn record(&mut self, what: &str, a: Complex64, b: Complex64, tol: f64) {
        let dev = (a - b).norm() / a.norm().max(b.norm()).max(1.0);
        self.worst = self.worst.max(dev);
        if dev > tol {
            self.failures.push(format!("{what}: {a} vs {b}"));
        }
    }
}

fn numeric_point(z: Complex64, tau: Complex64, tol: f64) -> Result<PointCheck> {
    let mut pc = PointCheck { worst: 0.0, failures: Vec::new() };
    for (kind, name) in kinds() {
        for m in 0..=2 {
            let (lam, _) = lambert_eval(kind, z, tau, m, LAMBERT_N)?;
            let (lau, _) = series(kind, m, NUMERIC_Z_ORDER, NUMERIC_Q_ORDER).eval(z, tau)?;
            pc.record(&format!("{name}^({m}) Laurent/Lambert"), lau, lam, tol);
            let (neg, _) = lambert_eval(kind, -z, tau, m, LAMBERT_N)?;
            let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
            pc.record(&format!("{name}^({m}) parity"), neg, lam * sign, tol);
        }
        let (lam, _) = lambert_eval(kind, z, tau, 0, LAMBERT_N)?;
        let (prod, _) = match kind {
            EllipticKind::P1 => p1_product_eval(z, tau, LAMBERT_N)?,
            EllipticKind::Q1 => q1_product_eval(z, tau, LAMBERT_N)?,
        };
        pc.record(&format!("{name} product/Lambert"), prod, lam, tol);
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let (base, _) = q1_product_eval(z, tau, LAMBERT_N)?;
    let (shifted, _) = q1_product_eval(z + two_pi_i * tau * 2.0, tau, LAMBERT_N)?;
    pc.record("Q1(z + 4 pi i tau) = Q1(z)", shifted, base, tol);
    let (shifted, _) = q1_product_eval(z + two_pi_i, tau, LAMBERT_N)?;
    pc.record("Q1(z + 2 pi i) = Q1(z)", shifted, base, tol);
    let (half, _) = q1_product_eval(z + two_pi_i * tau, tau, LAMBERT_N)?;
    pc.record("Q1(z + 2 pi i tau) = -Q1(z)", half, -base, tol);
    Ok(pc)
}

/// Exact series identities at z-order 10 and `q_order`, and numeric checks at ten seeded
/// points `(z, tau)` with `0.3 <= |z| <= 1` inside the Lambert strip.
pub fn elliptic_identities(q_order: usize, tol: f64, seed: u64) -> VerificationReport {
    let params = ReportParameters {
        q_order: Some(q_order),
        samples: Some(NUMERIC_POINTS),
        tolerance: Some(tol),
        seed: Some(seed),
        ..Default::default()
    };
    let mut report = VerificationReport::new("elliptic", params);
    report.cases.extend(exact_cases(q_order));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..NUMERIC_POINTS {
        let tau = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.6..1.5));
        let z = Complex64::from_polar(rng.gen_range(0.3..1.0), rng.gen_range(0.0..2.0 * PI));
        let description = format!("numeric identities at z = {z:.4}, tau = {tau:.4}");
        report.push(match numeric_point(z, tau, tol) {
            Ok(pc) => CaseResult {
                description: match pc.failures.first() {
                    Some(f) => format!("{description} ({f})"),
                    None => description,
                },
                passed: pc.failures.is_empty(),
                detail: CaseDetail::Numeric { max_deviation: pc.worst, tolerance: tol },
            },
            Err(e) => CaseResult::error(description, &e),
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elliptic_suite_passes() {
        let r = elliptic_identities(12, 1e-8, 3);
        assert!(r.passed(), "{r}");
    }
}
