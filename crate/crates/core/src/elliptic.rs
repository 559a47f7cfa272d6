//! The Lambert-type functions P1 and Q1 and their z-derivatives: as Laurent series in z
//! with q-series coefficients, and as numerically summed Lambert series.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde_json::json;

use crate::arith::{binom_i, factorial, frac, q, Q};
use crate::error::{Error, Result};
use crate::modforms::{eisenstein_e, eisenstein_f};
use crate::qseries::{FracQSeries, EVAL_MIN_IM};

/// Default number of Lambert terms summed numerically.
pub const LAMBERT_TERMS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EllipticKind {
    P1,
    Q1,
}

impl std::str::FromStr for EllipticKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "P1" => Ok(EllipticKind::P1),
            "Q1" => Ok(EllipticKind::Q1),
            _ => Err(Error::Invalid(format!("unknown elliptic function '{s}'"))),
        }
    }
}

/// `sum_d c_d(q) z^d` for `-max_pole <= d <= z_order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZLaurentSeries {
    terms: BTreeMap<i64, FracQSeries>,
    z_order: i64,
    max_pole: u32,
}

impl ZLaurentSeries {
    pub fn new(z_order: i64, max_pole: u32) -> Self {
        ZLaurentSeries { terms: BTreeMap::new(), z_order, max_pole }
    }

    pub fn z_order(&self) -> i64 {
        self.z_order
    }

    pub fn max_pole(&self) -> u32 {
        self.max_pole
    }

    /// Adds `s z^d`; terms outside the retained range are dropped.
    pub fn add_term(&mut self, d: i64, s: FracQSeries) {
        if d > self.z_order || s.is_exact_zero() {
            return;
        }
        assert!(d >= -(self.max_pole as i64), "z-exponent below declared pole order");
        let next = match self.terms.get(&d) {
            Some(old) => old.add(&s),
            None => s,
        };
        if next.is_zero() {
            self.terms.remove(&d);
        } else {
            self.terms.insert(d, next);
        }
    }

    /// Coefficient of `z^d`; the exact zero when absent.
    pub fn coeff(&self, d: i64) -> FracQSeries {
        self.terms.get(&d).cloned().unwrap_or_else(FracQSeries::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &FracQSeries)> {
        self.terms.iter().map(|(d, s)| (*d, s))
    }

    /// Exponents whose coefficient is not identically zero.
    pub fn support(&self) -> Vec<i64> {
        self.terms.iter().filter(|(_, s)| !s.is_zero()).map(|(d, _)| *d).collect()
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::new(self.z_order, self.max_pole);
        for (d, s) in &self.terms {
            out.add_term(*d, s.scale(c));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = Self::new(self.z_order.min(other.z_order), self.max_pole.max(other.max_pole));
        for (d, s) in &self.terms {
            out.add_term(*d, s.clone());
        }
        for (d, s) in &other.terms {
            out.add_term(*d, s.neg());
        }
        out
    }

    /// Coefficientwise `tau -> m tau`, each coefficient kept to `q_order` terms.
    pub fn rescale_q(&self, m: u32, q_order: usize) -> Self {
        let mut out = Self::new(self.z_order, self.max_pole);
        for (d, s) in &self.terms {
            out.add_term(*d, s.rescale(m).truncate(q_order));
        }
        out
    }

    /// Term-by-term z-derivative.
    pub fn derivative(&self) -> Self {
        let mut out = Self::new(self.z_order - 1, self.max_pole + 1);
        for (d, s) in &self.terms {
            if *d != 0 {
                out.add_term(d - 1, s.scale(&q(*d)));
            }
        }
        out
    }

    /// Numeric value at `(z, tau)` with the largest coefficient tail estimate.
    pub fn eval(&self, z: Complex64, tau: Complex64) -> Result<(Complex64, f64)> {
        let mut sum = Complex64::zero();
        let mut tail = 0f64;
        for (d, s) in &self.terms {
            let (v, t) = s.eval(tau)?;
            let zp = z.powi(*d as i32);
            sum += v * zp;
            tail = tail.max(t * zp.norm());
        }
        Ok((sum, tail))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> =
            self.terms.iter().map(|(d, s)| json!({"z_exp": d, "series": s.to_json()})).collect();
        json!({"z_order": self.z_order, "max_pole": self.max_pole, "terms": terms})
    }
}

impl fmt::Display for ZLaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (d, s) in &self.terms {
            writeln!(f, "z^{d}: {s}")?;
        }
        write!(f, "+ O(z^{})", self.z_order + 1)
    }
}

fn laurent_from_eisenstein(
    m: u32,
    z_order: i64,
    q_order: usize,
    series: impl Fn(u32, usize) -> FracQSeries,
) -> ZLaurentSeries {
    let mut out = ZLaurentSeries::new(z_order, m + 1);
    let mf = Q::from_integer(factorial(m as u64));
    let sign = if m % 2 == 0 { -&mf } else { mf.clone() };
    out.add_term(-(m as i64) - 1, FracQSeries::constant(sign, q_order));
    let mut k: u32 = 1;
    loop {
        let d = 2 * k as i64 - m as i64 - 1;
        if d > z_order {
            break;
        }
        if 2 * k > m {
            let c = &mf * Q::from_integer(binom_i(2 * k as i64 - 1, m as u64));
            out.add_term(d, series(2 * k, q_order).scale(&c));
        }
        k += 1;
    }
    out
}

/// `P1^{(m)} = (-1)^{m+1} m! z^{-m-1} + m! sum_k C(2k-1, m) E_{2k} z^{2k-m-1}`.
pub fn p1_series(m: u32, z_order: i64, q_order: usize) -> ZLaurentSeries {
    laurent_from_eisenstein(m, z_order, q_order, eisenstein_e)
}

/// As [`p1_series`] with the level-2 series `F_{2k}`.
pub fn q1_series(m: u32, z_order: i64, q_order: usize) -> ZLaurentSeries {
    laurent_from_eisenstein(m, z_order, q_order, eisenstein_f)
}

pub fn series(kind: EllipticKind, m: u32, z_order: i64, q_order: usize) -> ZLaurentSeries {
    match kind {
        EllipticKind::P1 => p1_series(m, z_order, q_order),
        EllipticKind::Q1 => q1_series(m, z_order, q_order),
    }
}

/// Laurent coefficients of `e^z / (1 - e^z)` from `z^{-1}` through `z^{top}`.
fn geometric_kernel(top: i64) -> Vec<Q> {
    // e^z/(1-e^z) = -(1/z) e^z / u(z) with u(z) = (e^z - 1)/z.
    let n = (top + 2).max(1) as usize;
    let u: Vec<Q> = (0..n).map(|j| Q::new(BigInt::one(), factorial(j as u64 + 1))).collect();
    let mut uinv = vec![Q::zero(); n];
    uinv[0] = Q::one();
    for k in 1..n {
        let mut s = Q::zero();
        for j in 1..=k {
            s += &u[j] * &uinv[k - j];
        }
        uinv[k] = -s;
    }
    let ez: Vec<Q> = (0..n).map(|j| Q::new(BigInt::one(), factorial(j as u64))).collect();
    (0..n).map(|k| -(0..=k).map(|j| &ez[j] * &uinv[k - j]).sum::<Q>()).collect()
}

/// Independent exact route: expand the Lambert series of `P1^{(m)}` or `Q1^{(m)}` in z,
/// using divisor sums directly rather than Eisenstein series.
pub fn lambert_series(kind: EllipticKind, m: u32, z_order: i64, q_order: usize) -> ZLaurentSeries {
    let mut out = ZLaurentSeries::new(z_order, m + 1);
    // m-th derivative of the kernel: z^e -> e(e-1)...(e-m+1) z^{e-m}.
    let kernel = geometric_kernel(z_order + m as i64);
    for (i, c) in kernel.iter().enumerate() {
        let e = i as i64 - 1;
        let mut ff = Q::one();
        for t in 0..m as i64 {
            ff *= q(e - t);
        }
        let d = e - m as i64;
        if !ff.is_zero() && !c.is_zero() {
            out.add_term(d, FracQSeries::constant(c * ff, q_order));
        }
    }
    if m == 0 {
        out.add_term(0, FracQSeries::constant(frac(1, 2), q_order));
    }
    for d in 0..=z_order.max(-1) {
        let s = m as i64 + d;
        if s % 2 == 0 {
            continue;
        }
        let pref = Q::new(BigInt::from(2), factorial(d as u64));
        let mut coeffs = vec![Q::zero(); q_order];
        for (big_n, slot) in coeffs.iter_mut().enumerate().skip(1) {
            let mut acc = BigInt::zero();
            for n in 1..=big_n {
                if big_n % n != 0 {
                    continue;
                }
                let t = BigInt::from(n).pow(s as u32);
                match kind {
                    EllipticKind::P1 => acc += t,
                    EllipticKind::Q1 => {
                        if (big_n / n) % 2 == 1 {
                            acc -= t;
                        } else {
                            acc += t;
                        }
                    }
                }
            }
            *slot = &pref * Q::from_integer(acc);
        }
        out.add_term(d, FracQSeries::new(Q::zero(), coeffs));
    }
    out
}

fn check_region(z: Complex64, tau: Complex64) -> Result<()> {
    if tau.im < EVAL_MIN_IM {
        return Err(Error::EvaluationRegion);
    }
    if z.re.abs() >= 2.0 * PI * tau.im {
        return Err(Error::OutsideStrip);
    }
    Ok(())
}

/// Stirling numbers of the second kind `S(n, k)` for `n <= top`.
fn stirling2(top: usize) -> Vec<Vec<f64>> {
    let mut s = vec![vec![0f64; top + 1]; top + 1];
    s[0][0] = 1.0;
    for n in 1..=top {
        for k in 1..=n {
            s[n][k] = k as f64 * s[n - 1][k] + s[n - 1][k - 1];
        }
    }
    s
}

/// `Li_{-m}(w) = sum_k k! S(m+1, k+1) (w/(1-w))^{k+1}`.
fn polylog_neg(m: u32, w: Complex64) -> Complex64 {
    let s = stirling2(m as usize + 1);
    let r = w / (Complex64::one() - w);
    let mut acc = Complex64::zero();
    let mut kf = 1f64;
    for k in 0..=m as usize {
        if k > 0 {
            kf *= k as f64;
        }
        acc += r.powi(k as i32 + 1) * (kf * s[m as usize + 1][k + 1]);
    }
    acc
}

/// Numeric Lambert sum for `P1^{(m)}` or `Q1^{(m)}` with `n <= n_max`, and the size of
/// the last summed term.
pub fn lambert_eval(
    kind: EllipticKind,
    z: Complex64,
    tau: Complex64,
    m: u32,
    n_max: usize,
) -> Result<(Complex64, f64)> {
    check_region(z, tau)?;
    let log_q = Complex64::new(0.0, 2.0 * PI) * tau;
    let qv = log_q.exp();
    let mut total = polylog_neg(m, z.exp());
    if m == 0 {
        total += 0.5;
    }
    let msign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let mut qn = Complex64::one();
    let mut last = 0f64;
    for n in 1..=n_max {
        qn *= qv;
        let nf = n as f64;
        // e^{+-nz} q^n combined in the exponent so neither factor overflows
        let up = ((z + log_q) * nf).exp();
        let down = ((log_q - z) * nf).exp();
        let num = (up - down * msign) * nf.powi(m as i32);
        let term = match kind {
            EllipticKind::P1 => num / (Complex64::one() - qn),
            EllipticKind::Q1 => -num / (Complex64::one() + qn),
        };
        total += term;
        last = term.norm();
    }
    Ok((total, last))
}

pub fn p1_lambert_eval(z: Complex64, tau: Complex64, m: u32, n_max: usize) -> Result<(Complex64, f64)> {
    lambert_eval(EllipticKind::P1, z, tau, m, n_max)
}

pub fn q1_lambert_eval(z: Complex64, tau: Complex64, m: u32, n_max: usize) -> Result<(Complex64, f64)> {
    lambert_eval(EllipticKind::Q1, z, tau, m, n_max)
}

/// `P1(z, tau) = -d/dz log theta(z)` with `theta(z) = (e^{z/2} - e^{-z/2}) prod (1 - q^k e^z)(1 - q^k e^{-z})`.
///
/// The product converges for every `z` off the poles, so this continues `P1` past the
/// Lambert strip. Returns the value and the size of the last summed term.
pub fn p1_product_eval(z: Complex64, tau: Complex64, n_max: usize) -> Result<(Complex64, f64)> {
    if tau.im < EVAL_MIN_IM {
        return Err(Error::EvaluationRegion);
    }
    let one = Complex64::one();
    let log_q = Complex64::new(0.0, 2.0 * PI) * tau;
    // -1/2 coth(z/2), written through e^{-|Re z|} to stay bounded
    let mut total = if z.re <= 0.0 {
        let w = z.exp();
        (one + w) / (one - w) * 0.5
    } else {
        let w = (-z).exp();
        -(one + w) / (one - w) * 0.5
    };
    let mut last = 0f64;
    for k in 1..=n_max {
        let kf = k as f64;
        let up = (log_q * kf + z).exp();
        let down = (log_q * kf - z).exp();
        let term = up / (one - up) - down / (one - down);
        total += term;
        last = term.norm();
    }
    Ok((total, last))
}

/// `Q1(z, tau) = 2 P1(z, 2 tau) - P1(z, tau)` through [`p1_product_eval`], valid off the strip.
pub fn q1_product_eval(z: Complex64, tau: Complex64, n_max: usize) -> Result<(Complex64, f64)> {
    let (a, ea) = p1_product_eval(z, tau * 2.0, n_max)?;
    let (b, eb) = p1_product_eval(z, tau, n_max)?;
    Ok((a * 2.0 - b, 2.0 * ea + eb))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_leading_terms() {
        let p = p1_series(0, 5, 6);
        assert_eq!(p.coeff(-1), FracQSeries::constant(q(-1), 6));
        assert!(p.coeff(0).is_zero());
        assert_eq!(p.coeff(1), eisenstein_e(2, 6));
        assert_eq!(p.coeff(3), eisenstein_e(4, 6));
        let dp = p1_series(1, 4, 6);
        assert_eq!(dp.coeff(-2), FracQSeries::constant(q(1), 6));
        assert_eq!(dp.coeff(0), eisenstein_e(2, 6));
        assert_eq!(dp.coeff(2), eisenstein_e(4, 6).scale(&q(3)));
    }

    #[test]
    fn derivatives_chain() {
        for m in 0..4 {
            let a = p1_series(m, 8, 8).derivative();
            let b = p1_series(m + 1, 7, 8);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn parity_of_supports() {
        for m in 0..5u32 {
            for s in [p1_series(m, 10, 6), q1_series(m, 10, 6)] {
                for d in s.support() {
                    assert_eq!((d + m as i64) % 2 != 0, true, "m={m} d={d}");
                }
            }
        }
    }

    #[test]
    fn level_two_relation() {
        for m in 0..=4 {
            let p = p1_series(m, 10, 20);
            let lhs = q1_series(m, 10, 20);
            let rhs = p.rescale_q(2, 20).scale(&q(2)).sub(&p);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn lambert_expansion_matches_eisenstein_form() {
        for m in 0..=3 {
            assert_eq!(lambert_series(EllipticKind::P1, m, 10, 15), p1_series(m, 10, 15), "P1 m={m}");
            assert_eq!(lambert_series(EllipticKind::Q1, m, 10, 15), q1_series(m, 10, 15), "Q1 m={m}");
        }
    }

    #[test]
    fn numeric_agreement_and_symmetry() {
        let z = Complex64::new(0.0, 0.3);
        let tau = Complex64::new(0.0, 1.1);
        for kind in [EllipticKind::P1, EllipticKind::Q1] {
            let (lam, _) = lambert_eval(kind, z, tau, 0, LAMBERT_TERMS).unwrap();
            let (lau, _) = series(kind, 0, 12, 30).eval(z, tau).unwrap();
            assert!((lam - lau).norm() < 1e-10);
        }
        let z = Complex64::new(0.4, -0.2);
        let (a, _) = p1_lambert_eval(z, tau, 0, 60).unwrap();
        let (b, _) = p1_lambert_eval(-z, tau, 0, 60).unwrap();
        assert!((a + b).norm() < 1e-12);
    }

    #[test]
    fn region_errors() {
        let tau = Complex64::new(0.0, 0.6);
        let far = Complex64::new(4.0, 0.0);
        assert_eq!(q1_lambert_eval(far, tau, 0, 10).unwrap_err(), Error::OutsideStrip);
        let low = Complex64::new(0.0, 0.3);
        assert_eq!(p1_lambert_eval(Complex64::zero(), low, 0, 10).unwrap_err(), Error::EvaluationRegion);
    }

    #[test]
    fn product_matches_lambert_and_q1_is_elliptic() {
        let tau = Complex64::new(0.1, 0.9);
        let z = Complex64::new(-1.2, 0.4);
        for kind in [EllipticKind::P1, EllipticKind::Q1] {
            let (a, _) = lambert_eval(kind, z, tau, 0, 200).unwrap();
            let (b, _) = match kind {
                EllipticKind::P1 => p1_product_eval(z, tau, 200).unwrap(),
                EllipticKind::Q1 => q1_product_eval(z, tau, 200).unwrap(),
            };
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
        let period = Complex64::new(0.0, 4.0 * PI) * tau;
        let (a, _) = q1_product_eval(z, tau, 200).unwrap();
        let (b, _) = q1_product_eval(z + period, tau, 200).unwrap();
        assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        let (c, _) = p1_product_eval(z + period / 2.0, tau, 200).unwrap();
        let (d, _) = p1_product_eval(z, tau, 200).unwrap();
        assert!((c - d - 1.0).norm() < 1e-9, "P1 shifts by 1: {c} vs {d}");
    }

    #[test]
    fn antiperiodicity_of_q1() {
        let tau = Complex64::new(0.2, 0.8);
        let shift = Complex64::new(0.0, 2.0 * PI) * tau;
        let z = Complex64::new(1.3, 0.7);
        let (a, _) = q1_lambert_eval(z, tau, 0, 200).unwrap();
        let (b, _) = q1_lambert_eval(z + shift, tau, 0, 200).unwrap();
        assert!((a + b).norm() < 1e-9, "{a} vs {b}");
    }
}
