//! Truncated q-series with a rational leading exponent and exact rational coefficients.
//!
//! A nonzero series stores `q^e (a_0 + a_1 q + ... + a_{O-1} q^{O-1})` with `a_0 != 0`.
//! Its absolute precision is `e + O`: every coefficient below that exponent is known.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, parse_rational, q, to_f64, Q};
use crate::error::{Error, Result};

/// Below this imaginary part `eval` refuses to sum a truncated series.
pub const EVAL_MIN_IM: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracQSeries {
    lead_exp: Q,
    coeffs: Vec<Q>,
    /// Only meaningful for the zero series: `None` is the exact zero, `Some(p)` a zero
    /// known to vanish below `q^p`.
    zero_prec: Option<Q>,
}

impl FracQSeries {
    /// The exact zero series.
    pub fn zero() -> Self {
        FracQSeries { lead_exp: Q::zero(), coeffs: Vec::new(), zero_prec: None }
    }

    /// A zero series whose coefficients are known below `q^prec` only.
    pub fn zero_to(prec: Q) -> Self {
        FracQSeries { lead_exp: Q::zero(), coeffs: Vec::new(), zero_prec: Some(prec) }
    }

    /// `c` known through `order` coefficients.
    pub fn constant(c: Q, order: usize) -> Self {
        Self::new(Q::zero(), {
            let mut v = vec![Q::zero(); order];
            if order > 0 {
                v[0] = c;
            }
            v
        })
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Q::one(), order)
    }

    /// `q^exp` known through `order` coefficients.
    pub fn monomial(exp: Q, order: usize) -> Self {
        let mut s = Self::one(order);
        s.lead_exp = exp.clone();
        if s.coeffs.is_empty() {
            s.zero_prec = Some(exp);
        }
        s
    }

    /// Builds and normalizes `q^lead * sum coeffs[n] q^n`.
    pub fn new(lead_exp: Q, coeffs: Vec<Q>) -> Self {
        let prec = &lead_exp + q(coeffs.len() as i64);
        match coeffs.iter().position(|c| !c.is_zero()) {
            None => Self::zero_to(prec),
            Some(first) => {
                FracQSeries { lead_exp: lead_exp + q(first as i64), coeffs: coeffs[first..].to_vec(), zero_prec: None }
            }
        }
    }

    /// Coefficients given as integers.
    pub fn from_ints(lead_exp: Q, coeffs: &[i64]) -> Self {
        Self::new(lead_exp, coeffs.iter().map(|&c| q(c)).collect())
    }

    pub fn lead_exp(&self) -> &Q {
        &self.lead_exp
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.zero_prec.is_none()
    }

    /// First exponent whose coefficient is unknown; `None` for the exact zero.
    pub fn precision(&self) -> Option<Q> {
        if self.coeffs.is_empty() {
            self.zero_prec.clone()
        } else {
            Some(&self.lead_exp + q(self.coeffs.len() as i64))
        }
    }

    /// Coefficient of `q^exp`, or `None` if that exponent is beyond the known range.
    pub fn coeff_at(&self, exp: &Q) -> Option<Q> {
        if let Some(p) = self.precision() {
            if exp >= &p {
                return None;
            }
        }
        if self.coeffs.is_empty() || exp < &self.lead_exp {
            return Some(Q::zero());
        }
        let d = exp - &self.lead_exp;
        if !d.is_integer() {
            return Some(Q::zero());
        }
        let idx: usize = d.to_integer().try_into().ok()?;
        Some(self.coeffs[idx].clone())
    }

    fn same_class(a: &Q, b: &Q) -> bool {
        (a - b).is_integer()
    }

    /// Sum aligned by absolute exponent.
    ///
    /// # Panics
    /// If both operands are nonzero and their exponents differ by a non-integer.
    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("incompatible exponent classes")
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.is_exact_zero() {
            return Ok(other.clone());
        }
        if other.is_exact_zero() {
            return Ok(self.clone());
        }
        let prec = match (self.precision(), other.precision()) {
            (Some(a), Some(b)) => a.min(b),
            _ => unreachable!("both operands carry a precision here"),
        };
        let lead = match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ok(Self::zero_to(prec)),
            (true, false) => other.lead_exp.clone(),
            (false, true) => self.lead_exp.clone(),
            (false, false) => {
                if !Self::same_class(&self.lead_exp, &other.lead_exp) {
                    return Err(Error::Invalid("incompatible exponent classes".into()));
                }
                self.lead_exp.clone().min(other.lead_exp.clone())
            }
        };
        if prec <= lead {
            return Ok(Self::zero_to(prec));
        }
        let span = &prec - &lead;
        let len: usize = span.ceil().to_integer().try_into().unwrap_or(0);
        let mut out = vec![Q::zero(); len];
        for s in [self, other] {
            if s.is_zero() {
                continue;
            }
            let off: usize = (&s.lead_exp - &lead).to_integer().try_into().unwrap_or(0);
            for (i, c) in s.coeffs.iter().enumerate() {
                if off + i < len {
                    out[off + i] += c;
                }
            }
        }
        Ok(Self::new(lead, out))
    }

    pub fn neg(&self) -> Self {
        FracQSeries {
            lead_exp: self.lead_exp.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            zero_prec: self.zero_prec.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return match self.precision() {
                None => Self::zero(),
                Some(p) => Self::zero_to(p),
            };
        }
        FracQSeries {
            lead_exp: self.lead_exp.clone(),
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            zero_prec: self.zero_prec.clone(),
        }
    }

    /// Multiplies by `q^s`.
    pub fn shift(&self, s: &Q) -> Self {
        if self.is_zero() {
            return FracQSeries { zero_prec: self.zero_prec.as_ref().map(|p| p + s), ..self.clone() };
        }
        FracQSeries { lead_exp: &self.lead_exp + s, ..self.clone() }
    }

    /// Cauchy product; the order is the smaller input order.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero();
        }
        if self.is_zero() || other.is_zero() {
            // A zero known below q^p times a series led by q^l is known below q^(p+l).
            let (z, s) = if self.is_zero() { (self, other) } else { (other, self) };
            let p = z.zero_prec.clone().unwrap();
            let l = if s.is_zero() { s.zero_prec.clone().unwrap() } else { s.lead_exp.clone() };
            return Self::zero_to(p + l);
        }
        let n = self.order().min(other.order());
        let mut out = vec![Q::zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self::new(&self.lead_exp + &other.lead_exp, out)
    }

    /// Multiplicative inverse to the same order.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZeroSeries);
        }
        let n = self.order();
        let a0_inv = self.coeffs[0].recip();
        let mut out: Vec<Q> = Vec::with_capacity(n);
        out.push(a0_inv.clone());
        for k in 1..n {
            let mut s = Q::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    s += &self.coeffs[j] * &out[k - j];
                }
            }
            out.push(-s * &a0_inv);
        }
        Ok(Self::new(-&self.lead_exp, out))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// Integer power by repeated squaring; negative powers go through `inv`.
    pub fn pow(&self, r: i64) -> Result<Self> {
        if r < 0 {
            return self.inv()?.pow(-r);
        }
        if r == 0 {
            return Ok(Self::one(self.order().max(1)));
        }
        let mut base = self.clone();
        let mut acc: Option<Self> = None;
        let mut e = r as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc.unwrap())
    }

    /// The substitution `q -> q^m`, i.e. `tau -> m tau`.
    pub fn rescale(&self, m: u32) -> Self {
        assert!(m >= 1, "rescale factor must be positive");
        let mq = q(m as i64);
        if self.is_zero() {
            return FracQSeries { zero_prec: self.zero_prec.as_ref().map(|p| p * &mq), ..Self::zero() };
        }
        let m = m as usize;
        let mut out = vec![Q::zero(); self.order() * m];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * m] = c.clone();
        }
        Self::new(&self.lead_exp * mq, out)
    }

    /// Keeps at most `order` coefficients past the lead.
    pub fn truncate(&self, order: usize) -> Self {
        if self.is_zero() || order >= self.order() {
            return self.clone();
        }
        Self::new(self.lead_exp.clone(), self.coeffs[..order].to_vec())
    }

    /// Truncates so the absolute precision is at most `prec`.
    pub fn truncate_abs(&self, prec: &Q) -> Self {
        match self.precision() {
            Some(p) if &p <= prec => self.clone(),
            _ if self.is_zero() => Self::zero_to(prec.clone()),
            _ => {
                let span = prec - &self.lead_exp;
                if span <= Q::zero() {
                    return Self::zero_to(prec.clone());
                }
                let n: usize = span.ceil().to_integer().try_into().unwrap_or(0);
                self.truncate(n)
            }
        }
    }

    /// Numeric value at `tau` with the size of the last included term as a tail estimate.
    pub fn eval(&self, tau: Complex64) -> Result<(Complex64, f64)> {
        self.eval_with_floor(tau, EVAL_MIN_IM)
    }

    /// As `eval`, with a caller-chosen lower bound on `Im tau`.
    pub fn eval_with_floor(&self, tau: Complex64, floor: f64) -> Result<(Complex64, f64)> {
        if tau.im < floor {
            return Err(Error::EvaluationRegion);
        }
        if self.is_zero() {
            return Ok((Complex64::new(0.0, 0.0), 0.0));
        }
        let two_pi_i_tau = Complex64::new(0.0, 2.0 * std::f64::consts::PI) * tau;
        let qv = two_pi_i_tau.exp();
        let lead = (two_pi_i_tau * to_f64(&self.lead_exp)).exp();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut pw = lead;
        let mut last = 0.0;
        for c in &self.coeffs {
            let term = pw * to_f64(c);
            sum += term;
            last = term.norm();
            pw *= qv;
        }
        Ok((sum, last))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("series serialization is infallible")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesWire {
    lead_exp: String,
    coeffs: Vec<String>,
    order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    known_below: Option<String>,
}

impl Serialize for FracQSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesWire {
            lead_exp: format_rational(&self.lead_exp),
            coeffs: self.coeffs.iter().map(format_rational).collect(),
            order: self.order(),
            known_below: self.zero_prec.as_ref().map(format_rational),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FracQSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = SeriesWire::deserialize(d)?;
        if w.order != w.coeffs.len() {
            return Err(D::Error::custom("order does not match coefficient count"));
        }
        let lead = parse_rational(&w.lead_exp).map_err(D::Error::custom)?;
        let coeffs =
            w.coeffs.iter().map(|c| parse_rational(c)).collect::<Result<Vec<_>>>().map_err(D::Error::custom)?;
        if coeffs.is_empty() {
            return Ok(match w.known_below {
                None => FracQSeries::zero(),
                Some(p) => FracQSeries::zero_to(parse_rational(&p).map_err(D::Error::custom)?),
            });
        }
        Ok(FracQSeries::new(lead, coeffs))
    }
}

impl fmt::Display for FracQSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return match &self.zero_prec {
                None => write!(f, "0"),
                Some(p) => write!(f, "O(q^({}))", format_rational(p)),
            };
        }
        write!(f, "q^({}) * (", format_rational(&self.lead_exp))?;
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = format_rational(&c.abs_val());
            let neg = c < &Q::zero();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_mag = n == 0 || mag != "1";
            match (n, show_mag) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "{mag} q")?,
                (1, false) => write!(f, "q")?,
                (_, true) => write!(f, "{mag} q^{n}")?,
                (_, false) => write!(f, "q^{n}")?,
            }
        }
        write!(f, " + O(q^{}))", self.order())
    }
}

trait AbsVal {
    fn abs_val(&self) -> Self;
}

impl AbsVal for Q {
    fn abs_val(&self) -> Q {
        if self < &Q::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Add for &FracQSeries {
    type Output = FracQSeries;
    fn add(self, rhs: Self) -> FracQSeries {
        FracQSeries::add(self, rhs)
    }
}

impl Sub for &FracQSeries {
    type Output = FracQSeries;
    fn sub(self, rhs: Self) -> FracQSeries {
        FracQSeries::sub(self, rhs)
    }
}

impl Mul for &FracQSeries {
    type Output = FracQSeries;
    fn mul(self, rhs: Self) -> FracQSeries {
        FracQSeries::mul(self, rhs)
    }
}

impl Neg for &FracQSeries {
    type Output = FracQSeries;
    fn neg(self) -> FracQSeries {
        FracQSeries::neg(self)
    }
}

/// Sums a list of series; the empty sum is the exact zero.
pub fn sum_series<'a, I: IntoIterator<Item = &'a FracQSeries>>(items: I) -> FracQSeries {
    items.into_iter().fold(FracQSeries::zero(), |acc, s| acc.add(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::frac;

    fn eta_direct(order: usize) -> FracQSeries {
        // prod (1 - q^n) expanded factor by factor
        let mut c = vec![Q::zero(); order];
        c[0] = Q::one();
        for n in 1..order {
            for i in (n..order).rev() {
                let t = c[i - n].clone();
                c[i] -= t;
            }
        }
        FracQSeries::new(frac(1, 24), c)
    }

    fn partitions(n: usize) -> i64 {
        fn count(n: usize, max: usize) -> i64 {
            if n == 0 {
                return 1;
            }
            (1..=max.min(n)).map(|k| count(n - k, k)).sum()
        }
        count(n, n)
    }

    #[test]
    fn cancellation_shifts_lead() {
        let a = FracQSeries::from_ints(frac(-1, 24), &[1, 1]);
        let b = FracQSeries::from_ints(frac(-1, 24), &[-1, 0]);
        let s = a.add(&b);
        assert_eq!(s.lead_exp(), &frac(23, 24));
        assert_eq!(s.coeffs(), &[q(1)]);
    }

    #[test]
    fn additive_identity_and_inverse() {
        let e = eta_direct(12);
        assert_eq!(e.add(&FracQSeries::zero()), e);
        let z = e.add(&e.neg());
        assert!(z.is_zero());
    }

    #[test]
    fn geometric_inverse() {
        let one_minus_q = FracQSeries::from_ints(q(0), &[1, -1, 0, 0, 0, 0]);
        let inv = one_minus_q.inv().unwrap();
        assert_eq!(inv.coeffs(), &[q(1), q(1), q(1), q(1), q(1), q(1)]);
        assert_eq!(one_minus_q.mul(&inv), FracQSeries::one(6));
    }

    #[test]
    fn exponent_addition() {
        let a = FracQSeries::monomial(frac(1, 24), 3);
        assert_eq!(a.mul(&a).lead_exp(), &frac(1, 12));
    }

    #[test]
    fn eta_squared() {
        let e = eta_direct(10);
        let sq = e.mul(&e);
        assert_eq!(sq.lead_exp(), &frac(1, 12));
        assert_eq!(&sq.coeffs()[..4], &[q(1), q(-2), q(-1), q(2)]);
    }

    #[test]
    fn inverse_eta_partition_numbers() {
        let inv = eta_direct(20).inv().unwrap();
        assert_eq!(inv.lead_exp(), &frac(-1, 24));
        for n in 0..20 {
            assert_eq!(inv.coeffs()[n], q(partitions(n)));
        }
        assert_eq!(inv.inv().unwrap(), eta_direct(20));
    }

    #[test]
    fn zero_inverse_fails() {
        assert_eq!(FracQSeries::zero().inv(), Err(Error::DivisionByZeroSeries));
    }

    #[test]
    fn powers() {
        let e = eta_direct(6);
        assert_eq!(e.pow(0).unwrap(), FracQSeries::one(6));
        let d = e.pow(24).unwrap();
        assert_eq!(d.lead_exp(), &q(1));
        assert_eq!(&d.coeffs()[..4], &[q(1), q(-24), q(252), q(-1472)]);
        let m = FracQSeries::monomial(frac(1, 24), 1);
        assert_eq!(m.pow(-1).unwrap(), FracQSeries::monomial(frac(-1, 24), 1));
    }

    #[test]
    fn rescaling() {
        let a = FracQSeries::from_ints(q(0), &[1, 1]);
        let r = a.rescale(2);
        assert_eq!(r.coeffs(), &[q(1), q(0), q(1), q(0)]);
        let e2 = eta_direct(12).rescale(2);
        assert_eq!(e2.lead_exp(), &frac(1, 12));
        assert_eq!(e2.coeffs()[2], q(-1));
        assert_eq!(e2.coeffs()[4], q(-1));
        assert_eq!(e2.coeffs()[10], q(1));
        assert_eq!(eta_direct(8).rescale(1), eta_direct(8));
    }

    #[test]
    fn evaluation() {
        let i = Complex64::new(0.0, 1.0);
        let (v, _) = FracQSeries::one(3).eval(i).unwrap();
        assert!((v - 1.0).norm() < 1e-15);
        let (v, _) = FracQSeries::monomial(frac(1, 24), 1).eval(i).unwrap();
        assert!((v.re - (-std::f64::consts::PI / 12.0).exp()).abs() < 1e-15);
        // Gamma(1/4) / (2 pi^(3/4))
        let (v, tail) = eta_direct(40).eval(i).unwrap();
        assert!((v.re - 0.768_225_422_326_056_7).abs() < 1e-12, "{v}");
        assert!(tail < 1e-40);
        assert_eq!(eta_direct(4).eval(Complex64::new(0.0, 0.4)), Err(Error::EvaluationRegion));
    }

    #[test]
    fn json_round_trip() {
        let e = eta_direct(7);
        let v = e.to_json();
        assert_eq!(v["lead_exp"], "1/24");
        assert_eq!(v["order"], 7);
        assert_eq!(FracQSeries::from_json(&v).unwrap(), e);
        let z = FracQSeries::zero();
        assert_eq!(FracQSeries::from_json(&z.to_json()).unwrap(), z);
    }

    #[test]
    fn display() {
        let s = FracQSeries::from_ints(frac(-1, 24), &[1, 0, 1, 1, 3]);
        assert_eq!(s.to_string(), "q^(-1/24) * (1 + q^2 + q^3 + 3 q^4 + O(q^5))");
    }
}
