//! Small exact-arithmetic helpers shared by the series modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Binomial coefficient with an arbitrary rational top entry.
pub fn binom_q(top: &Q, r: u64) -> Q {
    let mut acc = Q::one();
    for i in 0..r {
        acc *= top - q(i as i64);
        acc /= q(i as i64 + 1);
    }
    acc
}

/// Binomial coefficient C(top, r) for integer top (negative allowed).
pub fn binom_i(top: i64, r: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..r as i64 {
        acc *= BigInt::from(top - i);
    }
    acc / factorial(r)
}

/// Machine-size generalized binomial, `None` on overflow.
pub fn binom_i128(top: i64, r: u64) -> Option<i128> {
    let mut acc: i128 = 1;
    for i in 0..r as i64 {
        acc = acc.checked_mul((top - i) as i128)?;
        acc /= (i + 1) as i128;
    }
    Some(acc)
}

pub fn parse_rational(s: &str) -> Result<Q> {
    let t = s.trim();
    let bad = || Error::InvalidRational(s.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

/// Fraction string without a decimal point; integers print bare.
pub fn format_rational(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Q) -> f64 {
    // Scale down huge numerators and denominators together before dividing.
    let n = x.numer();
    let d = x.denom();
    match (n.to_f64(), d.to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
        _ => {
            let shift = (n.bits().max(d.bits())).saturating_sub(900);
            let a = (n.abs() >> shift).to_f64().unwrap_or(f64::MAX);
            let b = (d >> shift).to_f64().unwrap_or(f64::MAX);
            if n.is_negative() {
                -a / b
            } else {
                a / b
            }
        }
    }
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a / gcd_u64(a, b) * b
}

/// Sum of the `e`-th powers of the divisors of `n`.
pub fn sigma(e: u32, n: u64) -> BigInt {
    let mut s = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            s += BigInt::from(d).pow(e);
            let other = n / d;
            if other != d {
                s += BigInt::from(other).pow(e);
            }
        }
        d += 1;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binom_i(5, 2), BigInt::from(10));
        assert_eq!(binom_i(-1, 3), BigInt::from(-1));
        assert_eq!(binom_i(2, 3), BigInt::zero());
        assert_eq!(binom_q(&frac(1, 2), 2), frac(-1, 8));
        assert_eq!(binom_i128(-3, 2), Some(6));
    }

    #[test]
    fn rational_strings() {
        assert_eq!(parse_rational("-3/6").unwrap(), frac(-1, 2));
        assert_eq!(format_rational(&frac(4, 2)), "2");
        assert_eq!(format_rational(&frac(-1, 24)), "-1/24");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
    }

    #[test]
    fn divisor_sums() {
        assert_eq!(sigma(3, 6), sigma(3, 2) * sigma(3, 3));
        assert_eq!(sigma(1, 12), BigInt::from(28));
    }
}
