//! Coefficients expressing square-bracket modes of weight-1 states through round modes.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{factorial, q, Q};

/// Truncated power series in z with rational coefficients.
fn series_mul(a: &[Q], b: &[Q], len: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn series_inv(a: &[Q], len: usize) -> Vec<Q> {
    let inv0 = a[0].recip();
    let mut out = vec![Q::zero(); len];
    out[0] = inv0.clone();
    for k in 1..len {
        let mut s = Q::zero();
        for j in 1..=k.min(a.len() - 1) {
            s += &a[j] * &out[k - j];
        }
        out[k] = -s * &inv0;
    }
    out
}

fn series_pow(base: &[Q], e: i64, len: usize) -> Vec<Q> {
    let b = if e < 0 { series_inv(base, len) } else { base[..len.min(base.len())].to_vec() };
    let mut acc = vec![Q::zero(); len];
    acc[0] = Q::one();
    for _ in 0..e.unsigned_abs() {
        acc = series_mul(&acc, &b, len);
    }
    acc
}

/// `(e^z - 1)/z` and `e^z` to `len` terms.
fn b_and_exp(len: usize) -> (Vec<Q>, Vec<Q>) {
    let b = (0..len).map(|i| Q::new(BigInt::one(), factorial(i as u64 + 1))).collect();
    let e = (0..len).map(|i| Q::new(BigInt::one(), factorial(i as u64))).collect();
    (b, e)
}

static TABLE: OnceLock<Mutex<HashMap<(i64, i64), Q>>> = OnceLock::new();

/// `a(m, j)`: the coefficient of `h(j)` in `h[m]` for a weight-1 state `h`, i.e. the
/// `z^{-m-1}` coefficient of `e^z (e^z - 1)^{-j-1}`. Zero unless `j >= m`.
pub fn transport_coeff(m: i64, j: i64) -> Q {
    if j < m {
        return Q::zero();
    }
    let table = TABLE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(x) = table.lock().unwrap().get(&(m, j)) {
        return x.clone();
    }
    // e^z (e^z-1)^{-j-1} = z^{-j-1} B(z)^{-j-1} e^z with B = (e^z-1)/z
    let len = (j - m + 1) as usize;
    let (b, e) = b_and_exp(len);
    let pw = series_pow(&b, -j - 1, len);
    let x = series_mul(&pw, &e, len)[len - 1].clone();
    table.lock().unwrap().insert((m, j), x.clone());
    x
}

/// The nonzero `(j, a(m, j))` with `m <= j <= j_max`.
pub fn transport_row(m: i64, j_max: i64) -> Vec<(i64, Q)> {
    (m..=j_max).map(|j| (j, transport_coeff(m, j))).filter(|(_, c)| !c.is_zero()).collect()
}

/// `c(k, i, m)`: the coefficient of `x^m` in `C(k - 1 + x, i)`.
pub fn binomid_coeff(k: i64, i: u64, m: u64) -> Q {
    // expand prod_{r<i} (k - 1 - r + x) / i!
    let mut poly = vec![Q::one()];
    for r in 0..i as i64 {
        let c0 = q(k - 1 - r);
        let mut next = vec![Q::zero(); poly.len() + 1];
        for (d, a) in poly.iter().enumerate() {
            next[d] += a * &c0;
            next[d + 1] += a;
        }
        poly = next;
    }
    let f = Q::from_integer(factorial(i));
    poly.get(m as usize).cloned().unwrap_or_else(Q::zero) / f
}
