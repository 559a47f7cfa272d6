//! Bernoulli numbers, Eisenstein series at levels 1 and 2, their renormalized versions,
//! the eta function and the characters of the Heisenberg and lattice algebras.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{binom_i, factorial, frac, q, sigma, Q};
use crate::context::{Algebra, Context};
use crate::error::{Error, Result};
use crate::qseries::FracQSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EisensteinKind {
    E,
    F,
    Ehat,
    Fhat,
}

impl FromStr for EisensteinKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "E" => Ok(Self::E),
            "F" => Ok(Self::F),
            "Ehat" => Ok(Self::Ehat),
            "Fhat" => Ok(Self::Fhat),
            _ => Err(Error::Invalid(format!("unknown Eisenstein kind '{s}'"))),
        }
    }
}

impl fmt::Display for EisensteinKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Identifies one Eisenstein-type series. Hat indices are unordered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EisensteinId {
    E(u32),
    F(u32),
    Ehat(u32, u32),
    Fhat(u32, u32),
}

impl EisensteinId {
    pub fn series(self, order: usize) -> FracQSeries {
        match self {
            EisensteinId::E(k) => eisenstein_e(k, order),
            EisensteinId::F(k) => eisenstein_f(k, order),
            EisensteinId::Ehat(m, n) => eisenstein_hat(EisensteinKind::Ehat, m, n, order),
            EisensteinId::Fhat(m, n) => eisenstein_hat(EisensteinKind::Fhat, m, n, order),
        }
    }
}

static BERNOULLI: OnceLock<Mutex<Vec<Q>>> = OnceLock::new();

/// `B_k` from `z/(e^z - 1)`, so `B_1 = -1/2`.
pub fn bernoulli(k: usize) -> Q {
    let mut cache = BERNOULLI.get_or_init(|| Mutex::new(vec![Q::one()])).lock().unwrap();
    while cache.len() <= k {
        let n = cache.len();
        // sum_{j<n+1} C(n+1, j) B_j = 0
        let mut s = Q::zero();
        for (j, b) in cache.iter().enumerate() {
            s += Q::from_integer(binom_i(n as i64 + 1, j as u64)) * b;
        }
        cache.push(-s / q(n as i64 + 1));
    }
    cache[k].clone()
}

type SeriesKey = (EisensteinKind, u32, u32, usize);
static SERIES_CACHE: OnceLock<Mutex<HashMap<SeriesKey, FracQSeries>>> = OnceLock::new();

fn cached(key: SeriesKey, build: impl FnOnce() -> FracQSeries) -> FracQSeries {
    let cache = SERIES_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().unwrap().get(&key) {
        return s.clone();
    }
    let s = build();
    cache.lock().unwrap().insert(key, s.clone());
    s
}

/// `E_k = -B_k/k! + 2/(k-1)! sum sigma_{k-1}(n) q^n` for even k, zero for odd k.
pub fn eisenstein_e(k: u32, order: usize) -> FracQSeries {
    assert!(k >= 1, "Eisenstein weight must be positive");
    if k % 2 == 1 {
        return FracQSeries::zero();
    }
    cached((EisensteinKind::E, k, 0, order), || {
        let mut c = Vec::with_capacity(order);
        if order > 0 {
            c.push(-bernoulli(k as usize) / Q::from_integer(factorial(k as u64)));
        }
        let pref = Q::new(BigInt::from(2), factorial(k as u64 - 1));
        for n in 1..order {
            c.push(&pref * Q::from_integer(sigma(k - 1, n as u64)));
        }
        FracQSeries::new(Q::zero(), c)
    })
}

/// `F_k(tau) = 2 E_k(2 tau) - E_k(tau)`.
pub fn eisenstein_f(k: u32, order: usize) -> FracQSeries {
    if k % 2 == 1 {
        return FracQSeries::zero();
    }
    cached((EisensteinKind::F, k, 0, order), || {
        let e = eisenstein_e(k, order);
        e.rescale(2).scale(&q(2)).sub(&e).truncate(order)
    })
}

/// The factor `(-1)^{n+1} n C(m+n-1, n)` multiplying `E_{m+n}` in the hat series.
pub fn hat_factor(m: u32, n: u32) -> Q {
    let sign = if n % 2 == 1 { 1 } else { -1 };
    Q::from_integer(BigInt::from(sign * n as i64) * binom_i(m as i64 + n as i64 - 1, n as u64))
}

/// `Ehat_{m+n}` or `Fhat_{m+n}`; cached under the ordered pair (min, max).
pub fn eisenstein_hat(kind: EisensteinKind, m: u32, n: u32, order: usize) -> FracQSeries {
    assert!(m >= 1 && n >= 1, "hat indices must be positive");
    let (lo, hi) = (m.min(n), m.max(n));
    let base_kind = match kind {
        EisensteinKind::Ehat | EisensteinKind::E => EisensteinKind::Ehat,
        EisensteinKind::Fhat | EisensteinKind::F => EisensteinKind::Fhat,
    };
    cached((base_kind, lo, hi, order), || {
        let base = match base_kind {
            EisensteinKind::Ehat => eisenstein_e(m + n, order),
            _ => eisenstein_f(m + n, order),
        };
        base.scale(&hat_factor(m, n))
    })
}

/// `Ehat`/`Fhat` of `(m, n)` as a scalar times `E_{m+n}`/`F_{m+n}`; `None` when odd.
pub fn hat_atom(kind: EisensteinKind, m: u32, n: u32) -> Option<(Q, EisensteinId)> {
    if (m + n) % 2 == 1 {
        return None;
    }
    let id = match kind {
        EisensteinKind::Ehat | EisensteinKind::E => EisensteinId::E(m + n),
        EisensteinKind::Fhat | EisensteinKind::F => EisensteinId::F(m + n),
    };
    Some((hat_factor(m, n), id))
}

/// A rational linear combination of products of `E_k` and `F_k`.
///
/// Keeping traces in this form lets many involution terms share one series product.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EisensteinPoly {
    terms: BTreeMap<Vec<EisensteinId>, Q>,
}

type ProductKey = (Vec<EisensteinId>, usize);
static PRODUCT_CACHE: OnceLock<Mutex<HashMap<ProductKey, FracQSeries>>> = OnceLock::new();

fn product_series(ids: &[EisensteinId], order: usize) -> FracQSeries {
    if ids.is_empty() {
        return FracQSeries::one(order);
    }
    let cache = PRODUCT_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (ids.to_vec(), order);
    if let Some(s) = cache.lock().unwrap().get(&key) {
        return s.clone();
    }
    let (last, init) = ids.split_last().unwrap();
    let s = product_series(init, order).mul(&last.series(order));
    cache.lock().unwrap().insert(key, s.clone());
    s
}

impl EisensteinPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn atom(c: Q, id: EisensteinId) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![id], c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[EisensteinId], &Q)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Adds `c * prod ids`; the ids need not be sorted.
    pub fn add_term(&mut self, mut ids: Vec<EisensteinId>, c: Q) {
        if c.is_zero() {
            return;
        }
        ids.sort_unstable();
        let slot = self.terms.entry(ids.clone()).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&ids);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let mut ids = a.clone();
                ids.extend_from_slice(b);
                out.add_term(ids, x * y);
            }
        }
        out
    }

    /// The q-expansion to `order` terms; products of atoms are cached.
    pub fn eval(&self, order: usize) -> FracQSeries {
        let mut acc = FracQSeries::zero();
        for (ids, c) in &self.terms {
            acc = acc.add(&product_series(ids, order).scale(c));
        }
        if acc.is_exact_zero() {
            FracQSeries::zero_to(q(order as i64))
        } else {
            acc
        }
    }
}

/// Generalized pentagonal numbers with their signs in `prod (1 - q^n)`.
fn pentagonal_terms(order: usize) -> Vec<(usize, i64)> {
    let mut out = vec![(0usize, 1i64)];
    let mut j: i64 = 1;
    loop {
        let a = (j * (3 * j - 1) / 2) as usize;
        let b = (j * (3 * j + 1) / 2) as usize;
        if a >= order {
            break;
        }
        let s = if j % 2 == 0 { 1 } else { -1 };
        out.push((a, s));
        if b < order {
            out.push((b, s));
        }
        j += 1;
    }
    out
}

/// `eta(tau) = q^{1/24} prod_{n>=1} (1 - q^n)` via Euler's pentagonal theorem.
pub fn eta(order: usize) -> FracQSeries {
    let mut c = vec![Q::zero(); order];
    for (e, s) in pentagonal_terms(order) {
        c[e] = q(s);
    }
    FracQSeries::new(frac(1, 24), c)
}

/// `prod_j eta(m_j tau)^{r_j}`.
pub fn eta_quotient(spec: &[(u32, i64)], order: usize) -> Result<FracQSeries> {
    let base = eta(order);
    let mut acc = FracQSeries::one(order);
    for &(m, r) in spec {
        let f = base.rescale(m).truncate(order).pow(r)?;
        acc = acc.mul(&f);
    }
    Ok(acc)
}

/// `eta(tau)^k / eta(2 tau)^k`, the trace of the involution on M.
pub fn twisted_character(rank: usize, order: usize) -> FracQSeries {
    let k = rank as i64;
    eta_quotient(&[(1, k), (2, -k)], order).expect("eta has nonzero lead")
}

/// Graded dimension of the requested algebra as an eta/theta expression.
pub fn character(which: Algebra, ctx: &Context, order: usize) -> Result<FracQSeries> {
    let k = ctx.rank() as i64;
    let half = frac(1, 2);
    let m = eta_quotient(&[(1, -k)], order)?;
    Ok(match which {
        Algebra::M => m,
        Algebra::MPlus => m.add(&twisted_character(ctx.rank(), order)).scale(&half),
        Algebra::MMinus => m.sub(&twisted_character(ctx.rank(), order)).scale(&half),
        Algebra::VL => ctx.require_lattice()?.theta(order).mul(&m),
        Algebra::VLPlus => {
            let vl = ctx.require_lattice()?.theta(order).mul(&m);
            vl.add(&twisted_character(ctx.rank(), order)).scale(&half)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::EvenLattice;

    fn ints(s: &FracQSeries, n: usize) -> Vec<Q> {
        s.coeffs()[..n].to_vec()
    }

    fn qs(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), q(1));
        assert_eq!(bernoulli(1), frac(-1, 2));
        assert_eq!(bernoulli(2), frac(1, 6));
        assert_eq!(bernoulli(12), frac(-691, 2730));
        for k in (3..20).step_by(2) {
            assert!(bernoulli(k).is_zero());
        }
    }

    #[test]
    fn eisenstein_expansions() {
        assert!(eisenstein_e(3, 10).is_exact_zero());
        let e2 = eisenstein_e(2, 6);
        assert_eq!(e2.coeffs()[0], frac(-1, 12));
        assert_eq!(&e2.coeffs()[1..5], &qs(&[2, 6, 8, 14])[..]);
        let e4 = eisenstein_e(4, 4);
        assert_eq!(e4.coeffs()[0], frac(1, 720));
        assert_eq!(e4.coeffs()[1], frac(1, 3));
        assert_eq!(e4.coeffs()[2], q(3));
    }

    #[test]
    fn level_two_series() {
        assert!(eisenstein_f(3, 5).is_zero());
        let f2 = eisenstein_f(2, 6);
        assert_eq!(f2.order(), 6);
        assert_eq!(f2.coeffs()[0], frac(-1, 12));
        assert_eq!(&f2.coeffs()[1..5], &qs(&[-2, -2, -8, -2])[..]);
        for k in [2u32, 4, 6, 8] {
            assert_eq!(eisenstein_f(k, 3).coeffs()[0], eisenstein_e(k, 3).coeffs()[0]);
        }
    }

    #[test]
    fn hat_series() {
        let o = 8;
        assert_eq!(eisenstein_hat(EisensteinKind::Ehat, 1, 1, o), eisenstein_e(2, o));
        let m20 = eisenstein_e(6, o).scale(&q(-20));
        assert_eq!(eisenstein_hat(EisensteinKind::Ehat, 2, 4, o), m20);
        assert_eq!(eisenstein_hat(EisensteinKind::Ehat, 4, 2, o), m20);
        assert_eq!(hat_factor(2, 4), q(-20));
        assert_eq!(hat_factor(4, 2), q(-20));
        assert_eq!(hat_factor(1, 3), q(3));
        assert!(eisenstein_hat(EisensteinKind::Ehat, 1, 2, o).is_zero());
        for m in 1..8u32 {
            for n in (1..8u32).filter(|n| (m + n) % 2 == 0) {
                assert_eq!(hat_factor(m, n), hat_factor(n, m));
            }
        }
    }

    #[test]
    fn eta_products() {
        let e = eta(15);
        assert_eq!(ints(&e, 13), qs(&[1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1]));
        let zm = eta_quotient(&[(1, -1)], 8).unwrap();
        assert_eq!(zm.lead_exp(), &frac(-1, 24));
        assert_eq!(ints(&zm, 5), qs(&[1, 1, 2, 3, 5]));
        assert_eq!(eta_quotient(&[(1, 1), (1, -1)], 8).unwrap(), FracQSeries::one(8));
        // direct product expansion
        let mut c = vec![q(0); 30];
        c[0] = q(1);
        for n in 1..30 {
            for i in (n..30).rev() {
                let t = c[i - n].clone();
                c[i] -= t;
            }
        }
        assert_eq!(eta(30).coeffs(), &c[..]);
    }

    #[test]
    fn characters() {
        let ctx = Context::Heisenberg { rank: 1 };
        let plus = character(Algebra::MPlus, &ctx, 5).unwrap();
        assert_eq!(plus.lead_exp(), &frac(-1, 24));
        assert_eq!(plus.coeffs(), &qs(&[1, 0, 1, 1, 3])[..]);
        let minus = character(Algebra::MMinus, &ctx, 5).unwrap();
        assert_eq!(plus.add(&minus), character(Algebra::M, &ctx, 5).unwrap());
        for k in 1..=3 {
            let c = Context::Heisenberg { rank: k };
            let diff = character(Algebra::MPlus, &c, 12).unwrap().sub(&character(Algebra::MMinus, &c, 12).unwrap());
            assert_eq!(diff, twisted_character(k, 12));
        }
        let l = Context::Lattice(EvenLattice::a1());
        let vlp = character(Algebra::VLPlus, &l, 10).unwrap();
        let theta = FracQSeries::from_ints(q(0), &[1, 2, 0, 0, 2, 0, 0, 0, 0, 2]);
        let expect = theta.mul(&eta(10).inv().unwrap()).add(&twisted_character(1, 10)).scale(&frac(1, 2));
        assert_eq!(vlp, expect);
    }
}
