//! Even positive-definite lattices, their theta series and the Jacobi-like forms built
//! from them.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorial, q, Q};
use crate::context::pairing;
use crate::error::{Error, Result};
use crate::modforms::eisenstein_e;
use crate::qseries::FracQSeries;

/// Integer coordinates of a lattice vector in the fixed basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn zero(rank: usize) -> Self {
        LatticeVector(vec![0; rank])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn neg(&self) -> Self {
        LatticeVector(self.0.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn to_q(&self) -> Vec<Q> {
        self.0.iter().map(|&c| q(c)).collect()
    }

    /// Whether every coordinate is even, i.e. the vector lies in 2L.
    pub fn in_double(&self) -> bool {
        self.0.iter().all(|c| c % 2 == 0)
    }

    pub fn halve(&self) -> Option<Self> {
        self.in_double().then(|| LatticeVector(self.0.iter().map(|c| c / 2).collect()))
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvenLattice {
    gram: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct GramFile {
    rank: usize,
    gram: Vec<Vec<i64>>,
}

impl EvenLattice {
    /// Validates symmetry, even diagonal and positive definiteness.
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self> {
        let k = gram.len();
        if k == 0 {
            return Err(Error::InvalidLattice("rank must be positive".into()));
        }
        for (i, row) in gram.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidLattice(format!("row {i} has length {}", row.len())));
            }
            if row[i] % 2 != 0 {
                return Err(Error::InvalidLattice(format!("diagonal entry {i} is odd")));
            }
            for j in 0..k {
                if gram[j][i] != row[j] {
                    return Err(Error::InvalidLattice("gram matrix is not symmetric".into()));
                }
            }
        }
        let gq: Vec<Vec<Q>> = gram.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        for m in 1..=k {
            let minor: Vec<Vec<Q>> = gq[..m].iter().map(|r| r[..m].to_vec()).collect();
            if determinant(&minor) <= Q::zero() {
                return Err(Error::InvalidLattice("gram matrix is not positive definite".into()));
            }
        }
        Ok(EvenLattice { gram })
    }

    /// The rank-1 lattice with basis vector of norm 2 (the A1 root lattice).
    pub fn a1() -> Self {
        EvenLattice { gram: vec![vec![2]] }
    }

    pub fn a2() -> Self {
        EvenLattice { gram: vec![vec![2, 1], vec![1, 2]] }
    }

    /// `2 I_k`: an orthogonal sum of k copies of A1.
    pub fn scaled_identity(k: usize) -> Self {
        EvenLattice { gram: (0..k).map(|i| (0..k).map(|j| if i == j { 2 } else { 0 }).collect()).collect() }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let f: GramFile = serde_json::from_str(s).map_err(|e| Error::InvalidLattice(e.to_string()))?;
        if f.rank != f.gram.len() {
            return Err(Error::InvalidLattice(format!("rank {} does not match gram size {}", f.rank, f.gram.len())));
        }
        Self::new(f.gram)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::GramFile(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&s)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&GramFile { rank: self.rank(), gram: self.gram.clone() }).expect("serializable")
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn gram_q(&self) -> Vec<Vec<Q>> {
        self.gram.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    pub fn inner(&self, a: &LatticeVector, b: &LatticeVector) -> i64 {
        let k = self.rank();
        let mut s = 0;
        for i in 0..k {
            for j in 0..k {
                s += a.0[i] * self.gram[i][j] * b.0[j];
            }
        }
        s
    }

    pub fn norm(&self, a: &LatticeVector) -> i64 {
        self.inner(a, a)
    }

    /// `(v, alpha)` for a rational coordinate vector `v`.
    pub fn pair_rational(&self, v: &[Q], a: &LatticeVector) -> Q {
        pairing(v, &a.to_q(), &self.gram_q()).expect("dimensions checked by caller")
    }

    pub fn inverse_gram(&self) -> Vec<Vec<Q>> {
        invert(&self.gram_q()).expect("positive definite gram is invertible")
    }

    /// Smallest N with N G^{-1} integral and even on the diagonal.
    pub fn level(&self) -> u64 {
        let inv = self.inverse_gram();
        let k = self.rank();
        let mut n = 1u64;
        loop {
            let nq = q(n as i64);
            let ok = (0..k).all(|i| {
                (0..k).all(|j| {
                    let x = &inv[i][j] * &nq;
                    x.is_integer() && (i != j || x.to_integer().is_even())
                })
            });
            if ok {
                return n;
            }
            n += 1;
        }
    }

    /// All vectors of norm at most `max_norm`, in lexicographic order of coordinates.
    pub fn enumerate_vectors(&self, max_norm: i64) -> Vec<LatticeVector> {
        if max_norm < 0 {
            return Vec::new();
        }
        let inv = self.inverse_gram();
        // x_i^2 <= (x, x) * (G^{-1})_{ii} for positive-definite G.
        let bounds: Vec<i64> = (0..self.rank())
            .map(|i| {
                let cap = &inv[i][i] * q(max_norm);
                let mut b = 0i64;
                while q((b + 1) * (b + 1)) <= cap {
                    b += 1;
                }
                b
            })
            .collect();
        let mut out = Vec::new();
        let mut cur = vec![0i64; self.rank()];
        self.box_walk(0, &bounds, &mut cur, max_norm, &mut out);
        out
    }

    fn box_walk(&self, i: usize, bounds: &[i64], cur: &mut Vec<i64>, max_norm: i64, out: &mut Vec<LatticeVector>) {
        if i == bounds.len() {
            let v = LatticeVector(cur.clone());
            if self.norm(&v) <= max_norm {
                out.push(v);
            }
            return;
        }
        for x in -bounds[i]..=bounds[i] {
            cur[i] = x;
            self.box_walk(i + 1, bounds, cur, max_norm, out);
        }
        cur[i] = 0;
    }

    /// Vectors with `(a, a)/2 < order`, i.e. those visible in a series of that order.
    pub fn vectors_below_order(&self, order: usize) -> Vec<LatticeVector> {
        self.enumerate_vectors(2 * order as i64 - 1)
    }

    /// `sum_a P(a) q^{(a,a)/2}` to `order` coefficients.
    pub fn theta_weighted<F: Fn(&LatticeVector) -> Q>(&self, weight: F, order: usize) -> FracQSeries {
        let mut c = vec![Q::zero(); order];
        for a in self.vectors_below_order(order) {
            let w = weight(&a);
            if !w.is_zero() {
                c[(self.norm(&a) / 2) as usize] += w;
            }
        }
        FracQSeries::new(Q::zero(), c)
    }

    pub fn theta(&self, order: usize) -> FracQSeries {
        self.theta_weighted(|_| Q::one(), order)
    }

    /// `sum_a (v, a)^m q^{(a,a)/2}`.
    pub fn theta_vm(&self, v: &[Q], m: u32, order: usize) -> FracQSeries {
        self.theta_weighted(|a| pow_q(&self.pair_rational(v, a), m), order)
    }
}

pub fn pow_q(x: &Q, m: u32) -> Q {
    let mut acc = Q::one();
    for _ in 0..m {
        acc *= x;
    }
    acc
}

pub fn determinant(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Q::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Q::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            let f = &a[r][col] / &p;
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let t = &a[col][c] * &f;
                a[r][c] -= t;
            }
        }
    }
    det
}

pub fn invert(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(piv, col);
        let p = a[col][col].clone();
        for c in 0..2 * n {
            a[col][c] = &a[col][c] / &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..2 * n {
                let t = &a[col][c] * &f;
                a[r][c] -= t;
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// A formal series `sum_n phi_n(tau) (2 pi i X)^n` with weight and index metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiLikeForm {
    pub coeffs: Vec<FracQSeries>,
    pub weight: Q,
    pub index: Q,
}

impl JacobiLikeForm {
    pub fn x_order(&self) -> usize {
        self.coeffs.len()
    }

    /// The constant form 1.
    pub fn unit(x_order: usize, q_order: usize) -> Self {
        let coeffs =
            (0..x_order).map(|n| if n == 0 { FracQSeries::one(q_order) } else { FracQSeries::zero() }).collect();
        JacobiLikeForm { coeffs, weight: Q::zero(), index: Q::zero() }
    }

    /// Cauchy product in X; weights and indices add.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.x_order().min(other.x_order());
        let coeffs = (0..n)
            .map(|l| (0..=l).fold(FracQSeries::zero(), |acc, i| acc.add(&self.coeffs[i].mul(&other.coeffs[l - i]))))
            .collect();
        JacobiLikeForm { coeffs, weight: &self.weight + &other.weight, index: &self.index + &other.index }
    }
}

/// `Theta_L(tau, v, X)`: `phi_m = 2^m/(2m)! theta_L(tau, v, 2m)`, weight k/2, index (v, v).
pub fn jl_theta(l: &EvenLattice, v: &[Q], x_order: usize, q_order: usize) -> JacobiLikeForm {
    let coeffs = (0..x_order)
        .map(|m| {
            let c = Q::new(BigInt::from(2).pow(m as u32), factorial(2 * m as u64));
            l.theta_vm(v, 2 * m as u32, q_order).scale(&c)
        })
        .collect();
    let index = pairing(v, v, &l.gram_q()).expect("vector has lattice rank");
    JacobiLikeForm { coeffs, weight: Q::new(BigInt::from(l.rank()), BigInt::from(2)), index }
}

/// `exp(E_2(tau) * (-2 pi i s X))`: `phi_n = (-s E_2)^n / n!`, weight 0, index s.
/// `s = 1` and `s = -1` give the two signs; other rationals rescale X.
pub fn jl_e2_exp(s: &Q, x_order: usize, q_order: usize) -> JacobiLikeForm {
    let base = eisenstein_e(2, q_order).scale(&-s.clone());
    let mut coeffs = Vec::with_capacity(x_order);
    let mut pw = FracQSeries::one(q_order);
    for n in 0..x_order {
        coeffs.push(pw.scale(&Q::new(BigInt::one(), factorial(n as u64))));
        pw = pw.mul(&base);
    }
    JacobiLikeForm { coeffs, weight: Q::zero(), index: s.clone() }
}
