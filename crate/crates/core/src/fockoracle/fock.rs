//! Sparse vectors in `M (x) C[L]` over an orthogonal basis of the weight-1 space.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::transport::transport_row;
use crate::arith::{format_rational, q, Q};
use crate::closedform::{BracketWord, Tail};
use crate::context::{pairing, Context};
use crate::error::{Error, Result};
use crate::lattice::LatticeVector;

/// Gram-Schmidt basis `e_c` of `h`, with norms `N_c = (e_c, e_c)`.
#[derive(Clone, Debug)]
pub struct ColorBasis {
    pub vectors: Vec<Vec<Q>>,
    pub norms: Vec<Q>,
}

impl ColorBasis {
    pub fn new(gram: &[Vec<Q>]) -> Self {
        let k = gram.len();
        let mut vectors: Vec<Vec<Q>> = Vec::with_capacity(k);
        let mut norms: Vec<Q> = Vec::with_capacity(k);
        for i in 0..k {
            let mut v: Vec<Q> = (0..k).map(|j| if i == j { Q::one() } else { Q::zero() }).collect();
            for (e, n) in vectors.iter().zip(&norms) {
                let c = pairing(&v, e, gram).expect("square gram") / n;
                for (x, y) in v.iter_mut().zip(e) {
                    *x -= &c * y;
                }
            }
            norms.push(pairing(&v, &v, gram).expect("square gram"));
            vectors.push(v);
        }
        ColorBasis { vectors, norms }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// `prod h_{c}(-n) (x) e^alpha` with modes sorted ascending by `(n, c)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockBasisKey {
    pub modes: Vec<(u32, u8)>,
    pub alpha: LatticeVector,
}

impl FockBasisKey {
    pub fn vacuum(rank: usize) -> Self {
        FockBasisKey { modes: Vec::new(), alpha: LatticeVector::zero(rank) }
    }

    pub fn exp(alpha: LatticeVector) -> Self {
        FockBasisKey { modes: Vec::new(), alpha }
    }

    /// `sum n` over the oscillators.
    pub fn oscillator_weight(&self) -> u64 {
        self.modes.iter().map(|&(n, _)| n as u64).sum()
    }

    /// Number of oscillators, the eigenvalue exponent of `h -> -h`.
    pub fn parity(&self) -> usize {
        self.modes.len() % 2
    }

    pub fn multiplicity(&self, n: u32, c: u8) -> usize {
        self.modes.iter().filter(|&&m| m == (n, c)).count()
    }

    fn with_mode(&self, n: u32, c: u8) -> Self {
        let mut modes = self.modes.clone();
        let pos = modes.partition_point(|&m| m < (n, c));
        modes.insert(pos, (n, c));
        FockBasisKey { modes, alpha: self.alpha.clone() }
    }

    fn without_mode(&self, n: u32, c: u8) -> Option<Self> {
        let pos = self.modes.iter().position(|&m| m == (n, c))?;
        let mut modes = self.modes.clone();
        modes.remove(pos);
        Some(FockBasisKey { modes, alpha: self.alpha.clone() })
    }

    /// Whether every oscillator of `self` also occurs in `other`, with multiplicity.
    pub fn divides(&self, other: &FockBasisKey) -> bool {
        let mut rest = other.modes.iter();
        self.modes.iter().all(|m| rest.any(|o| o == m))
    }

    /// Modes of one color, as a sorted list of `n`.
    pub fn color_modes(&self, c: u8) -> Vec<u32> {
        self.modes.iter().filter(|m| m.1 == c).map(|m| m.0).collect()
    }
}

impl fmt::Display for FockBasisKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(n, c) in self.modes.iter().rev() {
            write!(f, "e{c}(-{n}) ")?;
        }
        write!(f, "e^{}", self.alpha)
    }
}

/// Finite rational combination of basis keys.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FockVector {
    entries: BTreeMap<FockBasisKey, Q>,
}

impl FockVector {
    pub fn zero() -> Self {
        FockVector::default()
    }

    pub fn basis(key: FockBasisKey) -> Self {
        FockVector::term(key, Q::one())
    }

    pub fn term(key: FockBasisKey, c: Q) -> Self {
        let mut v = FockVector::zero();
        v.add_term(key, c);
        v
    }

    pub fn add_term(&mut self, key: FockBasisKey, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.entries.entry(key) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &FockVector, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.entries {
            self.add_term(k.clone(), v * c);
        }
    }

    /// Keeps the terms whose key satisfies `keep`.
    pub fn filtered(mut self, keep: impl Fn(&FockBasisKey) -> bool) -> FockVector {
        self.entries.retain(|k, _| keep(k));
        self
    }

    pub fn scale(&self, c: &Q) -> FockVector {
        let mut out = FockVector::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn sub(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        out.add_scaled(other, &-Q::one());
        out
    }

    pub fn coeff(&self, key: &FockBasisKey) -> Q {
        self.entries.get(key).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockBasisKey, &Q)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.entries.iter().map(|(k, c)| format!("({}) {k}", format_rational(c))).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Mode algebra of `M (x) C[L]` (or of `M` alone) in the color basis.
#[derive(Clone, Debug)]
pub struct FockSpace {
    ctx: Context,
    gram: Vec<Vec<Q>>,
    colors: ColorBasis,
}

impl FockSpace {
    pub fn new(ctx: &Context) -> Self {
        let gram = ctx.gram();
        let colors = ColorBasis::new(&gram);
        FockSpace { ctx: ctx.clone(), gram, colors }
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn rank(&self) -> usize {
        self.ctx.rank()
    }

    pub fn colors(&self) -> &ColorBasis {
        &self.colors
    }

    /// `x_c` with `v = sum_c x_c e_c`.
    pub fn color_coords(&self, v: &[Q]) -> Vec<Q> {
        self.colors
            .vectors
            .iter()
            .zip(&self.colors.norms)
            .map(|(e, n)| pairing(v, e, &self.gram).expect("rank checked") / n)
            .collect()
    }

    /// `(e_c, alpha)`, the eigenvalue of `e_c(0)` on `e^alpha`.
    pub fn lambda(&self, c: usize, alpha: &LatticeVector) -> Q {
        if alpha.is_zero() {
            return Q::zero();
        }
        pairing(&self.colors.vectors[c], &alpha.to_q(), &self.gram).expect("rank checked")
    }

    /// `(alpha, alpha)/2`.
    pub fn lattice_weight(&self, alpha: &LatticeVector) -> u64 {
        match &self.ctx {
            Context::Lattice(l) => (l.norm(alpha) / 2) as u64,
            Context::Heisenberg { .. } => 0,
        }
    }

    /// `L(0)` eigenvalue of a basis key.
    pub fn weight(&self, key: &FockBasisKey) -> u64 {
        key.oscillator_weight() + self.lattice_weight(&key.alpha)
    }

    /// `e_c(n)` on a vector.
    pub fn apply_color_mode(&self, c: usize, n: i64, x: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        let cc = c as u8;
        for (k, v) in x.iter() {
            if n < 0 {
                out.add_term(k.with_mode((-n) as u32, cc), v.clone());
            } else if n > 0 {
                let mult = k.multiplicity(n as u32, cc);
                if let Some(k2) = k.without_mode(n as u32, cc) {
                    out.add_term(k2, v * q(n) * &self.colors.norms[c] * q(mult as i64));
                }
            } else {
                out.add_term(k.clone(), v * self.lambda(c, &k.alpha));
            }
        }
        out
    }

    /// `h_v(n)` on a vector, `v` in lattice coordinates.
    pub fn apply_round_mode(&self, v: &[Q], n: i64, x: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        for (c, xc) in self.color_coords(v).iter().enumerate() {
            if !xc.is_zero() {
                out.add_scaled(&self.apply_color_mode(c, n, x), xc);
            }
        }
        out
    }

    /// `h_v[m] = sum_{j >= m} a(m, j) h_v(j)`, truncated where the round modes annihilate.
    pub fn apply_square_mode(&self, v: &[Q], m: i64, x: &FockVector) -> FockVector {
        let top = x.iter().map(|(k, _)| k.oscillator_weight() as i64).max().unwrap_or(0);
        let mut out = FockVector::zero();
        for (j, a) in transport_row(m, top.max(m)) {
            out.add_scaled(&self.apply_round_mode(v, j, x), &a);
        }
        out
    }

    /// The tail as a vector: `1`, `e^a`, `e^a + e^{-a}` or `e^a - e^{-a}`.
    pub fn tail_vector(&self, tail: &Tail) -> Result<FockVector> {
        let k = self.rank();
        if let Some(a) = tail.alpha() {
            if a.0.len() != k {
                return Err(Error::DimensionMismatch { expected: k, found: a.0.len() });
            }
            if !a.is_zero() && self.ctx.lattice().is_none() {
                return Err(Error::UnsupportedTail("lattice tails need a lattice context".into()));
            }
        }
        let mut out = FockVector::zero();
        match tail {
            Tail::Vacuum => out.add_term(FockBasisKey::vacuum(k), Q::one()),
            Tail::E(a) => out.add_term(FockBasisKey::exp(a.clone()), Q::one()),
            Tail::F(a) => {
                out.add_term(FockBasisKey::exp(a.clone()), Q::one());
                out.add_term(FockBasisKey::exp(a.neg()), Q::one());
            }
            Tail::G(a) => {
                out.add_term(FockBasisKey::exp(a.clone()), Q::one());
                out.add_term(FockBasisKey::exp(a.neg()), -Q::one());
            }
        }
        Ok(out)
    }

    /// Expands a square-bracket word in the round-mode monomial basis.
    pub fn build_square_state(&self, word: &BracketWord) -> Result<FockVector> {
        word.validate(self.rank())?;
        let mut x = self.tail_vector(&word.tail)?;
        for f in word.factors.iter().rev() {
            x = self.apply_square_mode(&f.vector, -(f.n as i64), &x);
        }
        Ok(x)
    }

    /// Cocycle `eps(a, b) = (-1)^{sum_{i > j} a_i b_j G_ij}`.
    pub fn cocycle(&self, a: &LatticeVector, b: &LatticeVector) -> Q {
        let Context::Lattice(l) = &self.ctx else { return Q::one() };
        let g = l.gram();
        let mut s = 0i64;
        for i in 0..a.0.len() {
            for j in 0..i {
                s += a.0[i] * b.0[j] * g[i][j];
            }
        }
        if s % 2 == 0 {
            Q::one()
        } else {
            -Q::one()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::frac;
    use crate::closedform::Factor;
    use crate::lattice::EvenLattice;

    #[test]
    fn gram_schmidt_a2() {
        let fs = FockSpace::new(&Context::Lattice(EvenLattice::a2()));
        assert_eq!(fs.colors().norms, vec![q(2), frac(3, 2)]);
        // b_2 = 1/2 e_0 + e_1
        assert_eq!(fs.color_coords(&[q(0), q(1)]), vec![frac(1, 2), q(1)]);
    }

    #[test]
    fn canonical_commutator_round() {
        let fs = FockSpace::new(&Context::Heisenberg { rank: 1 });
        let x = FockVector::basis(FockBasisKey::vacuum(1));
        let y = fs.apply_round_mode(&[q(1)], -2, &x);
        let z = fs.apply_round_mode(&[q(1)], 2, &y);
        assert_eq!(z, x.scale(&q(2)));
    }

    #[test]
    fn square_state_lowest_terms() {
        // h[-1] 1 = h(-1) 1 and h[-2] 1 = h(-2) 1 + h(-1) 1 / 2 ... up to the transport table
        let fs = FockSpace::new(&Context::Heisenberg { rank: 1 });
        let w = BracketWord::vacuum(vec![Factor::unit(1, 0, 1)]);
        let s = fs.build_square_state(&w).unwrap();
        assert_eq!(s.len(), 1);
        let w = BracketWord::vacuum(vec![Factor::unit(1, 0, 2)]);
        let s = fs.build_square_state(&w).unwrap();
        let k1 = FockBasisKey { modes: vec![(1, 0)], alpha: LatticeVector::zero(1) };
        let k2 = FockBasisKey { modes: vec![(2, 0)], alpha: LatticeVector::zero(1) };
        assert_eq!(s.coeff(&k2), q(1));
        assert_eq!(s.coeff(&k1), crate::fockoracle::transport::transport_coeff(-2, -1));
    }
}
