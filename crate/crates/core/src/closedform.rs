//! Closed-form 1-point functions as sums over involutions, and the state language they
//! consume. The Zhu recursion engine lives in [`recursion`].

use std::fmt;

use num_traits::{One, Zero};

use crate::arith::{format_rational, frac, q, Q};
use crate::combinatorics::{all_involutions, fixed_point_free_involutions, subsets};
use crate::context::{pairing, Algebra, Context};
use crate::error::{Error, Result};
use crate::lattice::{EvenLattice, LatticeVector};
use crate::modforms::{character, eta_quotient, hat_atom, EisensteinId, EisensteinKind, EisensteinPoly};
use crate::qseries::FracQSeries;

pub mod recursion;

/// One square-bracket creation mode `h_v[-n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub vector: Vec<Q>,
    pub n: u32,
}

impl Factor {
    pub fn new(vector: Vec<Q>, n: u32) -> Self {
        Factor { vector, n }
    }

    /// `h_i[-n]` for the i-th coordinate vector (0-based).
    pub fn unit(rank: usize, color: usize, n: u32) -> Self {
        let mut v = vec![Q::zero(); rank];
        v[color] = Q::one();
        Factor { vector: v, n }
    }
}

/// What the creation modes act on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tail {
    Vacuum,
    /// `e^a + e^{-a}`
    F(LatticeVector),
    /// `e^a - e^{-a}`
    G(LatticeVector),
    /// `e^a`
    E(LatticeVector),
}

impl Tail {
    pub fn alpha(&self) -> Option<&LatticeVector> {
        match self {
            Tail::Vacuum => None,
            Tail::F(a) | Tail::G(a) | Tail::E(a) => Some(a),
        }
    }

    /// `f <-> g`, the effect of a zero mode `h(0)` up to the scalar `(h, a)`.
    pub fn flipped(&self) -> Tail {
        match self {
            Tail::F(a) => Tail::G(a.clone()),
            Tail::G(a) => Tail::F(a.clone()),
            t => t.clone(),
        }
    }
}

/// `h_{v_1}[-n_1] ... h_{v_p}[-n_p]` applied to a tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketWord {
    pub factors: Vec<Factor>,
    pub tail: Tail,
}

impl BracketWord {
    pub fn new(factors: Vec<Factor>, tail: Tail) -> Self {
        BracketWord { factors, tail }
    }

    pub fn vacuum(factors: Vec<Factor>) -> Self {
        BracketWord { factors, tail: Tail::Vacuum }
    }

    /// Word of unit-vector factors given as `(color, n)` with 0-based colors.
    pub fn from_colors(rank: usize, spec: &[(usize, u32)], tail: Tail) -> Self {
        BracketWord { factors: spec.iter().map(|&(c, n)| Factor::unit(rank, c, n)).collect(), tail }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// `sum n_j`, the square-bracket weight of the Heisenberg part.
    pub fn weight(&self) -> u32 {
        self.factors.iter().map(|f| f.n).sum()
    }

    pub fn ns(&self) -> Vec<u32> {
        self.factors.iter().map(|f| f.n).collect()
    }

    /// Checks dimensions, `n >= 1` and a nonzero lattice label on f/g tails.
    pub fn validate(&self, rank: usize) -> Result<()> {
        for f in &self.factors {
            if f.vector.len() != rank {
                return Err(Error::DimensionMismatch { expected: rank, found: f.vector.len() });
            }
            if f.n == 0 {
                return Err(Error::InvalidState("mode index n must be at least 1".into()));
            }
        }
        if let Some(a) = self.tail.alpha() {
            if a.0.len() != rank {
                return Err(Error::DimensionMismatch { expected: rank, found: a.0.len() });
            }
            if a.is_zero() && !matches!(self.tail, Tail::E(_)) {
                return Err(Error::InvalidState("f/g tails need a nonzero lattice vector".into()));
            }
        }
        Ok(())
    }

    /// Same factors with the tail replaced.
    pub fn with_tail(&self, tail: Tail) -> Self {
        BracketWord { factors: self.factors.clone(), tail }
    }

    /// Scales the vector in slot `j`.
    pub fn scale_slot(&self, j: usize, c: &Q) -> Self {
        let mut w = self.clone();
        for x in w.factors[j].vector.iter_mut() {
            *x *= c;
        }
        w
    }
}

impl fmt::Display for BracketWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .factors
            .iter()
            .map(|x| {
                let v: Vec<String> = x.vector.iter().map(format_rational).collect();
                format!("h({})[-{}]", v.join(","), x.n)
            })
            .collect();
        match &self.tail {
            Tail::Vacuum => {}
            Tail::F(a) => parts.push(format!("| f{a}")),
            Tail::G(a) => parts.push(format!("| g{a}")),
            Tail::E(a) => parts.push(format!("| e{a}")),
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

/// Pairings `(v_i, v_j)` of all factor vectors under `gram`.
pub(crate) fn pair_matrix(word: &BracketWord, gram: &[Vec<Q>]) -> Result<Vec<Vec<Q>>> {
    let p = word.len();
    let mut m = vec![vec![Q::zero(); p]; p];
    for i in 0..p {
        for j in i..p {
            let x = pairing(&word.factors[i].vector, &word.factors[j].vector, gram)?;
            m[i][j] = x.clone();
            m[j][i] = x;
        }
    }
    Ok(m)
}

/// `sum_{sigma in Inv_0(indices)} prod_{(rs)} (v_r, v_s) Hat_{n_r + n_s}`.
fn matching_sum(kind: EisensteinKind, indices: &[usize], pairs: &[Vec<Q>], ns: &[u32]) -> EisensteinPoly {
    let mut out = EisensteinPoly::zero();
    'sigma: for sigma in fixed_point_free_involutions(indices) {
        let mut c = Q::one();
        let mut ids = Vec::with_capacity(sigma.pairs.len());
        for &(r, s) in &sigma.pairs {
            let Some((h, id)) = hat_atom(kind, ns[r], ns[s]) else { continue 'sigma };
            if pairs[r][s].is_zero() {
                continue 'sigma;
            }
            c *= &pairs[r][s] * h;
            ids.push(id);
        }
        out.add_term(ids, c);
    }
    out
}

fn require_vacuum(word: &BracketWord) -> Result<()> {
    match word.tail {
        Tail::Vacuum => Ok(()),
        _ => Err(Error::UnsupportedTail("this trace needs a vacuum tail".into())),
    }
}

fn all_indices(word: &BracketWord) -> Vec<usize> {
    (0..word.len()).collect()
}

/// Heisenberg trace: `[sum_{Inv_0} prod (v_r,v_s) Ehat] Z_M`.
pub fn trace_m(word: &BracketWord, ctx: &Context, order: usize) -> Result<FracQSeries> {
    require_vacuum(word)?;
    word.validate(ctx.rank())?;
    let pairs = pair_matrix(word, &ctx.gram())?;
    let poly = matching_sum(EisensteinKind::Ehat, &all_indices(word), &pairs, &word.ns());
    Ok(poly.eval(order).mul(&character(Algebra::M, ctx, order)?))
}

/// The even-parity pieces `(P_F, P_E)` of the fixed-point trace on `M+`.
fn mplus_polys(word: &BracketWord, ctx: &Context) -> Result<(EisensteinPoly, EisensteinPoly)> {
    let pairs = pair_matrix(word, &ctx.gram())?;
    let idx = all_indices(word);
    let ns = word.ns();
    Ok((matching_sum(EisensteinKind::Fhat, &idx, &pairs, &ns), matching_sum(EisensteinKind::Ehat, &idx, &pairs, &ns)))
}

/// `[sum prod Fhat] Z_{M+} + 1/2 [sum prod Ehat - sum prod Fhat] Z_M`.
pub fn trace_mplus(word: &BracketWord, ctx: &Context, order: usize) -> Result<FracQSeries> {
    require_vacuum(word)?;
    word.validate(ctx.rank())?;
    if word.len() % 2 == 1 {
        return Err(Error::NotInMPlus);
    }
    let (pf, pe) = mplus_polys(word, ctx)?;
    let zplus = character(Algebra::MPlus, ctx, order)?;
    let zm = character(Algebra::M, ctx, order)?;
    let half = pe.sub(&pf).scale(&frac(1, 2));
    Ok(pf.eval(order).mul(&zplus).add(&half.eval(order).mul(&zm)))
}

/// Trace over the odd part `M-`: `[sum prod Fhat] Z_{M-} + 1/2 [sum prod Ehat - sum prod Fhat] Z_M`,
/// the complement of [`trace_mplus`] in [`trace_m`].
pub fn trace_mminus(word: &BracketWord, ctx: &Context, order: usize) -> Result<FracQSeries> {
    require_vacuum(word)?;
    word.validate(ctx.rank())?;
    if word.len() % 2 == 1 {
        return Err(Error::NotInMPlus);
    }
    let (pf, pe) = mplus_polys(word, ctx)?;
    let zminus = character(Algebra::MMinus, ctx, order)?;
    let zm = character(Algebra::M, ctx, order)?;
    let half = pe.sub(&pf).scale(&frac(1, 2));
    Ok(pf.eval(order).mul(&zminus).add(&half.eval(order).mul(&zm)))
}

/// `Lambda = {j : n_j = 1}`.
fn lambda_set(word: &BracketWord) -> Vec<usize> {
    (0..word.len()).filter(|&j| word.factors[j].n == 1).collect()
}

fn complement(p: usize, delta: &[usize]) -> Vec<usize> {
    (0..p).filter(|j| !delta.contains(j)).collect()
}

/// `P_Delta(a) = prod_{j in Delta} (v_j, a)`.
fn p_delta(l: &EvenLattice, word: &BracketWord, delta: &[usize], a: &LatticeVector) -> Q {
    delta.iter().map(|&j| l.pair_rational(&word.factors[j].vector, a)).product()
}

/// Trace on the module `M (x) e^a`:
/// `sum_{Delta in Lambda} P_Delta(a) q^{(a,a)/2} / eta^k * sum_{Inv_0(rest)} prod Ehat`.
pub fn trace_module_n(word: &BracketWord, l: &EvenLattice, alpha: &LatticeVector, order: usize) -> Result<FracQSeries> {
    require_vacuum(word)?;
    word.validate(l.rank())?;
    let pairs = pair_matrix(word, &l.gram_q())?;
    let ns = word.ns();
    let mut poly = EisensteinPoly::zero();
    for delta in subsets(&lambda_set(word)) {
        let w = p_delta(l, word, &delta, alpha);
        if w.is_zero() {
            continue;
        }
        let rest = complement(word.len(), &delta);
        poly = poly.add(&matching_sum(EisensteinKind::Ehat, &rest, &pairs, &ns).scale(&w));
    }
    let k = l.rank() as i64;
    let eta_inv = eta_quotient(&[(1, -k)], order)?;
    let shift = q(l.norm(alpha)) / q(2);
    Ok(poly.eval(order).mul(&eta_inv).shift(&shift))
}

/// `sum_{Delta in Lambda} theta_L(P_Delta) / eta^k * sum_{Inv_0(rest)} prod Ehat`.
pub fn trace_vl(word: &BracketWord, l: &EvenLattice, order: usize) -> Result<FracQSeries> {
    require_vacuum(word)?;
    word.validate(l.rank())?;
    let pairs = pair_matrix(word, &l.gram_q())?;
    let ns = word.ns();
    let k = l.rank() as i64;
    let eta_inv = eta_quotient(&[(1, -k)], order)?;
    let mut acc = FracQSeries::zero();
    for delta in subsets(&lambda_set(word)) {
        if delta.len() % 2 == 1 {
            continue; // odd weight functions sum to zero over +-a
        }
        let rest = complement(word.len(), &delta);
        let poly = matching_sum(EisensteinKind::Ehat, &rest, &pairs, &ns);
        if poly.is_zero() {
            continue;
        }
        let th = l.theta_weighted(|a| p_delta(l, word, &delta, a), order);
        acc = acc.add(&th.mul(&poly.eval(order)));
    }
    if acc.is_exact_zero() {
        acc = FracQSeries::zero_to(q(order as i64));
    }
    Ok(acc.mul(&eta_inv))
}

/// The modular combination `G(u, tau)` paired with `Z_{V_L+}` in the fixed-point trace.
///
/// As a q-series it coincides with [`trace_vl`]; it is exposed separately because the
/// modularity checks treat it as the weight-`sum n_j` object.
pub fn g_series(word: &BracketWord, l: &EvenLattice, order: usize) -> Result<FracQSeries> {
    trace_vl(word, l, order)
}

/// `u in M+`: `[sum prod Fhat](Z_{V_L+} - Z_{V_L}/2) + G(u)/2`.
pub fn trace_vlplus_m(word: &BracketWord, l: &EvenLattice, order: usize) -> Result<FracQSeries> {
    require_vacuum(word)?;
    word.validate(l.rank())?;
    if word.len() % 2 == 1 {
        return Err(Error::NotInVLPlusFamily);
    }
    let ctx = Context::Lattice(l.clone());
    let pairs = pair_matrix(word, &l.gram_q())?;
    let pf = matching_sum(EisensteinKind::Fhat, &all_indices(word), &pairs, &word.ns());
    let zplus = character(Algebra::VLPlus, &ctx, order)?;
    let zvl = character(Algebra::VL, &ctx, order)?;
    let bracket = zplus.sub(&zvl.scale(&frac(1, 2)));
    let g = g_series(word, l, order)?;
    Ok(pf.eval(order).mul(&bracket).add(&g.scale(&frac(1, 2))))
}

/// Trace of `o(f_a)` over `V_L+`: `eta(2 tau)^{2(a,a)-k} / eta(tau)^{(a,a)-k}` for
/// `a in 2L`, zero otherwise, and `2 Z_{V_L+}` for `a = 0`.
pub fn falpha_trace(l: &EvenLattice, alpha: &LatticeVector, order: usize) -> Result<FracQSeries> {
    if alpha.is_zero() {
        return Ok(character(Algebra::VLPlus, &Context::Lattice(l.clone()), order)?.scale(&q(2)));
    }
    if !alpha.in_double() {
        return Ok(FracQSeries::zero_to(q(order as i64)));
    }
    let n = l.norm(alpha);
    let k = l.rank() as i64;
    eta_quotient(&[(2, 2 * n - k), (1, k - n)], order)
}

/// Lattice tail on `V_L+`: `[sum_{Inv} prod_{(t)} -(v_t,a) F_{n_t} prod_{(rs)} (v_r,v_s) Fhat]
/// * Tr o(f_a)`. Needs `f` with even `p` or `g` with odd `p`, and `a != 0`.
pub fn trace_vlplus_lattice_tail(word: &BracketWord, l: &EvenLattice, order: usize) -> Result<FracQSeries> {
    word.validate(l.rank())?;
    let alpha = match (&word.tail, word.len() % 2) {
        (Tail::F(a), 0) | (Tail::G(a), 1) if !a.is_zero() => a,
        _ => return Err(Error::NotInVLPlusFamily),
    };
    let poly = lattice_tail_poly(word, l, alpha)?;
    Ok(poly.eval(order).mul(&falpha_trace(l, alpha, order)?))
}

fn lattice_tail_poly(word: &BracketWord, l: &EvenLattice, alpha: &LatticeVector) -> Result<EisensteinPoly> {
    let pairs = pair_matrix(word, &l.gram_q())?;
    let ns = word.ns();
    let va: Vec<Q> = word.factors.iter().map(|f| l.pair_rational(&f.vector, alpha)).collect();
    let mut out = EisensteinPoly::zero();
    'sigma: for sigma in all_involutions(&all_indices(word)) {
        let mut c = Q::one();
        let mut ids = Vec::new();
        for &t in &sigma.fixed {
            if ns[t] % 2 == 1 || va[t].is_zero() {
                continue 'sigma;
            }
            c *= -&va[t];
            ids.push(EisensteinId::F(ns[t]));
        }
        for &(r, s) in &sigma.pairs {
            let Some((h, id)) = hat_atom(EisensteinKind::Fhat, ns[r], ns[s]) else { continue 'sigma };
            if pairs[r][s].is_zero() {
                continue 'sigma;
            }
            c *= &pairs[r][s] * h;
            ids.push(id);
        }
        out.add_term(ids, c);
    }
    Ok(out)
}

/// Dispatches a closed-form trace by algebra and tail.
pub fn trace(algebra: Algebra, word: &BracketWord, ctx: &Context, order: usize) -> Result<FracQSeries> {
    word.validate(ctx.rank())?;
    if matches!(&word.tail, Tail::E(a) if a.is_zero()) {
        return trace(algebra, &word.with_tail(Tail::Vacuum), ctx, order);
    }
    match algebra {
        Algebra::M => trace_m(word, ctx, order),
        Algebra::MPlus => trace_mplus(word, ctx, order),
        Algebra::MMinus => trace_mminus(word, ctx, order),
        Algebra::VL => {
            let l = ctx.require_lattice()?;
            match &word.tail {
                Tail::Vacuum => trace_vl(word, l, order),
                // a nonzero lattice label shifts the sector, so the zero mode is traceless
                _ => Ok(FracQSeries::zero_to(q(order as i64) - q(l.rank() as i64) / q(24))),
            }
        }
        Algebra::VLPlus => {
            let l = ctx.require_lattice()?;
            match &word.tail {
                Tail::Vacuum => trace_vlplus_m(word, l, order),
                Tail::E(_) => Err(Error::NotInVLPlusFamily),
                _ => trace_vlplus_lattice_tail(word, l, order),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::{eisenstein_e, eisenstein_f, eta};

    fn h1() -> Context {
        Context::Heisenberg { rank: 1 }
    }

    #[test]
    fn heisenberg_worked_values() {
        let o = 12;
        let zm = character(Algebra::M, &h1(), o).unwrap();
        assert_eq!(trace_m(&BracketWord::vacuum(vec![]), &h1(), o).unwrap(), zm);
        let w = BracketWord::from_colors(1, &[(0, 1), (0, 1)], Tail::Vacuum);
        assert_eq!(trace_m(&w, &h1(), o).unwrap(), eisenstein_e(2, o).mul(&eta(o).inv().unwrap()));
        let w = BracketWord::from_colors(1, &[(0, 1), (0, 3)], Tail::Vacuum);
        assert_eq!(trace_m(&w, &h1(), o).unwrap(), eisenstein_e(4, o).scale(&q(3)).mul(&zm));
        let odd = BracketWord::from_colors(1, &[(0, 1), (0, 2)], Tail::Vacuum);
        assert!(trace_m(&odd, &h1(), o).unwrap().is_zero());
    }

    #[test]
    fn mplus_worked_values() {
        let o = 12;
        let ctx = h1();
        let zp = character(Algebra::MPlus, &ctx, o).unwrap();
        let zm = character(Algebra::M, &ctx, o).unwrap();
        assert_eq!(trace_mplus(&BracketWord::vacuum(vec![]), &ctx, o).unwrap(), zp);
        let w = BracketWord::from_colors(1, &[(0, 1), (0, 1)], Tail::Vacuum);
        let (e2, f2) = (eisenstein_e(2, o), eisenstein_f(2, o));
        let expect = f2.mul(&zp).add(&e2.sub(&f2).scale(&frac(1, 2)).mul(&zm));
        assert_eq!(trace_mplus(&w, &ctx, o).unwrap(), expect);
        let single = BracketWord::from_colors(1, &[(0, 1)], Tail::Vacuum);
        assert_eq!(trace_mplus(&single, &ctx, o).unwrap_err(), Error::NotInMPlus);
        let two = Context::Heisenberg { rank: 2 };
        let w = BracketWord::from_colors(2, &[(0, 1), (1, 1)], Tail::Vacuum);
        assert!(trace_mplus(&w, &two, o).unwrap().is_zero());
        let w = BracketWord::from_colors(1, &[(0, 2), (0, 2)], Tail::Vacuum);
        let sum = trace_mplus(&w, &ctx, o).unwrap().add(&trace_mminus(&w, &ctx, o).unwrap());
        assert_eq!(sum, trace_m(&w, &ctx, o).unwrap());
    }

    #[test]
    fn module_and_lattice_small_cases() {
        let l = EvenLattice::a1();
        let o = 10;
        let a = LatticeVector(vec![1]);
        let w = BracketWord::from_colors(1, &[(0, 1)], Tail::Vacuum);
        let expect = eta(o).inv().unwrap().shift(&q(1)).scale(&q(2));
        assert_eq!(trace_module_n(&w, &l, &a, o).unwrap(), expect);
        let w2 = BracketWord::from_colors(1, &[(0, 2)], Tail::Vacuum);
        assert!(trace_module_n(&w2, &l, &a, o).unwrap().is_zero());
        let ctx = Context::Lattice(l.clone());
        assert_eq!(trace_vl(&BracketWord::vacuum(vec![]), &l, o).unwrap(), character(Algebra::VL, &ctx, o).unwrap());
        assert_eq!(
            trace_vlplus_m(&BracketWord::vacuum(vec![]), &l, o).unwrap(),
            character(Algebra::VLPlus, &ctx, o).unwrap()
        );
    }

    #[test]
    fn falpha_values() {
        let l = EvenLattice::a1();
        let o = 10;
        assert!(falpha_trace(&l, &LatticeVector(vec![1]), o).unwrap().is_zero());
        let two = falpha_trace(&l, &LatticeVector(vec![2]), o).unwrap();
        let expect = eta(o).rescale(2).truncate(o).pow(15).unwrap().mul(&eta(o).pow(-7).unwrap());
        assert_eq!(two, expect);
    }

    #[test]
    fn lattice_tail_single_fixed_point() {
        let l = EvenLattice::a1();
        let o = 10;
        let a = LatticeVector(vec![2]);
        for n in 1..=4u32 {
            let w = BracketWord::from_colors(1, &[(0, n)], Tail::G(a.clone()));
            let got = trace_vlplus_lattice_tail(&w, &l, o).unwrap();
            if n % 2 == 1 {
                assert!(got.is_zero());
                continue;
            }
            let expect = eisenstein_f(n, o).scale(&q(-4)).mul(&falpha_trace(&l, &a, o).unwrap());
            assert_eq!(got, expect);
        }
        let bad = BracketWord::from_colors(1, &[(0, 1)], Tail::F(a));
        assert_eq!(trace_vlplus_lattice_tail(&bad, &l, o).unwrap_err(), Error::NotInVLPlusFamily);
    }
}
