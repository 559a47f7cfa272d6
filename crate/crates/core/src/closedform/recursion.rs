//! Untwisted and twisted Zhu recursion for Heisenberg square-bracket words.
//!
//! The leftmost factor `h_v[-n]` is peeled off. Positive square-bracket modes commute
//! through the remaining factors by `[h_v[m], h_w[-n]] = m delta_{m,n} (v, w)` and kill
//! vacuum and lattice tails, so each step removes either one or two factors.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use super::{pair_matrix, BracketWord, Tail};
use crate::arith::{frac, q, Q};
use crate::context::{Algebra, Context};
use crate::error::{Error, Result};
use crate::lattice::{EvenLattice, LatticeVector};
use crate::modforms::{character, eta_quotient, hat_atom, EisensteinId, EisensteinKind, EisensteinPoly};
use crate::qseries::FracQSeries;

/// Where an untwisted trace is taken.
#[derive(Clone, Copy, Debug)]
pub enum UntwistedTarget<'a> {
    M(&'a Context),
    /// The module `M (x) e^a` of the lattice algebra.
    Module(&'a EvenLattice, &'a LatticeVector),
    VL(&'a EvenLattice),
}

/// Where a twisted (fixed-point) trace is taken.
#[derive(Clone, Copy, Debug)]
pub enum TwistedTarget<'a> {
    MPlus(&'a Context),
    VLPlus(&'a EvenLattice),
}

type Mask = u64;

fn bits(mask: Mask) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

/// The untwisted recursion keeps track of which `n = 1` factors were absorbed by the
/// zero mode `h(0)`: the trace on `M (x) e^a` is
/// `q^{(a,a)/2} / eta^k * sum_Delta prod_{j in Delta} (v_j, a) * poly_Delta`.
struct Untwisted {
    pairs: Vec<Vec<Q>>,
    ns: Vec<u32>,
    memo: HashMap<Mask, BTreeMap<Mask, EisensteinPoly>>,
}

impl Untwisted {
    fn new(word: &BracketWord, gram: &[Vec<Q>]) -> Result<Self> {
        if word.len() >= 64 {
            return Err(Error::Invalid("too many factors".into()));
        }
        Ok(Untwisted { pairs: pair_matrix(word, gram)?, ns: word.ns(), memo: HashMap::new() })
    }

    fn full(&self) -> Mask {
        (1u64 << self.ns.len()) - 1
    }

    fn run(&mut self, mask: Mask) -> BTreeMap<Mask, EisensteinPoly> {
        if let Some(r) = self.memo.get(&mask) {
            return r.clone();
        }
        let mut out: BTreeMap<Mask, EisensteinPoly> = BTreeMap::new();
        if mask == 0 {
            out.insert(0, EisensteinPoly::one());
        } else {
            let i = mask.trailing_zeros() as usize;
            let rest = mask & !(1 << i);
            if self.ns[i] == 1 {
                for (d, p) in self.run(rest) {
                    push(&mut out, d | 1 << i, p);
                }
            }
            for j in bits(rest) {
                let Some((h, id)) = hat_atom(EisensteinKind::Ehat, self.ns[i], self.ns[j]) else { continue };
                if self.pairs[i][j].is_zero() {
                    continue;
                }
                let atom = EisensteinPoly::atom(&self.pairs[i][j] * h, id);
                for (d, p) in self.run(rest & !(1 << j)) {
                    push(&mut out, d, p.mul(&atom));
                }
            }
        }
        self.memo.insert(mask, out.clone());
        out
    }
}

fn push(map: &mut BTreeMap<Mask, EisensteinPoly>, key: Mask, p: EisensteinPoly) {
    let e = map.entry(key).or_default();
    *e = e.add(&p);
}

fn p_delta(l: &EvenLattice, word: &BracketWord, delta: Mask, a: &LatticeVector) -> Q {
    bits(delta).map(|j| l.pair_rational(&word.factors[j].vector, a)).product()
}

fn require_vacuum(word: &BracketWord) -> Result<()> {
    match word.tail {
        Tail::Vacuum => Ok(()),
        _ => Err(Error::UnsupportedTail("the untwisted recursion needs a vacuum tail".into())),
    }
}

/// `sum_Delta theta_L(P_Delta) poly_Delta / eta^k` over a structured recursion result.
fn lattice_sum(
    l: &EvenLattice,
    word: &BracketWord,
    parts: &BTreeMap<Mask, EisensteinPoly>,
    extra: Option<usize>,
    order: usize,
) -> Result<FracQSeries> {
    let k = l.rank() as i64;
    let mut acc = FracQSeries::zero();
    for (d, poly) in parts {
        let delta = d | extra.map_or(0, |e| 1 << e);
        if delta.count_ones() % 2 == 1 || poly.is_zero() {
            continue;
        }
        let th = l.theta_weighted(|a| p_delta(l, word, delta, a), order);
        acc = acc.add(&th.mul(&poly.eval(order)));
    }
    if acc.is_exact_zero() {
        acc = FracQSeries::zero_to(q(order as i64));
    }
    Ok(acc.mul(&eta_quotient(&[(1, -k)], order)?))
}

/// Zhu recursion `Z(h_v[-n] w) = delta_{n,1} Tr o(h_v) o(w) + sum_j (v, v_j) Ehat Z(w without j)`.
pub fn zhu_recurse_untwisted(word: &BracketWord, target: UntwistedTarget<'_>, order: usize) -> Result<FracQSeries> {
    require_vacuum(word)?;
    match target {
        UntwistedTarget::M(ctx) => {
            word.validate(ctx.rank())?;
            let mut eng = Untwisted::new(word, &ctx.gram())?;
            let parts = eng.run(eng.full());
            let poly = parts.get(&0).cloned().unwrap_or_default();
            Ok(poly.eval(order).mul(&character(Algebra::M, ctx, order)?))
        }
        UntwistedTarget::Module(l, a) => {
            word.validate(l.rank())?;
            let mut eng = Untwisted::new(word, &l.gram_q())?;
            let parts = eng.run(eng.full());
            let mut poly = EisensteinPoly::zero();
            for (d, p) in &parts {
                poly = poly.add(&p.scale(&p_delta(l, word, *d, a)));
            }
            let k = l.rank() as i64;
            let shift = q(l.norm(a)) / q(2);
            Ok(poly.eval(order).mul(&eta_quotient(&[(1, -k)], order)?).shift(&shift))
        }
        UntwistedTarget::VL(l) => {
            word.validate(l.rank())?;
            let mut eng = Untwisted::new(word, &l.gram_q())?;
            let parts = eng.run(eng.full());
            lattice_sum(l, word, &parts, None, order)
        }
    }
}

/// Twisted recursion on `M+`: the pair `(A, B)` with `Z_{M+}(u) = A Z_{M+} + B Z_M`.
fn mplus_run(
    mask: Mask,
    pairs: &[Vec<Q>],
    ns: &[u32],
    untw: &mut Untwisted,
    memo: &mut HashMap<Mask, (EisensteinPoly, EisensteinPoly)>,
) -> (EisensteinPoly, EisensteinPoly) {
    if let Some(r) = memo.get(&mask) {
        return r.clone();
    }
    let out = if mask == 0 {
        (EisensteinPoly::one(), EisensteinPoly::zero())
    } else {
        // h(0) vanishes on M, so the mixed n = 1 term drops out.
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let (mut a, mut b) = (EisensteinPoly::zero(), EisensteinPoly::zero());
        for j in bits(rest) {
            if pairs[i][j].is_zero() || (ns[i] + ns[j]) % 2 == 1 {
                continue;
            }
            let sub = rest & !(1 << j);
            let (fh, fid) = hat_atom(EisensteinKind::Fhat, ns[i], ns[j]).unwrap();
            let (eh, eid) = hat_atom(EisensteinKind::Ehat, ns[i], ns[j]).unwrap();
            let fatom = EisensteinPoly::atom(&pairs[i][j] * fh, fid);
            let diff = EisensteinPoly::atom(&pairs[i][j] * eh, eid).sub(&fatom).scale(&frac(1, 2));
            let (sa, sb) = mplus_run(sub, pairs, ns, untw, memo);
            a = a.add(&sa.mul(&fatom));
            b = b.add(&sb.mul(&fatom));
            let zm = untw.run(sub).get(&0).cloned().unwrap_or_default();
            b = b.add(&zm.mul(&diff));
        }
        (a, b)
    };
    memo.insert(mask, out.clone());
    out
}

/// Twisted recursion on `V_L+` with a vacuum tail, memoized by remaining factors.
struct VlPlus<'a> {
    l: &'a EvenLattice,
    word: &'a BracketWord,
    pairs: Vec<Vec<Q>>,
    ns: Vec<u32>,
    untw: Untwisted,
    order: usize,
    memo: HashMap<Mask, FracQSeries>,
    vl_memo: HashMap<Mask, FracQSeries>,
}

impl VlPlus<'_> {
    fn z_vl(&mut self, mask: Mask) -> Result<FracQSeries> {
        if let Some(s) = self.vl_memo.get(&mask) {
            return Ok(s.clone());
        }
        let parts = self.untw.run(mask);
        let s = lattice_sum(self.l, self.word, &parts, None, self.order)?;
        self.vl_memo.insert(mask, s.clone());
        Ok(s)
    }

    fn run(&mut self, mask: Mask) -> Result<FracQSeries> {
        if let Some(s) = self.memo.get(&mask) {
            return Ok(s.clone());
        }
        let ctx = Context::Lattice(self.l.clone());
        let out = if mask == 0 {
            character(Algebra::VLPlus, &ctx, self.order)?
        } else {
            let i = mask.trailing_zeros() as usize;
            let rest = mask & !(1 << i);
            let mut acc = FracQSeries::zero_to(q(self.order as i64) - q(self.l.rank() as i64) / q(24));
            if self.ns[i] == 1 {
                // 1/2 Tr_{V_L} o(h_v) o(rest) = 1/2 sum_a (v, a) Z_{N_a}(rest)
                let parts = self.untw.run(rest);
                let mixed = lattice_sum(self.l, self.word, &parts, Some(i), self.order)?;
                acc = acc.add(&mixed.scale(&frac(1, 2)));
            }
            for j in bits(rest) {
                if self.pairs[i][j].is_zero() || (self.ns[i] + self.ns[j]) % 2 == 1 {
                    continue;
                }
                let sub = rest & !(1 << j);
                let (fh, fid) = hat_atom(EisensteinKind::Fhat, self.ns[i], self.ns[j]).unwrap();
                let (eh, eid) = hat_atom(EisensteinKind::Ehat, self.ns[i], self.ns[j]).unwrap();
                let fser = fid.series(self.order).scale(&(&self.pairs[i][j] * &fh));
                let eser = eid.series(self.order).scale(&(&self.pairs[i][j] * &eh));
                let plus = self.run(sub)?;
                let full = self.z_vl(sub)?;
                acc = acc.add(&fser.mul(&plus));
                acc = acc.add(&eser.sub(&fser).scale(&frac(1, 2)).mul(&full));
            }
            acc
        };
        self.memo.insert(mask, out.clone());
        Ok(out)
    }
}

/// Lattice-tail recursion: `Z(h_v[-n] w) = sum_j (v,v_j) Fhat Z(w without j) - F_n (v,a) Z(w')`
/// where `w'` has its f/g tail exchanged. Returns the factor multiplying `Tr o(f_a)`.
fn tail_run(
    mask: Mask,
    is_f: bool,
    pairs: &[Vec<Q>],
    ns: &[u32],
    va: &[Q],
    memo: &mut HashMap<(Mask, bool), EisensteinPoly>,
) -> EisensteinPoly {
    if let Some(r) = memo.get(&(mask, is_f)) {
        return r.clone();
    }
    let out = if mask == 0 {
        if is_f {
            EisensteinPoly::one()
        } else {
            EisensteinPoly::zero()
        }
    } else {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut acc = EisensteinPoly::zero();
        if ns[i] % 2 == 0 && !va[i].is_zero() {
            let atom = EisensteinPoly::atom(-&va[i], EisensteinId::F(ns[i]));
            acc = acc.add(&tail_run(rest, !is_f, pairs, ns, va, memo).mul(&atom));
        }
        for j in bits(rest) {
            let Some((h, id)) = hat_atom(EisensteinKind::Fhat, ns[i], ns[j]) else { continue };
            if pairs[i][j].is_zero() {
                continue;
            }
            let atom = EisensteinPoly::atom(&pairs[i][j] * h, id);
            acc = acc.add(&tail_run(rest & !(1 << j), is_f, pairs, ns, va, memo).mul(&atom));
        }
        acc
    };
    memo.insert((mask, is_f), out.clone());
    out
}

/// Twisted Zhu recursion for fixed-point traces, with the `m = 0` term `-F_n Z(u[0] v)`.
pub fn zhu_recurse_twisted(word: &BracketWord, target: TwistedTarget<'_>, order: usize) -> Result<FracQSeries> {
    match target {
        TwistedTarget::MPlus(ctx) => {
            require_vacuum(word)?;
            word.validate(ctx.rank())?;
            if word.len() % 2 == 1 {
                return Err(Error::NotInMPlus);
            }
            let gram = ctx.gram();
            let mut untw = Untwisted::new(word, &gram)?;
            let pairs = pair_matrix(word, &gram)?;
            let full = untw.full();
            let (a, b) = mplus_run(full, &pairs, &word.ns(), &mut untw, &mut HashMap::new());
            let zp = character(Algebra::MPlus, ctx, order)?;
            let zm = character(Algebra::M, ctx, order)?;
            Ok(a.eval(order).mul(&zp).add(&b.eval(order).mul(&zm)))
        }
        TwistedTarget::VLPlus(l) => {
            word.validate(l.rank())?;
            match &word.tail {
                Tail::Vacuum => {
                    if word.len() % 2 == 1 {
                        return Err(Error::NotInVLPlusFamily);
                    }
                    let untw = Untwisted::new(word, &l.gram_q())?;
                    let full = untw.full();
                    let mut eng = VlPlus {
                        l,
                        word,
                        pairs: pair_matrix(word, &l.gram_q())?,
                        ns: word.ns(),
                        untw,
                        order,
                        memo: HashMap::new(),
                        vl_memo: HashMap::new(),
                    };
                    eng.run(full)
                }
                Tail::F(a) | Tail::G(a) => {
                    let is_f = matches!(word.tail, Tail::F(_));
                    if a.is_zero() || (word.len() % 2 == 0) != is_f {
                        return Err(Error::NotInVLPlusFamily);
                    }
                    let pairs = pair_matrix(word, &l.gram_q())?;
                    let va: Vec<Q> = word.factors.iter().map(|f| l.pair_rational(&f.vector, a)).collect();
                    let full = (1u64 << word.len()) - 1;
                    let poly = tail_run(full, is_f, &pairs, &word.ns(), &va, &mut HashMap::new());
                    Ok(poly.eval(order).mul(&super::falpha_trace(l, a, order)?))
                }
                Tail::E(_) => Err(Error::NotInVLPlusFamily),
            }
        }
    }
}

/// Dispatches the recursion engine by algebra and tail.
pub fn recurse(algebra: Algebra, word: &BracketWord, ctx: &Context, order: usize) -> Result<FracQSeries> {
    if matches!(&word.tail, Tail::E(a) if a.is_zero()) {
        return recurse(algebra, &word.with_tail(Tail::Vacuum), ctx, order);
    }
    match algebra {
        Algebra::M => zhu_recurse_untwisted(word, UntwistedTarget::M(ctx), order),
        Algebra::MPlus => zhu_recurse_twisted(word, TwistedTarget::MPlus(ctx), order),
        Algebra::MMinus => {
            let m = zhu_recurse_untwisted(word, UntwistedTarget::M(ctx), order)?;
            Ok(m.sub(&zhu_recurse_twisted(word, TwistedTarget::MPlus(ctx), order)?))
        }
        Algebra::VL => {
            let l = ctx.require_lattice()?;
            match &word.tail {
                Tail::Vacuum => zhu_recurse_untwisted(word, UntwistedTarget::VL(l), order),
                _ => super::trace(Algebra::VL, word, ctx, order),
            }
        }
        Algebra::VLPlus => zhu_recurse_twisted(word, TwistedTarget::VLPlus(ctx.require_lattice()?), order),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::{
        trace_m, trace_module_n, trace_mplus, trace_vl, trace_vlplus_lattice_tail, trace_vlplus_m,
    };

    #[test]
    fn agrees_with_closed_forms_on_small_words() {
        let o = 10;
        let ctx = Context::Heisenberg { rank: 2 };
        for spec in [vec![(0, 1), (0, 1)], vec![(0, 1), (1, 1), (0, 2), (1, 2)], vec![(0, 3), (0, 1), (0, 2), (0, 2)]] {
            let w = BracketWord::from_colors(2, &spec, Tail::Vacuum);
            assert_eq!(zhu_recurse_untwisted(&w, UntwistedTarget::M(&ctx), o).unwrap(), trace_m(&w, &ctx, o).unwrap());
            assert_eq!(
                zhu_recurse_twisted(&w, TwistedTarget::MPlus(&ctx), o).unwrap(),
                trace_mplus(&w, &ctx, o).unwrap()
            );
        }
        let l = EvenLattice::a2();
        let a = LatticeVector(vec![1, -1]);
        for spec in [vec![(0, 1)], vec![(0, 1), (1, 1)], vec![(0, 1), (1, 1), (0, 2), (1, 1)]] {
            let w = BracketWord::from_colors(2, &spec, Tail::Vacuum);
            assert_eq!(
                zhu_recurse_untwisted(&w, UntwistedTarget::Module(&l, &a), o).unwrap(),
                trace_module_n(&w, &l, &a, o).unwrap()
            );
            assert_eq!(zhu_recurse_untwisted(&w, UntwistedTarget::VL(&l), o).unwrap(), trace_vl(&w, &l, o).unwrap());
            if w.len() % 2 == 0 {
                assert_eq!(
                    zhu_recurse_twisted(&w, TwistedTarget::VLPlus(&l), o).unwrap(),
                    trace_vlplus_m(&w, &l, o).unwrap()
                );
            }
        }
        let l = EvenLattice::a1();
        let a = LatticeVector(vec![2]);
        for (spec, f) in [(vec![(0, 2)], false), (vec![(0, 1), (0, 1)], true), (vec![(0, 2), (0, 1), (0, 1)], false)] {
            let tail = if f { Tail::F(a.clone()) } else { Tail::G(a.clone()) };
            let w = BracketWord::from_colors(1, &spec, tail);
            assert_eq!(
                zhu_recurse_twisted(&w, TwistedTarget::VLPlus(&l), o).unwrap(),
                trace_vlplus_lattice_tail(&w, &l, o).unwrap()
            );
        }
    }
}
