//! Graded traces of zero modes of vacuum-tail states, summed literally over the monomial
//! basis of each color's Fock space.
//!
//! In the orthogonal color basis the Fock space is a tensor product and a normally ordered
//! monomial only has diagonal entries when every color separately preserves weight, so the
//! trace is a product of one-color traces. Each one-color trace walks all partitions.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;

use super::fock::{FockSpace, FockVector};
use crate::arith::{binom_i128, q, Q};
use crate::context::{Algebra, Context};
use crate::error::{Error, Result};
use crate::lattice::{pow_q, LatticeVector};
use crate::qseries::FracQSeries;

const OVERFLOW: Error = Error::Overflow("diagonal trace");

/// Partitions of every weight up to `max_w`, as `(part, multiplicity)` lists.
pub fn partitions_upto(max_w: usize) -> Vec<(usize, Vec<(u32, u32)>)> {
    fn rec(rest: usize, largest: u32, cur: &mut Vec<(u32, u32)>, w: usize, out: &mut Vec<(usize, Vec<(u32, u32)>)>) {
        out.push((w, cur.clone()));
        for part in (1..=largest.min(rest as u32)).rev() {
            let max_mult = rest as u32 / part;
            for mult in 1..=max_mult {
                cur.push((part, mult));
                rec(rest - (part * mult) as usize, part - 1, cur, w + (part * mult) as usize, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(max_w, max_w as u32, &mut Vec::new(), 0, &mut out);
    out
}

/// One-color trace of `:prod_t d^{(m_t - 1)} e(z):` restricted to weight-preserving terms,
/// as `terms[z][parity][w]`: the coefficient of `lambda^z N^{(p - z)/2} q^w` over states with
/// the given number of oscillators mod 2.
#[derive(Clone, Debug)]
pub struct ColorTrace {
    pub p: usize,
    pub terms: Vec<[Vec<i128>; 2]>,
}

struct PartitionDp<'a> {
    ms: &'a [(u32, u8)],
    parts: &'a [(u32, u32)],
    memo: HashMap<(usize, Vec<u8>), Vec<i128>>,
}

fn multinomial3(n: u8, a: u8, b: u8) -> Option<i128> {
    let x = binom_i128(n as i64, a as u64)?;
    let y = binom_i128((n - a) as i64, b as u64)?;
    x.checked_mul(y)
}

fn falling(k: u32, r: u32) -> i128 {
    (0..r).map(|i| (k - i) as i128).product()
}

impl PartitionDp<'_> {
    fn run(&mut self, i: usize, rem: Vec<u8>) -> Result<Vec<i128>> {
        if let Some(v) = self.memo.get(&(i, rem.clone())) {
            return Ok(v.clone());
        }
        let p: usize = self.ms.iter().map(|&(_, c)| c as usize).sum();
        let mut out = vec![0i128; p + 1];
        if i == self.parts.len() {
            let z: usize = rem.iter().map(|&r| r as usize).sum();
            let neg: u32 = self.ms.iter().zip(&rem).map(|(&(m, _), &r)| (m - 1) * r as u32).sum();
            out[z] = if neg % 2 == 0 { 1 } else { -1 };
        } else {
            let (a, k) = self.parts[i];
            let mut choice = vec![(0u8, 0u8); self.ms.len()];
            self.choose(0, i, a, k, &rem, &mut choice, &mut out)?;
        }
        self.memo.insert((i, rem), out.clone());
        Ok(out)
    }

    /// Picks how many slots of each distinct `m` annihilate or recreate part `a`.
    #[allow(clippy::too_many_arguments)]
    fn choose(
        &mut self,
        d: usize,
        i: usize,
        a: u32,
        k: u32,
        rem: &[u8],
        choice: &mut Vec<(u8, u8)>,
        out: &mut [i128],
    ) -> Result<()> {
        if d == self.ms.len() {
            let ann: u32 = choice.iter().map(|c| c.0 as u32).sum();
            let cre: u32 = choice.iter().map(|c| c.1 as u32).sum();
            if ann != cre || ann > k {
                return Ok(());
            }
            let mut w: i128 = falling(k, ann);
            for (t, &(m, _)) in self.ms.iter().enumerate() {
                let (al, ga) = choice[t];
                // e(a) carries C(-a-1, m-1) a, e(-a) carries C(a-1, m-1)
                let af = binom_i128(-(a as i64) - 1, (m - 1) as u64)
                    .ok_or(OVERFLOW)?
                    .checked_mul(a as i128)
                    .ok_or(OVERFLOW)?;
                let cf = binom_i128(a as i64 - 1, (m - 1) as u64).ok_or(OVERFLOW)?;
                if ga > 0 && cf == 0 {
                    return Ok(());
                }
                w = w
                    .checked_mul(multinomial3(rem[t], al, ga).ok_or(OVERFLOW)?)
                    .and_then(|x| x.checked_mul(af.checked_pow(al as u32)?))
                    .and_then(|x| x.checked_mul(cf.checked_pow(ga as u32)?))
                    .ok_or(OVERFLOW)?;
            }
            if w == 0 {
                return Ok(());
            }
            let next: Vec<u8> = rem.iter().zip(choice.iter()).map(|(&r, &(al, ga))| r - al - ga).collect();
            let sub = self.run(i + 1, next)?;
            for (o, s) in out.iter_mut().zip(sub) {
                *o = o.checked_add(w.checked_mul(s).ok_or(OVERFLOW)?).ok_or(OVERFLOW)?;
            }
            return Ok(());
        }
        for al in 0..=rem[d] {
            for ga in 0..=rem[d] - al {
                choice[d] = (al, ga);
                self.choose(d + 1, i, a, k, rem, choice, out)?;
            }
        }
        choice[d] = (0, 0);
        Ok(())
    }
}

static CACHE: OnceLock<Mutex<HashMap<(Vec<u32>, usize), Arc<ColorTrace>>>> = OnceLock::new();

/// One-color trace for the slot list `mlist` over all states of weight `< order`.
pub fn color_trace(mlist: &[u32], order: usize) -> Result<Arc<ColorTrace>> {
    let mut sorted = mlist.to_vec();
    sorted.sort_unstable();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&(sorted.clone(), order)) {
        return Ok(t.clone());
    }
    let mut ms: Vec<(u32, u8)> = Vec::new();
    for &m in &sorted {
        match ms.last_mut() {
            Some(last) if last.0 == m => last.1 += 1,
            _ => ms.push((m, 1)),
        }
    }
    let p = sorted.len();
    let mut terms = vec![[vec![0i128; order], vec![0i128; order]]; p + 1];
    if order > 0 {
        for (w, parts) in partitions_upto(order - 1) {
            let mut dp = PartitionDp { ms: &ms, parts: &parts, memo: HashMap::new() };
            let rem: Vec<u8> = ms.iter().map(|&(_, c)| c).collect();
            let vals = dp.run(0, rem)?;
            let parity = (parts.iter().map(|&(_, k)| k).sum::<u32>() % 2) as usize;
            for (z, v) in vals.into_iter().enumerate() {
                let slot = &mut terms[z][parity][w];
                *slot = slot.checked_add(v).ok_or(OVERFLOW)?;
            }
        }
    }
    let t = Arc::new(ColorTrace { p, terms });
    cache.lock().unwrap().insert((sorted, order), t.clone());
    Ok(t)
}

fn mul_i128(a: &[i128], b: &[i128], order: usize) -> Result<Vec<i128>> {
    let mut out = vec![0i128; order];
    for (i, x) in a.iter().enumerate().take(order) {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(order - i) {
            out[i + j] = out[i + j].checked_add(x.checked_mul(*y).ok_or(OVERFLOW)?).ok_or(OVERFLOW)?;
        }
    }
    Ok(out)
}

/// Weight-graded `(even, odd)` traces of `o(u)` per zero-mode profile `z_c`, with the
/// eigenvalues `lambda_c` of `e_c(0)` left symbolic.
#[derive(Clone, Debug, Default)]
pub struct TraceByProfile {
    pub order: usize,
    pub by_profile: BTreeMap<Vec<u32>, [Vec<Q>; 2]>,
}

impl TraceByProfile {
    /// Collects the trace of the zero mode of a vacuum-tail vector.
    pub fn collect(fs: &FockSpace, u: &FockVector, order: usize) -> Result<Self> {
        let k = fs.rank();
        let norms = fs.colors().norms.clone();
        let mut by_profile: BTreeMap<Vec<u32>, [Vec<Q>; 2]> = BTreeMap::new();
        for (key, coeff) in u.iter() {
            if !key.alpha.is_zero() {
                return Err(Error::UnsupportedTail("diagonal traces need a vacuum tail".into()));
            }
            let per_color: Vec<Arc<ColorTrace>> =
                (0..k).map(|c| color_trace(&key.color_modes(c as u8), order)).collect::<Result<_>>()?;
            let mut profile = vec![0u32; k];
            profile_walk(0, &per_color, &norms, coeff, &mut profile, None, order, &mut by_profile)?;
        }
        Ok(TraceByProfile { order, by_profile })
    }

    /// `sum_profile prod_c lambda_c^{z_c} (even, odd)` for fixed eigenvalues.
    pub fn at_lambda(&self, lambda: &[Q]) -> [Vec<Q>; 2] {
        let mut out = [vec![Q::zero(); self.order], vec![Q::zero(); self.order]];
        for (z, pair) in &self.by_profile {
            let w: Q = z.iter().zip(lambda).map(|(&e, l)| pow_q(l, e)).product();
            if w.is_zero() {
                continue;
            }
            for s in 0..2 {
                for (o, x) in out[s].iter_mut().zip(&pair[s]) {
                    *o += x * &w;
                }
            }
        }
        out
    }
}

#[allow(clippy::too_many_arguments)]
fn profile_walk(
    c: usize,
    per_color: &[Arc<ColorTrace>],
    norms: &[Q],
    scalar: &Q,
    profile: &mut Vec<u32>,
    acc: Option<[Vec<i128>; 2]>,
    order: usize,
    out: &mut BTreeMap<Vec<u32>, [Vec<Q>; 2]>,
) -> Result<()> {
    if c == per_color.len() {
        let pair = acc.unwrap_or_else(|| {
            let mut one = vec![0i128; order];
            if order > 0 {
                one[0] = 1;
            }
            [one, vec![0; order]]
        });
        let slot = out.entry(profile.clone()).or_insert_with(|| [vec![Q::zero(); order], vec![Q::zero(); order]]);
        for s in 0..2 {
            for (o, x) in slot[s].iter_mut().zip(&pair[s]) {
                if *x != 0 {
                    *o += scalar * q_from_i128(*x);
                }
            }
        }
        return Ok(());
    }
    let t = &per_color[c];
    for (z, pair) in t.terms.iter().enumerate() {
        if (t.p - z) % 2 == 1 || pair.iter().all(|v| v.iter().all(|&x| x == 0)) {
            continue;
        }
        let s = scalar * pow_q(&norms[c], ((t.p - z) / 2) as u32);
        let next = match &acc {
            None => pair.clone(),
            Some([e, o]) => {
                let ee = mul_i128(e, &pair[0], order)?;
                let oo = mul_i128(o, &pair[1], order)?;
                let eo = mul_i128(e, &pair[1], order)?;
                let oe = mul_i128(o, &pair[0], order)?;
                let even = ee.iter().zip(&oo).map(|(a, b)| a.checked_add(*b).ok_or(OVERFLOW)).collect::<Result<_>>()?;
                let odd = eo.iter().zip(&oe).map(|(a, b)| a.checked_add(*b).ok_or(OVERFLOW)).collect::<Result<_>>()?;
                [even, odd]
            }
        };
        profile[c] = z as u32;
        profile_walk(c + 1, per_color, norms, &s, profile, Some(next), order, out)?;
    }
    profile[c] = 0;
    Ok(())
}

fn q_from_i128(x: i128) -> Q {
    Q::from_integer(x.into())
}

fn vacuum_shift(k: usize) -> Q {
    -q(k as i64) / q(24)
}

fn series(coeffs: Vec<Q>, shift: Q, k: usize) -> FracQSeries {
    FracQSeries::new(vacuum_shift(k) + shift, coeffs)
}

fn add_vec(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `sum_a prod_c lambda_c(a)^{z_c} q^{(a,a)/2}` convolved with each profile's series.
fn lattice_sum(fs: &FockSpace, t: &TraceByProfile, order: usize) -> Result<Vec<Q>> {
    let l = fs.context().require_lattice()?;
    let mut out = vec![Q::zero(); order];
    let vectors = l.vectors_below_order(order);
    let lambdas: Vec<(usize, Vec<Q>)> =
        vectors.iter().map(|a| ((l.norm(a) / 2) as usize, (0..fs.rank()).map(|c| fs.lambda(c, a)).collect())).collect();
    for (z, pair) in &t.by_profile {
        let full = add_vec(&pair[0], &pair[1]);
        if full.iter().all(|x| x.is_zero()) {
            continue;
        }
        let mut theta = vec![Q::zero(); order];
        for (shift, lam) in &lambdas {
            let w: Q = z.iter().zip(lam).map(|(&e, x)| pow_q(x, e)).product();
            theta[*shift] += w;
        }
        for (i, x) in theta.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in full.iter().enumerate().take(order - i) {
                out[i + j] += x * y;
            }
        }
    }
    Ok(out)
}

/// Trace of `o(u)` for a vacuum-tail `u` over `M`, `M+-`, `V_L` or `V_L+`.
pub fn vacuum_tail_trace(fs: &FockSpace, algebra: Algebra, u: &FockVector, order: usize) -> Result<FracQSeries> {
    let k = fs.rank();
    let t = TraceByProfile::collect(fs, u, order)?;
    let at0 = t.at_lambda(&vec![Q::zero(); k]);
    let out = match algebra {
        Algebra::M => series(add_vec(&at0[0], &at0[1]), Q::zero(), k),
        Algebra::MPlus => series(at0[0].clone(), Q::zero(), k),
        Algebra::MMinus => series(at0[1].clone(), Q::zero(), k),
        Algebra::VL => series(lattice_sum(fs, &t, order)?, Q::zero(), k),
        Algebra::VLPlus => {
            // alpha = 0 keeps its even part; each pair {a, -a} contributes one copy of M (x) e^a
            let full = lattice_sum(fs, &t, order)?;
            let half = Q::new(1.into(), 2.into());
            let c: Vec<Q> =
                full.iter().zip(at0[0].iter().zip(&at0[1])).map(|(f, (e, o))| (f + e - o) * &half).collect();
            series(c, Q::zero(), k)
        }
    };
    Ok(out)
}

/// Trace of `o(u)` over the single sector `M (x) e^alpha`.
pub fn module_trace(fs: &FockSpace, u: &FockVector, alpha: &LatticeVector, order: usize) -> Result<FracQSeries> {
    Ok(module_traces(fs, u, std::slice::from_ref(alpha), order)?.remove(0))
}

/// [`module_trace`] for several sectors, sharing one collection pass.
pub fn module_traces(
    fs: &FockSpace,
    u: &FockVector,
    alphas: &[LatticeVector],
    order: usize,
) -> Result<Vec<FracQSeries>> {
    let k = fs.rank();
    let l = fs.context().require_lattice()?;
    let t = TraceByProfile::collect(fs, u, order)?;
    let prec = q(order as i64) + vacuum_shift(k);
    Ok(alphas
        .iter()
        .map(|alpha| {
            let lam: Vec<Q> = (0..k).map(|c| fs.lambda(c, alpha)).collect();
            let at = t.at_lambda(&lam);
            series(add_vec(&at[0], &at[1]), q(l.norm(alpha)) / q(2), k).truncate_abs(&prec)
        })
        .collect())
}

/// Whether a context carries the lattice needed by `algebra`.
pub fn check_context(algebra: Algebra, ctx: &Context) -> Result<()> {
    if algebra.needs_lattice() {
        ctx.require_lattice()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts() {
        let ps = partitions_upto(10);
        let mut counts = vec![0; 11];
        for (w, p) in &ps {
            assert_eq!(p.iter().map(|&(a, k)| (a * k) as usize).sum::<usize>(), *w);
            counts[*w] += 1;
        }
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
    }

    #[test]
    fn empty_slot_list_counts_states_by_parity() {
        let t = color_trace(&[], 8).unwrap();
        let even = &t.terms[0][0];
        let odd = &t.terms[0][1];
        let total: Vec<i128> = even.iter().zip(odd).map(|(a, b)| a + b).collect();
        assert_eq!(total, vec![1, 1, 2, 3, 5, 7, 11, 15]);
        // prod 1/(1+q^n) has coefficients even - odd
        let diff: Vec<i128> = even.iter().zip(odd).map(|(a, b)| a - b).collect();
        assert_eq!(diff, vec![1, -1, 0, -1, 1, -1, 1, -1]);
    }

    #[test]
    fn single_slot_is_zero_mode() {
        // o(e(-1)) = e(0): only the lambda term survives
        let t = color_trace(&[1], 6).unwrap();
        assert!(t.terms[1][0].iter().zip(&color_trace(&[], 6).unwrap().terms[0][0]).all(|(a, b)| a == b));
    }
}
