//! Monomial bases of `M`, `V_L` and their fixed-point subspaces, counted or materialised.

use num_traits::Zero;

use super::fock::{FockBasisKey, FockSpace, FockVector};
use crate::arith::{q, Q};
use crate::context::{Algebra, Context};
use crate::error::{Error, Result};
use crate::lattice::LatticeVector;
use crate::qseries::FracQSeries;

/// Number of `k`-colored partitions by weight `< order` and by number of parts mod 2.
///
/// Walks every basis monomial once without storing it.
pub fn count_oscillator_states(k: usize, order: usize) -> [Vec<u64>; 2] {
    fn rec(k: usize, max_slot: usize, rem: usize, w: usize, parity: usize, out: &mut [Vec<u64>; 2]) {
        out[parity][w] += 1;
        for s in 0..=max_slot {
            let n = s / k + 1;
            if n > rem {
                break;
            }
            rec(k, s, rem - n, w + n, parity ^ 1, out);
        }
    }
    let mut out = [vec![0u64; order], vec![0u64; order]];
    if order == 0 {
        return out;
    }
    if k == 0 {
        out[0][0] = 1;
        return out;
    }
    let max_w = order - 1;
    rec(k, k * max_w - 1, max_w, 0, 0, &mut out);
    out
}

/// `dim V_w` for `w < order`, by basis enumeration.
pub fn graded_dimensions(algebra: Algebra, ctx: &Context, order: usize) -> Result<Vec<u64>> {
    let k = ctx.rank();
    let [even, odd] = count_oscillator_states(k, order);
    let total: Vec<u64> = even.iter().zip(&odd).map(|(a, b)| a + b).collect();
    Ok(match algebra {
        Algebra::M => total,
        Algebra::MPlus => even,
        Algebra::MMinus => odd,
        Algebra::VL | Algebra::VLPlus => {
            let l = ctx.require_lattice()?;
            let mut out = vec![0u64; order];
            for a in l.vectors_below_order(order) {
                if algebra == Algebra::VLPlus && a.is_zero() {
                    continue;
                }
                let s = (l.norm(&a) / 2) as usize;
                for w in s..order {
                    out[w] += total[w - s];
                }
            }
            if algebra == Algebra::VLPlus {
                // one state per pair {a, -a}, plus the even part of alpha = 0
                for (w, x) in out.iter_mut().enumerate() {
                    *x = *x / 2 + even[w];
                }
            }
            out
        }
    })
}

/// Graded dimensions as the series `q^{-k/24} sum_w dim V_w q^w`.
pub fn graded_dimension_series(algebra: Algebra, ctx: &Context, order: usize) -> Result<FracQSeries> {
    let d = graded_dimensions(algebra, ctx, order)?;
    let k = ctx.rank() as i64;
    Ok(FracQSeries::new(-q(k) / q(24), d.into_iter().map(|x| q(x as i64)).collect()))
}

/// All oscillator monomials of weight `<= max_w` in `k` colors.
pub fn oscillator_keys(k: usize, max_w: usize) -> Vec<Vec<(u32, u8)>> {
    fn rec(k: usize, max_slot: usize, rem: usize, cur: &mut Vec<(u32, u8)>, out: &mut Vec<Vec<(u32, u8)>>) {
        let mut sorted = cur.clone();
        sorted.sort_unstable();
        out.push(sorted);
        for s in 0..=max_slot {
            let n = s / k + 1;
            if n > rem {
                break;
            }
            cur.push((n as u32, (s % k) as u8));
            rec(k, s, rem - n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k == 0 || max_w == 0 {
        out.push(Vec::new());
        return out;
    }
    rec(k, k * max_w - 1, max_w, &mut Vec::new(), &mut out);
    out
}

/// A basis vector together with the key whose coefficient reads off matrix entries.
#[derive(Clone, Debug)]
pub struct LeadedVector {
    pub lead: FockBasisKey,
    pub vector: FockVector,
    pub weight: u64,
}

/// Basis of the weight `< order` part of `algebra`; for `V_L+` the vectors are
/// `x (x) e^a + (-1)^{|x|} x (x) e^{-a}` for one `a` in each pair.
pub fn symmetrized_basis(fs: &FockSpace, algebra: Algebra, order: usize) -> Result<Vec<LeadedVector>> {
    let k = fs.rank();
    if order == 0 {
        return Ok(Vec::new());
    }
    let sectors: Vec<LatticeVector> = match algebra {
        Algebra::M | Algebra::MPlus | Algebra::MMinus => vec![LatticeVector::zero(k)],
        Algebra::VL => fs.context().require_lattice()?.vectors_below_order(order),
        Algebra::VLPlus => {
            let l = fs.context().require_lattice()?;
            l.vectors_below_order(order).into_iter().filter(|a| a.is_zero() || *a > a.neg()).collect()
        }
    };
    let mut out = Vec::new();
    for a in sectors {
        let s = fs.lattice_weight(&a);
        if s as usize >= order {
            continue;
        }
        for modes in oscillator_keys(k, order - 1 - s as usize) {
            let parity = modes.len() % 2;
            let lead = FockBasisKey { modes: modes.clone(), alpha: a.clone() };
            let keep = match algebra {
                Algebra::MPlus => parity == 0,
                Algebra::MMinus => parity == 1,
                Algebra::VLPlus if a.is_zero() => parity == 0,
                _ => true,
            };
            if !keep {
                continue;
            }
            let mut vector = FockVector::basis(lead.clone());
            if algebra == Algebra::VLPlus && !a.is_zero() {
                let sign = if parity == 0 { q(1) } else { q(-1) };
                vector.add_term(FockBasisKey { modes, alpha: a.neg() }, sign);
            }
            let weight = fs.weight(&lead);
            out.push(LeadedVector { lead, vector, weight });
        }
    }
    Ok(out)
}

/// `Tr o(u) q^{L(0) - c/24}` by applying `o(u)` to every basis vector.
pub fn literal_trace(fs: &FockSpace, algebra: Algebra, u: &FockVector, order: usize) -> Result<FracQSeries> {
    if algebra.needs_lattice() {
        fs.context().require_lattice()?;
    } else if u.iter().any(|(k, _)| !k.alpha.is_zero()) {
        return Err(Error::UnsupportedTail("lattice tails need a lattice algebra".into()));
    }
    let mut coeffs = vec![Q::zero(); order];
    for b in symmetrized_basis(fs, algebra, order)? {
        let mut entry = Q::zero();
        for (w, a) in u.iter() {
            for (x, c) in b.vector.iter() {
                entry += fs.zero_mode_entry(w, x, &b.lead) * a * c;
            }
        }
        coeffs[b.weight as usize] += entry;
    }
    Ok(FracQSeries::new(-q(fs.rank() as i64) / q(24), coeffs))
}

/// `o(u)` on the weight-`w` part, as a matrix in the basis of [`symmetrized_basis`].
pub fn zero_mode_matrix(fs: &FockSpace, algebra: Algebra, u: &FockVector, w: u64) -> Result<Vec<Vec<Q>>> {
    let basis: Vec<LeadedVector> =
        symmetrized_basis(fs, algebra, w as usize + 1)?.into_iter().filter(|b| b.weight == w).collect();
    let mut m = vec![vec![Q::zero(); basis.len()]; basis.len()];
    for (j, b) in basis.iter().enumerate() {
        let y = fs.zero_mode(u, &b.vector);
        for (i, r) in basis.iter().enumerate() {
            m[i][j] = y.coeff(&r.lead);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::EvenLattice;

    #[test]
    fn rank_two_counts() {
        let [e, o] = count_oscillator_states(2, 6);
        let tot: Vec<u64> = e.iter().zip(&o).map(|(a, b)| a + b).collect();
        assert_eq!(tot, vec![1, 2, 5, 10, 20, 36]);
        assert_eq!(oscillator_keys(2, 5).len(), 74);
    }

    #[test]
    fn a1_fixed_point_dimensions() {
        let ctx = Context::Lattice(EvenLattice::a1());
        // V_{A1}+ has dimensions 1, 1 + 1, ... : weight 1 is spanned by e^a + e^{-a}
        let d = graded_dimensions(Algebra::VLPlus, &ctx, 4).unwrap();
        assert_eq!(d[0], 1);
        assert_eq!(d[1], 1);
        let d = graded_dimensions(Algebra::VL, &ctx, 3).unwrap();
        assert_eq!(d, vec![1, 3, 4]);
    }
}
