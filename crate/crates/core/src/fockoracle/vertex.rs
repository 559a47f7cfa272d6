//! Zero modes `o(w) = w(wt w - 1)` of monomial states, from the normally ordered vertex
//! operator `:prod d^{(m-1)} h(z) Y(e^g, z):` with `Y(e^g, z) = E^-(-g) E^+(-g) e_g z^{g(0)}`.

use num_traits::{One, Zero};

use super::fock::{FockBasisKey, FockSpace, FockVector};
use crate::arith::{binom_i, q, Q};
use crate::lattice::LatticeVector;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Zero,
    Annihilate,
    Create,
}

fn binom_q(top: i64, r: u64) -> Q {
    Q::from_integer(binom_i(top, r))
}

fn restrict(v: FockVector, only: Option<&FockBasisKey>) -> FockVector {
    match only {
        Some(t) => v.filtered(|k| k.divides(t)),
        None => v,
    }
}

impl FockSpace {
    /// `exp(s sum_{n >= 1} g(sign n) / n)`, homogeneous part of degree `d`, applied to `x`.
    fn exp_part(
        &self,
        g: &LatticeVector,
        creating: bool,
        d: u64,
        x: &FockVector,
        only: Option<&FockBasisKey>,
    ) -> FockVector {
        let gq = g.to_q();
        let mut parts = vec![x.clone()];
        for r in 1..=d {
            let mut acc = FockVector::zero();
            for n in 1..=r {
                let mode = if creating { -(n as i64) } else { n as i64 };
                let s = if creating { Q::one() } else { -Q::one() };
                acc.add_scaled(&self.apply_round_mode(&gq, mode, &parts[(r - n) as usize]), &s);
            }
            parts.push(restrict(acc.scale(&Q::new(1.into(), (r as i64).into())), only));
        }
        parts.pop().unwrap_or_default()
    }

    /// Zero mode of `w = prod e_{c_t}(-m_t) (x) e^g` applied to one basis key.
    pub fn zero_mode_on_key(&self, w: &FockBasisKey, x: &FockBasisKey) -> FockVector {
        self.zero_mode_projected(w, x, None)
    }

    /// Coefficient of `target` in `o(w) x`; skips every branch that cannot reach it.
    pub fn zero_mode_entry(&self, w: &FockBasisKey, x: &FockBasisKey, target: &FockBasisKey) -> Q {
        if x.alpha.add(&w.alpha) != target.alpha {
            return Q::zero();
        }
        self.zero_mode_projected(w, x, Some(target)).coeff(target)
    }

    fn zero_mode_projected(&self, w: &FockBasisKey, x: &FockBasisKey, only: Option<&FockBasisKey>) -> FockVector {
        let target = self.weight(x);
        let slots = &w.modes;
        let p = slots.len();
        let g = &w.alpha;
        let beta = &x.alpha;
        let out_alpha = beta.add(g);
        let out_lattice = self.lattice_weight(&out_alpha);
        let mut out = FockVector::zero();
        if out_lattice > target {
            return out;
        }
        let start =
            FockVector::term(FockBasisKey { modes: x.modes.clone(), alpha: out_alpha.clone() }, self.cocycle(g, beta));
        // E^+(-g) lowers the oscillator weight by any amount up to what is present
        let mut after_plus = FockVector::zero();
        for d in 0..=x.oscillator_weight() {
            after_plus.add_scaled(&self.exp_part(g, false, d, &start, None), &Q::one());
        }
        let mut assign = vec![Slot::Zero; p];
        loop {
            self.apply_assignment(slots, &assign, beta, g, &after_plus, (target, out_lattice), only, &mut out);
            // next ternary assignment
            let mut i = 0;
            loop {
                if i == p {
                    return out;
                }
                assign[i] = match assign[i] {
                    Slot::Zero => Slot::Annihilate,
                    Slot::Annihilate => Slot::Create,
                    Slot::Create => Slot::Zero,
                };
                if assign[i] != Slot::Zero {
                    break;
                }
                i += 1;
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn apply_assignment(
        &self,
        slots: &[(u32, u8)],
        assign: &[Slot],
        beta: &LatticeVector,
        g: &LatticeVector,
        after_plus: &FockVector,
        (target, out_lattice): (u64, u64),
        only: Option<&FockBasisKey>,
        out: &mut FockVector,
    ) {
        // zero modes act on the input e^beta
        let mut c0 = Q::one();
        for (t, &(m, c)) in slots.iter().enumerate() {
            if assign[t] == Slot::Zero {
                c0 *= self.lambda(c as usize, beta) * q(if m % 2 == 1 { 1 } else { -1 });
            }
        }
        if c0.is_zero() {
            return;
        }
        let mut state = after_plus.scale(&c0);
        for (t, &(m, c)) in slots.iter().enumerate() {
            if assign[t] != Slot::Annihilate {
                continue;
            }
            let top = state.iter().map(|(k, _)| k.oscillator_weight()).max().unwrap_or(0);
            let mut next = FockVector::zero();
            for j in 1..=top as i64 {
                let coeff = binom_q(-j - 1, (m - 1) as u64);
                next.add_scaled(&self.apply_color_mode(c as usize, j, &state), &coeff);
            }
            state = next;
            if state.is_zero() {
                return;
            }
        }
        // creation only adds oscillators
        let state = restrict(state, only);
        let creators: Vec<(u32, u8)> =
            slots.iter().zip(assign).filter(|(_, a)| **a == Slot::Create).map(|(s, _)| *s).collect();
        for (k, v) in state.iter() {
            let have = k.oscillator_weight() + out_lattice;
            if have > target {
                continue;
            }
            let seed = FockVector::term(k.clone(), v.clone());
            self.create_rest(&creators, g, target - have, seed, only, out);
        }
    }

    /// Spends `deficit` on the remaining creator slots and on `E^-(-g)`.
    fn create_rest(
        &self,
        creators: &[(u32, u8)],
        g: &LatticeVector,
        deficit: u64,
        state: FockVector,
        only: Option<&FockBasisKey>,
        out: &mut FockVector,
    ) {
        let Some((&(m, c), rest)) = creators.split_first() else {
            if deficit == 0 || !g.is_zero() {
                out.add_scaled(&self.exp_part(g, true, deficit, &state, only), &Q::one());
            }
            return;
        };
        // e_c(-j) carries C(j - 1, m - 1), nonzero only for j >= m
        for j in m as u64..=deficit {
            let coeff = binom_q(j as i64 - 1, (m - 1) as u64);
            let next = restrict(self.apply_color_mode(c as usize, -(j as i64), &state).scale(&coeff), only);
            if !next.is_zero() {
                self.create_rest(rest, g, deficit - j, next, only, out);
            }
        }
    }

    /// Zero mode of an arbitrary vector `u` applied to `x`.
    pub fn zero_mode(&self, u: &FockVector, x: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        for (w, a) in u.iter() {
            for (k, b) in x.iter() {
                out.add_scaled(&self.zero_mode_on_key(w, k), &(a * b));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::Context;
    use crate::lattice::EvenLattice;

    fn key(modes: &[(u32, u8)], alpha: &[i64]) -> FockBasisKey {
        let mut m = modes.to_vec();
        m.sort();
        FockBasisKey { modes: m, alpha: LatticeVector(alpha.to_vec()) }
    }

    #[test]
    fn conformal_weight_one_zero_mode_is_h0() {
        let fs = FockSpace::new(&Context::Lattice(EvenLattice::a1()));
        let h = key(&[(1, 0)], &[0]);
        let x = key(&[(2, 0), (1, 0)], &[3]);
        let y = fs.zero_mode_on_key(&h, &x);
        assert_eq!(y, FockVector::term(x.clone(), q(6)));
    }

    #[test]
    fn virasoro_zero_mode_on_heisenberg() {
        // o(h(-1)^2 1 / 2) = L(0) for rank 1 with (h, h) = 1
        let fs = FockSpace::new(&Context::Heisenberg { rank: 1 });
        let w = key(&[(1, 0), (1, 0)], &[0]);
        for modes in [vec![], vec![(1u32, 0u8)], vec![(2, 0), (1, 0)], vec![(1, 0), (1, 0), (3, 0)]] {
            let x = key(&modes, &[0]);
            let wt = fs.weight(&x);
            let y = fs.zero_mode_on_key(&w, &x);
            assert_eq!(y, FockVector::term(x.clone(), q(2 * wt as i64)), "on {x}");
        }
    }

    #[test]
    fn exponential_moves_sector() {
        // o(e^g) e^{-b} with g = 2b, b the A1 root: lands on e^{b} with coefficient 1
        let fs = FockSpace::new(&Context::Lattice(EvenLattice::a1()));
        let w = key(&[], &[2]);
        let x = key(&[], &[-1]);
        let y = fs.zero_mode_on_key(&w, &x);
        assert_eq!(y, FockVector::basis(key(&[], &[1])));
    }
}
