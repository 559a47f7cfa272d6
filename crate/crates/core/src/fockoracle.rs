//! Independent Fock-space oracle: builds states from square-bracket modes, forms zero modes
//! from normally ordered vertex operators and takes graded traces over explicit bases.

use num_traits::Zero;

use crate::arith::Q;
use crate::closedform::{BracketWord, Tail};
use crate::context::{Algebra, Context};
use crate::error::{Error, Result};
use crate::qseries::FracQSeries;

pub mod basis;
pub mod diagonal;
pub mod fock;
pub mod transport;
pub mod vertex;

pub use basis::{graded_dimension_series, graded_dimensions, literal_trace, symmetrized_basis, zero_mode_matrix};
pub use fock::{ColorBasis, FockBasisKey, FockSpace, FockVector};
pub use transport::{binomid_coeff, transport_coeff};

/// Whether `u` lies in the fixed-point subalgebra, from the parity of the word and its tail.
fn check_fixed(algebra: Algebra, word: &BracketWord) -> Result<()> {
    let odd = word.len() % 2 == 1;
    match (algebra, &word.tail) {
        (Algebra::MPlus | Algebra::MMinus, _) if odd => Err(Error::NotInMPlus),
        (Algebra::VLPlus, Tail::Vacuum) if odd => Err(Error::NotInVLPlusFamily),
        (Algebra::VLPlus, Tail::E(a)) if !a.is_zero() => Err(Error::NotInVLPlusFamily),
        (Algebra::VLPlus, Tail::E(_)) if odd => Err(Error::NotInVLPlusFamily),
        (Algebra::VLPlus, Tail::F(_)) if odd => Err(Error::NotInVLPlusFamily),
        (Algebra::VLPlus, Tail::G(_)) if !odd => Err(Error::NotInVLPlusFamily),
        _ => Ok(()),
    }
}

/// `Tr_V o(u) q^{L(0) - c/24}` for the state `u` named by `word`, with `order` coefficients.
pub fn graded_trace(algebra: Algebra, ctx: &Context, word: &BracketWord, order: usize) -> Result<FracQSeries> {
    if algebra.needs_lattice() {
        ctx.require_lattice()?;
    }
    check_fixed(algebra, word)?;
    let fs = FockSpace::new(ctx);
    let u = fs.build_square_state(word)?;
    if u.iter().all(|(k, _)| k.alpha.is_zero()) {
        return diagonal::vacuum_tail_trace(&fs, algebra, &u, order);
    }
    literal_trace(&fs, algebra, &u, order)
}

/// Trace over one sector `M (x) e^alpha` of `V_L`.
pub fn module_trace(
    ctx: &Context,
    word: &BracketWord,
    alpha: &crate::lattice::LatticeVector,
    order: usize,
) -> Result<FracQSeries> {
    let fs = FockSpace::new(ctx);
    let u = fs.build_square_state(word)?;
    diagonal::module_trace(&fs, &u, alpha, order)
}

/// [`module_trace`] for several sectors at once.
pub fn module_traces(
    ctx: &Context,
    word: &BracketWord,
    alphas: &[crate::lattice::LatticeVector],
    order: usize,
) -> Result<Vec<FracQSeries>> {
    let fs = FockSpace::new(ctx);
    let u = fs.build_square_state(word)?;
    diagonal::module_traces(&fs, &u, alphas, order)
}

/// A failed operator identity on a particular state.
#[derive(Clone, Debug)]
pub struct IdentityFailure {
    pub what: String,
    pub state: String,
}

/// `[h_v[m], h_w[n]] = m delta_{m+n,0} (v, w)` on every basis state of weight `<= max_w`,
/// for all coordinate vectors and `|m|, |n| <= max_w`.
pub fn check_square_commutators(ctx: &Context, max_w: u64) -> Result<Vec<IdentityFailure>> {
    let fs = FockSpace::new(ctx);
    let k = fs.rank();
    let units: Vec<Vec<Q>> =
        (0..k).map(|i| (0..k).map(|j| if i == j { Q::from_integer(1.into()) } else { Q::zero() }).collect()).collect();
    let algebra = if ctx.lattice().is_some() { Algebra::VL } else { Algebra::M };
    let mut failures = Vec::new();
    let states = symmetrized_basis(&fs, algebra, max_w as usize + 1)?;
    let mw = max_w as i64;
    for b in &states {
        for (vi, v) in units.iter().enumerate() {
            for (wi, w) in units.iter().enumerate() {
                let vw = ctx.pairing(v, w)?;
                for m in -mw..=mw {
                    for n in -mw..=mw {
                        let a = fs.apply_square_mode(v, m, &fs.apply_square_mode(w, n, &b.vector));
                        let c = fs.apply_square_mode(w, n, &fs.apply_square_mode(v, m, &b.vector));
                        let lhs = a.sub(&c);
                        let expect = if m + n == 0 {
                            b.vector.scale(&(Q::from_integer(m.into()) * &vw))
                        } else {
                            FockVector::zero()
                        };
                        if lhs != expect {
                            failures.push(IdentityFailure {
                                what: format!("[h{vi}[{m}], h{wi}[{n}]]"),
                                state: b.lead.to_string(),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(failures)
}

/// The same relation for round modes, `[h_v(m), h_w(n)] = m delta_{m+n,0} (v, w)`.
pub fn check_round_commutators(ctx: &Context, max_w: u64) -> Result<Vec<IdentityFailure>> {
    let fs = FockSpace::new(ctx);
    let k = fs.rank();
    let units: Vec<Vec<Q>> =
        (0..k).map(|i| (0..k).map(|j| if i == j { Q::from_integer(1.into()) } else { Q::zero() }).collect()).collect();
    let algebra = if ctx.lattice().is_some() { Algebra::VL } else { Algebra::M };
    let mut failures = Vec::new();
    let mw = max_w as i64;
    for b in symmetrized_basis(&fs, algebra, max_w as usize + 1)? {
        for (vi, v) in units.iter().enumerate() {
            for (wi, w) in units.iter().enumerate() {
                let vw = ctx.pairing(v, w)?;
                for m in -mw..=mw {
                    for n in -mw..=mw {
                        let a = fs.apply_round_mode(v, m, &fs.apply_round_mode(w, n, &b.vector));
                        let c = fs.apply_round_mode(w, n, &fs.apply_round_mode(v, m, &b.vector));
                        let expect = if m + n == 0 {
                            b.vector.scale(&(Q::from_integer(m.into()) * &vw))
                        } else {
                            FockVector::zero()
                        };
                        if a.sub(&c) != expect {
                            failures.push(IdentityFailure {
                                what: format!("[h{vi}({m}), h{wi}({n})]"),
                                state: b.lead.to_string(),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(failures)
}

/// `a(m, j) = m! c(1, j, m)` for `0 <= m <= j <= max_j`.
pub fn check_transport_binomial(max_j: u64) -> Vec<IdentityFailure> {
    let mut out = Vec::new();
    for j in 0..=max_j {
        for m in 0..=j {
            let expect = Q::from_integer(crate::arith::factorial(m)) * binomid_coeff(1, j, m);
            if transport_coeff(m as i64, j as i64) != expect {
                out.push(IdentityFailure { what: format!("a({m},{j})"), state: "table".into() });
            }
        }
    }
    out
}

/// `sum_{m >= 0} ((n - k + 1)^m / m!) v[m] = sum_{i >= 0} C(n, i) v(i)` for weight-1 `v`
/// (`k = 1`), applied to every basis state of weight `<= max_w`.
pub fn check_form1(ctx: &Context, n_range: std::ops::RangeInclusive<i64>, max_w: u64) -> Result<Vec<IdentityFailure>> {
    let fs = FockSpace::new(ctx);
    let k = fs.rank();
    let algebra = if ctx.lattice().is_some() { Algebra::VL } else { Algebra::M };
    let mut out = Vec::new();
    for b in symmetrized_basis(&fs, algebra, max_w as usize + 1)? {
        let top = b.weight as i64;
        for c in 0..k {
            let mut v = vec![Q::zero(); k];
            v[c] = Q::from_integer(1.into());
            for n in n_range.clone() {
                let mut lhs = FockVector::zero();
                let mut rhs = FockVector::zero();
                for m in 0..=top {
                    let coef =
                        Q::from_integer(n.into()).pow(m as i32) / Q::from_integer(crate::arith::factorial(m as u64));
                    lhs.add_scaled(&fs.apply_square_mode(&v, m, &b.vector), &coef);
                    rhs.add_scaled(
                        &fs.apply_round_mode(&v, m, &b.vector),
                        &Q::from_integer(crate::arith::binom_i(n, m as u64)),
                    );
                }
                if lhs != rhs {
                    out.push(IdentityFailure { what: format!("form1 n={n} color {c}"), state: b.lead.to_string() });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform;
    use crate::lattice::{EvenLattice, LatticeVector};

    #[test]
    fn e2_over_eta() {
        let ctx = Context::Heisenberg { rank: 1 };
        let w = BracketWord::from_colors(1, &[(0, 1), (0, 1)], Tail::Vacuum);
        let a = graded_trace(Algebra::M, &ctx, &w, 10).unwrap();
        let b = closedform::trace(Algebra::M, &w, &ctx, 10).unwrap();
        assert_eq!(a.truncate(10), b.truncate(10));
    }

    #[test]
    fn diagonal_matches_literal() {
        let ctx = Context::Heisenberg { rank: 2 };
        let fs = FockSpace::new(&ctx);
        for spec in [vec![(0, 2), (1, 1)], vec![(0, 1), (0, 3)], vec![(0, 2), (1, 2), (0, 1), (1, 1)]] {
            let w = BracketWord::from_colors(2, &spec, Tail::Vacuum);
            let u = fs.build_square_state(&w).unwrap();
            for alg in [Algebra::M, Algebra::MPlus] {
                let a = diagonal::vacuum_tail_trace(&fs, alg, &u, 6).unwrap();
                let b = literal_trace(&fs, alg, &u, 6).unwrap();
                assert_eq!(a, b, "{w} on {alg}");
            }
        }
        let ctx = Context::Lattice(EvenLattice::a2());
        let fs = FockSpace::new(&ctx);
        let w = BracketWord::from_colors(2, &[(0, 1), (1, 1)], Tail::Vacuum);
        let u = fs.build_square_state(&w).unwrap();
        for alg in [Algebra::VL, Algebra::VLPlus] {
            let a = diagonal::vacuum_tail_trace(&fs, alg, &u, 4).unwrap();
            let b = literal_trace(&fs, alg, &u, 4).unwrap();
            assert_eq!(a, b, "{w} on {alg}");
        }
    }

    #[test]
    fn falpha_direct() {
        let l = EvenLattice::a1();
        let ctx = Context::Lattice(l.clone());
        let a = LatticeVector(vec![2]);
        let w = BracketWord::new(vec![], Tail::F(a.clone()));
        let got = graded_trace(Algebra::VLPlus, &ctx, &w, 8).unwrap();
        let expect = closedform::falpha_trace(&l, &a, 8).unwrap();
        assert_eq!(got.truncate_abs(&(crate::arith::q(7))), expect.truncate_abs(&crate::arith::q(7)));
    }

    #[test]
    fn commutators_low_weight() {
        assert!(check_round_commutators(&Context::Heisenberg { rank: 2 }, 3).unwrap().is_empty());
        assert!(check_square_commutators(&Context::Heisenberg { rank: 1 }, 3).unwrap().is_empty());
        assert!(check_square_commutators(&Context::Lattice(EvenLattice::a1()), 2).unwrap().is_empty());
        assert!(check_transport_binomial(8).is_empty());
        assert!(check_form1(&Context::Lattice(EvenLattice::a1()), -2..=3, 3).unwrap().is_empty());
    }
}
