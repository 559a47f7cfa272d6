use zhutrace::fockoracle::{graded_trace, symmetrized_basis, FockBasisKey, FockSpace, FockVector};
use zhutrace::lattice::{EvenLattice, LatticeVector};
use zhutrace::state::parse_state;
use zhutrace::{Algebra, Context};

const ORDER: usize = 6;

fn images(ctx: &Context, algebra: Algebra, expr: &str) -> Vec<(FockBasisKey, u64, FockVector)> {
    let fs = FockSpace::new(ctx);
    let u = fs.build_square_state(&parse_state(expr, ctx.rank()).unwrap()).unwrap();
    symmetrized_basis(&fs, algebra, ORDER)
        .unwrap()
        .into_iter()
        .map(|b| {
            let y = fs.zero_mode(&u, &b.vector);
            (b.lead, b.weight, y)
        })
        .collect()
}

#[test]
fn zero_modes_preserve_weight() {
    let cases = [
        (Context::Heisenberg { rank: 2 }, Algebra::M, "h1[-1] h2[-2] h1[-3]"),
        (Context::Lattice(EvenLattice::a1()), Algebra::VL, "h1[-1] h1[-2]"),
        (Context::Lattice(EvenLattice::a1()), Algebra::VL, "h1[-1] | e(2)"),
        (Context::Lattice(EvenLattice::a2()), Algebra::VL, "h2[-1] | e(1,-1)"),
    ];
    for (ctx, alg, expr) in &cases {
        let fs = FockSpace::new(ctx);
        for (lead, w, y) in images(ctx, *alg, expr) {
            for (k, _) in y.iter() {
                assert_eq!(fs.weight(k), w, "o({expr}) sends {lead} to {k}");
            }
        }
    }
}

#[test]
fn heisenberg_zero_modes_respect_parity() {
    let ctx = Context::Heisenberg { rank: 2 };
    for expr in ["h1[-2]", "h1[-1] h2[-1]", "h2[-1] h1[-2] h2[-2]", "h1[-1] h1[-1] h2[-3] h2[-1]"] {
        let p = parse_state(expr, 2).unwrap().len() % 2;
        for (lead, _, y) in images(&ctx, Algebra::M, expr) {
            for (k, _) in y.iter() {
                assert_eq!((lead.parity() + k.parity()) % 2, p, "o({expr}) on {lead} hits {k}");
            }
        }
    }
}

/// `o(u)` for `u` in `V_L+` maps the symmetrized basis back into `V_L+`.
#[test]
fn fixed_point_zero_modes_commute_with_involution() {
    let ctx = Context::Lattice(EvenLattice::a1());
    for expr in ["| f(2)", "h1[-1] | g(2)", "h1[-1] h1[-2] | f(1)", "h1[-2] h1[-1]"] {
        for (lead, _, y) in images(&ctx, Algebra::VLPlus, expr) {
            for (k, c) in y.iter() {
                let flipped = FockBasisKey { modes: k.modes.clone(), alpha: k.alpha.neg() };
                let sign = if k.parity() == 0 { c.clone() } else { -c.clone() };
                if k.alpha == LatticeVector::zero(1) {
                    assert_eq!(k.parity(), 0, "o({expr}) on {lead} leaves V_L+ at {k}");
                } else {
                    assert_eq!(y.coeff(&flipped), sign, "o({expr}) on {lead} at {k}");
                }
            }
        }
    }
}

#[test]
fn heisenberg_trace_splits_by_parity() {
    for rank in 1..=2 {
        let ctx = Context::Heisenberg { rank };
        for expr in ["1", "h1[-1] h1[-1]", "h1[-2] h1[-3]", "h1[-1] h1[-1] h1[-2] h1[-1]"] {
            let w = parse_state(expr, rank).unwrap();
            let m = graded_trace(Algebra::M, &ctx, &w, 10).unwrap();
            let plus = graded_trace(Algebra::MPlus, &ctx, &w, 10).unwrap();
            let minus = graded_trace(Algebra::MMinus, &ctx, &w, 10).unwrap();
            assert_eq!(m, plus.add(&minus), "{expr} at rank {rank}");
        }
    }
}
