use zhutrace::closedform::{self, Factor};
use zhutrace::fockoracle::graded_trace;
use zhutrace::lattice::{EvenLattice, LatticeVector};
use zhutrace::{arith::q, Algebra, BracketWord, Context, Tail};

fn words(rank: usize, max_w: u32) -> Vec<Vec<(usize, u32)>> {
    fn rec(rank: usize, rem: u32, min: (u32, usize), cur: &mut Vec<(usize, u32)>, out: &mut Vec<Vec<(usize, u32)>>) {
        out.push(cur.clone());
        for n in min.0..=rem {
            for c in 0..rank {
                if (n, c) < min {
                    continue;
                }
                cur.push((c, n));
                rec(rank, rem - n, (n, c), cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(rank, max_w, (1, 0), &mut Vec::new(), &mut out);
    out
}

fn agree(alg: Algebra, ctx: &Context, w: &BracketWord, order: usize) {
    let a = graded_trace(alg, ctx, w, order).unwrap();
    let b = closedform::trace(alg, w, ctx, order).unwrap();
    let prec = q(order as i64) - q(ctx.rank() as i64) / q(24);
    assert_eq!(a.truncate_abs(&prec), b.truncate_abs(&prec), "{w} on {alg}");
}

#[test]
fn heisenberg_rank_two() {
    let ctx = Context::Heisenberg { rank: 2 };
    for spec in words(2, 5) {
        let w = BracketWord::from_colors(2, &spec, Tail::Vacuum);
        agree(Algebra::M, &ctx, &w, 10);
        if spec.len() % 2 == 0 {
            agree(Algebra::MPlus, &ctx, &w, 10);
            agree(Algebra::MMinus, &ctx, &w, 10);
        }
    }
}

#[test]
fn lattice_vacuum_tails() {
    let ctx = Context::Lattice(EvenLattice::a2());
    for spec in words(2, 4) {
        let w = BracketWord::from_colors(2, &spec, Tail::Vacuum);
        agree(Algebra::VL, &ctx, &w, 8);
        if spec.len() % 2 == 0 {
            agree(Algebra::VLPlus, &ctx, &w, 8);
        }
    }
}

#[test]
fn lattice_tails_a1() {
    let l = EvenLattice::a1();
    let ctx = Context::Lattice(l);
    for a in [2i64, 1, 4] {
        for spec in words(1, 3) {
            let tail =
                if spec.len() % 2 == 0 { Tail::F(LatticeVector(vec![a])) } else { Tail::G(LatticeVector(vec![a])) };
            let w = BracketWord::from_colors(1, &spec, tail);
            agree(Algebra::VLPlus, &ctx, &w, 7);
        }
    }
    let w = BracketWord::new(vec![Factor::new(vec![q(3)], 2)], Tail::G(LatticeVector(vec![2])));
    agree(Algebra::VLPlus, &ctx, &w, 7);
}
