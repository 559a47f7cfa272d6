use proptest::prelude::*;
use zhutrace::arith::{frac, Q};
use zhutrace::closedform::{self, recursion, Factor};
use zhutrace::lattice::EvenLattice;
use zhutrace::{Algebra, BracketWord, Context};

const ORDER: usize = 8;

fn rational() -> impl Strategy<Value = Q> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| frac(n, d))
}

fn factor(rank: usize) -> impl Strategy<Value = Factor> {
    (prop::collection::vec(rational(), rank), 1u32..=4).prop_map(|(v, n)| Factor::new(v, n))
}

fn word(rank: usize, len: std::ops::Range<usize>) -> impl Strategy<Value = BracketWord> {
    prop::collection::vec(factor(rank), len).prop_map(BracketWord::vacuum)
}

fn contexts() -> [(Context, Algebra); 3] {
    [
        (Context::Heisenberg { rank: 2 }, Algebra::M),
        (Context::Heisenberg { rank: 2 }, Algebra::MPlus),
        (Context::Lattice(EvenLattice::a2()), Algebra::VL),
    ]
}

fn trace(ctx: &Context, alg: Algebra, w: &BracketWord) -> zhutrace::FracQSeries {
    closedform::trace(alg, w, ctx, ORDER).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linear_in_each_slot(w in word(2, 2..5), extra in prop::collection::vec(rational(), 2), c in rational(), j in 0usize..4) {
        let j = j % w.len();
        for (ctx, alg) in contexts() {
            if alg == Algebra::MPlus && w.len() % 2 == 1 {
                continue;
            }
            let base = trace(&ctx, alg, &w);
            prop_assert_eq!(trace(&ctx, alg, &w.scale_slot(j, &c)), base.scale(&c));
            let mut other = w.clone();
            other.factors[j].vector = extra.clone();
            let mut sum = w.clone();
            for (x, e) in sum.factors[j].vector.iter_mut().zip(&extra) {
                *x += e;
            }
            prop_assert_eq!(trace(&ctx, alg, &sum), base.add(&trace(&ctx, alg, &other)));
        }
    }

    #[test]
    fn symmetric_under_permutation(w in word(2, 2..5), rot in 1usize..4) {
        let mut p = w.clone();
        p.factors.rotate_left(rot % w.len());
        p.factors.swap(0, w.len() - 1);
        for (ctx, alg) in contexts() {
            if alg == Algebra::MPlus && w.len() % 2 == 1 {
                continue;
            }
            prop_assert_eq!(trace(&ctx, alg, &w), trace(&ctx, alg, &p));
        }
    }

    #[test]
    fn closed_form_matches_recursion(w in word(2, 0..5)) {
        for (ctx, alg) in contexts() {
            if alg == Algebra::MPlus && w.len() % 2 == 1 {
                continue;
            }
            prop_assert_eq!(trace(&ctx, alg, &w), recursion::recurse(alg, &w, &ctx, ORDER).unwrap());
        }
    }
}
