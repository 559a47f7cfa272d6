use num_complex::Complex64;
use num_traits::Zero;
use proptest::prelude::*;
use zhutrace::arith::frac;
use zhutrace::verify::compare_series;
use zhutrace::FracQSeries;

fn series() -> impl Strategy<Value = FracQSeries> {
    let coeffs = prop::collection::vec((-6i64..=6, 1i64..=4).prop_map(|(n, d)| frac(n, d)), 3..12);
    ((-3i64..=3, 1i64..=4), coeffs).prop_map(|((n, d), c)| FracQSeries::new(frac(n, d), c))
}

fn unit_series() -> impl Strategy<Value = FracQSeries> {
    series().prop_filter("nonzero lead", |s| !s.coeffs()[0].is_zero())
}

fn same(a: &FracQSeries, b: &FracQSeries) -> bool {
    compare_series(a, b).map(|v| v.is_equal()).unwrap_or(false)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in series(), b in series(), c in series()) {
        prop_assert!(same(&a.mul(&b), &b.mul(&a)));
        prop_assert!(same(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c))));
        // align leading exponents so the sum keeps both precisions
        let (b0, c0) = (b.shift(&(a.lead_exp() - b.lead_exp())), c.shift(&(a.lead_exp() - c.lead_exp())));
        prop_assert!(same(&a.mul(&b0.add(&c0)), &a.mul(&b0).add(&a.mul(&c0))));
    }

    #[test]
    fn division_inverts_multiplication(a in series(), b in unit_series()) {
        prop_assert!(same(&a.mul(&b).div(&b).unwrap(), &a));
        prop_assert!(same(&b.pow(-2).unwrap().mul(&b.pow(2).unwrap()), &FracQSeries::one(b.order())));
    }

    #[test]
    fn json_round_trip(a in series()) {
        prop_assert_eq!(FracQSeries::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn evaluation_is_multiplicative(a in series(), b in series()) {
        let tau = Complex64::new(0.1, 3.0);
        let (va, _) = a.eval(tau).unwrap();
        let (vb, _) = b.eval(tau).unwrap();
        let (vab, _) = a.mul(&b).eval(tau).unwrap();
        prop_assert!((vab - va * vb).norm() <= 1e-9 * (1.0 + (va * vb).norm()));
    }
}
