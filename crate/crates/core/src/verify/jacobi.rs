//! The Jacobi-like product `Theta_L(v, X) E~(-X) F(X)` and the reorganization of `G(u)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::suites::{square_words, SuiteParams};
use super::{CaseResult, ReportParameters, VerificationReport};
use crate::arith::{factorial, q, Q};
use crate::closedform::{g_series, BracketWord, Tail};
use crate::combinatorics::fixed_point_free_involutions;
use crate::error::{Error, Result};
use crate::lattice::{jl_e2_exp, jl_theta, EvenLattice, JacobiLikeForm};
use crate::modforms::{eisenstein_e, eisenstein_hat, eta_quotient, EisensteinKind};
use crate::qseries::{sum_series, FracQSeries};

fn inv_factorial(n: usize) -> Q {
    Q::new(BigInt::one(), factorial(n as u64))
}

fn two_pow_over_fact(m: usize) -> Q {
    Q::new(BigInt::from(2).pow(m as u32), factorial(2 * m as u64))
}

/// `F(X) = sum_m f_m / m! (2 pi i X)^m`; weight metadata is not used by the identity.
fn f_form(f: &[FracQSeries], x_order: usize) -> JacobiLikeForm {
    let coeffs =
        (0..x_order).map(|m| f.get(m).map_or_else(FracQSeries::zero, |s| s.scale(&inv_factorial(m)))).collect();
    JacobiLikeForm { coeffs, weight: Q::zero(), index: Q::zero() }
}

/// Checks, for each `l <= l_max`, that the `X^l` coefficient of the product equals
/// `sum_{m, n} 2^m/(2m)! theta_L(v, 2m) E_2^n/n! f_{l-m-n}/(l-m-n)!`.
pub fn jacobi_like_coefficient_identity(
    lattice: &EvenLattice,
    v: &[Q],
    l_max: usize,
    f: &[FracQSeries],
    q_order: usize,
    label: &str,
) -> VerificationReport {
    let params = ReportParameters { q_order: Some(q_order), max_weight: Some(l_max as u32), ..Default::default() };
    let mut report = VerificationReport::new("jacobi-like", params);
    let xo = l_max + 1;
    let product = jl_theta(lattice, v, xo, q_order).mul(&jl_e2_exp(&q(-1), xo, q_order)).mul(&f_form(f, xo));
    let e2 = eisenstein_e(2, q_order);
    let e2_pows: Vec<FracQSeries> = (0..xo)
        .scan(FracQSeries::one(q_order), |acc, _| {
            let out = acc.clone();
            *acc = acc.mul(&e2);
            Some(out)
        })
        .collect();
    let thetas: Vec<FracQSeries> = (0..xo).map(|m| lattice.theta_vm(v, 2 * m as u32, q_order)).collect();
    for l in 0..xo {
        let mut terms = Vec::new();
        for m in 0..=l {
            for n in 0..=l - m {
                let r = l - m - n;
                let Some(fr) = f.get(r) else { continue };
                let c = two_pow_over_fact(m) * inv_factorial(n) * inv_factorial(r);
                terms.push(thetas[m].mul(&e2_pows[n]).mul(fr).scale(&c));
            }
        }
        let triple = sum_series(&terms);
        report.push(CaseResult::agreement(
            format!("X^{l} coefficient, {label}"),
            &[("product", Ok(product.coeffs[l].clone())), ("triple sum", Ok(triple))],
        ));
    }
    report
}

/// `S(r)`: perfect matchings of the first `2r` ones and all other slots with no two ones
/// paired, weighted by `prod c Ehat_{n_a + n_b}`.
fn restricted_matching_sum(ns: &[u32], r: usize, c: &Q, order: usize) -> FracQSeries {
    let ones: Vec<usize> = (0..ns.len()).filter(|&i| ns[i] == 1).collect();
    let mut idx: Vec<usize> = ones[..2 * r].to_vec();
    idx.extend((0..ns.len()).filter(|&i| ns[i] != 1));
    let mut acc = Vec::new();
    'sigma: for sigma in fixed_point_free_involutions(&idx) {
        let mut term = FracQSeries::one(order);
        for &(a, b) in &sigma.pairs {
            if ns[a] == 1 && ns[b] == 1 {
                continue 'sigma;
            }
            term = term.mul(&eisenstein_hat(EisensteinKind::Ehat, ns[a], ns[b], order).scale(c));
        }
        acc.push(term);
    }
    sum_series(&acc)
}

/// The inner sums of the reorganized `eta^k G(u)` as modular inputs:
/// `f_r = r! 2^r/(2r)! S(r)` for `u = h[-n_1] ... h[-n_p] 1` with `(h, h) = c`.
pub fn inner_sum_inputs(ns: &[u32], c: &Q, order: usize) -> Vec<FracQSeries> {
    let ones = ns.iter().filter(|&&n| n == 1).count();
    (0..=ones / 2)
        .map(|r| {
            let s = restricted_matching_sum(ns, r, c, order);
            s.scale(&(Q::from_integer(factorial(r as u64)) * two_pow_over_fact(r)))
        })
        .collect()
}

/// Random rational combinations of `E_4^a E_6^b` of weight `base_weight + 2m`, `m <= l_max`.
pub fn random_eisenstein_inputs(seed: u64, base_weight: u32, l_max: usize, order: usize) -> Vec<FracQSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e4 = eisenstein_e(4, order);
    let e6 = eisenstein_e(6, order);
    (0..=l_max)
        .map(|m| {
            let w = base_weight + 2 * m as u32;
            let mut acc = FracQSeries::zero();
            for a in 0..=w / 4 {
                let rest = w - 4 * a;
                if rest % 6 != 0 {
                    continue;
                }
                let b = rest / 6;
                let coeff = Q::new(BigInt::from(rng.gen_range(-9i64..=9)), BigInt::from(rng.gen_range(1i64..=6)));
                let mono = (0..a).fold(FracQSeries::one(order), |s, _| s.mul(&e4));
                let mono = (0..b).fold(mono, |s, _| s.mul(&e6));
                acc = acc.add(&mono.scale(&coeff));
            }
            acc
        })
        .collect()
}

/// `eta^k G(u) = (2l')!/2^{l'} [X^{l'}] Theta_L(h, X) exp(c E_2 X) F(X)` with the inner
/// sums of [`inner_sum_inputs`], for `u` built from one basis vector `h` with `(h, h) = c`
/// and an even number `2 l'` of factors `h[-1]`.
pub fn g_reorganization(lattice: &EvenLattice, ns: &[u32], order: usize) -> Result<CaseResult> {
    let k = lattice.rank();
    let ones = ns.iter().filter(|&&n| n == 1).count();
    if ones % 2 == 1 {
        return Err(Error::Invalid("the reorganization needs an even number of h[-1] factors".into()));
    }
    let lp = ones / 2;
    let spec: Vec<(usize, u32)> = ns.iter().map(|&n| (0, n)).collect();
    let word = BracketWord::from_colors(k, &spec, Tail::Vacuum);
    let v = word.factors.first().map_or_else(|| crate::closedform::Factor::unit(k, 0, 1).vector, |f| f.vector.clone());
    let c = Q::from_integer(lattice.gram()[0][0].into());
    let lhs = g_series(&word, lattice, order)?.mul(&eta_quotient(&[(1, k as i64)], order)?);
    let f = inner_sum_inputs(ns, &c, order);
    let xo = lp + 1;
    let product = jl_theta(lattice, &v, xo, order).mul(&jl_e2_exp(&-c.clone(), xo, order)).mul(&f_form(&f, xo));
    let constant = Q::new(factorial(2 * lp as u64), BigInt::from(2).pow(lp as u32));
    let rhs = product.coeffs[lp].scale(&constant);
    Ok(CaseResult::agreement(
        format!("eta^k G({word}) reorganized, l' = {lp}"),
        &[("g_series", Ok(lhs)), ("reorganized", Ok(rhs))],
    ))
}

/// Identity checks over the lattice of `params`: zero, random and inner-sum inputs.
pub(super) fn jacobi_suite(params: &SuiteParams) -> Result<VerificationReport> {
    let l = params.ctx.require_lattice()?;
    let k = l.rank();
    let order = params.order;
    let l_max = 4;
    let mut report = VerificationReport::new("jacobi-like", ReportParameters::default());
    let unit: Vec<Q> = (0..k).map(|i| if i == 0 { Q::one() } else { Q::zero() }).collect();
    let other: Vec<Q> = (0..k).map(|i| Q::new(BigInt::from(i as i64 + 3), BigInt::from(2))).collect();
    let c = Q::from_integer(l.gram()[0][0].into());
    let family: Vec<Vec<u32>> = square_words(1, params.max_weight)
        .into_iter()
        .map(|s| s.into_iter().map(|(_, n)| n).collect::<Vec<u32>>())
        .filter(|ns| ns.iter().filter(|&&n| n == 1).count() % 2 == 0)
        .collect();
    for (vname, v) in [("v = b_1", &unit), ("v = generic", &other)] {
        let zero = vec![FracQSeries::zero(); l_max + 1];
        report.absorb(jacobi_like_coefficient_identity(l, v, l_max, &zero, order, &format!("{vname}, f = 0")));
        for s in 0..3 {
            let f = random_eisenstein_inputs(params.seed + s, 4, l_max, order);
            report.absorb(jacobi_like_coefficient_identity(
                l,
                v,
                l_max,
                &f,
                order,
                &format!("{vname}, random E4/E6 inputs #{s}"),
            ));
        }
    }
    for ns in family.iter().filter(|ns| ns.contains(&1)) {
        let f = inner_sum_inputs(ns, &c, order);
        report.absorb(jacobi_like_coefficient_identity(l, &unit, l_max, &f, order, &format!("inner sums of {ns:?}")));
    }
    for ns in &family {
        report.push(g_reorganization(l, ns, order)?);
    }
    Ok(report)
}
