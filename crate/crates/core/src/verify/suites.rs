//! Exhaustive suites over square-bracket words: closed form, recursion and oracle.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use super::{elliptic_checks, jacobi, modularity, CaseDetail, CaseResult, ReportParameters, VerificationReport};
use crate::arith::{frac, q, Q};
use crate::closedform::recursion::{recurse, zhu_recurse_untwisted, UntwistedTarget};
use crate::closedform::{self, BracketWord, Factor, Tail};
use crate::context::{Algebra, Context};
use crate::error::{Error, Result};
use crate::fockoracle::{self, IdentityFailure};
use crate::lattice::{EvenLattice, LatticeVector};
use crate::modforms::{character, eisenstein_e, eisenstein_f};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteName {
    Heisenberg,
    HeisenbergPlus,
    LatticeFull,
    LatticePlusM,
    LatticePlusTail,
    Elliptic,
    Characters,
    SquareBrackets,
    JacobiLike,
    Modularity,
}

impl SuiteName {
    pub const ALL: [SuiteName; 10] = [
        SuiteName::Heisenberg,
        SuiteName::HeisenbergPlus,
        SuiteName::LatticeFull,
        SuiteName::LatticePlusM,
        SuiteName::LatticePlusTail,
        SuiteName::Elliptic,
        SuiteName::Characters,
        SuiteName::SquareBrackets,
        SuiteName::JacobiLike,
        SuiteName::Modularity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Heisenberg => "heisenberg",
            SuiteName::HeisenbergPlus => "heisenberg-plus",
            SuiteName::LatticeFull => "lattice-full",
            SuiteName::LatticePlusM => "lattice-plus-M",
            SuiteName::LatticePlusTail => "lattice-plus-tail",
            SuiteName::Elliptic => "elliptic",
            SuiteName::Characters => "characters",
            SuiteName::SquareBrackets => "square-brackets",
            SuiteName::JacobiLike => "jacobi-like",
            SuiteName::Modularity => "modularity",
        }
    }

    fn is_equivalence(self) -> bool {
        matches!(
            self,
            SuiteName::Heisenberg
                | SuiteName::HeisenbergPlus
                | SuiteName::LatticeFull
                | SuiteName::LatticePlusM
                | SuiteName::LatticePlusTail
        )
    }
}

impl FromStr for SuiteName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Invalid(format!("unknown suite '{s}'")))
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct SuiteParams {
    pub ctx: Context,
    pub max_weight: u32,
    pub order: usize,
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    /// Lattice label of the tail suite; defaults to twice the first basis vector.
    pub tail_alpha: Option<LatticeVector>,
    /// Wall-clock bound; exceeding it marks the report incomplete.
    pub budget: Option<Duration>,
}

impl SuiteParams {
    pub fn new(ctx: Context) -> Self {
        SuiteParams {
            ctx,
            max_weight: 6,
            order: 20,
            tol: 1e-8,
            samples: 9,
            seed: 0x5eed,
            tail_alpha: None,
            budget: None,
        }
    }

    pub fn with_weight(mut self, w: u32) -> Self {
        self.max_weight = w;
        self
    }

    pub fn with_order(mut self, o: usize) -> Self {
        self.order = o;
        self
    }

    fn report_parameters(&self, suite: SuiteName) -> ReportParameters {
        let numeric = matches!(suite, SuiteName::Modularity | SuiteName::Elliptic);
        ReportParameters {
            context: Some(self.ctx.to_string()),
            max_weight: Some(self.max_weight),
            q_order: Some(self.order),
            samples: numeric.then_some(self.samples),
            tolerance: numeric.then_some(self.tol),
            seed: matches!(suite, SuiteName::Modularity | SuiteName::JacobiLike | SuiteName::Elliptic)
                .then_some(self.seed),
        }
    }
}

/// Multisets of `(color, n)` with `sum n <= max_weight`, sorted by `(n, color)`.
pub fn square_words(rank: usize, max_weight: u32) -> Vec<Vec<(usize, u32)>> {
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
    if rank > 0 {
        rec(rank, max_weight, (1, 0), &mut Vec::new(), &mut out);
    } else {
        out.push(Vec::new());
    }
    out
}

struct Clock {
    start: Instant,
    budget: Option<Duration>,
}

impl Clock {
    fn new(budget: Option<Duration>) -> Self {
        Clock { start: Instant::now(), budget }
    }

    fn expired(&self) -> bool {
        self.budget.is_some_and(|b| self.start.elapsed() > b)
    }
}

fn vacuum_words(rank: usize, max_weight: u32, even_only: bool) -> Vec<BracketWord> {
    square_words(rank, max_weight)
        .into_iter()
        .filter(|s| !even_only || s.len() % 2 == 0)
        .map(|s| BracketWord::from_colors(rank, &s, Tail::Vacuum))
        .collect()
}

fn three_paths(alg: Algebra, w: &BracketWord, ctx: &Context, order: usize) -> CaseResult {
    CaseResult::agreement(
        format!("Z_{alg}({w})"),
        &[
            ("closed", closedform::trace(alg, w, ctx, order)),
            ("recursion", recurse(alg, w, ctx, order)),
            ("oracle", fockoracle::graded_trace(alg, ctx, w, order)),
        ],
    )
}

/// Runs one of the five exact equivalence suites.
pub fn run_equivalence_suite(suite: SuiteName, params: &SuiteParams) -> Result<VerificationReport> {
    if !suite.is_equivalence() {
        return Err(Error::Invalid(format!("'{suite}' is not an equivalence suite")));
    }
    let mut report = VerificationReport::new(suite.as_str(), params.report_parameters(suite));
    let clock = Clock::new(params.budget);
    let ctx = &params.ctx;
    let k = ctx.rank();
    let order = params.order;
    let run = |report: &mut VerificationReport, f: &mut dyn FnMut() -> Vec<CaseResult>| {
        if clock.expired() {
            report.complete = false;
        } else {
            report.cases.extend(f());
        }
    };
    match suite {
        SuiteName::Heisenberg => {
            for w in vacuum_words(k, params.max_weight, false) {
                run(&mut report, &mut || vec![three_paths(Algebra::M, &w, ctx, order)]);
            }
            if k >= 1 && params.max_weight >= 4 {
                report.push(known_value_e4(ctx, order));
            }
        }
        SuiteName::HeisenbergPlus => {
            for w in vacuum_words(k, params.max_weight, true) {
                run(&mut report, &mut || {
                    vec![three_paths(Algebra::MPlus, &w, ctx, order), three_paths(Algebra::MMinus, &w, ctx, order)]
                });
            }
            if k >= 1 && params.max_weight >= 2 {
                report.push(worked_value_mplus(ctx, order));
            }
        }
        SuiteName::LatticeFull => {
            let l = ctx.require_lattice()?;
            let alphas = l.enumerate_vectors(4);
            for w in vacuum_words(k, params.max_weight, false) {
                run(&mut report, &mut || {
                    let mut cases = vec![three_paths(Algebra::VL, &w, ctx, order)];
                    cases.extend(module_cases(l, ctx, &w, &alphas, order));
                    cases
                });
            }
        }
        SuiteName::LatticePlusM => {
            ctx.require_lattice()?;
            for w in vacuum_words(k, params.max_weight, true) {
                run(&mut report, &mut || vec![three_paths(Algebra::VLPlus, &w, ctx, order)]);
            }
        }
        SuiteName::LatticePlusTail => {
            let l = ctx.require_lattice()?;
            let alpha = params.tail_alpha.clone().unwrap_or_else(|| {
                let mut c = vec![0; k];
                c[0] = 2;
                LatticeVector(c)
            });
            if alpha.is_zero() {
                return Err(Error::NotInVLPlusFamily);
            }
            for spec in square_words(k, params.max_weight) {
                let tail = if spec.len() % 2 == 0 { Tail::F(alpha.clone()) } else { Tail::G(alpha.clone()) };
                let w = BracketWord::from_colors(k, &spec, tail);
                run(&mut report, &mut || vec![three_paths(Algebra::VLPlus, &w, ctx, order)]);
            }
            let bare = BracketWord::new(Vec::new(), Tail::F(alpha.clone()));
            report.push(CaseResult::agreement(
                format!("Tr o(f_{alpha}) on V_L+"),
                &[
                    ("falpha_trace", closedform::falpha_trace(l, &alpha, order)),
                    ("oracle", fockoracle::graded_trace(Algebra::VLPlus, ctx, &bare, order)),
                ],
            ));
        }
        _ => unreachable!("checked above"),
    }
    Ok(report)
}

fn module_cases(
    l: &EvenLattice,
    ctx: &Context,
    w: &BracketWord,
    alphas: &[LatticeVector],
    order: usize,
) -> Vec<CaseResult> {
    let oracle = fockoracle::module_traces(ctx, w, alphas, order);
    alphas
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let o = match &oracle {
                Ok(v) => Ok(v[i].clone()),
                Err(e) => Err(e.clone()),
            };
            CaseResult::agreement(
                format!("Z_N{a}({w})"),
                &[
                    ("closed", closedform::trace_module_n(w, l, a, order)),
                    ("recursion", zhu_recurse_untwisted(w, UntwistedTarget::Module(l, a), order)),
                    ("oracle", o),
                ],
            )
        })
        .collect()
}

fn first_unit(ctx: &Context) -> (Vec<Q>, Q) {
    let k = ctx.rank();
    let v = Factor::unit(k, 0, 1).vector;
    let c = ctx.gram()[0][0].clone();
    (v, c)
}

/// `h[-1] h[-3] 1` on `M`: `3 (v, v) E_4 Z_M`.
fn known_value_e4(ctx: &Context, order: usize) -> CaseResult {
    let (v, c) = first_unit(ctx);
    let w = BracketWord::vacuum(vec![Factor::new(v.clone(), 1), Factor::new(v, 3)]);
    let expect = character(Algebra::M, ctx, order).map(|z| eisenstein_e(4, order).mul(&z).scale(&(q(3) * c)));
    CaseResult::agreement(
        format!("Z_M({w}) = 3 E_4 Z_M"),
        &[
            ("known", expect),
            ("closed", closedform::trace(Algebra::M, &w, ctx, order)),
            ("oracle", fockoracle::graded_trace(Algebra::M, ctx, &w, order)),
        ],
    )
}

/// `h[-1] h[-1] 1` on `M+`: `(v, v) [F_2 Z_{M+} + 1/2 (E_2 - F_2) Z_M]`.
fn worked_value_mplus(ctx: &Context, order: usize) -> CaseResult {
    let (v, c) = first_unit(ctx);
    let w = BracketWord::vacuum(vec![Factor::new(v.clone(), 1), Factor::new(v, 1)]);
    let expect = (|| {
        let zp = character(Algebra::MPlus, ctx, order)?;
        let zm = character(Algebra::M, ctx, order)?;
        let e2 = eisenstein_e(2, order);
        let f2 = eisenstein_f(2, order);
        Ok(f2.mul(&zp).add(&e2.sub(&f2).mul(&zm).scale(&frac(1, 2))).scale(&c))
    })();
    CaseResult::agreement(
        format!("Z_M+({w}) = F_2 Z_M+ + (E_2 - F_2) Z_M / 2"),
        &[
            ("worked", expect),
            ("closed", closedform::trace(Algebra::MPlus, &w, ctx, order)),
            ("recursion", recurse(Algebra::MPlus, &w, ctx, order)),
            ("oracle", fockoracle::graded_trace(Algebra::MPlus, ctx, &w, order)),
        ],
    )
}

/// Brute-force graded dimensions against the eta/theta characters.
fn character_cases(ctx: &Context, order: usize) -> Vec<CaseResult> {
    let mut algebras = vec![Algebra::M, Algebra::MPlus, Algebra::MMinus];
    if ctx.lattice().is_some() {
        algebras.extend([Algebra::VL, Algebra::VLPlus]);
    }
    algebras
        .into_iter()
        .map(|a| {
            CaseResult::agreement(
                format!("dim {a} ({ctx})"),
                &[
                    ("basis count", fockoracle::graded_dimension_series(a, ctx, order)),
                    ("character", character(a, ctx, order)),
                ],
            )
        })
        .collect()
}

fn identity_case(description: &str, checks: String, r: Result<Vec<IdentityFailure>>) -> CaseResult {
    match r {
        Ok(f) => CaseResult {
            description: description.into(),
            passed: f.is_empty(),
            detail: CaseDetail::Identity {
                checks,
                failures: f.len(),
                first: f.first().map(|x| format!("{} on {}", x.what, x.state)),
            },
        },
        Err(e) => CaseResult::error(description, &e),
    }
}

fn square_bracket_cases(ctx: &Context, max_weight: u32) -> Vec<CaseResult> {
    let w = max_weight as u64;
    vec![
        identity_case(
            "transport table a(m, j) = m! c(1, j, m)",
            format!("0 <= m <= j <= {}", 2 * w),
            Ok(fockoracle::check_transport_binomial(2 * w)),
        ),
        identity_case(
            "square-bracket commutators",
            format!("states of weight <= {w}, |m|, |n| <= {w}"),
            fockoracle::check_square_commutators(ctx, w),
        ),
        identity_case(
            "round-bracket commutators",
            format!("states of weight <= {w}, |m|, |n| <= {w}"),
            fockoracle::check_round_commutators(ctx, w),
        ),
        identity_case(
            "square modes from round modes",
            format!("states of weight <= {w}, -{w} <= n <= {w}"),
            fockoracle::check_form1(ctx, -(w as i64)..=w as i64, w),
        ),
    ]
}

/// Runs any named suite.
pub fn run_suite(suite: SuiteName, params: &SuiteParams) -> Result<VerificationReport> {
    if suite.is_equivalence() {
        return run_equivalence_suite(suite, params);
    }
    let mut report = VerificationReport::new(suite.as_str(), params.report_parameters(suite));
    match suite {
        SuiteName::Characters => report.cases.extend(character_cases(&params.ctx, params.order)),
        SuiteName::SquareBrackets => report.cases.extend(square_bracket_cases(&params.ctx, params.max_weight)),
        SuiteName::Elliptic => {
            report.absorb(elliptic_checks::elliptic_identities(params.order, params.tol, params.seed))
        }
        SuiteName::JacobiLike => report.absorb(jacobi::jacobi_suite(params)?),
        SuiteName::Modularity => report.absorb(modularity::modularity_suite(params)?),
        _ => unreachable!("equivalence suites handled above"),
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_counts_are_colored_partition_sums() {
        assert_eq!(square_words(1, 6).len(), 1 + 1 + 2 + 3 + 5 + 7 + 11);
        assert_eq!(square_words(2, 3).len(), 1 + 2 + 5 + 10);
    }

    #[test]
    fn small_heisenberg_suite_passes() {
        let p = SuiteParams::new(Context::Heisenberg { rank: 1 }).with_weight(4).with_order(8);
        let r = run_equivalence_suite(SuiteName::Heisenberg, &p).unwrap();
        assert!(r.passed(), "{r}");
        let r = run_equivalence_suite(SuiteName::HeisenbergPlus, &p).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn budget_marks_incomplete() {
        let mut p = SuiteParams::new(Context::Heisenberg { rank: 1 }).with_weight(3).with_order(5);
        p.budget = Some(Duration::ZERO);
        std::thread::sleep(Duration::from_millis(2));
        let r = run_equivalence_suite(SuiteName::Heisenberg, &p).unwrap();
        assert!(!r.complete && !r.passed());
    }

    #[test]
    fn suite_names_round_trip() {
        for s in SuiteName::ALL {
            assert_eq!(s.as_str().parse::<SuiteName>().unwrap(), s);
        }
    }
}
