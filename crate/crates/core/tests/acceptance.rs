//! Acceptance criteria 1-10: one PASS/FAIL line each, exit status 1 if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use zhutrace::lattice::{EvenLattice, LatticeVector};
use zhutrace::verify::{run_suite, SuiteName, SuiteParams, VerificationReport};
use zhutrace::{Context, Result};

struct Criterion {
    id: u32,
    title: &'static str,
    limit: Option<Duration>,
    run: fn() -> Result<Vec<VerificationReport>>,
}

fn heisenberg(ranks: std::ops::RangeInclusive<usize>) -> Vec<Context> {
    ranks.map(|rank| Context::Heisenberg { rank }).collect()
}

fn a1() -> Context {
    Context::Lattice(EvenLattice::a1())
}

fn a2() -> Context {
    Context::Lattice(EvenLattice::a2())
}

fn suite_over(suite: SuiteName, contexts: Vec<Context>, weight: u32, order: usize) -> Result<Vec<VerificationReport>> {
    contexts
        .into_iter()
        .map(|ctx| run_suite(suite, &SuiteParams::new(ctx).with_weight(weight).with_order(order)))
        .collect()
}

fn characters() -> Result<Vec<VerificationReport>> {
    let mut ctxs = heisenberg(1..=3);
    ctxs.extend([a1(), a2()]);
    suite_over(SuiteName::Characters, ctxs, 0, 30)
}

fn heisenberg_suite() -> Result<Vec<VerificationReport>> {
    suite_over(SuiteName::Heisenberg, heisenberg(1..=2), 8, 20)
}

fn heisenberg_plus_suite() -> Result<Vec<VerificationReport>> {
    suite_over(SuiteName::HeisenbergPlus, heisenberg(1..=2), 8, 20)
}

fn lattice_full() -> Result<Vec<VerificationReport>> {
    suite_over(SuiteName::LatticeFull, vec![a1(), a2()], 6, 15)
}

fn lattice_plus_m() -> Result<Vec<VerificationReport>> {
    suite_over(SuiteName::LatticePlusM, vec![a1()], 6, 15)
}

fn lattice_plus_tail() -> Result<Vec<VerificationReport>> {
    let mut p = SuiteParams::new(a1()).with_weight(4).with_order(12);
    p.tail_alpha = Some(LatticeVector(vec![2]));
    Ok(vec![run_suite(SuiteName::LatticePlusTail, &p)?])
}

fn elliptic() -> Result<Vec<VerificationReport>> {
    let mut p = SuiteParams::new(Context::Heisenberg { rank: 1 }).with_order(20);
    p.tol = 1e-8;
    Ok(vec![run_suite(SuiteName::Elliptic, &p)?])
}

fn jacobi_like() -> Result<Vec<VerificationReport>> {
    suite_over(SuiteName::JacobiLike, vec![a1()], 6, 20)
}

fn modularity() -> Result<Vec<VerificationReport>> {
    let mut p = SuiteParams::new(a1()).with_weight(4).with_order(40);
    p.samples = 9;
    p.tol = 1e-8;
    Ok(vec![run_suite(SuiteName::Modularity, &p)?])
}

fn square_brackets() -> Result<Vec<VerificationReport>> {
    let mut ctxs = heisenberg(1..=2);
    ctxs.push(a1());
    suite_over(SuiteName::SquareBrackets, ctxs, 6, 0)
}

const CRITERIA: [Criterion; 10] = [
    Criterion {
        id: 1,
        title: "graded dimensions = eta/theta characters, ranks 1-3, [2], A2, order 30",
        limit: Some(Duration::from_secs(10)),
        run: characters,
    },
    Criterion {
        id: 2,
        title: "Heisenberg: closed = recursion = oracle, ranks 1-2, weight <= 8, order 20",
        limit: Some(Duration::from_secs(120)),
        run: heisenberg_suite,
    },
    Criterion {
        id: 3,
        title: "M+ and M-: three paths agree, even words, worked value",
        limit: Some(Duration::from_secs(120)),
        run: heisenberg_plus_suite,
    },
    Criterion {
        id: 4,
        title: "V_L and its modules: closed = oracle, [2] and A2, weight <= 6, order 15",
        limit: Some(Duration::from_secs(180)),
        run: lattice_full,
    },
    Criterion {
        id: 5,
        title: "V_L+ on M+ states: closed = twisted recursion = oracle, [2], order 15",
        limit: Some(Duration::from_secs(180)),
        run: lattice_plus_m,
    },
    Criterion {
        id: 6,
        title: "V_L+ lattice tails f/g at alpha = (2), weight <= 4, order 12; Tr o(f_alpha)",
        limit: Some(Duration::from_secs(300)),
        run: lattice_plus_tail,
    },
    Criterion {
        id: 7,
        title: "P1/Q1 expansions, parity, level-2 relation, ellipticity of Q1",
        limit: None,
        run: elliptic,
    },
    Criterion {
        id: 8,
        title: "Jacobi-like coefficient identity l <= 4 and G(u) reorganization over [2]",
        limit: None,
        run: jacobi_like,
    },
    Criterion {
        id: 9,
        title: "numeric modularity: E4, E6, F2-F6, E2 raw/corrected, G(u) at level 4",
        limit: None,
        run: modularity,
    },
    Criterion {
        id: 10,
        title: "transport table and square-bracket commutators on weight <= 6",
        limit: None,
        run: square_brackets,
    },
];

fn main() -> ExitCode {
    let mut all = true;
    for c in &CRITERIA {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_time = c.limit.is_none_or(|l| elapsed <= l);
        let (passed, summary) = match &outcome {
            Ok(reports) => {
                let cases: usize = reports.iter().map(|r| r.cases.len()).sum();
                let failed: usize = reports.iter().map(|r| r.failures().count()).sum();
                let complete = reports.iter().all(|r| r.complete);
                (
                    reports.iter().all(VerificationReport::passed),
                    format!("{cases} cases, {failed} failed{}", if complete { "" } else { ", incomplete" }),
                )
            }
            Err(e) => (false, format!("error: {e}")),
        };
        let ok = passed && in_time;
        all &= ok;
        let limit = c.limit.map_or(String::new(), |l| format!(" / limit {}s", l.as_secs()));
        println!(
            "criterion {:>2}: {} - {} ({summary}; {:.1}s{limit})",
            c.id,
            if ok { "PASS" } else { "FAIL" },
            c.title,
            elapsed.as_secs_f64()
        );
        if let Ok(reports) = &outcome {
            for r in reports.iter().filter(|r| !r.passed()) {
                print!("{r}");
            }
        }
    }
    if all {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: some criteria failed");
        ExitCode::FAILURE
    }
}
