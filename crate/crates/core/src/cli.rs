//! Command-line front end. Exit codes: 0 success, 1 error, 2 verification failure.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use crate::arith::{lcm_u64, parse_rational, Q};
use crate::closedform::{self, recursion, Tail};
use crate::context::{Algebra, Context};
use crate::elliptic::{self, EllipticKind};
use crate::error::{Error, Result};
use crate::fockoracle;
use crate::lattice::{EvenLattice, LatticeVector};
use crate::modforms::{self, EisensteinKind};
use crate::qseries::FracQSeries;
use crate::state::parse_state;
use crate::verify::{self, ModularityParams, SuiteName, SuiteParams, VerificationReport};

#[derive(Parser, Debug)]
#[command(name = "zhutrace", version, about = "Exact 1-point trace functions of Heisenberg and lattice VOAs")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ContextArgs {
    /// Heisenberg rank with orthonormal generators.
    #[arg(long, conflicts_with = "gram")]
    pub rank: Option<usize>,
    /// JSON file `{"rank": k, "gram": [[..], ..]}` of an even lattice.
    #[arg(long)]
    pub gram: Option<PathBuf>,
}

impl ContextArgs {
    fn context(&self) -> Result<Context> {
        match (&self.gram, self.rank) {
            (Some(p), _) => Ok(Context::Lattice(EvenLattice::from_file(p)?)),
            (None, Some(k)) if k > 0 => Ok(Context::Heisenberg { rank: k }),
            (None, Some(_)) => Err(Error::Invalid("rank must be positive".into())),
            (None, None) => Err(Error::Invalid("give --rank or --gram".into())),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Method {
    Closed,
    Recursion,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum EisensteinChoice {
    E,
    F,
    Ehat,
    Fhat,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum EllipticChoice {
    P1,
    Q1,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Graded dimension of M, M+, M-, VL or VL+.
    Char {
        #[arg(long)]
        algebra: Algebra,
        #[command(flatten)]
        ctx: ContextArgs,
        #[arg(long, default_value_t = 20)]
        order: usize,
    },
    /// Closed-form or recursive trace of a state, e.g. `h1[-1] h1[-3] | g(2)`.
    Trace {
        #[arg(long)]
        algebra: Algebra,
        #[arg(long)]
        state: String,
        #[command(flatten)]
        ctx: ContextArgs,
        #[arg(long, default_value_t = 20)]
        order: usize,
        #[arg(long, value_enum, default_value_t = Method::Closed)]
        method: Method,
    },
    /// Literal trace over the Fock space, to q-order `max-weight + 1`.
    OracleTrace {
        #[arg(long)]
        algebra: Algebra,
        #[arg(long)]
        state: String,
        #[command(flatten)]
        ctx: ContextArgs,
        #[arg(long, default_value_t = 6)]
        max_weight: u32,
    },
    /// Runs a verification suite; exits 2 on failure.
    Verify {
        #[arg(long)]
        suite: SuiteName,
        #[command(flatten)]
        ctx: ContextArgs,
        #[arg(long, default_value_t = 6)]
        max_weight: u32,
        #[arg(long, default_value_t = 20)]
        order: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Lattice label of the tail suite, comma separated.
        #[arg(long)]
        alpha: Option<String>,
        /// Stop after this many seconds and report incomplete.
        #[arg(long)]
        budget_secs: Option<u64>,
    },
    /// Numeric modularity of `G(u)` on a lattice, or of an Eisenstein series.
    Modcheck {
        #[arg(long, required_unless_present = "eisenstein")]
        state: Option<String>,
        #[command(flatten)]
        ctx: ContextArgs,
        #[arg(long, value_enum, requires = "k")]
        eisenstein: Option<EisensteinChoice>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, default_value_t = 40)]
        order: usize,
        #[arg(long, default_value_t = 9)]
        samples: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
    /// `E_k`, `F_k` or the hat series `Ehat_{m,n}`, `Fhat_{m,n}`.
    Eisenstein {
        #[arg(long, value_enum)]
        kind: EisensteinChoice,
        #[arg(long, required_if_eq_any = [("kind", "e"), ("kind", "f")])]
        k: Option<u32>,
        #[arg(long, required_if_eq_any = [("kind", "ehat"), ("kind", "fhat")], requires = "n")]
        m: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value_t = 20)]
        order: usize,
    },
    /// `sum_a (v, a)^m q^{(a, a)/2}` over a lattice.
    Theta {
        #[arg(long)]
        gram: PathBuf,
        /// Comma-separated rationals in lattice coordinates.
        #[arg(long)]
        vector: String,
        #[arg(long, default_value_t = 0)]
        power: u32,
        #[arg(long, default_value_t = 20)]
        order: usize,
    },
    /// Laurent expansion of `P1^(m)` or `Q1^(m)` in z, optionally evaluated.
    Elliptic {
        #[arg(long, value_enum)]
        which: EllipticChoice,
        #[arg(long, default_value_t = 0)]
        m: u32,
        #[arg(long, default_value_t = 8)]
        z_order: i64,
        #[arg(long, default_value_t = 10)]
        q_order: usize,
        /// Evaluate at `z = re,im`.
        #[arg(long, requires = "tau", allow_hyphen_values = true)]
        z: Option<String>,
        /// Evaluate at `tau = re,im`.
        #[arg(long, requires = "z", allow_hyphen_values = true)]
        tau: Option<String>,
    },
}

/// Result of a successful run: text or JSON output and whether a check failed.
pub struct Outcome {
    pub output: String,
    pub verification_failed: bool,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome { output, verification_failed: false }
    }
}

fn series_output(json: bool, meta: serde_json::Value, s: &FracQSeries) -> String {
    if json {
        let mut v = meta;
        v["series"] = s.to_json();
        v.to_string()
    } else {
        s.to_string()
    }
}

fn report_output(json: bool, r: &VerificationReport) -> Outcome {
    let output = if json { r.to_json().to_string() } else { r.to_string().trim_end().to_string() };
    Outcome { output, verification_failed: !r.passed() }
}

fn rationals(s: &str) -> Result<Vec<Q>> {
    s.split(',').map(|x| parse_rational(x.trim())).collect()
}

fn integers(s: &str) -> Result<Vec<i64>> {
    s.split(',').map(|x| x.trim().parse().map_err(|_| Error::Invalid(format!("bad integer '{x}'")))).collect()
}

fn complex(s: &str) -> Result<Complex64> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse().map_err(|_| Error::Invalid(format!("bad number '{x}'"))))
        .collect::<Result<_>>()?;
    match v[..] {
        [re, im] => Ok(Complex64::new(re, im)),
        _ => Err(Error::Invalid(format!("expected 're,im', found '{s}'"))),
    }
}

fn eisenstein_series(
    kind: EisensteinChoice,
    k: Option<u32>,
    m: Option<u32>,
    n: Option<u32>,
    order: usize,
) -> Result<FracQSeries> {
    let need = |x: Option<u32>, name: &str| x.ok_or_else(|| Error::Invalid(format!("--{name} is required")));
    let even_k = |k: u32| {
        if k >= 2 && k % 2 == 0 {
            Ok(k)
        } else {
            Err(Error::Invalid(format!("weight {k} must be even and at least 2")))
        }
    };
    Ok(match kind {
        EisensteinChoice::E => modforms::eisenstein_e(even_k(need(k, "k")?)?, order),
        EisensteinChoice::F => modforms::eisenstein_f(even_k(need(k, "k")?)?, order),
        EisensteinChoice::Ehat | EisensteinChoice::Fhat => {
            let (m, n) = (need(m, "m")?, need(n, "n")?);
            if m == 0 || n == 0 {
                return Err(Error::Invalid("hat indices must be positive".into()));
            }
            let kind = if matches!(kind, EisensteinChoice::Ehat) { EisensteinKind::Ehat } else { EisensteinKind::Fhat };
            modforms::eisenstein_hat(kind, m, n, order)
        }
    })
}

/// Runs one parsed command.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let json = cli.json;
    match &cli.command {
        Command::Char { algebra, ctx, order } => {
            let c = ctx.context()?;
            let s = modforms::character(*algebra, &c, *order)?;
            Ok(Outcome::ok(series_output(json, json!({"algebra": algebra.to_string(), "context": c.to_string()}), &s)))
        }
        Command::Trace { algebra, state, ctx, order, method } => {
            let c = ctx.context()?;
            let word = parse_state(state, c.rank())?;
            let s = match method {
                Method::Closed => closedform::trace(*algebra, &word, &c, *order)?,
                Method::Recursion => recursion::recurse(*algebra, &word, &c, *order)?,
            };
            let meta = json!({"algebra": algebra.to_string(), "state": word.to_string(), "context": c.to_string(), "method": format!("{method:?}").to_lowercase()});
            Ok(Outcome::ok(series_output(json, meta, &s)))
        }
        Command::OracleTrace { algebra, state, ctx, max_weight } => {
            let c = ctx.context()?;
            let word = parse_state(state, c.rank())?;
            let s = fockoracle::graded_trace(*algebra, &c, &word, *max_weight as usize + 1)?;
            let meta = json!({"algebra": algebra.to_string(), "state": word.to_string(), "context": c.to_string(), "method": "oracle"});
            Ok(Outcome::ok(series_output(json, meta, &s)))
        }
        Command::Verify { suite, ctx, max_weight, order, tol, alpha, budget_secs } => {
            let mut p = SuiteParams::new(ctx.context()?).with_weight(*max_weight).with_order(*order);
            p.tol = *tol;
            p.tail_alpha = alpha.as_deref().map(integers).transpose()?.map(LatticeVector);
            p.budget = budget_secs.map(std::time::Duration::from_secs);
            Ok(report_output(json, &verify::run_suite(*suite, &p)?))
        }
        Command::Modcheck { state, ctx, eisenstein, k, order, samples, tol, seed } => {
            let (label, series, weight, level) = match (eisenstein, state) {
                (Some(kind), _) => {
                    let s = eisenstein_series(*kind, *k, None, None, *order)?;
                    let level = if matches!(kind, EisensteinChoice::F) { 2 } else { 1 };
                    (format!("{kind:?}_{}", k.unwrap_or(0)), s, k.unwrap_or(0) as f64, level)
                }
                (None, Some(expr)) => {
                    let c = ctx.context()?;
                    let l = c.require_lattice()?;
                    let word = parse_state(expr, c.rank())?;
                    if word.tail != Tail::Vacuum {
                        return Err(Error::UnsupportedTail("modcheck takes vacuum-tail states".into()));
                    }
                    let g = closedform::g_series(&word, l, *order)?;
                    (format!("G({word})"), g, word.weight() as f64, lcm_u64(2, l.level()))
                }
                (None, None) => return Err(Error::Invalid("give --state or --eisenstein".into())),
            };
            let p =
                ModularityParams { samples: *samples, tol: *tol, seed: *seed, ..ModularityParams::new(weight, level) };
            Ok(report_output(json, &verify::numeric_modularity_check(&label, &series, &p)))
        }
        Command::Eisenstein { kind, k, m, n, order } => {
            let s = eisenstein_series(*kind, *k, *m, *n, *order)?;
            Ok(Outcome::ok(series_output(json, json!({"kind": format!("{kind:?}"), "k": k, "m": m, "n": n}), &s)))
        }
        Command::Theta { gram, vector, power, order } => {
            let l = EvenLattice::from_file(gram)?;
            let v = rationals(vector)?;
            if v.len() != l.rank() {
                return Err(Error::DimensionMismatch { expected: l.rank(), found: v.len() });
            }
            let s = l.theta_vm(&v, *power, *order);
            Ok(Outcome::ok(series_output(json, json!({"vector": vector, "power": power}), &s)))
        }
        Command::Elliptic { which, m, z_order, q_order, z, tau } => {
            let kind = match which {
                EllipticChoice::P1 => EllipticKind::P1,
                EllipticChoice::Q1 => EllipticKind::Q1,
            };
            let s = elliptic::series(kind, *m, *z_order, *q_order);
            let value = match (z, tau) {
                (Some(z), Some(t)) => Some(s.eval(complex(z)?, complex(t)?)?.0),
                _ => None,
            };
            let output = if json {
                let mut v = json!({"which": format!("{which:?}"), "m": m, "laurent": s.to_json()});
                if let Some(x) = value {
                    v["value"] = json!([x.re, x.im]);
                }
                v.to_string()
            } else {
                match value {
                    Some(x) => format!("{s}\nvalue: {x}"),
                    None => s.to_string(),
                }
            };
            Ok(Outcome::ok(output))
        }
    }
}

/// Parses the process arguments and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(out) => {
            // a closed pipe is not an error of the computation
            let _ = writeln!(std::io::stdout().lock(), "{}", out.output);
            if out.verification_failed {
                2
            } else {
                0
            }
        }
        Err(e) => {
            if cli.json {
                eprintln!("{}", json!({"error": e.to_string()}));
            } else {
                eprintln!("error: {e}");
            }
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<Outcome> {
        run(&Cli::try_parse_from(std::iter::once("zhutrace").chain(args.iter().copied())).unwrap())
    }

    #[test]
    fn trace_methods_agree() {
        let a =
            run_args(&["trace", "--algebra", "M+", "--state", "h1[-1] h1[-3]", "--rank", "1", "--order", "8"]).unwrap();
        let b = run_args(&[
            "trace",
            "--algebra",
            "M+",
            "--state",
            "h1[-1] h1[-3]",
            "--rank",
            "1",
            "--order",
            "8",
            "--method",
            "recursion",
        ])
        .unwrap();
        assert_eq!(a.output, b.output);
    }

    #[test]
    fn missing_gram_file_is_an_error() {
        let e = run_args(&["char", "--algebra", "VL", "--gram", "/nonexistent.json"]).err().unwrap();
        assert!(e.to_string().starts_with("cannot read gram file"));
        assert_eq!(main_with_args(["zhutrace", "char", "--algebra", "VL", "--gram", "/nonexistent.json"]), 1);
    }

    #[test]
    fn eisenstein_json_round_trips() {
        let out = run_args(&["--json", "eisenstein", "--kind", "e", "--k", "4", "--order", "5"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.output).unwrap();
        assert_eq!(FracQSeries::from_json(&v["series"]).unwrap(), modforms::eisenstein_e(4, 5));
    }
}
