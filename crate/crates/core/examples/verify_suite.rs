//! Runs the Heisenberg equivalence suite at rank 2 and prints the report.

use zhutrace::verify::{run_suite, SuiteName, SuiteParams};
use zhutrace::{Context, Result};

fn main() -> Result<()> {
    let p = SuiteParams::new(Context::Heisenberg { rank: 2 }).with_weight(4).with_order(10);
    let report = run_suite(SuiteName::Heisenberg, &p)?;
    print!("{report}");
    Ok(())
}
