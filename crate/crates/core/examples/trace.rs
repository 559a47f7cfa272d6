//! Closed-form and recursive traces of h[-1] h[-1] on M and M+.

use zhutrace::closedform::{recursion::recurse, trace};
use zhutrace::state::parse_state;
use zhutrace::{Algebra, Context, Result};

fn main() -> Result<()> {
    let ctx = Context::Heisenberg { rank: 1 };
    let u = parse_state("h1[-1] h1[-1]", 1)?;
    for alg in [Algebra::M, Algebra::MPlus] {
        let closed = trace(alg, &u, &ctx, 8)?;
        assert_eq!(closed, recurse(alg, &u, &ctx, 8)?);
        println!("Z_{alg}({u}) = {closed}");
    }
    Ok(())
}
