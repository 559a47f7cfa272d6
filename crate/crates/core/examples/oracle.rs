//! Literal Fock-space trace of a lattice-tail state on V_L+ for L = A1.

use zhutrace::closedform;
use zhutrace::fockoracle::graded_trace;
use zhutrace::lattice::EvenLattice;
use zhutrace::state::parse_state;
use zhutrace::{Algebra, Context, Result};

fn main() -> Result<()> {
    let ctx = Context::Lattice(EvenLattice::a1());
    let u = parse_state("h1[-2] | g(2)", 1)?;
    let oracle = graded_trace(Algebra::VLPlus, &ctx, &u, 6)?;
    println!("oracle      {oracle}");
    println!("closed form {}", closedform::trace(Algebra::VLPlus, &u, &ctx, 6)?);
    Ok(())
}
