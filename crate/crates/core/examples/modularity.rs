//! Numeric weight-4 check of G(h[-1]^2 h[-2]) for L = A1 at level 4.

use zhutrace::closedform::g_series;
use zhutrace::lattice::EvenLattice;
use zhutrace::state::parse_state;
use zhutrace::verify::{numeric_modularity_check, ModularityParams};
use zhutrace::Result;

fn main() -> Result<()> {
    let l = EvenLattice::a1();
    let u = parse_state("h1[-1] h1[-1] h1[-2]", 1)?;
    let g = g_series(&u, &l, 40)?;
    let report = numeric_modularity_check("G(u)", &g, &ModularityParams::new(u.weight() as f64, 4));
    print!("{report}");
    Ok(())
}
