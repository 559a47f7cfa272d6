//! Theta series of A2 and the weighted sum over (v, a)^2.

use zhutrace::arith::q;
use zhutrace::lattice::EvenLattice;

fn main() {
    let l = EvenLattice::a2();
    println!("level {}", l.level());
    println!("theta      = {}", l.theta(6));
    println!("theta_v,2  = {}", l.theta_vm(&[q(1), q(0)], 2, 6));
}
