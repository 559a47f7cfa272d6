//! Fixed-point-free involutions of four slots: the pairings behind the closed forms.

use zhutrace::combinatorics::fixed_point_free_involutions;

fn main() {
    for s in fixed_point_free_involutions(&[0, 1, 2, 3]) {
        println!("{:?}", s.pairs);
    }
}
