//! Eisenstein series in the normalization E_k = -B_k/k! + ..., and a hat series.

use zhutrace::modforms::{eisenstein_e, eisenstein_f, eisenstein_hat, EisensteinKind};

fn main() {
    for k in [2, 4, 6] {
        println!("E_{k} = {}", eisenstein_e(k, 6));
    }
    println!("F_2 = {}", eisenstein_f(2, 6));
    println!("Ehat_(1,3) = {}", eisenstein_hat(EisensteinKind::Ehat, 1, 3, 6));
}
