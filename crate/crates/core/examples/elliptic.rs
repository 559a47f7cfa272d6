//! Laurent expansion of P1 and its value at one point, from the series and the product.

use num_complex::Complex64;
use zhutrace::elliptic::{p1_product_eval, series, EllipticKind};
use zhutrace::Result;

fn main() -> Result<()> {
    let s = series(EllipticKind::P1, 0, 5, 6);
    println!("P1 = {s}");
    let (z, tau) = (Complex64::new(0.3, 0.2), Complex64::new(0.1, 1.0));
    println!("Laurent value  {}", series(EllipticKind::P1, 0, 16, 30).eval(z, tau)?.0);
    println!("product value  {}", p1_product_eval(z, tau, 200)?.0);
    Ok(())
}
