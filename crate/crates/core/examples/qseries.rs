//! Exact q-series arithmetic: 1/eta to q^10 and a product check.

use zhutrace::modforms::eta;
use zhutrace::Result;

fn main() -> Result<()> {
    let e = eta(12);
    let inv = e.inv()?;
    println!("1/eta      = {inv}");
    println!("eta * 1/eta = {}", e.mul(&inv));
    Ok(())
}
