//! Parsing state expressions, including the error positions.

use zhutrace::state::parse_state;

fn main() {
    for expr in ["h1[-2] h2[-1]", "h(1,1/2)[-3] | f(1,0)", "h3[-1]", "h1[-1] x"] {
        match parse_state(expr, 2) {
            Ok(w) => println!("{expr:24} -> {w} (weight {})", w.weight()),
            Err(e) => println!("{expr:24} -> {e}"),
        }
    }
}
