//! Parser for state expressions such as `h1[-2] h(1,1/2)[-1] | g(2,0)`.
//!
//! Grammar: `factor* ('|' tail)?` with `factor := 'h' INT '[-' INT ']' | 'h(' rationals ')[-' INT ']'`
//! and `tail := ('f' | 'g' | 'e') '(' ints ')'`. A lone `1` is the vacuum.

use num_traits::{One, Zero};

use crate::arith::{parse_rational, Q};
use crate::closedform::{BracketWord, Factor, Tail};
use crate::error::{Error, Result};
use crate::lattice::LatticeVector;

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.into() }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            Ok(())
        } else {
            Err(self.err(format!("expected '{s}'")))
        }
    }

    fn integer(&mut self) -> Result<(usize, i64)> {
        let start = self.pos;
        if self.peek() == Some('-') {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos]
            .parse()
            .map(|v| (start, v))
            .map_err(|_| Error::Syntax { pos: start, msg: "expected an integer".into() })
    }

    /// Text up to the closing parenthesis, split at commas.
    fn list(&mut self) -> Result<(usize, Vec<&'a str>)> {
        self.expect("(")?;
        let start = self.pos;
        let Some(len) = self.src[start..].find(')') else {
            return Err(self.err("unclosed '('"));
        };
        self.pos = start + len + 1;
        let body = &self.src[start..start + len];
        Ok((start, body.split(',').map(str::trim).collect()))
    }
}

fn factor(cur: &mut Cursor<'_>, rank: usize) -> Result<Factor> {
    cur.expect("h")?;
    let vector = if cur.peek() == Some('(') {
        let (at, items) = cur.list()?;
        if items.len() != rank {
            return Err(Error::InvalidState(format!("vector at {at} has {} entries, rank is {rank}", items.len())));
        }
        items
            .iter()
            .map(|s| parse_rational(s).map_err(|_| Error::Syntax { pos: at, msg: format!("bad rational '{s}'") }))
            .collect::<Result<Vec<Q>>>()?
    } else {
        let (at, color) = cur.integer()?;
        if color < 1 || color as usize > rank {
            return Err(Error::InvalidState(format!("color {color} at {at} outside 1..={rank}")));
        }
        (0..rank).map(|i| if i + 1 == color as usize { Q::one() } else { Q::zero() }).collect()
    };
    cur.expect("[")?;
    let (at, n) = cur.integer()?;
    cur.expect("]")?;
    // the mode is written as -n with n >= 1
    if n >= 0 {
        return Err(Error::InvalidState(format!("mode at {at} must be -n with n >= 1, found {n}")));
    }
    Ok(Factor::new(vector, (-n) as u32))
}

fn tail(cur: &mut Cursor<'_>, rank: usize) -> Result<Tail> {
    let at = cur.pos;
    let kind = cur.peek().ok_or_else(|| cur.err("expected a tail after '|'"))?;
    cur.pos += kind.len_utf8();
    let (list_at, items) = cur.list()?;
    if items.len() != rank {
        return Err(Error::InvalidState(format!("tail at {at} has {} entries, rank is {rank}", items.len())));
    }
    let coords = items
        .iter()
        .map(|s| s.parse::<i64>().map_err(|_| Error::Syntax { pos: list_at, msg: format!("bad integer '{s}'") }))
        .collect::<Result<Vec<i64>>>()?;
    let a = LatticeVector(coords);
    match kind {
        'f' | 'g' if a.is_zero() => Err(Error::InvalidState(format!("tail at {at} needs a nonzero lattice vector"))),
        'f' => Ok(Tail::F(a)),
        'g' => Ok(Tail::G(a)),
        'e' => Ok(Tail::E(a)),
        c => Err(Error::Syntax { pos: at, msg: format!("unknown tail '{c}'") }),
    }
}

/// Parses a state expression over rank `rank`.
pub fn parse_state(expr: &str, rank: usize) -> Result<BracketWord> {
    let mut cur = Cursor { src: expr, pos: 0 };
    let mut factors = Vec::new();
    let mut t = Tail::Vacuum;
    cur.skip_ws();
    if cur.src[cur.pos..].trim() == "1" {
        return Ok(BracketWord::vacuum(factors));
    }
    loop {
        cur.skip_ws();
        match cur.peek() {
            None => break,
            Some('h') => factors.push(factor(&mut cur, rank)?),
            Some('|') => {
                cur.pos += 1;
                cur.skip_ws();
                t = tail(&mut cur, rank)?;
                cur.skip_ws();
                if cur.peek().is_some() {
                    return Err(cur.err("unexpected text after the tail"));
                }
                break;
            }
            Some(c) => return Err(cur.err(format!("unexpected '{c}'"))),
        }
    }
    Ok(BracketWord::new(factors, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{frac, q};

    #[test]
    fn plain_factors() {
        let w = parse_state("h1[-2] h1[-4]", 1).unwrap();
        assert_eq!(w, BracketWord::vacuum(vec![Factor::new(vec![q(1)], 2), Factor::new(vec![q(1)], 4)]));
    }

    #[test]
    fn tails_and_explicit_vectors() {
        let w = parse_state("h1[-1] | g(2)", 1).unwrap();
        assert_eq!(w.tail, Tail::G(LatticeVector(vec![2])));
        let w = parse_state("h(1, -1/2)[-3]|e(1,0)", 2).unwrap();
        assert_eq!(w.factors[0].vector, vec![q(1), frac(-1, 2)]);
        assert_eq!(w.tail, Tail::E(LatticeVector(vec![1, 0])));
        assert!(parse_state("1", 3).unwrap().is_empty());
        assert!(parse_state("", 3).unwrap().is_empty());
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_state("h1[0]", 1), Err(Error::InvalidState(_))));
        assert!(matches!(parse_state("h3[-1]", 2), Err(Error::InvalidState(_))));
        assert!(matches!(parse_state("h1[-1] | f(0)", 1), Err(Error::InvalidState(_))));
        assert!(matches!(parse_state("h1[-1] | f(1,2)", 1), Err(Error::InvalidState(_))));
        assert_eq!(parse_state("h1[-1] x", 1), Err(Error::Syntax { pos: 7, msg: "unexpected 'x'".into() }));
        assert!(matches!(parse_state("h1(-1]", 1), Err(Error::Syntax { pos: 2, .. })));
    }
}
