//! Which algebra a trace runs over, and the data it needs.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::arith::Q;
use crate::error::{Error, Result};
use crate::lattice::EvenLattice;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algebra {
    /// Heisenberg algebra of rank k.
    M,
    /// Its even-parity fixed points.
    MPlus,
    /// Its odd-parity part (a module, not a subalgebra).
    MMinus,
    /// Lattice algebra.
    VL,
    /// Fixed points of the lattice algebra.
    VLPlus,
}

impl Algebra {
    pub fn needs_lattice(self) -> bool {
        matches!(self, Algebra::VL | Algebra::VLPlus)
    }
}

impl FromStr for Algebra {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "M" => Ok(Algebra::M),
            "M+" | "Mplus" => Ok(Algebra::MPlus),
            "M-" | "Mminus" => Ok(Algebra::MMinus),
            "VL" => Ok(Algebra::VL),
            "VL+" | "VLplus" => Ok(Algebra::VLPlus),
            _ => Err(Error::Invalid(format!("unknown algebra '{s}'"))),
        }
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algebra::M => "M",
            Algebra::MPlus => "M+",
            Algebra::MMinus => "M-",
            Algebra::VL => "VL",
            Algebra::VLPlus => "VL+",
        })
    }
}

/// Either a bare Heisenberg rank (orthonormal generators) or an even lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Context {
    Heisenberg { rank: usize },
    Lattice(EvenLattice),
}

impl Context {
    pub fn rank(&self) -> usize {
        match self {
            Context::Heisenberg { rank } => *rank,
            Context::Lattice(l) => l.rank(),
        }
    }

    pub fn lattice(&self) -> Option<&EvenLattice> {
        match self {
            Context::Lattice(l) => Some(l),
            Context::Heisenberg { .. } => None,
        }
    }

    pub fn require_lattice(&self) -> Result<&EvenLattice> {
        self.lattice().ok_or_else(|| Error::Invalid("a lattice is required for this algebra".into()))
    }

    /// Pairing matrix of the coordinate basis: identity for Heisenberg, Gram for lattices.
    pub fn gram(&self) -> Vec<Vec<Q>> {
        match self {
            Context::Heisenberg { rank } => {
                (0..*rank).map(|i| (0..*rank).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect()
            }
            Context::Lattice(l) => l.gram_q(),
        }
    }

    /// `v^T G w` in this context's coordinates.
    pub fn pairing(&self, v: &[Q], w: &[Q]) -> Result<Q> {
        pairing(v, w, &self.gram())
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Context::Heisenberg { rank } => write!(f, "rank {rank}"),
            Context::Lattice(l) => write!(f, "gram {:?}", l.gram()),
        }
    }
}

/// `v^T G w`.
pub fn pairing(v: &[Q], w: &[Q], gram: &[Vec<Q>]) -> Result<Q> {
    let k = gram.len();
    for x in [v, w] {
        if x.len() != k {
            return Err(Error::DimensionMismatch { expected: k, found: x.len() });
        }
    }
    let mut s = Q::zero();
    for i in 0..k {
        if v[i].is_zero() {
            continue;
        }
        for j in 0..k {
            if !w[j].is_zero() && !gram[i][j].is_zero() {
                s += &v[i] * &gram[i][j] * &w[j];
            }
        }
    }
    Ok(s)
}
