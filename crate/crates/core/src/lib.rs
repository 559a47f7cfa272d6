//! Exact 1-point trace functions of Heisenberg and lattice vertex operator algebras
//! and of their fixed-point subalgebras under the involution `h -> -h`.
//!
//! Every trace is produced as a [`FracQSeries`] with exact rational coefficients, along
//! three independent routes: closed-form involution sums ([`closedform`]), the untwisted
//! and twisted Zhu recursions ([`closedform::recursion`]) and a literal Fock-space trace
//! ([`fockoracle`]). The [`verify`] module compares them and checks modularity numerically.

pub mod arith;
pub mod cli;
pub mod closedform;
pub mod combinatorics;
pub mod context;
pub mod elliptic;
pub mod error;
pub mod fockoracle;
pub mod lattice;
pub mod modforms;
pub mod qseries;
pub mod state;
pub mod verify;

pub use arith::Q;
pub use closedform::{BracketWord, Tail};
pub use context::{Algebra, Context};
pub use error::{Error, Result};
pub use lattice::{EvenLattice, LatticeVector};
pub use qseries::FracQSeries;
