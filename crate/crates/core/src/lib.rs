//! Exact enumeration and asymptotic analysis of extensions of simple
//! `Q`-algebras through their local Brauer invariants.

pub mod analytic;
pub mod arith;
pub mod brauer;
pub mod census;
pub mod error;
pub mod outer;
pub mod perm;
pub mod residue;
pub mod setup;

pub use error::{Error, ErrorKind, Result};

/// Exact rationals for class-function values and exponents.
pub type Q = num_rational::Rational64;
