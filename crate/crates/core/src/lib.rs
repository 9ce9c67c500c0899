//! Twisted Mellin transforms, lattice-polytope Euler–Maclaurin sums and the
//! distribution laws of monomial states in Bargmann space.

// `!(x > 0.0)` rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bargmann;
pub mod distribution;
pub mod error;
pub mod gk;
pub mod mellin;
pub mod poly;
pub mod polytope;
pub mod quadrature;
pub mod report;
pub mod special;
pub mod summation;

pub use error::{Error, Result};
pub use poly::RationalPolynomial;
