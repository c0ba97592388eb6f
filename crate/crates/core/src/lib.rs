//! Symbolic verification of the group classification of nonlinear wave
//! equations `u_tt = f(x,u_x) u_xx + g(x,u_x)`.
//!
//! The crate is layered: [`expr`] is an exact computer-algebra core,
//! [`vecfield`] adds vector fields, prolongation and point transformations,
//! [`liealg`] analyses finite-dimensional Lie algebras, [`detsys`] builds and
//! solves determining equations, and [`classif`] holds the catalog of results
//! together with the drivers that check them.

pub mod classif;
pub mod detsys;
pub mod expr;
pub mod liealg;
pub mod vecfield;

/// Exact rational scalar used throughout.
pub type Rational = num_rational::BigRational;
/// Short alias for [`Rational`].
pub type Q = Rational;

pub use expr::{Chart, Expr, Symbol, Verdict};
pub use liealg::Scalar;
pub use vecfield::VectorField;

/// Build a rational from numerator and denominator.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Build an integer rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}
