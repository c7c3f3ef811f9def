//! Berger-type measures in one and two variables.
//!
//! * [`one`] — atoms + power pieces on `[0, ∞)`: moments, `1/t`
//!   functionals, `t`-weighted and power pushforwards, certified
//!   domination;
//! * [`two`] — finite sums of product terms on `[0, ∞)^2`: mixed
//!   moments, the vertical `1/t` functional, extremal measures and
//!   marginals.

pub mod one;
pub mod two;

pub use one::{Atom, Measure1D, Norm, Piece, Trilean};
pub use two::Measure2D;
