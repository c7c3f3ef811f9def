//! Named weight-field families, their closed-form threshold curves, and
//! the scripted verification suites.
//!
//! * [`curves`] — exact rational threshold curves `h_1, h_2, h_21, h_∞`
//!   and the `h_1`/`h_21` crossing point;
//! * [`figure0`] — the two-parameter `(a, κ)` lattice family, its builder
//!   and the region classifier;
//! * [`exam`] — the three-parameter `(x, a, y)` family with a continuous
//!   column measure, its closed-form bounds and monomial-product tests;
//! * [`flat`] — the backward-extension family with doubly-flat interior,
//!   its minimum-formula subnormality criterion and the generic-pipeline
//!   cross-check;
//! * [`tc_gen`] — seeded random generators for tensor-core parameter sets
//!   and their realizations as weight fields;
//! * [`verify`] — the named check suites exposed by `shiftlab verify`.

pub mod curves;
pub mod exam;
pub mod figure0;
pub mod flat;
pub mod tc_gen;
pub mod verify;

pub use curves::{
    a_int, a_int_sq, crossing_cubic, h1_minus_h21_sign, h1_sq, h21_sq, h2_sq, hinf_sq, in_h1,
    in_h2, in_h21, in_hinf, power21_poly, Curve,
};
