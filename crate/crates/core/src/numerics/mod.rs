//! Certified numerics: dual-track scalars, symmetric-matrix PSD testing,
//! and reproducible bisection.
//!
//! * [`scalar`] — exact rationals with a certified interval fallback;
//! * [`matrix`] — symmetric matrices and the witness-producing PSD test;
//! * [`bisect`] — monotone threshold location with checked preconditions.

pub mod bisect;
pub mod matrix;
pub mod scalar;

pub use bisect::bisect_threshold;
pub use matrix::{
    det_sign, principal_minor, psd_check, verify_psd_witness, PsdStatus, PsdVerdict, PsdWitness,
    SymMatrix,
};
pub use scalar::{
    ln_enclosure, parse_rat, pow_rat, rat, rat_int, rat_to_decimal, rat_to_string, working_bits,
    Rat, Scalar,
};
