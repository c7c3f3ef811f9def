//! shiftlab: exact-arithmetic decision procedures for weighted shifts.
//!
//! This crate decides hyponormality, `k`-hyponormality and subnormality
//! for one-variable weighted shifts and commuting pairs of two-variable
//! weighted shifts, entirely over certified arithmetic (exact rationals
//! with an interval fallback for the few genuinely irrational quantities).
//! It implements the Berger-measure calculus for subnormal shifts — atom +
//! power-law-piece measures, `t`-weighted pushforwards, power
//! decompositions, backward extensions — and the family constructions and
//! threshold curves built on top of it, with machine-checkable
//! certificates for every verdict.
//!
//! Layers, bottom up:
//!
//! * [`numerics`] — scalars, PSD testing, bisection;
//! * [`measures`] — one- and two-dimensional Berger-type measures;
//! * [`shift1`] — one-variable weight sequences and their tests;
//! * [`shift2`] — two-variable weight fields, pair tests, tensor-core
//!   pipeline and power decompositions;
//! * [`families`] — named parametric families, threshold curves, region
//!   classification and the named verification suites;
//! * [`cli`] — the `shiftlab` command-line interface.

#![forbid(unsafe_code)]

pub mod cli;
pub mod error;
pub mod families;
pub mod measures;
pub mod numerics;
pub mod shift1;
pub mod shift2;

pub use error::{Error, Result};
pub use numerics::{Rat, Scalar};
