//! Closed-form threshold curves for the two-parameter lattice family.
//!
//! The family built by [`crate::families::figure0`] is governed, inside the
//! parameter square `0 < a, κ <= 1`, by four boundary curves.  Writing
//! `x = a²`, their squares are rational functions of `x`:
//!
//! * `h_1²(x)  = (32 − 48x²)/(59 − 72x)` — hyponormality of the pair,
//! * `h_2²(x)  = (81 − 144x)/(157 − 360x + 144x²)` — 2-hyponormality,
//! * `h_∞²(x)  = 1/(2 − x)` — subnormality,
//! * `h_21²(x) = (27 − 45x²)/(47 − 60x)` — hyponormality of `(T_1², T_2)`.
//!
//! Because the squares are rational, every membership test (`κ <= h(a)`)
//! reduces to an exact sign evaluation of a polynomial in `(x, κ²)`; no
//! rounding enters.  The denominators are positive on the stated domains,
//! which are checked up front and reported in the error message.
//!
//! The curves `h_1` and `h_21` cross exactly once in the interior of their
//! common domain.  The difference `h_1² − h_21²` has the sign of the cubic
//! `c(x) = −360x³ + 399x² + 24x − 89` (the cross-multiplied numerator; see
//! [`crossing_cubic`]), so the crossing abscissa is located by exact
//! bisection on the cubic's sign and [`a_int`] returns a certified
//! enclosure of its square root.

use crate::error::{Error, Result};
use crate::numerics::bisect::bisect_threshold;
use crate::numerics::scalar::{rat, rat_int, Rat, Scalar};
use num_traits::{Signed, Zero};

/// One of the four named threshold curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curve {
    /// Hyponormality boundary `h_1`.
    H1,
    /// 2-hyponormality boundary `h_2`.
    H2,
    /// Hyponormality boundary `h_21` of the power pair `(T_1², T_2)`.
    H21,
    /// Subnormality boundary `h_∞`.
    HInf,
}

impl Curve {
    /// Parse a CLI token (`h1`, `h2`, `h21`, `hinf`).
    pub fn parse(token: &str) -> Result<Curve> {
        match token {
            "h1" => Ok(Curve::H1),
            "h2" => Ok(Curve::H2),
            "h21" => Ok(Curve::H21),
            "hinf" => Ok(Curve::HInf),
            other => Err(Error::Invalid(format!(
                "unknown curve `{other}`; expected one of h1, h2, h21, hinf"
            ))),
        }
    }

    /// Printable name.
    pub fn name(&self) -> &'static str {
        match self {
            Curve::H1 => "h1",
            Curve::H2 => "h2",
            Curve::H21 => "h21",
            Curve::HInf => "hinf",
        }
    }

    /// Printable domain of the curve as a condition on `a`.
    pub fn domain(&self) -> &'static str {
        match self {
            Curve::H1 => "(0, (2/3)^(1/4)]",
            Curve::H2 => "(0, (1/2)^(1/2)]",
            Curve::H21 => "(0, (3/5)^(1/4)]",
            Curve::HInf => "(0, (1/2)^(1/2)]",
        }
    }

    /// Squared curve value at `a² = a_sq`.
    pub fn value_sq(&self, a_sq: &Rat) -> Result<Rat> {
        match self {
            Curve::H1 => h1_sq(a_sq),
            Curve::H2 => h2_sq(a_sq),
            Curve::H21 => h21_sq(a_sq),
            Curve::HInf => hinf_sq(a_sq),
        }
    }

    /// Curve value at `a² = a_sq` as a certified enclosure (exact when the
    /// square is a perfect square).
    pub fn value(&self, a_sq: &Rat) -> Result<Scalar> {
        Scalar::from(self.value_sq(a_sq)?).sqrt()
    }
}

fn check_domain(curve: Curve, a_sq: &Rat, ok: bool) -> Result<()> {
    if !a_sq.is_positive() || !ok {
        return Err(Error::Domain(format!(
            "{} is defined for a in {}; got a² = {}",
            curve.name(),
            curve.domain(),
            a_sq
        )));
    }
    Ok(())
}

/// `h_1²(a²) = (32 − 48a⁴)/(59 − 72a²)` on `a ∈ (0, (2/3)^(1/4)]`.
pub fn h1_sq(a_sq: &Rat) -> Result<Rat> {
    let x = a_sq;
    check_domain(Curve::H1, x, x * x <= rat(2, 3))?;
    Ok((rat_int(32) - rat_int(48) * x * x) / (rat_int(59) - rat_int(72) * x))
}

/// `h_2²(a²) = (81 − 144a²)/(157 − 360a² + 144a⁴)` on `a ∈ (0, (1/2)^(1/2)]`.
pub fn h2_sq(a_sq: &Rat) -> Result<Rat> {
    let x = a_sq;
    check_domain(Curve::H2, x, *x <= rat(1, 2))?;
    Ok((rat_int(81) - rat_int(144) * x)
        / (rat_int(157) - rat_int(360) * x + rat_int(144) * x * x))
}

/// `h_21²(a²) = (27 − 45a⁴)/(47 − 60a²)` on `a ∈ (0, (3/5)^(1/4)]`.
pub fn h21_sq(a_sq: &Rat) -> Result<Rat> {
    let x = a_sq;
    check_domain(Curve::H21, x, x * x <= rat(3, 5))?;
    Ok((rat_int(27) - rat_int(45) * x * x) / (rat_int(47) - rat_int(60) * x))
}

/// `h_∞²(a²) = 1/(2 − a²)` on `a ∈ (0, (1/2)^(1/2)]`.
pub fn hinf_sq(a_sq: &Rat) -> Result<Rat> {
    let x = a_sq;
    check_domain(Curve::HInf, x, *x <= rat(1, 2))?;
    Ok(rat_int(1) / (rat_int(2) - x))
}

/// Hyponormality membership `κ <= h_1(a)` as an exact sign test:
/// `(72a² − 59)κ² + 32 − 48a⁴ >= 0`.  Errors outside the `h_1` domain.
pub fn in_h1(a_sq: &Rat, kappa_sq: &Rat) -> Result<bool> {
    let x = a_sq;
    check_domain(Curve::H1, x, x * x <= rat(2, 3))?;
    Ok((rat_int(72) * x - rat_int(59)) * kappa_sq + rat_int(32) - rat_int(48) * x * x
        >= Rat::zero())
}

/// The power-pair sign polynomial
/// `h(a, κ) = (60a² − 47)κ² + 27 − 45a⁴`; its sign decides `κ <= h_21(a)`
/// on the `h_21` domain.
pub fn power21_poly(a_sq: &Rat, kappa_sq: &Rat) -> Rat {
    let x = a_sq;
    (rat_int(60) * x - rat_int(47)) * kappa_sq + rat_int(27) - rat_int(45) * x * x
}

/// Membership `κ <= h_21(a)`.  Errors outside the `h_21` domain.
pub fn in_h21(a_sq: &Rat, kappa_sq: &Rat) -> Result<bool> {
    let x = a_sq;
    check_domain(Curve::H21, x, x * x <= rat(3, 5))?;
    Ok(power21_poly(a_sq, kappa_sq) >= Rat::zero())
}

/// Membership `κ <= h_2(a)`, total over the parameter square: the
/// 2-hyponormality region is empty for `a² > 1/2`.
pub fn in_h2(a_sq: &Rat, kappa_sq: &Rat) -> bool {
    let x = a_sq;
    if *x > rat(1, 2) {
        return false;
    }
    kappa_sq * (rat_int(157) - rat_int(360) * x + rat_int(144) * x * x)
        <= rat_int(81) - rat_int(144) * x
}

/// Membership `κ <= h_∞(a)`, total over the parameter square: the
/// subnormality region is empty for `a² > 1/2`.
pub fn in_hinf(a_sq: &Rat, kappa_sq: &Rat) -> bool {
    let x = a_sq;
    *x <= rat(1, 2) && kappa_sq * (rat_int(2) - x) <= rat_int(1)
}

/// The crossing cubic `c(x) = −360x³ + 399x² + 24x − 89`, `x = a²`.
///
/// Cross-multiplying `h_1²(x) − h_21²(x)` over the common domain (where
/// both denominators are positive) gives exactly
/// `(32 − 48x²)(47 − 60x) − (27 − 45x²)(59 − 72x) = c(x)`, so
/// `sign(h_1² − h_21²) = sign(c)` there.
pub fn crossing_cubic(x: &Rat) -> Rat {
    rat_int(-360) * x * x * x + rat_int(399) * x * x + rat_int(24) * x - rat_int(89)
}

/// Exact sign of `h_1²(a²) − h_21²(a²)` on the common domain, cross-checked
/// against [`crossing_cubic`].  Returns −1, 0 or +1.
pub fn h1_minus_h21_sign(a_sq: &Rat) -> Result<i8> {
    let diff = h1_sq(a_sq)? - h21_sq(a_sq)?;
    let s = if diff.is_positive() {
        1
    } else if diff == Rat::zero() {
        0
    } else {
        -1
    };
    let c = crossing_cubic(a_sq);
    let cs = if c.is_positive() {
        1
    } else if c == Rat::zero() {
        0
    } else {
        -1
    };
    if s != cs {
        // Unreachable by the algebraic identity; a disagreement would mean
        // one of the two formulas is mistyped.
        return Err(Error::Mismatch(format!(
            "curve difference and crossing cubic disagree at a² = {a_sq}"
        )));
    }
    Ok(s)
}

/// Square of the crossing abscissa of `h_1` and `h_21`, by bisection on
/// the sign of [`crossing_cubic`] over `[3/5, 77/100]`, to within `tol`.
pub fn a_int_sq(tol: &Rat) -> Result<Rat> {
    bisect_threshold(
        |x| Ok(crossing_cubic(x) < Rat::zero()),
        &rat(3, 5),
        &rat(77, 100),
        tol,
    )
}

/// The crossing abscissa `a_int` itself (where `h_1 = h_21`), as a
/// certified enclosure with error below `tol`.
pub fn a_int(tol: &Rat) -> Result<Scalar> {
    // An x-bracket of width tol maps to an a-bracket narrower than tol:
    // a = √x and the crossing lies above x = 3/5, so |da| <= |dx|/(2·√(3/5)).
    let x = a_int_sq(tol)?;
    Scalar::from(x).sqrt()
}

// ==== tests ====
