//! Dual-track scalar arithmetic: exact rationals with a certified interval
//! fallback.
//!
//! Every quantity in this crate is a [`Scalar`], which is either
//!
//! * `Exact(q)` — an arbitrary-precision rational, used whenever a value is
//!   rational by construction, or
//! * `Interval { lo, hi }` — a closed enclosure `[lo, hi]` with rational
//!   endpoints, used the moment an irrational function (square roots of
//!   non-squares, logarithms, q-th roots) enters a computation.
//!
//! The interval track is *certifying*: the true value is guaranteed to lie
//! inside the enclosure, and all comparisons return `Option`/[`None`] when
//! the enclosures overlap rather than guessing.  Nothing in the crate ever
//! silently converts to floating point.
//!
//! Endpoint denominators are kept bounded by rounding them outward onto the
//! dyadic grid `k / 2^W` where `W` is the working precision: the value of
//! the `SHIFTLAB_PRECISION_BITS` environment variable (default 64) plus 32
//! guard bits.  Outward rounding preserves the enclosure guarantee.
//!
//! Main items:
//!
//! * [`Scalar`] — the scalar type with full arithmetic, certified
//!   comparisons, powers, roots and logarithms;
//! * [`pow_rat`] — `base^e` for rational `base >= 0` and rational `e`,
//!   exact whenever the result is rational;
//! * [`ln_enclosure`] — natural logarithm via the `atanh` series;
//! * [`parse_rat`] / [`rat_to_string`] — exact text round-trip for
//!   rationals ("p/q", integer, or decimal literals; never via floats).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
pub type Rat = num_rational::BigRational;

/// Number of guard bits added on top of the user-selected precision.
pub const GUARD_BITS: u64 = 32;

/// Default fractional precision (bits) when `SHIFTLAB_PRECISION_BITS` is unset.
pub const DEFAULT_PRECISION_BITS: u64 = 64;

static PRECISION: OnceLock<u64> = OnceLock::new();

/// Working precision in fractional bits: `SHIFTLAB_PRECISION_BITS`
/// (default 64) plus [`GUARD_BITS`].  Read once per process.
pub fn working_bits() -> u64 {
    *PRECISION.get_or_init(|| {
        let base = std::env::var("SHIFTLAB_PRECISION_BITS")
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .filter(|&v| v >= 8 && v <= 1 << 20)
            .unwrap_or(DEFAULT_PRECISION_BITS);
        base + GUARD_BITS
    })
}

/// Convenience constructor for small rationals.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Integer-valued rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Canonical text form of a rational: `"p"` when the denominator is 1,
/// `"p/q"` otherwise.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse a rational from text.  Accepted forms: `"p/q"`, an integer, a
/// decimal literal (`"-0.25"`), or a decimal with exponent (`"3e-2"`).
/// Parsing is exact; no float conversion is involved.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim())
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d = BigInt::from_str(den.trim())
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(n, d));
    }
    // Decimal / scientific form: mantissa [.fraction] [e exponent]
    let (mantissa, exp10) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp = i64::from_str(e.trim())
                .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
            (m.trim(), exp)
        }
        None => (s, 0i64),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let negative = int_part.starts_with('-');
    let digits: String = format!(
        "{}{}",
        int_part.trim_start_matches(['+', '-']),
        frac_part
    );
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("bad rational literal {s:?}")));
    }
    let mut n = BigInt::from_str(&digits).map_err(|_| Error::Parse(format!("bad digits in {s:?}")))?;
    if negative {
        n = -n;
    }
    let shift = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let r = if shift >= 0 {
        Rat::from_integer(n * ten.pow(shift as u32))
    } else {
        Rat::new(n, ten.pow((-shift) as u32))
    };
    Ok(r)
}

/// Fixed-point decimal rendering of a rational, exact long division.
/// Produces `digits` fractional digits, then trims trailing zeros (keeping
/// at least one digit after the point).  Deterministic; never uses floats.
pub fn rat_to_decimal(r: &Rat, digits: usize) -> String {
    let neg = r.is_negative();
    let a = r.abs();
    let int = a.numer() / a.denom();
    let mut rem = a.numer() - &int * a.denom();
    let mut frac = String::with_capacity(digits);
    let ten = BigInt::from(10);
    for _ in 0..digits {
        rem *= &ten;
        let d = &rem / a.denom();
        rem -= &d * a.denom();
        frac.push(char::from(b'0' + d.to_u8().unwrap_or(0)));
    }
    while frac.len() > 1 && frac.ends_with('0') {
        frac.pop();
    }
    let sign = if neg && (!int.is_zero() || frac.bytes().any(|b| b != b'0')) {
        "-"
    } else {
        ""
    };
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// A scalar on the dual track: exact rational, or certified enclosure.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    /// Exactly-known rational value.
    Exact(Rat),
    /// Certified enclosure: the true value lies in `[lo, hi]`.
    Interval { lo: Rat, hi: Rat },
}

impl Scalar {
    /// The exact zero.
    pub fn zero() -> Self {
        Scalar::Exact(Rat::zero())
    }

    /// The exact one.
    pub fn one() -> Self {
        Scalar::Exact(Rat::one())
    }

    /// Exact scalar from an integer.
    pub fn from_int(n: i64) -> Self {
        Scalar::Exact(rat_int(n))
    }

    /// Exact scalar `n/d`.
    pub fn from_ratio(n: i64, d: i64) -> Self {
        Scalar::Exact(rat(n, d))
    }

    /// Enclosure `[lo, hi]` (endpoints are rounded outward onto the dyadic
    /// working grid).  Panics if `lo > hi`.
    pub fn interval(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Scalar::Interval { lo, hi }.round_out()
    }

    /// True on the exact track.
    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    /// The rational value when exact.
    pub fn as_exact(&self) -> Option<&Rat> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Interval { .. } => None,
        }
    }

    /// Certified lower bound.
    pub fn lo(&self) -> &Rat {
        match self {
            Scalar::Exact(r) => r,
            Scalar::Interval { lo, .. } => lo,
        }
    }

    /// Certified upper bound.
    pub fn hi(&self) -> &Rat {
        match self {
            Scalar::Exact(r) => r,
            Scalar::Interval { hi, .. } => hi,
        }
    }

    /// Width of the enclosure (zero on the exact track).
    pub fn width(&self) -> Rat {
        self.hi() - self.lo()
    }

    /// Midpoint of the enclosure (the value itself on the exact track).
    pub fn midpoint(&self) -> Rat {
        (self.lo() + self.hi()) / rat_int(2)
    }

    /// Round interval endpoints outward onto the dyadic grid `k/2^W` when
    /// their denominators outgrow the working precision.  Exact values are
    /// never rounded.
    pub fn round_out(self) -> Self {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r),
            Scalar::Interval { lo, hi } => {
                let w = working_bits();
                let lo = round_dyadic(&lo, w, false);
                let hi = round_dyadic(&hi, w, true);
                Scalar::Interval { lo, hi }
            }
        }
    }

    /// Negation.
    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Interval { lo, hi } => Scalar::Interval {
                lo: -hi,
                hi: -lo,
            },
        }
    }

    /// Addition.
    pub fn add(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            _ => Scalar::Interval {
                lo: self.lo() + rhs.lo(),
                hi: self.hi() + rhs.hi(),
            }
            .round_out(),
        }
    }

    /// Subtraction.
    pub fn sub(&self, rhs: &Scalar) -> Scalar {
        self.add(&rhs.neg())
    }

    /// Multiplication.
    pub fn mul(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            _ => {
                let cands = [
                    self.lo() * rhs.lo(),
                    self.lo() * rhs.hi(),
                    self.hi() * rhs.lo(),
                    self.hi() * rhs.hi(),
                ];
                let lo = cands.iter().min().unwrap().clone();
                let hi = cands.iter().max().unwrap().clone();
                Scalar::Interval { lo, hi }.round_out()
            }
        }
    }

    /// Division.  Returns an error if the divisor is exactly zero or is an
    /// enclosure containing zero (the quotient would be unbounded).
    pub fn try_div(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                if b.is_zero() {
                    Err(Error::Domain("division by zero".into()))
                } else {
                    Ok(Scalar::Exact(a / b))
                }
            }
            _ => {
                if rhs.lo().is_negative() && !rhs.hi().is_negative()
                    || rhs.lo().is_zero()
                    || rhs.hi().is_zero()
                {
                    // The enclosure touches zero.
                    if rhs.lo().is_zero() && rhs.hi().is_zero() {
                        return Err(Error::Domain("division by zero".into()));
                    }
                    if !rhs.lo().is_positive() && !rhs.hi().is_negative() {
                        return Err(Error::Precision(
                            "division by an enclosure containing zero".into(),
                        ));
                    }
                }
                let cands = [
                    self.lo() / rhs.lo(),
                    self.lo() / rhs.hi(),
                    self.hi() / rhs.lo(),
                    self.hi() / rhs.hi(),
                ];
                let lo = cands.iter().min().unwrap().clone();
                let hi = cands.iter().max().unwrap().clone();
                Ok(Scalar::Interval { lo, hi }.round_out())
            }
        }
    }

    /// Division, panicking on a zero-straddling divisor.  Use [`try_div`]
    /// when the divisor's sign has not already been certified.
    ///
    /// [`try_div`]: Scalar::try_div
    pub fn div(&self, rhs: &Scalar) -> Scalar {
        self.try_div(rhs)
            .expect("divisor sign must be certified before dividing")
    }

    /// Multiplicative inverse.
    pub fn recip(&self) -> Result<Scalar> {
        Scalar::one().try_div(self)
    }

    /// Integer power (negative exponents invert; `0^0 = 1`).
    pub fn pow_i(&self, e: i64) -> Result<Scalar> {
        if e == 0 {
            return Ok(Scalar::one());
        }
        if e < 0 {
            return self.pow_i(-e)?.recip();
        }
        match self {
            Scalar::Exact(r) => {
                let e = u32::try_from(e).map_err(|_| Error::Domain("exponent too large".into()))?;
                Ok(Scalar::Exact(r.pow(e as i32)))
            }
            Scalar::Interval { lo, hi } => {
                let e = e as u32;
                let pl = pow_rat_u(lo, e);
                let ph = pow_rat_u(hi, e);
                if e % 2 == 1 || !lo.is_negative() {
                    Ok(Scalar::Interval { lo: pl, hi: ph }.round_out())
                } else if !hi.is_positive() {
                    Ok(Scalar::Interval { lo: ph, hi: pl }.round_out())
                } else {
                    // Even power of a zero-straddling enclosure.
                    let m = pl.max(ph);
                    Ok(Scalar::Interval {
                        lo: Rat::zero(),
                        hi: m,
                    }
                    .round_out())
                }
            }
        }
    }

    /// Certified sign: `Some(-1|0|1)` when the enclosure determines it,
    /// `None` otherwise.
    pub fn sign(&self) -> Option<i8> {
        if self.lo().is_positive() {
            Some(1)
        } else if self.hi().is_negative() {
            Some(-1)
        } else if self.lo().is_zero() && self.hi().is_zero() {
            Some(0)
        } else {
            None
        }
    }

    /// Certified non-negativity.
    pub fn is_nonneg(&self) -> Option<bool> {
        if !self.lo().is_negative() {
            Some(true)
        } else if self.hi().is_negative() {
            Some(false)
        } else {
            None
        }
    }

    /// Certified strict positivity.
    pub fn is_positive(&self) -> Option<bool> {
        if self.lo().is_positive() {
            Some(true)
        } else if !self.hi().is_positive() {
            Some(false)
        } else {
            None
        }
    }

    /// Certified comparison; `None` when the enclosures overlap without
    /// being the same point.
    pub fn cmp_certified(&self, rhs: &Scalar) -> Option<Ordering> {
        if self.hi() < rhs.lo() {
            Some(Ordering::Less)
        } else if self.lo() > rhs.hi() {
            Some(Ordering::Greater)
        } else if self.lo() == self.hi() && rhs.lo() == rhs.hi() && self.lo() == rhs.lo() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Certified `self <= rhs`.
    pub fn le_certified(&self, rhs: &Scalar) -> Option<bool> {
        if self.hi() <= rhs.lo() {
            Some(true)
        } else if self.lo() > rhs.hi() {
            Some(false)
        } else {
            None
        }
    }

    /// Certified `self >= rhs`.
    pub fn ge_certified(&self, rhs: &Scalar) -> Option<bool> {
        rhs.le_certified(self)
    }

    /// Square root.  Exact when the radicand is an exact perfect square;
    /// otherwise a certified enclosure.  Negative exact input is a domain
    /// error; enclosures are clamped below at zero (the true value of a
    /// quantity known to be a square is nonnegative).
    pub fn sqrt(&self) -> Result<Scalar> {
        self.nth_root(2)
    }

    /// `n`-th root, `n >= 1`.  Exact when the operand is an exact perfect
    /// `n`-th power.
    pub fn nth_root(&self, n: u32) -> Result<Scalar> {
        if n == 0 {
            return Err(Error::Domain("0th root".into()));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        match self {
            Scalar::Exact(r) => {
                if r.is_negative() {
                    return Err(Error::Domain(format!(
                        "{}th root of negative value {}",
                        n,
                        rat_to_string(r)
                    )));
                }
                Ok(nth_root_nonneg(r, n))
            }
            Scalar::Interval { lo, hi } => {
                if hi.is_negative() {
                    return Err(Error::Domain(format!(
                        "{n}th root of a certified-negative enclosure"
                    )));
                }
                let lo_clamped = if lo.is_negative() { Rat::zero() } else { lo.clone() };
                let rl = nth_root_nonneg(&lo_clamped, n);
                let rh = nth_root_nonneg(hi, n);
                Ok(Scalar::Interval {
                    lo: rl.lo().clone(),
                    hi: rh.hi().clone(),
                }
                .round_out())
            }
        }
    }

    /// Natural logarithm; requires a certified-positive operand.
    pub fn ln(&self) -> Result<Scalar> {
        if self.is_positive() != Some(true) {
            return Err(Error::Domain("ln of a non-certified-positive value".into()));
        }
        let (llo, _) = ln_enclosure(self.lo(), working_bits())?;
        let (_, lhi) = ln_enclosure(self.hi(), working_bits())?;
        if self.is_exact() && self.lo().is_one() {
            return Ok(Scalar::zero());
        }
        Ok(Scalar::Interval { lo: llo, hi: lhi }.round_out())
    }

    /// Decimal rendering: exact values print their value, enclosures print
    /// the midpoint.  `digits` fractional digits, trailing zeros trimmed.
    pub fn to_decimal(&self, digits: usize) -> String {
        match self {
            Scalar::Exact(r) => rat_to_decimal(r, digits),
            Scalar::Interval { .. } => rat_to_decimal(&self.midpoint(), digits),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{}", rat_to_string(r)),
            Scalar::Interval { lo, hi } => {
                write!(f, "[{}, {}]", rat_to_string(lo), rat_to_string(hi))
            }
        }
    }
}

impl From<Rat> for Scalar {
    fn from(r: Rat) -> Self {
        Scalar::Exact(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

// ---- serde: exact values as "p/q" strings, enclosures as {lo, hi} ----

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => s.serialize_str(&rat_to_string(r)),
            Scalar::Interval { lo, hi } => {
                use serde::ser::SerializeMap;
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("lo", &rat_to_string(lo))?;
                m.serialize_entry("hi", &rat_to_string(hi))?;
                m.end()
            }
        }
    }
}

impl<'de> serde::Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = serde_json::Value::deserialize(d)?;
        scalar_from_json(&v).map_err(D::Error::custom)
    }
}

/// Parse a [`Scalar`] from a JSON value: a string/number literal for the
/// exact track, or `{"lo": ..., "hi": ...}` for an enclosure.
pub fn scalar_from_json(v: &serde_json::Value) -> Result<Scalar> {
    match v {
        serde_json::Value::String(s) => Ok(Scalar::Exact(parse_rat(s)?)),
        serde_json::Value::Number(n) => Ok(Scalar::Exact(parse_rat(&n.to_string())?)),
        serde_json::Value::Object(m) => {
            let lo = m
                .get("lo")
                .ok_or_else(|| Error::Parse("enclosure missing \"lo\"".into()))?;
            let hi = m
                .get("hi")
                .ok_or_else(|| Error::Parse("enclosure missing \"hi\"".into()))?;
            let lo = match lo {
                serde_json::Value::String(s) => parse_rat(s)?,
                other => parse_rat(&other.to_string())?,
            };
            let hi = match hi {
                serde_json::Value::String(s) => parse_rat(s)?,
                other => parse_rat(&other.to_string())?,
            };
            if lo > hi {
                return Err(Error::Parse("enclosure endpoints out of order".into()));
            }
            Ok(Scalar::Interval { lo, hi })
        }
        _ => Err(Error::Parse(format!("cannot read scalar from {v}"))),
    }
}

// ---- low-level helpers ----

fn pow_rat_u(r: &Rat, e: u32) -> Rat {
    r.pow(e as i32)
}

/// Round `x` onto the grid `k/2^bits`: downward (`up = false`) or upward.
/// Values already on a coarser dyadic grid pass through unchanged.
fn round_dyadic(x: &Rat, bits: u64, up: bool) -> Rat {
    let den = x.denom();
    // Fast path: denominator is a power of two not finer than the grid.
    if den.bits() <= bits + 1 {
        let tz = den.trailing_zeros().unwrap_or(0);
        if den.bits() == tz + 1 {
            return x.clone();
        }
    }
    let scaled = x.numer() << bits;
    let q = if up {
        scaled.div_ceil(den)
    } else {
        scaled.div_floor(den)
    };
    Rat::new(q, BigInt::one() << bits)
}

fn exact_nth_root_int(x: &BigInt, n: u32) -> Option<BigInt> {
    if x.is_negative() {
        return None;
    }
    let r = x.nth_root(n);
    if num_traits::pow::pow(r.clone(), n as usize) == *x {
        Some(r)
    } else {
        None
    }
}

/// `n`-th root of a nonnegative rational: exact when both numerator and
/// denominator are perfect `n`-th powers, else a dyadic enclosure of width
/// `2^-W`.
pub fn nth_root_nonneg(r: &Rat, n: u32) -> Scalar {
    assert!(!r.is_negative());
    if r.is_zero() {
        return Scalar::zero();
    }
    if let (Some(rn), Some(rd)) = (
        exact_nth_root_int(r.numer(), n),
        exact_nth_root_int(r.denom(), n),
    ) {
        return Scalar::Exact(Rat::new(rn, rd));
    }
    let w = working_bits();
    let scale = BigInt::one() << w;
    // floor((numer * 2^(n*W)) / denom), then integer n-th root.
    let t = (r.numer() << (w * n as u64)).div_floor(r.denom());
    let m = t.nth_root(n);
    let lo = Rat::new(m.clone(), scale.clone());
    let hi = Rat::new(m + BigInt::one(), scale);
    Scalar::Interval { lo, hi }
}

/// `base^e` for rational `base >= 0`, rational `e`.  Exact whenever the
/// result is rational (integer exponents, perfect powers); otherwise a
/// certified enclosure via integer root extraction.
pub fn pow_rat(base: &Rat, e: &Rat) -> Result<Scalar> {
    if base.is_negative() {
        return Err(Error::Domain("power of a negative base".into()));
    }
    if base.is_zero() {
        return if e.is_positive() {
            Ok(Scalar::zero())
        } else if e.is_zero() {
            Ok(Scalar::one())
        } else {
            Err(Error::Domain("0 raised to a negative power".into()))
        };
    }
    let p = e.numer();
    let q = e.denom(); // > 0 in canonical form
    let p_i = p
        .to_i64()
        .ok_or_else(|| Error::Domain("exponent numerator too large".into()))?;
    let q_u = q
        .to_u32()
        .ok_or_else(|| Error::Domain("exponent denominator too large".into()))?;
    let t = if p_i >= 0 {
        base.pow(p_i as i32)
    } else {
        base.pow(p_i as i32)
    };
    if q_u == 1 {
        return Ok(Scalar::Exact(t));
    }
    Ok(nth_root_nonneg(&t, q_u))
}

/// Enclosure of `atanh(u)` for rational `|u| <= 1/2`, with absolute error
/// below `2^-(bits+2)`.  Returns rational `(lo, hi)`.
fn atanh_enclosure(u: &Rat, bits: u64) -> (Rat, Rat) {
    if u.is_zero() {
        return (Rat::zero(), Rat::zero());
    }
    if u.is_negative() {
        let (lo, hi) = atanh_enclosure(&-u, bits);
        return (-hi, -lo);
    }
    // 0 < u <= 1/2.  atanh(u) = sum_{j>=0} u^(2j+1) / (2j+1); the tail
    // after the term with exponent 2J+1 is below u^(2J+3) / (1 - u^2).
    let usq = u * u;
    let inv_gap = Rat::one() / (Rat::one() - &usq);
    let eps = Rat::new(BigInt::one(), BigInt::one() << (bits + 2));
    let mut sum = u.clone();
    let mut upow = u.clone(); // u^(2j+1) for current j
    let mut j: u64 = 0;
    loop {
        let tail = &upow * &usq * &inv_gap; // bound on the remaining tail
        if tail <= eps {
            return (sum.clone(), sum + tail);
        }
        j += 1;
        upow *= &usq;
        sum += &upow / rat_int((2 * j + 1) as i64);
        // Keep intermediate denominators bounded: round the partial sum
        // conservatively is unnecessary -- terms have small denominators
        // (powers of u's denominator times odd integers) and j stays
        // below ~bits, so growth is modest.
    }
}

/// Enclosure of `ln 2` with absolute error below `2^-(bits+1)`.
fn ln2_enclosure(bits: u64) -> (Rat, Rat) {
    // ln 2 = 2 atanh(1/3)
    let (lo, hi) = atanh_enclosure(&rat(1, 3), bits + 1);
    (lo * rat_int(2), hi * rat_int(2))
}

/// Enclosure of `ln r` for rational `r > 0`.
///
/// Range-reduces by powers of two to `m` in `[3/4, 3/2)`, so that
/// `u = (m-1)/(m+1)` satisfies `|u| <= 1/5`, then sums the `atanh` series
/// with an explicit tail bound: `ln r = k ln 2 + 2 atanh(u)`.
pub fn ln_enclosure(r: &Rat, bits: u64) -> Result<(Rat, Rat)> {
    if !r.is_positive() {
        return Err(Error::Domain("ln of a non-positive rational".into()));
    }
    if r.is_one() {
        return Ok((Rat::zero(), Rat::zero()));
    }
    let three_halves = rat(3, 2);
    let three_quarters = rat(3, 4);
    let mut m = r.clone();
    let mut k: i64 = 0;
    while m >= three_halves {
        m /= rat_int(2);
        k += 1;
    }
    while m < three_quarters {
        m *= rat_int(2);
        k -= 1;
    }
    let u = (&m - Rat::one()) / (&m + Rat::one());
    let (alo, ahi) = atanh_enclosure(&u, bits + 1);
    let two = rat_int(2);
    let (slo, shi) = (&two * alo, &two * ahi);
    if k == 0 {
        return Ok((slo, shi));
    }
    let (l2lo, l2hi) = ln2_enclosure(bits + 1);
    let kk = rat_int(k);
    let (klo, khi) = if k > 0 {
        (&kk * l2lo, &kk * l2hi)
    } else {
        (&kk * l2hi, &kk * l2lo)
    };
    Ok((slo + klo, shi + khi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d)
    }

    // ==== parsing and printing ====

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rat("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rat("-7").unwrap(), rat_int(-7));
        assert_eq!(parse_rat("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rat("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rat("1e-9").unwrap(), Rat::new(BigInt::one(), BigInt::from(1_000_000_000u64)));
        assert_eq!(parse_rat("2.5e2").unwrap(), rat_int(250));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(rat_to_decimal(&rat(1, 4), 6), "0.25");
        assert_eq!(rat_to_decimal(&rat(-1, 3), 5), "-0.33333");
        assert_eq!(rat_to_decimal(&rat_int(3), 4), "3.0");
        assert_eq!(rat_to_decimal(&rat(37, 64), 24), "0.578125");
    }

    #[test]
    fn rational_round_trip() {
        for r in [rat(3, 4), rat(-22, 7), rat_int(0), rat_int(9)] {
            assert_eq!(parse_rat(&rat_to_string(&r)).unwrap(), r);
        }
    }

    // ==== arithmetic ====

    #[test]
    fn exact_track_stays_exact() {
        let a = s(1, 3);
        let b = s(1, 6);
        assert_eq!(a.add(&b), s(1, 2));
        assert_eq!(a.sub(&b), s(1, 6));
        assert_eq!(a.mul(&b), s(1, 18));
        assert_eq!(a.div(&b), s(2, 1));
        assert!(a.add(&b).is_exact());
    }

    #[test]
    fn interval_contagion() {
        let a = Scalar::interval(rat(1, 4), rat(1, 2));
        let b = s(2, 1);
        let c = a.mul(&b);
        assert!(!c.is_exact());
        assert!(*c.lo() <= rat(1, 2) && *c.hi() >= rat_int(1));
    }

    #[test]
    fn interval_product_signs() {
        let a = Scalar::interval(rat(-2, 1), rat(3, 1));
        let b = Scalar::interval(rat(-1, 1), rat(4, 1));
        let p = a.mul(&b);
        assert!(*p.lo() <= rat_int(-8));
        assert!(*p.hi() >= rat_int(12));
    }

    #[test]
    fn zero_straddling_divisor_rejected() {
        let a = s(1, 1);
        let b = Scalar::interval(rat(-1, 2), rat(1, 2));
        assert!(a.try_div(&b).is_err());
    }

    #[test]
    fn even_power_of_straddling_interval() {
        let a = Scalar::interval(rat(-1, 1), rat(2, 1));
        let p = a.pow_i(2).unwrap();
        assert!(!p.lo().is_negative());
        assert!(*p.hi() >= rat_int(4));
    }

    // ==== comparisons ====

    #[test]
    fn certified_comparisons() {
        let a = Scalar::interval(rat(1, 4), rat(1, 2));
        let b = Scalar::interval(rat(3, 4), rat(1, 1));
        assert_eq!(a.cmp_certified(&b), Some(Ordering::Less));
        assert_eq!(b.cmp_certified(&a), Some(Ordering::Greater));
        let c = Scalar::interval(rat(2, 5), rat(4, 5));
        assert_eq!(a.cmp_certified(&c), None);
        assert_eq!(s(1, 2).cmp_certified(&s(1, 2)), Some(Ordering::Equal));
        assert_eq!(a.le_certified(&b), Some(true));
        assert_eq!(b.le_certified(&a), Some(false));
    }

    #[test]
    fn sign_detection() {
        assert_eq!(s(-3, 7).sign(), Some(-1));
        assert_eq!(Scalar::zero().sign(), Some(0));
        assert_eq!(Scalar::interval(rat(1, 8), rat(1, 4)).sign(), Some(1));
        assert_eq!(Scalar::interval(rat(-1, 8), rat(1, 4)).sign(), None);
    }

    // ==== roots ====

    #[test]
    fn perfect_roots_are_exact() {
        assert_eq!(s(9, 16).sqrt().unwrap(), s(3, 4));
        assert_eq!(s(27, 8).nth_root(3).unwrap(), s(3, 2));
        assert!(s(9, 16).sqrt().unwrap().is_exact());
    }

    #[test]
    fn sqrt2_enclosure_is_tight() {
        let r = s(2, 1).sqrt().unwrap();
        assert!(!r.is_exact());
        // 1.41421356237309504880...
        let lo = parse_rat("1.41421356237309504").unwrap();
        let hi = parse_rat("1.41421356237309505").unwrap();
        assert!(*r.lo() >= lo && *r.hi() <= hi);
        let w = r.width();
        assert!(w <= Rat::new(BigInt::from(2), BigInt::one() << working_bits()));
    }

    #[test]
    fn sqrt_of_negative_rejected() {
        assert!(s(-1, 4).sqrt().is_err());
    }

    #[test]
    fn interval_sqrt_clamps_at_zero() {
        let a = Scalar::Interval {
            lo: rat(-1, 1024),
            hi: rat(1, 4),
        };
        let r = a.sqrt().unwrap();
        assert!(!r.lo().is_negative());
        assert!(*r.hi() >= rat(1, 2));
    }

    // ==== powers ====

    #[test]
    fn pow_rat_exact_cases() {
        assert_eq!(pow_rat(&rat(4, 9), &rat(1, 2)).unwrap(), s(2, 3));
        assert_eq!(pow_rat(&rat(2, 3), &rat_int(3)).unwrap(), s(8, 27));
        assert_eq!(pow_rat(&rat(2, 3), &rat_int(-2)).unwrap(), s(9, 4));
        assert_eq!(pow_rat(&rat_int(0), &rat(5, 2)).unwrap(), Scalar::zero());
        assert!(pow_rat(&rat_int(0), &rat(-1, 2)).is_err());
    }

    #[test]
    fn pow_rat_enclosure_case() {
        // 2^(1/3) = 1.25992104989487316476...
        let r = pow_rat(&rat_int(2), &rat(1, 3)).unwrap();
        assert!(!r.is_exact());
        assert!(*r.lo() >= parse_rat("1.2599210498948731").unwrap());
        assert!(*r.hi() <= parse_rat("1.2599210498948732").unwrap());
    }

    // ==== logarithm ====

    #[test]
    fn ln_of_one_is_zero() {
        assert_eq!(Scalar::one().ln().unwrap(), Scalar::zero());
    }

    #[test]
    fn ln_three_matches_reference() {
        // ln 3 = 1.0986122886681096913952452369225...
        let r = s(3, 1).ln().unwrap();
        assert!(*r.lo() >= parse_rat("1.09861228866810969139").unwrap());
        assert!(*r.hi() <= parse_rat("1.09861228866810969140").unwrap());
    }

    #[test]
    fn ln_two_matches_reference() {
        // ln 2 = 0.69314718055994530941723212145818...
        let r = s(2, 1).ln().unwrap();
        assert!(*r.lo() >= parse_rat("0.69314718055994530941").unwrap());
        assert!(*r.hi() <= parse_rat("0.69314718055994530942").unwrap());
    }

    #[test]
    fn ln_small_value() {
        // ln(1/10) = -2.30258509299404568401...
        let r = s(1, 10).ln().unwrap();
        assert!(*r.lo() >= parse_rat("-2.30258509299404568402").unwrap());
        assert!(*r.hi() <= parse_rat("-2.30258509299404568401").unwrap());
    }

    #[test]
    fn ln_rejects_nonpositive() {
        assert!(Scalar::zero().ln().is_err());
        assert!(s(-2, 1).ln().is_err());
    }

    // ==== serde ====

    #[test]
    fn scalar_json_round_trip() {
        let a = s(-7, 12);
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(text, "\"-7/12\"");
        let back: Scalar = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a);
        let i = Scalar::Interval {
            lo: rat(1, 4),
            hi: rat(1, 2),
        };
        let t = serde_json::to_string(&i).unwrap();
        let back: Scalar = serde_json::from_str(&t).unwrap();
        assert_eq!(back, i);
    }

    #[test]
    fn dyadic_rounding_is_outward() {
        let x = Rat::new(BigInt::one(), BigInt::from(3));
        let lo = round_dyadic(&x, 16, false);
        let hi = round_dyadic(&x, 16, true);
        assert!(lo <= x && x <= hi);
        assert!(&hi - &lo <= Rat::new(BigInt::one(), BigInt::one() << 16));
    }
}
