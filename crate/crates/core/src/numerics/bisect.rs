//! Deterministic bisection for monotone threshold location.
//!
//! [`bisect_threshold`] brackets the boundary of a monotone predicate on a
//! rational interval.  The predicate must hold at the lower endpoint and
//! fail at the upper endpoint; both preconditions are checked and produce
//! explicit errors rather than silently returning garbage.  Midpoints are
//! exact rational midpoints, so runs are bit-for-bit reproducible.

use crate::error::{Error, Result};
use crate::numerics::scalar::{rat_int, Rat};

/// Locate the switch point of a monotone predicate.
///
/// Preconditions (checked): `lo < hi`, `tol > 0`, `pred(lo) == true`,
/// `pred(hi) == false`.  Bisects until the bracket is narrower than `tol`
/// and returns the bracket midpoint, which is then within `tol / 2` of
/// the true threshold.  Predicate errors propagate.
pub fn bisect_threshold<F>(mut pred: F, lo: &Rat, hi: &Rat, tol: &Rat) -> Result<Rat>
where
    F: FnMut(&Rat) -> Result<bool>,
{
    if lo >= hi {
        return Err(Error::Invalid(format!(
            "bisection bracket is empty: lo = {lo} >= hi = {hi}"
        )));
    }
    if !tol.numer().sign().eq(&num_bigint::Sign::Plus) {
        return Err(Error::Invalid("bisection tolerance must be positive".into()));
    }
    if !pred(lo)? {
        return Err(Error::Invalid(
            "bisection precondition violated: predicate is false at the lower endpoint".into(),
        ));
    }
    if pred(hi)? {
        return Err(Error::Invalid(
            "bisection precondition violated: predicate is true at the upper endpoint".into(),
        ));
    }
    let two = rat_int(2);
    let mut a = lo.clone();
    let mut b = hi.clone();
    while &b - &a > *tol {
        let mid = (&a + &b) / &two;
        if pred(&mid)? {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((a + b) / two)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::scalar::{parse_rat, rat};
    use num_traits::Signed;

    #[test]
    fn finds_simple_root() {
        // Threshold of x < 1/3 on [0, 1].
        let tol = parse_rat("1e-12").unwrap();
        let t = bisect_threshold(
            |x| Ok(*x < rat(1, 3)),
            &rat(0, 1),
            &rat(1, 1),
            &tol,
        )
        .unwrap();
        assert!((t - rat(1, 3)).abs() <= tol);
    }

    #[test]
    fn rejects_bad_bracket() {
        let tol = rat(1, 100);
        assert!(bisect_threshold(|_| Ok(true), &rat(1, 1), &rat(0, 1), &tol).is_err());
        // Predicate false at lo:
        assert!(bisect_threshold(|_| Ok(false), &rat(0, 1), &rat(1, 1), &tol).is_err());
        // Predicate true at hi:
        assert!(bisect_threshold(|_| Ok(true), &rat(0, 1), &rat(1, 1), &tol).is_err());
    }

    #[test]
    fn propagates_predicate_errors() {
        let tol = rat(1, 100);
        let r = bisect_threshold(
            |_| Err(crate::error::Error::Undecided("boom".into())),
            &rat(0, 1),
            &rat(1, 1),
            &tol,
        );
        assert!(r.is_err());
    }

    #[test]
    fn deterministic_reruns() {
        let tol = parse_rat("1e-20").unwrap();
        let run = || {
            bisect_threshold(|x| Ok(x * x < rat(2, 1)), &rat(1, 1), &rat(2, 1), &tol).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn sqrt2_to_forty_digits() {
        let tol = parse_rat("1e-40").unwrap();
        let t = bisect_threshold(|x| Ok(x * x < rat(2, 1)), &rat(1, 1), &rat(2, 1), &tol).unwrap();
        let lo = parse_rat("1.41421356237309504880168872420969807856").unwrap();
        let hi = parse_rat("1.41421356237309504880168872420969807857").unwrap();
        assert!(t >= lo - tol.clone() && t <= hi + tol);
    }
}
