//! Two-dimensional measures on `[0, ∞)^2` as finite sums of product
//! terms `ξ_i × η_i` with one-dimensional Berger-type factors.
//!
//! Every two-variable Berger measure handled in this crate is built from
//! such sums (tensor forms, backward-extension assemblies, extremal
//! measures), and the class is closed under the operations we need:
//!
//! * [`Measure2D::moment2`] — mixed moments `∫ s^{k_1} t^{k_2} dμ`;
//! * [`Measure2D::inv_t_norm2`] — `∫ 1/t dμ` in the *second* coordinate,
//!   with honest `Infinite` propagation;
//! * [`Measure2D::extremal`] — annihilate mass on `{t = 0}`, divide by
//!   `t`, renormalize: the extremal measure of backward-extension theory;
//! * [`Measure2D::marginal_x`] — the first-coordinate marginal.
//!
//! Terms may be signed internally; certification of nonnegativity is
//! per-term (sufficient for every construction in this crate, honest
//! `Undecided` otherwise).

use crate::error::{Error, Result};
use crate::measures::one::{Measure1D, Norm, Trilean};
use crate::numerics::scalar::Scalar;

/// Finite sum `Σ ξ_i × η_i` of product terms; `ξ` lives on the first
/// (horizontal, `s`) axis and `η` on the second (vertical, `t`) axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure2D {
    terms: Vec<(Measure1D, Measure1D)>,
}

impl Measure2D {
    /// Build from raw terms, dropping structurally-zero ones.
    pub fn new(terms: Vec<(Measure1D, Measure1D)>) -> Self {
        let terms = terms
            .into_iter()
            .filter(|(x, y)| !x.is_zero() && !y.is_zero())
            .collect();
        Measure2D { terms }
    }

    /// Single product term `ξ × η`.
    pub fn product(xi: Measure1D, eta: Measure1D) -> Self {
        Measure2D::new(vec![(xi, eta)])
    }

    /// The zero measure.
    pub fn zero() -> Self {
        Measure2D { terms: vec![] }
    }

    /// The product terms.
    pub fn terms(&self) -> &[(Measure1D, Measure1D)] {
        &self.terms
    }

    /// Sum of two measures.
    pub fn plus(&self, other: &Self) -> Self {
        Measure2D::new(self.terms.iter().chain(&other.terms).cloned().collect())
    }

    /// Scale every term (through the first factor).
    pub fn scaled(&self, c: &Scalar) -> Self {
        Measure2D::new(
            self.terms
                .iter()
                .map(|(x, y)| (x.scaled(c), y.clone()))
                .collect(),
        )
    }

    /// Mixed moment `∫ s^{k_1} t^{k_2} dμ`.
    pub fn moment2(&self, k1: u32, k2: u32) -> Scalar {
        let mut acc = Scalar::zero();
        for (x, y) in &self.terms {
            acc = acc.add(&x.moment(k1).mul(&y.moment(k2)));
        }
        acc
    }

    /// Total mass.
    pub fn total_mass(&self) -> Scalar {
        self.moment2(0, 0)
    }

    /// `∫ 1/t dμ` (second coordinate).  Terms whose horizontal mass is
    /// certified zero are skipped; an infinite vertical integral under
    /// non-zero horizontal mass makes the whole integral infinite (the
    /// horizontal mass must then be certified *positive*; a signed weight
    /// on an infinite part is rejected as meaningless).
    pub fn inv_t_norm2(&self) -> Result<Norm> {
        let mut acc = Scalar::zero();
        for (x, y) in &self.terms {
            let mass = x.total_mass();
            if mass.sign() == Some(0) {
                continue;
            }
            match y.inv_t_integral()? {
                Norm::Finite(v) => acc = acc.add(&mass.mul(&v)),
                Norm::Infinite => {
                    return match mass.sign() {
                        Some(1) => Ok(Norm::Infinite),
                        Some(-1) => Err(Error::Invalid(
                            "negative weight on an infinite 1/t-integral".into(),
                        )),
                        _ => Err(Error::Precision(
                            "horizontal mass sign undecided on an infinite 1/t-integral".into(),
                        )),
                    };
                }
            }
        }
        Ok(Norm::Finite(acc))
    }

    /// Extremal measure: annihilate mass on `{t = 0}`, divide by `t`,
    /// and renormalize by the resulting total mass
    /// `N = Σ mass(ξ_i) · ∫ 1/t d(η_i restricted to t > 0)`.
    ///
    /// Errors when some restricted `η_i` is not `1/t`-integrable or when
    /// `N` is not certified positive.
    pub fn extremal(&self) -> Result<Measure2D> {
        let mut parts: Vec<(Measure1D, Measure1D)> = Vec::new();
        let mut n = Scalar::zero();
        for (x, y) in &self.terms {
            let y_part = y.drop_zero_atom().inv_t_part()?;
            n = n.add(&x.total_mass().mul(&y_part.total_mass()));
            parts.push((x.clone(), y_part));
        }
        if n.is_positive() != Some(true) {
            return Err(Error::Invalid(format!(
                "extremal normalizer {n} is not certified positive"
            )));
        }
        let n_inv = n.recip()?;
        Ok(Measure2D::new(
            parts
                .into_iter()
                .map(|(x, y)| (x.scaled(&n_inv), y))
                .collect(),
        ))
    }

    /// First-coordinate marginal `Σ mass(η_i) · ξ_i`.
    pub fn marginal_x(&self) -> Measure1D {
        let mut acc = Measure1D::zero();
        for (x, y) in &self.terms {
            acc = acc.plus(&x.scaled(&y.total_mass()));
        }
        acc
    }

    /// Second-coordinate marginal `Σ mass(ξ_i) · η_i`.
    pub fn marginal_y(&self) -> Measure1D {
        let mut acc = Measure1D::zero();
        for (x, y) in &self.terms {
            acc = acc.plus(&y.scaled(&x.total_mass()));
        }
        acc
    }

    /// Swap the two coordinates.
    pub fn transpose(&self) -> Self {
        Measure2D::new(self.terms.iter().map(|(x, y)| (y.clone(), x.clone())).collect())
    }

    /// Per-term nonnegativity certificate: every term must be a product
    /// of two same-sign factors.  Sufficient, not necessary; `Undecided`
    /// when a term resists per-term certification.
    pub fn is_nonneg_termwise(&self) -> Trilean {
        let mut verdict = Trilean::True;
        for (x, y) in &self.terms {
            let term = match (x.is_nonneg(), y.is_nonneg()) {
                (Trilean::True, Trilean::True) => Trilean::True,
                // A term may be (-ξ) × (-η); count that as nonnegative.
                (Trilean::False, Trilean::False) => Trilean::True,
                (Trilean::False, Trilean::True) | (Trilean::True, Trilean::False) => {
                    // Genuinely signed term: certified nonzero of one sign
                    // times the other.  Not certifiably nonnegative here.
                    Trilean::Undecided
                }
                _ => Trilean::Undecided,
            };
            verdict = verdict.and(term);
        }
        verdict
    }

    /// Certified equality of mixed moments up to `(depth, depth)`.
    pub fn moments_agree(&self, other: &Self, depth: u32) -> Trilean {
        let mut verdict = Trilean::True;
        for k1 in 0..=depth {
            for k2 in 0..=depth {
                let a = self.moment2(k1, k2);
                let b = other.moment2(k1, k2);
                let eq = match (a.as_exact(), b.as_exact()) {
                    (Some(x), Some(y)) => Trilean::from_option(Some(x == y)),
                    _ => {
                        let d = a.sub(&b);
                        match d.sign() {
                            Some(0) => Trilean::True,
                            Some(_) => Trilean::False,
                            None => Trilean::Undecided,
                        }
                    }
                };
                verdict = verdict.and(eq);
                if verdict == Trilean::False {
                    return Trilean::False;
                }
            }
        }
        verdict
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::one::Atom;
    use crate::numerics::scalar::rat;

    fn s(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d)
    }

    fn dirac(n: i64, d: i64) -> Measure1D {
        Measure1D::dirac(rat(n, d)).unwrap()
    }

    fn leb01() -> Measure1D {
        Measure1D::lebesgue(rat(0, 1), rat(1, 1)).unwrap()
    }

    // ==== moments and marginals ====

    #[test]
    fn product_moments_factor() {
        let m = Measure2D::product(leb01(), dirac(1, 2));
        for k1 in 0..3u32 {
            for k2 in 0..3u32 {
                assert_eq!(
                    m.moment2(k1, k2),
                    s(1, (k1 + 1) as i64).mul(&s(1, 1 << k2))
                );
            }
        }
    }

    #[test]
    fn marginals_of_sum() {
        let m = Measure2D::new(vec![
            (dirac(1, 1).scaled(&s(1, 2)), dirac(1, 2)),
            (leb01().scaled(&s(1, 2)), dirac(1, 1)),
        ]);
        let mx = m.marginal_x();
        assert_eq!(mx.total_mass(), Scalar::one());
        assert_eq!(mx.atom_mass(&rat(1, 1)), s(1, 2));
        let my = m.marginal_y();
        assert_eq!(my.atom_mass(&rat(1, 2)), s(1, 2));
        assert_eq!(my.atom_mass(&rat(1, 1)), s(1, 2));
    }

    // ==== 1/t functional ====

    #[test]
    fn inv_t_norm2_linear() {
        // (1/2) δ_1 × δ_{1/2} + (1/2) δ_1 × δ_{1/4}: norm = 1/2·2 + 1/2·4 = 3.
        let m = Measure2D::new(vec![
            (dirac(1, 1).scaled(&s(1, 2)), dirac(1, 2)),
            (dirac(1, 1).scaled(&s(1, 2)), dirac(1, 4)),
        ]);
        assert_eq!(m.inv_t_norm2().unwrap(), Norm::Finite(s(3, 1)));
    }

    #[test]
    fn inv_t_norm2_infinite_propagation() {
        let m = Measure2D::new(vec![(dirac(1, 1), leb01())]);
        assert_eq!(m.inv_t_norm2().unwrap(), Norm::Infinite);
        // Zero-mass term with infinite vertical part is skipped.
        let m = Measure2D::new(vec![
            (dirac(1, 1).scaled(&Scalar::zero()), leb01()),
            (dirac(1, 1), dirac(1, 2)),
        ]);
        assert_eq!(m.inv_t_norm2().unwrap(), Norm::Finite(s(2, 1)));
        // Negative mass on an infinite part is rejected.
        let m = Measure2D::new(vec![(dirac(1, 1).scaled(&s(-1, 1)), leb01())]);
        assert!(m.inv_t_norm2().is_err());
    }

    // ==== extremal measure ====

    #[test]
    fn extremal_of_product_with_zero_atom() {
        // μ = δ_1 × ((1/2) δ_0 + (1/2) δ_{1/2}): annihilate the t = 0 atom,
        // divide by t, renormalize: extremal = δ_1 × δ_{1/2}.
        let eta = Measure1D::new(
            vec![
                Atom { pos: rat(0, 1), mass: s(1, 2) },
                Atom { pos: rat(1, 2), mass: s(1, 2) },
            ],
            vec![],
        )
        .unwrap();
        let m = Measure2D::product(dirac(1, 1), eta);
        let e = m.extremal().unwrap();
        assert_eq!(e.total_mass(), Scalar::one());
        assert_eq!(e.moment2(0, 1), s(1, 2));
        let my = e.marginal_y();
        assert_eq!(my.atom_mass(&rat(1, 2)), Scalar::one());
        assert_eq!(my.atom_mass(&rat(0, 1)), Scalar::zero());
    }

    #[test]
    fn extremal_is_probability_across_terms() {
        let m = Measure2D::new(vec![
            (dirac(1, 2).scaled(&s(1, 3)), dirac(1, 2)),
            (leb01().scaled(&s(2, 3)), dirac(1, 4)),
        ]);
        let e = m.extremal().unwrap();
        assert_eq!(e.total_mass(), Scalar::one());
    }

    #[test]
    fn extremal_rejects_nonintegrable_piece() {
        let m = Measure2D::product(dirac(1, 1), leb01());
        assert!(m.extremal().is_err());
    }

    // ==== structure ====

    #[test]
    fn transpose_swaps_moments() {
        let m = Measure2D::product(leb01(), dirac(1, 2));
        let t = m.transpose();
        assert_eq!(m.moment2(2, 1), t.moment2(1, 2));
    }

    #[test]
    fn termwise_nonneg() {
        let m = Measure2D::new(vec![
            (dirac(1, 1), dirac(1, 2)),
            (dirac(1, 2).scaled(&s(-1, 1)), dirac(1, 4).scaled(&s(-1, 1))),
        ]);
        assert_eq!(m.is_nonneg_termwise(), Trilean::True);
        let signed = Measure2D::new(vec![(dirac(1, 1).scaled(&s(-1, 1)), dirac(1, 2))]);
        assert_eq!(signed.is_nonneg_termwise(), Trilean::Undecided);
    }

    #[test]
    fn moments_agree_detects_mismatch() {
        let a = Measure2D::product(dirac(1, 2), dirac(1, 2));
        let b = Measure2D::product(dirac(1, 2), dirac(1, 3));
        assert_eq!(a.moments_agree(&a.clone(), 3), Trilean::True);
        assert_eq!(a.moments_agree(&b, 3), Trilean::False);
    }
}
