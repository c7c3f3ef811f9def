//! The flat-interior family: prescribed bottom row and first column
//! over a one-point tensor core, with a four-term closed-form
//! subnormality criterion checked against the extension pipeline.
//!
//! The data is `(a², b², ξ, η₁, β₀²)`: a probability measure `ξ` on
//! `[0, ∞)` with named atom masses `p = ξ({0})` and `q = ξ({1})`, a
//! probability measure `η₁` supported in `(0, ∞)`, and positive junction
//! squares.  The weight squares are
//!
//! ```text
//! α²(k₁, 0)  = m_{k₁+1}(ξ)/m_{k₁}(ξ)          α²(0, k₂) = a² b^{2(k₂−1)} / m_{k₂−1}(η₁)
//! β²(k₁, 0)  = a² β₀² / m_{k₁}(ξ)   (k₁ >= 1)  β²(0, 0)  = β₀²
//! β²(0, k₂)  = m_{k₂}(η₁)/m_{k₂−1}(η₁)        interior: α² = 1, β² = b²
//! ```
//!
//! so the core `k₁, k₂ >= 1` is the tensor `δ_1 ⊗ δ_{b²}`, the bottom
//! row carries `ξ`, and the first column is the one-step backward
//! extension of the `η₁`-shift through `β₀` (Berger measure
//! `η = (β₀²/t) η₁ + (1 − β₀² N₁) δ_0`, `N₁ = ‖1/t‖_{η₁}`, when
//! `β₀² N₁ <= 1`).
//!
//! [`closed_form_verdict`] decides subnormality by four conditions,
//! reported as the squares of the bounds they place on `β₀`:
//!
//! 1. *feasibility* — `η₁({b²}) >= a²` (equivalently the self-referential
//!    bound `β₀² <= β₀² η₁({b²})/a²`, the *v-term*);
//! 2. *n-term* — `β₀² <= 1/N₁` (the column extension exists);
//! 3. *p-term* — `p >= β₀² (N₁ − a²/b²)` (domination at the origin);
//! 4. *q-term* — `q >= β₀² a²/b²` (domination at 1).
//!
//! Feasibility forces `N₁ >= a²/b²`, so with it in place the p-term is
//! the bound `β₀² <= p/(N₁ − a²/b²)` (vacuous when `N₁ = a²/b²`, which
//! happens only for `η₁ = δ_{b²}` with `a = 1`).  [`pipeline_verdict`]
//! instead builds the field and runs the generic two-stage extension
//! machinery; [`subnormal_flat`] runs both and errors on any certified
//! disagreement.

use crate::error::{Error, Result};
use crate::measures::{Measure1D, Norm, Trilean};
use crate::numerics::scalar::{rat, rat_int, Rat, Scalar};
use crate::shift2::tc::{subnormal_backext2, TcReport};
use crate::shift2::WeightField;

use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default stored rectangle for built fields.
pub const FLAT_GRID: usize = 24;

/// Exact parameters of the family.
#[derive(Debug, Clone)]
pub struct FlatParams {
    a_sq: Rat,
    b_sq: Rat,
    xi: Measure1D,
    eta1: Measure1D,
    beta0_sq: Rat,
}

impl FlatParams {
    /// Validate and assemble.  `xi` and `eta1` must be probability
    /// measures, `eta1` supported in `(0, ∞)`, `xi` with certified
    /// positive mass off `0`; the squares must be positive.
    pub fn new(
        a_sq: Rat,
        b_sq: Rat,
        xi: Measure1D,
        eta1: Measure1D,
        beta0_sq: Rat,
    ) -> Result<Self> {
        for (name, v) in [("a²", &a_sq), ("b²", &b_sq), ("β₀²", &beta0_sq)] {
            if !v.is_positive() {
                return Err(Error::Domain(format!("{name} must be positive; got {v}")));
            }
        }
        let xi = xi.into_probability()?;
        let eta1 = eta1.into_probability()?;
        if eta1.atoms().iter().any(|a| a.pos.is_zero())
            || eta1.pieces().iter().any(|p| p.lo.is_zero())
        {
            return Err(Error::Domain(
                "η₁ must be supported in (0, ∞); it carries mass at 0".into(),
            ));
        }
        if xi.moment(1).is_positive() != Some(true) {
            return Err(Error::Domain(
                "ξ must carry certified positive mass away from 0".into(),
            ));
        }
        Ok(FlatParams {
            a_sq,
            b_sq,
            xi,
            eta1,
            beta0_sq,
        })
    }

    /// Copy with a different junction square `β₀²`.
    pub fn with_beta0_sq(&self, beta0_sq: Rat) -> Result<Self> {
        if !beta0_sq.is_positive() {
            return Err(Error::Domain(format!(
                "β₀² must be positive; got {beta0_sq}"
            )));
        }
        let mut p = self.clone();
        p.beta0_sq = beta0_sq;
        Ok(p)
    }

    pub fn a_sq(&self) -> &Rat {
        &self.a_sq
    }

    pub fn b_sq(&self) -> &Rat {
        &self.b_sq
    }

    pub fn xi(&self) -> &Measure1D {
        &self.xi
    }

    pub fn eta1(&self) -> &Measure1D {
        &self.eta1
    }

    pub fn beta0_sq(&self) -> &Rat {
        &self.beta0_sq
    }
}

/// Atom mass of `m` at position `pos` (zero when there is no atom).
fn atom_mass(m: &Measure1D, pos: &Rat) -> Scalar {
    m.atoms()
        .iter()
        .find(|a| &a.pos == pos)
        .map(|a| a.mass.clone())
        .unwrap_or_else(Scalar::zero)
}

/// Closed-form verdict with the four bound squares.
#[derive(Debug, Clone)]
pub struct FlatReport {
    /// `η₁({b²}) >= a²` — the slice over `k₂ >= 1` is subnormal.
    pub feasible: Trilean,
    /// v-term square `β₀² η₁({b²})/a²` (self-referential bound; exceeds
    /// `β₀²` exactly when feasibility holds).
    pub term_v_sq: Scalar,
    /// p-term square `p/(N₁ − a²/b²)`; `None` when the denominator is
    /// zero or certification fails, or `N₁` is infinite.
    pub term_p_sq: Option<Scalar>,
    /// q-term square `(b²/a²) q`.
    pub term_q_sq: Scalar,
    /// n-term square `1/N₁`; `None` when `N₁` is infinite.
    pub term_n_sq: Option<Scalar>,
    /// Least of the β₀-free bounds (p, q, n terms): the family is
    /// subnormal iff it is feasible and `β₀² <=` this.
    pub bound_sq: Option<Scalar>,
    pub subnormal: Trilean,
    pub detail: String,
}

/// Decide subnormality from the four closed conditions alone, without
/// building the field.
pub fn closed_form_verdict(p: &FlatParams) -> Result<FlatReport> {
    let a_sq = Scalar::from(p.a_sq.clone());
    let b_sq = Scalar::from(p.b_sq.clone());
    let beta0_sq = Scalar::from(p.beta0_sq.clone());
    let v1 = atom_mass(&p.eta1, &p.b_sq);
    let feasible = Trilean::from_option(v1.sub(&a_sq).is_nonneg());
    let term_v_sq = beta0_sq.mul(&v1).div(&a_sq);
    let term_q = atom_mass(&p.xi, &rat_int(1)).mul(&b_sq).div(&a_sq);
    let c_q = Trilean::from_option(term_q.sub(&beta0_sq).is_nonneg());

    let n1 = match p.eta1.inv_t_norm()? {
        Norm::Finite(n) => n,
        Norm::Infinite => {
            // β₀² N₁ <= 1 fails for every positive β₀.
            return Ok(FlatReport {
                feasible,
                term_v_sq,
                term_p_sq: None,
                term_q_sq: term_q,
                term_n_sq: None,
                bound_sq: None,
                subnormal: Trilean::False,
                detail: "‖1/t‖_{η₁} is infinite; the first column admits no \
                         backward extension"
                    .into(),
            });
        }
    };
    let term_n = n1.recip()?;
    let c_n = Trilean::from_option(term_n.sub(&beta0_sq).is_nonneg());

    // Origin domination p >= β₀² (N₁ − a²/b²), division-free so the
    // sign of the parenthesis needs no case split.
    let p0 = atom_mass(&p.xi, &Rat::zero());
    let gap = n1.sub(&a_sq.div(&b_sq));
    let c_p = Trilean::from_option(p0.sub(&beta0_sq.mul(&gap)).is_nonneg());
    let term_p_sq = match gap.is_positive() {
        Some(true) => Some(p0.div(&gap)),
        _ => None,
    };

    let subnormal = feasible.and(c_n).and(c_p).and(c_q);
    let mut bound_sq: Option<Scalar> = None;
    for t in [term_p_sq.as_ref(), Some(&term_q), Some(&term_n)]
        .into_iter()
        .flatten()
    {
        bound_sq = Some(match bound_sq {
            None => t.clone(),
            Some(b) => {
                if t.sub(&b).is_nonneg() == Some(true) {
                    b
                } else {
                    t.clone()
                }
            }
        });
    }
    let fmt = |t: &Option<Scalar>| match t {
        Some(t) => t.to_decimal(6),
        None => "—".into(),
    };
    let detail = format!(
        "term squares (v, p, q, n) = ({}, {}, {}, {}); feasibility {:?}; β₀² = {}",
        term_v_sq.to_decimal(6),
        fmt(&term_p_sq),
        term_q.to_decimal(6),
        fmt(&Some(term_n.clone())),
        feasible,
        p.beta0_sq,
    );
    Ok(FlatReport {
        feasible,
        term_v_sq,
        term_p_sq,
        term_q_sq: term_q,
        term_n_sq: Some(term_n),
        bound_sq,
        subnormal,
        detail,
    })
}

/// Build the field on a `grid × grid` rectangle.  The first-column
/// measure attachment is present exactly when the backward extension
/// through `β₀` is certified to exist.
pub fn build_flat(p: &FlatParams, grid: usize) -> Result<WeightField> {
    if grid < 8 {
        return Err(Error::Invalid(format!(
            "grid must be at least 8 to leave room for the testers; got {grid}"
        )));
    }
    let xi_m: Vec<Scalar> = (0..=grid as u32).map(|k| p.xi.moment(k)).collect();
    let eta1_m: Vec<Scalar> = (0..=grid as u32).map(|k| p.eta1.moment(k)).collect();
    for (what, ms) in [("ξ", &xi_m), ("η₁", &eta1_m)] {
        if ms.iter().any(|m| m.is_positive() != Some(true)) {
            return Err(Error::Precision(format!(
                "moments of {what} not certified positive at working precision"
            )));
        }
    }
    let a_sq = Scalar::from(p.a_sq.clone());
    let b_sq = Scalar::from(p.b_sq.clone());
    let mut alpha = Vec::with_capacity(grid);
    let mut beta = Vec::with_capacity(grid);
    for k2 in 0..grid {
        let mut arow = Vec::with_capacity(grid);
        let mut brow = Vec::with_capacity(grid);
        for k1 in 0..grid {
            arow.push(match (k1, k2) {
                (_, 0) => xi_m[k1 + 1].div(&xi_m[k1]),
                (0, _) => a_sq
                    .mul(&b_sq.pow_i((k2 as i64) - 1)?)
                    .div(&eta1_m[k2 - 1]),
                _ => Scalar::one(),
            });
            brow.push(match (k1, k2) {
                (0, 0) => Scalar::from(p.beta0_sq.clone()),
                (_, 0) => a_sq
                    .mul(&Scalar::from(p.beta0_sq.clone()))
                    .div(&xi_m[k1]),
                (0, _) => eta1_m[k2].div(&eta1_m[k2 - 1]),
                _ => b_sq.clone(),
            });
        }
        alpha.push(arow);
        beta.push(brow);
    }
    let mut field = WeightField::new(alpha, beta)?
        .with_row0(p.xi.clone())?
        .with_core_x(Measure1D::dirac(rat_int(1))?)?
        .with_core_y(Measure1D::dirac(p.b_sq.clone())?)?;
    let ext =
        crate::shift1::backward_extension(&p.eta1, &Scalar::from(p.beta0_sq.clone()))?;
    if ext.valid == Trilean::True {
        let col0 = ext.measure.ok_or_else(|| {
            Error::Invalid("valid backward extension must carry its measure".into())
        })?;
        field = field.with_col0(col0)?;
    }
    let commuting = field.check_commuting()?;
    if commuting.status != Trilean::True {
        return Err(Error::Invalid(format!(
            "family weights fail the commutativity audit: {}",
            commuting.detail
        )));
    }
    Ok(field)
}

/// Decide subnormality by building the field and running the generic
/// two-stage extension pipeline.
pub fn pipeline_verdict(p: &FlatParams) -> Result<TcReport> {
    let ext =
        crate::shift1::backward_extension(&p.eta1, &Scalar::from(p.beta0_sq.clone()))?;
    match ext.valid {
        Trilean::False => Ok(TcReport {
            subnormal: Trilean::False,
            berger: None,
            detail: "the first column admits no backward extension: β₀² ‖1/t‖_{η₁} > 1"
                .into(),
        }),
        Trilean::Undecided => Ok(TcReport {
            subnormal: Trilean::Undecided,
            berger: None,
            detail: "column backward extension undecided at working precision".into(),
        }),
        Trilean::True => subnormal_backext2(&build_flat(p, FLAT_GRID)?, 4),
    }
}

/// Dual-path verdict: closed form and pipeline must not contradict each
/// other; a certified disagreement is a hard error.
pub fn subnormal_flat(p: &FlatParams) -> Result<FlatReport> {
    let mut formula = closed_form_verdict(p)?;
    let pipeline = pipeline_verdict(p)?;
    match (formula.subnormal, pipeline.subnormal) {
        (Trilean::True, Trilean::False) | (Trilean::False, Trilean::True) => {
            return Err(Error::Mismatch(format!(
                "closed form says {:?} but the extension pipeline says {:?} ({} / {})",
                formula.subnormal, pipeline.subnormal, formula.detail, pipeline.detail
            )))
        }
        _ => {}
    }
    if formula.subnormal == Trilean::Undecided {
        formula.subnormal = pipeline.subnormal;
    }
    formula.detail = format!("{}; pipeline: {}", formula.detail, pipeline.detail);
    Ok(formula)
}

/// Deterministic sample of parameter sets covering feasible/infeasible
/// and pass/fail/boundary cases, all with rational data so that every
/// verdict is certified.
pub fn random_flat_params(n: usize, seed: u64) -> Result<Vec<FlatParams>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let a_sq = rat(1 + rng.gen_range(0..7), 8);
        let b_sq = [rat(1, 2), rat(3, 4), rat_int(1), rat(5, 4)]
            [rng.gen_range(0..4usize)]
        .clone();
        // η₁: mass v₁ at b², remainder at c = b²(2+D)/4 with D ∈ 0..=6.
        let v1 = rat(rng.gen_range(0..=8), 8);
        let c = &b_sq * rat(2 + rng.gen_range(0..=6), 4);
        let mut eta1 = Measure1D::point_mass(b_sq.clone(), Scalar::from(v1.clone()))?;
        if v1 < rat_int(1) {
            eta1 = eta1.plus(&Measure1D::point_mass(
                c,
                Scalar::from(rat_int(1) - &v1),
            )?);
        }
        // ξ: p at 0, optional interior atom, rest at 1.
        let p0 = rat(rng.gen_range(0..=4), 10);
        let mut xi = Measure1D::point_mass(Rat::zero(), Scalar::from(p0.clone()))?;
        let mut q = rat_int(1) - &p0;
        if rng.gen_range(0..3) == 0 {
            let w = rat(1, 10);
            xi = xi.plus(&Measure1D::point_mass(rat(1, 2), Scalar::from(w.clone()))?);
            q -= w;
        }
        if !q.is_positive() {
            continue;
        }
        xi = xi.plus(&Measure1D::point_mass(rat_int(1), Scalar::from(q))?);
        // β₀²: scale the closed-form bound to mix verdicts (σ = 1 lands
        // exactly on the boundary).
        let probe = FlatParams::new(a_sq, b_sq, xi, eta1, rat(1, 100))?;
        let bound = closed_form_verdict(&probe)?.bound_sq;
        let beta0_sq = match bound {
            Some(b) if b.is_positive() == Some(true) => {
                let sigma = [
                    rat(1, 2),
                    rat(9, 10),
                    rat_int(1),
                    rat(101, 100),
                    rat(3, 2),
                ][out.len() % 5]
                    .clone();
                b.as_exact()
                    .expect("rational data stays on the exact track")
                    * sigma
            }
            _ => rat(1, 100),
        };
        out.push(probe.with_beta0_sq(beta0_sq)?);
    }
    Ok(out)
}

// ==== tests ====
