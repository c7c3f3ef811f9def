//! One-dimensional Berger-type measures on `[0, ∞)`.
//!
//! A [`Measure1D`] is a finite signed combination of
//!
//! * **atoms** `w · δ_c` at rational positions `c >= 0`, and
//! * **power pieces** `coef · t^exp dt` on rational intervals `[lo, hi]`,
//!
//! which is exactly the class needed for the Berger measures of the shifts
//! handled by this crate, and is closed under every operation used here:
//! scaling, addition, the `t`-weighted pushforwards `t^j dμ / γ`, the
//! power pushforwards `μ ∘ (t ↦ t^ℓ)^{-1}`, and division by `t`.
//!
//! Signed combinations are allowed internally (differences of measures
//! arise in every domination check); nonnegativity is *certified* on
//! demand by [`Measure1D::is_nonneg`] / [`Measure1D::dominates`], which
//! return an honest three-valued verdict.
//!
//! Integrability invariant: a piece touching `0` (`lo = 0`) must have
//! `exp > -1`, so that every moment `∫ t^k dμ`, `k >= 0`, is finite.
//! Atoms at `0` are allowed; the `1/t`-functionals report them as
//! [`Norm::Infinite`].
//!
//! Main items: [`Measure1D`], [`Atom`], [`Piece`], [`Norm`], [`Trilean`].

use num_traits::{One, Signed, Zero};
use serde::ser::SerializeMap;

use crate::error::{Error, Result};
use crate::numerics::scalar::{
    parse_rat, pow_rat, rat_int, rat_to_string, scalar_from_json, Rat, Scalar,
};

/// Three-valued certification verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trilean {
    /// Certified to hold.
    True,
    /// Certified to fail.
    False,
    /// Neither could be certified (interval overlap or depth exhaustion).
    Undecided,
}

impl Trilean {
    /// Conjunction: `False` dominates, then `Undecided`.
    pub fn and(self, other: Trilean) -> Trilean {
        match (self, other) {
            (Trilean::False, _) | (_, Trilean::False) => Trilean::False,
            (Trilean::Undecided, _) | (_, Trilean::Undecided) => Trilean::Undecided,
            _ => Trilean::True,
        }
    }

    /// Lift a certified comparison.
    pub fn from_option(o: Option<bool>) -> Trilean {
        match o {
            Some(true) => Trilean::True,
            Some(false) => Trilean::False,
            None => Trilean::Undecided,
        }
    }

    /// True exactly when certified to hold.
    pub fn is_true(self) -> bool {
        self == Trilean::True
    }
}

impl std::fmt::Display for Trilean {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Trilean::True => write!(f, "true"),
            Trilean::False => write!(f, "false"),
            Trilean::Undecided => write!(f, "undecided"),
        }
    }
}

/// Value of a `1/t`-type functional.
#[derive(Debug, Clone, PartialEq)]
pub enum Norm {
    /// Finite value.
    Finite(Scalar),
    /// Provably infinite (atom at `0`, or a non-integrable piece at `0`).
    Infinite,
}

impl Norm {
    /// The finite value, if any.
    pub fn finite(&self) -> Option<&Scalar> {
        match self {
            Norm::Finite(s) => Some(s),
            Norm::Infinite => None,
        }
    }

    /// True when finite.
    pub fn is_finite(&self) -> bool {
        matches!(self, Norm::Finite(_))
    }
}

/// Point mass `w · δ_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    /// Position `c >= 0`.
    pub pos: Rat,
    /// Mass (may be signed internally, may be an enclosure).
    pub mass: Scalar,
}

/// Density piece `coef · t^exp dt` on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub lo: Rat,
    pub hi: Rat,
    pub coef: Scalar,
    pub exp: Rat,
}

/// Finite combination of atoms and power pieces on `[0, ∞)`; see the
/// module docs.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure1D {
    atoms: Vec<Atom>,
    pieces: Vec<Piece>,
    probability: bool,
}

fn validate_atom(a: &Atom) -> Result<()> {
    if a.pos.is_negative() {
        return Err(Error::Invalid(format!(
            "atom position {} is negative",
            rat_to_string(&a.pos)
        )));
    }
    Ok(())
}

fn validate_piece(p: &Piece) -> Result<()> {
    if p.lo.is_negative() || p.lo >= p.hi {
        return Err(Error::Invalid(format!(
            "piece needs 0 <= lo < hi, got [{}, {}]",
            rat_to_string(&p.lo),
            rat_to_string(&p.hi)
        )));
    }
    if p.lo.is_zero() && p.exp <= rat_int(-1) {
        return Err(Error::Invalid(format!(
            "piece touching 0 needs exp > -1 for integrability, got exp = {}",
            rat_to_string(&p.exp)
        )));
    }
    Ok(())
}

impl Measure1D {
    /// General constructor; validates positions, intervals and the
    /// integrability invariant, then canonicalizes.
    pub fn new(atoms: Vec<Atom>, pieces: Vec<Piece>) -> Result<Self> {
        for a in &atoms {
            validate_atom(a)?;
        }
        for p in &pieces {
            validate_piece(p)?;
        }
        let mut m = Measure1D {
            atoms,
            pieces,
            probability: false,
        };
        m.canonicalize();
        Ok(m)
    }

    /// The zero measure.
    pub fn zero() -> Self {
        Measure1D {
            atoms: vec![],
            pieces: vec![],
            probability: false,
        }
    }

    /// Unit point mass at `pos >= 0`.
    pub fn dirac(pos: Rat) -> Result<Self> {
        Self::point_mass(pos, Scalar::one())
    }

    /// Point mass `mass · δ_pos`.
    pub fn point_mass(pos: Rat, mass: Scalar) -> Result<Self> {
        Self::new(vec![Atom { pos, mass }], vec![])
    }

    /// Lebesgue measure on `[lo, hi]` (density 1).
    pub fn lebesgue(lo: Rat, hi: Rat) -> Result<Self> {
        Self::new(
            vec![],
            vec![Piece {
                lo,
                hi,
                coef: Scalar::one(),
                exp: Rat::zero(),
            }],
        )
    }

    /// Normalized Lebesgue measure on `[lo, hi]`.
    pub fn uniform(lo: Rat, hi: Rat) -> Result<Self> {
        if lo >= hi {
            return Err(Error::Invalid("uniform needs lo < hi".into()));
        }
        let len = &hi - &lo;
        Self::new(
            vec![],
            vec![Piece {
                lo,
                hi,
                coef: Scalar::Exact(Rat::one() / len),
                exp: Rat::zero(),
            }],
        )
    }

    /// Atoms in canonical order (ascending position).
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Pieces in canonical order (ascending `(lo, hi, exp)`, refined so
    /// that distinct pieces never partially overlap).
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// True when structurally zero (after canonicalization).
    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.pieces.is_empty()
    }

    /// Whether this measure carries the probability assertion.
    pub fn is_probability_marked(&self) -> bool {
        self.probability
    }

    /// Assert total mass 1.  Exact masses are checked exactly; enclosures
    /// must contain 1.
    pub fn into_probability(mut self) -> Result<Self> {
        let m = self.total_mass();
        let ok = match m.as_exact() {
            Some(r) => r.is_one(),
            None => *m.lo() <= Rat::one() && Rat::one() <= *m.hi(),
        };
        if !ok {
            return Err(Error::Invalid(format!(
                "total mass {m} is not 1; cannot mark as probability measure"
            )));
        }
        self.probability = true;
        Ok(self)
    }

    fn canonicalize(&mut self) {
        // Atoms: sort by position, merge, drop certified zeros.
        self.atoms.sort_by(|a, b| a.pos.cmp(&b.pos));
        let mut atoms: Vec<Atom> = Vec::with_capacity(self.atoms.len());
        for a in self.atoms.drain(..) {
            match atoms.last_mut() {
                Some(last) if last.pos == a.pos => {
                    last.mass = last.mass.add(&a.mass);
                }
                _ => atoms.push(a),
            }
        }
        atoms.retain(|a| a.mass.sign() != Some(0));
        self.atoms = atoms;

        // Pieces: split on every breakpoint so supports are nested-or-equal,
        // then merge identical (lo, hi, exp) and drop certified zeros.
        let mut cuts: Vec<Rat> = Vec::new();
        for p in &self.pieces {
            cuts.push(p.lo.clone());
            cuts.push(p.hi.clone());
        }
        cuts.sort();
        cuts.dedup();
        let mut refined: Vec<Piece> = Vec::new();
        for p in self.pieces.drain(..) {
            let inner: Vec<&Rat> = cuts.iter().filter(|c| **c > p.lo && **c < p.hi).collect();
            let mut lo = p.lo.clone();
            for c in inner {
                refined.push(Piece {
                    lo: lo.clone(),
                    hi: c.clone(),
                    coef: p.coef.clone(),
                    exp: p.exp.clone(),
                });
                lo = c.clone();
            }
            refined.push(Piece {
                lo,
                hi: p.hi.clone(),
                coef: p.coef.clone(),
                exp: p.exp.clone(),
            });
        }
        refined.sort_by(|a, b| {
            (&a.lo, &a.hi, &a.exp).cmp(&(&b.lo, &b.hi, &b.exp))
        });
        let mut pieces: Vec<Piece> = Vec::with_capacity(refined.len());
        for p in refined {
            match pieces.last_mut() {
                Some(last) if last.lo == p.lo && last.hi == p.hi && last.exp == p.exp => {
                    last.coef = last.coef.add(&p.coef);
                }
                _ => pieces.push(p),
            }
        }
        pieces.retain(|p| p.coef.sign() != Some(0));
        self.pieces = pieces;
        self.probability = false;
    }

    /// Pointwise scaling `c · μ`.
    pub fn scaled(&self, c: &Scalar) -> Self {
        let mut m = Measure1D {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    pos: a.pos.clone(),
                    mass: a.mass.mul(c),
                })
                .collect(),
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    lo: p.lo.clone(),
                    hi: p.hi.clone(),
                    coef: p.coef.mul(c),
                    exp: p.exp.clone(),
                })
                .collect(),
            probability: false,
        };
        m.canonicalize();
        m
    }

    /// Sum `μ + ν` (signed combinations allowed).
    pub fn plus(&self, other: &Self) -> Self {
        let mut m = Measure1D {
            atoms: self.atoms.iter().chain(&other.atoms).cloned().collect(),
            pieces: self.pieces.iter().chain(&other.pieces).cloned().collect(),
            probability: false,
        };
        m.canonicalize();
        m
    }

    /// Difference `μ - ν` (signed).
    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(&Scalar::from_int(-1)))
    }

    /// Total mass `μ([0, ∞))`.
    pub fn total_mass(&self) -> Scalar {
        self.moment(0)
    }

    /// Mass of the atom at `pos` (zero if absent).
    pub fn atom_mass(&self, pos: &Rat) -> Scalar {
        self.atoms
            .iter()
            .find(|a| &a.pos == pos)
            .map(|a| a.mass.clone())
            .unwrap_or_else(Scalar::zero)
    }

    /// Copy with any atom at `0` removed.
    pub fn drop_zero_atom(&self) -> Self {
        let mut m = self.clone();
        m.atoms.retain(|a| !a.pos.is_zero());
        m.probability = false;
        m
    }

    /// `k`-th moment `∫ t^k dμ`.  Always finite thanks to the
    /// integrability invariant; exact whenever all data are exact and no
    /// logarithmic piece (`exp + k = -1` with `lo > 0`) appears.
    pub fn moment(&self, k: u32) -> Scalar {
        let mut acc = Scalar::zero();
        for a in &self.atoms {
            let pk = Scalar::Exact(a.pos.pow(k as i32));
            acc = acc.add(&a.mass.mul(&pk));
        }
        for p in &self.pieces {
            acc = acc.add(&piece_moment(p, k));
        }
        acc
    }

    /// `∫ (1/t) dμ` over `[0, ∞)`, reported as [`Norm::Infinite`] when an
    /// atom sits at `0` or a piece at `0` has `exp <= 0`.  Requires the
    /// measure to not be certified-negative anywhere (signed inputs are a
    /// caller bug); returns an error when a relevant sign is undecidable.
    pub fn inv_t_norm(&self) -> Result<Norm> {
        if self.is_nonneg() == Trilean::False {
            return Err(Error::Invalid(
                "1/t-norm of a certified-signed measure".into(),
            ));
        }
        self.inv_t_integral()
    }

    /// `∫ (1/t) dμ` as a signed linear functional (no nonnegativity
    /// requirement).  Infinite when mass touches `0` non-integrably.
    pub(crate) fn inv_t_integral(&self) -> Result<Norm> {
        let mut acc = Scalar::zero();
        for a in &self.atoms {
            if a.pos.is_zero() {
                // Canonicalization drops certified-zero masses, so this
                // atom really carries mass -- unless its sign is fuzzy.
                if a.mass.sign().is_none() {
                    return Err(Error::Precision(
                        "sign of the atom at 0 is undecided; cannot classify the 1/t-integral"
                            .into(),
                    ));
                }
                return Ok(Norm::Infinite);
            }
            acc = acc.add(&a.mass.div(&Scalar::Exact(a.pos.clone())));
        }
        for p in &self.pieces {
            if p.lo.is_zero() && p.exp <= Rat::zero() {
                // exp - 1 <= -1 at lo = 0: divergent.
                return Ok(Norm::Infinite);
            }
            let shifted = Piece {
                lo: p.lo.clone(),
                hi: p.hi.clone(),
                coef: p.coef.clone(),
                exp: &p.exp - Rat::one(),
            };
            acc = acc.add(&piece_moment(&shifted, 0));
        }
        Ok(Norm::Finite(acc))
    }

    /// The measure `(1/t) dμ` restricted to `t > 0`.  Errors when the
    /// restriction is not a valid finite measure of this class (atom at
    /// `0` with non-zero mass, or a piece at `0` with `exp <= 0`).
    pub fn inv_t_part(&self) -> Result<Self> {
        let mut atoms = Vec::new();
        for a in &self.atoms {
            if a.pos.is_zero() {
                return Err(Error::Infinite(
                    "cannot divide an atom at 0 by t".into(),
                ));
            }
            atoms.push(Atom {
                pos: a.pos.clone(),
                mass: a.mass.div(&Scalar::Exact(a.pos.clone())),
            });
        }
        let mut pieces = Vec::new();
        for p in &self.pieces {
            let exp = &p.exp - Rat::one();
            if p.lo.is_zero() && exp <= rat_int(-1) {
                return Err(Error::Infinite(format!(
                    "piece t^{} at 0 is not integrable against 1/t",
                    rat_to_string(&p.exp)
                )));
            }
            pieces.push(Piece {
                lo: p.lo.clone(),
                hi: p.hi.clone(),
                coef: p.coef.clone(),
                exp,
            });
        }
        Measure1D::new(atoms, pieces)
    }

    /// Normalized `t`-weighted pushforward `t^j dμ / γ`.
    ///
    /// `γ` must be certified positive (pass the `j`-th moment, or the
    /// corresponding shift moment `γ_j`, for a probability result).  For
    /// `j >= 1` an atom at `0` is annihilated; a certified-negative atom
    /// at `0` is rejected, since annihilating negative mass would turn a
    /// signed measure into a spuriously nonnegative one.
    pub fn t_weight(&self, j: u32, gamma: &Scalar) -> Result<Self> {
        if gamma.is_positive() != Some(true) {
            return Err(Error::Invalid(
                "t-weight normalizer must be certified positive".into(),
            ));
        }
        let mut atoms = Vec::new();
        for a in &self.atoms {
            if a.pos.is_zero() && j >= 1 {
                if a.mass.sign() == Some(-1) {
                    return Err(Error::Invalid(
                        "t-weight would annihilate a negative atom at 0".into(),
                    ));
                }
                continue;
            }
            let pj = Scalar::Exact(a.pos.pow(j as i32));
            atoms.push(Atom {
                pos: a.pos.clone(),
                mass: a.mass.mul(&pj).div(gamma),
            });
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                lo: p.lo.clone(),
                hi: p.hi.clone(),
                coef: p.coef.div(gamma),
                exp: &p.exp + rat_int(j as i64),
            })
            .collect();
        Measure1D::new(atoms, pieces)
    }

    /// Pushforward under `t ↦ t^ℓ`, `ℓ >= 1`: same moments at indices
    /// `ℓk`.  Atoms move to `pos^ℓ`; the piece `coef · t^exp` on
    /// `[lo, hi]` becomes `(coef/ℓ) · t^((exp+1)/ℓ - 1)` on
    /// `[lo^ℓ, hi^ℓ]`.
    pub fn power(&self, l: u32) -> Result<Self> {
        if l == 0 {
            return Err(Error::Domain("power pushforward needs ℓ >= 1".into()));
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                pos: a.pos.pow(l as i32),
                mass: a.mass.clone(),
            })
            .collect();
        let linv = Scalar::from_ratio(1, l as i64);
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                lo: p.lo.pow(l as i32),
                hi: p.hi.pow(l as i32),
                coef: p.coef.mul(&linv),
                exp: (&p.exp + Rat::one()) / rat_int(l as i64) - Rat::one(),
            })
            .collect();
        Measure1D::new(atoms, pieces)
    }

    /// Certified nonnegativity of this (possibly signed) combination.
    pub fn is_nonneg(&self) -> Trilean {
        let mut verdict = Trilean::True;
        for a in &self.atoms {
            verdict = verdict.and(Trilean::from_option(a.mass.is_nonneg()));
            if verdict == Trilean::False {
                return Trilean::False;
            }
        }
        // Canonical pieces with equal support are adjacent.
        let mut i = 0;
        while i < self.pieces.len() {
            let mut j = i + 1;
            while j < self.pieces.len()
                && self.pieces[j].lo == self.pieces[i].lo
                && self.pieces[j].hi == self.pieces[i].hi
            {
                j += 1;
            }
            verdict = verdict.and(certify_group_nonneg(&self.pieces[i..j]));
            if verdict == Trilean::False {
                return Trilean::False;
            }
            i = j;
        }
        verdict
    }

    /// Certified domination `μ >= ν` (as measures).
    pub fn dominates(&self, other: &Self) -> Trilean {
        self.minus(other).is_nonneg()
    }

    /// Certified equality as measures: canonical structural equality on
    /// the exact track, otherwise two-sided domination.
    pub fn equal_measure(&self, other: &Self) -> Trilean {
        if self == other {
            return Trilean::True;
        }
        self.dominates(other).and(other.dominates(self))
    }

    /// Serialize to the JSON object form (exact data only; enclosure
    /// masses cannot be written losslessly and produce an error).
    pub fn to_json(&self) -> Result<serde_json::Value> {
        let atom_json = |a: &Atom| -> Result<serde_json::Value> {
            let w = a
                .mass
                .as_exact()
                .ok_or_else(|| Error::Invalid("cannot serialize an enclosure mass".into()))?;
            let mut m = serde_json::Map::new();
            m.insert("c".into(), rat_to_string(&a.pos).into());
            m.insert("w".into(), rat_to_string(w).into());
            Ok(serde_json::Value::Object(m))
        };
        let piece_json = |p: &Piece| -> Result<serde_json::Value> {
            let c = p
                .coef
                .as_exact()
                .ok_or_else(|| Error::Invalid("cannot serialize an enclosure coefficient".into()))?;
            let mut m = serde_json::Map::new();
            m.insert("a".into(), rat_to_string(&p.lo).into());
            m.insert("b".into(), rat_to_string(&p.hi).into());
            m.insert("coef".into(), rat_to_string(c).into());
            m.insert("exp".into(), rat_to_string(&p.exp).into());
            Ok(serde_json::Value::Object(m))
        };
        let mut root = serde_json::Map::new();
        root.insert(
            "atoms".into(),
            serde_json::Value::Array(self.atoms.iter().map(atom_json).collect::<Result<_>>()?),
        );
        root.insert(
            "pieces".into(),
            serde_json::Value::Array(self.pieces.iter().map(piece_json).collect::<Result<_>>()?),
        );
        if self.probability {
            root.insert("probability".into(), true.into());
        }
        Ok(serde_json::Value::Object(root))
    }

    /// Parse from the JSON object form; rationals may be written as
    /// `"p/q"`, integers, or decimal literals (all parsed exactly).
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("measure must be a JSON object".into()))?;
        let rat_field = |m: &serde_json::Map<String, serde_json::Value>,
                         key: &str|
         -> Result<Rat> {
            let v = m
                .get(key)
                .ok_or_else(|| Error::Parse(format!("measure field {key:?} missing")))?;
            match v {
                serde_json::Value::String(s) => parse_rat(s),
                other => parse_rat(&other.to_string()),
            }
        };
        let mut atoms = Vec::new();
        if let Some(arr) = obj.get("atoms") {
            let arr = arr
                .as_array()
                .ok_or_else(|| Error::Parse("\"atoms\" must be an array".into()))?;
            for a in arr {
                let am = a
                    .as_object()
                    .ok_or_else(|| Error::Parse("atom must be an object".into()))?;
                atoms.push(Atom {
                    pos: rat_field(am, "c")?,
                    mass: scalar_from_json(
                        am.get("w")
                            .ok_or_else(|| Error::Parse("atom field \"w\" missing".into()))?,
                    )?,
                });
            }
        }
        let mut pieces = Vec::new();
        if let Some(arr) = obj.get("pieces") {
            let arr = arr
                .as_array()
                .ok_or_else(|| Error::Parse("\"pieces\" must be an array".into()))?;
            for p in arr {
                let pm = p
                    .as_object()
                    .ok_or_else(|| Error::Parse("piece must be an object".into()))?;
                pieces.push(Piece {
                    lo: rat_field(pm, "a")?,
                    hi: rat_field(pm, "b")?,
                    coef: scalar_from_json(
                        pm.get("coef")
                            .ok_or_else(|| Error::Parse("piece field \"coef\" missing".into()))?,
                    )?,
                    exp: rat_field(pm, "exp")?,
                });
            }
        }
        let m = Measure1D::new(atoms, pieces)?;
        if obj.get("probability").and_then(|b| b.as_bool()) == Some(true) {
            m.into_probability()
        } else {
            Ok(m)
        }
    }
}

impl serde::Serialize for Measure1D {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::Error as _;
        let v = self.to_json().map_err(S::Error::custom)?;
        let obj = v.as_object().unwrap();
        let mut m = s.serialize_map(Some(obj.len()))?;
        for (k, val) in obj {
            m.serialize_entry(k, val)?;
        }
        m.end()
    }
}

impl<'de> serde::Deserialize<'de> for Measure1D {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = serde_json::Value::deserialize(d)?;
        Measure1D::from_json(&v).map_err(D::Error::custom)
    }
}

/// `∫ t^k · coef · t^exp dt` over `[lo, hi]`.
fn piece_moment(p: &Piece, k: u32) -> Scalar {
    let s = &p.exp + rat_int(k as i64);
    if s == rat_int(-1) {
        // coef · (ln hi - ln lo); lo > 0 is guaranteed by the invariant.
        let lnh = Scalar::Exact(p.hi.clone())
            .ln()
            .expect("piece endpoints are positive here");
        let lnl = Scalar::Exact(p.lo.clone())
            .ln()
            .expect("piece endpoints are positive here");
        return p.coef.mul(&lnh.sub(&lnl));
    }
    let s1 = &s + Rat::one();
    let hi_p = pow_rat(&p.hi, &s1).expect("positive base");
    let lo_p = if p.lo.is_zero() {
        // s + 1 > 0 by the integrability invariant.
        Scalar::zero()
    } else {
        pow_rat(&p.lo, &s1).expect("positive base")
    };
    p.coef.mul(&hi_p.sub(&lo_p)).div(&Scalar::Exact(s1))
}

/// Certify `Σ coef_i t^{exp_i} >= 0` on the common interval `[lo, hi]` of
/// a canonical group of pieces.
fn certify_group_nonneg(group: &[Piece]) -> Trilean {
    debug_assert!(!group.is_empty());
    let lo = &group[0].lo;
    let hi = &group[0].hi;
    // Factor out t^{e_min} (positive on (lo, hi]); relative exponents >= 0.
    let e_min = group.iter().map(|p| &p.exp).min().unwrap().clone();
    let terms: Vec<(Scalar, Rat)> = group
        .iter()
        .map(|p| (p.coef.clone(), &p.exp - &e_min))
        .collect();

    if terms
        .iter()
        .all(|(c, _)| c.is_nonneg() == Some(true))
    {
        return Trilean::True;
    }
    if terms.len() == 1 {
        return Trilean::from_option(terms[0].0.is_nonneg());
    }
    if terms.len() == 2 {
        // c1 + c2 t^δ with δ > 0 is monotone on [lo, hi] (whatever the
        // sign of c2), so its minimum is at an endpoint.
        let at = |t: &Rat| eval_terms(&terms, t);
        let v_lo = at(lo);
        let v_hi = at(hi);
        if v_lo.is_nonneg() == Some(true) && v_hi.is_nonneg() == Some(true) {
            return Trilean::True;
        }
        if v_lo.is_nonneg() == Some(false) || v_hi.is_nonneg() == Some(false) {
            return Trilean::False;
        }
        return Trilean::Undecided;
    }
    // Three or more terms: interval lower bound plus midpoint probing,
    // refined by bisection.  The depth bound keeps the worst case (a
    // density tangent to zero, where no finite subdivision can decide)
    // at ~2^14 nodes; deeper refinement has no user in this crate.
    certify_terms_rec(&terms, lo, hi, 14)
}

fn eval_terms(terms: &[(Scalar, Rat)], t: &Rat) -> Scalar {
    let mut acc = Scalar::zero();
    for (c, f) in terms {
        let tf = pow_rat(t, f).expect("nonneg base, nonneg exponent");
        acc = acc.add(&c.mul(&tf));
    }
    acc
}

fn certify_terms_rec(terms: &[(Scalar, Rat)], lo: &Rat, hi: &Rat, depth: u32) -> Trilean {
    // Each term c · t^f with f >= 0 is monotone in t, so on [lo, hi] it
    // lies between its endpoint values; summing the per-term minima gives
    // a rigorous lower bound for the density.
    let mut lower = Scalar::zero();
    for (c, f) in terms {
        let v_lo = c.mul(&pow_rat(lo, f).expect("nonneg base"));
        let v_hi = c.mul(&pow_rat(hi, f).expect("nonneg base"));
        let term_min = if v_lo.le_certified(&v_hi) == Some(true) {
            v_lo
        } else if v_hi.le_certified(&v_lo) == Some(true) {
            v_hi
        } else {
            // Hull lower endpoint covers both.
            Scalar::Interval {
                lo: v_lo.lo().clone().min(v_hi.lo().clone()),
                hi: v_lo.hi().clone().min(v_hi.hi().clone()),
            }
        };
        lower = lower.add(&term_min);
    }
    if lower.is_nonneg() == Some(true) {
        return Trilean::True;
    }
    let mid = (lo + hi) / rat_int(2);
    if eval_terms(terms, &mid).sign() == Some(-1) {
        // The continuous density is negative at an interior point.
        return Trilean::False;
    }
    if eval_terms(terms, lo).sign() == Some(-1) || eval_terms(terms, hi).sign() == Some(-1) {
        return Trilean::False;
    }
    if depth == 0 {
        return Trilean::Undecided;
    }
    let left = certify_terms_rec(terms, lo, &mid, depth - 1);
    if left == Trilean::False {
        return Trilean::False;
    }
    left.and(certify_terms_rec(terms, &mid, hi, depth - 1))
}
