//! Regime classification, the properness constant, and splitting reports.
//!
//! The sign behaviour of the extremal polynomial `F` on `(-1, 1)` decides
//! everything here:
//!
//! - `F > 0` — an extremal metric exists and the modified energy is proper;
//! - `F ≥ 0` with interior zeros — the energy is bounded below but not
//!   proper; the manifold splits at the zeros with cusp-type ends;
//! - `F < 0` somewhere — the energy is unbounded below; the split produces
//!   parts separated by conical interior ends at the sign changes.

use serde::Serialize;

use crate::admissible::{extremal_polynomial, AdmissibleClass, ClassError};
use crate::poly::{PolyError, RatPoly};
use crate::rat::{rat, Rat, RatInterval};
use crate::roots::{certified_min, is_nonneg_on, isolate_roots, Positivity, RootRecord};

/// Energy regime of a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub enum Regime {
    /// Profile positive on `(-1, 1)`: an extremal metric exists and the
    /// modified energy is proper.
    ExistsExtremal,
    /// Profile nonnegative with interior zeros: energy bounded below, not
    /// proper.
    BoundedNotProper,
    /// Profile negative somewhere: energy unbounded below.
    Unbounded,
}

/// Label for an end of a split part.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum SingularityLabel {
    /// Boundary end with full angle `2π` (cone parameter 1).
    SmoothEnd,
    /// Conical end; the cone angle is `2π` times the enclosed multiple.
    /// Degenerate (point) enclosure at the `z = ±1` ends, where the multiple
    /// is the class angle itself.
    ConicalEnd { kappa: RatInterval },
    /// Interior double zero: complete cusp end.
    CuspEnd,
    /// Interior zero of multiplicity at least 3. For even multiplicity the
    /// normal-form order is the multiplicity itself; for odd multiplicity no
    /// order is asserted, only the multiplicity is recorded.
    GeneralizedCuspEnd {
        multiplicity: u32,
        order: Option<u32>,
    },
}

/// One part of a split: the hull of its enclosure boundaries, end labels,
/// and the sign of the profile on its interior.
#[derive(Debug, Clone, Serialize)]
pub struct SplitPart {
    /// Hull from the left boundary's enclosure to the right one's; adjacent
    /// parts overlap exactly on the shared root enclosure.
    pub span: RatInterval,
    pub left: SingularityLabel,
    pub right: SingularityLabel,
    /// True when the profile is strictly positive between the part's roots.
    pub positive: bool,
}

/// Full splitting report: `m` distinct interior roots give `m + 1` parts.
#[derive(Debug, Clone, Serialize)]
pub struct SplitReport {
    pub regime: Regime,
    pub roots: Vec<RootRecord>,
    pub parts: Vec<SplitPart>,
}

/// Errors from classification and splitting.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error("polynomial arithmetic failed: {0}")]
    Poly(#[from] PolyError),
    #[error("operation requires a positive profile, but the regime is {found:?}")]
    RegimeMismatch { found: Regime },
    #[error("root has multiplicity {multiplicity}, but a simple sign-change root is required")]
    NonSimpleRoot { multiplicity: u32 },
    #[error("invalid profile: {field}: {reason}")]
    BadProfile { field: String, reason: String },
}

/// A momentum profile: fibre polynomial `p_c`, extremal polynomial `F`, and
/// cone parameter `κ`, with the boundary conditions `F(±1) = 0`,
/// `F'(∓1) = ±2κ p_c(∓1)` validated exactly.
///
/// Synthetic profiles (e.g. `p_c ≡ 1`) are accepted here so fixtures and
/// demos can bypass class construction; configuration files cannot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentumProfile {
    p_c: RatPoly,
    f: RatPoly,
    kappa: Rat,
}

impl MomentumProfile {
    pub fn new(p_c: RatPoly, f: RatPoly, kappa: Rat) -> Result<Self, ClassifyError> {
        let bad = |field: &str, reason: String| ClassifyError::BadProfile {
            field: field.into(),
            reason,
        };
        if !kappa.is_positive() {
            return Err(bad("kappa", format!("{kappa} is not positive")));
        }
        let one = Rat::one();
        let minus_one = Rat::from_int(-1);
        if is_nonneg_on(&p_c, &minus_one, &one)? != Positivity::Positive
            || !p_c.eval(&one).is_positive()
            || !p_c.eval(&minus_one).is_positive()
        {
            return Err(bad("p_c", "must be positive on [-1, 1]".into()));
        }
        if !f.eval(&minus_one).is_zero() || !f.eval(&one).is_zero() {
            return Err(bad("f", "must vanish at z = ±1".into()));
        }
        let df = f.derivative();
        let two_kappa = rat(2, 1) * &kappa;
        if df.eval(&minus_one) != &two_kappa * &p_c.eval(&minus_one) {
            return Err(bad("f", "slope at z = -1 must equal 2κ·p_c(-1)".into()));
        }
        if df.eval(&one) != -(&two_kappa * &p_c.eval(&one)) {
            return Err(bad("f", "slope at z = 1 must equal -2κ·p_c(1)".into()));
        }
        Ok(MomentumProfile { p_c, f, kappa })
    }

    /// The profile of an admissible class.
    pub fn from_class(c: &AdmissibleClass) -> Result<Self, ClassifyError> {
        let data = extremal_polynomial(c)?;
        MomentumProfile::new(data.p_c, data.f_omega, data.kappa)
    }

    pub fn p_c(&self) -> &RatPoly {
        &self.p_c
    }

    pub fn f(&self) -> &RatPoly {
        &self.f
    }

    pub fn kappa(&self) -> &Rat {
        &self.kappa
    }
}

/// Regime of a class, decided exactly.
pub fn classify(c: &AdmissibleClass) -> Result<Regime, ClassifyError> {
    classify_profile(&MomentumProfile::from_class(c)?)
}

/// Regime of a profile, decided exactly from the sign of `F` on `(-1, 1)`.
pub fn classify_profile(profile: &MomentumProfile) -> Result<Regime, ClassifyError> {
    let positivity = is_nonneg_on(profile.f(), &Rat::from_int(-1), &Rat::one())?;
    Ok(match positivity {
        Positivity::Positive => Regime::ExistsExtremal,
        Positivity::NonnegWithInteriorZeros => Regime::BoundedNotProper,
        Positivity::SomewhereNegative => Regime::Unbounded,
    })
}

/// The properness constant `δ = min(c, c')` with `c = min F/(1-z)` over
/// `[0, 1]` and `c' = min F/(1+z)` over `[-1, 0]`.
///
/// Both quotients are exact polynomial divisions (the boundary conditions
/// make `1∓z` divide `F`), so each minimum is certified by critical-point
/// isolation. The returned value is a rational lower bound within `2⁻⁴⁰` of
/// the true minimum, refined until strictly positive, so the properness
/// inequality holds with the returned constant.
pub fn properness_delta(c: &AdmissibleClass) -> Result<Rat, ClassifyError> {
    properness_delta_profile(&MomentumProfile::from_class(c)?)
}

/// [`properness_delta`] on a prebuilt profile.
pub fn properness_delta_profile(profile: &MomentumProfile) -> Result<Rat, ClassifyError> {
    let regime = classify_profile(profile)?;
    if regime != Regime::ExistsExtremal {
        return Err(ClassifyError::RegimeMismatch { found: regime });
    }
    let one = Rat::one();
    let minus_one = Rat::from_int(-1);
    let zero = Rat::zero();
    // F/(1-z) on [0, 1] and F/(1+z) on [-1, 0].
    let right = profile
        .f()
        .exact_div(&RatPoly::from_coeffs(vec![one.clone(), Rat::from_int(-1)]))?;
    let left = profile
        .f()
        .exact_div(&RatPoly::from_coeffs(vec![one.clone(), one.clone()]))?;
    let mut width = rat(1, 1 << 40);
    for _ in 0..16 {
        let c_right = certified_min(&right, &zero, &one, &width)?;
        let c_left = certified_min(&left, &minus_one, &zero, &width)?;
        let delta = c_right.min(c_left);
        if delta.is_positive() {
            return Ok(delta);
        }
        width = width * rat(1, 1 << 20);
    }
    Err(ClassError::Invariant("properness constant did not certify positive".into()).into())
}

/// Splits a class at the interior roots of its extremal polynomial.
pub fn split(c: &AdmissibleClass) -> Result<SplitReport, ClassifyError> {
    split_profile(&MomentumProfile::from_class(c)?)
}

/// Splits a profile at the interior roots of `F`.
///
/// End labels: at `z = ±1`, a conical end of angle `2πκ` (smooth when
/// `κ = 1`); at an interior root, by multiplicity — simple roots get a
/// conical label with the angle enclosure of
/// [`conical_angle_at_sign_change_raw`], a double root is a cusp, higher
/// multiplicities are generalized cusps.
pub fn split_profile(profile: &MomentumProfile) -> Result<SplitReport, ClassifyError> {
    let regime = classify_profile(profile)?;
    let one = Rat::one();
    let minus_one = Rat::from_int(-1);
    let mut roots = isolate_roots(profile.f(), &minus_one, &one)?;
    let target = rat(1, 1 << 20);
    for r in &mut roots {
        r.refine_to(&target);
    }
    let boundary_label = if profile.kappa() == &one {
        SingularityLabel::SmoothEnd
    } else {
        SingularityLabel::ConicalEnd {
            kappa: RatInterval::point(profile.kappa().clone()),
        }
    };
    let interior_label = |rec: &RootRecord| -> Result<SingularityLabel, ClassifyError> {
        Ok(match rec.multiplicity() {
            1 => SingularityLabel::ConicalEnd {
                kappa: conical_angle_at_sign_change_raw(profile.f(), profile.p_c(), rec)?,
            },
            2 => SingularityLabel::CuspEnd,
            m if m % 2 == 0 => SingularityLabel::GeneralizedCuspEnd {
                multiplicity: m,
                order: Some(m),
            },
            m => SingularityLabel::GeneralizedCuspEnd {
                multiplicity: m,
                order: None,
            },
        })
    };
    // Part boundaries: -1, the root enclosures, 1.
    let mut bounds: Vec<(RatInterval, SingularityLabel)> =
        vec![(RatInterval::point(minus_one.clone()), boundary_label.clone())];
    for rec in &roots {
        bounds.push((rec.interval().clone(), interior_label(rec)?));
    }
    bounds.push((RatInterval::point(one.clone()), boundary_label));
    let mut parts = Vec::with_capacity(bounds.len() - 1);
    for w in bounds.windows(2) {
        let (left_iv, left_label) = &w[0];
        let (right_iv, right_label) = &w[1];
        // Roots lie inside their enclosures, so the gap midpoint is a
        // root-free sample of the part's interior sign.
        let sample = (left_iv.hi() + right_iv.lo()) * rat(1, 2);
        parts.push(SplitPart {
            span: RatInterval::new(left_iv.lo().clone(), right_iv.hi().clone()),
            left: left_label.clone(),
            right: right_label.clone(),
            positive: profile.f().eval(&sample).is_positive(),
        });
    }
    Ok(SplitReport {
        regime,
        roots,
        parts,
    })
}

/// Cone-angle multiple at a simple sign-change root of a class profile; the
/// cone angle there is `2π` times the returned enclosure.
pub fn conical_angle_at_sign_change(
    c: &AdmissibleClass,
    root: &RootRecord,
) -> Result<RatInterval, ClassifyError> {
    let profile = MomentumProfile::from_class(c)?;
    conical_angle_at_sign_change_raw(profile.f(), profile.p_c(), root)
}

/// Enclosure of `|F'|/(2 p_c)` over a simple root's isolating interval.
///
/// The absolute value orients the angle to the side where the profile is
/// positive. The enclosure is refined until `F'` has definite sign on it
/// (possible exactly because the root is simple), and narrows monotonically
/// as the input enclosure narrows.
pub fn conical_angle_at_sign_change_raw(
    f: &RatPoly,
    p_c: &RatPoly,
    root: &RootRecord,
) -> Result<RatInterval, ClassifyError> {
    if root.multiplicity() != 1 {
        return Err(ClassifyError::NonSimpleRoot {
            multiplicity: root.multiplicity(),
        });
    }
    let df = f.derivative();
    let mut rec = root.clone();
    let mut width = rec.interval().width();
    loop {
        let slope = df.eval_interval(rec.interval());
        if !slope.contains_zero() {
            let denom = p_c.eval_interval(rec.interval()).scale(&rat(2, 1));
            return Ok(slope.abs().div(&denom));
        }
        if width.is_zero() {
            return Err(
                ClassError::Invariant("slope enclosure keeps straddling zero".into()).into(),
            );
        }
        width = width * rat(1, 2);
        rec.refine_to(&width);
    }
}
