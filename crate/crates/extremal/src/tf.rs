//! Closed-form oracle and phase analysis for the one-factor family (`tf`):
//! a single base factor of dimension 1, the ruled-surface case.
//!
//! Everything the general pipeline computes has a hand-checkable closed form
//! here, so this module doubles as an end-to-end oracle: the quadratic `Q`
//! with `F = (1−z²)Q/(2(3−x²))`, the affine coefficients, the sufficient
//! angle bound, and — at `κ = 1` — the discriminant `Δ(x)` whose sign on
//! `(0, 1)` separates the three phases of the family.

use serde::Serialize;

use crate::admissible::{extremal_polynomial, AdmissibleClass, BaseFactor, ClassError};
use crate::classify::{classify, split, ClassifyError, Regime, SplitReport};
use crate::poly::{one_minus_z_squared, PolyError, RatPoly};
use crate::rat::{rat, Rat, RatInterval};
use crate::roots::count_roots_in;

/// Parameters of the one-factor family: normalized base curvature `s`,
/// class parameter `x ∈ (0, 1)`, cone parameter `κ > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct TfParams {
    pub s: Rat,
    pub x: Rat,
    pub kappa: Rat,
}

/// Errors from the case-study computations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TfError {
    #[error("x = {x} must lie strictly between 0 and 1")]
    XOutOfRange { x: Rat },
    #[error("kappa = {kappa} must be positive")]
    NonpositiveKappa { kappa: Rat },
    #[error("width = {width} must be positive")]
    NonpositiveWidth { width: Rat },
    #[error("the phase analysis needs s < 0, got s = {s}")]
    NonnegativeCurvature { s: Rat },
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("polynomial arithmetic failed: {0}")]
    Poly(#[from] PolyError),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl TfParams {
    pub fn new(s: Rat, x: Rat, kappa: Rat) -> Result<Self, TfError> {
        if !x.is_positive() || x >= Rat::one() {
            return Err(TfError::XOutOfRange { x });
        }
        if !kappa.is_positive() {
            return Err(TfError::NonpositiveKappa { kappa });
        }
        Ok(TfParams { s, x, kappa })
    }

    /// The corresponding one-factor admissible class.
    pub fn to_class(&self) -> Result<AdmissibleClass, TfError> {
        Ok(AdmissibleClass::new(
            vec![BaseFactor {
                d: 1,
                s: self.s.clone(),
                x: self.x.clone(),
            }],
            self.kappa.clone(),
        )?)
    }
}

/// The quadratic factor
/// `Q(z) = (2κx² − sx³)z² + (6κx − 2κx³)z + (6κ + sx³ − 4κx²)`.
///
/// Its boundary values factor as `Q(±1) = (6κ − 2κx²)(1 ± x) > 0`.
pub fn tf_q(p: &TfParams) -> RatPoly {
    let TfParams { s, x, kappa } = p;
    let x2 = x * x;
    let x3 = &x2 * x;
    let a = rat(2, 1) * kappa * &x2 - s * &x3;
    let b = rat(6, 1) * kappa * x - rat(2, 1) * kappa * &x3;
    let c = rat(6, 1) * kappa + s * &x3 - rat(4, 1) * kappa * &x2;
    RatPoly::from_coeffs(vec![c, b, a])
}

/// Closed form of the extremal polynomial, `(1−z²)·Q(z)/(2(3−x²))`; equal,
/// coefficient for coefficient, to what the general pipeline constructs.
pub fn tf_closed_form_f(p: &TfParams) -> RatPoly {
    let scale = (rat(2, 1) * (rat(3, 1) - &p.x * &p.x)).recip();
    (&one_minus_z_squared() * &tf_q(p)).scale(&scale)
}

/// Closed forms of the affine coefficients:
/// `A = 6x(sx − 2κ)/(3 − x²)`, `B = 6(κx² − sx − κ)/(3 − x²)`.
pub fn tf_ab(p: &TfParams) -> (Rat, Rat) {
    let TfParams { s, x, kappa } = p;
    let denom = rat(3, 1) - x * x;
    let a = rat(6, 1) * x * (s * x - rat(2, 1) * kappa) / &denom;
    let b = rat(6, 1) * (kappa * x * x - s * x - kappa) / &denom;
    (a, b)
}

/// Sufficient angle bound `max(0, −sx²/((1−x)(3+x)))`: every `κ` strictly
/// above it puts the class in the `ExistsExtremal` regime.
pub fn tf_kappa_bound(x: &Rat, s: &Rat) -> Result<Rat, TfError> {
    if !x.is_positive() || x >= &Rat::one() {
        return Err(TfError::XOutOfRange { x: x.clone() });
    }
    let bound = -(s * x * x) / ((Rat::one() - x) * (rat(3, 1) + x));
    Ok(bound.max(Rat::zero()))
}

/// The phase discriminant at `κ = 1`, as a polynomial in `x` for fixed `s`:
/// `Δ(x) = (6x − 2x³)² − 4(2x² − sx³)(6 + sx³ − 4x²)`,
/// the discriminant of `Q` for the smooth (κ = 1) family.
pub fn tf_delta_poly(s: &Rat) -> RatPoly {
    let b = RatPoly::from_coeffs(vec![Rat::zero(), rat(6, 1), Rat::zero(), rat(-2, 1)]);
    let a = RatPoly::from_coeffs(vec![Rat::zero(), Rat::zero(), rat(2, 1), -s.clone()]);
    let c = RatPoly::from_coeffs(vec![rat(6, 1), Rat::zero(), rat(-4, 1), s.clone()]);
    &(&b * &b) - &(&a * &c).scale(&rat(4, 1))
}

/// `Δ(x)` evaluated at a point, computed from the pipeline-extracted `Q`
/// rather than the direct polynomial — the redundant route that guards the
/// transcription of the `Q` coefficients.
pub fn tf_discriminant(x: &Rat, s: &Rat) -> Result<Rat, TfError> {
    let p = TfParams::new(s.clone(), x.clone(), Rat::one())?;
    let data = extremal_polynomial(&p.to_class()?)?;
    // Recover Q from F = (1−z²)Q/(2(3−x²)).
    let scale = rat(2, 1) * (rat(3, 1) - x * x);
    let q = data
        .f_omega
        .exact_div(&one_minus_z_squared())?
        .scale(&scale);
    let a = q.coeff(2);
    let b = q.coeff(1);
    let c = q.coeff(0);
    Ok(&b * &b - rat(4, 1) * a * c)
}

/// Rational enclosure of the phase boundary `x_s`, the unique sign change
/// of `Δ` in `(0, 1)` for `s < 0`: `Δ(lo) < 0 < Δ(hi)` with
/// `hi − lo ≤ width`, found by exact bisection.
pub fn tf_find_xs(s: &Rat, width: &Rat) -> Result<RatInterval, TfError> {
    if !width.is_positive() {
        return Err(TfError::NonpositiveWidth {
            width: width.clone(),
        });
    }
    if !s.is_negative() {
        return Err(TfError::NonnegativeCurvature { s: s.clone() });
    }
    let delta = tf_delta_poly(s);
    let roots = count_roots_in(&delta, &Rat::zero(), &Rat::one(), true)?;
    if roots != 1 {
        return Err(TfError::Invariant(format!(
            "expected one phase-boundary root in (0, 1), found {roots}"
        )));
    }
    // Δ < 0 just right of 0 (Δ(0) = 0, Δ'(0) = 0, Δ''(0) = −24); scan down
    // for a certified negative starting point.
    let mut lo = rat(1, 2);
    while !delta.eval(&lo).is_negative() {
        lo = lo * rat(1, 2);
        if lo.denom() > &num_bigint::BigInt::from(1u64 << 60) {
            return Err(TfError::Invariant("no negative sample found".into()));
        }
    }
    let mut hi = Rat::one();
    if !delta.eval(&hi).is_positive() {
        return Err(TfError::Invariant("Δ(1) is not positive".into()));
    }
    while (&hi - &lo) > *width {
        let mid = (&lo + &hi) * rat(1, 2);
        match delta.eval(&mid).signum() {
            -1 => lo = mid,
            1 => hi = mid,
            _ => {
                // Rational midpoint hit the algebraic root: collapse around it.
                let eps = width * rat(1, 4);
                lo = &mid - &eps;
                hi = &mid + &eps;
                break;
            }
        }
    }
    Ok(RatInterval::new(lo, hi))
}

/// Which of the three phases a parameter falls in at `κ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TfCase {
    /// `Δ(x) < 0`, below the boundary: extremal metric exists.
    BelowCritical,
    /// `x` inside the current `x_s` enclosure: critical within tolerance.
    NearCritical,
    /// `Δ(x) > 0`, above the boundary: unbounded energy, 3-part split.
    AboveCritical,
}

/// Phase report for one parameter of the `κ = 1` family.
#[derive(Debug, Clone, Serialize)]
pub struct TfRegimeReport {
    pub case: TfCase,
    /// Exact discriminant value at `x`.
    pub delta_value: Rat,
    /// The enclosure of `x_s` the case decision was made against.
    pub xs_enclosure: RatInterval,
    pub regime: Regime,
    /// Present above the boundary: the 3-part split with conical interior
    /// ends.
    pub split: Option<SplitReport>,
    /// Present above the boundary: the minimum point of `Q`,
    /// `−(6x − 2x³)/(2(2x² − sx³))`, verified to lie in `(−1, 1)`.
    pub vertex: Option<Rat>,
}

/// Decides the phase of `(x, s)` at `κ = 1` against an `x_s` enclosure of
/// the given width.
pub fn tf_regime(x: &Rat, s: &Rat, xs_width: &Rat) -> Result<TfRegimeReport, TfError> {
    let p = TfParams::new(s.clone(), x.clone(), Rat::one())?;
    if !s.is_negative() {
        return Err(TfError::NonnegativeCurvature { s: s.clone() });
    }
    let xs_enclosure = tf_find_xs(s, xs_width)?;
    let delta_value = tf_discriminant(x, s)?;
    let class = p.to_class()?;
    let regime = classify(&class)?;
    let case = if xs_enclosure.contains(x) || delta_value.is_zero() {
        TfCase::NearCritical
    } else if delta_value.is_negative() {
        TfCase::BelowCritical
    } else {
        TfCase::AboveCritical
    };
    let (split_report, vertex) = if case == TfCase::AboveCritical {
        let report = split(&class)?;
        if report.parts.len() != 3 {
            return Err(TfError::Invariant(format!(
                "above the boundary the split must have 3 parts, got {}",
                report.parts.len()
            )));
        }
        let x2 = x * x;
        let x3 = &x2 * x;
        let vertex = -(rat(6, 1) * x - rat(2, 1) * &x3)
            / (rat(2, 1) * (rat(2, 1) * &x2 - s * &x3));
        if vertex.abs() >= Rat::one() {
            return Err(TfError::Invariant(format!(
                "vertex {vertex} escaped (-1, 1)"
            )));
        }
        (Some(report), Some(vertex))
    } else {
        (None, None)
    };
    Ok(TfRegimeReport {
        case,
        delta_value,
        xs_enclosure,
        regime,
        split: split_report,
        vertex,
    })
}
