//! Admissible classes on fibre bundles and their extremal polynomials.
//!
//! A class is described by base factors `(d, s, x)` — complex dimension,
//! normalized scalar curvature, and class parameter `x ∈ (0,1)` — together
//! with a cone angle `2πκ`, `κ > 0`. From these the module computes, exactly:
//!
//! - the characteristic polynomial `p_c(z) = Π (1 + xᵢ z)^{dᵢ}`;
//! - the moments `α_r` of `p_c` and the curvature-weighted moments `β_r`;
//! - the affine coefficients `(A, B)` solving the 2×2 moment system;
//! - the extremal polynomial `F`, the unique solution of
//!   `F'' = (Az + B + Σᵢ 2dᵢsᵢxᵢ/(1+xᵢz)) p_c` with `F(±1) = 0`;
//! - the decomposition `F = F_zero + κ·F_lin` and the minimal positive cone
//!   angle above which `F` becomes positive on `(-1, 1)`.

use serde::Serialize;

use crate::poly::{linear, PolyError, RatPoly};
use crate::quad::{integrate, QuadratureSpec};
use crate::rat::{rat, Rat, RatInterval};
use crate::roots::{is_nonneg_on, Positivity};

/// One base factor of an admissible class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct BaseFactor {
    /// Complex dimension of the factor; at least 1.
    pub d: u32,
    /// Normalized constant scalar curvature (the factor's curvature is `2ds`).
    pub s: Rat,
    /// Class parameter, strictly between 0 and 1.
    pub x: Rat,
}

/// A validated admissible class: base factors plus cone angle `2πκ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibleClass {
    factors: Vec<BaseFactor>,
    kappa: Rat,
}

/// Validation and construction errors for admissible-class computations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassError {
    #[error("class needs at least one base factor")]
    EmptyFactors,
    #[error("factor {index}: dimension d must be at least 1")]
    InvalidDimension { index: usize },
    #[error("factor {index}: x = {x} is outside the open interval (0, 1)")]
    XOutOfRange { index: usize, x: Rat },
    #[error("cone angle parameter kappa = {kappa} must be positive")]
    NonpositiveKappa { kappa: Rat },
    #[error("width parameter {width} must be positive")]
    NonpositiveWidth { width: Rat },
    #[error("profile does not vanish at z = {at}")]
    ProfileBoundary { at: i32 },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl From<PolyError> for ClassError {
    fn from(e: PolyError) -> Self {
        ClassError::Invariant(e.to_string())
    }
}

impl AdmissibleClass {
    pub fn new(factors: Vec<BaseFactor>, kappa: Rat) -> Result<Self, ClassError> {
        if factors.is_empty() {
            return Err(ClassError::EmptyFactors);
        }
        for (index, f) in factors.iter().enumerate() {
            if f.d < 1 {
                return Err(ClassError::InvalidDimension { index });
            }
            if !f.x.is_positive() || f.x >= Rat::one() {
                return Err(ClassError::XOutOfRange {
                    index,
                    x: f.x.clone(),
                });
            }
        }
        if !kappa.is_positive() {
            return Err(ClassError::NonpositiveKappa { kappa });
        }
        Ok(AdmissibleClass { factors, kappa })
    }

    pub fn factors(&self) -> &[BaseFactor] {
        &self.factors
    }

    pub fn kappa(&self) -> &Rat {
        &self.kappa
    }

    /// Same factors, different cone angle.
    pub fn with_kappa(&self, kappa: Rat) -> Result<Self, ClassError> {
        AdmissibleClass::new(self.factors.clone(), kappa)
    }
}

/// `p_c(z) = Π (1 + xᵢ z)^{dᵢ}`; positive on `[-1, 1]` because every `xᵢ < 1`.
pub fn characteristic_polynomial(c: &AdmissibleClass) -> RatPoly {
    let mut p = RatPoly::one();
    for f in &c.factors {
        p = &p * &linear(Rat::one(), f.x.clone()).pow(f.d);
    }
    p
}

/// The moment data of a class: `alpha[r]` is the r-th moment of `p_c` over
/// `[-1, 1]`; `beta[r]` additionally carries the boundary and curvature terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Moments {
    pub alpha: [Rat; 3],
    pub beta: [Rat; 2],
}

/// Exact moments. The curvature integrand `p_c/(1+xᵢt)` is an exact
/// polynomial quotient because `(1+xᵢt)^{dᵢ}` divides `p_c` with `dᵢ ≥ 1`.
pub fn moments(c: &AdmissibleClass) -> Result<Moments, ClassError> {
    let p = characteristic_polynomial(c);
    let p1 = p.eval(&Rat::one());
    let pm1 = p.eval(&Rat::from_int(-1));
    let alpha = [p.moment(0), p.moment(1), p.moment(2)];
    let mut beta = Vec::with_capacity(2);
    for r in 0..2u32 {
        let boundary = if r % 2 == 0 { &p1 + &pm1 } else { &p1 - &pm1 };
        let mut acc = &c.kappa * &boundary;
        for f in &c.factors {
            let quotient = p.exact_div(&linear(Rat::one(), f.x.clone()))?;
            let weight = Rat::from_int(i64::from(f.d)) * &f.s * &f.x;
            acc = acc + weight * quotient.moment(r);
        }
        beta.push(acc);
    }
    let [beta0, beta1] = [beta.remove(0), beta.remove(0)];
    Ok(Moments {
        alpha,
        beta: [beta0, beta1],
    })
}

/// Solves the exact 2×2 system `Aα₁ + Bα₀ = −2β₀`, `Aα₂ + Bα₁ = −2β₁`.
/// The determinant `α₀α₂ − α₁²` is strictly positive for every valid class.
pub fn solve_ab(c: &AdmissibleClass) -> Result<(Rat, Rat), ClassError> {
    let m = moments(c)?;
    solve_ab_from(&m)
}

fn solve_ab_from(m: &Moments) -> Result<(Rat, Rat), ClassError> {
    let det = determinant(m);
    if !det.is_positive() {
        return Err(ClassError::Invariant(format!(
            "moment determinant {det} is not positive"
        )));
    }
    let [a0, a1, a2] = &m.alpha;
    let [b0, b1] = &m.beta;
    let a = rat(2, 1) * (b0 * a1 - b1 * a0) / &det;
    let b = rat(2, 1) * (a1 * b1 - a2 * b0) / &det;
    // Residuals of the defining system must vanish identically.
    if !(&a * a1 + &b * a0 + rat(2, 1) * b0).is_zero()
        || !(&a * a2 + &b * a1 + rat(2, 1) * b1).is_zero()
    {
        return Err(ClassError::Invariant("moment system residual".into()));
    }
    Ok((a, b))
}

fn determinant(m: &Moments) -> Rat {
    let [a0, a1, a2] = &m.alpha;
    a0 * a2 - a1 * a1
}

/// The extremal polynomial and everything computed on the way to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtremalData {
    pub a: Rat,
    pub b: Rat,
    pub f_omega: RatPoly,
    /// Angle-independent part of `f_omega`.
    pub f_zero: RatPoly,
    /// Coefficient of `κ` in `f_omega`.
    pub f_lin: RatPoly,
    pub alpha: [Rat; 3],
    pub beta: [Rat; 2],
    pub p_c: RatPoly,
    pub kappa: Rat,
}

/// Builds `F` for the class angle by two exact antidifferentiations of
/// `F'' = (Az + B + Σ 2dᵢsᵢxᵢ/(1+xᵢz)) p_c`, fixing constants with
/// `F(-1) = 0` and `F'(-1) = 2κ p_c(-1)`. The remaining boundary conditions
/// `F(1) = 0` and `F'(1) = -2κ p_c(1)` are consequences of the moment system
/// and are asserted, not imposed.
fn build_f(c: &AdmissibleClass) -> Result<RatPoly, ClassError> {
    let p = characteristic_polynomial(c);
    let (a, b) = solve_ab(c)?;
    let mut f2 = &RatPoly::from_coeffs(vec![b, a]) * &p;
    for fac in &c.factors {
        let quotient = p.exact_div(&linear(Rat::one(), fac.x.clone()))?;
        let weight = rat(2, 1) * Rat::from_int(i64::from(fac.d)) * &fac.s * &fac.x;
        f2 = &f2 + &quotient.scale(&weight);
    }
    let minus_one = Rat::from_int(-1);
    let pm1 = p.eval(&minus_one);
    let p1 = p.eval(&Rat::one());
    let mut f1 = f2.antiderivative();
    let c1 = rat(2, 1) * &c.kappa * &pm1 - f1.eval(&minus_one);
    f1 = &f1 + &RatPoly::constant(c1);
    let mut f0 = f1.antiderivative();
    let c0 = -f0.eval(&minus_one);
    f0 = &f0 + &RatPoly::constant(c0);
    if !f0.eval(&Rat::one()).is_zero() {
        return Err(ClassError::Invariant(
            "constructed profile does not vanish at z = 1".into(),
        ));
    }
    if f1.eval(&Rat::one()) != rat(-2, 1) * &c.kappa * &p1 {
        return Err(ClassError::Invariant(
            "constructed profile has wrong slope at z = 1".into(),
        ));
    }
    Ok(f0)
}

/// Splits the extremal polynomial into its angle-independent part and the
/// coefficient of `κ`, plus the rescaled direction `G = (det/2)·F_lin`.
/// Linearity in `κ` is verified exactly at three angles.
pub fn kappa_decomposition(
    c: &AdmissibleClass,
) -> Result<(RatPoly, RatPoly, RatPoly), ClassError> {
    let f_at = |k: i64| -> Result<RatPoly, ClassError> {
        build_f(&c.with_kappa(Rat::from_int(k))?)
    };
    let f1 = f_at(1)?;
    let f2 = f_at(2)?;
    let f3 = f_at(3)?;
    let f_lin = &f2 - &f1;
    let f_zero = &f1 - &f_lin;
    if &f_zero + &f_lin.scale(&rat(3, 1)) != f3 {
        return Err(ClassError::Invariant(
            "extremal polynomial is not affine in kappa".into(),
        ));
    }
    let det = determinant(&moments(c)?);
    let g = f_lin.scale(&(det * rat(1, 2)));
    Ok((f_zero, f_lin, g))
}

/// Computes the extremal polynomial with all invariants checked exactly.
pub fn extremal_polynomial(c: &AdmissibleClass) -> Result<ExtremalData, ClassError> {
    let p = characteristic_polynomial(c);
    let m = moments(c)?;
    let (a, b) = solve_ab_from(&m)?;
    let f_omega = build_f(c)?;
    let (f_zero, f_lin, _) = kappa_decomposition(c)?;
    if &f_zero + &f_lin.scale(&c.kappa) != f_omega {
        return Err(ClassError::Invariant(
            "kappa decomposition does not reproduce the profile".into(),
        ));
    }
    let Moments { alpha, beta } = m;
    Ok(ExtremalData {
        a,
        b,
        f_omega,
        f_zero,
        f_lin,
        alpha,
        beta,
        p_c: p,
        kappa: c.kappa.clone(),
    })
}

/// Result of the minimal-angle search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum AngleThreshold {
    /// The direction `F_lin` is not positive, so positivity of the profile is
    /// not monotone in the angle and no threshold is claimed.
    NoThreshold,
    /// Enclosure of the infimum `κ*` of angles whose profile is positive on
    /// `(-1, 1)`. Degenerate `[0, 0]` when every positive angle works.
    Threshold(RatInterval),
}

/// Encloses the minimal positive cone angle for the given factors.
///
/// When `F_lin` is positive on `(-1, 1)`, profile positivity is monotone in
/// `κ` (adding a positive multiple of a positive function), so exact
/// bisection on the decision `is_nonneg_on(F_zero + κ F_lin) = Positive`
/// converges; the returned interval has width at most `width` and satisfies
/// "not positive at lo, positive at hi" (except for the degenerate `[0,0]`).
pub fn min_positive_angle(
    factors: &[BaseFactor],
    width: &Rat,
) -> Result<AngleThreshold, ClassError> {
    if !width.is_positive() {
        return Err(ClassError::NonpositiveWidth {
            width: width.clone(),
        });
    }
    let c = AdmissibleClass::new(factors.to_vec(), Rat::one())?;
    let (f_zero, f_lin, _) = kappa_decomposition(&c)?;
    let minus_one = Rat::from_int(-1);
    let one = Rat::one();
    if is_nonneg_on(&f_lin, &minus_one, &one)? != Positivity::Positive {
        return Ok(AngleThreshold::NoThreshold);
    }
    if f_zero.is_zero()
        || is_nonneg_on(&f_zero, &minus_one, &one)? != Positivity::SomewhereNegative
    {
        // F_zero ≥ 0: every positive angle gives a positive profile.
        return Ok(AngleThreshold::Threshold(RatInterval::point(Rat::zero())));
    }
    let positive_at = |k: &Rat| -> Result<bool, ClassError> {
        let f = &f_zero + &f_lin.scale(k);
        Ok(is_nonneg_on(&f, &minus_one, &one)? == Positivity::Positive)
    };
    let mut hi = Rat::one();
    let mut doublings = 0;
    while !positive_at(&hi)? {
        hi = hi * rat(2, 1);
        doublings += 1;
        if doublings > 64 {
            return Err(ClassError::Invariant(
                "no positive angle found below 2^64".into(),
            ));
        }
    }
    let mut lo = Rat::zero();
    while (&hi - &lo) > *width {
        let mid = (&lo + &hi) * rat(1, 2);
        if positive_at(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(AngleThreshold::Threshold(RatInterval::new(lo, hi)))
}

/// Diagnostic report for a momentum profile `Θ = F/p_c`: exact boundary
/// behaviour plus a numerical check of the conic expansion in fibre
/// arclength at the `z = -1` end.
#[derive(Debug, Clone, Serialize)]
pub struct ThetaReport {
    /// `Θ(±1) = 0` holds exactly (equivalent to `F(±1) = 0`).
    pub boundary_values_exact: bool,
    /// `Θ'(-1) = 2κ` and `Θ'(1) = -2κ` hold exactly.
    pub boundary_slopes_exact: bool,
    /// Measured second derivative of `Θ` in arclength at the end.
    pub d2_measured: f64,
    /// Expected value `2κ²`.
    pub d2_expected: f64,
    pub d2_rel_err: f64,
    /// Measured fourth derivative of `Θ` in arclength at the end.
    pub d4_measured: f64,
    /// Expected value `4κ²Θ''(-1)`.
    pub d4_expected: f64,
    pub d4_rel_err: f64,
}

/// Runs [`theta_profile_checks_raw`] on a class and a candidate profile.
pub fn theta_profile_checks(c: &AdmissibleClass, f: &RatPoly) -> Result<ThetaReport, ClassError> {
    theta_profile_checks_raw(&characteristic_polynomial(c), &c.kappa, f)
}

/// Checks the boundary behaviour of `Θ = F/p_c` for cone angle `2πκ`.
///
/// Exact part: `F(±1) = 0` (required) and the slope identities
/// `F'(-1) = 2κ p_c(-1)`, `F'(1) = -2κ p_c(1)` (reported).
///
/// Numerical part: with `s` the fibre arclength from the `z = -1` end
/// (`ds = dz/√Θ`), the profile of a conical end of angle `2πκ` expands as
/// `Θ(s) = κ²s² + (c₄/4!)·d⁴Θ/ds⁴·s⁴ + …` with only even powers. The
/// substitution `z = -1 + τ²` makes every integrand smooth:
/// `Θ/(z+1) = F₁/p_c` with `F₁ = F/(z+1)` an exact polynomial quotient.
/// Derivatives at `s = 0` are extracted from `Θ(s)/s²` on a geometric ladder
/// of arclengths by solving the even-power Vandermonde system.
pub fn theta_profile_checks_raw(
    p_c: &RatPoly,
    kappa: &Rat,
    f: &RatPoly,
) -> Result<ThetaReport, ClassError> {
    let one = Rat::one();
    let minus_one = Rat::from_int(-1);
    if !f.eval(&minus_one).is_zero() {
        return Err(ClassError::ProfileBoundary { at: -1 });
    }
    if !f.eval(&one).is_zero() {
        return Err(ClassError::ProfileBoundary { at: 1 });
    }
    let df = f.derivative();
    let p1 = p_c.eval(&one);
    let pm1 = p_c.eval(&minus_one);
    let two_kappa = rat(2, 1) * kappa;
    let slopes_ok =
        df.eval(&minus_one) == &two_kappa * &pm1 && df.eval(&one) == -(&two_kappa * &p1);

    // Exact expected values.
    let d2_expected = (rat(2, 1) * kappa * kappa).to_f64();
    // Θ''(-1) = (F''(-1) - 4κ p_c'(-1)) / p_c(-1), from F = Θ p_c and the
    // boundary data Θ(-1) = 0, Θ'(-1) = 2κ.
    let theta2 = (df.derivative().eval(&minus_one) - rat(4, 1) * kappa * p_c.derivative().eval(&minus_one))
        / &pm1;
    let d4_expected = (rat(4, 1) * kappa * kappa * theta2).to_f64();

    // ψ(τ) = Θ(-1+τ²)/τ² = F₁(-1+τ²)/p_c(-1+τ²), smooth with ψ(0) = 2κ.
    let f1 = f.exact_div(&linear(one.clone(), one.clone()))?; // F/(1+z)
    let f1c = f1.coeffs_f64();
    let pcc = p_c.coeffs_f64();
    let horner = |c: &[f64], z: f64| c.iter().rev().fold(0.0, |acc, &a| acc * z + a);
    let psi = move |tau: f64| {
        let z = -1.0 + tau * tau;
        horner(&f1c, z) / horner(&pcc, z)
    };

    // Arclength from the end: s(τ*) = ∫₀^{τ*} 2/√ψ dτ.
    let quad = QuadratureSpec {
        order: 16,
        panels: 8,
        rel_tol: 1e-13,
        max_doublings: 5,
    };
    let s_of = |tau_star: f64| -> Result<f64, ClassError> {
        integrate(|t| 2.0 / psi(t).sqrt(), 0.0, tau_star, &quad)
            .map_err(|e| ClassError::Invariant(format!("arclength quadrature: {e}")))
    };

    // Keep the probe window where ψ stays positive (guaranteed near τ = 0).
    let mut tau0 = 0.35;
    while (0..=32).any(|i| psi(tau0 * i as f64 / 32.0) <= 0.0) {
        tau0 *= 0.5;
        if tau0 < 1e-3 {
            return Err(ClassError::Invariant(
                "profile not positive near the end".into(),
            ));
        }
    }
    let s0 = s_of(tau0)?;
    let tau_of = |s_target: f64| -> Result<f64, ClassError> {
        let (mut lo, mut hi) = (0.0, tau0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if s_of(mid)? < s_target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    };

    // Ladder of 5 arclengths s0/2^j; R(s) = Θ(s)/s² = c₂ + c₄s² + …
    let mut svals = [0.0; 5];
    let mut rvals = [0.0; 5];
    for j in 0..5 {
        let s = s0 / (1 << j) as f64;
        let tau = tau_of(s)?;
        let theta = tau * tau * psi(tau);
        svals[j] = s;
        rvals[j] = theta / (s * s);
    }
    let coeffs = solve_even_power_fit(&svals, &rvals);
    let d2_measured = 2.0 * coeffs[0];
    let d4_measured = 24.0 * coeffs[1];
    let rel = |measured: f64, expected: f64| {
        if expected == 0.0 {
            measured.abs()
        } else {
            ((measured - expected) / expected).abs()
        }
    };
    Ok(ThetaReport {
        boundary_values_exact: true,
        boundary_slopes_exact: slopes_ok,
        d2_measured,
        d2_expected,
        d2_rel_err: rel(d2_measured, d2_expected),
        d4_measured,
        d4_expected,
        d4_rel_err: rel(d4_measured, d4_expected),
    })
}

/// Solves for `c` in `r_i = Σ_j c_j s_i^{2j}` by Gaussian elimination with
/// partial pivoting (5×5, well-conditioned for a geometric ladder).
#[allow(clippy::needless_range_loop)] // index form mirrors the augmented-matrix layout
fn solve_even_power_fit(svals: &[f64; 5], rvals: &[f64; 5]) -> [f64; 5] {
    let n = 5;
    let mut m = [[0.0f64; 6]; 5];
    for i in 0..n {
        let u = svals[i] * svals[i];
        let mut pw = 1.0;
        for j in 0..n {
            m[i][j] = pw;
            pw *= u;
        }
        m[i][n] = rvals[i];
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            for k in col..=n {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    let mut out = [0.0f64; 5];
    for col in (0..n).rev() {
        let mut v = m[col][n];
        for k in col + 1..n {
            v -= m[col][k] * out[k];
        }
        out[col] = v / m[col][col];
    }
    out
}
