//! Energy functionals on symplectic potentials and the demonstration
//! sequences that exhibit each regime's behaviour.
//!
//! Potentials are stored through the perturbation density `w = u'' − u''_c`
//! with the canonical `u''_c = 1/(κ(1−z²))`, so the ratio
//! `u''/u''_c = 1 + κ(1−z²)w` is a polynomial: every logarithmic integrand
//! below is smooth on the closed interval and the linear functional ℒ is an
//! exact rational number. Quadrature enters only where transcendental terms
//! genuinely appear.

use serde::Serialize;

use crate::admissible::{AdmissibleClass, ClassError};
use crate::classify::{classify_profile, ClassifyError, MomentumProfile, Regime};
use crate::poly::{one_minus_z_squared, PolyError, RatPoly};
use crate::quad::{integrate, QuadError, QuadratureSpec};
use crate::rat::{rat, Rat};
use crate::roots::{certified_max, is_nonneg_on, isolate_roots, Positivity};

/// Errors from energy evaluations and sequence constructions.
#[derive(Debug, thiserror::Error)]
pub enum EnergyError {
    #[error("z = {z} is outside the open interval (-1, 1)")]
    DomainViolation { z: Rat },
    #[error("grid point {z} is outside the open interval (-1, 1)")]
    GridOutsideDomain { z: f64 },
    #[error("potential is not convex: 1 + κ(1-z²)w must be positive on (-1, 1)")]
    PotentialNotConvex,
    #[error("cone parameter mismatch: class has κ = {class}, potential has κ = {potential}")]
    KappaMismatch { class: Rat, potential: Rat },
    #[error("profile mismatch: {0}")]
    ProfileMismatch(String),
    #[error("operation requires the {expected:?} regime, but the profile is {found:?}")]
    RegimeMismatch { expected: Regime, found: Regime },
    #[error("bump support [{lo}, {hi}] escapes (-1, 1); increase the index")]
    SupportEscape { lo: f64, hi: f64 },
    #[error("sequence demo needs exactly one interior root, found {found}")]
    NotSingleRoot { found: usize },
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("polynomial arithmetic failed: {0}")]
    Poly(#[from] PolyError),
    #[error("quadrature failed: {0}")]
    Quad(#[from] QuadError),
}

/// `u''_c(z) = 1/(κ(1−z²))`, exact at rational points of `(-1, 1)`.
pub fn canonical_u_second(kappa: &Rat, z: &Rat) -> Result<Rat, EnergyError> {
    if z.abs() >= Rat::one() {
        return Err(EnergyError::DomainViolation { z: z.clone() });
    }
    Ok((kappa * (Rat::one() - z * z)).recip())
}

/// A symplectic potential in the cone class `𝒞_κ`, normalized by
/// `u(0) = u'(0) = 0` and represented by the polynomial perturbation
/// `w = u'' − u''_c`. Validation certifies convexity exactly: the polynomial
/// `1 + κ(1−z²)w` must be positive on `(-1, 1)`.
#[derive(Debug, Clone, Serialize)]
pub struct SymplecticPotential {
    kappa: Rat,
    w: RatPoly,
    /// `u''/u''_c = 1 + κ(1−z²)w`, cached for integrands.
    ratio: RatPoly,
    /// Double antiderivative of `w` with `v(0) = v'(0) = 0`; the polynomial
    /// part of `u`.
    v: RatPoly,
}

impl SymplecticPotential {
    pub fn new(kappa: Rat, w: RatPoly) -> Result<Self, EnergyError> {
        if !kappa.is_positive() {
            return Err(EnergyError::KappaMismatch {
                class: kappa.clone(),
                potential: kappa,
            });
        }
        let ratio = &RatPoly::one() + &(&one_minus_z_squared() * &w).scale(&kappa);
        if is_nonneg_on(&ratio, &Rat::from_int(-1), &Rat::one())? != Positivity::Positive {
            return Err(EnergyError::PotentialNotConvex);
        }
        let v = w.antiderivative().antiderivative();
        Ok(SymplecticPotential { kappa, w, ratio, v })
    }

    /// The canonical potential itself (`w = 0`).
    pub fn canonical(kappa: Rat) -> Result<Self, EnergyError> {
        SymplecticPotential::new(kappa, RatPoly::zero())
    }

    pub fn kappa(&self) -> &Rat {
        &self.kappa
    }

    pub fn w(&self) -> &RatPoly {
        &self.w
    }

    /// The certified-positive ratio polynomial `1 + κ(1−z²)w`.
    pub fn ratio_poly(&self) -> &RatPoly {
        &self.ratio
    }

    /// Polynomial part of `u` (double antiderivative of `w`).
    pub fn v_poly(&self) -> &RatPoly {
        &self.v
    }

    /// `u(z)`, canonical transcendental part plus exact polynomial part.
    pub fn eval_u(&self, z: f64) -> f64 {
        let xlogx = |t: f64| if t > 0.0 { t * t.ln() } else { 0.0 };
        let canonical = (xlogx(1.0 - z) + xlogx(1.0 + z)) / (2.0 * self.kappa.to_f64());
        canonical + self.v.eval_f64(z)
    }

    /// `u'(z)` for `|z| < 1`.
    pub fn eval_u_prime(&self, z: f64) -> f64 {
        let canonical = ((1.0 + z) / (1.0 - z)).ln() / (2.0 * self.kappa.to_f64());
        canonical + self.v.derivative().eval_f64(z)
    }

    /// `u''(z)` for `|z| < 1`.
    pub fn eval_u_second(&self, z: f64) -> f64 {
        1.0 / (self.kappa.to_f64() * (1.0 - z * z)) + self.w.eval_f64(z)
    }
}

fn require_kappa(profile: &MomentumProfile, u: &SymplecticPotential) -> Result<(), EnergyError> {
    if profile.kappa() != u.kappa() {
        return Err(EnergyError::KappaMismatch {
            class: profile.kappa().clone(),
            potential: u.kappa().clone(),
        });
    }
    Ok(())
}

/// `ℒ(u) = ∫ F u'' dz`, exactly: the polynomial moment `∫ F w` plus the
/// canonical part `(1/κ)∫ F/(1−z²)`, the latter exact because `1−z²`
/// divides `F`.
pub fn l_functional(c: &AdmissibleClass, u: &SymplecticPotential) -> Result<Rat, EnergyError> {
    l_functional_profile(&MomentumProfile::from_class(c)?, u)
}

/// [`l_functional`] on a prebuilt profile.
pub fn l_functional_profile(
    profile: &MomentumProfile,
    u: &SymplecticPotential,
) -> Result<Rat, EnergyError> {
    require_kappa(profile, u)?;
    let perturbation = (profile.f() * u.w()).moment(0);
    let reduced = profile.f().exact_div(&one_minus_z_squared())?;
    Ok(perturbation + reduced.moment(0) / u.kappa())
}

/// The modified K-energy
/// `ℱ(u) = −∫ p_c log(u''/u''_c) dz + ∫ F (u'' − u''_c) dz`,
/// with the log term integrated numerically (the ratio is the potential's
/// positive polynomial) and the linear term exact.
pub fn k_energy(
    c: &AdmissibleClass,
    u: &SymplecticPotential,
    spec: &QuadratureSpec,
) -> Result<f64, EnergyError> {
    k_energy_profile(&MomentumProfile::from_class(c)?, u, spec)
}

/// [`k_energy`] on a prebuilt profile.
pub fn k_energy_profile(
    profile: &MomentumProfile,
    u: &SymplecticPotential,
    spec: &QuadratureSpec,
) -> Result<f64, EnergyError> {
    require_kappa(profile, u)?;
    if u.w().is_zero() {
        return Ok(0.0);
    }
    let ratio = u.ratio_poly().coeffs_f64();
    let pcc = profile.p_c().coeffs_f64();
    let horner = |c: &[f64], z: f64| c.iter().rev().fold(0.0, |acc, &a| acc * z + a);
    let log_term = integrate(
        |z| -horner(&pcc, z) * horner(&ratio, z).ln(),
        -1.0,
        1.0,
        spec,
    )?;
    let linear = (profile.f() * u.w()).moment(0);
    Ok(log_term + linear.to_f64())
}

/// Lower bound for `ℱ` over the whole cone class when the profile is
/// positive: pointwise `F u'' − p_c log u'' ≥ p_c(1 + log(F/p_c))` gives
/// `ℱ(u) ≥ ∫ p_c (1 + log(R/(κ p_c))) dz − (1/κ)∫ R dz` with the positive
/// polynomial `R = F/(1−z²)`.
pub fn k_energy_lower_bound(
    profile: &MomentumProfile,
    spec: &QuadratureSpec,
) -> Result<f64, EnergyError> {
    let regime = classify_profile(profile)?;
    if regime != Regime::ExistsExtremal {
        return Err(EnergyError::RegimeMismatch {
            expected: Regime::ExistsExtremal,
            found: regime,
        });
    }
    let reduced = profile.f().exact_div(&one_minus_z_squared())?;
    let rc = reduced.coeffs_f64();
    let pcc = profile.p_c().coeffs_f64();
    let kappa = profile.kappa().to_f64();
    let horner = |c: &[f64], z: f64| c.iter().rev().fold(0.0, |acc, &a| acc * z + a);
    let entropy = integrate(
        |z| {
            let p = horner(&pcc, z);
            p * (1.0 + (horner(&rc, z) / (kappa * p)).ln())
        },
        -1.0,
        1.0,
        spec,
    )?;
    Ok(entropy - reduced.moment(0).to_f64() / kappa)
}

/// Gap `F̃(u) − F̃(v₀)` of the tilted functional
/// `F̃(u) = −∫ p_c log u'' + ∫ G u''` at its critical point `v₀`
/// (`G = p_c/v₀''`). The integrand reduces to
/// `p_c (ρ − 1 − log ρ) ≥ 0` with `ρ = u''/v₀''` a ratio of the two
/// potentials' positive polynomials, so the gap is nonnegative.
pub fn k_energy_convexity_gap(
    p_c: &RatPoly,
    u: &SymplecticPotential,
    v0: &SymplecticPotential,
    spec: &QuadratureSpec,
) -> Result<f64, EnergyError> {
    if u.kappa() != v0.kappa() {
        return Err(EnergyError::KappaMismatch {
            class: v0.kappa().clone(),
            potential: u.kappa().clone(),
        });
    }
    let nu = u.ratio_poly().coeffs_f64();
    let dv = v0.ratio_poly().coeffs_f64();
    let pcc = p_c.coeffs_f64();
    let horner = |c: &[f64], z: f64| c.iter().rev().fold(0.0, |acc, &a| acc * z + a);
    Ok(integrate(
        |z| {
            let rho = horner(&nu, z) / horner(&dv, z);
            horner(&pcc, z) * (rho - 1.0 - rho.ln())
        },
        -1.0,
        1.0,
        spec,
    )?)
}

/// `∫_{-1}^{1} u dz`: the canonical part in closed form, `(2 log 2 − 1)/κ`,
/// plus the exact moment of the polynomial part. Nonnegative because `u` is
/// convex with `u(0) = u'(0) = 0`.
pub fn j_proxy(u: &SymplecticPotential) -> f64 {
    let canonical = (2.0 * std::f64::consts::LN_2 - 1.0) / u.kappa().to_f64();
    canonical + u.v_poly().moment(0).to_f64()
}

/// Modified Calabi energy of a candidate profile against a base profile
/// sharing the same fibre data: `Ca = ∫ (q'')²/p_c dz` with
/// `q = F_candidate − F_base`. Both profiles are boundary-validated, so `q`
/// and `q'` vanish at `±1` and the energy is well-defined; it is zero iff
/// the profiles coincide.
pub fn calabi_energy(
    c: &AdmissibleClass,
    candidate: &MomentumProfile,
    spec: &QuadratureSpec,
) -> Result<f64, EnergyError> {
    calabi_energy_profile(&MomentumProfile::from_class(c)?, candidate, spec)
}

/// [`calabi_energy`] with an explicit base profile.
pub fn calabi_energy_profile(
    base: &MomentumProfile,
    candidate: &MomentumProfile,
    spec: &QuadratureSpec,
) -> Result<f64, EnergyError> {
    if base.p_c() != candidate.p_c() {
        return Err(EnergyError::ProfileMismatch(
            "candidate and base must share the fibre polynomial".into(),
        ));
    }
    if base.kappa() != candidate.kappa() {
        return Err(EnergyError::KappaMismatch {
            class: base.kappa().clone(),
            potential: candidate.kappa().clone(),
        });
    }
    let q = candidate.f() - base.f();
    if q.is_zero() {
        return Ok(0.0);
    }
    let q2 = q.derivative().derivative();
    calabi_energy_from_qsecond(&q2, base.p_c(), spec)
}

/// `∫ (q'')²/p_c dz` for a given second derivative; the raw integral behind
/// [`calabi_energy`], exposed for fixtures.
pub fn calabi_energy_from_qsecond(
    q_second: &RatPoly,
    p_c: &RatPoly,
    spec: &QuadratureSpec,
) -> Result<f64, EnergyError> {
    let num = (q_second * q_second).coeffs_f64();
    let den = p_c.coeffs_f64();
    let horner = |c: &[f64], z: f64| c.iter().rev().fold(0.0, |acc, &a| acc * z + a);
    Ok(integrate(
        |z| horner(&num, z) / horner(&den, z),
        -1.0,
        1.0,
        spec,
    )?)
}

/// Legendre transform samples `(y, φ(y))` with `y = u'(z)`,
/// `φ(y) = −u(z) + yz`, over a grid of `z` values in `(-1, 1)`.
pub fn legendre_transform(
    u: &SymplecticPotential,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>, EnergyError> {
    let mut samples = Vec::with_capacity(grid.len());
    for &z in grid {
        if !(-1.0..=1.0).contains(&z) || z.abs() >= 1.0 {
            return Err(EnergyError::GridOutsideDomain { z });
        }
        let y = u.eval_u_prime(z);
        samples.push((y, -u.eval_u(z) + y * z));
    }
    Ok(samples)
}

/// `η(s) = exp(1/(s²−1))` on `|s| < 1`, zero outside: the smooth bump
/// driving every demonstration sequence.
pub fn bump_eta(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (1.0 / (s * s - 1.0)).exp()
    } else {
        0.0
    }
}

/// `η''(s) = 2 e^{1/(s²−1)} (3s⁴ − 1)/(s²−1)⁴` on `|s| < 1`, zero outside.
pub fn bump_eta_second(s: f64) -> f64 {
    if s.abs() < 1.0 {
        let d = s * s - 1.0;
        2.0 * (1.0 / d).exp() * (3.0 * s.powi(4) - 1.0) / d.powi(4)
    } else {
        0.0
    }
}

/// The convex ramp `f_k(z) = ∫₀^z (z−s) h_k(s) ds` built from the scaled
/// bump `h_k(s) = k·η(k(s−z₀))`: smooth, convex, `f_k(0) = f'_k(0) = 0`,
/// `f''_k = h_k`.
#[derive(Debug, Clone)]
pub struct ConvexBump {
    z0: f64,
    k: u32,
    lo: f64,
    hi: f64,
    quad: QuadratureSpec,
}

impl ConvexBump {
    pub fn new(z0: f64, k: u32) -> Result<Self, EnergyError> {
        let h = 1.0 / f64::from(k.max(1));
        let (lo, hi) = (z0 - h, z0 + h);
        if k < 1 || z0.abs() >= 1.0 || lo <= -1.0 || hi >= 1.0 {
            return Err(EnergyError::SupportEscape { lo, hi });
        }
        Ok(ConvexBump {
            z0,
            k,
            lo,
            hi,
            quad: QuadratureSpec {
                order: 16,
                panels: 8,
                rel_tol: 1e-12,
                max_doublings: 6,
            },
        })
    }

    pub fn index(&self) -> u32 {
        self.k
    }

    pub fn center(&self) -> f64 {
        self.z0
    }

    /// Support of `h_k`, strictly inside `(-1, 1)`.
    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// `h_k(z) = k·η(k(z−z₀))`.
    pub fn h(&self, z: f64) -> f64 {
        f64::from(self.k) * bump_eta(f64::from(self.k) * (z - self.z0))
    }

    /// `f_k(z)`, by quadrature of `(z−s)h_k(s)` over the part of the
    /// integration range inside the support.
    pub fn f(&self, z: f64) -> f64 {
        let (range_lo, range_hi) = if z >= 0.0 { (0.0, z) } else { (z, 0.0) };
        let a = range_lo.max(self.lo);
        let b = range_hi.min(self.hi);
        if a >= b {
            return 0.0;
        }
        let value = integrate(|s| (z - s) * self.h(s), a, b, &self.quad)
            .expect("bump integrand is smooth");
        if z >= 0.0 {
            value
        } else {
            -value
        }
    }

    /// `∫_{-1}^{1} f_k dz`: quadrature across the support plus the exact
    /// linear tails outside it.
    pub fn integral_f(&self) -> Result<f64, EnergyError> {
        let middle = integrate(|z| self.f(z), self.lo, self.hi, &self.quad)?;
        // For z ≥ hi: f(z) = z·K⁺ − M⁺ over the support part right of 0.
        let a_plus = self.lo.max(0.0);
        let (k_plus, m_plus) = if a_plus < self.hi {
            (
                integrate(|s| self.h(s), a_plus, self.hi, &self.quad)?,
                integrate(|s| s * self.h(s), a_plus, self.hi, &self.quad)?,
            )
        } else {
            (0.0, 0.0)
        };
        // For z ≤ lo: f(z) = M⁻ − z·K⁻ over the support part left of 0.
        let b_minus = self.hi.min(0.0);
        let (k_minus, m_minus) = if self.lo < b_minus {
            (
                integrate(|s| self.h(s), self.lo, b_minus, &self.quad)?,
                integrate(|s| s * self.h(s), self.lo, b_minus, &self.quad)?,
            )
        } else {
            (0.0, 0.0)
        };
        let right_tail = k_plus * (1.0 - self.hi * self.hi) / 2.0 - m_plus * (1.0 - self.hi);
        let left_tail = m_minus * (self.lo + 1.0) - k_minus * (self.lo * self.lo - 1.0) / 2.0;
        Ok(middle + right_tail + left_tail)
    }
}

/// One step of the properness-breaking sequence at a bounded-not-proper
/// profile: the value of `ℒ` on `k·f_k` and the growing norm `∫ k·f_k`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BreakerSample {
    pub k: u32,
    /// `ℒ(k f_k) = k ∫ F h_k dz`; decays like `k^{1−2m}` at a root of
    /// multiplicity `2m`.
    pub l_value: f64,
    /// `∫ k f_k dz`; grows linearly in `k`.
    pub integral: f64,
}

/// Evaluates the properness-breaking pair at bump index `k`, centering the
/// bump at the profile's even-multiplicity interior root.
pub fn properness_breaker(
    c: &AdmissibleClass,
    k: u32,
) -> Result<BreakerSample, EnergyError> {
    properness_breaker_profile(&MomentumProfile::from_class(c)?, k)
}

/// [`properness_breaker`] on a prebuilt profile.
pub fn properness_breaker_profile(
    profile: &MomentumProfile,
    k: u32,
) -> Result<BreakerSample, EnergyError> {
    let regime = classify_profile(profile)?;
    if regime != Regime::BoundedNotProper {
        return Err(EnergyError::RegimeMismatch {
            expected: Regime::BoundedNotProper,
            found: regime,
        });
    }
    let mut roots = isolate_roots(profile.f(), &Rat::from_int(-1), &Rat::one())?;
    let target = rat(1, 1 << 30);
    for r in &mut roots {
        r.refine_to(&target);
    }
    let root = roots
        .iter()
        .find(|r| r.multiplicity() % 2 == 0)
        .ok_or(EnergyError::NotSingleRoot { found: 0 })?;
    let bump = ConvexBump::new(root.approx().to_f64(), k)?;
    let fc = profile.f().coeffs_f64();
    let horner = |c: &[f64], z: f64| c.iter().rev().fold(0.0, |acc, &a| acc * z + a);
    let (lo, hi) = bump.support();
    let quad = QuadratureSpec::default();
    let l_value =
        f64::from(k) * integrate(|z| horner(&fc, z) * bump.h(z), lo, hi, &quad)?;
    let integral = f64::from(k) * bump.integral_f()?;
    Ok(BreakerSample {
        k,
        l_value,
        integral,
    })
}

/// Calabi energy of the `n`-th profile in the minimizing sequence
/// `F_n = F + (1/n²) η(n(z−z₀))` at a bounded-not-proper profile with a
/// single interior root `z₀`. In the rescaled variable the value is
/// `(1/n) ∫ η''(t)²/p_c(z₀ + t/n) dt`, which decays like `1/n`.
pub fn calabi_minimizing_sequence(
    c: &AdmissibleClass,
    n: u32,
) -> Result<f64, EnergyError> {
    calabi_minimizing_sequence_profile(&MomentumProfile::from_class(c)?, n)
}

/// [`calabi_minimizing_sequence`] on a prebuilt profile.
pub fn calabi_minimizing_sequence_profile(
    profile: &MomentumProfile,
    n: u32,
) -> Result<f64, EnergyError> {
    let regime = classify_profile(profile)?;
    if regime != Regime::BoundedNotProper {
        return Err(EnergyError::RegimeMismatch {
            expected: Regime::BoundedNotProper,
            found: regime,
        });
    }
    let mut roots = isolate_roots(profile.f(), &Rat::from_int(-1), &Rat::one())?;
    if roots.len() != 1 {
        return Err(EnergyError::NotSingleRoot { found: roots.len() });
    }
    roots[0].refine_to(&rat(1, 1 << 30));
    let z0 = roots[0].approx().to_f64();
    let h = 1.0 / f64::from(n.max(1));
    if n < 1 || z0 - h <= -1.0 || z0 + h >= 1.0 {
        return Err(EnergyError::SupportEscape {
            lo: z0 - h,
            hi: z0 + h,
        });
    }
    // The perturbed profile stays positive: sampled across the interval.
    let fc = profile.f().coeffs_f64();
    let horner = |c: &[f64], z: f64| c.iter().rev().fold(0.0, |acc, &a| acc * z + a);
    let nn = f64::from(n);
    for i in 1..1024 {
        let z = -1.0 + 2.0 * f64::from(i) / 1024.0;
        let fn_z = horner(&fc, z) + bump_eta(nn * (z - z0)) / (nn * nn);
        if fn_z <= 0.0 {
            return Err(EnergyError::ProfileMismatch(format!(
                "perturbed profile not positive at z = {z}"
            )));
        }
    }
    let pcc = profile.p_c().coeffs_f64();
    let quad = QuadratureSpec::default();
    Ok(integrate(
        |t| {
            let e = bump_eta_second(t);
            e * e / horner(&pcc, z0 + t / nn)
        },
        -1.0,
        1.0,
        &quad,
    )? / nn)
}

/// A certified direction of unboundedness: a bump `r` supported where the
/// profile is strictly negative, so that `∫ F r < 0` and the energy ray
/// `ℱ(u_k)`, `u_k'' = u_c'' + k·r`, decreases without bound.
#[derive(Debug, Clone, Serialize)]
pub struct UnboundedDirection {
    /// Bump center, chosen inside the middle half of a negative gap.
    pub center: Rat,
    /// Bump halfwidth; the support is `[center − halfwidth, center + halfwidth]`.
    pub halfwidth: Rat,
    /// Scaling of the bump: `r(z) = amplitude · η((z−center)/halfwidth)`.
    pub amplitude: Rat,
    /// Certified strictly negative upper bound for `F` on the support.
    pub f_max_on_support: Rat,
    /// `∫ F r dz` by quadrature; strictly negative.
    pub linear_term: f64,
}

impl UnboundedDirection {
    /// The direction density `r(z)`.
    pub fn r(&self, z: f64) -> f64 {
        let c = self.center.to_f64();
        let h = self.halfwidth.to_f64();
        self.amplitude.to_f64() * bump_eta((z - c) / h)
    }

    pub fn support(&self) -> (f64, f64) {
        let c = self.center.to_f64();
        let h = self.halfwidth.to_f64();
        (c - h, c + h)
    }
}

/// Builds an unbounded direction for a profile in the `Unbounded` regime.
///
/// Root isolation locates a gap where `F < 0`; the bump sits on the middle
/// half of that gap, and `certified_max` provides an exact negative bound
/// for `F` there, so `∫ F r ≤ (max F)·∫r < 0` independent of quadrature.
pub fn unbounded_direction(
    c: &AdmissibleClass,
    amplitude: &Rat,
) -> Result<UnboundedDirection, EnergyError> {
    unbounded_direction_profile(&MomentumProfile::from_class(c)?, amplitude)
}

/// [`unbounded_direction`] on a prebuilt profile.
pub fn unbounded_direction_profile(
    profile: &MomentumProfile,
    amplitude: &Rat,
) -> Result<UnboundedDirection, EnergyError> {
    let regime = classify_profile(profile)?;
    if regime != Regime::Unbounded {
        return Err(EnergyError::RegimeMismatch {
            expected: Regime::Unbounded,
            found: regime,
        });
    }
    if !amplitude.is_positive() {
        return Err(EnergyError::ProfileMismatch(
            "direction amplitude must be positive".into(),
        ));
    }
    let mut roots = isolate_roots(profile.f(), &Rat::from_int(-1), &Rat::one())?;
    let target = rat(1, 1 << 20);
    for r in &mut roots {
        r.refine_to(&target);
    }
    // The profile is positive near both ends, so a negative region is a gap
    // between consecutive roots; find it by its sign at the gap midpoint.
    let mut bounds = vec![Rat::from_int(-1)];
    for r in &roots {
        bounds.push(r.interval().lo().clone());
        bounds.push(r.interval().hi().clone());
    }
    bounds.push(Rat::one());
    let mut gap = None;
    for pair in bounds.chunks(2) {
        let (lo, hi) = (&pair[0], &pair[1]);
        let mid = (lo + hi) * rat(1, 2);
        if profile.f().eval(&mid).is_negative() {
            gap = Some((lo.clone(), hi.clone()));
            break;
        }
    }
    let (gap_lo, gap_hi) =
        gap.ok_or_else(|| ClassError::Invariant("no negative gap found".into()))?;
    // Middle half of the gap keeps the support away from the roots.
    let lo = (&gap_lo * rat(3, 4)) + (&gap_hi * rat(1, 4));
    let hi = (&gap_lo * rat(1, 4)) + (&gap_hi * rat(3, 4));
    let f_max = certified_max(profile.f(), &lo, &hi, &rat(1, 1 << 30))?;
    if !f_max.is_negative() {
        return Err(ClassError::Invariant("negative gap failed certification".into()).into());
    }
    let center = (&lo + &hi) * rat(1, 2);
    let halfwidth = (&hi - &lo) * rat(1, 2);
    let fc = profile.f().coeffs_f64();
    let horner = |c: &[f64], z: f64| c.iter().rev().fold(0.0, |acc, &a| acc * z + a);
    let (cf, hf, af) = (center.to_f64(), halfwidth.to_f64(), amplitude.to_f64());
    let quad = QuadratureSpec::default();
    let linear_term = integrate(
        |z| horner(&fc, z) * af * bump_eta((z - cf) / hf),
        cf - hf,
        cf + hf,
        &quad,
    )?;
    Ok(UnboundedDirection {
        center,
        halfwidth,
        amplitude: amplitude.clone(),
        f_max_on_support: f_max,
        linear_term,
    })
}

/// `ℱ(u_k)` along an unbounded direction, `u_k'' = u''_c + k·r`: the exact
/// linear term `k·∫F r` plus the log term, whose integrand vanishes outside
/// the bump support.
pub fn k_energy_along(
    profile: &MomentumProfile,
    dir: &UnboundedDirection,
    k: f64,
    spec: &QuadratureSpec,
) -> Result<f64, EnergyError> {
    if k == 0.0 {
        return Ok(0.0);
    }
    let pcc = profile.p_c().coeffs_f64();
    let kappa = profile.kappa().to_f64();
    let horner = |c: &[f64], z: f64| c.iter().rev().fold(0.0, |acc, &a| acc * z + a);
    let (lo, hi) = dir.support();
    let log_term = integrate(
        |z| {
            let arg = 1.0 + kappa * (1.0 - z * z) * k * dir.r(z);
            -horner(&pcc, z) * arg.ln()
        },
        lo,
        hi,
        spec,
    )?;
    Ok(log_term + k * dir.linear_term)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissible::BaseFactor;
    use crate::quad::adaptive_simpson;

    fn tf(x: Rat, s: Rat, kappa: Rat) -> AdmissibleClass {
        AdmissibleClass::new(vec![BaseFactor { d: 1, s, x }], kappa).unwrap()
    }

    fn reference_class() -> AdmissibleClass {
        tf(rat(1, 2), rat(-2, 1), Rat::one())
    }

    /// `F = z²(1−z²)`, `p_c ≡ 1`, κ = 1: bounded-not-proper with a double
    /// root at the origin.
    fn double_root_profile() -> MomentumProfile {
        let f = &RatPoly::from_i64s(&[0, 0, 1]) * &one_minus_z_squared();
        MomentumProfile::new(RatPoly::one(), f, Rat::one()).unwrap()
    }

    #[test]
    fn canonical_second_derivative_values() {
        assert_eq!(
            canonical_u_second(&Rat::one(), &Rat::zero()).unwrap(),
            Rat::one()
        );
        assert_eq!(
            canonical_u_second(&rat(2, 1), &Rat::zero()).unwrap(),
            rat(1, 2)
        );
        assert_eq!(
            canonical_u_second(&Rat::one(), &rat(1, 2)).unwrap(),
            rat(4, 3)
        );
        // Symmetry and domain error.
        assert_eq!(
            canonical_u_second(&rat(3, 2), &rat(-1, 3)).unwrap(),
            canonical_u_second(&rat(3, 2), &rat(1, 3)).unwrap()
        );
        assert!(matches!(
            canonical_u_second(&Rat::one(), &Rat::one()),
            Err(EnergyError::DomainViolation { .. })
        ));
    }

    #[test]
    fn potential_validation_certifies_convexity() {
        // w = -1 at κ = 1: ratio = 1 - (1-z²) = z², zero at 0 → rejected.
        assert!(matches!(
            SymplecticPotential::new(Rat::one(), RatPoly::from_i64s(&[-1])),
            Err(EnergyError::PotentialNotConvex)
        ));
        // Slightly above the degenerate value it is accepted.
        let u = SymplecticPotential::new(Rat::one(), RatPoly::constant(rat(-9, 10))).unwrap();
        assert!(u.eval_u_second(0.0) > 0.0);
    }

    #[test]
    fn l_functional_closed_forms() {
        let c = reference_class();
        let u_c = SymplecticPotential::canonical(Rat::one()).unwrap();
        assert_eq!(l_functional(&c, &u_c).unwrap(), rat(20, 11));
        // Two routes to the canonical value agree for a generic class.
        let c2 = tf(rat(3, 7), rat(5, 4), rat(2, 3));
        let u2 = SymplecticPotential::canonical(rat(2, 3)).unwrap();
        let profile = MomentumProfile::from_class(&c2).unwrap();
        let direct = profile
            .f()
            .exact_div(&one_minus_z_squared())
            .unwrap()
            .moment(0)
            / rat(2, 3);
        assert_eq!(l_functional(&c2, &u2).unwrap(), direct);
        // Linearity: w = 1 shifts ℒ by the zeroth moment of F.
        let u1 = SymplecticPotential::new(Rat::one(), RatPoly::one()).unwrap();
        let shift = l_functional(&c, &u1).unwrap() - l_functional(&c, &u_c).unwrap();
        let data = crate::admissible::extremal_polynomial(&c).unwrap();
        assert_eq!(shift, data.f_omega.moment(0));
        // κ mismatch is rejected.
        assert!(matches!(
            l_functional(&c, &SymplecticPotential::canonical(rat(2, 1)).unwrap()),
            Err(EnergyError::KappaMismatch { .. })
        ));
    }

    #[test]
    fn l_functional_matches_quadrature() {
        let c = reference_class();
        let profile = MomentumProfile::from_class(&c).unwrap();
        let w = RatPoly::from_coeffs(vec![rat(1, 3), rat(-1, 5), rat(1, 2)]);
        let u = SymplecticPotential::new(Rat::one(), w).unwrap();
        let exact = l_functional(&c, &u).unwrap().to_f64();
        let fc = profile.f().coeffs_f64();
        let wc = u.w().coeffs_f64();
        let horner = |c: &[f64], z: f64| c.iter().rev().fold(0.0, |acc, &a| acc * z + a);
        let numeric = adaptive_simpson(
            |z| horner(&fc, z) * (1.0 / (1.0 - z * z) + horner(&wc, z)),
            -1.0 + 1e-9,
            1.0 - 1e-9,
            1e-10,
        );
        // The clipped singular endpoints cost ~1e-8 of accuracy.
        assert!((exact - numeric).abs() < 1e-6, "{exact} vs {numeric}");
    }

    #[test]
    fn k_energy_vanishes_at_canonical_potential() {
        let c = reference_class();
        let u_c = SymplecticPotential::canonical(Rat::one()).unwrap();
        assert_eq!(
            k_energy(&c, &u_c, &QuadratureSpec::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn k_energy_respects_lower_bound() {
        let c = reference_class();
        let profile = MomentumProfile::from_class(&c).unwrap();
        let spec = QuadratureSpec::default();
        let bound = k_energy_lower_bound(&profile, &spec).unwrap();
        for w in [
            RatPoly::zero(),
            RatPoly::one(),
            RatPoly::from_coeffs(vec![rat(1, 2), rat(1, 3)]),
            RatPoly::from_coeffs(vec![Rat::zero(), Rat::zero(), rat(2, 1)]),
            RatPoly::constant(rat(-1, 2)),
        ] {
            let u = SymplecticPotential::new(Rat::one(), w).unwrap();
            let value = k_energy_profile(&profile, &u, &spec).unwrap();
            assert!(value >= bound - 1e-8, "{value} < {bound}");
        }
    }

    #[test]
    fn convexity_gap_is_nonnegative() {
        let p_c = RatPoly::from_coeffs(vec![Rat::one(), rat(1, 2)]);
        let spec = QuadratureSpec::default();
        let v0 = SymplecticPotential::new(Rat::one(), RatPoly::from_i64s(&[1, 0, 1])).unwrap();
        for w in [
            RatPoly::zero(),
            RatPoly::from_i64s(&[2]),
            RatPoly::from_coeffs(vec![rat(-1, 2), rat(1, 4)]),
            RatPoly::from_i64s(&[0, 1]),
        ] {
            let u = SymplecticPotential::new(Rat::one(), w).unwrap();
            let gap = k_energy_convexity_gap(&p_c, &u, &v0, &spec).unwrap();
            assert!(gap >= -1e-10, "gap {gap}");
        }
        // Gap vanishes exactly at the critical point.
        let self_gap = k_energy_convexity_gap(&p_c, &v0, &v0, &spec).unwrap();
        assert!(self_gap.abs() < 1e-14);
    }

    #[test]
    fn j_proxy_closed_forms() {
        let u_c = SymplecticPotential::canonical(Rat::one()).unwrap();
        assert!((j_proxy(&u_c) - 0.386_294_361_119_890_6).abs() < 1e-12);
        // w = 1 adds v = z²/2 with moment 1/3.
        let u1 = SymplecticPotential::new(Rat::one(), RatPoly::one()).unwrap();
        assert!((j_proxy(&u1) - j_proxy(&u_c) - 1.0 / 3.0).abs() < 1e-12);
        // Convex and normalized ⇒ nonnegative.
        for w in [
            RatPoly::from_coeffs(vec![Rat::zero(), rat(1, 2)]),
            RatPoly::from_coeffs(vec![rat(-1, 2), Rat::zero(), rat(3, 1)]),
        ] {
            let u = SymplecticPotential::new(rat(3, 2), w).unwrap();
            assert!(j_proxy(&u) >= 0.0);
        }
    }

    #[test]
    fn calabi_energy_fixture_and_zero_case() {
        let spec = QuadratureSpec::default();
        // q'' = (1-z²)², p_c ≡ 1: ∫ (1-z²)⁴ = 256/315.
        let q2 = one_minus_z_squared().pow(2);
        let value = calabi_energy_from_qsecond(&q2, &RatPoly::one(), &spec).unwrap();
        assert!((value - 256.0 / 315.0).abs() < 1e-12);
        // Same profile twice → exactly zero.
        let c = reference_class();
        let profile = MomentumProfile::from_class(&c).unwrap();
        assert_eq!(calabi_energy(&c, &profile, &spec).unwrap(), 0.0);
        // Mismatched fibre data is rejected.
        let other = double_root_profile();
        assert!(matches!(
            calabi_energy_profile(&profile, &other, &spec),
            Err(EnergyError::ProfileMismatch(_))
        ));
    }

    #[test]
    fn calabi_energy_positive_for_distinct_profile() {
        // Candidate with the same boundary data: F + (1-z²)² stays valid.
        let c = reference_class();
        let base = MomentumProfile::from_class(&c).unwrap();
        let candidate = MomentumProfile::new(
            base.p_c().clone(),
            base.f() + &one_minus_z_squared().pow(2),
            Rat::one(),
        )
        .unwrap();
        let spec = QuadratureSpec::default();
        let value = calabi_energy_profile(&base, &candidate, &spec).unwrap();
        // q'' = ((1-z²)²)'' = 12z² - 4; ∫(12z²-4)²/p_c > 0.
        assert!(value > 0.0);
        let expected = calabi_energy_from_qsecond(
            &RatPoly::from_i64s(&[-4, 0, 12]),
            base.p_c(),
            &spec,
        )
        .unwrap();
        assert!((value - expected).abs() < 1e-12);
    }

    #[test]
    fn legendre_transform_properties() {
        let u = SymplecticPotential::canonical(Rat::one()).unwrap();
        let grid: Vec<f64> = (-40..=40).map(|i| f64::from(i) / 41.0).collect();
        let samples = legendre_transform(&u, &grid).unwrap();
        // y strictly increasing; slopes of φ stay in (-1, 1).
        for w in samples.windows(2) {
            let (y0, p0) = w[0];
            let (y1, p1) = w[1];
            assert!(y1 > y0);
            assert!(((p1 - p0) / (y1 - y0)).abs() < 1.0);
        }
        // φ(y) = log cosh y for the canonical potential at κ = 1.
        for &(y, phi) in &samples {
            let expect = ((y.exp() + (-y).exp()) / 2.0).ln();
            assert!((phi - expect).abs() < 1e-10, "y={y}");
        }
        // Round trip: u(z_j) = max over samples of z_j·y − φ(y).
        for (j, &z) in grid.iter().enumerate() {
            let direct = u.eval_u(z);
            let recovered = samples
                .iter()
                .map(|&(y, phi)| z * y - phi)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((direct - recovered).abs() < 1e-10);
            let at_j = z * samples[j].0 - samples[j].1;
            assert!((at_j - direct).abs() < 1e-12);
        }
        // Out-of-domain grid points error.
        assert!(matches!(
            legendre_transform(&u, &[0.0, 1.0]),
            Err(EnergyError::GridOutsideDomain { .. })
        ));
    }

    #[test]
    fn bump_values_and_flatness() {
        assert!((bump_eta(0.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(bump_eta(1.0), 0.0);
        assert_eq!(bump_eta(-1.0), 0.0);
        // One-sided flatness at the support edge to third order: iterated
        // forward differences stay negligible against the step size.
        let h = 1e-3;
        let mut table: Vec<f64> = (0..4).map(|i| bump_eta(-1.0 + f64::from(i) * h)).collect();
        for order in 1..=3 {
            table = table.windows(2).map(|w| w[1] - w[0]).collect();
            let scaled = table[0] / h.powi(order);
            assert!(scaled.abs() < 1e-2, "order {order}: {scaled}");
        }
        // η'' matches a finite-difference stencil away from the edges.
        for s in [-0.7, -0.2, 0.0, 0.4, 0.8] {
            let h = 1e-5;
            let fd = (bump_eta(s + h) - 2.0 * bump_eta(s) + bump_eta(s - h)) / (h * h);
            assert!((bump_eta_second(s) - fd).abs() < 1e-4, "s={s}");
        }
    }

    #[test]
    fn bump_ramp_shape() {
        let bump = ConvexBump::new(0.0, 8).unwrap();
        assert_eq!(bump.f(0.0), 0.0);
        // Convex: f ≥ 0 and increasing slope.
        assert!(bump.f(0.5) > 0.0 && bump.f(-0.5) > 0.0);
        let near = bump.f(0.2);
        let far = bump.f(0.9);
        assert!(far > near);
        // Support escape is rejected.
        assert!(matches!(
            ConvexBump::new(0.9, 8),
            Err(EnergyError::SupportEscape { .. })
        ));
        assert!(ConvexBump::new(0.9, 11).is_ok());
    }

    #[test]
    fn breaker_decay_and_growth() {
        let profile = double_root_profile();
        let samples: Vec<BreakerSample> = [8u32, 16, 32, 64]
            .iter()
            .map(|&k| properness_breaker_profile(&profile, k).unwrap())
            .collect();
        // ℒ(k f_k) decays roughly like 1/k at a double root.
        for w in samples.windows(2) {
            let ratio = w[0].l_value / w[1].l_value;
            assert!(
                (ratio - 2.0).abs() < 0.35,
                "decay ratio {ratio} at k={}",
                w[1].k
            );
        }
        // ∫ k f_k grows linearly: doubling k doubles the value.
        for w in samples.windows(2) {
            let ratio = w[1].integral / w[0].integral;
            assert!((ratio - 2.0).abs() < 0.1, "growth ratio {ratio}");
        }
        // At k → ∞ the norm slope approaches k·(1-|z₀|)²/2·∫η; here z₀ = 0.
        let eta_mass = adaptive_simpson(bump_eta, -1.0, 1.0, 1e-12);
        let expect = f64::from(samples[3].k) * eta_mass / 2.0;
        assert!((samples[3].integral / expect - 1.0).abs() < 0.05);
        // Regime guard.
        let c = reference_class();
        assert!(matches!(
            properness_breaker(&c, 16),
            Err(EnergyError::RegimeMismatch { .. })
        ));
    }

    #[test]
    fn calabi_sequence_decays_like_inverse_n() {
        let profile = double_root_profile();
        let values: Vec<f64> = [16u32, 32, 64, 128]
            .iter()
            .map(|&n| calabi_minimizing_sequence_profile(&profile, n).unwrap())
            .collect();
        for v in &values {
            assert!(*v > 0.0);
        }
        for w in values.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 2.0).abs() < 0.3, "ratio {ratio}");
        }
        // n·Ca → ∫ η''(t)² dt (p_c ≡ 1); cross-check with a second quadrature.
        let inner = adaptive_simpson(|t| bump_eta_second(t).powi(2), -1.0, 1.0, 1e-10);
        let inner2 = integrate(
            |t| bump_eta_second(t).powi(2),
            -1.0,
            1.0,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((inner - inner2).abs() < 1e-6 * inner.abs());
        let limit_ratio = 128.0 * values[3] / inner;
        assert!((limit_ratio - 1.0).abs() < 0.05, "limit ratio {limit_ratio}");
    }

    #[test]
    fn unbounded_direction_drives_energy_down() {
        let c = tf(rat(19, 20), rat(-2, 1), Rat::one());
        let profile = MomentumProfile::from_class(&c).unwrap();
        // A large amplitude makes the exact linear term dominate the bounded
        // log term, so the secant slope isolates it cleanly.
        let dir = unbounded_direction_profile(&profile, &rat(256, 1)).unwrap();
        assert!(dir.f_max_on_support.is_negative());
        assert!(dir.linear_term < 0.0);
        let spec = QuadratureSpec::default();
        assert_eq!(k_energy_along(&profile, &dir, 0.0, &spec).unwrap(), 0.0);
        let mut prev = 0.0;
        for k in 1..=16 {
            let value = k_energy_along(&profile, &dir, f64::from(k), &spec).unwrap();
            assert!(value < prev, "k={k}: {value} !< {prev}");
            prev = value;
        }
        // Secant slope approaches the exact linear term.
        let f_plus = k_energy_along(&profile, &dir, 65.0, &spec).unwrap();
        let f_minus = k_energy_along(&profile, &dir, 63.0, &spec).unwrap();
        let slope = (f_plus - f_minus) / 2.0;
        assert!(
            (slope / dir.linear_term - 1.0).abs() < 0.05,
            "slope {slope} vs {}",
            dir.linear_term
        );
        // Regime guard.
        assert!(matches!(
            unbounded_direction(&reference_class(), &Rat::one()),
            Err(EnergyError::RegimeMismatch { .. })
        ));
    }
}
