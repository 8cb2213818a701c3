//! Structural invariants checked on randomized inputs: every regime decision
//! must come with a working certificate, decompositions must reassemble, and
//! the numeric layers must agree with their exact counterparts.

mod common;

use common::Rng;
use extremal::admissible::extremal_polynomial;
use extremal::classify::{classify, properness_delta, split, MomentumProfile, Regime};
use extremal::energy::{
    j_proxy, k_energy, k_energy_convexity_gap, k_energy_lower_bound, l_functional,
    legendre_transform, unbounded_direction, SymplecticPotential,
};
use extremal::poly::one_minus_z_squared;
use extremal::quad::{integrate, QuadratureSpec};
use extremal::rat::{rat, Rat, RatInterval};
use extremal::roots::{isolate_roots, square_free_decompose};
use extremal::RatPoly;
use proptest::prelude::*;

/// One-factor class with a strictly positive profile and `δ = 19/22`.
fn reference_class() -> extremal::admissible::AdmissibleClass {
    extremal::admissible::AdmissibleClass::new(
        vec![extremal::admissible::BaseFactor {
            d: 1,
            s: rat(-2, 1),
            x: rat(1, 2),
        }],
        Rat::one(),
    )
    .unwrap()
}

#[test]
fn every_regime_decision_carries_a_certificate() {
    let mut rng = Rng::new(0x1A);
    for i in 0..80 {
        let class = common::random_class(&mut rng, 3, 3);
        let regime = classify(&class).unwrap();
        let report = split(&class).unwrap();
        assert_eq!(report.regime, regime, "class {i}: split disagrees with classify");
        assert_eq!(
            report.parts.len(),
            report.roots.len() + 1,
            "class {i}: {} interior roots must give {} parts",
            report.roots.len(),
            report.roots.len() + 1
        );
        assert_eq!(report.parts[0].span.lo(), &Rat::from_int(-1), "class {i}");
        assert_eq!(
            report.parts.last().unwrap().span.hi(),
            &Rat::one(),
            "class {i}"
        );
        for (j, root) in report.roots.iter().enumerate() {
            assert_eq!(
                report.parts[j].span.hi(),
                root.interval().hi(),
                "class {i}: part {j} must end at root {j}'s enclosure"
            );
            assert_eq!(
                report.parts[j + 1].span.lo(),
                root.interval().lo(),
                "class {i}: part {} must start at root {j}'s enclosure",
                j + 1
            );
        }
        match regime {
            Regime::ExistsExtremal => {
                let delta = properness_delta(&class).unwrap();
                assert!(delta.is_positive(), "class {i}: delta = {delta}");
                assert!(report.roots.is_empty(), "class {i}: positive profile with roots");
            }
            Regime::Unbounded => {
                let dir = unbounded_direction(&class, &Rat::one()).unwrap();
                assert!(
                    dir.f_max_on_support.is_negative(),
                    "class {i}: certified max {} not negative",
                    dir.f_max_on_support
                );
                assert!(dir.linear_term < 0.0, "class {i}: {}", dir.linear_term);
                assert!(
                    report.parts.iter().any(|p| !p.positive),
                    "class {i}: no negative part in an unbounded profile"
                );
            }
            Regime::BoundedNotProper => {
                assert!(
                    report.roots.iter().all(|r| r.multiplicity() % 2 == 0),
                    "class {i}: odd-multiplicity interior root in a nonnegative profile"
                );
                assert!(
                    report.parts.iter().all(|p| p.positive),
                    "class {i}: negative part in a nonnegative profile"
                );
            }
        }
    }
}

#[test]
fn profile_splits_into_angle_independent_and_linear_parts() {
    let mut rng = Rng::new(0x1B);
    for i in 0..50 {
        let class = common::random_class(&mut rng, 3, 3);
        let data = extremal_polynomial(&class).unwrap();
        let recomposed = &data.f_zero + &data.f_lin.scale(&data.kappa);
        assert_eq!(data.f_omega, recomposed, "class {i}: decomposition at its own angle");
        let fresh = rat(rng.int_in(1, 12), rng.int_in(1, 4));
        let retargeted = extremal_polynomial(&class.with_kappa(fresh.clone()).unwrap()).unwrap();
        assert_eq!(
            retargeted.f_omega,
            &data.f_zero + &data.f_lin.scale(&fresh),
            "class {i}: decomposition must predict the profile at angle {fresh}"
        );
    }
}

#[test]
fn exact_linear_functional_matches_quadrature() {
    let mut rng = Rng::new(0x1C);
    let spec = QuadratureSpec::default();
    for i in 0..10 {
        let class = common::random_class(&mut rng, 2, 2);
        let data = extremal_polynomial(&class).unwrap();
        let u = SymplecticPotential::new(data.kappa.clone(), common::random_w(&mut rng, &data.kappa))
            .unwrap();
        let exact = l_functional(&class, &u).unwrap().to_f64();
        // F u'' is the polynomial F w + (F/(1-z^2))/kappa, so plain
        // quadrature must reproduce the exact moments.
        let integrand = &(&data.f_omega * u.w())
            + &data
                .f_omega
                .exact_div(&one_minus_z_squared())
                .unwrap()
                .scale(&(Rat::one() / &data.kappa));
        let coeffs = integrand.coeffs_f64();
        let numeric = integrate(
            |z| coeffs.iter().rev().fold(0.0, |acc, &a| acc * z + a),
            -1.0,
            1.0,
            &spec,
        )
        .unwrap();
        let scale = exact.abs().max(1.0);
        assert!(
            (exact - numeric).abs() <= 1e-6 * scale,
            "class {i}: exact {exact} vs quadrature {numeric}"
        );
    }
}

#[test]
fn energy_respects_its_entropy_lower_bound() {
    let class = reference_class();
    let profile = MomentumProfile::from_class(&class).unwrap();
    let spec = QuadratureSpec::default();
    let bound = k_energy_lower_bound(&profile, &spec).unwrap();
    let canonical = SymplecticPotential::canonical(Rat::one()).unwrap();
    assert_eq!(
        k_energy(&class, &canonical, &spec).unwrap(),
        0.0,
        "canonical potential must have zero energy exactly"
    );
    assert!(bound <= 0.0, "bound {bound} must not exceed the canonical value 0");
    let mut rng = Rng::new(0x1D);
    for i in 0..50 {
        let u = SymplecticPotential::new(Rat::one(), common::random_w(&mut rng, &Rat::one()))
            .unwrap();
        let e = k_energy(&class, &u, &spec).unwrap();
        assert!(e >= bound - 1e-8, "potential {i}: energy {e} below bound {bound}");
    }
}

#[test]
fn tilted_energy_gap_is_nonnegative_and_vanishes_at_the_center() {
    let class = reference_class();
    let profile = MomentumProfile::from_class(&class).unwrap();
    let spec = QuadratureSpec::default();
    let mut rng = Rng::new(0x1E);
    for i in 0..50 {
        let u = SymplecticPotential::new(Rat::one(), common::random_w(&mut rng, &Rat::one()))
            .unwrap();
        let v0 = SymplecticPotential::new(Rat::one(), common::random_w(&mut rng, &Rat::one()))
            .unwrap();
        let gap = k_energy_convexity_gap(profile.p_c(), &u, &v0, &spec).unwrap();
        assert!(gap >= -1e-9, "pair {i}: gap {gap}");
        let self_gap = k_energy_convexity_gap(profile.p_c(), &u, &u, &spec).unwrap();
        assert!(
            self_gap.abs() <= 1e-15,
            "pair {i}: self gap {self_gap} must vanish"
        );
    }
}

#[test]
fn dual_pairs_are_convex_and_satisfy_the_pairing_inequality() {
    let mut rng = Rng::new(0x1F);
    let grid: Vec<f64> = (-19..=19).map(|i| f64::from(i) / 20.0).collect();
    for _ in 0..5 {
        let u = SymplecticPotential::new(Rat::one(), common::random_w(&mut rng, &Rat::one()))
            .unwrap();
        let pairs = legendre_transform(&u, &grid).unwrap();
        for w in pairs.windows(2) {
            assert!(w[0].0 < w[1].0, "dual variable must increase with z");
        }
        for w in pairs.windows(3) {
            let s01 = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            let s12 = (w[2].1 - w[1].1) / (w[2].0 - w[1].0);
            assert!(s12 >= s01 - 1e-12, "dual secant slopes must not decrease");
        }
        for &(y, phi) in &pairs {
            for &z in &grid {
                let lower = z * y - u.eval_u(z);
                assert!(
                    phi >= lower - 1e-9,
                    "pairing inequality fails: phi({y}) = {phi} < {lower}"
                );
            }
        }
    }
}

#[test]
fn potential_integral_is_nonnegative() {
    let mut rng = Rng::new(0x20);
    for i in 0..100 {
        let kappa = rat(rng.int_in(1, 12), rng.int_in(1, 4));
        let u = SymplecticPotential::new(kappa.clone(), common::random_w(&mut rng, &kappa))
            .unwrap();
        let integral = j_proxy(&u);
        assert!(integral >= 0.0, "potential {i}: integral {integral}");
    }
}

fn arb_rat(max_num: i64, max_den: i64) -> impl Strategy<Value = Rat> {
    (-max_num..=max_num, 1..=max_den).prop_map(|(n, d)| rat(n, d))
}

fn arb_poly(degree: usize, max_num: i64, max_den: i64) -> impl Strategy<Value = RatPoly> {
    prop::collection::vec(arb_rat(max_num, max_den), 1..=degree + 1)
        .prop_map(RatPoly::from_coeffs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_text_and_json_round_trip(n in -1_000_000i64..=1_000_000, d in 1i64..=1_000_000) {
        let r = rat(n, d);
        let displayed: Rat = r.to_string().parse().unwrap();
        prop_assert_eq!(&displayed, &r);
        let json = serde_json::to_string(&r).unwrap();
        let back: Rat = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn interval_evaluation_contains_point_values(
        p in arb_poly(5, 20, 6),
        a in arb_rat(8, 4),
        w in (1i64..=16).prop_map(|k| rat(k, 8)),
        t in 0u8..=16,
    ) {
        let b = &a + &w;
        let i = RatInterval::new(a.clone(), b.clone());
        let z = &a + &(&w * &rat(i64::from(t), 16));
        prop_assert!(
            p.eval_interval(&i).contains(&p.eval(&z)),
            "p(z) escaped the interval extension"
        );
    }

    #[test]
    fn square_free_decomposition_reassembles(
        r1 in arb_rat(6, 3),
        gap in (1i64..=12, 1i64..=3).prop_map(|(n, d)| rat(n, d)),
        m1 in 1u32..=3,
        m2 in 1u32..=3,
        lead in (1i64..=5).prop_map(|n| rat(n, 1)),
    ) {
        let r2 = &r1 + &gap;
        let lin = |r: &Rat| RatPoly::from_coeffs(vec![-r, Rat::one()]);
        let p = (&(&lin(&r1).pow(m1) * &lin(&r2).pow(m2)))
            * &RatPoly::from_coeffs(vec![lead.clone()]);
        let parts = square_free_decompose(&p).unwrap();
        let mut product = RatPoly::from_coeffs(vec![Rat::one()]);
        for (factor, mult) in &parts {
            product = &product * &factor.pow(*mult);
        }
        // The parts are determined up to a constant; rescale by the leading
        // coefficients before comparing.
        let scale = p.coeffs().last().unwrap() / product.coeffs().last().unwrap();
        prop_assert_eq!(product.scale(&scale), p);
    }

    #[test]
    fn planted_roots_are_isolated_with_multiplicity(
        r1 in (-14i64..=14).prop_map(|n| rat(n, 16)),
        gap in (1i64..=12).prop_map(|n| rat(n, 16)),
        m1 in 1u32..=3,
        m2 in 1u32..=2,
    ) {
        prop_assume!((&r1 + &gap).abs() < Rat::one());
        let r2 = &r1 + &gap;
        let lin = |r: &Rat| RatPoly::from_coeffs(vec![-r, Rat::one()]);
        let p = &lin(&r1).pow(m1) * &lin(&r2).pow(m2);
        let records = isolate_roots(&p, &Rat::from_int(-1), &Rat::one()).unwrap();
        prop_assert_eq!(records.len(), 2, "two distinct planted roots");
        prop_assert!(records[0].interval().contains(&r1));
        prop_assert_eq!(records[0].multiplicity(), m1);
        prop_assert!(records[1].interval().contains(&r2));
        prop_assert_eq!(records[1].multiplicity(), m2);
    }

    #[test]
    fn moments_agree_with_the_antiderivative_route(p in arb_poly(6, 30, 8), r in 0u32..=3) {
        let mut shifted = p.clone();
        for _ in 0..r {
            shifted = &shifted * &RatPoly::from_coeffs(vec![Rat::zero(), Rat::one()]);
        }
        let anti = shifted.antiderivative();
        let direct = p.moment(r);
        let via_anti = anti.eval(&Rat::one()) - anti.eval(&Rat::from_int(-1));
        prop_assert_eq!(direct, via_anti);
    }

    #[test]
    fn interval_arithmetic_contains_pointwise_results(
        a in arb_rat(8, 4),
        wa in (1i64..=8).prop_map(|k| rat(k, 4)),
        b in arb_rat(8, 4),
        wb in (1i64..=8).prop_map(|k| rat(k, 4)),
        ta in 0u8..=8,
        tb in 0u8..=8,
    ) {
        let ia = RatInterval::new(a.clone(), &a + &wa);
        let ib = RatInterval::new(b.clone(), &b + &wb);
        let x = &a + &(&wa * &rat(i64::from(ta), 8));
        let y = &b + &(&wb * &rat(i64::from(tb), 8));
        prop_assert!(ia.add(&ib).contains(&(&x + &y)));
        prop_assert!(ia.mul(&ib).contains(&(&x * &y)));
        prop_assert!(ia.neg().contains(&(-&x)));
        prop_assert!(ia.abs().contains(&x.abs()));
        if !ib.contains_zero() {
            prop_assert!(ia.div(&ib).contains(&(&x / &y)));
        }
    }
}
