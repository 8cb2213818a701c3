//! Shared helpers for the integration suites: a tiny deterministic PRNG and
//! samplers for classes and potentials.
//!
//! The generator is SplitMix64; it is seeded with fixed constants in each
//! suite so failures reproduce exactly without any external randomness
//! source.

use extremal::admissible::{AdmissibleClass, BaseFactor};
use extremal::rat::{rat, Rat};

pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as i64
    }

    /// Rational strictly inside `(0, 1)` with denominator at most `den_max`.
    pub fn unit_rat(&mut self, den_max: i64) -> Rat {
        let den = self.int_in(2, den_max);
        let num = self.int_in(1, den - 1);
        rat(num, den)
    }

    /// Rational in `[lo, hi]` on a grid of `den` steps.
    pub fn rat_in(&mut self, lo: i64, hi: i64, den: i64) -> Rat {
        let num = self.int_in(lo * den, hi * den);
        rat(num, den)
    }
}

/// Random admissible class with up to `max_factors` factors, dimensions up
/// to `max_d`, and moderate rational parameters.
pub fn random_class(rng: &mut Rng, max_factors: i64, max_d: i64) -> AdmissibleClass {
    let n = rng.int_in(1, max_factors);
    let factors = (0..n)
        .map(|_| BaseFactor {
            d: rng.int_in(1, max_d) as u32,
            s: rng.rat_in(-4, 4, 4),
            x: rng.unit_rat(8),
        })
        .collect();
    let kappa = {
        let den = rng.int_in(1, 4);
        rat(rng.int_in(1, 4 * den), den)
    };
    AdmissibleClass::new(factors, kappa).expect("sampler produces valid classes")
}

/// Random convexity-safe potential perturbation `w = c0 + c1 z + c2 z²`
/// with `|c_i| ≤ 1/(4κ)`, so `1 + κ(1−z²)w ≥ 1/4` everywhere.
pub fn random_w(rng: &mut Rng, kappa: &Rat) -> extremal::RatPoly {
    let scale = rat(1, 4) * kappa.recip();
    let coeff = |rng: &mut Rng| &scale * &rat(rng.int_in(-8, 8), 8);
    extremal::RatPoly::from_coeffs(vec![coeff(rng), coeff(rng), coeff(rng)])
}
