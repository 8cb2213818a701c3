//! Exact real-root machinery: Sturm chains, square-free decomposition,
//! certified root isolation, and sign classification on an open interval.
//!
//! Everything here is exact: enclosures are rational intervals that are
//! guaranteed to contain the root they isolate, and all counts come from
//! Sturm's theorem rather than sampling.

use serde::Serialize;

use crate::poly::{PolyError, RatPoly};
use crate::rat::{rat, Rat, RatInterval};

/// Sign behaviour of a polynomial on an open interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Positivity {
    /// Strictly positive on the whole open interval.
    Positive,
    /// Nonnegative, with at least one interior zero (all of even multiplicity).
    NonnegWithInteriorZeros,
    /// Takes a negative value somewhere in the interval.
    SomewhereNegative,
}

/// A certified enclosure of one real root.
///
/// The open interval `(lo, hi)` contains exactly one root of the original
/// polynomial; `factor` is the square-free factor vanishing at it (simple
/// there), so the enclosure can be refined by sign bisection to any width.
#[derive(Debug, Clone, Serialize)]
pub struct RootRecord {
    interval: RatInterval,
    multiplicity: u32,
    #[serde(skip)]
    factor: RatPoly,
}

impl RootRecord {
    pub fn interval(&self) -> &RatInterval {
        &self.interval
    }

    pub fn multiplicity(&self) -> u32 {
        self.multiplicity
    }

    /// Midpoint of the current enclosure.
    pub fn approx(&self) -> Rat {
        self.interval.midpoint()
    }

    /// Shrinks the enclosure by sign bisection until its width is at most
    /// `width`. The factor changes sign across the root, so this always
    /// terminates; if a bisection point lands exactly on the root the
    /// enclosure collapses around it.
    pub fn refine_to(&mut self, width: &Rat) {
        let mut lo = self.interval.lo().clone();
        let mut hi = self.interval.hi().clone();
        let mut sign_lo = self.factor.eval(&lo).signum();
        debug_assert!(sign_lo != 0 && self.factor.eval(&hi).signum() == -sign_lo);
        while &(&hi - &lo) > width {
            let mid = (&lo + &hi) * rat(1, 2);
            match self.factor.eval(&mid).signum() {
                0 => {
                    // Exact rational root: collapse to a tiny interval around it.
                    let eps = (&hi - &lo) * rat(1, 4);
                    let eps = if &eps > width {
                        width * rat(1, 4)
                    } else {
                        eps
                    };
                    lo = &mid - &eps;
                    hi = &mid + &eps;
                    sign_lo = self.factor.eval(&lo).signum();
                    debug_assert!(sign_lo != 0);
                }
                s if s == sign_lo => lo = mid,
                _ => hi = mid,
            }
        }
        self.interval = RatInterval::new(lo, hi);
    }
}

/// Sturm chain of a square-free polynomial.
pub struct SturmChain {
    chain: Vec<RatPoly>,
}

impl SturmChain {
    /// Builds the chain `p, p', -rem(...), ...` for a square-free `p`.
    pub fn of_square_free(p: &RatPoly) -> Result<Self, PolyError> {
        if p.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mut chain = vec![p.clone(), p.derivative()];
        while !chain.last().unwrap().is_zero() {
            let n = chain.len();
            let (_, r) = chain[n - 2].divrem(&chain[n - 1])?;
            chain.push(-&r);
        }
        chain.pop();
        Ok(SturmChain { chain })
    }

    /// Sign variations at `x`, zeros dropped.
    fn variations(&self, x: &Rat) -> usize {
        let mut count = 0;
        let mut prev = 0;
        for p in &self.chain {
            let s = p.eval(x).signum();
            if s == 0 {
                continue;
            }
            if prev != 0 && s != prev {
                count += 1;
            }
            prev = s;
        }
        count
    }

    /// Number of distinct roots in the half-open interval `(a, b]`.
    pub fn count_half_open(&self, a: &Rat, b: &Rat) -> usize {
        debug_assert!(a < b);
        self.variations(a).saturating_sub(self.variations(b))
    }
}

/// The square-free part `p / gcd(p, p')`: same roots as `p`, all simple.
pub fn square_free_part(p: &RatPoly) -> Result<RatPoly, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let g = p.gcd(&p.derivative());
    p.exact_div(&g)
}

/// Yun's square-free decomposition: returns pairwise coprime square-free
/// factors with their multiplicities, such that the product of
/// `factor^multiplicity` equals `p` up to a nonzero constant. Factors of
/// multiplicity `m` appear as `(factor, m)`; constant factors are dropped.
pub fn square_free_decompose(p: &RatPoly) -> Result<Vec<(RatPoly, u32)>, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let mut out = Vec::new();
    let dp = p.derivative();
    if dp.is_zero() {
        return Ok(out); // nonzero constant
    }
    let mut a = p.gcd(&dp);
    let mut b = p.exact_div(&a)?;
    let mut c = dp.exact_div(&a)?;
    let mut d = &c - &b.derivative();
    let mut mult = 1u32;
    loop {
        if b.degree() == Some(0) {
            break;
        }
        a = b.gcd(&d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), mult));
        }
        b = b.exact_div(&a)?;
        c = d.exact_div(&a)?;
        d = &c - &b.derivative();
        mult += 1;
    }
    Ok(out)
}

/// Counts distinct real roots of `p` in the interval from `a` to `b`.
/// With `open = true` the endpoints are excluded; otherwise included.
pub fn count_roots_in(p: &RatPoly, a: &Rat, b: &Rat, open: bool) -> Result<usize, PolyError> {
    if a >= b {
        return Err(PolyError::DegenerateInterval {
            lo: a.clone(),
            hi: b.clone(),
        });
    }
    let q = square_free_part(p)?;
    if q.degree() == Some(0) {
        return Ok(0);
    }
    let chain = SturmChain::of_square_free(&q)?;
    // Sturm with zeros dropped counts roots in (a, b]; adjust the endpoints.
    let mut n = chain.count_half_open(a, b);
    if open && q.eval(b).is_zero() {
        n -= 1;
    }
    if !open && q.eval(a).is_zero() {
        n += 1;
    }
    Ok(n)
}

/// Isolates all roots of `p` in the open interval `(a, b)`.
///
/// Returns one record per distinct root, sorted left to right, with pairwise
/// disjoint enclosures whose endpoints are never roots. Multiplicities come
/// from the square-free decomposition.
pub fn isolate_roots(p: &RatPoly, a: &Rat, b: &Rat) -> Result<Vec<RootRecord>, PolyError> {
    if a >= b {
        return Err(PolyError::DegenerateInterval {
            lo: a.clone(),
            hi: b.clone(),
        });
    }
    let mut records = Vec::new();
    for (factor, mult) in square_free_decompose(p)? {
        let chain = SturmChain::of_square_free(&factor)?;
        isolate_square_free(&factor, &chain, a, b, mult, &mut records)?;
    }
    // Roots of distinct square-free factors are distinct, so refinement makes
    // the enclosures disjoint.
    loop {
        records.sort_by(|r, s| {
            r.interval
                .midpoint()
                .cmp(&s.interval.midpoint())
                .then_with(|| r.interval.lo().cmp(s.interval.lo()))
        });
        let overlap = records
            .windows(2)
            .any(|w| w[0].interval.hi() >= w[1].interval.lo());
        if !overlap {
            break;
        }
        let min_width = records
            .iter()
            .map(|r| r.interval.width())
            .min()
            .unwrap_or_else(Rat::one);
        let target = min_width * rat(1, 2);
        for r in &mut records {
            r.refine_to(&target);
        }
    }
    Ok(records)
}

/// Isolates roots of a square-free `factor` in `(a, b)` by Sturm subdivision.
///
/// The interval ends are first nudged inward past any root sitting exactly at
/// `a` or `b`, so every segment endpoint seen afterwards is a non-root and
/// `count_half_open` counts open-interval roots without correction.
fn isolate_square_free(
    factor: &RatPoly,
    chain: &SturmChain,
    a: &Rat,
    b: &Rat,
    mult: u32,
    out: &mut Vec<RootRecord>,
) -> Result<(), PolyError> {
    let mut lo0 = a.clone();
    if factor.eval(&lo0).is_zero() {
        let mut eps = (b - a) * rat(1, 4);
        loop {
            let candidate = a + &eps;
            if !factor.eval(&candidate).is_zero() && chain.count_half_open(a, &candidate) == 0 {
                lo0 = candidate;
                break;
            }
            eps = eps * rat(1, 2);
        }
    }
    let mut hi0 = b.clone();
    if factor.eval(&hi0).is_zero() {
        let mut eps = (b - &lo0) * rat(1, 4);
        loop {
            let candidate = b - &eps;
            if candidate > lo0
                && !factor.eval(&candidate).is_zero()
                && chain.count_half_open(&candidate, b) == 1
            {
                hi0 = candidate;
                break;
            }
            eps = eps * rat(1, 2);
        }
    }
    if lo0 >= hi0 {
        return Ok(());
    }
    let total = chain.count_half_open(&lo0, &hi0);
    if total == 0 {
        return Ok(());
    }
    // Work queue of segments (lo, hi, root count); endpoints are never roots.
    let mut queue = vec![(lo0, hi0, total)];
    while let Some((lo, hi, n)) = queue.pop() {
        if n == 0 {
            continue;
        }
        if n == 1 {
            debug_assert!(factor.eval(&lo).signum() * factor.eval(&hi).signum() == -1);
            out.push(RootRecord {
                interval: RatInterval::new(lo, hi),
                multiplicity: mult,
                factor: factor.clone(),
            });
            continue;
        }
        let mid = (&lo + &hi) * rat(1, 2);
        if factor.eval(&mid).is_zero() {
            // The midpoint is itself a root: enclose it tightly, then recurse
            // on the two sides beyond the enclosure.
            let mut eps = (&hi - &lo) * rat(1, 8);
            loop {
                let (lo2, hi2) = (&mid - &eps, &mid + &eps);
                if !factor.eval(&lo2).is_zero()
                    && !factor.eval(&hi2).is_zero()
                    && chain.count_half_open(&lo2, &hi2) == 1
                {
                    out.push(RootRecord {
                        interval: RatInterval::new(lo2.clone(), hi2.clone()),
                        multiplicity: mult,
                        factor: factor.clone(),
                    });
                    let n_left = chain.count_half_open(&lo, &lo2);
                    queue.push((lo.clone(), lo2, n_left));
                    queue.push((hi2, hi.clone(), n - 1 - n_left));
                    break;
                }
                eps = eps * rat(1, 2);
            }
        } else {
            let n_left = chain.count_half_open(&lo, &mid);
            queue.push((lo, mid.clone(), n_left));
            queue.push((mid, hi, n - n_left));
        }
    }
    Ok(())
}

/// Classifies the sign of `p` on the open interval `(a, b)`.
///
/// Exact procedure: count interior roots; with none, the sign at the midpoint
/// decides. Otherwise any odd-multiplicity interior root forces a sign change,
/// and with all even the values sampled strictly between consecutive
/// enclosures decide.
pub fn is_nonneg_on(p: &RatPoly, a: &Rat, b: &Rat) -> Result<Positivity, PolyError> {
    if a >= b {
        return Err(PolyError::DegenerateInterval {
            lo: a.clone(),
            hi: b.clone(),
        });
    }
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let n = count_roots_in(p, a, b, true)?;
    if n == 0 {
        let mid = (a + b) * rat(1, 2);
        return Ok(if p.eval(&mid).is_positive() {
            Positivity::Positive
        } else {
            Positivity::SomewhereNegative
        });
    }
    let mut records = isolate_roots(p, a, b)?;
    debug_assert_eq!(records.len(), n);
    if records.iter().any(|r| r.multiplicity % 2 == 1) {
        return Ok(Positivity::SomewhereNegative);
    }
    // Shrink enclosures until each is strictly inside (a, b) and gaps between
    // consecutive enclosures are nonempty, then sample each gap.
    loop {
        let inside = records.first().unwrap().interval.lo() > a
            && records.last().unwrap().interval.hi() < b
            && records
                .windows(2)
                .all(|w| w[0].interval.hi() < w[1].interval.lo());
        if inside {
            break;
        }
        for r in &mut records {
            let w = r.interval.width() * rat(1, 2);
            r.refine_to(&w);
        }
    }
    let mut gaps = Vec::with_capacity(n + 1);
    gaps.push((a.clone(), records[0].interval.lo().clone()));
    for w in records.windows(2) {
        gaps.push((w[0].interval.hi().clone(), w[1].interval.lo().clone()));
    }
    gaps.push((records[n - 1].interval.hi().clone(), b.clone()));
    for (lo, hi) in gaps {
        let sample = (&lo + &hi) * rat(1, 2);
        if p.eval(&sample).is_negative() {
            return Ok(Positivity::SomewhereNegative);
        }
    }
    Ok(Positivity::NonnegWithInteriorZeros)
}

/// Certified rational lower bound for the minimum of `p` over the closed
/// interval `[a, b]`, computed from endpoint values and interval evaluation
/// over critical-point enclosures refined to `width`. The result never
/// exceeds the true minimum and converges to it as `width` shrinks.
pub fn certified_min(p: &RatPoly, a: &Rat, b: &Rat, width: &Rat) -> Result<Rat, PolyError> {
    if a >= b {
        return Err(PolyError::DegenerateInterval {
            lo: a.clone(),
            hi: b.clone(),
        });
    }
    let mut best = p.eval(a).min(p.eval(b));
    let dp = p.derivative();
    if dp.is_zero() {
        return Ok(best);
    }
    for mut rec in isolate_roots(&dp, a, b)? {
        rec.refine_to(width);
        let lo = p.eval_interval(rec.interval()).lo().clone();
        best = best.min(lo);
    }
    Ok(best)
}

/// Certified rational upper bound for the maximum of `p` over `[a, b]`;
/// mirror image of [`certified_min`].
pub fn certified_max(p: &RatPoly, a: &Rat, b: &Rat, width: &Rat) -> Result<Rat, PolyError> {
    Ok(-certified_min(&-p, a, b, width)?)
}
