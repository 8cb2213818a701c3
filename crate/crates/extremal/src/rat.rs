//! Exact rational scalars and closed rational intervals.
//!
//! `Rat` is a thin wrapper around an arbitrary-precision reduced fraction.
//! It exists so the rest of the crate can fix one canonical textual form
//! (`"num/den"`, denominator always positive) for serialization and reports,
//! and so interval arithmetic lives next to the scalar type it encloses.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An exact rational number, always stored in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Rat(BigRational::new(num, den))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Sign as -1, 0, or 1.
    pub fn signum(&self) -> i32 {
        match self.0.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    /// Multiplicative inverse; panics on zero.
    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rat(self.0.recip())
    }

    pub fn pow(&self, exp: u32) -> Self {
        Rat(num_traits::pow::pow(self.0.clone(), exp as usize))
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Nearest `f64`, correct to within a couple of ulps even when numerator
    /// and denominator individually overflow `f64` range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let neg = self.is_negative();
        let num = self.0.numer().abs();
        let den = self.0.denom().clone();
        // Scale so the integer quotient carries ~64 significant bits, divide
        // exactly, then fold the scale back in as a power of two.
        let shift: i64 = num.bits() as i64 - den.bits() as i64;
        let extra = 64 - shift;
        let q = if extra >= 0 {
            (num << extra as u64) / den
        } else {
            num / (den << (-extra) as u64)
        };
        let mut v = q.to_f64().unwrap_or(f64::INFINITY) * (-extra as f64).exp2();
        if neg {
            v = -v;
        }
        v
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Error produced when a rational literal cannot be parsed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {input:?}: {reason}")]
pub struct ParseRatError {
    pub input: String,
    pub reason: String,
}

impl FromStr for Rat {
    type Err = ParseRatError;

    /// Accepts `"a/b"` or a plain integer `"a"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| ParseRatError {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let t = s.trim();
        let (ns, ds) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num = BigInt::from_str(ns).map_err(|_| err("bad numerator"))?;
        let den = BigInt::from_str(ds).map_err(|_| err("bad denominator"))?;
        if den.is_zero() {
            return Err(err("zero denominator"));
        }
        Ok(Rat(BigRational::new(num, den)))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((self.0).$method(rhs.0))
            }
        }
        impl $trait for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
    };
}

impl_binop!(Add, add);
impl_binop!(Sub, sub);
impl_binop!(Mul, mul);

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero");
        Rat(self.0 / rhs.0)
    }
}

impl Div for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero");
        Rat(&self.0 / &rhs.0)
    }
}

impl Div<&Rat> for Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero");
        Rat(self.0 / &rhs.0)
    }
}

impl Div<Rat> for &Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero");
        Rat(&self.0 / rhs.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

/// Shorthand used pervasively in tests: `rat(1, 2)` is 1/2.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num, den)
}

/// A closed interval `[lo, hi]` with exact rational endpoints, `lo <= hi`.
///
/// Used for certified root enclosures and for outward-rounded evaluation of
/// polynomials over a range. Degenerate (point) intervals are allowed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatInterval {
    lo: Rat,
    hi: Rat,
}

impl RatInterval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RatInterval { lo, hi }
    }

    pub fn point(v: Rat) -> Self {
        RatInterval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) * rat(1, 2)
    }

    pub fn contains(&self, v: &Rat) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn add(&self, other: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn add_point(&self, v: &Rat) -> RatInterval {
        RatInterval {
            lo: &self.lo + v,
            hi: &self.hi + v,
        }
    }

    pub fn mul(&self, other: &RatInterval) -> RatInterval {
        let mut products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        products.sort();
        let [lo, _, _, hi] = products;
        RatInterval { lo, hi }
    }

    pub fn scale(&self, v: &Rat) -> RatInterval {
        if v.is_negative() {
            RatInterval {
                lo: &self.hi * v,
                hi: &self.lo * v,
            }
        } else {
            RatInterval {
                lo: &self.lo * v,
                hi: &self.hi * v,
            }
        }
    }

    pub fn neg(&self) -> RatInterval {
        RatInterval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    /// Interval quotient; the divisor must not contain zero.
    pub fn div(&self, other: &RatInterval) -> RatInterval {
        assert!(!other.contains_zero(), "interval division through zero");
        self.mul(&RatInterval::new(other.hi.recip(), other.lo.recip()))
    }

    /// Interval of absolute values.
    pub fn abs(&self) -> RatInterval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            RatInterval {
                lo: Rat::zero(),
                hi: self.lo.abs().max(self.hi.abs()),
            }
        }
    }
}

impl PartialOrd for RatInterval {
    /// Intervals compare only when disjoint (or equal as points).
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self == other {
            Some(Ordering::Equal)
        } else if self.hi < other.lo {
            Some(Ordering::Less)
        } else if other.hi < self.lo {
            Some(Ordering::Greater)
        } else {
            None
        }
    }
}

impl Serialize for RatInterval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [&self.lo, &self.hi].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RatInterval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [lo, hi]: [Rat; 2] = Deserialize::deserialize(deserializer)?;
        if lo > hi {
            return Err(serde::de::Error::custom("interval endpoints out of order"));
        }
        Ok(RatInterval { lo, hi })
    }
}
