//! Dense univariate polynomials with exact rational coefficients.
//!
//! Coefficients are stored lowest degree first and the representation is kept
//! normalized: the leading coefficient is nonzero, and the zero polynomial is
//! the empty coefficient vector. All arithmetic is exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rat::{Rat, RatInterval};

/// Errors from exact polynomial operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("inexact division: remainder {remainder} is nonzero")]
    InexactDivision { remainder: String },
    #[error("interval [{lo}, {hi}] is degenerate or out of order")]
    DegenerateInterval { lo: Rat, hi: Rat },
}

#[derive(Clone, PartialEq, Eq, Default)]
pub struct RatPoly {
    /// Coefficients, lowest degree first; empty means the zero polynomial.
    coeffs: Vec<Rat>,
}

impl RatPoly {
    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        RatPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        RatPoly::from_coeffs(vec![c])
    }

    /// The monomial `z`.
    pub fn x() -> Self {
        RatPoly::from_coeffs(vec![Rat::zero(), Rat::one()])
    }

    /// `c * z^k`.
    pub fn monomial(c: Rat, k: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        RatPoly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Rat::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    /// Convenience for tests and literals: coefficients as integer pairs.
    pub fn from_i64s(coeffs: &[i64]) -> Self {
        RatPoly::from_coeffs(coeffs.iter().map(|&c| Rat::from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    /// Horner evaluation at an exact point.
    pub fn eval(&self, z: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Horner evaluation in floating point (coefficients rounded once).
    pub fn eval_f64(&self, z: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.to_f64();
        }
        acc
    }

    /// Coefficients rounded to `f64`, lowest degree first, for hot loops.
    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(Rat::to_f64).collect()
    }

    /// Certified enclosure of the image of `i` under this polynomial, by
    /// Horner recursion in interval arithmetic.
    pub fn eval_interval(&self, i: &RatInterval) -> RatInterval {
        let mut acc = RatInterval::point(Rat::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(i).add_point(c);
        }
        acc
    }

    pub fn scale(&self, c: &Rat) -> RatPoly {
        if c.is_zero() {
            return RatPoly::zero();
        }
        RatPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn derivative(&self) -> RatPoly {
        if self.coeffs.len() <= 1 {
            return RatPoly::zero();
        }
        RatPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rat::from_int(k as i64))
                .collect(),
        }
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> RatPoly {
        if self.is_zero() {
            return RatPoly::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rat::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / Rat::from_int(k as i64 + 1));
        }
        RatPoly::from_coeffs(coeffs)
    }

    /// Exact integral of `p(t) * t^r` over `[-1, 1]`.
    pub fn moment(&self, r: u32) -> Rat {
        let integrand = self * &RatPoly::monomial(Rat::one(), r as usize);
        let anti = integrand.antiderivative();
        anti.eval(&Rat::one()) - anti.eval(&Rat::from_int(-1))
    }

    /// Euclidean division: returns `(quotient, remainder)` with
    /// `self = quotient * divisor + remainder` and `deg r < deg divisor`.
    pub fn divrem(&self, divisor: &RatPoly) -> Result<(RatPoly, RatPoly), PolyError> {
        if divisor.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let dlead = divisor.leading().unwrap().recip();
        let ddeg = divisor.degree().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= ddeg {
            return Ok((RatPoly::zero(), self.clone()));
        }
        let qlen = rem.len() - ddeg;
        let mut quot = vec![Rat::zero(); qlen];
        for i in (0..qlen).rev() {
            let q = &rem[i + ddeg] * &dlead;
            if q.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                let t = &q * d;
                rem[i + j] = &rem[i + j] - &t;
            }
            quot[i] = q;
        }
        rem.truncate(ddeg);
        Ok((RatPoly::from_coeffs(quot), RatPoly::from_coeffs(rem)))
    }

    /// Division that must be exact; errors if a remainder is left over.
    pub fn exact_div(&self, divisor: &RatPoly) -> Result<RatPoly, PolyError> {
        let (q, r) = self.divrem(divisor)?;
        if !r.is_zero() {
            return Err(PolyError::InexactDivision {
                remainder: r.to_string(),
            });
        }
        Ok(q)
    }

    /// Monic greatest common divisor (1 for coprime inputs).
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.leading().unwrap().recip();
        a.scale(&lead)
    }

    pub fn pow(&self, mut exp: u32) -> RatPoly {
        let mut base = self.clone();
        let mut acc = RatPoly::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a} z")?,
                _ => write!(f, "{a} z^{k}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (i, c) in short.coeffs.iter().enumerate() {
            coeffs[i] = &coeffs[i] + c;
        }
        RatPoly::from_coeffs(coeffs)
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        self + &(-rhs)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        RatPoly::from_coeffs(coeffs)
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for RatPoly {
            type Output = RatPoly;
            fn $method(self, rhs: RatPoly) -> RatPoly {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        -&self
    }
}

impl Serialize for RatPoly {
    /// Serializes as an array of `"num/den"` strings, lowest degree first.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.coeffs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RatPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let coeffs: Vec<Rat> = Deserialize::deserialize(deserializer)?;
        Ok(RatPoly::from_coeffs(coeffs))
    }
}

/// `1 - z^2`, the weight that vanishes at both fibre endpoints.
pub fn one_minus_z_squared() -> RatPoly {
    RatPoly::from_i64s(&[1, 0, -1])
}

/// `1 + c*z` as a polynomial.
pub fn linear(constant: Rat, slope: Rat) -> RatPoly {
    RatPoly::from_coeffs(vec![constant, slope])
}
