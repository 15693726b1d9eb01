//! Scalar abstraction shared by the dense-table algorithms.
//!
//! All lattice transforms are alternating sums, so they are implemented
//! generically over [`Scalar`] and instantiated with `f64` for everyday use
//! and with [`Rational`] when exact cancellation matters (oracles, round-trip
//! identities, the simplex solver).

use num::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive};
use std::fmt::{Debug, Display};
use std::ops::{AddAssign, MulAssign, SubAssign};

/// Arbitrary-precision rational scalar used in exact mode.
pub type Rational = BigRational;

/// Field-like scalar for table arithmetic.
pub trait Scalar:
    Signed + Clone + PartialOrd + Debug + Display + AddAssign + SubAssign + MulAssign + 'static
{
    /// Whether arithmetic in this scalar is exact (no rounding).
    const EXACT: bool;

    fn from_u32(n: u32) -> Self;

    /// Best-effort conversion to `f64`, used for reporting and tolerances.
    fn to_f64(&self) -> f64;

    /// Exact embedding of an `f64` (rationals represent every finite float).
    fn from_f64(x: f64) -> Self;

    /// Integer power with negative exponents allowed.
    fn powi(&self, exp: i32) -> Self {
        let mut base = self.clone();
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        if exp < 0 {
            Self::one() / acc
        } else {
            acc
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_u32(n: u32) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn powi(&self, exp: i32) -> Self {
        f64::powi(*self, exp)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_u32(n: u32) -> Self {
        <BigRational as FromPrimitive>::from_u32(n).expect("u32 embeds into BigRational")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(x).expect("finite float expected")
    }
}

/// Parses a scalar from a decimal string or a `p/q` fraction, exactly for
/// rationals.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let num: num::BigInt = p.trim().parse().ok()?;
        let den: num::BigInt = q.trim().parse().ok()?;
        if den == num::BigInt::from(0) {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    let (sign, rest) = match s.strip_prefix('-') {
        Some(r) => (-1i32, r),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match rest.split_once('.') {
        Some((i, f)) => (i, f),
        None => (rest, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!(
        "{}{}",
        if int_part.is_empty() { "0" } else { int_part },
        frac_part
    );
    let num: num::BigInt = digits.parse().ok()?;
    let den = num::BigInt::from(10u32).pow(frac_part.len() as u32);
    let mut r = BigRational::new(num, den);
    if sign < 0 {
        r = -r;
    }
    Some(r)
}

/// Renders a rational as `p/q` (or a bare integer when the denominator is 1).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
