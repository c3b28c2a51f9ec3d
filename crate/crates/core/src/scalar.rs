//! Scalar abstraction shared by every computation in the crate.
//!
//! All comparisons between log-moduli, cycle means and log-radii go through
//! [`Scalar`], so the same code runs on `f64`/`f32` and on exact
//! [`Rational`] numbers. With rational inputs every threshold test is exact.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational scalar.
pub type Rational = BigRational;

/// Ordered field element usable as a log-modulus or phase.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// Parses a decimal literal such as `-0.6931`, `1e-3` or (for exact
    /// scalars) `3/4`.
    fn parse_decimal(text: &str) -> Option<Self>;

    /// Converts a finite `f64`; `None` for NaN or infinities.
    fn from_f64_lossy(x: f64) -> Option<Self>;

    fn floor_value(&self) -> Self;

    /// False only for NaN and infinities.
    fn is_finite_value(&self) -> bool;

    /// Total order on the finite values the crate admits.
    fn cmp_total(&self, other: &Self) -> Ordering {
        self.partial_cmp(other)
            .expect("scalar values are finite and totally ordered")
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("integer fits scalar") / Self::from_i64(den).expect("integer fits scalar")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits scalar")
    }

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Reduces a phase in turns to `[0, 1)`.
    fn wrap_turn(&self) -> Self {
        let wrapped = self.clone() - self.floor_value();
        if wrapped >= Self::one() || wrapped < Self::zero() {
            Self::zero()
        } else {
            wrapped
        }
    }
}

impl Scalar for f64 {
    fn parse_decimal(text: &str) -> Option<Self> {
        let value: f64 = text.trim().parse().ok()?;
        value.is_finite().then_some(value)
    }

    fn from_f64_lossy(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn floor_value(&self) -> Self {
        self.floor()
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f32 {
    fn parse_decimal(text: &str) -> Option<Self> {
        let value: f32 = text.trim().parse().ok()?;
        value.is_finite().then_some(value)
    }

    fn from_f64_lossy(x: f64) -> Option<Self> {
        let y = x as f32;
        y.is_finite().then_some(y)
    }

    fn floor_value(&self) -> Self {
        self.floor()
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Rational {
    fn parse_decimal(text: &str) -> Option<Self> {
        parse_rational(text.trim())
    }

    fn from_f64_lossy(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }

    fn floor_value(&self) -> Self {
        self.floor()
    }

    fn is_finite_value(&self) -> bool {
        true
    }
}

fn parse_rational(text: &str) -> Option<Rational> {
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }

    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }

    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    let factor = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    if negative {
        value = -value;
    }
    Some(value)
}

/// Exact rational for `num / den`; panics on a zero denominator.
pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn max_of<S: Scalar>(a: &S, b: &S) -> S {
    if a.cmp_total(b) == Ordering::Less {
        b.clone()
    } else {
        a.clone()
    }
}

pub(crate) fn min_of<S: Scalar>(a: &S, b: &S) -> S {
    if a.cmp_total(b) == Ordering::Greater {
        b.clone()
    } else {
        a.clone()
    }
}
