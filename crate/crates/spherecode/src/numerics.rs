//! Decimal-precision real numbers and a portable random stream.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::{Error, Result};

/// Smallest working precision, in decimal digits.
pub const MIN_DIGITS: u32 = 16;

/// Extra digits carried above a reported precision.
pub const GUARD_DIGITS: u32 = 2;

/// Identifier of the generator behind [`Rng`], recorded in run manifests.
pub const RNG_ALGORITHM: &str = "chacha8";

const LOG2_10: f64 = std::f64::consts::LOG2_10;

fn bits_for(digits: u32) -> u32 {
    (digits as f64 * LOG2_10).ceil() as u32
}

/// A real number carried at a fixed number of decimal digits.
///
/// Binary operations run at the smaller of the two operand precisions.
#[derive(Clone)]
pub struct BigReal {
    value: Float,
    digits: u32,
}

/// Elementary functions reachable through [`elem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElemKind {
    Sqrt,
    Log,
    Exp,
    Abs,
}

pub fn elem(kind: ElemKind, x: &BigReal) -> Result<BigReal> {
    match kind {
        ElemKind::Sqrt => x.sqrt(),
        ElemKind::Log => x.ln(),
        ElemKind::Exp => Ok(x.exp()),
        ElemKind::Abs => Ok(x.abs()),
    }
}

pub fn with_precision(x: &BigReal, digits: u32) -> BigReal {
    x.with_precision(digits)
}

impl BigReal {
    fn wrap(value: Float, digits: u32) -> Self {
        BigReal { value, digits }
    }

    fn check_digits(digits: u32) -> u32 {
        assert!(digits >= MIN_DIGITS, "precision must be at least {MIN_DIGITS} digits, got {digits}");
        digits
    }

    pub fn zero(digits: u32) -> Self {
        Self::from_i64(0, digits)
    }

    pub fn one(digits: u32) -> Self {
        Self::from_i64(1, digits)
    }

    pub fn from_i64(v: i64, digits: u32) -> Self {
        let d = Self::check_digits(digits);
        Self::wrap(Float::with_val(bits_for(d), v), d)
    }

    /// Converts a double exactly (every finite f64 is representable).
    pub fn from_f64(v: f64, digits: u32) -> Self {
        let d = Self::check_digits(digits);
        Self::wrap(Float::with_val(bits_for(d), v), d)
    }

    pub fn from_ratio(num: i64, den: i64, digits: u32) -> Self {
        Self::from_i64(num, digits) / Self::from_i64(den, digits)
    }

    pub fn from_integer(v: &Integer, digits: u32) -> Self {
        let d = Self::check_digits(digits);
        Self::wrap(Float::with_val(bits_for(d), v), d)
    }

    /// 10^k at the given precision.
    pub fn exp10(k: i32, digits: u32) -> Self {
        let d = Self::check_digits(digits);
        let ten = Float::with_val(bits_for(d), 10);
        Self::wrap(Float::with_val(bits_for(d), ten.pow(k)), d)
    }

    pub fn pi(digits: u32) -> Self {
        let d = Self::check_digits(digits);
        Self::wrap(Float::with_val(bits_for(d), Constant::Pi), d)
    }

    /// Parses decimal text (`-1.25`, `3e-7`, `+0.5E+2`).
    pub fn parse(text: &str, digits: u32) -> Result<Self> {
        let d = Self::check_digits(digits);
        let t = text.trim();
        let valid = !t.is_empty()
            && t.chars().all(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E'))
            && t.chars().any(|c| c.is_ascii_digit());
        if !valid {
            return Err(Error::Domain(format!("not a decimal number: {t:?}")));
        }
        let parsed = Float::parse(t).map_err(|e| Error::Domain(format!("{t:?}: {e}")))?;
        Ok(Self::wrap(Float::with_val(bits_for(d), parsed), d))
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn as_float(&self) -> &Float {
        &self.value
    }

    /// Rounds (or pads with zero bits) to `digits` decimal digits.
    pub fn with_precision(&self, digits: u32) -> Self {
        let d = Self::check_digits(digits);
        Self::wrap(Float::with_val(bits_for(d), &self.value), d)
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.value.is_sign_negative() && !self.value.is_zero() {
            return Err(Error::Domain(format!("sqrt of negative value {}", self.to_sci_string(8))));
        }
        Ok(Self::wrap(self.value.clone().sqrt(), self.digits))
    }

    pub fn ln(&self) -> Result<Self> {
        if self.value.cmp0() != Some(Ordering::Greater) {
            return Err(Error::Domain(format!("log of non-positive value {}", self.to_sci_string(8))));
        }
        Ok(Self::wrap(self.value.clone().ln(), self.digits))
    }

    pub fn exp(&self) -> Self {
        Self::wrap(self.value.clone().exp(), self.digits)
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.value.clone().abs(), self.digits)
    }

    pub fn sin(&self) -> Self {
        Self::wrap(self.value.clone().sin(), self.digits)
    }

    pub fn cos(&self) -> Self {
        Self::wrap(self.value.clone().cos(), self.digits)
    }

    pub fn square(&self) -> Self {
        Self::wrap(self.value.clone().square(), self.digits)
    }

    pub fn recip(&self) -> Self {
        Self::wrap(self.value.clone().recip(), self.digits)
    }

    pub fn powi(&self, k: i32) -> Self {
        Self::wrap(Float::with_val(self.value.prec(), (&self.value).pow(k)), self.digits)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        match self.value.cmp0() {
            Some(Ordering::Less) => -1,
            Some(Ordering::Greater) => 1,
            _ => 0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// Approximate decimal logarithm of |x|, `-inf` for zero.
    pub fn log10_abs(&self) -> f64 {
        if self.value.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (m, e) = self.value.to_f64_exp();
        m.abs().log10() + e as f64 * std::f64::consts::LOG10_2
    }

    /// Nearest integer, ties away from zero.
    pub fn round_to_integer(&self) -> Integer {
        self.value.clone().round().to_integer().unwrap_or_default()
    }

    pub fn max(&self, other: &Self) -> Self {
        if other > self {
            other.clone()
        } else {
            self.clone()
        }
    }

    pub fn min(&self, other: &Self) -> Self {
        if other < self {
            other.clone()
        } else {
            self.clone()
        }
    }

    /// Scientific notation with exactly `sig` significant digits, e.g. `1.50e-3`.
    pub fn to_sci_string(&self, sig: u32) -> String {
        let sig = sig.max(1) as usize;
        let (neg, digits, exp) = self.value.to_sign_string_exp(10, Some(sig));
        let sign = if neg { "-" } else { "" };
        match exp {
            None => {
                let mut s = String::from("0");
                if sig > 1 {
                    s.push('.');
                    s.extend(std::iter::repeat_n('0', sig - 1));
                }
                format!("{sign}{s}e0")
            }
            Some(e) => {
                let mut s = String::new();
                s.push_str(&digits[..1]);
                if digits.len() > 1 {
                    s.push('.');
                    s.push_str(&digits[1..]);
                }
                format!("{sign}{s}e{}", e - 1)
            }
        }
    }

    /// Positional notation with `sig` significant digits when the exponent is
    /// moderate, scientific otherwise.
    pub fn to_plain_string(&self, sig: u32) -> String {
        let sig = sig.max(1) as usize;
        let (neg, digits, exp) = self.value.to_sign_string_exp(10, Some(sig));
        let Some(e) = exp else {
            return "0".to_string();
        };
        if !(-5..=sig as i32).contains(&e) {
            return self.to_sci_string(sig as u32);
        }
        let sign = if neg { "-" } else { "" };
        let body = if e <= 0 {
            format!("0.{}{}", "0".repeat((-e) as usize), digits)
        } else if e as usize >= digits.len() {
            format!("{}{}", digits, "0".repeat(e as usize - digits.len()))
        } else {
            format!("{}.{}", &digits[..e as usize], &digits[e as usize..])
        };
        format!("{sign}{body}")
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci_string(self.digits))
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.to_sci_string(self.digits.min(24)), self.digits)
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

impl PartialEq<f64> for BigReal {
    fn eq(&self, other: &f64) -> bool {
        self.value == *other
    }
}

impl PartialOrd<f64> for BigReal {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.value.partial_cmp(other)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $op:tt) => {
        impl $tr<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &BigReal) -> BigReal {
                let d = self.digits.min(rhs.digits);
                BigReal::wrap(Float::with_val(bits_for(d), &self.value $op &rhs.value), d)
            }
        }
        impl $tr<BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal {
                &self $op &rhs
            }
        }
        impl $tr<&BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &BigReal) -> BigReal {
                &self $op rhs
            }
        }
        impl $tr<BigReal> for &BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal {
                self $op &rhs
            }
        }
        impl $tr<f64> for &BigReal {
            type Output = BigReal;
            fn $m(self, rhs: f64) -> BigReal {
                BigReal::wrap(Float::with_val(self.value.prec(), &self.value $op rhs), self.digits)
            }
        }
        impl $tr<f64> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: f64) -> BigReal {
                &self $op rhs
            }
        }
        impl $atr<&BigReal> for BigReal {
            fn $am(&mut self, rhs: &BigReal) {
                if rhs.digits < self.digits {
                    *self = &*self $op rhs;
                } else {
                    self.value.$am(&rhs.value);
                }
            }
        }
        impl $atr<BigReal> for BigReal {
            fn $am(&mut self, rhs: BigReal) {
                self.$am(&rhs);
            }
        }
        impl $atr<f64> for BigReal {
            fn $am(&mut self, rhs: f64) {
                self.value.$am(rhs);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign, +);
binop!(Sub, sub, SubAssign, sub_assign, -);
binop!(Mul, mul, MulAssign, mul_assign, *);
binop!(Div, div, DivAssign, div_assign, /);

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(-self.value.clone(), self.digits)
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(-self.value, self.digits)
    }
}

/// Deterministic random stream keyed by `(seed, stream)`.
#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Rng { seed, stream, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform double in `[-1, 1)` built from 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        let u = (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        2.0 * u - 1.0
    }

    pub fn next_uniform(&mut self, digits: u32) -> BigReal {
        BigReal::from_f64(self.next_f64(), digits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_to_fewer_digits_keeps_exact_values() {
        let x = BigReal::from_f64(1.5, 100).with_precision(40);
        assert_eq!(x.digits(), 40);
        assert_eq!(x, 1.5);
    }

    #[test]
    fn sqrt_two_squares_back() {
        let x = BigReal::from_i64(2, 40).sqrt().unwrap();
        let err = (x.square() - 2.0).abs();
        assert!(err < BigReal::exp10(-38, 40));
    }

    #[test]
    fn zero_widens() {
        let z = BigReal::zero(40).with_precision(200);
        assert!(z.is_zero());
        assert_eq!(z.digits(), 200);
    }

    #[test]
    fn half_sqrt_three() {
        let y = BigReal::from_i64(3, 40).sqrt().unwrap() / 2.0;
        let two_y = &y * 2.0;
        assert!((two_y.square() - 3.0).abs() < BigReal::exp10(-38, 40));
        assert!(y.to_sci_string(40).starts_with("8.660254037844386467637231707529361834714"));
    }

    #[test]
    fn elementary_functions() {
        assert_eq!(elem(ElemKind::Sqrt, &BigReal::from_i64(4, 30)).unwrap(), 2.0);
        assert!(elem(ElemKind::Log, &BigReal::one(30)).unwrap().is_zero());
        assert!(elem(ElemKind::Sqrt, &BigReal::from_i64(-1, 30)).is_err());
        assert!(elem(ElemKind::Log, &BigReal::zero(30)).is_err());
        assert_eq!(elem(ElemKind::Abs, &BigReal::from_i64(-3, 30)).unwrap(), 3.0);
        let e = elem(ElemKind::Exp, &BigReal::one(30)).unwrap();
        assert!((e.ln().unwrap() - 1.0).abs() < BigReal::exp10(-28, 30));
    }

    #[test]
    fn mixed_precision_takes_the_minimum() {
        let a = BigReal::one(50);
        let b = BigReal::one(20);
        assert_eq!((&a + &b).digits(), 20);
        let mut c = a.clone();
        c *= &b;
        assert_eq!(c.digits(), 20);
    }

    #[test]
    fn text_round_trip() {
        let x = BigReal::from_i64(2, 45).sqrt().unwrap();
        let y = BigReal::parse(&x.to_sci_string(47), 45).unwrap();
        assert_eq!(x, y);
        assert_eq!(BigReal::parse("-1.5e-3", 20).unwrap(), BigReal::from_ratio(-3, 2000, 20));
        assert!(BigReal::parse("1.5x", 20).is_err());
        assert!(BigReal::parse("", 20).is_err());
    }

    #[test]
    fn formatting() {
        assert_eq!(BigReal::from_f64(1.5, 20).to_sci_string(3), "1.50e0");
        assert_eq!(BigReal::from_f64(-0.00125, 20).to_sci_string(2), "-1.3e-3");
        assert_eq!(BigReal::zero(20).to_sci_string(3), "0.00e0");
        assert_eq!(BigReal::from_f64(123.25, 20).to_plain_string(6), "123.250");
        assert_eq!(BigReal::from_f64(0.015625, 20).to_plain_string(3), "0.0156");
    }

    #[test]
    fn rng_is_reproducible_and_bounded() {
        let mut a = Rng::new(7, 3);
        let mut b = Rng::new(7, 3);
        let xs: Vec<f64> = (0..3).map(|_| a.next_f64()).collect();
        let ys: Vec<f64> = (0..3).map(|_| b.next_f64()).collect();
        assert_eq!(xs, ys);
        let mut c = Rng::new(7, 4);
        assert_ne!(xs[0], c.next_f64());
    }

    #[test]
    fn rng_mean_is_centred() {
        let mut r = Rng::new(1, 0);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let u = r.next_uniform(20);
            assert!(u.abs() <= 1.0);
            sum += u.to_f64();
        }
        assert!((sum / n as f64).abs() < 0.02);
    }
}
