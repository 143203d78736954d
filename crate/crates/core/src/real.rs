//! High-precision scalars and exact rationals.
//!
//! [`Real`] is a binary floating-point number with an explicit mantissa
//! precision (default 80 bits). Every constructor takes the precision so that
//! low-precision integer literals never leak into a computation. Binary
//! operations inherit the larger of the two operand precisions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{EvtError, Result};

type Float = FBig<HalfEven, 2>;

/// Default mantissa precision in bits.
pub const DEFAULT_PRECISION: usize = 80;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Real(Float);

fn ibig(v: &BigInt) -> IBig {
    IBig::from_str(&v.to_string()).expect("BigInt decimal form parses as IBig")
}

impl Real {
    pub fn zero(precision: usize) -> Self {
        Real(Float::ZERO.with_precision(precision).value())
    }

    pub fn one(precision: usize) -> Self {
        Real(Float::ONE.with_precision(precision).value())
    }

    pub fn from_i64(v: i64, precision: usize) -> Self {
        Real(Float::from(IBig::from(v)).with_precision(precision).value())
    }

    /// Exact conversion of an `f64`, then rounding to `precision`.
    pub fn from_f64(v: f64, precision: usize) -> Self {
        assert!(v.is_finite(), "Real::from_f64 needs a finite value, got {v}");
        let f = Float::try_from(v).expect("finite f64 converts");
        Real(f.with_precision(precision).value())
    }

    pub fn from_rational(v: &BigRational, precision: usize) -> Self {
        let num = Float::from(ibig(v.numer())).with_precision(precision).value();
        let den = Float::from(ibig(v.denom())).with_precision(precision).value();
        Real(num / den)
    }

    /// `2^exp` at the given precision.
    pub fn pow2(exp: isize, precision: usize) -> Self {
        Real(
            Float::from_parts(IBig::ONE, exp)
                .with_precision(precision)
                .value(),
        )
    }

    pub fn precision(&self) -> usize {
        self.0.precision()
    }

    pub fn with_precision(&self, precision: usize) -> Self {
        Real(self.0.clone().with_precision(precision).value())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    pub fn is_zero(&self) -> bool {
        self.0 == Float::ZERO
    }

    pub fn is_negative(&self) -> bool {
        self.0 < Float::ZERO
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn floor(&self) -> Self {
        Real(self.0.floor().with_precision(self.precision()).value())
    }

    /// Integer part as `i64` (floor).
    pub fn floor_i64(&self) -> i64 {
        self.to_f64().floor() as i64
    }

    /// Reduction into `[0, 1)`.
    pub fn mod_one(&self) -> Self {
        let p = self.precision();
        let r = self - &self.floor();
        if r.0 >= Float::ONE {
            Real::zero(p)
        } else {
            r.with_precision(p)
        }
    }

    pub fn exp(&self) -> Self {
        Real(self.0.exp())
    }

    pub fn ln(&self) -> Result<Self> {
        if !(self.0 > Float::ZERO) {
            return Err(EvtError::invalid("logarithm of a non-positive value"));
        }
        Ok(Real(self.0.ln()))
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.is_negative() {
            return Err(EvtError::invalid("square root of a negative value"));
        }
        Ok(Real(self.0.sqrt()))
    }

    /// `self^e` for a positive base.
    pub fn powr(&self, e: &Real) -> Result<Self> {
        if self.is_zero() {
            return Ok(Real::zero(self.precision()));
        }
        Ok((&self.ln()? * e).exp())
    }

    pub fn min(a: &Real, b: &Real) -> Real {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn max(a: &Real, b: &Real) -> Real {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// Decimal rendering with `digits` significant decimal digits.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let dec = self
            .0
            .clone()
            .with_base_and_precision::<10>(digits.max(1))
            .value();
        let repr = dec.repr();
        decimal_from_parts(repr.significand(), repr.exponent())
    }
}

fn decimal_from_parts(sig: &IBig, exp: isize) -> String {
    let neg = *sig < IBig::ZERO;
    let digits = if neg { (-sig).to_string() } else { sig.to_string() };
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if exp >= 0 {
        out.push_str(&digits);
        out.extend(std::iter::repeat('0').take(exp as usize));
        return out;
    }
    let shift = (-exp) as usize;
    if digits.len() > shift {
        let (int, frac) = digits.split_at(digits.len() - shift);
        out.push_str(int);
        let frac = frac.trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
    } else {
        out.push_str("0.");
        out.extend(std::iter::repeat('0').take(shift - digits.len()));
        out.push_str(digits.trim_end_matches('0'));
    }
    out
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self.to_decimal_string(24))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string(30))
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                Real($trait::$method(self.0, rhs.0))
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real($trait::$method(self.0, &rhs.0))
            }
        }
    };
}

real_binop!(Add, add);
real_binop!(Sub, sub);
real_binop!(Mul, mul);
real_binop!(Div, div);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0.clone())
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

/// Parses `"a/b"`, decimal (`"-0.125"`, `"1e-3"`) or integer strings exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || EvtError::invalid(format!("cannot parse '{s}' as an exact number"));
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(EvtError::invalid(format!("zero denominator in '{s}'")));
        }
        return Ok(n / d);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10u8);
    let mut value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

/// Exact rational value of a finite `f64`.
pub fn rational_from_f64(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| EvtError::invalid(format!("non-finite value {v}")))
}

pub fn rational_to_f64(v: &BigRational) -> f64 {
    v.to_f64().unwrap_or_else(|| {
        // Very large numerators/denominators: go through high precision.
        Real::from_rational(v, 64).to_f64()
    })
}

/// Display form `"p/q"` (or `"p"` for integers).
pub fn rational_string(v: &BigRational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// `base^exp` for a possibly negative integer exponent.
pub fn rational_powi(base: &BigRational, exp: i64) -> BigRational {
    let mut acc = BigRational::one();
    let mut b = if exp < 0 { base.recip() } else { base.clone() };
    let mut e = exp.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    acc
}

/// A point of the phase space: its exact rational value when known, and a
/// high-precision approximation that is always present.
#[derive(Clone, Debug, PartialEq)]
pub struct Position {
    exact: Option<BigRational>,
    value: Real,
}

impl Position {
    pub fn exact(v: BigRational, precision: usize) -> Self {
        let value = Real::from_rational(&v, precision);
        Position { exact: Some(v), value }
    }

    pub fn approx(value: Real) -> Self {
        Position { exact: None, value }
    }

    /// Parses a rational (`"1/31"`, `"0.25"`) or `"sqrt(a)/b"`.
    pub fn parse(s: &str, precision: usize) -> Result<Self> {
        let t = s.trim();
        if let Some(rest) = t.strip_prefix("sqrt(") {
            let (arg, tail) = rest
                .split_once(')')
                .ok_or_else(|| EvtError::invalid(format!("unbalanced sqrt in '{s}'")))?;
            let root = Real::from_rational(&parse_rational(arg)?, precision + 16).sqrt()?;
            let tail = tail.trim();
            let value = match tail.strip_prefix('/') {
                Some(d) => &root / &Real::from_rational(&parse_rational(d)?, precision + 16),
                None if tail.is_empty() => root,
                None => return Err(EvtError::invalid(format!("cannot parse position '{s}'"))),
            };
            return Ok(Position::approx(value.with_precision(precision)));
        }
        Ok(Position::exact(parse_rational(t)?, precision))
    }

    pub fn exact_value(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    pub fn value(&self) -> &Real {
        &self.value
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn precision(&self) -> usize {
        self.value.precision()
    }

    pub fn with_precision(&self, precision: usize) -> Self {
        match &self.exact {
            Some(v) => Position::exact(v.clone(), precision),
            None => Position::approx(self.value.with_precision(precision)),
        }
    }

    pub fn to_decimal_string(&self, digits: usize) -> String {
        match &self.exact {
            Some(v) if v.denom().is_one() => v.numer().to_string(),
            _ => self.value.to_decimal_string(digits),
        }
    }
}

/// Compares `a` and `b` within an absolute tolerance.
pub fn approx_cmp(a: &Real, b: &Real, tol: &Real) -> Ordering {
    let d = a - b;
    if d.abs() <= *tol {
        Ordering::Equal
    } else if d.is_negative() {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/31").unwrap(), BigRational::new(1.into(), 31.into()));
        assert_eq!(parse_rational("0.125").unwrap(), BigRational::new(1.into(), 8.into()));
        assert_eq!(parse_rational("-2.5e-1").unwrap(), BigRational::new((-1).into(), 4.into()));
        assert_eq!(parse_rational("3").unwrap(), BigRational::from_integer(3.into()));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn rational_conversion_keeps_precision() {
        let third = Real::from_rational(&BigRational::new(1.into(), 3.into()), 80);
        assert_eq!(third.precision(), 80);
        assert!((third.to_f64() - 1.0 / 3.0).abs() < 1e-17);
    }

    #[test]
    fn sqrt_two_over_sixteen() {
        let two = Real::from_i64(2, 128);
        let z = two.sqrt().unwrap() / Real::from_i64(16, 128);
        assert_eq!(z.to_decimal_string(20), "0.08838834764831844055");
    }

    #[test]
    fn mod_one_wraps_negatives() {
        let x = Real::from_f64(-0.25, 80).mod_one();
        assert_eq!(x.to_f64(), 0.75);
        let y = Real::from_f64(3.5, 80).mod_one();
        assert_eq!(y.to_f64(), 0.5);
    }

    #[test]
    fn exp_and_ln_round_trip() {
        let u = Real::from_f64(25.0, 120);
        let back = -(u.clone().neg().exp().ln().unwrap());
        assert!((&back - &u).abs() < Real::pow2(-100, 120));
    }

    #[test]
    fn powi_handles_negative_exponent() {
        let two = BigRational::from_integer(2.into());
        assert_eq!(rational_powi(&two, -5), BigRational::new(1.into(), 32.into()));
        assert_eq!(rational_powi(&two, 0), BigRational::one());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(Real::from_f64(0.5, 80).to_decimal_string(10), "0.5");
        assert_eq!(Real::from_f64(12.0, 80).to_decimal_string(10), "12");
        assert_eq!(Real::from_f64(-0.001, 80).to_decimal_string(3), "-0.001");
    }
}
