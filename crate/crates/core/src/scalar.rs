//! Scalars: exact Gaussian rationals and double-precision complex numbers.
//!
//! Both kinds implement [`Scalar`], so matrices, words and Jacobian frames
//! can be written once and evaluated either exactly or numerically.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::complex::Complex64;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Numeric complex scalar.
pub type ApproxComplex = Complex64;

/// Tolerance on `|ad - bc - 1|` for approximate SL2 matrices.
pub const APPROX_DET_TOL: f64 = 1e-10;

/// Field operations shared by exact and approximate scalars.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_exact(v: &ExactComplex) -> Self;
    fn is_zero(&self) -> bool;
    fn checked_div(&self, rhs: &Self) -> Result<Self>;
    fn to_approx(&self) -> ApproxComplex;
    fn is_finite(&self) -> bool;
    /// Whether `det` counts as 1: exactly for exact scalars, within
    /// [`APPROX_DET_TOL`] otherwise.
    fn is_unit_det(det: &Self) -> bool;

    fn inv(&self) -> Result<Self> {
        Self::one().checked_div(self)
    }
}

/// A Gaussian rational `re + im·i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactComplex {
    pub re: Rational,
    pub im: Rational,
}

impl ExactComplex {
    pub fn new(re: Rational, im: Rational) -> Self {
        ExactComplex { re, im }
    }

    pub fn real(re: Rational) -> Self {
        ExactComplex { re, im: Rational::zero() }
    }

    pub fn int(v: i64) -> Self {
        Self::real(Rational::from_integer(BigInt::from(v)))
    }

    /// `num/den` as a real scalar. Panics when `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::real(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `(re_num/re_den) + (im_num/im_den)·i`.
    pub fn gaussian(re: (i64, i64), im: (i64, i64)) -> Self {
        ExactComplex {
            re: Rational::new(BigInt::from(re.0), BigInt::from(re.1)),
            im: Rational::new(BigInt::from(im.0), BigInt::from(im.1)),
        }
    }

    pub fn i() -> Self {
        ExactComplex { re: Rational::zero(), im: Rational::one() }
    }

    pub fn conj(&self) -> Self {
        ExactComplex { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `|z|²`, exact.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

impl fmt::Debug for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Renders `p/q` when the denominator is not 1, `p` otherwise.
fn short_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical serialized form: always `p/q`.
pub fn rational_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p`, `p/q`, or a finite decimal such as `-0.25`, exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        if !fp.chars().all(|c| c.is_ascii_digit()) || !ip.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{ip}{fp}");
        let n: BigInt = if digits.is_empty() { return Err(bad()) } else { digits.parse().map_err(|_| bad())? };
        let d = num::pow(BigInt::from(10), fp.len());
        let r = Rational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Splits `"re+im i"`-style text into real and imaginary parts (either may be
/// absent). Signs inside exponents (`1e-3`) are not treated as separators.
fn split_complex(s: &str) -> Option<(Option<String>, Option<String>)> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i') else {
        return Some((Some(s), None));
    };
    let bytes = body.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        let ch = bytes[idx];
        if (ch == b'+' || ch == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
            split = Some(idx);
            break;
        }
    }
    let (re, im) = match split {
        Some(idx) => (Some(body[..idx].to_string()), body[idx..].to_string()),
        None => (None, body.to_string()),
    };
    let im = match im.as_str() {
        "" | "+" => "1".to_string(),
        "-" => "-1".to_string(),
        other => other.trim_start_matches('+').to_string(),
    };
    Some((re, Some(im)))
}

impl FromStr for ExactComplex {
    type Err = Error;

    /// Accepts `"p/q"`, `"p/q+r/s i"`, `"p/q-r/s i"`, `"r/s i"` and `"i"`.
    fn from_str(s: &str) -> Result<Self> {
        let (re, im) = split_complex(s).ok_or_else(|| Error::Parse("empty scalar".into()))?;
        let re = match re {
            Some(r) => parse_rational(&r)?,
            None => Rational::zero(),
        };
        let im = match im {
            Some(r) => parse_rational(&r)?,
            None => Rational::zero(),
        };
        Ok(ExactComplex { re, im })
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", short_rational(&self.re));
        }
        let im_abs = short_rational(&self.im.abs());
        let sign = if self.im.is_negative() { '-' } else { '+' };
        if self.re.is_zero() {
            let lead = if self.im.is_negative() { "-" } else { "" };
            write!(f, "{lead}{im_abs} i")
        } else {
            write!(f, "{}{sign}{im_abs} i", short_rational(&self.re))
        }
    }
}

/// Parses an approximate complex number in the same textual syntax as
/// [`ExactComplex`], with decimal floats allowed for each part.
pub fn parse_approx(s: &str) -> Result<ApproxComplex> {
    let (re, im) = split_complex(s).ok_or_else(|| Error::Parse("empty scalar".into()))?;
    let part = |p: Option<String>| -> Result<f64> {
        match p {
            None => Ok(0.0),
            Some(t) => match t.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => parse_rational(&t)
                    .map(|r| r.to_f64().unwrap_or(f64::NAN))
                    .map_err(|_| Error::Parse(format!("not a number: {t:?}"))),
            },
        }
    };
    let v = Complex64::new(part(re)?, part(im)?);
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::NonFinite(s.to_string()));
    }
    Ok(v)
}

impl Serialize for ExactComplex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(2)?;
        t.serialize_element(&rational_to_string(&self.re))?;
        t.serialize_element(&rational_to_string(&self.im))?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for ExactComplex {
    /// Accepts the canonical `["p/q", "r/s"]` pair, a `"p/q+r/s i"` string,
    /// or a bare JSON integer.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Pair(String, String),
            Text(String),
            Int(i64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Pair(re, im) => Ok(ExactComplex {
                re: parse_rational(&re).map_err(de::Error::custom)?,
                im: parse_rational(&im).map_err(de::Error::custom)?,
            }),
            Repr::Text(s) => s.parse().map_err(de::Error::custom),
            Repr::Int(v) => Ok(ExactComplex::int(v)),
        }
    }
}

impl Add for ExactComplex {
    type Output = ExactComplex;
    fn add(self, rhs: Self) -> Self {
        ExactComplex { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl<'a> Add<&'a ExactComplex> for &'a ExactComplex {
    type Output = ExactComplex;
    fn add(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for ExactComplex {
    type Output = ExactComplex;
    fn sub(self, rhs: Self) -> Self {
        ExactComplex { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl<'a> Sub<&'a ExactComplex> for &'a ExactComplex {
    type Output = ExactComplex;
    fn sub(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl<'a> Mul<&'a ExactComplex> for &'a ExactComplex {
    type Output = ExactComplex;
    fn mul(self, rhs: &ExactComplex) -> ExactComplex {
        if self.im.is_zero() && rhs.im.is_zero() {
            return ExactComplex::real(&self.re * &rhs.re);
        }
        ExactComplex {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Mul for ExactComplex {
    type Output = ExactComplex;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl Neg for ExactComplex {
    type Output = ExactComplex;
    fn neg(self) -> Self {
        ExactComplex { re: -self.re, im: -self.im }
    }
}

impl Neg for &ExactComplex {
    type Output = ExactComplex;
    fn neg(self) -> ExactComplex {
        ExactComplex { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl From<i64> for ExactComplex {
    fn from(v: i64) -> Self {
        ExactComplex::int(v)
    }
}

impl Scalar for ExactComplex {
    const EXACT: bool = true;

    fn zero() -> Self {
        ExactComplex::int(0)
    }

    fn one() -> Self {
        ExactComplex::int(1)
    }

    fn from_i64(v: i64) -> Self {
        ExactComplex::int(v)
    }

    fn from_exact(v: &ExactComplex) -> Self {
        v.clone()
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if Scalar::is_zero(rhs) {
            return Err(Error::DivisionByZero);
        }
        if rhs.im.is_zero() {
            return Ok(ExactComplex { re: &self.re / &rhs.re, im: &self.im / &rhs.re });
        }
        let n = rhs.norm_sqr();
        let p = self * &rhs.conj();
        Ok(ExactComplex { re: p.re / &n, im: p.im / n })
    }

    fn to_approx(&self) -> ApproxComplex {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn is_unit_det(det: &Self) -> bool {
        det.re.is_one() && det.im.is_zero()
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn from_exact(v: &ExactComplex) -> Self {
        v.to_approx()
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if Scalar::is_zero(rhs) {
            return Err(Error::DivisionByZero);
        }
        let q = self / rhs;
        if !Scalar::is_finite(&q) {
            return Err(Error::NonFinite(format!("{self} / {rhs}")));
        }
        Ok(q)
    }

    fn to_approx(&self) -> ApproxComplex {
        *self
    }

    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    fn is_unit_det(det: &Self) -> bool {
        (det - Complex64::new(1.0, 0.0)).norm() < APPROX_DET_TOL
    }
}

/// JSON form `[re, im]` for approximate scalars.
pub mod approx_pair {
    use super::*;

    pub fn serialize<S: Serializer>(v: &ApproxComplex, s: S) -> std::result::Result<S::Ok, S::Error> {
        [v.re, v.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ApproxComplex, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let cases = [
            ("3", ExactComplex::int(3)),
            ("-1/2", ExactComplex::ratio(-1, 2)),
            ("1/2+3/4 i", ExactComplex::gaussian((1, 2), (3, 4))),
            ("1/2 - 3/4 i", ExactComplex::gaussian((1, 2), (-3, 4))),
            ("2 i", ExactComplex::gaussian((0, 1), (2, 1))),
            ("i", ExactComplex::i()),
            ("-i", -ExactComplex::i()),
            ("0.25", ExactComplex::ratio(1, 4)),
            ("4/8", ExactComplex::ratio(1, 2)),
        ];
        for (text, want) in cases {
            assert_eq!(text.parse::<ExactComplex>().unwrap(), want, "{text}");
        }
        assert!("1/0".parse::<ExactComplex>().is_err());
        assert!("abc".parse::<ExactComplex>().is_err());
        assert!("".parse::<ExactComplex>().is_err());
    }

    #[test]
    fn display_roundtrips() {
        for z in [
            ExactComplex::int(0),
            ExactComplex::gaussian((-7, 3), (5, 2)),
            ExactComplex::gaussian((0, 1), (-1, 1)),
            ExactComplex::gaussian((2, 1), (-1, 9)),
        ] {
            assert_eq!(z.to_string().parse::<ExactComplex>().unwrap(), z);
        }
    }

    #[test]
    fn division() {
        let a = ExactComplex::gaussian((1, 1), (2, 1));
        let b = ExactComplex::gaussian((3, 1), (-1, 1));
        let q = a.checked_div(&b).unwrap();
        assert_eq!(&q * &b, a);
        assert_eq!(a.checked_div(&ExactComplex::zero()), Err(Error::DivisionByZero));
        assert!(Complex64::new(1.0, 0.0).checked_div(&Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn approx_parse() {
        assert_eq!(parse_approx("1.5-2 i").unwrap(), Complex64::new(1.5, -2.0));
        assert_eq!(parse_approx("1e-3").unwrap(), Complex64::new(1e-3, 0.0));
        assert_eq!(parse_approx("1/4+1e-2 i").unwrap(), Complex64::new(0.25, 0.01));
        assert!(parse_approx("inf").is_err());
    }

    #[test]
    fn json_forms() {
        let z = ExactComplex::gaussian((1, 2), (-3, 1));
        let s = serde_json::to_string(&z).unwrap();
        assert_eq!(s, r#"["1/2","-3/1"]"#);
        assert_eq!(serde_json::from_str::<ExactComplex>(&s).unwrap(), z);
        assert_eq!(serde_json::from_str::<ExactComplex>(r#""1/2-3 i""#).unwrap(), z);
        assert_eq!(serde_json::from_str::<ExactComplex>("5").unwrap(), ExactComplex::int(5));
    }
}
