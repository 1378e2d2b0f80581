//! 2×2 matrices over scalars or polynomials, and the unimodular wrapper.

use std::fmt;

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::scalar::{ExactComplex, Scalar};

/// Commutative-ring element usable as a matrix entry.
pub trait RingElem: Clone {
    fn r_add(&self, other: &Self) -> Self;
    fn r_sub(&self, other: &Self) -> Self;
    fn r_mul(&self, other: &Self) -> Self;
}

impl RingElem for ExactComplex {
    fn r_add(&self, other: &Self) -> Self {
        self + other
    }
    fn r_sub(&self, other: &Self) -> Self {
        self - other
    }
    fn r_mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl RingElem for Complex64 {
    fn r_add(&self, other: &Self) -> Self {
        self + other
    }
    fn r_sub(&self, other: &Self) -> Self {
        self - other
    }
    fn r_mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl RingElem for MultiPoly {
    fn r_add(&self, other: &Self) -> Self {
        self + other
    }
    fn r_sub(&self, other: &Self) -> Self {
        self - other
    }
    fn r_mul(&self, other: &Self) -> Self {
        self * other
    }
}

/// `[[a, b], [c, d]]`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Mat2<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: RingElem> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn mul(&self, rhs: &Mat2<T>) -> Mat2<T> {
        Mat2 {
            a: self.a.r_mul(&rhs.a).r_add(&self.b.r_mul(&rhs.c)),
            b: self.a.r_mul(&rhs.b).r_add(&self.b.r_mul(&rhs.d)),
            c: self.c.r_mul(&rhs.a).r_add(&self.d.r_mul(&rhs.c)),
            d: self.c.r_mul(&rhs.b).r_add(&self.d.r_mul(&rhs.d)),
        }
    }

    pub fn det(&self) -> T {
        self.a.r_mul(&self.d).r_sub(&self.b.r_mul(&self.c))
    }

    pub fn entries(&self) -> [&T; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Mat2<U> {
        Mat2 { a: f(&self.a), b: f(&self.b), c: f(&self.c), d: f(&self.d) }
    }

    pub fn try_map<U>(&self, mut f: impl FnMut(&T) -> Result<U>) -> Result<Mat2<U>> {
        Ok(Mat2 { a: f(&self.a)?, b: f(&self.b)?, c: f(&self.c)?, d: f(&self.d)? })
    }
}

impl<S: Scalar + RingElem> Mat2<S> {
    pub fn identity() -> Self {
        Mat2 { a: S::one(), b: S::zero(), c: S::zero(), d: S::one() }
    }

    /// Max-modulus entrywise distance.
    pub fn max_abs_diff(&self, other: &Mat2<S>) -> f64 {
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(x, y)| (x.to_approx() - y.to_approx()).norm())
            .fold(0.0, f64::max)
    }
}

impl<T: fmt::Display> fmt::Display for Mat2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl<T: fmt::Debug> fmt::Debug for Mat2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{:?}, {:?}], [{:?}, {:?}]]", self.a, self.b, self.c, self.d)
    }
}

/// A matrix with determinant 1: exactly for exact scalars, within
/// [`crate::scalar::APPROX_DET_TOL`] for approximate ones.
#[derive(Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SL2<S>(Mat2<S>);

impl<S: Scalar + RingElem> SL2<S> {
    pub fn new(a: S, b: S, c: S, d: S) -> Result<Self> {
        Self::from_mat(Mat2 { a, b, c, d })
    }

    pub fn from_mat(m: Mat2<S>) -> Result<Self> {
        if m.entries().iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("{m}")));
        }
        let det = m.det();
        if !S::is_unit_det(&det) {
            return Err(Error::NotUnimodular { det: det.to_string() });
        }
        Ok(SL2(m))
    }

    pub fn identity() -> Self {
        SL2(Mat2::identity())
    }

    /// Integer entries; panics if the determinant is not 1.
    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(S::from_i64(a), S::from_i64(b), S::from_i64(c), S::from_i64(d))
            .expect("integer matrix with determinant 1")
    }

    pub fn mat(&self) -> &Mat2<S> {
        &self.0
    }

    pub fn into_mat(self) -> Mat2<S> {
        self.0
    }

    pub fn a(&self) -> &S {
        &self.0.a
    }
    pub fn b(&self) -> &S {
        &self.0.b
    }
    pub fn c(&self) -> &S {
        &self.0.c
    }
    pub fn d(&self) -> &S {
        &self.0.d
    }

    pub fn mul(&self, rhs: &SL2<S>) -> SL2<S> {
        SL2(self.0.mul(&rhs.0))
    }

    /// `[[d, -b], [-c, a]]`.
    pub fn inverse(&self) -> SL2<S> {
        let m = &self.0;
        SL2(Mat2 { a: m.d.clone(), b: -m.b.clone(), c: -m.c.clone(), d: m.a.clone() })
    }

    pub fn is_identity(&self) -> bool {
        self.0 == Mat2::identity()
    }

    pub fn to_approx(&self) -> SL2<Complex64> {
        SL2(self.0.map(|x| x.to_approx()))
    }
}

impl<'de, S> Deserialize<'de> for SL2<S>
where
    S: Scalar + RingElem + Deserialize<'de>,
{
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = Mat2::<S>::deserialize(d)?;
        SL2::from_mat(m).map_err(serde::de::Error::custom)
    }
}

impl<S: fmt::Display> fmt::Display for SL2<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl<S: fmt::Debug> fmt::Debug for SL2<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SL2{:?}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_checks() {
        assert!(SL2::<ExactComplex>::new(2.into(), 3.into(), 1.into(), 2.into()).is_ok());
        let err = SL2::<ExactComplex>::new(2.into(), 0.into(), 0.into(), 2.into()).unwrap_err();
        assert_eq!(err.code(), "NOT_UNIMODULAR");
        let c = |x: f64| Complex64::new(x, 0.0);
        assert!(SL2::new(c(2.0), c(0.0), c(0.0), c(0.5 + 1e-12)).is_ok());
        assert!(SL2::new(c(2.0), c(0.0), c(0.0), c(0.5 + 1e-9)).is_err());
        assert!(SL2::new(c(f64::NAN), c(0.0), c(0.0), c(1.0)).is_err());
    }

    #[test]
    fn inverse_and_json() {
        let m = SL2::<ExactComplex>::from_ints(2, 3, 1, 2);
        assert!(m.mul(&m.inverse()).is_identity());
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"a":["2/1","0/1"],"b":["3/1","0/1"],"c":["1/1","0/1"],"d":["2/1","0/1"]}"#);
        let back: SL2<ExactComplex> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"a":"2","b":"0","c":"0","d":"2"}"#;
        assert!(serde_json::from_str::<SL2<ExactComplex>>(bad).is_err());
        let approx = m.to_approx();
        assert_eq!(serde_json::to_string(&approx).unwrap(), r#"{"a":[2.0,0.0],"b":[3.0,0.0],"c":[1.0,0.0],"d":[2.0,0.0]}"#);
    }
}
