//! Double-double complex arithmetic for residual checks whose plain `f64`
//! evaluation would be dominated by cancellation between large
//! intermediates.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num::complex::Complex64;

use crate::word::{Side, Word};

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

impl Dd {
    pub fn from_f64(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, y: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, y.hi);
        quick_two_sum(s, e + self.lo + y.lo)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, y: Dd) -> Dd {
        self + (-y)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, y: Dd) -> Dd {
        let p = self.hi * y.hi;
        let e = self.hi.mul_add(y.hi, -p);
        quick_two_sum(p, e + self.hi * y.lo + self.lo * y.hi)
    }
}

impl Div for Dd {
    type Output = Dd;
    /// Long division with three correction steps.
    fn div(self, y: Dd) -> Dd {
        let q1 = self.hi / y.hi;
        let r = self - y * Dd::from_f64(q1);
        let q2 = r.hi / y.hi;
        let r = r - y * Dd::from_f64(q2);
        let q3 = r.hi / y.hi;
        quick_two_sum(q1, q2) + Dd::from_f64(q3)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub fn from_c64(c: Complex64) -> Self {
        DdComplex { re: Dd::from_f64(c.re), im: Dd::from_f64(c.im) }
    }

    pub fn one() -> Self {
        Self::from_c64(Complex64::new(1.0, 0.0))
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for DdComplex {
    type Output = DdComplex;
    fn add(self, y: DdComplex) -> DdComplex {
        DdComplex { re: self.re + y.re, im: self.im + y.im }
    }
}

impl Sub for DdComplex {
    type Output = DdComplex;
    fn sub(self, y: DdComplex) -> DdComplex {
        DdComplex { re: self.re - y.re, im: self.im - y.im }
    }
}

impl Neg for DdComplex {
    type Output = DdComplex;
    fn neg(self) -> DdComplex {
        DdComplex { re: -self.re, im: -self.im }
    }
}

impl Mul for DdComplex {
    type Output = DdComplex;
    fn mul(self, y: DdComplex) -> DdComplex {
        DdComplex { re: self.re * y.re - self.im * y.im, im: self.re * y.im + self.im * y.re }
    }
}

impl Div for DdComplex {
    type Output = DdComplex;
    fn div(self, y: DdComplex) -> DdComplex {
        let den = y.re * y.re + y.im * y.im;
        let num = self * DdComplex { re: y.re, im: -y.im };
        DdComplex { re: num.re / den, im: num.im / den }
    }
}

/// A 2×2 matrix in double-double precision.
pub type DdMat = [DdComplex; 4];

pub fn dd_identity() -> DdMat {
    [DdComplex::one(), DdComplex::default(), DdComplex::default(), DdComplex::one()]
}

/// `m · M(g)` for an elementary factor.
pub fn mul_elementary(m: &DdMat, side: Side, g: Complex64) -> DdMat {
    let g = DdComplex::from_c64(g);
    let [a, b, c, d] = *m;
    match side {
        Side::Upper => [a, a * g + b, c, c * g + d],
        Side::Lower => [a + b * g, b, c + d * g, d],
    }
}

pub fn mul(x: &DdMat, y: &DdMat) -> DdMat {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

/// Product of a word with `f64` entries, evaluated in double-double.
pub fn word_product(w: &Word<Complex64>) -> DdMat {
    w.factors().iter().fold(dd_identity(), |m, f| mul_elementary(&m, f.side, f.entry))
}

/// Max modulus of the entrywise difference, rounded to `f64`.
pub fn max_abs_diff(x: &DdMat, y: &DdMat) -> f64 {
    x.iter().zip(y).map(|(p, q)| (*p - *q).to_c64().norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_bits() {
        let big = Dd::from_f64(1e16);
        let s = (big + Dd::from_f64(1.0)) - big;
        assert_eq!(s.to_f64(), 1.0);
        let third = Dd::from_f64(1.0 / 3.0);
        let p = third * Dd::from_f64(3.0) - Dd::from_f64(1.0);
        assert!(p.to_f64().abs() < 1e-30 || p.to_f64().abs() <= f64::EPSILON / 2.0);
        let q = Dd::from_f64(1.0) / Dd::from_f64(3.0);
        assert!((q * Dd::from_f64(3.0) - Dd::from_f64(1.0)).to_f64().abs() < 1e-31);
        let a = DdComplex::from_c64(Complex64::new(1.0, 2.0));
        let b = DdComplex::from_c64(Complex64::new(-3.0, 0.5));
        assert!(((a / b) * b - a).to_c64().norm() < 1e-30);
    }

    #[test]
    fn elementary_products() {
        let g = Complex64::new(0.5, -2.0);
        let m = mul_elementary(&dd_identity(), Side::Upper, g);
        assert_eq!(m[1].to_c64(), g);
        let m = mul_elementary(&m, Side::Upper, -g);
        assert_eq!(max_abs_diff(&m, &dd_identity()), 0.0);
        let w = Word::alternating(Side::Lower, [g, -g]);
        let direct = mul(&mul_elementary(&dd_identity(), Side::Lower, g), &mul_elementary(&dd_identity(), Side::Upper, -g));
        assert_eq!(max_abs_diff(&word_product(&w), &direct), 0.0);
    }
}
