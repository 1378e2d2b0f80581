//! Sparse multivariate polynomials over the Gaussian rationals.
//!
//! Variables are addressed by zero-based index; index `j` is printed as
//! `z{j+1}`, so the variables of an `N`-factor word are `z1..zN`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, rational_to_string, ExactComplex, Scalar};

/// Exponent vector ordered graded-lexicographically: lower total degree
/// first, then variables with smaller index lead.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in a fixed number of variables, stored in canonical form
/// (no zero coefficients), so structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, ExactComplex>,
}

/// Ring operation selector for [`MultiPoly::ring_op`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, ExactComplex::one())
    }

    pub fn constant(nvars: usize, c: ExactComplex) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    /// The polynomial `z_{index+1}`.
    pub fn var(nvars: usize, index: usize) -> Result<Self> {
        if index >= nvars {
            return Err(Error::IndexOutOfRange { index, nvars });
        }
        let mut exps = vec![0; nvars];
        exps[index] = 1;
        Ok(Self::monomial(ExactComplex::one(), Monomial(exps)))
    }

    pub fn monomial(coeff: ExactComplex, mono: Monomial) -> Self {
        let nvars = mono.0.len();
        let mut p = Self::zero(nvars);
        if !coeff.is_zero() {
            p.terms.insert(mono, coeff);
        }
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, combining
    /// repeated monomials and dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, ExactComplex)>,
    {
        let mut p = Self::zero(nvars);
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(Error::LengthMismatch { expected: nvars, got: exps.len() });
            }
            p.add_term(Monomial(exps), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, mono: Monomial, c: ExactComplex) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&mono);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(mono, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ExactComplex)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    /// The constant coefficient.
    pub fn constant_term(&self) -> ExactComplex {
        self.terms.get(&Monomial::one(self.nvars)).cloned().unwrap_or_else(ExactComplex::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0.get(var).copied().unwrap_or(0)).max().unwrap_or(0)
    }

    /// Whether `z_{var+1}` occurs in some term.
    pub fn depends_on(&self, var: usize) -> bool {
        self.degree_in(var) > 0
    }

    fn check_same(&self, other: &MultiPoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VarCountMismatch { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }

    pub fn ring_op(op: RingOp, p: &MultiPoly, q: &MultiPoly) -> Result<MultiPoly> {
        match op {
            RingOp::Add => p.checked_add(q),
            RingOp::Sub => p.checked_sub(q),
            RingOp::Mul => p.checked_mul(q),
        }
    }

    pub fn checked_add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_same(other)?;
        let mut out = MultiPoly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &ExactComplex) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// `self + c` for a constant `c`.
    pub fn add_constant(&self, c: &ExactComplex) -> MultiPoly {
        let mut out = self.clone();
        out.add_term(Monomial::one(self.nvars), c.clone());
        out
    }

    /// Formal partial derivative with respect to `z_{var+1}`.
    pub fn diff(&self, var: usize) -> Result<MultiPoly> {
        if var >= self.nvars {
            return Err(Error::IndexOutOfRange { index: var, nvars: self.nvars });
        }
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] = e - 1;
            out.add_term(Monomial(exps), c * &ExactComplex::int(e as i64));
        }
        Ok(out)
    }

    /// Evaluates at `point`, exactly or numerically depending on `S`.
    pub fn eval<S: Scalar>(&self, point: &[S]) -> Result<S> {
        if point.len() != self.nvars {
            return Err(Error::LengthMismatch { expected: self.nvars, got: point.len() });
        }
        // powers[v][e] = point[v]^e, filled lazily up to the max exponent
        let mut powers: Vec<Vec<S>> = point.iter().map(|x| vec![S::one(), x.clone()]).collect();
        for v in 0..self.nvars {
            let deg = self.degree_in(v) as usize;
            while powers[v].len() <= deg {
                let next = powers[v].last().cloned().unwrap() * point[v].clone();
                powers[v].push(next);
            }
        }
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut t = S::from_exact(c);
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t * powers[v][e as usize].clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Replaces `z_{var+1}` by the constant `value`.
    pub fn substitute(&self, var: usize, value: &ExactComplex) -> Result<MultiPoly> {
        if var >= self.nvars {
            return Err(Error::IndexOutOfRange { index: var, nvars: self.nvars });
        }
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            let mut exps = m.0.clone();
            exps[var] = 0;
            let mut coeff = c.clone();
            for _ in 0..e {
                coeff = &coeff * value;
            }
            out.add_term(Monomial(exps), coeff);
        }
        Ok(out)
    }

    /// Re-embeds into `nvars` variables, sending variable `j` to `map[j]`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Result<MultiPoly> {
        if map.len() != self.nvars {
            return Err(Error::LengthMismatch { expected: self.nvars, got: map.len() });
        }
        if let Some(&bad) = map.iter().find(|&&t| t >= nvars) {
            return Err(Error::IndexOutOfRange { index: bad, nvars });
        }
        let mut out = MultiPoly::zero(nvars);
        for (m, c) in &self.terms {
            let mut exps = vec![0; nvars];
            for (j, &e) in m.0.iter().enumerate() {
                exps[map[j]] += e;
            }
            out.add_term(Monomial(exps), c.clone());
        }
        Ok(out)
    }

    /// `p == q` as polynomials; false when the variable counts differ.
    pub fn poly_equal(&self, other: &MultiPoly) -> bool {
        self.nvars == other.nvars && self.terms == other.terms
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    /// Panics on a variable-count mismatch; use [`MultiPoly::checked_add`]
    /// for fallible addition.
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_add(rhs).expect("polynomial variable-count mismatch")
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_sub(rhs).expect("polynomial variable-count mismatch")
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_mul(rhs).expect("polynomial variable-count mismatch")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&ExactComplex::int(-1))
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| if e == 1 { format!("z{}", v + 1) } else { format!("z{}^{}", v + 1, e) })
                .collect();
            let coeff = c.to_string();
            let complex = !c.is_real() && !num::Zero::is_zero(&c.re);
            let body = if vars.is_empty() {
                if complex { format!("({coeff})") } else { coeff }
            } else if c.is_one() {
                vars.join("*")
            } else if (-c.clone()).is_one() {
                format!("-{}", vars.join("*"))
            } else if complex {
                format!("({coeff})*{}", vars.join("*"))
            } else {
                format!("{coeff}*{}", vars.join("*"))
            };
            if i > 0 && !body.starts_with('-') {
                write!(f, "+")?;
            }
            write!(f, "{body}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{}]({})", self.nvars, self)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: Vec<u32>,
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    nvars: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermRepr {
                    exp: m.0.clone(),
                    re: rational_to_string(&c.re),
                    im: rational_to_string(&c.im),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(d)?;
        let terms = repr
            .terms
            .into_iter()
            .map(|t| {
                let re = parse_rational(&t.re)?;
                let im = parse_rational(&t.im)?;
                Ok((t.exp, ExactComplex::new(re, im)))
            })
            .collect::<Result<Vec<_>>>()
            .map_err(de::Error::custom)?;
        MultiPoly::from_terms(repr.nvars, terms).map_err(de::Error::custom)
    }
}
