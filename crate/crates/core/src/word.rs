//! Elementary factors, words, and the product map Φ_N.
//!
//! `L(g) = [[1, 0], [g, 1]]` and `U(g) = [[1, g], [0, 1]]`. A [`PhiTemplate`]
//! with `first = Lower` is the alternating word `L(z1) U(z2) L(z3) ...`; the
//! variables `z1..zN` are polynomial indices `0..N-1`.

use std::fmt;
use std::sync::Arc;

use num::complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{Mat2, RingElem, SL2};
use crate::poly::MultiPoly;
use crate::scalar::{ExactComplex, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "L")]
    Lower,
    #[serde(rename = "U")]
    Upper,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Lower => Side::Upper,
            Side::Upper => Side::Lower,
        }
    }

    /// The elementary matrix with this side and entry `g`.
    pub fn matrix<T: RingElem>(self, g: T, zero: T, one: T) -> Mat2<T> {
        match self {
            Side::Lower => Mat2::new(one.clone(), zero, g, one),
            Side::Upper => Mat2::new(one.clone(), g, zero, one),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lower => "L",
            Side::Upper => "U",
        })
    }
}

/// Entry operations needed to invert and pad words.
pub trait FactorEntry: Clone {
    fn negated(&self) -> Self;
    /// `self + by`.
    fn shifted(&self, by: i64) -> Self;
    /// The constant `v`, of the same kind (and variable count) as `self`.
    fn constant_like(&self, v: i64) -> Self;
}

impl FactorEntry for ExactComplex {
    fn negated(&self) -> Self {
        -self
    }
    fn shifted(&self, by: i64) -> Self {
        self + &ExactComplex::int(by)
    }
    fn constant_like(&self, v: i64) -> Self {
        ExactComplex::int(v)
    }
}

impl FactorEntry for Complex64 {
    fn negated(&self) -> Self {
        -self
    }
    fn shifted(&self, by: i64) -> Self {
        self + by as f64
    }
    fn constant_like(&self, v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
}

impl FactorEntry for MultiPoly {
    fn negated(&self) -> Self {
        -self
    }
    fn shifted(&self, by: i64) -> Self {
        self.add_constant(&ExactComplex::int(by))
    }
    fn constant_like(&self, v: i64) -> Self {
        MultiPoly::constant(self.nvars(), ExactComplex::int(v))
    }
}

type EntryFn = dyn Fn(Complex64, Complex64) -> Complex64 + Send + Sync;

/// A named numeric function of `(z, w)`, used for entire or continuous
/// entries that have no polynomial form. Only approximate evaluation is
/// available.
#[derive(Clone)]
pub struct FunctionHandle {
    name: String,
    f: Arc<EntryFn>,
}

impl FunctionHandle {
    pub fn new(name: impl Into<String>, f: impl Fn(Complex64, Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        FunctionHandle { name: name.into(), f: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn call(&self, z: Complex64, w: Complex64) -> Complex64 {
        (self.f)(z, w)
    }
}

impl fmt::Debug for FunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fn:{}", self.name)
    }
}

impl PartialEq for FunctionHandle {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl Serialize for FunctionHandle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name)
    }
}

impl<'de> Deserialize<'de> for FunctionHandle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        crate::factor::cohn::builtin(&name)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown builtin function {name:?}")))
    }
}

impl FactorEntry for FunctionHandle {
    fn negated(&self) -> Self {
        let f = self.f.clone();
        FunctionHandle { name: format!("-({})", self.name), f: Arc::new(move |z, w| -f(z, w)) }
    }
    fn shifted(&self, by: i64) -> Self {
        let f = self.f.clone();
        FunctionHandle { name: format!("({})+{by}", self.name), f: Arc::new(move |z, w| f(z, w) + by as f64) }
    }
    fn constant_like(&self, v: i64) -> Self {
        FunctionHandle::new(v.to_string(), move |_, _| Complex64::new(v as f64, 0.0))
    }
}

/// Evaluation of a factor entry at a point, producing a scalar of kind `S`.
pub trait EntryEval<S> {
    fn eval_entry(&self, point: &[S]) -> Result<S>;
}

impl EntryEval<ExactComplex> for ExactComplex {
    fn eval_entry(&self, _point: &[ExactComplex]) -> Result<ExactComplex> {
        Ok(self.clone())
    }
}

impl EntryEval<Complex64> for ExactComplex {
    fn eval_entry(&self, _point: &[Complex64]) -> Result<Complex64> {
        Ok(self.to_approx())
    }
}

impl EntryEval<Complex64> for Complex64 {
    fn eval_entry(&self, _point: &[Complex64]) -> Result<Complex64> {
        Ok(*self)
    }
}

impl<S: Scalar> EntryEval<S> for MultiPoly {
    fn eval_entry(&self, point: &[S]) -> Result<S> {
        self.eval(point)
    }
}

impl EntryEval<Complex64> for FunctionHandle {
    fn eval_entry(&self, point: &[Complex64]) -> Result<Complex64> {
        let [z, w] = point else {
            return Err(Error::NonEvaluable(format!("{} needs a (z, w) point, got {} values", self.name, point.len())));
        };
        let v = self.call(*z, *w);
        if !Scalar::is_finite(&v) {
            return Err(Error::NonFinite(format!("{} at ({z}, {w})", self.name)));
        }
        Ok(v)
    }
}

/// One elementary factor `L(entry)` or `U(entry)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementaryFactor<E> {
    pub side: Side,
    pub entry: E,
}

impl<E> ElementaryFactor<E> {
    pub fn new(side: Side, entry: E) -> Self {
        ElementaryFactor { side, entry }
    }
    pub fn lower(entry: E) -> Self {
        Self::new(Side::Lower, entry)
    }
    pub fn upper(entry: E) -> Self {
        Self::new(Side::Upper, entry)
    }
}

impl<S: Scalar + RingElem> ElementaryFactor<S> {
    pub fn matrix(&self) -> Mat2<S> {
        self.side.matrix(self.entry.clone(), S::zero(), S::one())
    }
}

impl<E: fmt::Display> fmt::Display for ElementaryFactor<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.side, self.entry)
    }
}

/// A finite product of elementary factors, left to right. The empty word is
/// the identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word<E> {
    factors: Vec<ElementaryFactor<E>>,
}

impl<E> Default for Word<E> {
    fn default() -> Self {
        Word { factors: Vec::new() }
    }
}

impl<E> FromIterator<ElementaryFactor<E>> for Word<E> {
    fn from_iter<I: IntoIterator<Item = ElementaryFactor<E>>>(iter: I) -> Self {
        Word { factors: iter.into_iter().collect() }
    }
}

impl<E> Word<E> {
    pub fn new(factors: Vec<ElementaryFactor<E>>) -> Self {
        Word { factors }
    }

    pub fn empty() -> Self {
        Word::default()
    }

    /// Alternating word starting with `first`, entries in order.
    pub fn alternating(first: Side, entries: impl IntoIterator<Item = E>) -> Self {
        let mut side = first;
        entries
            .into_iter()
            .map(|e| {
                let f = ElementaryFactor::new(side, e);
                side = side.opposite();
                f
            })
            .collect()
    }

    pub fn factors(&self) -> &[ElementaryFactor<E>] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn push(&mut self, f: ElementaryFactor<E>) {
        self.factors.push(f);
    }

    pub fn entries(&self) -> impl Iterator<Item = &E> {
        self.factors.iter().map(|f| &f.entry)
    }

    /// First position whose side repeats its predecessor's, if any.
    pub fn first_non_alternating(&self) -> Option<usize> {
        self.factors.windows(2).position(|w| w[0].side == w[1].side).map(|p| p + 1)
    }

    pub fn is_alternating(&self) -> bool {
        self.first_non_alternating().is_none()
    }

    pub fn first_side(&self) -> Option<Side> {
        self.factors.first().map(|f| f.side)
    }

    pub fn map_entries<F, T>(&self, mut f: F) -> Word<T>
    where
        F: FnMut(&E) -> T,
    {
        self.factors.iter().map(|x| ElementaryFactor::new(x.side, f(&x.entry))).collect()
    }

    pub fn try_map_entries<F, T>(&self, mut f: F) -> Result<Word<T>>
    where
        F: FnMut(&E) -> Result<T>,
    {
        self.factors.iter().map(|x| Ok(ElementaryFactor::new(x.side, f(&x.entry)?))).collect()
    }
}

impl<E: Clone> Word<E> {
    /// `self` followed by `other`.
    pub fn concat(&self, other: &Word<E>) -> Word<E> {
        self.factors.iter().chain(other.factors.iter()).cloned().collect()
    }
}

impl<E: FactorEntry> Word<E> {
    /// Reversed order, negated entries: `(L(a)U(b))⁻¹ = U(-b)L(-a)`.
    pub fn inverse(&self) -> Word<E> {
        self.factors
            .iter()
            .rev()
            .map(|f| ElementaryFactor::new(f.side, f.entry.negated()))
            .collect()
    }
}

impl<S: Scalar + RingElem> Word<S> {
    /// The left-to-right product without a determinant check.
    pub fn matrix(&self) -> Mat2<S> {
        self.factors.iter().fold(Mat2::identity(), |acc, f| acc.mul(&f.matrix()))
    }

    /// The product as an SL2 element. In approximate mode a determinant off
    /// by more than the tolerance is reported as `NotUnimodular`.
    pub fn product(&self) -> Result<SL2<S>> {
        SL2::from_mat(self.matrix())
    }
}

impl<E> Word<E> {
    /// Evaluates every entry at `point` and multiplies out.
    pub fn eval<S>(&self, point: &[S]) -> Result<SL2<S>>
    where
        E: EntryEval<S>,
        S: Scalar + RingElem,
    {
        self.eval_entries(point)?.product()
    }

    pub fn eval_entries<S>(&self, point: &[S]) -> Result<Word<S>>
    where
        E: EntryEval<S>,
    {
        self.try_map_entries(|e| e.eval_entry(point))
    }
}

impl Word<MultiPoly> {
    /// Symbolic product. All entries must share one variable count.
    pub fn expand(&self, nvars: usize) -> Result<Mat2<MultiPoly>> {
        let one = MultiPoly::one(nvars);
        let zero = MultiPoly::zero(nvars);
        let mut acc = Mat2::new(one.clone(), zero.clone(), zero.clone(), one.clone());
        for f in &self.factors {
            if f.entry.nvars() != nvars {
                return Err(Error::VarCountMismatch { left: nvars, right: f.entry.nvars() });
            }
            acc = acc.mul(&f.side.matrix(f.entry.clone(), zero.clone(), one.clone()));
        }
        Ok(acc)
    }
}

impl<E: fmt::Display> fmt::Display for Word<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "I");
        }
        for x in &self.factors {
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// The alternating pattern of Φ_N: `N` factors starting with `first`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiTemplate {
    n: usize,
    first: Side,
}

impl PhiTemplate {
    pub fn new(n: usize, first: Side) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidLength { n, reason: "a product map needs at least one factor" });
        }
        Ok(PhiTemplate { n, first })
    }

    /// `L(z1) U(z2) ...`, the convention of Φ_N.
    pub fn lower_first(n: usize) -> Result<Self> {
        Self::new(n, Side::Lower)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn first(&self) -> Side {
        self.first
    }

    /// Side of the factor carrying `z_{index+1}`.
    pub fn side_at(&self, index: usize) -> Side {
        if index % 2 == 0 {
            self.first
        } else {
            self.first.opposite()
        }
    }

    /// The word `M1(z1)...MN(zN)` with polynomial entries.
    pub fn symbolic_word(&self) -> Word<MultiPoly> {
        (0..self.n)
            .map(|j| ElementaryFactor::new(self.side_at(j), MultiPoly::var(self.n, j).expect("index < n")))
            .collect()
    }

    /// The word with numeric entries taken from `point`.
    pub fn word_at<S: Clone>(&self, point: &[S]) -> Result<Word<S>> {
        if point.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: point.len() });
        }
        Ok(Word::alternating(self.first, point.iter().cloned()))
    }

    /// Φ_N at `point`.
    pub fn eval<S: Scalar + RingElem>(&self, point: &[S]) -> Result<SL2<S>> {
        self.word_at(point)?.product()
    }
}

fn var(n: usize, j: usize) -> MultiPoly {
    MultiPoly::var(n, j).expect("index < n")
}

/// `Q · M_s(z_s) · M_t(z_t)` for two consecutive alternating factors, written
/// out entrywise.
fn append_pair(q: &Mat2<MultiPoly>, n: usize, s_idx: usize, t_idx: usize, s_side: Side) -> Mat2<MultiPoly> {
    let s = var(n, s_idx);
    let t = var(n, t_idx);
    let one_st = (&s * &t).add_constant(&ExactComplex::int(1));
    match s_side {
        // U(s) L(t) = [[1+st, s], [t, 1]]
        Side::Upper => Mat2::new(
            &(&one_st * &q.a) + &(&t * &q.b),
            &(&s * &q.a) + &q.b,
            &(&one_st * &q.c) + &(&t * &q.d),
            &(&s * &q.c) + &q.d,
        ),
        // L(s) U(t) = [[1, t], [s, 1+st]]
        Side::Lower => Mat2::new(
            &q.a + &(&s * &q.b),
            &(&t * &q.a) + &(&one_st * &q.b),
            &q.c + &(&s * &q.d),
            &(&t * &q.c) + &(&one_st * &q.d),
        ),
    }
}

/// `M(x) · Q` for one elementary factor on the left.
fn left_mul(side: Side, x: &MultiPoly, q: &Mat2<MultiPoly>) -> Mat2<MultiPoly> {
    match side {
        Side::Lower => Mat2::new(q.a.clone(), q.b.clone(), &q.c + &(x * &q.a), &q.d + &(x * &q.b)),
        Side::Upper => Mat2::new(&q.a + &(x * &q.c), &q.b + &(x * &q.d), q.c.clone(), q.d.clone()),
    }
}

/// `Q · M(y)` for one elementary factor on the right.
fn right_mul(q: &Mat2<MultiPoly>, side: Side, y: &MultiPoly) -> Mat2<MultiPoly> {
    match side {
        Side::Upper => Mat2::new(q.a.clone(), &q.b + &(y * &q.a), q.c.clone(), &q.d + &(y * &q.c)),
        Side::Lower => Mat2::new(&q.a + &(y * &q.b), q.b.clone(), &q.c + &(y * &q.d), q.d.clone()),
    }
}

/// Product of the interior factors `M2(z2)...M_{N-1}(z_{N-1})` of `t`, built
/// two factors at a time from the `N-2` (or `N-3`) case.
pub fn middle_product(t: &PhiTemplate) -> Mat2<MultiPoly> {
    let n = t.n();
    let one = MultiPoly::one(n);
    let zero = MultiPoly::zero(n);
    if n <= 2 {
        return Mat2::new(one.clone(), zero.clone(), zero, one);
    }
    let interior = n - 2;
    let (mut q, mut next) = if interior % 2 == 0 {
        (Mat2::new(one.clone(), zero.clone(), zero, one), 1)
    } else {
        (t.side_at(1).matrix(var(n, 1), zero, one), 2)
    };
    while next < n - 2 {
        q = append_pair(&q, n, next, next + 1, t.side_at(next));
        next += 2;
    }
    q
}

/// The middle polynomials `(Q1, Q2, Q3, Q4)` of the lower-first Φ_N, as a
/// matrix of polynomials in `N` variables (only `z2..z_{N-1}` occur).
pub fn middle_q(n: usize) -> Result<Mat2<MultiPoly>> {
    if n < 4 {
        return Err(Error::InvalidLength { n, reason: "middle polynomials need N >= 4" });
    }
    Ok(middle_product(&PhiTemplate::lower_first(n)?))
}

/// All four entries of Φ_N for template `t`, via the boundary formula
/// `M1(z1) · Q · MN(zN)`.
pub fn expand_phi(t: &PhiTemplate) -> Mat2<MultiPoly> {
    let n = t.n();
    if n == 1 {
        return t.side_at(0).matrix(var(1, 0), MultiPoly::zero(1), MultiPoly::one(1));
    }
    let q = middle_product(t);
    let left = left_mul(t.side_at(0), &var(n, 0), &q);
    right_mul(&left, t.side_at(n - 1), &var(n, n - 1))
}

/// Whether `point` lies in S_N = {(z1, 0, ..., 0, zN)}.
pub fn in_singular_set<S: Scalar>(point: &[S], n: usize) -> Result<bool> {
    if n < 4 {
        return Err(Error::InvalidLength { n, reason: "the singular set is defined for N >= 4" });
    }
    if point.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: point.len() });
    }
    Ok(point[1..n - 1].iter().all(Scalar::is_zero))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(v: i64) -> ExactComplex {
        ExactComplex::int(v)
    }

    #[test]
    fn empty_word_is_identity() {
        assert!(Word::<ExactComplex>::empty().product().unwrap().is_identity());
    }

    #[test]
    fn small_products() {
        let w = Word::new(vec![
            ElementaryFactor::lower(ex(0)),
            ElementaryFactor::upper(ex(1)),
            ElementaryFactor::lower(ex(1)),
            ElementaryFactor::upper(ex(1)),
        ]);
        assert_eq!(w.product().unwrap(), SL2::from_ints(2, 3, 1, 2));

        // Upper-first 4-factor word at h3 = 1, (h1, h2, h4) = (0, -2, 2).
        let w = Word::alternating(Side::Upper, [ex(0), ex(-2), ex(1), ex(2)]);
        assert_eq!(w.product().unwrap(), SL2::from_ints(3, 1, -4, -1));
    }

    #[test]
    fn inverses() {
        let w = Word::new(vec![ElementaryFactor::lower(ex(5))]);
        assert_eq!(w.inverse(), Word::new(vec![ElementaryFactor::lower(ex(-5))]));
        assert!(Word::<ExactComplex>::empty().inverse().is_empty());
        let sym = PhiTemplate::lower_first(3).unwrap().symbolic_word();
        let inv = sym.inverse();
        let expected: Word<MultiPoly> = Word::new(vec![
            ElementaryFactor::lower(-&var(3, 2)),
            ElementaryFactor::upper(-&var(3, 1)),
            ElementaryFactor::lower(-&var(3, 0)),
        ]);
        assert_eq!(inv, expected);
        let prod = sym.concat(&inv).expand(3).unwrap();
        assert_eq!(prod, Mat2::new(MultiPoly::one(3), MultiPoly::zero(3), MultiPoly::zero(3), MultiPoly::one(3)));
    }

    #[test]
    fn middle_polys_small_n() {
        let q4 = middle_q(4).unwrap();
        assert_eq!(q4.a.to_string(), "1+z2*z3");
        assert_eq!(q4.b.to_string(), "z2");
        let q5 = middle_q(5).unwrap();
        assert_eq!(q5.b.to_string(), "z2+z4+z2*z3*z4");
        assert!(middle_q(3).is_err());
    }

    #[test]
    fn phi_small_n() {
        let p1 = expand_phi(&PhiTemplate::lower_first(1).unwrap());
        assert_eq!(p1, Mat2::new(MultiPoly::one(1), MultiPoly::zero(1), var(1, 0), MultiPoly::one(1)));
        let p2 = expand_phi(&PhiTemplate::lower_first(2).unwrap());
        assert_eq!(p2.b, var(2, 1));
        assert_eq!(p2.c, var(2, 0));
        assert_eq!(p2.d.to_string(), "1+z1*z2");
    }

    #[test]
    fn singular_set_membership() {
        assert!(in_singular_set(&[ex(5), ex(0), ex(0), ex(7)], 4).unwrap());
        assert!(!in_singular_set(&[ex(0), ex(1), ex(0), ex(0)], 4).unwrap());
        assert!(!in_singular_set(&[ex(0), ex(0), ex(-1), ex(0), ex(0), ex(0)], 6).unwrap());
        assert!(in_singular_set(&[ex(0), ex(0), ex(0)], 4).is_err());
    }

    #[test]
    fn alternation() {
        let w = Word::new(vec![ElementaryFactor::lower(ex(1)), ElementaryFactor::lower(ex(2))]);
        assert_eq!(w.first_non_alternating(), Some(1));
        assert!(Word::alternating(Side::Upper, [ex(1), ex(2), ex(3)]).is_alternating());
    }

    #[test]
    fn function_entries_eval() {
        let h = FunctionHandle::new("zw", |z, w| z * w);
        let word = Word::new(vec![ElementaryFactor::upper(h.clone()), ElementaryFactor::lower(h.negated())]);
        let m = word
            .eval(&[Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)])
            .unwrap();
        assert_eq!(*m.a(), Complex64::new(-3.0, 0.0));
        assert!(word.eval(&[Complex64::new(1.0, 0.0)]).is_err());
    }
}
