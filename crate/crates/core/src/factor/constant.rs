use crate::error::{Error, Result};
use crate::matrix::SL2;
use crate::scalar::{ExactComplex, Scalar};
use crate::word::{ElementaryFactor, Side, Word};

use super::Factorization;

type ExactFactorization = Factorization<ExactComplex, SL2<ExactComplex>>;

fn checked(word: Word<ExactComplex>, target: &SL2<ExactComplex>) -> Result<ExactFactorization> {
    let verified = word.product()? == *target;
    Ok(Factorization::new(word, target.clone(), verified, None))
}

fn one() -> ExactComplex {
    ExactComplex::int(1)
}

/// Factors a constant matrix into at most four elementary factors.
///
/// Branches, in order: identity (empty word); a single `L` or `U`;
/// `c != 0`: `U((a-1)/c) L(c) U((d-1)/c)`; `b != 0`: `L((d-1)/b) U(b) L((a-1)/b)`;
/// diagonal: `U(a-1) L(1) U(1/a - 1) L(-a)`. Three-factor words keep zero
/// entries so that the pattern stays fixed.
pub fn factor_constant(m: &SL2<ExactComplex>) -> Result<ExactFactorization> {
    let (a, b, c, d) = (m.a(), m.b(), m.c(), m.d());
    let word = if m.is_identity() {
        Word::empty()
    } else if a.is_one() && d.is_one() && Scalar::is_zero(b) {
        Word::new(vec![ElementaryFactor::lower(c.clone())])
    } else if a.is_one() && d.is_one() && Scalar::is_zero(c) {
        Word::new(vec![ElementaryFactor::upper(b.clone())])
    } else if !Scalar::is_zero(c) {
        Word::alternating(Side::Upper, [(a - &one()).checked_div(c)?, c.clone(), (d - &one()).checked_div(c)?])
    } else if !Scalar::is_zero(b) {
        Word::alternating(Side::Lower, [(d - &one()).checked_div(b)?, b.clone(), (a - &one()).checked_div(b)?])
    } else {
        Word::alternating(Side::Upper, [a - &one(), one(), &a.inv()? - &one(), -a])
    };
    checked(word, m)
}

/// A three-factor word `M(x) M'(y) M(t)` with the given first side, if one
/// exists. `U L U` needs `c != 0` or `a = d = 1`; `L U L` needs `b != 0` or
/// `a = d = 1`.
pub fn factor_three_pattern(m: &SL2<ExactComplex>, first: Side) -> Option<Word<ExactComplex>> {
    let (a, b, c, d) = (m.a(), m.b(), m.c(), m.d());
    // For U L U the middle entry is c; for L U L it is b.
    let (mid, edge) = match first {
        Side::Upper => (c, b),
        Side::Lower => (b, c),
    };
    let entries = if !Scalar::is_zero(mid) {
        let x = (a - &one()).checked_div(mid).ok()?;
        let t = (d - &one()).checked_div(mid).ok()?;
        match first {
            Side::Upper => [x, mid.clone(), t],
            Side::Lower => [t, mid.clone(), x],
        }
    } else if a.is_one() && d.is_one() {
        [edge.clone(), ExactComplex::int(0), ExactComplex::int(0)]
    } else {
        return None;
    };
    let word = Word::alternating(first, entries);
    (word.product().ok()? == *m).then_some(word)
}

/// `L(c-1) U(0) L(1) U(b)` for a target with `a = 1`.
pub fn factor_unit_corner(m: &SL2<ExactComplex>) -> Result<ExactFactorization> {
    if !m.a().is_one() {
        return Err(Error::Precondition(format!("unit-corner factorization needs a = 1, got {}", m.a())));
    }
    let word = Word::alternating(Side::Lower, [m.c() - &one(), ExactComplex::int(0), one(), m.b().clone()]);
    checked(word, m)
}

/// `L((c-1)/a) U(a-1) L(1) U(1/a - 1)` for the target `[[a, 0], [c, 1/a]]`.
pub fn factor_offdiag_zero(a: &ExactComplex, c: &ExactComplex) -> Result<ExactFactorization> {
    if Scalar::is_zero(a) {
        return Err(Error::Precondition("off-diagonal factorization needs a != 0".into()));
    }
    let a_inv = a.inv()?;
    let target = SL2::new(a.clone(), ExactComplex::int(0), c.clone(), a_inv.clone())?;
    let word = Word::alternating(Side::Lower, [&a_inv * &(c - &one()), a - &one(), one(), &a_inv - &one()]);
    checked(word, &target)
}
