use crate::error::{Error, Result};
use crate::word::{ElementaryFactor, FactorEntry, Word};

/// Lengthens an alternating word by two without changing its product, so
/// that the interior coordinates contain the constant `-1`.
///
/// `M(g1) M'(g2) ... ↦ M(g1 + 1) M'(0) M(-1) M'(g2) ...`, using
/// `M(g1 + 1) M(-1) = M(g1)`.
pub fn pad_avoid_singular<E: FactorEntry>(w: &Word<E>) -> Result<Word<E>> {
    let Some(first) = w.factors().first() else {
        return Err(Error::Precondition("cannot pad an empty word".into()));
    };
    if let Some(position) = w.first_non_alternating() {
        return Err(Error::NonAlternating { position });
    }
    let side = first.side;
    let mut out = Vec::with_capacity(w.len() + 2);
    out.push(ElementaryFactor::new(side, first.entry.shifted(1)));
    out.push(ElementaryFactor::new(side.opposite(), first.entry.constant_like(0)));
    out.push(ElementaryFactor::new(side, first.entry.constant_like(-1)));
    out.extend(w.factors()[1..].iter().cloned());
    Ok(Word::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ExactComplex;
    use crate::word::Side;

    fn ex(v: i64) -> ExactComplex {
        ExactComplex::int(v)
    }

    #[test]
    fn examples() {
        let w = Word::alternating(Side::Upper, [ex(3), ex(2)]);
        let p = pad_avoid_singular(&w).unwrap();
        assert_eq!(p, Word::alternating(Side::Upper, [ex(4), ex(0), ex(-1), ex(2)]));
        assert_eq!(p.product().unwrap(), w.product().unwrap());

        let w = Word::alternating(Side::Lower, [ex(0)]);
        let p = pad_avoid_singular(&w).unwrap();
        assert_eq!(p, Word::alternating(Side::Lower, [ex(1), ex(0), ex(-1)]));
        assert!(p.product().unwrap().is_identity());

        assert!(pad_avoid_singular(&Word::<ExactComplex>::empty()).is_err());
        let bad = Word::new(vec![ElementaryFactor::upper(ex(1)), ElementaryFactor::upper(ex(2))]);
        assert!(matches!(pad_avoid_singular(&bad), Err(Error::NonAlternating { position: 1 })));
    }
}
