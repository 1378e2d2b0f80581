use elemfac::obstruction::{sample_loop, winding_number};
use elemfac::spray::{vfield_apply, VectorFieldSpec};
use elemfac::{Execution, ExactComplex, MultiPoly, Rational, Side, Word, SL2};
use num::complex::Complex64;
use num::BigInt;
use proptest::prelude::*;

type Ex = ExactComplex;

fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=12).prop_map(|(p, q)| Rational::new(BigInt::from(p), BigInt::from(q)))
}

fn exact() -> impl Strategy<Value = Ex> {
    (rational(), rational()).prop_map(|(re, im)| Ex::new(re, im))
}

fn poly(nvars: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((prop::collection::vec(0u32..3, nvars), exact()), 0..5)
        .prop_map(move |terms| MultiPoly::from_terms(nvars, terms).unwrap())
}

fn side() -> impl Strategy<Value = Side> {
    prop_oneof![Just(Side::Lower), Just(Side::Upper)]
}

fn word(max_len: usize) -> impl Strategy<Value = Word<Ex>> {
    (side(), prop::collection::vec(exact(), 0..=max_len)).prop_map(|(s, e)| Word::alternating(s, e))
}

fn sl2() -> impl Strategy<Value = SL2<Ex>> {
    word(5).prop_map(|w| w.product().unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(p in poly(3), q in poly(3), r in poly(3)) {
        prop_assert_eq!(p.checked_add(&q).unwrap(), q.checked_add(&p).unwrap());
        prop_assert_eq!(p.checked_mul(&q).unwrap(), q.checked_mul(&p).unwrap());
        let left = p.checked_mul(&q).unwrap().checked_mul(&r).unwrap();
        let right = p.checked_mul(&q.checked_mul(&r).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let dist = p.checked_mul(&q.checked_add(&r).unwrap()).unwrap();
        let expanded = p.checked_mul(&q).unwrap().checked_add(&p.checked_mul(&r).unwrap()).unwrap();
        prop_assert_eq!(dist, expanded);
        prop_assert!(p.checked_sub(&p).unwrap().is_zero());
        prop_assert_eq!(p.checked_mul(&MultiPoly::one(3)).unwrap(), p.clone());
    }

    #[test]
    fn derivatives_commute_and_obey_leibniz(p in poly(3), q in poly(3), i in 0usize..3, j in 0usize..3) {
        prop_assert_eq!(p.diff(i).unwrap().diff(j).unwrap(), p.diff(j).unwrap().diff(i).unwrap());
        let lhs = p.checked_mul(&q).unwrap().diff(i).unwrap();
        let rhs = p.diff(i).unwrap().checked_mul(&q).unwrap()
            .checked_add(&p.checked_mul(&q.diff(i).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(p in poly(3), q in poly(3), x in prop::collection::vec(exact(), 3)) {
        let (pv, qv) = (p.eval(&x).unwrap(), q.eval(&x).unwrap());
        prop_assert_eq!(p.checked_add(&q).unwrap().eval(&x).unwrap(), &pv + &qv);
        prop_assert_eq!(p.checked_mul(&q).unwrap().eval(&x).unwrap(), &pv * &qv);
    }

    #[test]
    fn word_products_respect_concatenation_and_inverse(a in word(6), b in word(6)) {
        let ab = a.concat(&b).product().unwrap();
        prop_assert_eq!(ab, a.product().unwrap().mul(&b.product().unwrap()));
        let inv = a.inverse().product().unwrap();
        prop_assert!(inv.mul(&a.product().unwrap()).is_identity());
        prop_assert_eq!(inv, a.product().unwrap().inverse());
    }

    #[test]
    fn vector_fields_are_antisymmetric(q in poly(6), k in 1usize..=3, dl in 1usize..=2) {
        let l = 1 + (k - 1 + dl) % 3;
        let kl = vfield_apply(&VectorFieldSpec::generic(5, k, l).unwrap(), &q).unwrap();
        let lk = vfield_apply(&VectorFieldSpec::generic(5, l, k).unwrap(), &q).unwrap();
        prop_assert!(kl.checked_add(&lk).unwrap().is_zero());
    }

    #[test]
    fn degrees_add_under_products(a in -5i64..=5, b in -5i64..=5, s in 0.0f64..1.0) {
        let f = move |t: f64| Complex64::from_polar(2.0 + t.cos() * s, a as f64 * t);
        let g = move |t: f64| Complex64::from_polar(3.0 + t.sin(), b as f64 * t);
        let fg = move |t: f64| f(t) * g(t);
        let deg = |h: &(dyn Fn(f64) -> Complex64 + Sync + Send)| {
            winding_number(&sample_loop(&h, 512, Execution::Sequential).unwrap()).unwrap()
        };
        prop_assert_eq!(deg(&f), a);
        prop_assert_eq!(deg(&g), b);
        prop_assert_eq!(deg(&fg), a + b);
    }

    #[test]
    fn json_round_trips(x in exact(), m in sl2(), w in word(5), p in poly(3)) {
        let back: Ex = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        prop_assert_eq!(back, x);
        let back: SL2<Ex> = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        prop_assert_eq!(back, m);
        let back: Word<Ex> = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
        prop_assert_eq!(back, w);
        let back: MultiPoly = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn exact_text_round_trips(x in exact()) {
        let back: Ex = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }
}
