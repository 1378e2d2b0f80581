//! Factorizations of the matrix `C(z, w) = [[1+zw, z²], [-w², 1-zw]]`.
//!
//! Five holomorphic factors always suffice; four factors are possible over
//! `zw != 1` for any nonvanishing choice of the third entry.

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::compensated::{self, DdComplex, DdMat};
use crate::error::{Error, Result};
use crate::matrix::{Mat2, RingElem, SL2};
use crate::par::{map_indices, Execution};
use crate::scalar::Scalar;
use crate::word::{FactorEntry, FunctionHandle, Side, Word};

use super::Factorization;

/// Residual ceiling for numeric Cohn factorizations.
pub const COHN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohnTarget<S> {
    pub z: S,
    pub w: S,
}

impl<S: Scalar + RingElem> CohnTarget<S> {
    pub fn new(z: S, w: S) -> Self {
        CohnTarget { z, w }
    }

    pub fn matrix(&self) -> Mat2<S> {
        let zw = self.z.clone() * self.w.clone();
        Mat2::new(
            S::one() + zw.clone(),
            self.z.clone() * self.z.clone(),
            -(self.w.clone() * self.w.clone()),
            S::one() - zw,
        )
    }
}

pub fn cohn_eval<S: Scalar + RingElem>(z: &S, w: &S) -> Result<SL2<S>> {
    SL2::from_mat(CohnTarget::new(z.clone(), w.clone()).matrix())
}

/// `φ(u) = (e^u - 1 - u)/u²`, entire with `φ(0) = 1/2`. The Taylor series
/// `Σ u^k/(k+2)!` is summed to convergence for `|u| < 1`, where the closed
/// form loses digits to cancellation.
pub fn phi_series(u: Complex64) -> Complex64 {
    if u.norm() >= 1.0 {
        return (u.exp() - 1.0 - u) / (u * u);
    }
    let mut term = Complex64::new(0.5, 0.0);
    let mut sum = term;
    for k in 1..40 {
        term = term * u / (k + 2) as f64;
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// Which second entry to use. `PrintedH2` takes `(1 - w²) e^{-zw}`, which
/// does not clear the lower-left entry; it exists to exercise the residual
/// check.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HoloVariant {
    #[default]
    Derived,
    PrintedH2,
}

fn h1(z: Complex64, w: Complex64) -> Complex64 {
    z * z * phi_series(z * w)
}

/// `-(1 + w²) e^{-zw}`.
fn h2(z: Complex64, w: Complex64) -> Complex64 {
    -(1.0 + w * w) * (-z * w).exp()
}

/// `(1 - w²) e^{-zw}`.
fn h2_printed(z: Complex64, w: Complex64) -> Complex64 {
    (1.0 - w * w) * (-z * w).exp()
}

fn h3(z: Complex64, w: Complex64) -> Complex64 {
    exp_m1(z * w)
}

/// `e^u - 1`, via `u + u² φ(u)` near zero.
fn exp_m1(u: Complex64) -> Complex64 {
    if u.norm() < 1.0 {
        u + u * u * phi_series(u)
    } else {
        u.exp() - 1.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CohnHolo {
    #[serde(with = "crate::scalar::approx_pair")]
    pub z: Complex64,
    #[serde(with = "crate::scalar::approx_pair")]
    pub w: Complex64,
    /// Largest relative gap between peeled entries and their closed forms.
    pub formula_gap: f64,
    pub factorization: Factorization<Complex64, SL2<Complex64>>,
}

/// `C(z, w)` in double-double precision.
fn cohn_dd(z: Complex64, w: Complex64) -> DdMat {
    let (z, w) = (DdComplex::from_c64(z), DdComplex::from_c64(w));
    let zw = z * w;
    [DdComplex::one() + zw, z * z, -(w * w), DdComplex::one() - zw]
}

/// Max tolerated relative gap between a peeled entry and its closed form.
pub const FORMULA_TOL: f64 = 1e-8;

/// `U(h1) L(h2) U(h3) L(h4) U(H2)` at `(z, w)`.
///
/// `h1 = z² φ(zw)` is evaluated in closed form; the remaining entries are
/// obtained by peeling factors off `C(z, w)` in double-double, each against
/// the already rounded previous entries: `h2` sets the lower-left entry to 1,
/// `h3` the upper-left, `h4` clears the lower-left, and `H2` is what is left.
/// In exact arithmetic this gives `h2 = -(1 + w²) e^{-zw}`, `h3 = e^{zw} - 1`
/// and `h4 = 1`; the largest relative gap to those closed forms is reported
/// as `formula_gap`. Evaluating the closed forms directly would leave errors
/// of order `|w|² ulp(h1)` that the large `|h2|` near `Re(zw) = -8` amplifies
/// past `1e-10`.
///
/// [`HoloVariant::PrintedH2`] instead takes `h2 = (1 - w²) e^{-zw}`,
/// `h3 = e^{zw} - 1`, `h4 = 1` verbatim and only peels `H2`.
pub fn cohn_holo_5_variant(z: Complex64, w: Complex64, variant: HoloVariant) -> Result<CohnHolo> {
    let target = cohn_eval(&z, &w)?;
    let c_dd = cohn_dd(z, w);
    let one = DdComplex::one();
    let e1 = h1(z, w);
    let m1 = left_elementary(Side::Upper, -e1, &c_dd);
    let (e2, e3, e4, m4) = match variant {
        HoloVariant::Derived => {
            let e2 = ((m1[2] - one) / m1[0]).to_c64();
            let m2 = left_elementary(Side::Lower, -e2, &m1);
            let e3 = ((m2[0] - one) / m2[2]).to_c64();
            let m3 = left_elementary(Side::Upper, -e3, &m2);
            let e4 = (m3[2] / m3[0]).to_c64();
            (e2, e3, e4, left_elementary(Side::Lower, -e4, &m3))
        }
        HoloVariant::PrintedH2 => {
            let (e2, e3, e4) = (h2_printed(z, w), h3(z, w), Complex64::new(1.0, 0.0));
            let m = left_elementary(Side::Lower, -e2, &m1);
            let m = left_elementary(Side::Upper, -e3, &m);
            (e2, e3, e4, left_elementary(Side::Lower, -e4, &m))
        }
    };
    let big_h2 = m4[1].to_c64();
    let gap = |got: Complex64, want: Complex64| (got - want).norm() / want.norm().max(1.0);
    let formula_gap = gap(e2, h2(z, w)).max(gap(e3, h3(z, w))).max(gap(e4, Complex64::new(1.0, 0.0)));
    let word = Word::alternating(Side::Upper, [e1, e2, e3, e4, big_h2]);
    let residual = compensated::max_abs_diff(&compensated::word_product(&word), &c_dd);
    let verified = residual.is_finite() && residual < COHN_TOL && formula_gap < FORMULA_TOL;
    Ok(CohnHolo { z, w, formula_gap, factorization: Factorization::new(word, target, verified, Some(residual)) })
}

/// `M(g) · m` in double-double.
fn left_elementary(side: Side, g: Complex64, m: &DdMat) -> DdMat {
    let e = compensated::mul_elementary(&compensated::dd_identity(), side, g);
    compensated::mul(&e, m)
}

/// The five-factor holomorphic factorization, failing with `COHN_RESIDUAL`
/// when the product misses `C(z, w)` by `1e-10` or more, or when the entries
/// drift from their closed forms.
pub fn cohn_holo_5(z: Complex64, w: Complex64) -> Result<CohnHolo> {
    let r = cohn_holo_5_variant(z, w, HoloVariant::Derived)?;
    if !r.factorization.verified {
        return Err(Error::Verification {
            code: "COHN_RESIDUAL",
            detail: format!(
                "residual {:e}, formula gap {:e} at z = {z}, w = {w}",
                r.factorization.residual.unwrap_or(f64::NAN),
                r.formula_gap
            ),
        });
    }
    Ok(r)
}

/// The five-factor word with named function entries.
pub fn cohn_holo_word() -> Word<FunctionHandle> {
    Word::alternating(
        Side::Upper,
        ["cohn.h1", "cohn.h2", "cohn.h3", "cohn.h4", "cohn.H2"].map(|n| builtin(n).expect("registered")),
    )
}

fn peeled(z: Complex64, w: Complex64, i: usize) -> Complex64 {
    cohn_holo_5_variant(z, w, HoloVariant::Derived)
        .map(|r| r.factorization.word.factors()[i].entry)
        .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
}

/// Looks up a named entry function. Besides the Cohn entries this accepts
/// integer constants and the `-(f)` / `(f)+k` forms produced by negating and
/// shifting handles.
pub fn builtin(name: &str) -> Option<FunctionHandle> {
    let h = |f: fn(Complex64, Complex64) -> Complex64| Some(FunctionHandle::new(name, f));
    match name {
        "cohn.h1" => return h(h1),
        "cohn.h2" => return h(|z, w| peeled(z, w, 1)),
        "cohn.h3" => return h(|z, w| peeled(z, w, 2)),
        "cohn.h4" => return h(|z, w| peeled(z, w, 3)),
        "cohn.H2" => return h(|z, w| peeled(z, w, 4)),
        _ => {}
    }
    if let Ok(v) = name.parse::<i64>() {
        return Some(FunctionHandle::new(name, move |_, _| Complex64::new(v as f64, 0.0)));
    }
    if let Some(inner) = name.strip_prefix("-(").and_then(|s| s.strip_suffix(')')) {
        return builtin(inner).map(|f| f.negated());
    }
    if let Some(rest) = name.strip_prefix('(') {
        let (inner, shift) = rest.rsplit_once(")+")?;
        let shift: i64 = shift.parse().ok()?;
        return builtin(inner).map(|f| f.shifted(shift));
    }
    None
}

/// Four-factor family `U(h1) L(h2) U(h3) L(h4)` with `h3` free:
/// `h2 = -zw/h3`, `h1 = (z² - h3)/(1 - zw)`, `h4 = (-w² - h2)/(1 - zw)`.
pub fn cohn_family_4<S: Scalar + RingElem>(z: &S, w: &S, h3: &S) -> Result<Factorization<S, SL2<S>>> {
    let zw = z.clone() * w.clone();
    let denom = S::one() - zw.clone();
    if denom.is_zero() {
        return Err(Error::Precondition("four-factor family needs zw != 1".into()));
    }
    if h3.is_zero() {
        return Err(Error::Precondition("four-factor family needs h3 != 0".into()));
    }
    let h2 = (-zw).checked_div(h3)?;
    let h1 = (z.clone() * z.clone() - h3.clone()).checked_div(&denom)?;
    let h4 = (-(w.clone() * w.clone()) - h2.clone()).checked_div(&denom)?;
    let target = cohn_eval(z, w)?;
    let word = Word::alternating(Side::Upper, [h1, h2, h3.clone(), h4]);
    let product = word.matrix();
    let (verified, residual) = if S::EXACT {
        (product == *target.mat(), None)
    } else {
        let r = product.max_abs_diff(target.mat());
        (r < COHN_TOL, Some(r))
    };
    Ok(Factorization::new(word, target, verified, residual))
}

/// Residuals (left minus right) of the four relations a four-factor solution
/// must satisfy: `h2 h3 = -zw`, `(1-zw) h1 + h3 = z²`, `h2 + (1-zw) h4 = -w²`,
/// `h1 h2 + (1-zw) h1 h4 + h3 h4 = zw`.
pub fn cohn_relations<S: Scalar>(z: &S, w: &S, h: &[S; 4]) -> [S; 4] {
    let [h1, h2, h3, h4] = h.clone();
    let zw = z.clone() * w.clone();
    let m = S::one() - zw.clone();
    [
        h2.clone() * h3.clone() + zw.clone(),
        m.clone() * h1.clone() + h3.clone() - z.clone() * z.clone(),
        h2.clone() + m.clone() * h4.clone() + w.clone() * w.clone(),
        h1.clone() * h2 + m * h1 * h4.clone() + h3 * h4 - zw,
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridReport {
    pub points: usize,
    pub max_residual: f64,
    /// Largest gap between peeled entries and their closed forms.
    pub max_formula_gap: f64,
    #[serde(with = "crate::scalar::approx_pair")]
    pub worst_z: Complex64,
    #[serde(with = "crate::scalar::approx_pair")]
    pub worst_w: Complex64,
}

/// How grid points pair up into `(z, w)` arguments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridPairing {
    /// For each lattice point `p`: `(p, p)`, `(p, p̄)`, `(p, 0)` and `(0, p)`.
    /// Both variables sweep the whole square and `w = 0` is a full line.
    Sweeps,
    /// Every pair of lattice points (`m⁴` pairs).
    Product,
}

fn lattice(m: usize, radius: f64) -> Vec<Complex64> {
    let coord = |k: usize| -radius + 2.0 * radius * k as f64 / (m - 1) as f64;
    (0..m * m).map(|k| Complex64::new(coord(k % m), coord(k / m))).collect()
}

/// Max residual of the five-factor word over an `m × m` lattice on the square
/// `|Re|, |Im| <= radius`. Odd `m` puts `0` on the lattice.
///
/// With [`GridPairing::Product`] the residual grows like `1e-16 · e^{-2 Re(zw)}`
/// since the entries reach `|e^{-zw}|`; past `Re(zw) ≈ -5.5` that exceeds
/// `1e-10` whatever the evaluation order.
pub fn holo_grid_residual(
    m: usize,
    radius: f64,
    pairing: GridPairing,
    variant: HoloVariant,
    exec: Execution,
) -> Result<GridReport> {
    if m < 2 {
        return Err(Error::Precondition("grid needs at least 2 points per axis".into()));
    }
    let lattice = lattice(m, radius);
    let zero = Complex64::new(0.0, 0.0);
    let worst_of = |pairs: &mut dyn Iterator<Item = (Complex64, Complex64)>| -> Result<(f64, f64, Complex64, Complex64)> {
        let mut worst = (0.0, 0.0, zero, zero);
        for (z, w) in pairs {
            let h = cohn_holo_5_variant(z, w, variant)?;
            let r = h.factorization.residual.unwrap_or(f64::NAN);
            worst.1 = f64::max(worst.1, h.formula_gap);
            if !(r <= worst.0) {
                worst = (r, worst.1, z, w);
            }
        }
        Ok(worst)
    };
    let (rows, points) = match pairing {
        GridPairing::Sweeps => {
            let rows = map_indices(lattice.len(), exec, |i| {
                let p = lattice[i];
                worst_of(&mut [(p, p), (p, p.conj()), (p, zero), (zero, p)].into_iter())
            });
            (rows, 4 * lattice.len())
        }
        GridPairing::Product => {
            let rows = map_indices(lattice.len(), exec, |i| {
                let z = lattice[i];
                worst_of(&mut lattice.iter().map(|&w| (z, w)))
            });
            (rows, lattice.len() * lattice.len())
        }
    };
    let mut report = GridReport { points, max_residual: 0.0, max_formula_gap: 0.0, worst_z: zero, worst_w: zero };
    for row in rows {
        let (r, gap, z, w) = row?;
        report.max_formula_gap = report.max_formula_gap.max(gap);
        if !(r <= report.max_residual) {
            report.max_residual = r;
            report.worst_z = z;
            report.worst_w = w;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ExactComplex;
    use crate::word::EntryEval;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cohn_matrix_examples() {
        let ex = ExactComplex::int;
        assert!(cohn_eval(&ex(0), &ex(0)).unwrap().is_identity());
        assert_eq!(cohn_eval(&ex(1), &ex(1)).unwrap(), SL2::from_ints(2, 1, -1, 0));
        assert_eq!(cohn_eval(&ex(1), &ex(2)).unwrap(), SL2::from_ints(3, 1, -4, -1));
    }

    #[test]
    fn phi_matches_closed_form() {
        assert_eq!(phi_series(c(0.0, 0.0)), c(0.5, 0.0));
        for u in [c(0.5, 0.3), c(-0.9, 0.1), c(0.99, 0.0)] {
            let closed = (u.exp() - 1.0 - u) / (u * u);
            assert!((phi_series(u) - closed).norm() < 1e-14);
        }
    }

    #[test]
    fn holo_on_axis() {
        let z = c(1.5, -0.5);
        let r = cohn_holo_5(z, c(0.0, 0.0)).unwrap();
        let f = &r.factorization;
        assert!((f.word.factors()[0].entry - z * z / 2.0).norm() < 1e-15);
        assert!(f.word.matrix().max_abs_diff(&Mat2::new(c(1.0, 0.0), z * z, c(0.0, 0.0), c(1.0, 0.0))) < 1e-12);
        let r = cohn_holo_5(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!(r.factorization.word.entries().all(|e| e.is_finite()));
        assert_eq!(r.factorization.factor_count, 5);
    }

    #[test]
    fn peeled_entries_match_closed_forms() {
        for (z, w) in [(c(0.3, -1.2), c(1.1, 0.4)), (c(-2.0, 1.8), c(2.0, 2.0)), (c(2.0, 0.0), c(2.0, 0.0))] {
            let f = cohn_holo_5(z, w).unwrap().factorization;
            let e: Vec<Complex64> = f.word.entries().copied().collect();
            assert!((e[1] - h2(z, w)).norm() <= 1e-12 * h2(z, w).norm());
            assert!((e[2] - h3(z, w)).norm() <= 1e-12 * h3(z, w).norm().max(1.0));
            assert!((e[3] - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn printed_second_entry_fails() {
        let r = cohn_holo_5_variant(c(1.0, 0.0), c(1.0, 0.0), HoloVariant::PrintedH2).unwrap();
        assert!(r.factorization.residual.unwrap() > 0.1);
        assert!(!r.factorization.verified);
    }

    #[test]
    fn small_grid() {
        let g = holo_grid_residual(5, 2.0, GridPairing::Sweeps, HoloVariant::Derived, Execution::Parallel).unwrap();
        assert_eq!(g.points, 100);
        assert!(g.max_residual < COHN_TOL, "{g:?}");
        assert!(g.max_formula_gap < FORMULA_TOL);
        let seq = holo_grid_residual(5, 2.0, GridPairing::Sweeps, HoloVariant::Derived, Execution::Sequential).unwrap();
        assert_eq!(seq, g);
        let p = holo_grid_residual(5, 1.0, GridPairing::Product, HoloVariant::Derived, Execution::Parallel).unwrap();
        assert_eq!(p.points, 625);
        assert!(p.max_residual < COHN_TOL, "{p:?}");
        let bad = holo_grid_residual(5, 2.0, GridPairing::Sweeps, HoloVariant::PrintedH2, Execution::Parallel).unwrap();
        assert!(bad.max_residual > 0.1);
        assert!(holo_grid_residual(1, 2.0, GridPairing::Sweeps, HoloVariant::Derived, Execution::Parallel).is_err());
    }

    #[test]
    fn family_examples() {
        let ex = ExactComplex::int;
        let f = cohn_family_4(&ex(1), &ex(2), &ex(1)).unwrap();
        assert!(f.verified);
        assert_eq!(f.word.entries().cloned().collect::<Vec<_>>(), vec![ex(0), ex(-2), ex(1), ex(2)]);
        let z = ExactComplex::gaussian((2, 3), (1, 1));
        let f = cohn_family_4(&z, &ex(0), &(&z * &z)).unwrap();
        assert!(f.verified);
        assert!(f.word.entries().enumerate().all(|(i, e)| i == 2 || Scalar::is_zero(e)));
        assert!(cohn_family_4(&ex(1), &ex(1), &ex(1)).is_err());
        assert!(cohn_family_4(&ex(1), &ex(2), &ex(0)).is_err());
        let h: [ExactComplex; 4] = f.word.entries().cloned().collect::<Vec<_>>().try_into().unwrap();
        assert!(cohn_relations(&z, &ex(0), &h).iter().all(Scalar::is_zero));
    }

    #[test]
    fn builtin_handles() {
        let w = cohn_holo_word();
        let (z0, w0) = (c(0.3, 1.0), c(-1.2, 0.4));
        let numeric = w.eval_entries(&[z0, w0]).unwrap();
        let direct = cohn_holo_5(z0, w0).unwrap().factorization.word;
        assert_eq!(numeric, direct);
        let neg = builtin("-(cohn.h3)").unwrap();
        assert_eq!(neg.eval_entry(&[z0, w0]).unwrap(), -direct.factors()[2].entry);
        let shifted = builtin("(cohn.h1)+1").unwrap();
        assert_eq!(shifted.eval_entry(&[z0, w0]).unwrap(), h1(z0, w0) + 1.0);
        assert!(builtin("-1").is_some());
        assert!(builtin("nope").is_none());
        let json = serde_json::to_string(&w).unwrap();
        let back: Word<FunctionHandle> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, w);
    }
}
