//! Complete vector fields tangent to the level sets of a polynomial, and their
//! numerical flows.
//!
//! For a polynomial `P` with partials `P_j`, the field
//! `V_kl = P_l ∂/∂z_k - P_k ∂/∂z_l` annihilates `P`, so its flow stays on
//! `{P = const}`.

use num::complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::scalar::{ExactComplex, Scalar};
use crate::word::{expand_phi, middle_q, PhiTemplate};

#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldSpec {
    k: usize,
    l: usize,
    p: MultiPoly,
    p_k: MultiPoly,
    p_l: MultiPoly,
}

impl VectorFieldSpec {
    /// `V_kl` for `P`, with zero-based variable indices `k != l`.
    pub fn new(k: usize, l: usize, p: MultiPoly) -> Result<Self> {
        if k == l {
            return Err(Error::Precondition(format!("vector field needs distinct indices, got k = l = {k}")));
        }
        let p_k = p.diff(k)?;
        let p_l = p.diff(l)?;
        Ok(VectorFieldSpec { k, l, p, p_k, p_l })
    }

    /// `V_kl` on the generic stratum of Φ_N: `P = Q1 - a`, with the level `a`
    /// as an extra last variable. `k, l` must be interior (`z2..z_{N-1}`,
    /// indices `1..=N-2`).
    pub fn generic(n: usize, k: usize, l: usize) -> Result<Self> {
        check_range(k, l, 1, n.saturating_sub(2))?;
        Self::new(k, l, generic_level_polynomial(n)?)
    }

    /// `W_kl` on the non-generic stratum: `P = Φ_N^{12}(z1, ..., z_{N-2}, 0, 0)`,
    /// with `k, l` in `z1..z_{N-2}` (indices `0..=N-3`).
    pub fn nongeneric(n: usize, k: usize, l: usize) -> Result<Self> {
        check_range(k, l, 0, n.saturating_sub(3))?;
        Self::new(k, l, nongeneric_polynomial(n)?)
    }

    pub fn indices(&self) -> (usize, usize) {
        (self.k, self.l)
    }

    pub fn polynomial(&self) -> &MultiPoly {
        &self.p
    }

    pub fn nvars(&self) -> usize {
        self.p.nvars()
    }

    /// Component values `(dz_k/dt, dz_l/dt)` at `z`.
    fn components(&self, z: &[Complex64]) -> Result<(Complex64, Complex64)> {
        Ok((self.p_l.eval(z)?, -self.p_k.eval(z)?))
    }
}

fn check_range(k: usize, l: usize, lo: usize, hi: usize) -> Result<()> {
    for idx in [k, l] {
        if idx < lo || idx > hi {
            return Err(Error::Precondition(format!("index {idx} outside admissible range {lo}..={hi}")));
        }
    }
    Ok(())
}

/// `Q1 - a` in `N + 1` variables (the last one is `a`).
pub fn generic_level_polynomial(n: usize) -> Result<MultiPoly> {
    let q1 = middle_q(n)?.a;
    let map: Vec<usize> = (0..n).collect();
    let lifted = q1.remap(n + 1, &map)?;
    lifted.checked_sub(&MultiPoly::var(n + 1, n)?)
}

/// The `(1,2)` entry of Φ_N with `z_{N-1} = z_N = 0`.
pub fn nongeneric_polynomial(n: usize) -> Result<MultiPoly> {
    if n < 4 {
        return Err(Error::InvalidLength { n, reason: "stratum fields need N >= 4" });
    }
    let b = expand_phi(&PhiTemplate::lower_first(n)?).b;
    let zero = ExactComplex::int(0);
    b.substitute(n - 2, &zero)?.substitute(n - 1, &zero)
}

/// Pairs `2 <= k < l <= N-1` in one-based numbering, returned zero-based.
pub fn generic_pairs(n: usize) -> Vec<(usize, usize)> {
    pairs(1, n.saturating_sub(2))
}

/// Pairs `1 <= k < l <= N-2` in one-based numbering, returned zero-based.
pub fn nongeneric_pairs(n: usize) -> Vec<(usize, usize)> {
    pairs(0, n.saturating_sub(3))
}

fn pairs(lo: usize, hi: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for k in lo..=hi {
        for l in k + 1..=hi {
            out.push((k, l));
        }
    }
    out
}

/// `V_kl(q) = P_l ∂_k q - P_k ∂_l q`.
pub fn vfield_apply(spec: &VectorFieldSpec, q: &MultiPoly) -> Result<MultiPoly> {
    if q.nvars() != spec.nvars() {
        return Err(Error::VarCountMismatch { left: spec.nvars(), right: q.nvars() });
    }
    let a = spec.p_l.checked_mul(&q.diff(spec.k)?)?;
    let b = spec.p_k.checked_mul(&q.diff(spec.l)?)?;
    a.checked_sub(&b)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowResult {
    #[serde(serialize_with = "ser_points")]
    pub end: Vec<Complex64>,
    pub steps: usize,
    /// `P(end) - P(start)`.
    #[serde(with = "crate::scalar::approx_pair")]
    pub drift: Complex64,
    /// Largest `|P - P(start)|` seen at any step.
    pub max_drift: f64,
}

fn ser_points<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let pairs: Vec<[f64; 2]> = v.iter().map(|c| [c.re, c.im]).collect();
    serde::Serialize::serialize(&pairs, s)
}

/// Integrates the field from `start` for real time `t` with the classical
/// fourth-order Runge-Kutta scheme, using `ceil(|t| / step)` equal steps.
pub fn flow_rk4(spec: &VectorFieldSpec, start: &[Complex64], t: f64, step: f64) -> Result<FlowResult> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Precondition(format!("step must be positive and finite, got {step}")));
    }
    if !t.is_finite() {
        return Err(Error::NonFinite(format!("flow time {t}")));
    }
    if start.len() != spec.nvars() {
        return Err(Error::LengthMismatch { expected: spec.nvars(), got: start.len() });
    }
    if let Some(bad) = start.iter().find(|x| !Scalar::is_finite(*x)) {
        return Err(Error::NonFinite(format!("start coordinate {bad}")));
    }
    let p_start = spec.p.eval(start)?;
    let steps = if t == 0.0 { 0 } else { (t.abs() / step).ceil() as usize };
    let h = if steps == 0 { 0.0 } else { t / steps as f64 };
    let (k, l) = (spec.k, spec.l);
    let mut z = start.to_vec();
    let mut probe = z.clone();
    let mut max_drift: f64 = 0.0;
    for _ in 0..steps {
        let (a1, b1) = spec.components(&z)?;
        probe[k] = z[k] + a1 * (h / 2.0);
        probe[l] = z[l] + b1 * (h / 2.0);
        let (a2, b2) = spec.components(&probe)?;
        probe[k] = z[k] + a2 * (h / 2.0);
        probe[l] = z[l] + b2 * (h / 2.0);
        let (a3, b3) = spec.components(&probe)?;
        probe[k] = z[k] + a3 * h;
        probe[l] = z[l] + b3 * h;
        let (a4, b4) = spec.components(&probe)?;
        z[k] += (a1 + a2 * 2.0 + a3 * 2.0 + a4) * (h / 6.0);
        z[l] += (b1 + b2 * 2.0 + b3 * 2.0 + b4) * (h / 6.0);
        if !Scalar::is_finite(&z[k]) || !Scalar::is_finite(&z[l]) {
            return Err(Error::NonFinite("flow state diverged".into()));
        }
        probe[k] = z[k];
        probe[l] = z[l];
        max_drift = max_drift.max((spec.p.eval(&z)? - p_start).norm());
    }
    let drift = spec.p.eval(&z)? - p_start;
    Ok(FlowResult { end: z, steps, drift, max_drift })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p23() -> MultiPoly {
        // 1 + x0 x1 in two variables
        let x = MultiPoly::var(2, 0).unwrap();
        let y = MultiPoly::var(2, 1).unwrap();
        (&x * &y).add_constant(&ExactComplex::int(1))
    }

    #[test]
    fn tangency_and_sample_values() {
        let v = VectorFieldSpec::new(0, 1, p23()).unwrap();
        assert!(vfield_apply(&v, &p23()).unwrap().is_zero());
        assert!(vfield_apply(&v, &MultiPoly::constant(2, ExactComplex::int(4))).unwrap().is_zero());
        // P_1 = x0, so V applied to x0 is x0.
        let x0 = MultiPoly::var(2, 0).unwrap();
        assert_eq!(vfield_apply(&v, &x0).unwrap(), x0);
        assert!(vfield_apply(&v, &MultiPoly::var(3, 0).unwrap()).is_err());
        assert!(VectorFieldSpec::new(1, 1, p23()).is_err());
        assert!(VectorFieldSpec::new(0, 2, p23()).is_err());
    }

    #[test]
    fn stratum_constructors() {
        assert!(VectorFieldSpec::generic(4, 1, 2).is_ok());
        assert!(VectorFieldSpec::generic(4, 0, 2).is_err());
        assert!(VectorFieldSpec::generic(4, 1, 3).is_err());
        assert!(VectorFieldSpec::nongeneric(5, 0, 2).is_ok());
        assert!(VectorFieldSpec::nongeneric(5, 0, 3).is_err());
        assert_eq!(generic_pairs(5), vec![(1, 2), (1, 3), (2, 3)]);
        assert_eq!(nongeneric_pairs(4), vec![(0, 1)]);
        assert_eq!(generic_level_polynomial(4).unwrap().to_string(), "1-z5+z2*z3");
        assert_eq!(nongeneric_polynomial(4).unwrap().to_string(), "z2");
    }

    #[test]
    fn zero_time_is_identity() {
        let v = VectorFieldSpec::new(0, 1, p23()).unwrap();
        let start = [Complex64::new(0.3, 1.0), Complex64::new(-2.0, 0.5)];
        let r = flow_rk4(&v, &start, 0.0, 1e-3).unwrap();
        assert_eq!(r.end, start.to_vec());
        assert_eq!(r.steps, 0);
        assert!(flow_rk4(&v, &start, 1.0, 0.0).is_err());
        assert!(flow_rk4(&v, &start[..1], 1.0, 1e-3).is_err());
    }

    #[test]
    fn conserves_product_level() {
        let v = VectorFieldSpec::new(0, 1, p23()).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let r = flow_rk4(&v, &[one, one], 1.0, 1e-3).unwrap();
        let p_end = p23().eval(&r.end).unwrap();
        assert!((p_end - 2.0).norm() < 1e-8);
        // closed form: x0 = e^t, x1 = e^-t
        assert!((r.end[0] - std::f64::consts::E).norm() < 1e-9);
    }

    #[test]
    fn linear_polynomial_gives_straight_lines() {
        // P = 1 + 2 x0 + 3 x1: constant field (3, -2).
        let p = MultiPoly::from_terms(
            2,
            [(vec![0, 0], ExactComplex::int(1)), (vec![1, 0], ExactComplex::int(2)), (vec![0, 1], ExactComplex::int(3))],
        )
        .unwrap();
        let v = VectorFieldSpec::new(0, 1, p).unwrap();
        let start = [Complex64::new(0.5, -1.0), Complex64::new(2.0, 0.25)];
        for t in [0.37, 1.0, -2.5, 1000.0] {
            let r = flow_rk4(&v, &start, t, 1e-2).unwrap();
            let want = [start[0] + 3.0 * t, start[1] - 2.0 * t];
            assert!((r.end[0] - want[0]).norm() < 1e-10 * (1.0 + t.abs()));
            assert!((r.end[1] - want[1]).norm() < 1e-10 * (1.0 + t.abs()));
            assert!(r.drift.norm() < 1e-9 * (1.0 + t.abs()));
        }
    }
}
