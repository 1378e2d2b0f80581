//! Explicit four-factor sections `(h1, h2, h3, h4)` of the Cohn matrix,
//! `C(z, w) = U(h1) L(h2) U(h3) L(h4)`, and the degrees they carry.

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::cohn_eval;
use crate::matrix::Mat2;
use crate::scalar::Scalar;
use crate::word::{Side, Word};

use super::winding::{adaptive_winding, check_radius, section_degree_on_fiber, section_degree_z_param};
use crate::par::Execution;

type C = Complex64;

/// Tolerance for treating `zw` as equal to 1 in numeric sections.
const ZW_ONE_TOL: f64 = 1e-12;

/// The continuous (not holomorphic) section over `zw != 1` with
/// `h3 = w²/|w|^{3/2}`, extended by `(z², 0, 0, 0)` over `w = 0`.
pub fn cohn_continuous_section(z: C, w: C) -> Result<[C; 4]> {
    let one_minus = 1.0 - z * w;
    if one_minus.norm() < ZW_ONE_TOL {
        return Err(Error::Precondition("continuous section is defined off zw = 1".into()));
    }
    if w.norm() == 0.0 {
        return Ok([z * z, C::default(), C::default(), C::default()]);
    }
    let r = w.norm().powf(1.5);
    let h3 = w * w / r;
    // -zw/h3 with the w² cancelled, so it tends to 0 with w.
    let h2 = -z * r / w;
    let h1 = (z * z - h3) / one_minus;
    let h4 = (-w * w - h2) / one_minus;
    Ok([h1, h2, h3, h4])
}

/// `(0, -w/z, z², w/z)`, a section along `zw = 1` (exact there; `z != 0`).
pub fn section_near_d1<S: Scalar>(z: &S, w: &S) -> Result<[S; 4]> {
    if z.is_zero() {
        return Err(Error::Precondition("section near zw = 1 needs z != 0".into()));
    }
    let w_over_z = w.checked_div(z)?;
    Ok([S::zero(), -w_over_z.clone(), z.clone() * z.clone(), w_over_z])
}

/// `(z² - 1, 0, 1, -w²)`, a section over the cross `zw = 0` that stays on the
/// `h3`-axis of the fiber and so never meets the singular point `h2 = h3 = 0`.
pub fn axis_section<S: Scalar>(z: &S, w: &S) -> Result<[S; 4]> {
    if !(z.clone() * w.clone()).is_zero() {
        return Err(Error::Precondition("axis section is defined on zw = 0".into()));
    }
    Ok([z.clone() * z.clone() - S::one(), S::zero(), S::one(), -(w.clone() * w.clone())])
}

/// Max entrywise distance between `U(h1) L(h2) U(h3) L(h4)` and `C(z, w)`.
pub fn section_residual(z: C, w: C, h: &[C; 4]) -> Result<f64> {
    let product: Mat2<C> = Word::alternating(Side::Upper, h.iter().copied()).matrix();
    Ok(product.max_abs_diff(cohn_eval(&z, &w)?.mat()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationProbe {
    pub d: [f64; 2],
    pub w_param: i64,
    pub z_param: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShrinkingLoop {
    /// `"w"` for `z = 0, w = ρ e^{iθ}`; `"z"` for `w = 0, z = ρ e^{iθ}`.
    pub axis: String,
    pub radius: f64,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisDegrees {
    /// Degree in the `(D/w, w)` parametrization as `D → 0`.
    pub w_param: i64,
    /// Degree in the `(z, D/z)` parametrization as `D → 0`.
    pub z_param: i64,
    /// Whether every probe gave the same pair.
    pub stable: bool,
    pub probes: Vec<ContinuationProbe>,
    /// Degree a section avoiding `h2 = h3 = 0` must have on loops shrinking
    /// inside `zw = 0`.
    pub shrinking_required: i64,
    /// Those loops for [`axis_section`], measured through `h2 + h3`.
    pub shrinking_loops: Vec<ShrinkingLoop>,
    /// Whether the continuation degrees are compatible with avoidance.
    pub avoidance_possible: bool,
}

/// Degrees of `h3` on fibers `zw = D` for `D` tending to 0, in both
/// parametrizations, alongside the shrinking-loop degrees inside `D = 0`.
pub fn axis_continuation_degrees<H>(h3: &H, ds: &[C], radius: f64, samples: usize) -> Result<AxisDegrees>
where
    H: Fn(C, C) -> C + Sync + Send,
{
    if ds.is_empty() {
        return Err(Error::Precondition("need at least one D value".into()));
    }
    let mut probes = Vec::with_capacity(ds.len());
    for &d in ds {
        let w_param = section_degree_on_fiber(h3, d, radius, samples)?.degree;
        let z_param = section_degree_z_param(h3, d, radius, samples)?.degree;
        probes.push(ContinuationProbe { d: [d.re, d.im], w_param, z_param });
    }
    let last = probes.last().expect("nonempty").clone();
    let stable = probes.iter().all(|p| p.w_param == last.w_param && p.z_param == last.z_param);
    let radii = [radius, radius / 4.0, radius / 16.0];
    let shrinking_loops = shrinking_loop_degrees(&|z, w| axis_section(&z, &w), &radii, samples)?;
    Ok(AxisDegrees {
        w_param: last.w_param,
        z_param: last.z_param,
        stable,
        probes,
        shrinking_required: 0,
        shrinking_loops,
        avoidance_possible: last.w_param == 0 && last.z_param == 0,
    })
}

/// Winding of `h2 + h3` for `section` on circles of the given radii inside
/// each axis of `zw = 0`. On that cross the fiber is `{h2 h3 = 0}`, so the
/// sum is the coordinate along whichever branch the section takes.
pub fn shrinking_loop_degrees<F>(section: &F, radii: &[f64], samples: usize) -> Result<Vec<ShrinkingLoop>>
where
    F: Fn(C, C) -> Result<[C; 4]> + Sync + Send,
{
    let mut out = Vec::new();
    for &rho in radii {
        check_radius(rho)?;
        for axis in ["w", "z"] {
            let f = |t: f64| {
                let p = C::from_polar(rho, t);
                let (z, w) = if axis == "w" { (C::default(), p) } else { (p, C::default()) };
                section(z, w).map(|h| h[1] + h[2]).unwrap_or(C::new(f64::NAN, f64::NAN))
            };
            let degree = adaptive_winding(&f, samples, Execution::Parallel)?.degree;
            out.push(ShrinkingLoop { axis: axis.into(), radius: rho, degree });
        }
    }
    Ok(out)
}
