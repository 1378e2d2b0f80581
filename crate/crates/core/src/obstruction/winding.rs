use std::f64::consts::{FRAC_PI_2, TAU};

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{map_indices, Execution};

pub const DEFAULT_SAMPLES: usize = 256;
pub const MAX_SAMPLES: usize = 1 << 16;

/// Values of a map along a closed loop; the last sample connects back to the
/// first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct LoopSamples(Vec<Complex64>);

impl LoopSamples {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Precondition("a loop needs at least one sample".into()));
        }
        if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(format!("loop sample {index}")));
        }
        if let Some(index) = values.iter().position(|v| v.norm() == 0.0) {
            return Err(Error::ZeroSample { index });
        }
        Ok(LoopSamples(values))
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest principal-branch angle increment between neighbours.
    pub fn max_step(&self) -> f64 {
        self.increments().map(f64::abs).fold(0.0, f64::max)
    }

    fn increments(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.0.len();
        (0..n).map(move |k| (self.0[(k + 1) % n] / self.0[k]).arg())
    }
}

impl TryFrom<Vec<[f64; 2]>> for LoopSamples {
    type Error = Error;
    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        LoopSamples::new(v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl From<LoopSamples> for Vec<[f64; 2]> {
    fn from(l: LoopSamples) -> Self {
        l.0.into_iter().map(|c| [c.re, c.im]).collect()
    }
}

/// Total angle swept divided by `2π`. Every increment must stay below `π/2`
/// in modulus, which rules out aliasing.
pub fn winding_number(l: &LoopSamples) -> Result<i64> {
    let mut total = 0.0;
    for step in l.increments() {
        if step.abs() >= FRAC_PI_2 {
            return Err(Error::Adequacy { step: step.abs(), samples: l.len() });
        }
        total += step;
    }
    Ok((total / TAU).round() as i64)
}

/// Distance of the total swept angle, in turns, from the nearest integer.
pub fn winding_defect(l: &LoopSamples) -> f64 {
    let turns = l.increments().sum::<f64>() / TAU;
    (turns - turns.round()).abs()
}

/// Samples `f(θ)` at `n` equally spaced angles in `[0, 2π)`.
pub fn sample_loop<F>(f: &F, n: usize, exec: Execution) -> Result<LoopSamples>
where
    F: Fn(f64) -> Complex64 + Sync + Send,
{
    let values = map_indices(n, exec, |k| f(TAU * k as f64 / n as f64));
    LoopSamples::new(values)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Degree {
    pub degree: i64,
    /// Samples needed for an adequate loop.
    pub samples: usize,
}

/// Winding number of `θ ↦ f(θ)`, starting at `initial` samples and doubling
/// until the loop is adequate, up to [`MAX_SAMPLES`].
pub fn adaptive_winding<F>(f: &F, initial: usize, exec: Execution) -> Result<Degree>
where
    F: Fn(f64) -> Complex64 + Sync + Send,
{
    let mut n = initial.max(4);
    loop {
        let l = sample_loop(f, n, exec)?;
        match winding_number(&l) {
            Ok(degree) => return Ok(Degree { degree, samples: n }),
            Err(e @ Error::Adequacy { .. }) if n >= MAX_SAMPLES => return Err(e),
            Err(Error::Adequacy { .. }) => n = (2 * n).min(MAX_SAMPLES),
            Err(e) => return Err(e),
        }
    }
}

/// Degree of `h3` on the fiber `{zw = D}`, parametrized counterclockwise by
/// `w = r e^{iθ}`, `z = D/w`.
pub fn section_degree_on_fiber<H>(h3: &H, d: Complex64, radius: f64, samples: usize) -> Result<Degree>
where
    H: Fn(Complex64, Complex64) -> Complex64 + Sync + Send,
{
    if d.norm() == 0.0 {
        return Err(Error::Precondition("fiber degree needs D != 0".into()));
    }
    check_radius(radius)?;
    let f = |t: f64| {
        let w = Complex64::from_polar(radius, t);
        h3(d / w, w)
    };
    adaptive_winding(&f, samples, Execution::Parallel)
}

/// Same fiber parametrized by `z = r e^{iθ}`, `w = D/z`.
pub fn section_degree_z_param<H>(h3: &H, d: Complex64, radius: f64, samples: usize) -> Result<Degree>
where
    H: Fn(Complex64, Complex64) -> Complex64 + Sync + Send,
{
    if d.norm() == 0.0 {
        return Err(Error::Precondition("fiber degree needs D != 0".into()));
    }
    check_radius(radius)?;
    let f = |t: f64| {
        let z = Complex64::from_polar(radius, t);
        h3(z, d / z)
    };
    adaptive_winding(&f, samples, Execution::Parallel)
}

pub(crate) fn check_radius(radius: f64) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Precondition(format!("radius must be positive and finite, got {radius}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: usize, r: f64, f: impl Fn(Complex64) -> Complex64) -> LoopSamples {
        LoopSamples::new((0..n).map(|k| f(Complex64::from_polar(r, TAU * k as f64 / n as f64))).collect()).unwrap()
    }

    #[test]
    fn examples() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(winding_number(&circle(256, 1.0, |_| one)).unwrap(), 0);
        assert_eq!(winding_number(&circle(256, 1.0, |w| w * w)).unwrap(), 2);
        assert!(winding_defect(&circle(256, 1.0, |w| w * w)) < 1e-12);
        let section = |w: Complex64| w * w / w.norm().powf(1.5);
        assert_eq!(winding_number(&circle(256, 4.0, section)).unwrap(), 2);
        assert_eq!(winding_number(&circle(256, 1.0, |w| w.inv().powi(3))).unwrap(), -3);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            LoopSamples::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]),
            Err(Error::ZeroSample { index: 1 })
        ));
        let coarse = circle(4, 1.0, |w| w * w);
        assert!(matches!(winding_number(&coarse), Err(Error::Adequacy { .. })));
        let f = |t: f64| Complex64::from_polar(1.0, 40.0 * t);
        let d = adaptive_winding(&f, 16, Execution::Sequential).unwrap();
        assert_eq!(d.degree, 40);
        assert!(d.samples > 160);
    }

    #[test]
    fn fiber_degrees() {
        let d = Complex64::new(0.5, 0.0);
        let unit = |_: Complex64, _: Complex64| Complex64::new(1.0, 0.0);
        assert_eq!(section_degree_on_fiber(&unit, d, 1.0, 256).unwrap().degree, 0);
        let zsq = |z: Complex64, _: Complex64| z * z;
        assert_eq!(section_degree_on_fiber(&zsq, Complex64::new(1.01, 0.0), 1.0, 256).unwrap().degree, -2);
        assert_eq!(section_degree_z_param(&zsq, Complex64::new(1.01, 0.0), 1.0, 256).unwrap().degree, 2);
        assert!(section_degree_on_fiber(&zsq, Complex64::new(0.0, 0.0), 1.0, 256).is_err());
    }
}
