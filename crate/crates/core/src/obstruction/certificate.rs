use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::winding::section_degree_on_fiber;

pub const CLAIM: &str = "no-holo-4-factorization";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptionDegree {
    pub h3: String,
    pub degree: i64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub probe_d: [f64; 2],
    pub radius: f64,
    pub orientation: String,
    /// Fiber degree of each admissible `h3` up to units.
    pub options: Vec<OptionDegree>,
    /// Signed degree of `h3 = z²` on the fiber `zw = 1`.
    pub required_signed: i64,
    /// Degree of the unit `e^{zw}` on the probe fiber.
    pub unit_check: OptionDegree,
    pub assumption: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub claim: String,
    pub required_degree: i64,
    pub achieved: Vec<i64>,
    pub verdict: bool,
    pub evidence: Evidence,
}

impl Certificate {
    /// True when no achieved degree matches the required one. Degrees are
    /// compared up to sign, since the sign depends on the orientation of the
    /// fiber parametrization.
    pub fn verdict_for(required: i64, achieved: &[i64]) -> bool {
        !achieved.iter().any(|d| d.abs() == required.abs())
    }

    /// The same evidence judged against a different required degree.
    pub fn with_required(mut self, required: i64) -> Self {
        self.required_degree = required;
        self.verdict = Self::verdict_for(required, &self.achieved);
        self
    }
}

type H3 = fn(Complex64, Complex64) -> Complex64;

/// A holomorphic four-factor solution needs `h2 h3 = -zw`, so up to a unit
/// `h3` is one of `1, z, w, zw`. Each choice is compared against the degree
/// forced by `h3 = z²` over `zw = 1`.
pub fn holo_obstruction_certificate(d: Complex64, radius: f64, samples: usize) -> Result<Certificate> {
    if d.norm() == 0.0 {
        return Err(Error::Precondition("certificate probe needs D != 0".into()));
    }
    let options: [(&str, H3); 4] =
        [("1", |_, _| Complex64::new(1.0, 0.0)), ("z", |z, _| z), ("w", |_, w| w), ("zw", |z, w| z * w)];
    let mut degrees = Vec::with_capacity(4);
    for (name, f) in options {
        let deg = section_degree_on_fiber(&f, d, radius, samples)?;
        degrees.push(OptionDegree { h3: name.into(), degree: deg.degree, samples: deg.samples });
    }
    let zsq: H3 = |z, _| z * z;
    let required_signed = section_degree_on_fiber(&zsq, Complex64::new(1.0, 0.0), radius, samples)?.degree;
    let unit: H3 = |z, w| (z * w).exp();
    let unit_deg = section_degree_on_fiber(&unit, d, radius, samples)?;
    let achieved: Vec<i64> = degrees.iter().map(|o| o.degree).collect();
    let required_degree = required_signed.abs();
    Ok(Certificate {
        claim: CLAIM.into(),
        required_degree,
        verdict: Certificate::verdict_for(required_degree, &achieved),
        achieved,
        evidence: Evidence {
            probe_d: [d.re, d.im],
            radius,
            orientation: "w = r e^{it}, z = D/w, counterclockwise".into(),
            options: degrees,
            required_signed,
            unit_check: OptionDegree { h3: "exp(zw)".into(), degree: unit_deg.degree, samples: unit_deg.samples },
            assumption: "nowhere-vanishing holomorphic factors have degree 0 on every fiber".into(),
        },
    })
}
