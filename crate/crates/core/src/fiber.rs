//! Fibers of Φ_N over a fixed target matrix.
//!
//! Writing Φ_N = M1(z1) · Q · MN(zN) with Q the product of the interior
//! factors, the boundary variables are determined by the target and one or
//! two entries of Q. Interior points on the required level sets are sampled
//! by solving the multiaffine entries of Q for their last variable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Mat2, SL2};
use crate::par::{map_slice, Execution};
use crate::sample::{rng_for, small_exact};
use crate::scalar::{ExactComplex, Scalar};
use crate::word::{PhiTemplate, Side};

/// Maximum number of redraws when a linear coefficient vanishes.
pub const RESAMPLE_BUDGET: usize = 64;

/// Which entry of Q carries the prescribed level.
///
/// For even `N` the fibers are graphs over `Q1 = a` (generic) and over
/// `{Q1 = 0, Q2 = b}` (non-generic). For odd `N` the roles swap: generic
/// fibers sit over `Q2 = b`, non-generic ones over `{Q2 = 0, Q1 = a}`.
/// `Q1` and `Q2` name the entry holding the level in either case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stratum {
    Q1,
    Q2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Generic,
    NonGeneric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteriorPoint {
    pub n: usize,
    /// `z2..z_{N-1}`.
    pub values: Vec<ExactComplex>,
    pub level: ExactComplex,
    pub stratum: Stratum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberCompletion {
    /// `z1..zN`.
    pub point: Vec<ExactComplex>,
    pub target: SL2<ExactComplex>,
    pub branch: Branch,
    /// Whether Φ_N(point) equals the target exactly.
    pub verified: bool,
}

/// Product of consecutive interior factors `U(z2) L(z3) ...` of the
/// lower-first Φ_N.
pub fn interior_product(values: &[ExactComplex]) -> Mat2<ExactComplex> {
    let mut q = Mat2::<ExactComplex>::identity();
    for (i, z) in values.iter().enumerate() {
        let side = if i % 2 == 0 { Side::Upper } else { Side::Lower };
        q = q.mul(&side.matrix(z.clone(), ExactComplex::int(0), ExactComplex::int(1)));
    }
    q
}

#[derive(Clone, Copy)]
enum Entry {
    A,
    B,
}

impl Entry {
    fn of(self, m: &Mat2<ExactComplex>) -> ExactComplex {
        match self {
            Entry::A => m.a.clone(),
            Entry::B => m.b.clone(),
        }
    }
}

/// Draws `len - 1` random values and solves `entry(product) = level` for the
/// last one, using that the entry is affine in it.
fn solve_last(len: usize, entry: Entry, level: &ExactComplex, seed: u64) -> Result<Vec<ExactComplex>> {
    let mut rng = rng_for(seed, 0);
    for _ in 0..RESAMPLE_BUDGET {
        let mut values: Vec<ExactComplex> = (0..len - 1).map(|_| small_exact(&mut rng)).collect();
        values.push(ExactComplex::int(0));
        let e0 = entry.of(&interior_product(&values));
        values[len - 1] = ExactComplex::int(1);
        let slope = &entry.of(&interior_product(&values)) - &e0;
        if Scalar::is_zero(&slope) {
            continue;
        }
        values[len - 1] = (level - &e0).checked_div(&slope)?;
        return Ok(values);
    }
    Err(Error::ResampleBudget { attempts: RESAMPLE_BUDGET })
}

/// A seeded interior point on the requested level set (see [`Stratum`]).
pub fn interior_sample(n: usize, level: &ExactComplex, stratum: Stratum, seed: u64) -> Result<InteriorPoint> {
    if n < 4 {
        return Err(Error::InvalidLength { n, reason: "interior sampling needs N >= 4" });
    }
    let m = n - 2;
    let even = n % 2 == 0;
    let values = match (even, stratum) {
        (true, Stratum::Q1) => solve_last(m, Entry::A, level, seed)?,
        (false, Stratum::Q2) => solve_last(m, Entry::B, level, seed)?,
        (true, Stratum::Q2) | (false, Stratum::Q1) => {
            if Scalar::is_zero(level) {
                return Err(Error::Precondition("the level on a two-equation stratum must be nonzero".into()));
            }
            // Even: prefix ends with U, solve R2 = b, then L(-R1/b) kills Q1.
            // Odd: prefix ends with L, solve R1 = a, then U(-R2/a) kills Q2.
            let (entry, other) = if even { (Entry::B, Entry::A) } else { (Entry::A, Entry::B) };
            let mut values = solve_last(m - 1, entry, level, seed)?;
            let r = interior_product(&values);
            values.push((-other.of(&r)).checked_div(level)?);
            values
        }
    };
    Ok(InteriorPoint { n, values, level: level.clone(), stratum })
}

fn finish(point: Vec<ExactComplex>, target: &SL2<ExactComplex>, branch: Branch) -> Result<FiberCompletion> {
    let t = PhiTemplate::lower_first(point.len())?;
    let verified = t.eval(&point)? == *target;
    Ok(FiberCompletion { point, target: target.clone(), branch, verified })
}

fn off_level(entry: &str, got: &ExactComplex, want: &ExactComplex) -> Error {
    Error::OffLevelSet(format!("{entry} = {got}, expected {want}"))
}

/// Generic even completion: `z1 = (c - Q3)/a`, `zN = (b - Q2)/a`.
pub fn complete_generic_even(target: &SL2<ExactComplex>, interior: &[ExactComplex]) -> Result<FiberCompletion> {
    let n = interior.len() + 2;
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidLength { n, reason: "the generic even completion needs even N >= 4" });
    }
    let a = target.a();
    if Scalar::is_zero(a) {
        return Err(Error::Precondition("generic completion requires a != 0".into()));
    }
    let q = interior_product(interior);
    if q.a != *a {
        return Err(off_level("Q1", &q.a, a));
    }
    let z1 = (target.c() - &q.c).checked_div(a)?;
    let zn = (target.b() - &q.b).checked_div(a)?;
    let mut point = Vec::with_capacity(n);
    point.push(z1);
    point.extend_from_slice(interior);
    point.push(zn);
    finish(point, target, Branch::Generic)
}

/// Non-generic even completion over `a = 0`. `prefix` holds `z2..z_{N-2}`
/// with `R2 = b`; `z1` is a free fiber coordinate.
pub fn complete_nongeneric_even(
    target: &SL2<ExactComplex>,
    z1: &ExactComplex,
    prefix: &[ExactComplex],
) -> Result<FiberCompletion> {
    let n = prefix.len() + 3;
    if n % 2 != 0 {
        return Err(Error::InvalidLength { n, reason: "the non-generic even completion needs even N >= 4" });
    }
    if !Scalar::is_zero(target.a()) {
        return Err(Error::Precondition("non-generic completion requires a = 0".into()));
    }
    let (b, c, d) = (target.b(), target.c(), target.d());
    let r = interior_product(prefix);
    if r.b != *b {
        return Err(off_level("R2", &r.b, b));
    }
    let z_prev = (-&r.a).checked_div(b)?;
    let mut interior = prefix.to_vec();
    interior.push(z_prev);
    let q = interior_product(&interior);
    let zn = (&(d - &q.d) - &(b * z1)).checked_div(c)?;
    let mut point = Vec::with_capacity(n);
    point.push(z1.clone());
    point.extend(interior);
    point.push(zn);
    finish(point, target, Branch::NonGeneric)
}

/// Odd completion, Φ = L(z1) · Q · L(zN).
///
/// Generic (`b != 0`): `interior` satisfies `Q2 = b`; then
/// `zN = (a - Q1)/b` and `z1 = (d - Q4)/b`, and `z1_free` is ignored.
///
/// Non-generic (`b = 0`): `interior` satisfies `Q2 = 0`, `Q1 = a`; `z1` is free
/// and `zN = (c - Q3 - a·z1)/d`.
pub fn complete_odd(
    target: &SL2<ExactComplex>,
    interior: &[ExactComplex],
    branch: Branch,
    z1_free: &ExactComplex,
) -> Result<FiberCompletion> {
    let n = interior.len() + 2;
    if n < 5 || n % 2 == 0 {
        return Err(Error::InvalidLength { n, reason: "the odd completion needs odd N >= 5" });
    }
    let (a, b, c, d) = (target.a(), target.b(), target.c(), target.d());
    let q = interior_product(interior);
    let (z1, zn) = match branch {
        Branch::Generic => {
            if Scalar::is_zero(b) {
                return Err(Error::Precondition("generic odd completion requires b != 0".into()));
            }
            if q.b != *b {
                return Err(off_level("Q2", &q.b, b));
            }
            ((d - &q.d).checked_div(b)?, (a - &q.a).checked_div(b)?)
        }
        Branch::NonGeneric => {
            if !Scalar::is_zero(b) {
                return Err(Error::Precondition("non-generic odd completion requires b = 0".into()));
            }
            if !Scalar::is_zero(&q.b) {
                return Err(off_level("Q2", &q.b, b));
            }
            if q.a != *a {
                return Err(off_level("Q1", &q.a, a));
            }
            let zn = (&(c - &q.c) - &(a * z1_free)).checked_div(d)?;
            (z1_free.clone(), zn)
        }
    };
    let mut point = Vec::with_capacity(n);
    point.push(z1);
    point.extend_from_slice(interior);
    point.push(zn);
    finish(point, target, branch)
}

/// The `(2,2)` residual `a·(Q4 + Q2 z1 + Q3 zN + Q1 z1 zN - d)` of an even
/// completion; zero whenever the other three entries match.
pub fn even_corner_residual(target: &SL2<ExactComplex>, point: &[ExactComplex]) -> Result<ExactComplex> {
    let n = point.len();
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidLength { n, reason: "needs even N >= 4" });
    }
    let q = interior_product(&point[1..n - 1]);
    let (z1, zn) = (&point[0], &point[n - 1]);
    let lhs = &(&(&q.d + &(&q.b * z1)) + &(&q.c * zn)) + &(&(&q.a * z1) * zn);
    Ok(target.a() * &(&lhs - target.d()))
}

/// Completes many generic even targets against their own interior samples.
pub fn complete_generic_batch(
    targets: &[SL2<ExactComplex>],
    n: usize,
    seed: u64,
    exec: Execution,
) -> Vec<Result<FiberCompletion>> {
    let indexed: Vec<(usize, &SL2<ExactComplex>)> = targets.iter().enumerate().collect();
    map_slice(&indexed, exec, |(i, t)| {
        let interior = interior_sample(n, t.a(), Stratum::Q1, seed.wrapping_add(*i as u64))?;
        complete_generic_even(t, &interior.values)
    })
}

fn require_nonzero(v: &ExactComplex, name: &str) -> Result<()> {
    if Scalar::is_zero(v) {
        return Err(Error::Precondition(format!("{name} must be nonzero")));
    }
    Ok(())
}

/// `T_{α,β}(z1, z2) = (z1, β/α · z2)`, carrying `{z1 z2 = α}` to `{z1 z2 = β}`.
pub fn fiber_transport_dim1(
    p: (&ExactComplex, &ExactComplex),
    alpha: &ExactComplex,
    beta: &ExactComplex,
) -> Result<(ExactComplex, ExactComplex)> {
    require_nonzero(alpha, "alpha")?;
    require_nonzero(beta, "beta")?;
    let scale = beta.checked_div(alpha)?;
    Ok((p.0.clone(), &scale * p.1))
}

/// `z1 + z3 + z1 z2 z3`.
pub fn p2(p: &[ExactComplex; 3]) -> ExactComplex {
    &(&p[0] + &p[2]) + &(&(&p[0] * &p[1]) * &p[2])
}

/// `T_α(z1, z2, z3) = (α z1, z2/α, α z3)`, which scales `P2` by `α`.
pub fn fiber_transport_dim2(p: &[ExactComplex; 3], alpha: &ExactComplex) -> Result<[ExactComplex; 3]> {
    require_nonzero(alpha, "alpha")?;
    Ok([alpha * &p[0], p[1].checked_div(alpha)?, alpha * &p[2]])
}

/// `(z1, c)` ↦ `(z1, c, (c-1)/z1, (1-z1)/c)`; the last three coordinates lie
/// on `{z1 + z3 + z1 z2 z3 = 1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct F5Point {
    pub z1: ExactComplex,
    pub c: ExactComplex,
    pub z2: ExactComplex,
    pub z3: ExactComplex,
}

impl F5Point {
    pub fn triple(&self) -> [ExactComplex; 3] {
        [self.z1.clone(), self.z2.clone(), self.z3.clone()]
    }
}

pub fn f5_param(z1: &ExactComplex, c: &ExactComplex) -> Result<F5Point> {
    require_nonzero(z1, "z1")?;
    require_nonzero(c, "c")?;
    let one = ExactComplex::int(1);
    Ok(F5Point {
        z1: z1.clone(),
        c: c.clone(),
        z2: (c - &one).checked_div(z1)?,
        z3: (&one - z1).checked_div(c)?,
    })
}
