//! Rank of the differential of Φ_N, measured in the Lie algebra sl2.
//!
//! Column `j` of the frame is `(∂Φ/∂z_j) Φ⁻¹ = A_j E_j A_j⁻¹`, where `A_j` is
//! the product of the factors before `z_j` and `E_j` is `e21` (lower) or
//! `e12` (upper). Coordinates are taken in the basis `(e21, e12, d12)` with
//! `d12 = e11 - e22`.

use nalgebra::DMatrix;
use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Mat2, RingElem};
use crate::par::{map_indices, Execution};
use crate::sample::{rng_for, small_exact_nonzero};
use crate::scalar::{ExactComplex, Scalar};
use crate::word::{in_singular_set, PhiTemplate, Side};

/// Relative singular-value threshold for the numerical rank.
pub const APPROX_RANK_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TangentFrame<S> {
    /// One `[e21, e12, d12]` coordinate triple per variable.
    pub columns: Vec<[S; 3]>,
}

impl<S: Scalar> TangentFrame<S> {
    pub fn zero(n: usize) -> Self {
        TangentFrame { columns: vec![[S::zero(), S::zero(), S::zero()]; n] }
    }

    /// Determinant of a frame with exactly three columns.
    pub fn determinant(&self) -> Option<S> {
        let [c0, c1, c2] = self.columns.as_slice() else {
            return None;
        };
        let m = |r: usize, c: &[S; 3]| c[r].clone();
        let det = m(0, c0) * (m(1, c1) * m(2, c2) - m(2, c1) * m(1, c2))
            - m(0, c1) * (m(1, c0) * m(2, c2) - m(2, c0) * m(1, c2))
            + m(0, c2) * (m(1, c0) * m(2, c1) - m(2, c0) * m(1, c1));
        Some(det)
    }
}

/// `A X A⁻¹` for `X = e21` or `e12`, in `(e21, e12, d12)` coordinates.
fn adjoint_coords<S: Scalar>(a: &Mat2<S>, side: Side) -> [S; 3] {
    let (pa, pb, pc, pd) = (a.a.clone(), a.b.clone(), a.c.clone(), a.d.clone());
    match side {
        // A e21 A⁻¹ = [[bd, -b²], [d², -bd]]
        Side::Lower => [pd.clone() * pd.clone(), -(pb.clone() * pb.clone()), pb * pd],
        // A e12 A⁻¹ = [[-ac, a²], [-c², ac]]
        Side::Upper => [-(pc.clone() * pc.clone()), pa.clone() * pa.clone(), -(pa * pc)],
    }
}

/// The right-translated Jacobian frame of Φ_N at `point`.
pub fn sl2_jacobian<S: Scalar + RingElem>(t: &PhiTemplate, point: &[S]) -> Result<TangentFrame<S>> {
    if point.len() != t.n() {
        return Err(Error::LengthMismatch { expected: t.n(), got: point.len() });
    }
    if let Some(bad) = point.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFinite(bad.to_string()));
    }
    let mut prefix = Mat2::<S>::identity();
    let mut columns = Vec::with_capacity(t.n());
    for (j, z) in point.iter().enumerate() {
        let side = t.side_at(j);
        columns.push(adjoint_coords(&prefix, side));
        prefix = prefix.mul(&side.matrix(z.clone(), S::zero(), S::one()));
    }
    Ok(TangentFrame { columns })
}

/// Scalars whose frames have a computable rank.
pub trait FrameRank: Scalar {
    fn rank_of(columns: &[[Self; 3]]) -> usize;
}

impl FrameRank for ExactComplex {
    /// Gaussian elimination over Q(i).
    fn rank_of(columns: &[[Self; 3]]) -> usize {
        let mut rows: Vec<Vec<ExactComplex>> =
            (0..3).map(|r| columns.iter().map(|c| c[r].clone()).collect()).collect();
        let ncols = columns.len();
        let mut rank = 0;
        for col in 0..ncols {
            let Some(pivot) = (rank..rows.len()).find(|&r| !Scalar::is_zero(&rows[r][col])) else {
                continue;
            };
            rows.swap(rank, pivot);
            let inv = rows[rank][col].inv().expect("pivot is nonzero");
            for r in 0..rows.len() {
                if r == rank || Scalar::is_zero(&rows[r][col]) {
                    continue;
                }
                let factor = &rows[r][col] * &inv;
                for c in col..ncols {
                    let sub = &factor * &rows[rank][c];
                    rows[r][c] = &rows[r][c] - &sub;
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }
}

impl FrameRank for Complex64 {
    /// Count of singular values above `APPROX_RANK_TOL` times the largest.
    fn rank_of(columns: &[[Self; 3]]) -> usize {
        if columns.is_empty() {
            return 0;
        }
        let m = DMatrix::from_fn(3, columns.len(), |r, c| columns[c][r]);
        let sv = m.singular_values();
        let max = sv.iter().cloned().fold(0.0, f64::max);
        if max == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > APPROX_RANK_TOL * max).count()
    }
}

pub fn frame_rank<S: FrameRank>(f: &TangentFrame<S>) -> usize {
    S::rank_of(&f.columns)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankViolation {
    pub point: Vec<ExactComplex>,
    pub rank: usize,
    pub in_singular_set: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub n: usize,
    pub seed: u64,
    /// Sampled points with some nonzero interior coordinate (expected rank 3).
    pub regular_points: usize,
    /// Sampled points of S_N (expected rank < 3).
    pub singular_points: usize,
    pub violations: Vec<RankViolation>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A random point off S_N. Interior coordinates are zero with probability
/// 1/2 each (at least one is forced nonzero), so sparse patterns get probed.
pub fn random_regular_point(n: usize, seed: u64, index: usize) -> Vec<ExactComplex> {
    use rand::Rng;
    let mut rng = rng_for(seed, index);
    let mut p: Vec<ExactComplex> = (0..n)
        .map(|j| {
            if j == 0 || j == n - 1 || rng.gen_bool(0.5) {
                small_exact_nonzero(&mut rng)
            } else {
                ExactComplex::int(0)
            }
        })
        .collect();
    if p[1..n - 1].iter().all(Scalar::is_zero) {
        let j = rng.gen_range(1..n - 1);
        p[j] = small_exact_nonzero(&mut rng);
    }
    if rng.gen_bool(0.25) {
        p[0] = ExactComplex::int(0);
    }
    p
}

/// A random point of S_N.
pub fn random_singular_point(n: usize, seed: u64, index: usize) -> Vec<ExactComplex> {
    let mut rng = rng_for(seed, index);
    (0..n)
        .map(|j| if j == 0 || j == n - 1 { small_exact_nonzero(&mut rng) } else { ExactComplex::int(0) })
        .collect()
}

/// Samples `samples` points off S_N and `samples` points on it, computes the
/// exact frame rank at each, and records every point where rank 3 fails to
/// coincide with lying off S_N.
pub fn check_lemma_submersive(n: usize, samples: usize, seed: u64, exec: Execution) -> Result<LemmaReport> {
    if n < 4 {
        return Err(Error::InvalidLength { n, reason: "the submersion check covers N >= 4" });
    }
    let t = PhiTemplate::lower_first(n)?;
    let check = |point: Vec<ExactComplex>| -> Result<Option<RankViolation>> {
        let singular = in_singular_set(&point, n)?;
        let rank = frame_rank(&sl2_jacobian(&t, &point)?);
        let ok = if singular { rank < 3 } else { rank == 3 };
        Ok((!ok).then_some(RankViolation { point, rank, in_singular_set: singular }))
    };
    // Regular points use even stream indices, singular ones odd.
    let results = map_indices(2 * samples, exec, |i| {
        let point = if i % 2 == 0 {
            random_regular_point(n, seed, i)
        } else {
            random_singular_point(n, seed, i)
        };
        check(point)
    });
    let mut violations = Vec::new();
    for r in results {
        if let Some(v) = r? {
            violations.push(v);
        }
    }
    Ok(LemmaReport { n, seed, regular_points: samples, singular_points: samples, violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(v: i64) -> ExactComplex {
        ExactComplex::int(v)
    }

    #[test]
    fn three_factor_determinant_is_z2() {
        let t = PhiTemplate::lower_first(3).unwrap();
        for z2 in [-3, 0, 2, 7] {
            let f = sl2_jacobian(&t, &[ex(0), ex(z2), ex(0)]).unwrap();
            assert_eq!(f.determinant().unwrap(), ex(z2));
        }
        // Symbolically: the determinant polynomial in z2 is z2 itself at any z2.
        let z = ExactComplex::gaussian((3, 7), (-2, 5));
        let f = sl2_jacobian(&t, &[ex(0), z.clone(), ex(0)]).unwrap();
        assert_eq!(f.determinant().unwrap(), z);
    }

    #[test]
    fn rank_examples() {
        let t4 = PhiTemplate::lower_first(4).unwrap();
        assert_eq!(frame_rank(&sl2_jacobian(&t4, &[ex(0), ex(1), ex(1), ex(0)]).unwrap()), 3);
        assert_eq!(frame_rank(&sl2_jacobian(&t4, &[ex(5), ex(0), ex(0), ex(7)]).unwrap()), 2);
        let t6 = PhiTemplate::lower_first(6).unwrap();
        let p6 = [ex(1), ex(0), ex(0), ex(0), ex(0), ex(1)];
        assert!(frame_rank(&sl2_jacobian(&t6, &p6).unwrap()) <= 2);
        assert_eq!(frame_rank(&TangentFrame::<ExactComplex>::zero(4)), 0);
        assert_eq!(frame_rank(&TangentFrame::<Complex64>::zero(4)), 0);
    }

    #[test]
    fn approx_rank_matches_exact() {
        let t = PhiTemplate::lower_first(5).unwrap();
        for i in 0..50 {
            let p = if i % 2 == 0 { random_regular_point(5, 3, i) } else { random_singular_point(5, 3, i) };
            let exact = frame_rank(&sl2_jacobian(&t, &p).unwrap());
            let approx: Vec<Complex64> = p.iter().map(|x| x.to_approx()).collect();
            assert_eq!(frame_rank(&sl2_jacobian(&t, &approx).unwrap()), exact);
        }
        let bad = [Complex64::new(f64::NAN, 0.0); 5];
        assert!(sl2_jacobian(&t, &bad).is_err());
    }

    #[test]
    fn lemma_check_small() {
        let r = check_lemma_submersive(4, 100, 1, Execution::Parallel).unwrap();
        assert!(r.passed(), "{:?}", r.violations);
        let r = check_lemma_submersive(7, 100, 1, Execution::Sequential).unwrap();
        assert!(r.passed());
        assert!(check_lemma_submersive(3, 10, 1, Execution::Sequential).is_err());
    }
}
