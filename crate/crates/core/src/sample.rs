//! Seeded random exact scalars.

use num::complex::Complex64;
use num::{BigInt, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::SL2;
use crate::scalar::{ExactComplex, Rational, Scalar};
use crate::word::{Side, Word};

/// The RNG for sample `index` of a sweep seeded with `seed`. Each index owns
/// an independent ChaCha stream, so parallel and sequential sweeps draw the
/// same values.
pub fn rng_for(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// A rational `p/q` with `|p| <= num_bound`, `1 <= q <= den_bound`.
pub fn small_rational<R: Rng>(rng: &mut R, num_bound: i64, den_bound: i64) -> Rational {
    let p = rng.gen_range(-num_bound..=num_bound);
    let q = rng.gen_range(1..=den_bound);
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// A Gaussian rational with small numerators and denominators.
pub fn small_exact<R: Rng>(rng: &mut R) -> ExactComplex {
    ExactComplex::new(small_rational(rng, 5, 4), small_rational(rng, 5, 4))
}

/// Like [`small_exact`] but never zero.
pub fn small_exact_nonzero<R: Rng>(rng: &mut R) -> ExactComplex {
    loop {
        let v = small_exact(rng);
        if !Scalar::is_zero(&v) {
            return v;
        }
    }
}

/// A real rational, sometimes zero; used where exact zero patterns matter.
pub fn small_real<R: Rng>(rng: &mut R) -> ExactComplex {
    let r = small_rational(rng, 4, 3);
    if rng.gen_bool(0.1) {
        ExactComplex::real(Rational::zero())
    } else {
        ExactComplex::real(r)
    }
}

/// A point uniformly distributed in the disc of radius `r`.
pub fn in_disc<R: Rng>(rng: &mut R, r: f64) -> Complex64 {
    let rho = r * rng.gen::<f64>().sqrt();
    let theta = rng.gen::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(rho, theta)
}

/// A point of C^n uniformly distributed in the ball of radius `r`.
pub fn in_ball<R: Rng>(rng: &mut R, n: usize, r: f64) -> Vec<Complex64> {
    use rand::distributions::Distribution;
    let normal = StdNormal;
    let mut v: Vec<f64> = (0..2 * n).map(|_| normal.sample(rng)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let radius = r * rng.gen::<f64>().powf(1.0 / (2 * n) as f64);
    for x in &mut v {
        *x *= radius / norm;
    }
    v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

/// A random exact SL2 matrix. About a fifth of the draws have `a = 0` and
/// another fifth `c = 0`, so every factorization branch is exercised.
pub fn random_sl2<R: Rng>(rng: &mut R) -> SL2<ExactComplex> {
    let one = ExactComplex::int(1);
    let (a, b, c, d) = match rng.gen_range(0..10) {
        0 | 1 => {
            let b = small_exact_nonzero(rng);
            let c = (-&one).checked_div(&b).expect("b != 0");
            (ExactComplex::int(0), b, c, small_exact(rng))
        }
        2 | 3 => {
            let a = small_exact_nonzero(rng);
            let d = one.checked_div(&a).expect("a != 0");
            (a, small_exact(rng), ExactComplex::int(0), d)
        }
        _ => {
            let a = small_exact_nonzero(rng);
            let (b, c) = (small_exact(rng), small_exact(rng));
            let d = (&one + &(&b * &c)).checked_div(&a).expect("a != 0");
            (a, b, c, d)
        }
    };
    SL2::new(a, b, c, d).expect("determinant is 1 by construction")
}

/// A random alternating word of length `1..=max_len` with a random first side.
pub fn random_word<R: Rng>(rng: &mut R, max_len: usize) -> Word<ExactComplex> {
    let len = rng.gen_range(1..=max_len.max(1));
    let first = if rng.gen_bool(0.5) { Side::Upper } else { Side::Lower };
    Word::alternating(first, (0..len).map(|_| small_exact(rng)).collect::<Vec<_>>())
}

/// Box–Muller standard normal, enough for direction sampling.
struct StdNormal;

impl rand::distributions::Distribution<f64> for StdNormal {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u1: f64 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let a: Vec<ExactComplex> = (0..5).map(|_| small_exact(&mut rng_for(7, 3))).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let x = small_exact(&mut rng_for(7, 3));
        let y = small_exact(&mut rng_for(7, 4));
        let z = small_exact(&mut rng_for(8, 3));
        assert!(x != y || x != z);
    }

    #[test]
    fn random_matrices_and_words() {
        let mut rng = rng_for(3, 0);
        let mut zero_a = 0;
        for _ in 0..200 {
            let m = random_sl2(&mut rng);
            assert_eq!(m.mat().det(), ExactComplex::int(1));
            zero_a += usize::from(Scalar::is_zero(m.a()));
            let w = random_word(&mut rng, 6);
            assert!((1..=6).contains(&w.len()) && w.is_alternating());
        }
        assert!(zero_a > 0);
    }

    #[test]
    fn ball_radius() {
        let mut rng = rng_for(1, 0);
        for _ in 0..200 {
            let p = in_ball(&mut rng, 4, 2.0);
            let norm: f64 = p.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            assert!(norm <= 2.0 + 1e-12);
        }
    }
}
