//! Elementary factorization of SL2-valued maps: the alternating product maps
//! Φ_N, their fibers and submersion locus, explicit factorizations of constant
//! matrices and of the Cohn matrix, and the winding-number obstruction to a
//! holomorphic four-factor factorization of the latter.
//!
//! Exact computations run over Gaussian rationals ([`scalar::ExactComplex`]);
//! numeric ones over `Complex64`.

pub mod compensated;
pub mod error;
pub mod factor;
pub mod fiber;
pub mod matrix;
pub mod obstruction;
pub mod par;
pub mod poly;
pub mod sample;
pub mod scalar;
pub mod spray;
pub mod submersion;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
pub use matrix::{Mat2, SL2};
pub use par::Execution;
pub use poly::MultiPoly;
pub use scalar::{ApproxComplex, ExactComplex, Rational, Scalar};
pub use word::{ElementaryFactor, PhiTemplate, Side, Word};
