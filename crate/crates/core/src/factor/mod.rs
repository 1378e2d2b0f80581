//! Explicit factorizations into elementary matrices.

mod bound;
pub mod cohn;
mod constant;
mod padding;

pub use bound::factor_count_bound;
pub use cohn::{
    cohn_eval, cohn_family_4, cohn_holo_5, cohn_holo_5_variant, cohn_holo_word, cohn_relations, holo_grid_residual,
    phi_series, CohnHolo, CohnTarget, GridPairing, GridReport, HoloVariant, COHN_TOL, FORMULA_TOL,
};
pub use constant::{factor_constant, factor_offdiag_zero, factor_three_pattern, factor_unit_corner};
pub use padding::pad_avoid_singular;

use serde::Serialize;

use crate::word::Word;

/// A word together with the target it is claimed to multiply out to.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Factorization<E, T> {
    pub word: Word<E>,
    pub target: T,
    /// Product equals target: exactly, or within `1e-10` for numeric entries.
    pub verified: bool,
    pub factor_count: usize,
    /// Max entrywise distance between product and target, when numeric.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

impl<E, T> Factorization<E, T> {
    pub fn new(word: Word<E>, target: T, verified: bool, residual: Option<f64>) -> Self {
        let factor_count = word.len();
        Factorization { word, target, verified, factor_count, residual }
    }
}
