//! Linear algebra over integer and rational matrices: hyperbolicity,
//! invariant splittings, adapted norms, regularity profiles and rank tests.
//!
//! Eigenvalues are always obtained from the exact characteristic polynomial
//! (Berkowitz recursion over ℚ), split into squarefree factors before any
//! floating-point root finding, so repeated eigenvalues keep their exact
//! multiplicities.

mod adapted;
mod int_matrix;
mod regularity;
mod splitting;

pub use adapted::{adapted_norm, AdaptedNorm};
pub use int_matrix::IntMatrix;
pub use regularity::{rank_one_factor_test, regularity_profile, RankReport, RegularityProfile};
pub use splitting::{hyperbolic_splitting, is_hyperbolic, HyperbolicSplitting, HyperbolicityReport};

use crate::exact::{squarefree_decomposition, QMatrix};
use nalgebra::Complex;
use thiserror::Error;

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("tolerance {0} outside (0, 0.5)")]
    ToleranceOutOfRange(f64),
    #[error("matrix is not hyperbolic (eigenvalue moduli {moduli:?})")]
    NotHyperbolic { moduli: Vec<f64> },
    #[error("margin makes the adapted rate {rate} not contracting")]
    MarginTooLarge { rate: f64 },
    #[error("matrix is not unimodular (det = {det})")]
    NotUnimodular { det: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty input")]
    Empty,
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Eigenvalues with exact multiplicities.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub distinct: Vec<(Complex<f64>, usize)>,
}

impl Spectrum {
    pub fn of(m: &QMatrix) -> Self {
        let p = m.char_poly();
        let mut distinct = Vec::new();
        for (factor, mult) in squarefree_decomposition(&p) {
            for z in factor.roots_squarefree() {
                distinct.push((z, mult));
            }
        }
        Spectrum { distinct }
    }

    pub fn eigenvalues(&self) -> Vec<Complex<f64>> {
        self.distinct
            .iter()
            .flat_map(|&(z, m)| std::iter::repeat_n(z, m))
            .collect()
    }

    /// Moduli with multiplicity, sorted descending.
    pub fn moduli(&self) -> Vec<f64> {
        let mut m: Vec<f64> = self.eigenvalues().iter().map(|z| z.norm()).collect();
        m.sort_by(|a, b| b.total_cmp(a));
        m
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<(), MatrixError> {
    if tol > 0.0 && tol < 0.5 {
        Ok(())
    } else {
        Err(MatrixError::ToleranceOutOfRange(tol))
    }
}
