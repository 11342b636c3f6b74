//! Semiconjugacies `h = id + w` with `A ∘ h = h ∘ f` for perturbations
//! `f(x) = Ax + u(x)` of a hyperbolic toral automorphism.
//!
//! The corrector is the two-sided series
//! `w = Σ_{j≥0} A_u^{-(j+1)} u_u(f^j x) − Σ_{j≥1} A_s^{j-1} u_s(f^{-j} x)`,
//! truncated where the adapted-norm tail drops below a quarter of the
//! tolerance. Points are fixed-size arrays of length [`MAX_DIM`].

mod field;
mod holder;
pub(crate) mod linalg;
mod map;
mod solver;

pub use field::{ConjugatedField, FnField, PeriodicDisplacement, PeriodicField, TrigField, TrigMode};
pub use holder::{holder_exponent_estimate, HolderEstimate, MIN_HOLDER_PAIRS};
pub use linalg::torus_dist;
pub use map::{PreimageMethod, TorusMap, PREIMAGE_STEP_TOL};
pub use solver::{
    residual, solve_semiconjugacy, Corrector, OrbitValues, PicardPath, PicardValue, SemiconjugacySolution, SolveOptions,
    ADAPTED_MARGIN,
};

use crate::matrix_core::{IntMatrix, MatrixError};
use num_traits::ToPrimitive;
use serde::ser::SerializeStruct;
use serde::Serialize;
use thiserror::Error;

pub const MAX_DIM: usize = 4;
pub const MAX_GRID: usize = 1024;
/// Cap on `n^d` for the output grid.
pub const MAX_NODES: usize = 1 << 20;

pub type Pt = [f64; MAX_DIM];
pub type Mat = [[f64; MAX_DIM]; MAX_DIM];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemiconjError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {dim} is outside 1..=4")]
    DimensionTooLarge { dim: usize },
    #[error("grid with {n} nodes per axis exceeds the limit (at most {max} per axis, {} nodes)", MAX_NODES)]
    GridTooLarge { n: usize, max: usize },
    #[error("matrix is not hyperbolic (eigenvalue moduli {moduli:?})")]
    NotHyperbolic { moduli: Vec<f64> },
    #[error("f is not invertible: preimage iteration fails near {point:?}")]
    NotInvertible { point: Vec<f64> },
    #[error("{needed} series terms needed, budget is {max_terms}")]
    Budget { needed: usize, max_terms: usize },
    #[error("residual {residual:e} exceeds tolerance {tol:e}")]
    ResidualTooLarge { residual: f64, tol: f64 },
    #[error("only {got} usable pairs, need {needed}")]
    InsufficientSamples { got: usize, needed: usize },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("invalid field: {0}")]
    Field(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

pub(crate) fn int_to_mat(a: &IntMatrix) -> Mat {
    let mut m = [[0.0; MAX_DIM]; MAX_DIM];
    for i in 0..a.dim().min(MAX_DIM) {
        for j in 0..a.dim().min(MAX_DIM) {
            m[i][j] = a.get(i, j).to_f64().unwrap_or(f64::NAN);
        }
    }
    m
}

/// Copies a slice into a point, zero-padding to [`MAX_DIM`].
pub fn point(v: &[f64]) -> Pt {
    let mut p = [0.0; MAX_DIM];
    let k = v.len().min(MAX_DIM);
    p[..k].copy_from_slice(&v[..k]);
    p
}

impl Serialize for PeriodicDisplacement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let d = self.dim();
        let values: Vec<&[f64]> = self.values().iter().map(|v| &v[..d]).collect();
        let mut st = s.serialize_struct("PeriodicDisplacement", 4)?;
        st.serialize_field("dim", &d)?;
        st.serialize_field("grid_shape", &self.grid_shape())?;
        st.serialize_field("sup_norm", &self.sup_norm())?;
        st.serialize_field("values", &values)?;
        st.end()
    }
}
