use super::ConesError;
use crate::matrix_core::IntMatrix;
use nalgebra::{DMatrix, DVector};
use std::fmt;
use std::sync::Arc;

type PointFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
type JacobianFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;

/// Differentiable map of `ℝ^d` given by closures for the value and the derivative.
#[derive(Clone)]
pub struct NonlinearMap {
    dim: usize,
    map: Arc<PointFn>,
    jacobian: Arc<JacobianFn>,
}

impl NonlinearMap {
    pub fn new(
        dim: usize,
        map: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        jacobian: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        NonlinearMap {
            dim,
            map: Arc::new(map),
            jacobian: Arc::new(jacobian),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (self.map)(x)
    }

    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        (self.jacobian)(x)
    }
}

impl fmt::Debug for NonlinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NonlinearMap(dim = {})", self.dim)
    }
}

#[derive(Clone, Debug)]
pub enum MapData {
    Linear(DMatrix<f64>),
    Nonlinear(NonlinearMap),
}

impl MapData {
    pub fn linear(m: &IntMatrix) -> Self {
        MapData::Linear(m.to_f64())
    }

    pub fn identity(d: usize) -> Self {
        MapData::Linear(DMatrix::identity(d, d))
    }

    pub fn dim(&self) -> usize {
        match self {
            MapData::Linear(m) => m.nrows(),
            MapData::Nonlinear(n) => n.dim,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            MapData::Linear(m) => (m * DVector::from_column_slice(x)).iter().copied().collect(),
            MapData::Nonlinear(n) => n.apply(x),
        }
    }

    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        match self {
            MapData::Linear(m) => m.clone(),
            MapData::Nonlinear(n) => n.jacobian(x),
        }
    }
}

/// Composition of maps, `factors[0]` applied first.
#[derive(Clone, Debug)]
pub struct ComposedMap {
    factors: Vec<MapData>,
}

impl ComposedMap {
    pub fn new(factors: Vec<MapData>) -> Result<Self, ConesError> {
        let Some(first) = factors.first() else {
            return Err(ConesError::InvalidParameter("composition needs at least one factor".into()));
        };
        let d = first.dim();
        if let Some(bad) = factors.iter().find(|m| m.dim() != d) {
            return Err(ConesError::DimensionMismatch {
                expected: d,
                found: bad.dim(),
            });
        }
        Ok(ComposedMap { factors })
    }

    pub fn single(m: MapData) -> Self {
        ComposedMap { factors: vec![m] }
    }

    /// `fⁿ ∘ g ∘ fⁿ`; linear runs are multiplied out.
    pub fn sandwich(f: &DMatrix<f64>, g: MapData, n: u64) -> Result<Self, ConesError> {
        let exp = u32::try_from(n).map_err(|_| ConesError::InvalidParameter(format!("power {n} is too large")))?;
        let fp = f.pow(exp);
        let factors = match g {
            MapData::Linear(m) => vec![MapData::Linear(&fp * m * &fp)],
            other => vec![MapData::Linear(fp.clone()), other, MapData::Linear(fp)],
        };
        ComposedMap::new(factors)
    }

    pub fn dim(&self) -> usize {
        self.factors[0].dim()
    }

    pub fn factors(&self) -> &[MapData] {
        &self.factors
    }

    /// `a ∘ b` as a map: `b` first.
    pub fn then(&self, after: &ComposedMap) -> ComposedMap {
        let mut factors = self.factors.clone();
        factors.extend(after.factors.iter().cloned());
        ComposedMap { factors }
    }

    /// `(F(x), DF(x))` by the chain rule.
    pub fn eval_with_derivative(&self, x: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        let d = self.dim();
        let mut p = x.to_vec();
        let mut jac = DMatrix::identity(d, d);
        for m in &self.factors {
            jac = m.jacobian(&p) * jac;
            p = m.apply(&p);
        }
        (p, jac)
    }
}
