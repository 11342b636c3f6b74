use super::{free_reduce, multiply, CohomologyError, Representation, Word};
use crate::exact::{vec_add, vec_sub, Q};
use num_traits::Zero;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

type CochainFn = dyn Fn(&[Word]) -> Result<Vec<Q>, CohomologyError> + Send + Sync;

/// A `k`-cochain: a function of `k` freely reduced words, evaluated on demand.
#[derive(Clone)]
pub struct Cochain {
    degree: usize,
    dim: usize,
    f: Arc<CochainFn>,
}

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cochain(degree = {}, dim = {})", self.degree, self.dim)
    }
}

impl Cochain {
    /// `f` receives freely reduced words.
    pub fn from_fn(degree: usize, dim: usize, f: impl Fn(&[Word]) -> Vec<Q> + Send + Sync + 'static) -> Self {
        Cochain::try_from_fn(degree, dim, move |t| Ok(f(t)))
    }

    pub fn try_from_fn(
        degree: usize,
        dim: usize,
        f: impl Fn(&[Word]) -> Result<Vec<Q>, CohomologyError> + Send + Sync + 'static,
    ) -> Self {
        Cochain {
            degree,
            dim,
            f: Arc::new(f),
        }
    }

    /// Finite table keyed by reduced tuples; absent tuples map to zero.
    pub fn from_table(degree: usize, dim: usize, table: HashMap<Vec<Word>, Vec<Q>>) -> Result<Self, CohomologyError> {
        let mut reduced = HashMap::with_capacity(table.len());
        for (k, v) in table {
            if k.len() != degree {
                return Err(CohomologyError::DegreeMismatch {
                    expected: degree,
                    found: k.len(),
                });
            }
            if v.len() != dim {
                return Err(CohomologyError::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            reduced.insert(k.iter().map(|w| free_reduce(w)).collect::<Vec<_>>(), v);
        }
        Ok(Cochain::from_fn(degree, dim, move |t| {
            reduced.get(t).cloned().unwrap_or_else(|| vec![Q::zero(); dim])
        }))
    }

    pub fn constant(v: Vec<Q>) -> Self {
        let dim = v.len();
        Cochain::from_fn(0, dim, move |_| v.clone())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, tuple: &[Word]) -> Result<Vec<Q>, CohomologyError> {
        if tuple.len() != self.degree {
            return Err(CohomologyError::DegreeMismatch {
                expected: self.degree,
                found: tuple.len(),
            });
        }
        let reduced: Vec<Word> = tuple.iter().map(|w| free_reduce(w)).collect();
        let v = (self.f)(&reduced)?;
        if v.len() != self.dim {
            return Err(CohomologyError::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(v)
    }
}

/// `(d f)(γ₁,…,γₖ₊₁) = ψ(γ₁)f(γ₂,…) + Σⱼ(−1)ʲ f(…,γⱼγⱼ₊₁,…) + (−1)ᵏ⁺¹ f(γ₁,…,γₖ)`.
pub fn coboundary_eval(rho: &Representation, k: usize, f: &Cochain, tuple: &[Word]) -> Result<Vec<Q>, CohomologyError> {
    if f.degree() != k {
        return Err(CohomologyError::DegreeMismatch {
            expected: k,
            found: f.degree(),
        });
    }
    if tuple.len() != k + 1 {
        return Err(CohomologyError::DegreeMismatch {
            expected: k + 1,
            found: tuple.len(),
        });
    }
    if f.dim() != rho.dim() {
        return Err(CohomologyError::DimensionMismatch {
            expected: rho.dim(),
            found: f.dim(),
        });
    }
    let mut acc = rho.word(&tuple[0])?.mul_vec(&f.eval(&tuple[1..])?);
    for j in 1..=k {
        let mut merged: Vec<Word> = tuple[..j - 1].to_vec();
        merged.push(multiply(&tuple[j - 1], &tuple[j]));
        merged.extend_from_slice(&tuple[j + 1..]);
        let term = f.eval(&merged)?;
        acc = if j % 2 == 0 { vec_add(&acc, &term) } else { vec_sub(&acc, &term) };
    }
    let last = f.eval(&tuple[..k])?;
    acc = if (k + 1) % 2 == 0 { vec_add(&acc, &last) } else { vec_sub(&acc, &last) };
    Ok(acc)
}

/// `d f` as a lazily evaluated cochain of degree `k + 1`.
pub fn coboundary(rho: &Representation, f: &Cochain) -> Cochain {
    let (rho, f2) = (rho.clone(), f.clone());
    let k = f.degree();
    Cochain::try_from_fn(k + 1, f.dim(), move |t| coboundary_eval(&rho, k, &f2, t))
}

/// Translation parts `c(γ)` of lifts `x ↦ ψ(γ)x + c(γ)` give the pairwise defect
/// `β(γ₁,γ₂) = c(γ₁γ₂) − c(γ₁) − ψ(γ₁)c(γ₂)` with `α̃(γ₁)∘α̃(γ₂) + β = α̃(γ₁γ₂)`.
pub fn induced_pairwise_defect(rho: &Representation, lifts: &Cochain) -> Result<Cochain, CohomologyError> {
    if lifts.degree() != 1 {
        return Err(CohomologyError::DegreeMismatch {
            expected: 1,
            found: lifts.degree(),
        });
    }
    let (rho, c) = (rho.clone(), lifts.clone());
    let dim = c.dim();
    Ok(Cochain::try_from_fn(2, dim, move |t| {
        let prod = c.eval(&[multiply(&t[0], &t[1])])?;
        let first = c.eval(&t[..1])?;
        let twisted = rho.word(&t[0])?.mul_vec(&c.eval(&t[1..])?);
        Ok(vec_sub(&vec_sub(&prod, &first), &twisted))
    }))
}
