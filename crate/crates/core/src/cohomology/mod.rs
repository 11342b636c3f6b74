//! Presentation-relative twisted cohomology: cochains and coboundaries over a
//! representation `ψ` of a finitely presented group, the defect of composed
//! lifts along words, and the exact lifting-obstruction solver.
//!
//! Convention: lifts act on the left and a word `s₁⋯sₘ` lifts to the
//! composition `α̃(s₁) ∘ ⋯ ∘ α̃(sₘ)`. Correcting each generator lift by a
//! translation `η(g)` changes the lift of `w` by
//! `T(w) = Σᵢ ψ(s₁⋯sᵢ₋₁)·η(sᵢ)`, with `η(g⁻¹) = −ψ(g)⁻¹η(g)`.

mod cochain;
mod lifting;

pub use cochain::{coboundary, coboundary_eval, induced_pairwise_defect, Cochain};
pub use lifting::{
    corrected_defect, relator_equation, solve_lifting, word_correction, word_defect, LiftingOutcome, RelatorEquation,
};

use crate::exact::{Q, QMatrix};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CohomologyError {
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cochain of degree {expected} evaluated on a {found}-tuple")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("matrix for generator {0} is not invertible")]
    NotInvertible(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }
}

pub type Word = Vec<Letter>;

/// Cancels adjacent `s s⁻¹` pairs.
pub fn free_reduce(w: &[Letter]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Product in the free group.
pub fn multiply(a: &[Letter], b: &[Letter]) -> Word {
    let mut w = a.to_vec();
    w.extend_from_slice(b);
    free_reduce(&w)
}

pub fn invert(w: &[Letter]) -> Word {
    w.iter().rev().map(|l| l.inv()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl GroupPresentation {
    /// Relators are freely reduced on construction.
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self, CohomologyError> {
        for (i, g) in generators.iter().enumerate() {
            if g.is_empty() || g.contains("^") {
                return Err(CohomologyError::Malformed(format!("invalid generator name {g:?}")));
            }
            if generators[..i].contains(g) {
                return Err(CohomologyError::Malformed(format!("duplicate generator {g:?}")));
            }
        }
        for r in &relators {
            if let Some(l) = r.iter().find(|l| l.generator >= generators.len()) {
                return Err(CohomologyError::UnknownGenerator(format!("index {}", l.generator)));
            }
        }
        Ok(GroupPresentation {
            relators: relators.iter().map(|r| free_reduce(r)).collect(),
            generators,
        })
    }

    /// Builds a presentation from symbols such as `["a", "b", "a^-1", "b^-1"]`.
    pub fn from_symbols(generators: &[&str], relators: &[Vec<&str>]) -> Result<Self, CohomologyError> {
        let gens: Vec<String> = generators.iter().map(|s| s.to_string()).collect();
        let rels = relators
            .iter()
            .map(|r| parse_word(&gens, r))
            .collect::<Result<Vec<_>, _>>()?;
        GroupPresentation::new(gens, rels)
    }

    pub fn letter(&self, symbol: &str) -> Result<Letter, CohomologyError> {
        parse_letter(&self.generators, symbol)
    }

    pub fn word(&self, symbols: &[&str]) -> Result<Word, CohomologyError> {
        parse_word(&self.generators, symbols)
    }

    pub fn format_word(&self, w: &[Letter]) -> Vec<String> {
        w.iter()
            .map(|l| {
                let g = &self.generators[l.generator];
                if l.inverse {
                    format!("{g}^-1")
                } else {
                    g.clone()
                }
            })
            .collect()
    }
}

fn parse_letter(gens: &[String], symbol: &str) -> Result<Letter, CohomologyError> {
    let s = symbol.trim();
    let (name, inverse) = match s.strip_suffix("^-1") {
        Some(n) => (n, true),
        None => (s, false),
    };
    gens.iter()
        .position(|g| g == name)
        .map(|i| Letter::new(i, inverse))
        .ok_or_else(|| CohomologyError::UnknownGenerator(symbol.to_string()))
}

pub fn parse_word<S: AsRef<str>>(gens: &[String], symbols: &[S]) -> Result<Word, CohomologyError> {
    symbols.iter().map(|s| parse_letter(gens, s.as_ref())).collect()
}

/// Generator images `ψ(gᵢ)` with exact inverses.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    dim: usize,
    mats: Arc<Vec<QMatrix>>,
    invs: Arc<Vec<QMatrix>>,
}

impl Representation {
    pub fn new(dim: usize, mats: Vec<QMatrix>) -> Result<Self, CohomologyError> {
        let mut invs = Vec::with_capacity(mats.len());
        for (i, m) in mats.iter().enumerate() {
            if m.rows() != dim || m.cols() != dim {
                return Err(CohomologyError::DimensionMismatch {
                    expected: dim,
                    found: if m.rows() != dim { m.rows() } else { m.cols() },
                });
            }
            invs.push(m.inverse().ok_or_else(|| CohomologyError::NotInvertible(format!("#{i}")))?);
        }
        Ok(Representation {
            dim,
            mats: Arc::new(mats),
            invs: Arc::new(invs),
        })
    }

    pub fn trivial(dim: usize, generators: usize) -> Self {
        Representation::new(dim, vec![QMatrix::identity(dim); generators]).expect("identity is invertible")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> usize {
        self.mats.len()
    }

    pub fn matrix(&self, g: usize) -> &QMatrix {
        &self.mats[g]
    }

    pub fn letter(&self, l: Letter) -> Result<&QMatrix, CohomologyError> {
        let table = if l.inverse { &self.invs } else { &self.mats };
        table
            .get(l.generator)
            .ok_or_else(|| CohomologyError::UnknownGenerator(format!("index {}", l.generator)))
    }

    /// `ψ(s₁)⋯ψ(sₘ)`.
    pub fn word(&self, w: &[Letter]) -> Result<QMatrix, CohomologyError> {
        let mut m = QMatrix::identity(self.dim);
        for &l in w {
            m = &m * self.letter(l)?;
        }
        Ok(m)
    }

    /// `P ψ P⁻¹`.
    pub fn conjugate(&self, p: &QMatrix) -> Result<Self, CohomologyError> {
        let p_inv = p.inverse().ok_or_else(|| CohomologyError::NotInvertible("conjugator".into()))?;
        Representation::new(self.dim, self.mats.iter().map(|m| &(p * m) * &p_inv).collect())
    }
}

/// Presentation, representation on generators and the integer defect of each relator.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedSystem {
    pub presentation: GroupPresentation,
    pub rho: Representation,
    pub defects: Vec<Vec<BigInt>>,
}

impl TwistedSystem {
    pub fn new(presentation: GroupPresentation, rho: Representation, defects: Vec<Vec<BigInt>>) -> Result<Self, CohomologyError> {
        if rho.generators() != presentation.generators.len() {
            return Err(CohomologyError::Malformed(format!(
                "{} generator matrices for {} generators",
                rho.generators(),
                presentation.generators.len()
            )));
        }
        if defects.len() != presentation.relators.len() {
            return Err(CohomologyError::Malformed(format!(
                "{} defects for {} relators",
                defects.len(),
                presentation.relators.len()
            )));
        }
        if let Some(v) = defects.iter().find(|v| v.len() != rho.dim()) {
            return Err(CohomologyError::DimensionMismatch {
                expected: rho.dim(),
                found: v.len(),
            });
        }
        Ok(TwistedSystem {
            presentation,
            rho,
            defects,
        })
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub(crate) fn defect_q(&self, r: usize) -> Vec<Q> {
        self.defects[r].iter().map(|x| Q::from_integer(x.clone())).collect()
    }

    pub fn zero_vector(&self) -> Vec<Q> {
        vec![Q::zero(); self.dim()]
    }
}

#[cfg(test)]
mod tests;
