//! Root systems in the ε-coordinate model, weight supports of highest-weight
//! representations, and the strong/weak non-resonance classification.
//!
//! Internally every vector is stored as an `i64` vector scaled by a common
//! denominator `D` of the system (the lcm over roots and fundamental
//! weights), so all inner-product tests are exact integer arithmetic.

mod build;
mod resonance;
mod weights;

pub use build::build_root_system;
pub use resonance::{
    cartan_row_gcds, nonresonance_class, resonance_analysis, weights_all_nontrivial, Classification,
    NontrivialityReport, ResonanceReport,
};
pub use weights::{weights_from_highest, weyl_orbit, WeightSet, WeightSource, DEFAULT_WEIGHT_LIMIT};

use crate::exact::Q;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

pub(crate) type IVec = Vec<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    BC,
    E6,
    E7,
    E8,
    F4,
    G2,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::A,
        Family::B,
        Family::C,
        Family::D,
        Family::BC,
        Family::E6,
        Family::E7,
        Family::E8,
        Family::F4,
        Family::G2,
    ];

    /// Rank of the exceptional families; `None` for the classical series.
    pub fn fixed_rank(self) -> Option<usize> {
        match self {
            Family::E6 => Some(6),
            Family::E7 => Some(7),
            Family::E8 => Some(8),
            Family::F4 => Some(4),
            Family::G2 => Some(2),
            _ => None,
        }
    }

    pub fn min_rank(self) -> usize {
        match self {
            Family::A | Family::BC => 1,
            Family::B | Family::C => 2,
            Family::D => 3,
            f => f.fixed_rank().unwrap(),
        }
    }

    pub fn is_valid_rank(self, rank: usize) -> bool {
        match self.fixed_rank() {
            Some(r) => rank == r,
            None => rank >= self.min_rank(),
        }
    }

    /// Family name as used on the command line; `E`, `F` and `G` are
    /// resolved with the rank.
    pub fn parse(name: &str, rank: usize) -> Result<Family, RootError> {
        let upper = name.trim().to_ascii_uppercase();
        let f = match upper.as_str() {
            "A" => Family::A,
            "B" => Family::B,
            "C" => Family::C,
            "D" => Family::D,
            "BC" => Family::BC,
            "E6" => Family::E6,
            "E7" => Family::E7,
            "E8" => Family::E8,
            "F4" | "F" => Family::F4,
            "G2" | "G" => Family::G2,
            "E" => match rank {
                6 => Family::E6,
                7 => Family::E7,
                8 => Family::E8,
                _ => {
                    return Err(RootError::InvalidRank {
                        family: "E".into(),
                        rank,
                    })
                }
            },
            _ => return Err(RootError::UnknownFamily(name.to_string())),
        };
        Ok(f)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Family {
    type Err = RootError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let f = Family::parse(s, 0);
        match f {
            Err(RootError::InvalidRank { .. }) => Err(RootError::UnknownFamily(s.to_string())),
            other => other,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("invalid rank {rank} for family {family}")]
    InvalidRank { family: String, rank: usize },
    #[error("unknown root system family {0:?}")]
    UnknownFamily(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("highest weight is not dominant")]
    NotDominant,
    #[error("highest weight is not algebraically integral")]
    NotIntegral,
    #[error("weight set is empty")]
    EmptyWeightSet,
    #[error("set exceeds the size limit {limit}")]
    TooLarge { limit: usize },
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

/// A (possibly non-reduced) root system with a chosen base.
#[derive(Clone, Debug)]
pub struct RootSystem {
    pub(crate) family: Family,
    pub(crate) rank: usize,
    pub(crate) ambient: usize,
    pub(crate) denom: i64,
    /// Sorted nonzero roots.
    pub(crate) roots: Vec<IVec>,
    pub(crate) positive: Vec<IVec>,
    pub(crate) simple: Vec<IVec>,
    pub(crate) cartan: Vec<Vec<i64>>,
    pub(crate) fundamental: Vec<IVec>,
    /// Basis dual to the simple coroots; equals `fundamental` except for BC.
    pub(crate) coweight_dual: Vec<IVec>,
}

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn primitive(v: &[i64]) -> IVec {
    let g = v.iter().fold(0i64, |g, x| g.gcd(x));
    if g == 0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / g).collect()
}

impl RootSystem {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Dimension of the ε-coordinate space.
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn is_reduced(&self) -> bool {
        self.family != Family::BC
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub(crate) fn to_q(&self, v: &[i64]) -> Vec<Q> {
        let d = num_bigint::BigInt::from(self.denom);
        v.iter()
            .map(|&x| Q::new(num_bigint::BigInt::from(x), d.clone()))
            .collect()
    }

    /// Scaled integer form, or `None` when a denominator does not divide `D`.
    pub(crate) fn from_q(&self, v: &[Q]) -> Option<IVec> {
        v.iter()
            .map(|x| {
                let s = x * Q::from_integer(self.denom.into());
                if s.is_integer() {
                    s.to_integer().to_i64()
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn roots(&self) -> Vec<Vec<Q>> {
        self.roots.iter().map(|r| self.to_q(r)).collect()
    }

    pub fn positive_roots(&self) -> Vec<Vec<Q>> {
        self.positive.iter().map(|r| self.to_q(r)).collect()
    }

    pub fn simple_roots(&self) -> Vec<Vec<Q>> {
        self.simple.iter().map(|r| self.to_q(r)).collect()
    }

    pub fn fundamental_weights(&self) -> Vec<Vec<Q>> {
        self.fundamental.iter().map(|r| self.to_q(r)).collect()
    }

    pub fn is_root(&self, v: &[Q]) -> bool {
        match self.from_q(v) {
            Some(iv) => self.roots.binary_search(&iv).is_ok(),
            None => false,
        }
    }

    pub(crate) fn is_root_scaled(&self, v: &[i64]) -> bool {
        self.roots.binary_search_by(|r| r.as_slice().cmp(v)).is_ok()
    }

    /// Simple reflection `s_i(v) = v − 2⟨v,βᵢ⟩/⟨βᵢ,βᵢ⟩ βᵢ`.
    pub fn reflect(&self, i: usize, v: &[Q]) -> Vec<Q> {
        let b = self.to_q(&self.simple[i]);
        let vb: Q = v.iter().zip(&b).map(|(x, y)| x * y).sum();
        let bb: Q = b.iter().map(|y| y * y).sum();
        let c = Q::from_integer(2.into()) * vb / bb;
        v.iter().zip(&b).map(|(x, y)| x - &c * y).collect()
    }

    /// `λ = Σ cᵢ ϖᵢ` from Dynkin labels.
    pub fn from_dynkin(&self, labels: &[Q]) -> Result<Vec<Q>, RootError> {
        if labels.len() != self.rank {
            return Err(RootError::DimensionMismatch {
                expected: self.rank,
                found: labels.len(),
            });
        }
        let w = self.fundamental_weights();
        let mut out = vec![Q::zero(); self.ambient];
        for (c, wi) in labels.iter().zip(&w) {
            for (o, x) in out.iter_mut().zip(wi) {
                *o += c * x;
            }
        }
        Ok(out)
    }

    /// Checks the type invariants; run once on construction.
    pub(crate) fn validate(&self) -> Result<(), RootError> {
        let bad = |m: &str| Err(RootError::Inconsistent(format!("{} {}: {m}", self.family, self.rank)));
        for r in &self.roots {
            let neg: IVec = r.iter().map(|x| -x).collect();
            if !self.is_root_scaled(&neg) {
                return bad("roots not closed under negation");
            }
        }
        for (i, bi) in self.simple.iter().enumerate() {
            for (j, bj) in self.simple.iter().enumerate() {
                let num = 2 * dot(bi, bj);
                let den = dot(bj, bj);
                if num % den != 0 || num / den != self.cartan[i][j] {
                    return bad("cartan entry mismatch");
                }
            }
        }
        for (i, w) in self.coweight_dual.iter().enumerate() {
            for (j, b) in self.simple.iter().enumerate() {
                if 2 * dot(w, b) != (i == j) as i64 * dot(b, b) {
                    return bad("dual basis fails");
                }
            }
        }
        // every root is an integral combination of simple roots with one sign
        for r in &self.roots {
            let coeffs: Vec<i64> = self
                .coweight_dual
                .iter()
                .zip(&self.simple)
                .map(|(w, b)| {
                    let n = 2 * dot(r, w);
                    let d = dot(b, b);
                    if n % d == 0 {
                        n / d
                    } else {
                        i64::MIN
                    }
                })
                .collect();
            if coeffs.contains(&i64::MIN) {
                return bad("root not in the simple-root lattice");
            }
            if !(coeffs.iter().all(|&c| c >= 0) || coeffs.iter().all(|&c| c <= 0)) {
                return bad("root with mixed-sign simple coordinates");
            }
        }
        if self.positive.len() * 2 != self.roots.len() {
            return bad("positive roots are not half of all roots");
        }
        Ok(())
    }
}

impl Serialize for RootSystem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use crate::json::rational_vec;
        use serde::ser::SerializeStruct;
        let vecs = |vs: &[IVec]| -> Vec<serde_json::Value> {
            vs.iter().map(|v| rational_vec(&self.to_q(v))).collect()
        };
        let mut st = s.serialize_struct("RootSystem", 7)?;
        st.serialize_field("family", &self.family)?;
        st.serialize_field("rank", &self.rank)?;
        st.serialize_field("ambient_dim", &self.ambient)?;
        st.serialize_field("roots", &vecs(&self.roots))?;
        st.serialize_field("simple_roots", &vecs(&self.simple))?;
        st.serialize_field("cartan", &self.cartan)?;
        st.serialize_field("fundamental_weights", &vecs(&self.fundamental))?;
        st.end()
    }
}
