use super::{dot, IVec, RootError, RootSystem};
use crate::exact::Q;
use num_traits::Zero;
use serde::Serialize;
use std::collections::{BTreeSet, HashSet, VecDeque};

pub const DEFAULT_WEIGHT_LIMIT: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSource {
    Explicit,
    HighestWeight {
        #[serde(serialize_with = "crate::json::ser_q_vec")]
        lambda: Vec<Q>,
    },
}

/// Support of a representation: distinct weights, sorted.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightSet {
    #[serde(serialize_with = "crate::json::ser_q_vecs")]
    pub weights: Vec<Vec<Q>>,
    pub source: WeightSource,
}

impl WeightSet {
    pub fn explicit(mut weights: Vec<Vec<Q>>) -> Self {
        weights.sort();
        weights.dedup();
        WeightSet {
            weights,
            source: WeightSource::Explicit,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.weights.binary_search_by(|w| w.as_slice().cmp(v)).is_ok()
    }
}

/// Closure of `{v}` under the simple reflections.
pub fn weyl_orbit(rs: &RootSystem, v: &[Q], limit: usize) -> Result<Vec<Vec<Q>>, RootError> {
    if v.len() != rs.ambient {
        return Err(RootError::DimensionMismatch {
            expected: rs.ambient,
            found: v.len(),
        });
    }
    let mut seen: BTreeSet<Vec<Q>> = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(v.to_vec());
    queue.push_back(v.to_vec());
    while let Some(x) = queue.pop_front() {
        for i in 0..rs.rank {
            let y = rs.reflect(i, &x);
            if !seen.contains(&y) {
                if seen.len() >= limit {
                    return Err(RootError::TooLarge { limit });
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// `2⟨v,ξ⟩/⟨ξ,ξ⟩` when integral.
pub(crate) fn coroot_pairing(v: &[i64], xi: &[i64]) -> Option<i64> {
    let n = 2 * dot(v, xi);
    let d = dot(xi, xi);
    (n % d == 0).then(|| n / d)
}

impl RootSystem {
    /// Orthogonal projection onto the span of the roots, `Σᵢ ⟨v, βᵢ^∨⟩ ϖᵢ`.
    pub fn project_to_span(&self, v: &[Q]) -> Result<Vec<Q>, RootError> {
        if v.len() != self.ambient {
            return Err(RootError::DimensionMismatch {
                expected: self.ambient,
                found: v.len(),
            });
        }
        let two = Q::from_integer(2.into());
        let mut out = vec![Q::zero(); self.ambient];
        for (b, w) in self.simple.iter().zip(&self.coweight_dual) {
            let bq = self.to_q(b);
            let vb: Q = v.iter().zip(&bq).map(|(x, y)| x * y).sum();
            let bb: Q = bq.iter().map(|y| y * y).sum();
            let c = &two * vb / bb;
            for (o, x) in out.iter_mut().zip(self.to_q(w)) {
                *o += &c * x;
            }
        }
        Ok(out)
    }

    /// Dynkin labels `⟨λ, βᵢ^∨⟩` against the simple roots.
    pub fn dynkin_labels(&self, v: &[Q]) -> Vec<Q> {
        let two = Q::from_integer(2.into());
        self.simple
            .iter()
            .map(|b| {
                let bq = self.to_q(b);
                let vb: Q = v.iter().zip(&bq).map(|(x, y)| x * y).sum();
                let bb: Q = bq.iter().map(|y| y * y).sum();
                &two * vb / bb
            })
            .collect()
    }

    pub fn is_dominant(&self, v: &[Q]) -> bool {
        self.dynkin_labels(v).iter().all(|c| *c >= Q::zero())
    }

    /// `2⟨v,ξ⟩/⟨ξ,ξ⟩ ∈ ℤ` for every root `ξ`.
    pub fn is_integral(&self, v: &[Q]) -> bool {
        let Ok(p) = self.project_to_span(v) else {
            return false;
        };
        match self.from_q(&p) {
            Some(iv) => self.roots.iter().all(|r| coroot_pairing(&iv, r).is_some()),
            None => false,
        }
    }
}

/// Saturated weight support of the irreducible representation with highest
/// weight `λ`, by root strings down from `λ`.
///
/// `λ` is given in ε-coordinates and first projected to the span of the roots.
pub fn weights_from_highest(rs: &RootSystem, lambda: &[Q], limit: usize) -> Result<WeightSet, RootError> {
    let lam = rs.project_to_span(lambda)?;
    let iv = rs.from_q(&lam).ok_or(RootError::NotIntegral)?;
    if rs.roots.iter().any(|r| coroot_pairing(&iv, r).is_none()) {
        return Err(RootError::NotIntegral);
    }
    if !rs.is_dominant(&lam) {
        return Err(RootError::NotDominant);
    }
    let support = saturate(rs, &iv, limit)?;
    Ok(WeightSet {
        weights: support.iter().map(|w| rs.to_q(w)).collect(),
        source: super::WeightSource::HighestWeight { lambda: lam },
    })
}

pub(crate) fn saturate(rs: &RootSystem, lambda: &[i64], limit: usize) -> Result<BTreeSet<IVec>, RootError> {
    let mut seen: HashSet<IVec> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(lambda.to_vec());
    queue.push_back(lambda.to_vec());
    while let Some(mu) = queue.pop_front() {
        for alpha in &rs.positive {
            let m = coroot_pairing(&mu, alpha).ok_or(RootError::NotIntegral)?;
            let mut next = mu.clone();
            for _ in 0..m.max(0) {
                for (x, a) in next.iter_mut().zip(alpha) {
                    *x -= a;
                }
                if !seen.contains(&next) {
                    if seen.len() >= limit {
                        return Err(RootError::TooLarge { limit });
                    }
                    seen.insert(next.clone());
                    queue.push_back(next.clone());
                }
            }
        }
    }
    Ok(seen.into_iter().collect())
}
