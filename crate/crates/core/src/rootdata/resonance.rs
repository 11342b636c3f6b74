use super::{primitive, Family, IVec, RootError, RootSystem, WeightSet};
use crate::exact::Q;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::collections::{BTreeSet, HashSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Strong,
    Weak,
    None,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Strong => "strong",
            Classification::Weak => "weak",
            Classification::None => "none",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResonanceReport {
    pub family: Family,
    pub rank: usize,
    #[serde(serialize_with = "crate::json::ser_q_vecs")]
    pub weights: Vec<Vec<Q>>,
    #[serde(serialize_with = "crate::json::ser_q_vecs")]
    pub resonant: Vec<Vec<Q>>,
    #[serde(serialize_with = "crate::json::ser_q_vecs")]
    pub nonresonant: Vec<Vec<Q>>,
    pub classification: Classification,
    /// Roots added, in order, while closing the non-resonant set under root addition.
    #[serde(serialize_with = "crate::json::ser_q_vecs")]
    pub generation_trace: Vec<Vec<Q>>,
    pub closure_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
}

/// Primitive integer direction of a rational vector (`None` for zero).
fn direction(v: &[Q]) -> Option<Vec<BigInt>> {
    if v.iter().all(Zero::is_zero) {
        return None;
    }
    let l = v.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x)).abs();
    Some(ints.into_iter().map(|x| x / &g).collect())
}

/// Closes `seed` under `α + β` (α ≠ −β, sum a root), recording each
/// addition. Iteration order is lexicographic, so the trace is deterministic.
pub(crate) fn root_closure(rs: &RootSystem, seed: &BTreeSet<IVec>) -> (BTreeSet<IVec>, Vec<IVec>) {
    let mut current = seed.clone();
    let mut trace = Vec::new();
    loop {
        let items: Vec<IVec> = current.iter().cloned().collect();
        let mut added = Vec::new();
        for (i, a) in items.iter().enumerate() {
            for b in &items[i..] {
                let s: IVec = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if s.iter().all(|&x| x == 0) {
                    continue;
                }
                if rs.is_root_scaled(&s) && !current.contains(&s) && !added.contains(&s) {
                    added.push(s);
                }
            }
        }
        if added.is_empty() {
            return (current, trace);
        }
        added.sort();
        for s in added {
            current.insert(s.clone());
            trace.push(s);
        }
    }
}

pub fn resonance_analysis(rs: &RootSystem, ws: &WeightSet) -> Result<ResonanceReport, RootError> {
    if ws.is_empty() {
        return Err(RootError::EmptyWeightSet);
    }
    for w in &ws.weights {
        if w.len() != rs.ambient {
            return Err(RootError::DimensionMismatch {
                expected: rs.ambient,
                found: w.len(),
            });
        }
    }
    let weight_dirs: HashSet<Vec<BigInt>> = ws.weights.iter().filter_map(|w| direction(w)).collect();
    let mut resonant = BTreeSet::new();
    let mut nonresonant = BTreeSet::new();
    for r in &rs.roots {
        let dir: Vec<BigInt> = primitive(r).into_iter().map(BigInt::from).collect();
        if weight_dirs.contains(&dir) {
            resonant.insert(r.clone());
        } else {
            nonresonant.insert(r.clone());
        }
    }
    let (closure, trace) = root_closure(rs, &nonresonant);
    let classification = if resonant.is_empty() {
        Classification::Strong
    } else if closure.len() == rs.roots.len() {
        Classification::Weak
    } else {
        Classification::None
    };
    let conv = |s: &BTreeSet<IVec>| s.iter().map(|r| rs.to_q(r)).collect::<Vec<_>>();
    Ok(ResonanceReport {
        family: rs.family,
        rank: rs.rank,
        weights: ws.weights.clone(),
        resonant: conv(&resonant),
        nonresonant: conv(&nonresonant),
        classification,
        generation_trace: trace.iter().map(|r| rs.to_q(r)).collect(),
        closure_size: closure.len(),
        caveat: (!rs.is_reduced()).then(|| {
            "non-reduced BC system: root-sum closure assumes nonzero brackets for every root sum".to_string()
        }),
    })
}

pub fn nonresonance_class(rs: &RootSystem, ws: &WeightSet) -> Result<Classification, RootError> {
    resonance_analysis(rs, ws).map(|r| r.classification)
}

/// gcd of the absolute values in each Cartan row.
pub fn cartan_row_gcds(rs: &RootSystem) -> Vec<i64> {
    rs.cartan
        .iter()
        .map(|row| row.iter().fold(0i64, |g, x| g.gcd(x)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NontrivialityReport {
    pub all_nontrivial: bool,
    /// Set when the input was empty and the answer is vacuous.
    pub empty_warning: bool,
}

pub fn weights_all_nontrivial(ws: &WeightSet) -> NontrivialityReport {
    NontrivialityReport {
        all_nontrivial: ws.weights.iter().all(|w| w.iter().any(|x| !x.is_zero())),
        empty_warning: ws.is_empty(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;
    use crate::rootdata::{build_root_system, weights_from_highest};

    fn qv(xs: &[i64]) -> Vec<Q> {
        xs.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn c2_standard_rep_is_weak() {
        let rs = build_root_system(Family::C, 2).unwrap();
        let ws = weights_from_highest(&rs, &qv(&[1, 0]), 100).unwrap();
        let r = resonance_analysis(&rs, &ws).unwrap();
        assert_eq!(
            r.resonant,
            vec![qv(&[-2, 0]), qv(&[0, -2]), qv(&[0, 2]), qv(&[2, 0])]
        );
        assert_eq!(
            r.nonresonant,
            vec![qv(&[-1, -1]), qv(&[-1, 1]), qv(&[1, -1]), qv(&[1, 1])]
        );
        assert_eq!(r.classification, Classification::Weak);
        assert_eq!(r.generation_trace.len(), 4);
    }

    #[test]
    fn a_type_standard_is_strong() {
        for l in [2, 3] {
            let rs = build_root_system(Family::A, l).unwrap();
            let lam = rs.fundamental_weights()[0].clone();
            let ws = weights_from_highest(&rs, &lam, 100).unwrap();
            assert_eq!(nonresonance_class(&rs, &ws).unwrap(), Classification::Strong);
        }
    }

    #[test]
    fn adjoint_is_none() {
        let rs = build_root_system(Family::C, 2).unwrap();
        let ws = WeightSet::explicit(rs.roots());
        assert_eq!(nonresonance_class(&rs, &ws).unwrap(), Classification::None);
        let ws = weights_from_highest(&rs, &qv(&[2, 0]), 100).unwrap();
        assert!(!weights_all_nontrivial(&ws).all_nontrivial);
        assert_eq!(nonresonance_class(&rs, &ws).unwrap(), Classification::None);
    }

    #[test]
    fn gcd_rows() {
        let a3 = build_root_system(Family::A, 3).unwrap();
        assert_eq!(cartan_row_gcds(&a3), vec![1, 1, 1]);
        let c2 = build_root_system(Family::C, 2).unwrap();
        assert_eq!(cartan_row_gcds(&c2).iter().filter(|&&g| g == 2).count(), 1);
        let g2 = build_root_system(Family::G2, 2).unwrap();
        assert_eq!(cartan_row_gcds(&g2), vec![1, 1]);
    }

    #[test]
    fn nontriviality() {
        let ws = WeightSet::explicit(vec![qv(&[1, 0]), qv(&[-1, 0]), qv(&[0, 1]), qv(&[0, -1])]);
        assert_eq!(
            weights_all_nontrivial(&ws),
            NontrivialityReport {
                all_nontrivial: true,
                empty_warning: false
            }
        );
        let empty = WeightSet::explicit(vec![]);
        let r = weights_all_nontrivial(&empty);
        assert!(r.all_nontrivial && r.empty_warning);
        let rs = build_root_system(Family::C, 2).unwrap();
        assert_eq!(resonance_analysis(&rs, &empty).unwrap_err(), RootError::EmptyWeightSet);
    }

    #[test]
    fn bc_carries_caveat() {
        let rs = build_root_system(Family::BC, 2).unwrap();
        let ws = WeightSet::explicit(vec![qv(&[1, 1]), qv(&[-1, -1])]);
        let r = resonance_analysis(&rs, &ws).unwrap();
        assert!(r.caveat.is_some());
    }
}
