use super::{invert, CohomologyError, Letter, TwistedSystem, Word};
use crate::exact::{lcm_denominators, smith_normal_form, vec_add, vec_neg, vec_sub, QMatrix, Q};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

fn check_letters(sys: &TwistedSystem, w: &[Letter]) -> Result<(), CohomologyError> {
    match w.iter().find(|l| l.generator >= sys.presentation.generators.len()) {
        Some(l) => Err(CohomologyError::UnknownGenerator(format!("index {}", l.generator))),
        None => Ok(()),
    }
}

/// Deck translation `D(w)` with `α̃(s₁)∘⋯∘α̃(sₘ) = D(w) + α̃(w̄)`, where `w̄` is `w`
/// after free reduction and removal of relator factors.
///
/// The word is reduced on a stack; whenever the top of the stack spells a
/// relator `r` (or `r⁻¹`) it is removed and `±ψ(prefix)·v_r` is added. A relator
/// therefore has defect equal to its declared value whenever no relator
/// contains another as a factor.
pub fn word_defect(sys: &TwistedSystem, word: &[Letter]) -> Result<Vec<Q>, CohomologyError> {
    check_letters(sys, word)?;
    let rho = &sys.rho;
    let mut patterns: Vec<(Word, Vec<Q>)> = Vec::new();
    for (i, r) in sys.presentation.relators.iter().enumerate() {
        if r.is_empty() {
            continue;
        }
        let v = sys.defect_q(i);
        patterns.push((r.clone(), v.clone()));
        patterns.push((invert(r), vec_neg(&v)));
    }
    let mut stack: Vec<Letter> = Vec::with_capacity(word.len());
    let mut prefix: Vec<QMatrix> = vec![QMatrix::identity(sys.dim())];
    let mut total = sys.zero_vector();
    for &l in word {
        if stack.last() == Some(&l.inv()) {
            stack.pop();
            prefix.pop();
            continue;
        }
        let next = &prefix[prefix.len() - 1] * rho.letter(l)?;
        stack.push(l);
        prefix.push(next);
        if let Some((r, v)) = patterns.iter().find(|(r, _)| stack.ends_with(r)) {
            let keep = stack.len() - r.len();
            total = vec_add(&total, &prefix[keep].mul_vec(v));
            stack.truncate(keep);
            prefix.truncate(keep + 1);
        }
    }
    Ok(total)
}

/// `T(w)` for per-generator corrections `η`: the change in the composed lift of `w`.
pub fn word_correction(sys: &TwistedSystem, word: &[Letter], eta: &[Vec<Q>]) -> Result<Vec<Q>, CohomologyError> {
    check_letters(sys, word)?;
    check_eta(sys, eta)?;
    let mut psi = QMatrix::identity(sys.dim());
    let mut t = sys.zero_vector();
    for &l in word {
        if l.inverse {
            psi = &psi * sys.rho.letter(l)?;
            t = vec_sub(&t, &psi.mul_vec(&eta[l.generator]));
        } else {
            t = vec_add(&t, &psi.mul_vec(&eta[l.generator]));
            psi = &psi * sys.rho.letter(l)?;
        }
    }
    Ok(t)
}

fn check_eta(sys: &TwistedSystem, eta: &[Vec<Q>]) -> Result<(), CohomologyError> {
    if eta.len() != sys.presentation.generators.len() {
        return Err(CohomologyError::Malformed(format!(
            "{} corrections for {} generators",
            eta.len(),
            sys.presentation.generators.len()
        )));
    }
    match eta.iter().find(|v| v.len() != sys.dim()) {
        Some(v) => Err(CohomologyError::DimensionMismatch {
            expected: sys.dim(),
            found: v.len(),
        }),
        None => Ok(()),
    }
}

/// `Σ_g coefficients[g]·η(g) = rhs`, the condition `D(w) + T(w) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelatorEquation {
    pub coefficients: Vec<QMatrix>,
    pub rhs: Vec<Q>,
}

pub fn relator_equation(sys: &TwistedSystem, relator: &[Letter]) -> Result<RelatorEquation, CohomologyError> {
    check_letters(sys, relator)?;
    let d = sys.dim();
    let mut coefficients = vec![QMatrix::zeros(d, d); sys.presentation.generators.len()];
    let mut psi = QMatrix::identity(d);
    for &l in relator {
        let g = l.generator;
        if l.inverse {
            psi = &psi * sys.rho.letter(l)?;
            coefficients[g] = coefficients[g].sub(&psi);
        } else {
            coefficients[g] = coefficients[g].add(&psi);
            psi = &psi * sys.rho.letter(l)?;
        }
    }
    Ok(RelatorEquation {
        coefficients,
        rhs: vec_neg(&word_defect(sys, relator)?),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status")]
pub enum LiftingOutcome {
    /// Corrections `η(g)`; `q` is the least common denominator, minimal over all rational solutions.
    #[serde(rename = "SOLVED")]
    Solved {
        #[serde(serialize_with = "crate::json::ser_q_vecs")]
        eta: Vec<Vec<Q>>,
        #[serde(serialize_with = "ser_bigint")]
        q: BigInt,
        /// Dimension of the solution space.
        nullity: usize,
    },
    /// No rational solution; `obstruction·M = 0` while `obstruction·rhs ≠ 0`
    /// for the stacked relator equations `M η = rhs`, relators in order.
    #[serde(rename = "UNSOLVABLE")]
    Unsolvable {
        #[serde(serialize_with = "crate::json::ser_q_vec")]
        obstruction: Vec<Q>,
    },
}

fn ser_bigint<S: serde::Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&crate::json::bigint_value(x), s)
}

/// Stacked relator equations `M η = rhs`, rows relator-major.
pub(crate) fn stacked_system(sys: &TwistedSystem) -> Result<(Vec<Vec<Q>>, Vec<Q>), CohomologyError> {
    let d = sys.dim();
    let ng = sys.presentation.generators.len();
    let mut m = Vec::new();
    let mut b = Vec::new();
    for r in &sys.presentation.relators {
        let eq = relator_equation(sys, r)?;
        for i in 0..d {
            let mut row = Vec::with_capacity(ng * d);
            for c in &eq.coefficients {
                row.extend_from_slice(c.row(i));
            }
            m.push(row);
            b.push(eq.rhs[i].clone());
        }
    }
    Ok((m, b))
}

/// Exact solve of the relator equations through the Smith normal form.
pub fn solve_lifting(sys: &TwistedSystem) -> Result<LiftingOutcome, CohomologyError> {
    let d = sys.dim();
    let ng = sys.presentation.generators.len();
    let n = ng * d;
    let (m, b) = stacked_system(sys)?;
    if m.is_empty() || n == 0 {
        if let Some(i) = b.iter().position(|x| !x.is_zero()) {
            let mut y = vec![Q::zero(); b.len()];
            y[i] = Q::one();
            return Ok(LiftingOutcome::Unsolvable { obstruction: y });
        }
        return Ok(LiftingOutcome::Solved {
            eta: vec![vec![Q::zero(); d]; ng],
            q: BigInt::one(),
            nullity: n,
        });
    }
    // clear denominators row by row; the solution set is unchanged
    let scales: Vec<BigInt> = m.iter().map(|row| lcm_denominators(row.iter())).collect();
    let int_rows: Vec<Vec<BigInt>> = m
        .iter()
        .zip(&scales)
        .map(|(row, s)| row.iter().map(|x| (x * Q::from_integer(s.clone())).to_integer()).collect())
        .collect();
    let bs: Vec<Q> = b.iter().zip(&scales).map(|(x, s)| x * Q::from_integer(s.clone())).collect();
    let snf = smith_normal_form(&int_rows);
    let rank = snf.rank();
    let c: Vec<Q> = snf
        .left
        .iter()
        .map(|row| row.iter().zip(&bs).fold(Q::zero(), |acc, (l, x)| acc + Q::from_integer(l.clone()) * x))
        .collect();
    if let Some(i) = (rank..c.len()).find(|&i| !c[i].is_zero()) {
        let obstruction = snf.left[i]
            .iter()
            .zip(&scales)
            .map(|(l, s)| Q::from_integer(l * s))
            .collect();
        return Ok(LiftingOutcome::Unsolvable { obstruction });
    }
    let mut y = vec![Q::zero(); n];
    for i in 0..rank {
        y[i] = &c[i] / Q::from_integer(snf.invariants[i].clone());
    }
    let x: Vec<Q> = snf
        .right
        .iter()
        .map(|row| row.iter().zip(&y).fold(Q::zero(), |acc, (r, v)| acc + Q::from_integer(r.clone()) * v))
        .collect();
    let q = lcm_denominators(x.iter());
    let eta = x.chunks(d).map(|c| c.to_vec()).collect();
    Ok(LiftingOutcome::Solved {
        eta,
        q,
        nullity: n - rank,
    })
}

/// Relator defects after correcting every generator lift by `η`.
pub fn corrected_defect(sys: &TwistedSystem, eta: &[Vec<Q>]) -> Result<Vec<Vec<Q>>, CohomologyError> {
    check_eta(sys, eta)?;
    sys.presentation
        .relators
        .iter()
        .map(|r| Ok(vec_add(&word_defect(sys, r)?, &word_correction(sys, r, eta)?)))
        .collect()
}
