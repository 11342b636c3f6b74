//! Cone-field certificates for compositions `F = fᴺ ∘ g ∘ fᴺ` around a
//! hyperbolic linear `f`. All cone arithmetic uses the adapted box norm
//! `‖v‖ = max(‖vˢ‖, ‖vᵘ‖)`.

mod check;
mod map;

pub use check::{numeric_cone_check, semigroup_member, ConeCheckReport, MembershipReport};
pub use map::{ComposedMap, MapData, NonlinearMap};

use crate::matrix_core::{adapted_norm, AdaptedNorm, HyperbolicSplitting, MatrixError};
use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

/// Margin of the adapted norm behind every cone spec.
pub const CONE_NORM_MARGIN: f64 = 0.01;
/// `d(x)` counts as singular when its conorm is below this times `C`.
pub const TRANSVERSALITY_TOL: f64 = 1e-9;
/// Sampled `r` and `C` are shrunk and inflated by these factors.
pub const EMPIRICAL_R_FACTOR: f64 = 0.9;
pub const EMPIRICAL_C_FACTOR: f64 = 1.1;
const MAX_POWER: u64 = 1 << 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConesError {
    #[error("cone aperture must lie in (0, 1], got {0}")]
    InvalidEpsilon(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("d(x) is singular (conorm {conorm:e}) at {point:?}: g is not transverse to the unstable bundle")]
    TransversalityFailure { conorm: f64, point: Vec<f64> },
    #[error("no finite power satisfies the cone inequalities (r = {r}, C = {c}, lambda = {lambda})")]
    NoFinitePower { r: f64, c: f64, lambda: f64 },
    #[error("cone violation at {point:?} along {vector:?}: {kind} margin {margin:e}")]
    ConeViolation {
        point: Vec<f64>,
        vector: Vec<f64>,
        kind: String,
        margin: f64,
        violations: usize,
        samples: usize,
    },
    #[error("derivative is singular at {point:?}")]
    SingularDerivative { point: Vec<f64> },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Unstable and stable `ε`-cones of a hyperbolic splitting.
#[derive(Clone, Debug)]
pub struct ConeSpec {
    pub splitting: HyperbolicSplitting,
    pub epsilon: f64,
    pub norm: AdaptedNorm,
}

impl ConeSpec {
    pub fn new(splitting: &HyperbolicSplitting, epsilon: f64) -> Result<Self, ConesError> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(ConesError::InvalidEpsilon(epsilon));
        }
        let norm = adapted_norm(splitting, CONE_NORM_MARGIN)?;
        Ok(ConeSpec {
            splitting: splitting.clone(),
            epsilon,
            norm,
        })
    }

    pub fn dim(&self) -> usize {
        self.splitting.dim
    }

    pub fn lambda(&self) -> f64 {
        self.norm.lambda
    }

    /// `(‖vˢ‖, ‖vᵘ‖)` in adapted coordinates.
    pub fn components(&self, v: &[f64]) -> (f64, f64) {
        self.norm.components(v)
    }

    pub fn box_norm(&self, v: &[f64]) -> f64 {
        self.norm.box_norm(v)
    }

    /// `‖vˢ‖ ≤ aperture·‖vᵘ‖`.
    pub fn in_unstable_cone(&self, v: &[f64], aperture: f64) -> bool {
        let (s, u) = self.components(v);
        s <= aperture * u * (1.0 + 1e-12)
    }

    /// `‖vᵘ‖ ≤ aperture·‖vˢ‖`.
    pub fn in_stable_cone(&self, v: &[f64], aperture: f64) -> bool {
        let (s, u) = self.components(v);
        u <= aperture * s * (1.0 + 1e-12)
    }

    /// Ambient matrix written in adapted coordinates.
    pub fn in_adapted(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        self.norm.coordinates() * m * self.norm.coordinates_inverse()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateKind {
    /// Constants computed exactly from a linear `g`.
    Exact,
    /// Sampled constants with safety factors; evidence, not proof.
    Empirical,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeConstants {
    /// Conorm lower bound of `d = projᵘ ∘ Dg ∘ inclᵘ`.
    pub r: f64,
    /// Bound on `‖Dg‖` in the box norm.
    #[serde(rename = "C")]
    pub c: f64,
    pub lambda: f64,
    pub kind: CertificateKind,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// How far the inequality holds with room to spare; nonnegative when satisfied.
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeCertificate {
    pub r: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub lambda: f64,
    pub epsilon: f64,
    pub delta0: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "N")]
    pub n: u64,
    pub inequalities: Vec<Inequality>,
    pub kind: CertificateKind,
}

/// Box-norm bound `max(‖a‖ + ‖b‖, ‖c‖ + ‖d‖)` for a matrix in adapted block form.
fn box_operator_bound(g: &DMatrix<f64>, k: usize) -> f64 {
    let n = g.nrows();
    let blk = |r0: usize, r1: usize, c0: usize, c1: usize| -> f64 {
        if r1 == r0 || c1 == c0 {
            return 0.0;
        }
        g.view((r0, c0), (r1 - r0, c1 - c0))
            .clone_owned()
            .singular_values()
            .iter()
            .copied()
            .fold(0.0, f64::max)
    };
    (blk(0, k, 0, k) + blk(0, k, k, n)).max(blk(k, n, 0, k) + blk(k, n, k, n))
}

fn unstable_conorm(g: &DMatrix<f64>, k: usize) -> f64 {
    let n = g.nrows();
    if k == n {
        return f64::INFINITY;
    }
    g.view((k, k), (n - k, n - k))
        .clone_owned()
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `r`, `C` and `λ` for `g` relative to the splitting of `f`.
///
/// Linear `g` gives exact constants. Nonlinear `g` is sampled on a `grid^d`
/// lattice and the result is labeled empirical.
pub fn cone_constants(spec: &ConeSpec, g: &MapData, grid: usize) -> Result<ConeConstants, ConesError> {
    let d = spec.dim();
    if g.dim() != d {
        return Err(ConesError::DimensionMismatch {
            expected: d,
            found: g.dim(),
        });
    }
    let k = spec.splitting.stable_dim();
    let lambda = spec.lambda();
    match g {
        MapData::Linear(m) => {
            let ga = spec.in_adapted(m);
            let r = unstable_conorm(&ga, k);
            let c = box_operator_bound(&ga, k);
            if !(r > TRANSVERSALITY_TOL * c.max(1.0)) {
                return Err(ConesError::TransversalityFailure {
                    conorm: r,
                    point: vec![0.0; d],
                });
            }
            Ok(ConeConstants {
                r,
                c,
                lambda,
                kind: CertificateKind::Exact,
                samples: 1,
            })
        }
        MapData::Nonlinear(map) => {
            if grid == 0 {
                return Err(ConesError::InvalidParameter("sampling grid must be positive".into()));
            }
            let count = grid
                .checked_pow(d as u32)
                .filter(|&c| c <= 1 << 22)
                .ok_or_else(|| ConesError::InvalidParameter(format!("sampling grid {grid}^{d} is too large")))?;
            let mut r = f64::INFINITY;
            let mut c: f64 = 0.0;
            for idx in 0..count {
                let mut x = vec![0.0; d];
                let mut rest = idx;
                for xi in x.iter_mut().rev() {
                    *xi = (rest % grid) as f64 / grid as f64;
                    rest /= grid;
                }
                let ga = spec.in_adapted(&map.jacobian(&x));
                let ri = unstable_conorm(&ga, k);
                let ci = box_operator_bound(&ga, k);
                if !(ri > TRANSVERSALITY_TOL * ci.max(1.0)) {
                    return Err(ConesError::TransversalityFailure { conorm: ri, point: x });
                }
                r = r.min(ri);
                c = c.max(ci);
            }
            Ok(ConeConstants {
                r: r * EMPIRICAL_R_FACTOR,
                c: c * EMPIRICAL_C_FACTOR,
                lambda,
                kind: CertificateKind::Empirical,
                samples: count,
            })
        }
    }
}

fn inequalities(r: f64, c: f64, lambda: f64, eps: f64, delta0: f64, t: f64, n: u64) -> [Inequality; 3] {
    let l2n = lambda.powf(2.0 * n as f64);
    let third = lambda.powf(-(n as f64)) * (r * lambda.powf(-(n as f64)) - c * lambda.powf(n as f64) * eps);
    [
        Inequality {
            name: "lambda^(2N) eps <= delta0".into(),
            lhs: l2n * eps,
            rhs: delta0,
            slack: delta0 - l2n * eps,
        },
        Inequality {
            name: "lambda^(2N) T <= eps/2".into(),
            lhs: l2n * t,
            rhs: eps / 2.0,
            slack: eps / 2.0 - l2n * t,
        },
        Inequality {
            name: "lambda^(-N) (r lambda^(-N) - C lambda^N eps) >= 2".into(),
            lhs: third,
            rhs: 2.0,
            slack: third - 2.0,
        },
    ]
}

/// Smallest `n ≥ 1` with `q^n ≤ bound` for `0 < q < 1`.
fn min_power(q: f64, bound: f64) -> Option<u64> {
    if bound >= 1.0 {
        return Some(1);
    }
    if bound <= 0.0 {
        return None;
    }
    let guess = (bound.ln() / q.ln()).ceil();
    if !guess.is_finite() || guess > MAX_POWER as f64 {
        return None;
    }
    let mut n = (guess as u64).max(1);
    while n > 1 && q.powf((n - 1) as f64) <= bound {
        n -= 1;
    }
    while q.powf(n as f64) > bound {
        n += 1;
    }
    Some(n)
}

/// Minimal `N` satisfying the three cone inequalities, with `δ₀ = r/(2C)` unless overridden.
pub fn certify_power(constants: &ConeConstants, epsilon: f64, delta0: Option<f64>) -> Result<ConeCertificate, ConesError> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(ConesError::InvalidEpsilon(epsilon));
    }
    let (r, c, lambda) = (constants.r, constants.c, constants.lambda);
    let fail = || ConesError::NoFinitePower { r, c, lambda };
    if !(r > 0.0 && c > 0.0 && lambda > 0.0 && lambda < 1.0) || !r.is_finite() || !c.is_finite() {
        return Err(fail());
    }
    let delta0 = delta0.unwrap_or(r / (2.0 * c));
    if !(delta0 > 0.0 && r - c * delta0 > 0.0) {
        return Err(ConesError::InvalidParameter(format!(
            "delta0 = {delta0} must satisfy 0 < delta0 < r/C"
        )));
    }
    let t = c * (delta0 + 1.0) / (r - c * delta0);
    // each inequality is monotone in N, so N is the largest of the separate minima
    let q = lambda * lambda;
    let n1 = min_power(q, delta0 / epsilon).ok_or_else(fail)?;
    let n2 = min_power(q, epsilon / (2.0 * t)).ok_or_else(fail)?;
    let n3 = min_power(q, r / (2.0 + c * epsilon)).ok_or_else(fail)?;
    let mut n = n1.max(n2).max(n3);
    while inequalities(r, c, lambda, epsilon, delta0, t, n).iter().any(|i| i.slack < 0.0) {
        n += 1;
        if n > MAX_POWER {
            return Err(fail());
        }
    }
    Ok(ConeCertificate {
        r,
        c,
        lambda,
        epsilon,
        delta0,
        t,
        n,
        inequalities: inequalities(r, c, lambda, epsilon, delta0, t, n).to_vec(),
        kind: constants.kind,
    })
}

#[cfg(test)]
mod tests;
