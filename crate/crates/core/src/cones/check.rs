use super::{ComposedMap, ConeSpec, ConesError};
use crate::matrix_core::HyperbolicSplitting;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Relative slack below which a margin counts as a violation.
const VIOLATION_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeCheckReport {
    pub samples: usize,
    pub epsilon: f64,
    /// Smallest `ε/2 − ‖wˢ‖/‖wᵘ‖` over `w = DF v`, `v ∈ ∂Cᵘ_ε`.
    pub unstable_cone_margin: f64,
    /// Smallest `ε/2 − ‖wᵘ‖/‖wˢ‖` over `w = DF⁻¹ v`, `v ∈ ∂Cˢ_ε`.
    pub stable_cone_margin: f64,
    /// Smallest `‖DF v‖/‖v‖` on the unstable cone.
    pub forward_expansion: f64,
    /// Smallest `‖DF⁻¹ v‖/‖v‖` on the stable cone.
    pub inverse_expansion: f64,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipReport {
    pub member: bool,
    pub samples: usize,
    pub violations: usize,
    /// Which test failed first in the worst violating sample.
    pub failed_check: Option<String>,
    pub worst_margin: Option<f64>,
    pub check: Option<ConeCheckReport>,
}

struct SampleOutcome {
    x: Vec<f64>,
    v_u: Vec<f64>,
    v_s: Vec<f64>,
    margins: [f64; 4],
    ratios: [f64; 2],
}

const CHECK_NAMES: [&str; 4] = ["unstable-cone", "stable-cone", "forward-expansion", "inverse-expansion"];

fn random_unit(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if k == 0 {
            return v;
        }
        if n > 1e-3 && n <= 1.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Samples points and boundary cone vectors and checks that `DF` maps
/// `Cᵘ_ε` into `Cᵘ_{ε/2}` expanding by 2, and `DF⁻¹` does the same on `Cˢ_ε`.
pub fn numeric_cone_check(f: &ComposedMap, spec: &ConeSpec, samples: usize, seed: u64) -> Result<ConeCheckReport, ConesError> {
    let d = spec.dim();
    if f.dim() != d {
        return Err(ConesError::DimensionMismatch {
            expected: d,
            found: f.dim(),
        });
    }
    if samples == 0 {
        return Err(ConesError::InvalidParameter("at least one sample is needed".into()));
    }
    let k = spec.splitting.stable_dim();
    let eps = spec.epsilon;
    let coord_inv = spec.norm.coordinates_inverse();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<(Vec<f64>, DVector<f64>, DVector<f64>)> = (0..samples)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
            let s = random_unit(&mut rng, k);
            let u = random_unit(&mut rng, d - k);
            let mut zu = DVector::zeros(d);
            let mut zs = DVector::zeros(d);
            for i in 0..k {
                zu[i] = eps * s[i];
                zs[i] = s[i];
            }
            for i in 0..d - k {
                zu[k + i] = u[i];
                zs[k + i] = eps * u[i];
            }
            (x, coord_inv * zu, coord_inv * zs)
        })
        .collect();

    let outcomes: Vec<Result<SampleOutcome, ConesError>> = inputs
        .par_iter()
        .map(|(x, v_u, v_s)| {
            let (_, jac) = f.eval_with_derivative(x);
            let inv: DMatrix<f64> = jac
                .clone()
                .try_inverse()
                .ok_or_else(|| ConesError::SingularDerivative { point: x.clone() })?;
            let w_u = &jac * v_u;
            let w_s = &inv * v_s;
            let (fs, fu) = spec.components(w_u.as_slice());
            let (is, iu) = spec.components(w_s.as_slice());
            let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { f64::INFINITY };
            let fwd = spec.box_norm(w_u.as_slice()) / spec.box_norm(v_u.as_slice());
            let inv_exp = spec.box_norm(w_s.as_slice()) / spec.box_norm(v_s.as_slice());
            Ok(SampleOutcome {
                x: x.clone(),
                v_u: v_u.iter().copied().collect(),
                v_s: v_s.iter().copied().collect(),
                margins: [eps / 2.0 - ratio(fs, fu), eps / 2.0 - ratio(iu, is), fwd - 2.0, inv_exp - 2.0],
                ratios: [fwd, inv_exp],
            })
        })
        .collect();

    let mut report = ConeCheckReport {
        samples,
        epsilon: eps,
        unstable_cone_margin: f64::INFINITY,
        stable_cone_margin: f64::INFINITY,
        forward_expansion: f64::INFINITY,
        inverse_expansion: f64::INFINITY,
        violations: 0,
    };
    let mut worst: Option<(f64, usize, &SampleOutcome)> = None;
    let outcomes: Vec<SampleOutcome> = outcomes.into_iter().collect::<Result<_, _>>()?;
    for o in &outcomes {
        report.unstable_cone_margin = report.unstable_cone_margin.min(o.margins[0]);
        report.stable_cone_margin = report.stable_cone_margin.min(o.margins[1]);
        report.forward_expansion = report.forward_expansion.min(o.ratios[0]);
        report.inverse_expansion = report.inverse_expansion.min(o.ratios[1]);
        let scale = [eps, eps, 2.0, 2.0];
        let failing = (0..4).find(|&i| o.margins[i] < -VIOLATION_TOL * scale[i]);
        if let Some(i) = failing {
            report.violations += 1;
            if worst.is_none_or(|(m, _, _)| o.margins[i] < m) {
                worst = Some((o.margins[i], i, o));
            }
        }
    }
    if let Some((margin, i, o)) = worst {
        return Err(ConesError::ConeViolation {
            point: o.x.clone(),
            vector: if i == 1 || i == 3 { o.v_s.clone() } else { o.v_u.clone() },
            kind: CHECK_NAMES[i].into(),
            margin,
            violations: report.violations,
            samples,
        });
    }
    Ok(report)
}

/// Sampled membership of `candidate` in the cone semigroup of `f`.
pub fn semigroup_member(
    f_split: &HyperbolicSplitting,
    candidate: &ComposedMap,
    epsilon: f64,
    samples: usize,
    seed: u64,
) -> Result<MembershipReport, ConesError> {
    let spec = ConeSpec::new(f_split, epsilon)?;
    match numeric_cone_check(candidate, &spec, samples, seed) {
        Ok(check) => Ok(MembershipReport {
            member: true,
            samples,
            violations: 0,
            failed_check: None,
            worst_margin: None,
            check: Some(check),
        }),
        Err(ConesError::ConeViolation {
            kind,
            margin,
            violations,
            ..
        }) => Ok(MembershipReport {
            member: false,
            samples,
            violations,
            failed_check: Some(kind),
            worst_margin: Some(margin),
            check: None,
        }),
        Err(ConesError::SingularDerivative { .. }) => Ok(MembershipReport {
            member: false,
            samples,
            violations: samples,
            failed_check: Some("singular-derivative".into()),
            worst_margin: None,
            check: None,
        }),
        Err(e) => Err(e),
    }
}
