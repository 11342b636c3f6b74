//! JSON input shapes for the request payloads.

use super::AppError;
use crate::cohomology::{parse_word, GroupPresentation, Representation, TwistedSystem};
use crate::exact::QMatrix;
use crate::json::{parse_int, parse_int_matrix, parse_q, parse_qmatrix};
use crate::matrix_core::IntMatrix;
use crate::nilpotent::NilpotentAlgebra;
use crate::semiconj::{point, PeriodicDisplacement, PeriodicField, TrigField, TrigMode, MAX_DIM};
use serde::Deserialize;
use serde_json::Value;

fn malformed<E: std::fmt::Display>(what: &str) -> impl FnOnce(E) -> AppError + '_ {
    move |e| AppError::malformed(format!("{what}: {e}"))
}

pub(super) fn int_matrix(v: &Value) -> Result<IntMatrix, AppError> {
    parse_int_matrix(v).map_err(malformed("matrix"))
}

pub(super) fn qmatrix(v: &Value) -> Result<QMatrix, AppError> {
    parse_qmatrix(v).map_err(malformed("matrix"))
}

pub(super) fn float_rows(v: &Value) -> Result<Vec<Vec<f64>>, AppError> {
    serde_json::from_value(v.clone()).map_err(malformed("vectors"))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BracketWire {
    i: usize,
    j: usize,
    coeffs: Vec<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraWire {
    dim: usize,
    #[serde(default)]
    brackets: Vec<BracketWire>,
    #[serde(default)]
    lattice: Option<Value>,
}

pub(super) fn algebra(v: &Value) -> Result<NilpotentAlgebra, AppError> {
    let w: AlgebraWire = serde_json::from_value(v.clone()).map_err(malformed("algebra"))?;
    let mut brackets = Vec::with_capacity(w.brackets.len());
    for b in &w.brackets {
        let c = b.coeffs.iter().map(parse_q).collect::<Result<Vec<_>, _>>().map_err(malformed("bracket"))?;
        brackets.push((b.i, b.j, c));
    }
    let mut alg = NilpotentAlgebra::new(w.dim, &brackets)?;
    if let Some(l) = &w.lattice {
        alg = alg.with_lattice(qmatrix(l)?)?;
    }
    Ok(alg)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeWire {
    k: Vec<i64>,
    amp: Vec<f64>,
    #[serde(default)]
    phase: f64,
}

/// `{"modes": [...]}` for a trigonometric field, or grid samples
/// `{"n": n, "values": [[...], ...]}` with the last axis varying fastest.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldWire {
    #[serde(default)]
    dim: Option<usize>,
    #[serde(default)]
    modes: Option<Vec<ModeWire>>,
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    values: Option<Vec<Vec<f64>>>,
}

pub(super) fn field(v: &Value, d: usize) -> Result<Box<dyn PeriodicField>, AppError> {
    let w: FieldWire = serde_json::from_value(v.clone()).map_err(malformed("field"))?;
    if let Some(fd) = w.dim {
        if fd != d {
            return Err(AppError::domain("DimensionMismatch", format!("field has dimension {fd}, matrix {d}")));
        }
    }
    if d == 0 || d > MAX_DIM {
        return Err(AppError::domain("DimensionTooLarge", format!("dimension {d} is outside 1..={MAX_DIM}")));
    }
    match (w.modes, w.n, w.values) {
        (Some(modes), None, None) => {
            let modes = modes
                .into_iter()
                .map(|m| TrigMode {
                    k: m.k,
                    amp: m.amp,
                    phase: m.phase,
                })
                .collect();
            Ok(Box::new(TrigField::new(d, modes).map_err(malformed("field"))?))
        }
        (None, Some(n), Some(values)) => {
            if values.iter().any(|r| r.len() != d) {
                return Err(AppError::malformed(format!("field: every sample needs {d} components")));
            }
            let pts = values.iter().map(|r| point(r)).collect();
            Ok(Box::new(PeriodicDisplacement::from_values(d, n, pts).map_err(malformed("field"))?))
        }
        _ => Err(AppError::malformed("field: give either \"modes\" or both \"n\" and \"values\"")),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PresentationWire {
    generators: Vec<String>,
    #[serde(default)]
    relators: Vec<Vec<String>>,
}

pub(super) fn twisted_system(presentation: &Value, rho: &Value, defects: &Value) -> Result<TwistedSystem, AppError> {
    let p: PresentationWire = serde_json::from_value(presentation.clone()).map_err(malformed("presentation"))?;
    let relators = p
        .relators
        .iter()
        .map(|r| parse_word(&p.generators, r))
        .collect::<Result<Vec<_>, _>>()?;
    let pres = GroupPresentation::new(p.generators, relators)?;
    let mats: Vec<QMatrix> = match rho {
        Value::Array(a) => a.iter().map(qmatrix).collect::<Result<_, _>>()?,
        Value::Object(m) => {
            if let Some(extra) = m.keys().find(|k| !pres.generators.contains(k)) {
                return Err(AppError::malformed(format!("rho: unknown generator {extra:?}")));
            }
            pres.generators
                .iter()
                .map(|g| {
                    m.get(g)
                        .ok_or_else(|| AppError::malformed(format!("rho: missing generator {g:?}")))
                        .and_then(qmatrix)
                })
                .collect::<Result<_, _>>()?
        }
        _ => return Err(AppError::malformed("rho: expected an array or an object keyed by generator")),
    };
    let dim = mats.first().map_or(0, QMatrix::rows);
    let rep = Representation::new(dim, mats)?;
    let defects = defects
        .as_array()
        .ok_or_else(|| AppError::malformed("defects: expected an array of integer vectors"))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| AppError::malformed("defects: expected an array of integer vectors"))?
                .iter()
                .map(|x| parse_int(x).map_err(malformed("defects")))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TwistedSystem::new(pres, rep, defects)?)
}
