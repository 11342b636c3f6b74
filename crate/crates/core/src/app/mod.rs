//! Request dispatch shared by the command-line binary and the C ABI.
//!
//! A [`Request`] carries its inputs inline as JSON; [`execute`] returns a
//! versioned JSON report or an [`AppError`] that maps onto exit code 1
//! (malformed input) or 2 (domain error).

mod input;
mod render;

pub use render::render_report;

use crate::cohomology::{corrected_defect, solve_lifting, LiftingOutcome};
use crate::cones::{certify_power, cone_constants, numeric_cone_check, ComposedMap, ConeSpec, MapData};
use crate::json::{rational_rows, rational_vec, SCHEMA};
use crate::matrix_core::{adapted_norm, hyperbolic_splitting, is_hyperbolic, rank_one_factor_test, regularity_profile, DEFAULT_TOL};
use crate::nilpotent::{central_series, check_automorphism, descend_automorphism, layer_hyperbolicity};
use crate::rootdata::{
    build_root_system, cartan_row_gcds, resonance_analysis, weights_all_nontrivial, weights_from_highest, Family,
    DEFAULT_WEIGHT_LIMIT,
};
use crate::semiconj::{
    holder_exponent_estimate, residual, solve_semiconjugacy, Corrector, Pt, SolveOptions, ADAPTED_MARGIN, MAX_DIM,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use std::fmt::Debug;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MALFORMED: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;

fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_margin() -> f64 {
    ADAPTED_MARGIN
}
fn default_semiconj_tol() -> f64 {
    1e-8
}
fn default_grid() -> usize {
    64
}
fn default_max_terms() -> usize {
    200
}
fn default_oracle_samples() -> usize {
    1000
}
fn default_eps() -> f64 {
    1.0
}
fn default_cone_samples() -> usize {
    10_000
}
fn default_weight_limit() -> usize {
    DEFAULT_WEIGHT_LIMIT
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Request {
    Hyperbolic {
        matrix: Value,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    Splitting {
        matrix: Value,
        #[serde(default = "default_tol")]
        tol: f64,
        #[serde(default = "default_margin")]
        margin: f64,
    },
    Regularity {
        matrix: Value,
    },
    Rank1 {
        vectors: Value,
    },
    Nonres {
        family: String,
        rank: usize,
        /// Dynkin labels of the highest weight.
        highest_weight: Vec<Value>,
        #[serde(default = "default_weight_limit")]
        limit: usize,
    },
    GcdRows {
        family: String,
        rank: usize,
    },
    Nilpotent {
        algebra: Value,
        #[serde(default)]
        automorphism: Option<Value>,
        #[serde(default)]
        level: Option<usize>,
    },
    Semiconj {
        matrix: Value,
        field: Value,
        #[serde(default = "default_semiconj_tol")]
        tol: f64,
        #[serde(default = "default_grid")]
        grid: usize,
        #[serde(default = "default_max_terms")]
        max_terms: usize,
        /// Random points for the independent residual check.
        #[serde(default = "default_oracle_samples")]
        samples: usize,
        #[serde(default)]
        holder_samples: usize,
        #[serde(default)]
        seed: u64,
        /// Include the corrector grid in the report.
        #[serde(default)]
        include_w: bool,
    },
    ConeCert {
        f: Value,
        g: Value,
        #[serde(default = "default_eps")]
        eps: f64,
        #[serde(default)]
        delta0: Option<f64>,
        #[serde(default)]
        verify: bool,
        #[serde(default = "default_cone_samples")]
        samples: usize,
        #[serde(default)]
        seed: u64,
    },
    Lift {
        presentation: Value,
        rho: Value,
        defects: Value,
    },
}

impl Request {
    pub fn command(&self) -> &'static str {
        match self {
            Request::Hyperbolic { .. } => "hyperbolic",
            Request::Splitting { .. } => "splitting",
            Request::Regularity { .. } => "regularity",
            Request::Rank1 { .. } => "rank1",
            Request::Nonres { .. } => "nonres",
            Request::GcdRows { .. } => "gcd-rows",
            Request::Nilpotent { .. } => "nilpotent",
            Request::Semiconj { .. } => "semiconj",
            Request::ConeCert { .. } => "cone-cert",
            Request::Lift { .. } => "lift",
        }
    }
}

/// Error names treated as malformed input; every other error is a domain error.
const MALFORMED_KINDS: &[&str] = &[
    "MalformedInput",
    "DimensionMismatch",
    "DimensionTooLarge",
    "GridTooLarge",
    "InvalidTolerance",
    "Field",
    "InvalidEpsilon",
    "InvalidParameter",
    "UnknownGenerator",
    "UnknownFamily",
    "InvalidRank",
    "NotDominant",
    "NotIntegral",
    "IndexOutOfRange",
    "AntisymmetryViolation",
    "Malformed",
    "NonSquare",
    "ToleranceOutOfRange",
    "Empty",
    "LevelOutOfRange",
    "DegreeMismatch",
];

#[derive(Clone, Debug, PartialEq)]
pub struct AppError {
    pub kind: String,
    pub message: String,
    pub details: Map<String, Value>,
}

impl AppError {
    pub fn malformed(message: impl Into<String>) -> Self {
        AppError {
            kind: "MalformedInput".into(),
            message: message.into(),
            details: Map::new(),
        }
    }

    pub fn domain(kind: &str, message: impl Into<String>) -> Self {
        AppError {
            kind: kind.into(),
            message: message.into(),
            details: Map::new(),
        }
    }

    fn with(mut self, key: &str, v: Value) -> Self {
        self.details.insert(key.into(), v);
        self
    }

    pub fn is_malformed(&self) -> bool {
        MALFORMED_KINDS.contains(&self.kind.as_str())
    }

    pub fn exit_code(&self) -> i32 {
        if self.is_malformed() {
            EXIT_MALFORMED
        } else {
            EXIT_DOMAIN
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("error".into(), Value::String(self.kind.clone()));
        m.insert("message".into(), Value::String(self.message.clone()));
        m.insert("schema".into(), Value::String(SCHEMA.into()));
        for (k, v) in &self.details {
            m.insert(k.clone(), v.clone());
        }
        Value::Object(m)
    }
}

/// Leading identifier of a `Debug` rendering, unwrapping `Matrix(..)` wrappers.
fn variant_name(e: &dyn Debug) -> String {
    let s = format!("{e:?}");
    let mut rest = s.as_str();
    loop {
        let name: String = rest.chars().take_while(|c| c.is_alphanumeric() || *c == '_').collect();
        let after = &rest[name.len()..];
        if name == "Matrix" && after.starts_with('(') {
            rest = &after[1..];
            continue;
        }
        return name;
    }
}

macro_rules! impl_from_error {
    ($($t:ty),*) => {$(
        impl From<$t> for AppError {
            fn from(e: $t) -> Self {
                AppError { kind: variant_name(&e), message: e.to_string(), details: Map::new() }
            }
        }
    )*};
}

impl_from_error!(
    crate::matrix_core::MatrixError,
    crate::rootdata::RootError,
    crate::nilpotent::NilError,
    crate::semiconj::SemiconjError,
    crate::cones::ConesError,
    crate::cohomology::CohomologyError
);

fn to_value<T: Serialize>(x: &T) -> Result<Value, AppError> {
    serde_json::to_value(x).map_err(|e| AppError::domain("Internal", e.to_string()))
}

fn report(command: &str, fields: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), Value::String(SCHEMA.into()));
    m.insert("command".into(), Value::String(command.into()));
    if let Value::Object(f) = fields {
        for (k, v) in f {
            m.insert(k, v);
        }
    }
    Value::Object(m)
}

/// Runs one request; the report always carries `"schema"` and `"command"`.
pub fn execute(req: &Request) -> Result<Value, AppError> {
    let cmd = req.command();
    let fields = match req {
        Request::Hyperbolic { matrix, tol } => {
            let m = input::int_matrix(matrix)?;
            let rep = is_hyperbolic(&m, *tol)?;
            if !rep.hyperbolic {
                return Err(AppError::domain("NotHyperbolic", "matrix has an eigenvalue of modulus 1 within tolerance")
                    .with("moduli", to_value(&rep.moduli)?));
            }
            to_value(&rep)?
        }
        Request::Splitting { matrix, tol, margin } => {
            let m = input::int_matrix(matrix)?;
            let split = hyperbolic_splitting(&m, *tol)?;
            let norm = adapted_norm(&split, *margin)?;
            json!({
                "splitting": to_value(&split)?,
                "invariance_defect": split.invariance_defect(),
                "adapted_norm": to_value(&norm)?,
            })
        }
        Request::Regularity { matrix } => {
            let m = input::int_matrix(matrix)?;
            to_value(&regularity_profile(&m.to_q())?)?
        }
        Request::Rank1 { vectors } => {
            let v = input::float_rows(vectors)?;
            to_value(&rank_one_factor_test(&v)?)?
        }
        Request::Nonres {
            family,
            rank,
            highest_weight,
            limit,
        } => {
            let fam = Family::parse(family, *rank)?;
            let rs = build_root_system(fam, *rank)?;
            let labels = highest_weight
                .iter()
                .map(crate::json::parse_q)
                .collect::<Result<Vec<_>, _>>()
                .map_err(AppError::malformed)?;
            let lambda = rs.from_dynkin(&labels)?;
            let ws = weights_from_highest(&rs, &lambda, *limit)?;
            let rep = resonance_analysis(&rs, &ws)?;
            let mut v = to_value(&rep)?;
            v["highest_weight"] = rational_vec(&lambda);
            v["nontriviality"] = to_value(&weights_all_nontrivial(&ws))?;
            v
        }
        Request::GcdRows { family, rank } => {
            let fam = Family::parse(family, *rank)?;
            let rs = build_root_system(fam, *rank)?;
            json!({
                "family": fam.to_string(),
                "rank": rank,
                "cartan": rs.cartan(),
                "gcds": cartan_row_gcds(&rs),
            })
        }
        Request::Nilpotent {
            algebra,
            automorphism,
            level,
        } => {
            let alg = input::algebra(algebra)?;
            let tower = central_series(&alg)?;
            let mut v = json!({
                "dim": alg.dim(),
                "degree": tower.degree(),
                "center_dims": tower.center_dims(),
                "layer_dims": tower.layer_dims(),
            });
            if let Some(phi) = automorphism {
                let aut = check_automorphism(&alg, &input::qmatrix(phi)?)?;
                v["layers"] = to_value(&layer_hyperbolicity(&alg, &aut)?)?;
                if let Some(l) = level {
                    v["level"] = json!(l);
                    v["descended"] = rational_rows(&descend_automorphism(&alg, &aut, *l)?);
                }
            } else if level.is_some() {
                return Err(AppError::malformed("--level needs an automorphism"));
            }
            v
        }
        Request::Semiconj {
            matrix,
            field,
            tol,
            grid,
            max_terms,
            samples,
            holder_samples,
            seed,
            include_w,
        } => semiconj(matrix, field, *tol, *grid, *max_terms, *samples, *holder_samples, *seed, *include_w)?,
        Request::ConeCert {
            f,
            g,
            eps,
            delta0,
            verify,
            samples,
            seed,
        } => {
            let fm = input::int_matrix(f)?;
            let split = hyperbolic_splitting(&fm, DEFAULT_TOL)?;
            let gm = input::qmatrix(g)?.to_f64();
            let spec = ConeSpec::new(&split, *eps)?;
            let consts = cone_constants(&spec, &MapData::Linear(gm.clone()), 0)?;
            let cert = certify_power(&consts, *eps, *delta0)?;
            let mut v = to_value(&cert)?;
            if *verify {
                let composed = ComposedMap::sandwich(split.source(), MapData::Linear(gm), cert.n)?;
                v["verification"] = to_value(&numeric_cone_check(&composed, &spec, *samples, *seed)?)?;
                v["verification"]["seed"] = json!(seed);
            }
            v
        }
        Request::Lift {
            presentation,
            rho,
            defects,
        } => {
            let sys = input::twisted_system(presentation, rho, defects)?;
            let gens = &sys.presentation.generators;
            match solve_lifting(&sys)? {
                LiftingOutcome::Solved { eta, q, nullity } => {
                    let corrected = corrected_defect(&sys, &eta)?;
                    let mut eta_map = Map::new();
                    for (g, e) in gens.iter().zip(&eta) {
                        eta_map.insert(g.clone(), rational_vec(e));
                    }
                    json!({
                        "status": "SOLVED",
                        "q": crate::json::bigint_value(&q),
                        "eta": eta_map,
                        "nullity": nullity,
                        "corrected_defect": corrected.iter().map(|v| rational_vec(v)).collect::<Vec<_>>(),
                    })
                }
                LiftingOutcome::Unsolvable { obstruction } => {
                    return Err(AppError::domain(
                        "UNSOLVABLE",
                        "relator equations have no rational solution (presentation-level obstruction)",
                    )
                    .with("obstruction", rational_vec(&obstruction)));
                }
            }
        }
    };
    Ok(report(cmd, fields))
}

#[allow(clippy::too_many_arguments)]
fn semiconj(
    matrix: &Value,
    field: &Value,
    tol: f64,
    grid: usize,
    max_terms: usize,
    samples: usize,
    holder_samples: usize,
    seed: u64,
    include_w: bool,
) -> Result<Value, AppError> {
    let a = input::int_matrix(matrix)?;
    let u = input::field(field, a.dim())?;
    let sol = solve_semiconjugacy(&a, u.as_ref(), &SolveOptions { tol, max_terms, grid })?;
    let d = a.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Pt> = (0..samples)
        .map(|_| {
            let mut p = [0.0; MAX_DIM];
            for x in p.iter_mut().take(d) {
                *x = rng.gen::<f64>();
            }
            p
        })
        .collect();
    let corr = Corrector::new(&a, u.as_ref(), tol, max_terms)?;
    let (oracle, interpolated) = if pts.is_empty() {
        (Value::Null, Value::Null)
    } else {
        let pointwise = residual(&a, u.as_ref(), |x| corr.eval(x).unwrap_or([f64::NAN; MAX_DIM]), &pts)?;
        let interp = residual(&a, u.as_ref(), |x| sol.w.interpolate(x), &pts)?;
        (json!(pointwise), json!(interp))
    };
    let mut v = json!({
        "dim": d,
        "grid_shape": sol.w.grid_shape(),
        "tol": sol.tol,
        "residual_sup": sol.residual_sup,
        "series_terms_used": sol.series_terms_used,
        "verification_points": sol.verification_points,
        "rate": sol.rate,
        "kappa": sol.kappa,
        "contraction_factor": sol.contraction_factor,
        "lambda_s": sol.splitting.lambda_s,
        "lambda_u": sol.splitting.lambda_u,
        "w_sup_norm": sol.w.sup_norm(),
        "oracle": {
            "samples": samples,
            "seed": seed,
            "residual": oracle,
            "interpolated_residual": interpolated,
        },
    });
    if holder_samples > 0 {
        let est = holder_exponent_estimate(d, |x| corr.eval(x), holder_samples, seed)?;
        v["holder"] = to_value(&est)?;
    }
    if include_w {
        v["w"] = to_value(&sol.w)?;
    }
    Ok(v)
}

/// Parses a JSON request and executes it, returning the exit code and body.
pub fn run_json(request: &str) -> (i32, Value) {
    let req: Request = match serde_json::from_str(request) {
        Ok(r) => r,
        Err(e) => return (EXIT_MALFORMED, AppError::malformed(e.to_string()).to_json()),
    };
    match execute(&req) {
        Ok(v) => (EXIT_OK, v),
        Err(e) => (e.exit_code(), e.to_json()),
    }
}

#[cfg(test)]
mod tests;
