use super::*;
use serde_json::json;

fn run(v: Value) -> (i32, Value) {
    run_json(&v.to_string())
}

#[test]
fn identity_is_not_hyperbolic() {
    let (code, body) = run(json!({"command": "hyperbolic", "matrix": [[1, 0], [0, 1]]}));
    assert_eq!(code, EXIT_DOMAIN);
    assert_eq!(body["error"], "NotHyperbolic");
    assert_eq!(body["schema"], "v1");
}

#[test]
fn cat_map_is_hyperbolic() {
    let (code, body) = run(json!({"command": "hyperbolic", "matrix": {"d": 2, "entries": [[2, 1], [1, 1]]}}));
    assert_eq!(code, EXIT_OK);
    assert_eq!(body["hyperbolic"], true);
    assert_eq!(body["command"], "hyperbolic");
}

#[test]
fn malformed_inputs_exit_one() {
    assert_eq!(run_json("{not json").0, EXIT_MALFORMED);
    assert_eq!(run(json!({"command": "nosuch"})).0, EXIT_MALFORMED);
    assert_eq!(run(json!({"command": "hyperbolic", "matrix": [[1, 2], [3]]})).0, EXIT_MALFORMED);
    assert_eq!(run(json!({"command": "hyperbolic", "matrix": [["x"]]})).0, EXIT_MALFORMED);
    assert_eq!(run(json!({"command": "gcd-rows", "family": "Q", "rank": 2})).0, EXIT_MALFORMED);
}

#[test]
fn variant_names_unwrap_matrix() {
    let e: AppError = crate::semiconj::SemiconjError::Matrix(crate::matrix_core::MatrixError::NotHyperbolic {
        moduli: vec![1.0],
    })
    .into();
    assert_eq!(e.kind, "NotHyperbolic");
    assert_eq!(e.exit_code(), EXIT_DOMAIN);
    let e: AppError = crate::semiconj::SemiconjError::InvalidTolerance(-1.0).into();
    assert_eq!(e.kind, "InvalidTolerance");
    assert!(e.is_malformed());
}

#[test]
fn nonres_c2_table() {
    let (code, body) = run(json!({"command": "nonres", "family": "C", "rank": 2, "highest_weight": [1, 0]}));
    assert_eq!(code, EXIT_OK);
    assert_eq!(body["classification"], "weak");
    let t = render_report(&body, false);
    assert!(t.contains("resonant") && t.contains("nonresonant") && t.contains("weak"), "{t}");
}

#[test]
fn lift_unsolvable_is_domain_error() {
    let (code, body) = run(json!({
        "command": "lift",
        "presentation": {"generators": ["a", "b"], "relators": [["a", "b", "a^-1", "b^-1"]]},
        "rho": [[[1, 0], [0, 1]], [[1, 0], [0, 1]]],
        "defects": [[1, 0]],
    }));
    assert_eq!(code, EXIT_DOMAIN);
    assert_eq!(body["error"], "UNSOLVABLE");
    assert!(body["obstruction"].is_array());
}

#[test]
fn lift_keyed_rho() {
    let (code, body) = run(json!({
        "command": "lift",
        "presentation": {"generators": ["a", "b"], "relators": [["a", "b", "a^-1", "b^-1"]]},
        "rho": {"a": [[2, 1], [1, 1]], "b": [[1, 0], [0, 1]]},
        "defects": [[3, -1]],
    }));
    assert_eq!(code, EXIT_OK, "{body}");
    assert_eq!(body["status"], "SOLVED");
    assert_eq!(body["corrected_defect"], json!([[0, 0]]));
    assert!(body["eta"]["a"].is_array() && body["eta"]["b"].is_array());
}

#[test]
fn cone_table_has_five_rows_and_power() {
    let (code, body) = run(json!({"command": "cone-cert", "f": [[2, 1], [1, 1]], "g": [[1, 0], [0, 1]], "eps": 1.0}));
    assert_eq!(code, EXIT_OK);
    assert_eq!(body["N"], 1);
    let t = render_report(&body, false);
    for label in ["r ", "C ", "λ ", "δ0", "T ", "N "] {
        assert!(t.contains(label), "{label} missing in {t}");
    }
    assert_ne!(render_report(&body, true), t);
}

#[test]
fn render_number_formats() {
    let v = json!({"command": "x", "a": 0.1234567891, "b": 2.5e-9});
    let short = render_report(&v, false);
    assert!(short.contains("0.123457") && short.contains("2.50000e-9"), "{short}");
    let long = render_report(&v, true);
    assert!(long.contains("0.1234567891") && long.contains("2.5e-9"), "{long}");
}

#[test]
fn request_round_trip() {
    let r = Request::ConeCert {
        f: json!([[2, 1], [1, 1]]),
        g: json!([[1, 0], [0, 1]]),
        eps: 0.5,
        delta0: None,
        verify: true,
        samples: 10,
        seed: 3,
    };
    let s = serde_json::to_string(&r).unwrap();
    assert!(s.contains("\"command\":\"cone-cert\""));
    assert_eq!(serde_json::from_str::<Request>(&s).unwrap(), r);
}
