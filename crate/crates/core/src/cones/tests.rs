use super::*;
use crate::matrix_core::{hyperbolic_splitting, IntMatrix, DEFAULT_TOL};

fn cat_split() -> HyperbolicSplitting {
    hyperbolic_splitting(&IntMatrix::from_i64(&[vec![2, 1], vec![1, 1]]).unwrap(), DEFAULT_TOL).unwrap()
}

fn lam() -> f64 {
    (3.0 - 5f64.sqrt()) / 2.0
}

/// Independent search: first `n` where all three bounds hold.
fn brute_force_n(r: f64, c: f64, l: f64, eps: f64) -> u64 {
    let d0 = r / (2.0 * c);
    let t = c * (d0 + 1.0) / (r - c * d0);
    (1..).find(|&n| {
        let p = l.powi(2 * n as i32);
        p * eps <= d0 && p * t <= eps / 2.0 && r / p - c * eps >= 2.0
    })
    .unwrap()
}

fn consts(r: f64, c: f64, lambda: f64) -> ConeConstants {
    ConeConstants {
        r,
        c,
        lambda,
        kind: CertificateKind::Exact,
        samples: 1,
    }
}

#[test]
fn cat_map_with_identity() {
    let spec = ConeSpec::new(&cat_split(), 1.0).unwrap();
    let k = cone_constants(&spec, &MapData::identity(2), 0).unwrap();
    assert!((k.r - 1.0).abs() < 1e-12 && (k.c - 1.0).abs() < 1e-12);
    assert!((k.lambda - lam()).abs() < 1e-12);
    let cert = certify_power(&k, 1.0, None).unwrap();
    assert_eq!(cert.n, 1);
    assert!((cert.delta0 - 0.5).abs() < 1e-12 && (cert.t - 3.0).abs() < 1e-12);
    let l2 = lam() * lam();
    let expected = [0.5 - l2, 0.5 - 3.0 * l2, 1.0 / l2 - 3.0];
    for (ineq, e) in cert.inequalities.iter().zip(expected) {
        assert!((ineq.slack - e).abs() < 1e-9, "{} vs {e}", ineq.slack);
    }
}

#[test]
fn narrow_cone_needs_more_iterations() {
    let cert = certify_power(&consts(1.0, 1.0, lam()), 0.01, None).unwrap();
    assert_eq!(cert.n, brute_force_n(1.0, 1.0, lam(), 0.01));
    assert_eq!(cert.n, 4);
}

#[test]
fn slow_rate_stress() {
    let cert = certify_power(&consts(0.01, 10.0, 0.99), 1.0, None).unwrap();
    assert_eq!(cert.n, brute_force_n(0.01, 10.0, 0.99, 1.0));
    assert_eq!(cert.n, 413);
    let faster = certify_power(&consts(0.01, 10.0, 0.98), 1.0, None).unwrap();
    assert!(faster.n <= cert.n);
    assert!(matches!(
        certify_power(&consts(0.01, 10.0, 1.0), 1.0, None),
        Err(ConesError::NoFinitePower { .. })
    ));
    assert!(matches!(
        certify_power(&consts(0.0, 10.0, 0.5), 1.0, None),
        Err(ConesError::NoFinitePower { .. })
    ));
}

#[test]
fn swap_matrix_blocks() {
    // eigenbasis of the cat map is orthonormal: B in that basis has blocks ±2/√5, ±1/√5
    let spec = ConeSpec::new(&cat_split(), 1.0).unwrap();
    let b = IntMatrix::from_i64(&[vec![0, 1], vec![1, 0]]).unwrap();
    let k = cone_constants(&spec, &MapData::linear(&b), 0).unwrap();
    let s5 = 5f64.sqrt();
    assert!((k.r - 2.0 / s5).abs() < 1e-9, "{}", k.r);
    assert!((k.c - 3.0 / s5).abs() < 1e-9, "{}", k.c);
}

#[test]
fn rotation_of_eigenbasis_is_not_transverse() {
    let spec = ConeSpec::new(&cat_split(), 1.0).unwrap();
    let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    let g = spec.norm.coordinates_inverse() * rot * spec.norm.coordinates();
    assert!(matches!(
        cone_constants(&spec, &MapData::Linear(g), 0),
        Err(ConesError::TransversalityFailure { .. })
    ));
}

#[test]
fn numeric_check_on_cat_square() {
    let split = cat_split();
    let spec = ConeSpec::new(&split, 1.0).unwrap();
    let f = ComposedMap::sandwich(split.source(), MapData::identity(2), 1).unwrap();
    let rep = numeric_cone_check(&f, &spec, 500, 3).unwrap();
    assert_eq!(rep.violations, 0);
    assert!((rep.forward_expansion - 1.0 / (lam() * lam())).abs() < 1e-6);
    assert!(rep.forward_expansion >= 2.9);
    for bad in [MapData::identity(2), MapData::Linear(split.source().clone().try_inverse().unwrap())] {
        assert!(matches!(
            numeric_cone_check(&ComposedMap::single(bad), &spec, 100, 3),
            Err(ConesError::ConeViolation { .. })
        ));
    }
}

#[test]
fn membership_and_closure() {
    let split = cat_split();
    let a = ComposedMap::single(MapData::Linear(split.source().clone()));
    let inv = ComposedMap::single(MapData::Linear(split.source().clone().try_inverse().unwrap()));
    assert!(semigroup_member(&split, &a, 1.0, 200, 1).unwrap().member);
    assert!(semigroup_member(&split, &a.then(&a), 1.0, 200, 1).unwrap().member);
    let rep = semigroup_member(&split, &inv, 1.0, 200, 1).unwrap();
    assert!(!rep.member && rep.violations > 0);
    assert!(!semigroup_member(&split, &ComposedMap::single(MapData::identity(2)), 1.0, 200, 1).unwrap().member);
}

#[test]
fn nonlinear_g_is_empirical_and_sound() {
    let split = cat_split();
    let spec = ConeSpec::new(&split, 0.5).unwrap();
    let tau = std::f64::consts::TAU;
    let g = NonlinearMap::new(
        2,
        move |x| vec![x[0] + 0.02 * (tau * x[1]).sin(), x[1]],
        move |x| DMatrix::from_row_slice(2, 2, &[1.0, 0.02 * tau * (tau * x[1]).cos(), 0.0, 1.0]),
    );
    let k = cone_constants(&spec, &MapData::Nonlinear(g.clone()), 16).unwrap();
    assert_eq!(k.kind, CertificateKind::Empirical);
    assert_eq!(k.samples, 256);
    let cert = certify_power(&k, 0.5, None).unwrap();
    let f = ComposedMap::sandwich(split.source(), MapData::Nonlinear(g), cert.n).unwrap();
    assert_eq!(numeric_cone_check(&f, &spec, 1000, 9).unwrap().violations, 0);
}

#[test]
fn epsilon_and_delta_validation() {
    assert!(matches!(ConeSpec::new(&cat_split(), 1.5), Err(ConesError::InvalidEpsilon(_))));
    assert!(matches!(
        certify_power(&consts(1.0, 1.0, 0.5), 1.0, Some(2.0)),
        Err(ConesError::InvalidParameter(_))
    ));
    let c = certify_power(&consts(1.0, 1.0, 0.5), 1.0, Some(0.25)).unwrap();
    assert!((c.t - 1.25 / 0.75).abs() < 1e-12);
}
