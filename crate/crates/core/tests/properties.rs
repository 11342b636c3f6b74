use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use rigidity_lab::cohomology::{
    coboundary, coboundary_eval, corrected_defect, solve_lifting, Cochain, GroupPresentation, LiftingOutcome, Letter,
    Representation, TwistedSystem, Word,
};
use rigidity_lab::cones::{certify_power, cone_constants, numeric_cone_check, CertificateKind, ComposedMap, ConeConstants, ConeSpec, MapData};
use rigidity_lab::exact::q;
use rigidity_lab::matrix_core::{hyperbolic_splitting, is_hyperbolic, IntMatrix, DEFAULT_TOL};
use rigidity_lab::rootdata::{build_root_system, weights_from_highest, Family, DEFAULT_WEIGHT_LIMIT};

/// Products of elementary matrices, optionally times a swap; always det ±1.
fn unimodular() -> impl Strategy<Value = IntMatrix> {
    (prop::collection::vec((any::<bool>(), -3i64..=3), 1..5), any::<bool>()).prop_map(|(steps, swap)| {
        let mut m = IntMatrix::identity(2);
        for (upper, t) in steps {
            let e = if upper { vec![vec![1, t], vec![0, 1]] } else { vec![vec![1, 0], vec![t, 1]] };
            m = m.mul(&IntMatrix::from_i64(&e).unwrap());
        }
        if swap {
            m = m.mul(&IntMatrix::from_i64(&[vec![0, 1], vec![1, 0]]).unwrap());
        }
        m
    })
}

fn word(n_gens: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..n_gens, any::<bool>()), 0..4)
        .prop_map(|ls| ls.into_iter().map(|(g, inv)| Letter::new(g, inv)).collect())
}

fn cat() -> IntMatrix {
    IntMatrix::from_i64(&[vec![2, 1], vec![1, 1]]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hyperbolic_matches_trace_rule(m in unimodular()) {
        let t = (m.get(0, 0) + m.get(1, 1)).to_i64().unwrap();
        let det = m.det().to_i64().unwrap();
        // det 1: eigenvalues off the circle iff |tr| > 2; det -1: iff tr ≠ 0
        let expected = if det == 1 { t.abs() > 2 } else { t != 0 };
        prop_assert_eq!(is_hyperbolic(&m, DEFAULT_TOL).unwrap().hyperbolic, expected);
    }

    #[test]
    fn power_is_monotone_in_lambda(r in 0.01f64..2.0, c in 0.5f64..20.0, l1 in 0.05f64..0.95, dl in 0.0f64..0.04, eps in 0.05f64..1.0) {
        prop_assume!(c > r);
        let k = |lambda| ConeConstants { r, c, lambda, kind: CertificateKind::Exact, samples: 0 };
        let a = certify_power(&k(l1), eps, None).unwrap();
        let b = certify_power(&k(l1 + dl), eps, None).unwrap();
        prop_assert!(a.n <= b.n);
        prop_assert!(a.inequalities.iter().all(|i| i.slack >= 0.0));
        if a.n > 1 {
            // N is minimal: one fewer power breaks some inequality
            let lam = l1;
            let n = (a.n - 1) as i32;
            let q2 = lam.powi(2 * n);
            let third = lam.powi(-n) * (r * lam.powi(-n) - c * lam.powi(n) * eps);
            prop_assert!(q2 * eps > a.delta0 || q2 * a.t > eps / 2.0 || third < 2.0);
        }
    }

    #[test]
    fn certified_sandwich_passes_cone_check(g in unimodular(), eps in 0.2f64..1.0, seed in 0u64..1000) {
        let split = hyperbolic_splitting(&cat(), DEFAULT_TOL).unwrap();
        let spec = ConeSpec::new(&split, eps).unwrap();
        let Ok(consts) = cone_constants(&spec, &MapData::linear(&g), 0) else { return Ok(()); };
        let Ok(cert) = certify_power(&consts, eps, None) else { return Ok(()); };
        prop_assume!(cert.n <= 12);
        let map = ComposedMap::sandwich(split.source(), MapData::linear(&g), cert.n).unwrap();
        let rep = numeric_cone_check(&map, &spec, 400, seed);
        prop_assert!(rep.is_ok(), "N = {}: {:?}", cert.n, rep.err());
    }

    #[test]
    fn coboundary_squares_to_zero(
        mats in prop::collection::vec(unimodular(), 2),
        coeffs in prop::collection::vec(-5i64..=5, 4),
        tuple in prop::collection::vec(word(2), 3),
    ) {
        let rho = Representation::new(2, mats.iter().map(IntMatrix::to_q).collect()).unwrap();
        let (a, b, c, d) = (coeffs[0], coeffs[1], coeffs[2], coeffs[3]);
        let f = Cochain::from_fn(1, 2, move |t| {
            let w = &t[0];
            let s: i64 = w.iter().enumerate().map(|(i, l)| (i as i64 + a) * if l.inverse { -c } else { b + l.generator as i64 }).sum();
            vec![q(s * s + d), q(s - w.len() as i64)]
        });
        let df = coboundary(&rho, &f);
        let ddf = coboundary_eval(&rho, 2, &df, &tuple).unwrap();
        prop_assert!(ddf.iter().all(Zero::is_zero));
    }

    #[test]
    fn solved_lifts_kill_the_defect(a in unimodular(), b in unimodular(), v in prop::collection::vec(-6i64..=6, 2)) {
        let p = GroupPresentation::from_symbols(&["a", "b"], &[vec!["a", "b", "a^-1", "b^-1"]]).unwrap();
        let rho = Representation::new(2, vec![a.to_q(), b.to_q()]).unwrap();
        let sys = TwistedSystem::new(p, rho, vec![v.iter().map(|&x| BigInt::from(x)).collect()]).unwrap();
        match solve_lifting(&sys).unwrap() {
            LiftingOutcome::Solved { eta, q: den, .. } => {
                let corr = corrected_defect(&sys, &eta).unwrap();
                prop_assert!(corr.iter().flatten().all(Zero::is_zero));
                let scale = rigidity_lab::exact::Q::from_integer(den);
                prop_assert!(eta.iter().flatten().all(|x| (x * &scale).is_integer()));
            }
            LiftingOutcome::Unsolvable { obstruction } => prop_assert!(obstruction.iter().any(|x| !x.is_zero())),
        }
    }

    #[test]
    fn weight_sets_are_weyl_stable(labels in prop::collection::vec(0i64..=2, 3), fam in prop::sample::select(vec![Family::A, Family::B, Family::C])) {
        prop_assume!(labels.iter().any(|&l| l > 0));
        let rs = build_root_system(fam, 3).unwrap();
        let lambda = rs.from_dynkin(&labels.iter().map(|&l| q(l)).collect::<Vec<_>>()).unwrap();
        let ws = weights_from_highest(&rs, &lambda, DEFAULT_WEIGHT_LIMIT).unwrap();
        prop_assert!(ws.contains(&lambda));
        for w in &ws.weights {
            for i in 0..3 {
                prop_assert!(ws.contains(&rs.reflect(i, w)));
            }
        }
    }
}

