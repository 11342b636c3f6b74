use super::*;
use crate::exact::{q, vec_add, vec_is_zero, vec_sub, QMatrix};
use num_traits::One;
use num_traits::ToPrimitive;
use std::collections::HashMap;

fn qv(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

fn iv(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn cat() -> QMatrix {
    QMatrix::from_i64_rows(&[vec![2, 1], vec![1, 1]])
}

fn z2() -> GroupPresentation {
    GroupPresentation::from_symbols(&["a", "b"], &[vec!["a", "b", "a^-1", "b^-1"]]).unwrap()
}

fn z2_system(rho: Representation, defect: &[i64]) -> TwistedSystem {
    TwistedSystem::new(z2(), rho, vec![iv(defect)]).unwrap()
}

#[test]
fn words_reduce_and_parse() {
    let p = z2();
    let w = p.word(&["a", "b", "b^-1", "a^-1", "a"]).unwrap();
    assert_eq!(free_reduce(&w), p.word(&["a"]).unwrap());
    assert_eq!(p.format_word(&invert(&p.word(&["a", "b"]).unwrap())), vec!["b^-1", "a^-1"]);
    assert!(matches!(p.word(&["c"]), Err(CohomologyError::UnknownGenerator(_))));
    let reduced = GroupPresentation::from_symbols(&["a"], &[vec!["a", "a^-1", "a"]]).unwrap();
    assert_eq!(reduced.relators[0], vec![Letter::new(0, false)]);
}

#[test]
fn degree_zero_coboundary() {
    let rho = Representation::trivial(2, 2);
    let f = Cochain::constant(qv(&[3, -1]));
    let w = z2().word(&["a", "b"]).unwrap();
    assert!(vec_is_zero(&coboundary_eval(&rho, 0, &f, &[w.clone()]).unwrap()));
    let rho = Representation::new(2, vec![cat(), cat()]).unwrap();
    // ψ(ab)v − v with ψ(ab) = A², v = (1, 0): A²v = (5, 3)
    let v = coboundary_eval(&rho, 0, &Cochain::constant(qv(&[1, 0])), &[w]).unwrap();
    assert_eq!(v, qv(&[4, 3]));
}

#[test]
fn degree_one_coboundary_entrywise() {
    let p = GroupPresentation::from_symbols(&["a"], &[]).unwrap();
    let rho = Representation::new(2, vec![cat()]).unwrap();
    let a = p.word(&["a"]).unwrap();
    let a2 = p.word(&["a", "a"]).unwrap();
    let mut table = HashMap::new();
    table.insert(vec![a.clone()], qv(&[1, 0]));
    table.insert(vec![a2], qv(&[4, 9]));
    let f = Cochain::from_table(1, 2, table).unwrap();
    // A·(1,0) = (2,1); (2,1) − (4,9) + (1,0)
    let v = coboundary_eval(&rho, 1, &f, &[a.clone(), a]).unwrap();
    assert_eq!(v, qv(&[-1, -8]));
}

#[test]
fn complex_property_on_table_cochain() {
    let p = z2();
    let rho = Representation::new(2, vec![cat(), QMatrix::from_i64_rows(&[vec![1, 1], vec![0, 1]])]).unwrap();
    let f = Cochain::from_fn(1, 2, |t| {
        let w = &t[0];
        let s: i64 = w.iter().map(|l| (l.generator as i64 + 1) * if l.inverse { -3 } else { 2 }).sum();
        qv(&[s * s - w.len() as i64, s + 7])
    });
    let df = coboundary(&rho, &f);
    let words = [vec!["a"], vec!["b", "a^-1"], vec!["a", "a", "b"], vec!["b^-1"]];
    for x in &words {
        for y in &words {
            for z in &words {
                let t = [p.word(x).unwrap(), p.word(y).unwrap(), p.word(z).unwrap()];
                assert!(vec_is_zero(&coboundary_eval(&rho, 2, &df, &t).unwrap()));
            }
        }
    }
}

#[test]
fn pairwise_defect_is_a_cocycle() {
    let p = z2();
    let rho = Representation::new(2, vec![cat(), cat().pow(2)]).unwrap();
    let lifts = Cochain::from_fn(1, 2, |t| {
        let n = t[0].len() as i64;
        let g = t[0].first().map_or(0, |l| l.generator as i64 + 1);
        qv(&[n * g - 1, 3 - n])
    });
    let beta = induced_pairwise_defect(&rho, &lifts).unwrap();
    let t = [p.word(&["a", "b"]).unwrap(), p.word(&["b^-1"]).unwrap(), p.word(&["a", "a"]).unwrap()];
    assert!(vec_is_zero(&coboundary_eval(&rho, 2, &beta, &t).unwrap()));
}

#[test]
fn defects_along_words() {
    let rho = Representation::new(2, vec![cat(), cat()]).unwrap();
    let sys = z2_system(rho.clone(), &[2, -1]);
    let p = &sys.presentation;
    assert!(vec_is_zero(&word_defect(&sys, &[]).unwrap()));
    assert!(vec_is_zero(&word_defect(&sys, &p.word(&["a"]).unwrap()).unwrap()));
    assert_eq!(word_defect(&sys, &p.relators[0]).unwrap(), qv(&[2, -1]));
    assert_eq!(word_defect(&sys, &invert(&p.relators[0])).unwrap(), qv(&[-2, 1]));
    // a·r·a⁻¹: the relator sits behind the prefix a, so its defect is twisted by A
    let conj = p.word(&["a", "a", "b", "a^-1", "b^-1", "a^-1"]).unwrap();
    assert_eq!(word_defect(&sys, &conj).unwrap(), cat().mul_vec(&qv(&[2, -1])));
}

#[test]
fn relator_equations() {
    let p = GroupPresentation::from_symbols(&["a"], &[vec!["a", "a", "a"]]).unwrap();
    let sys = TwistedSystem::new(p.clone(), Representation::trivial(2, 1), vec![iv(&[1, 0])]).unwrap();
    let eq = relator_equation(&sys, &p.relators[0]).unwrap();
    assert_eq!(eq.coefficients[0], QMatrix::identity(2).scale(&q(3)));
    assert_eq!(eq.rhs, qv(&[-1, 0]));
    let cancel = relator_equation(&sys, &p.word(&["a", "a^-1"]).unwrap()).unwrap();
    assert!(cancel.coefficients[0].is_zero() && vec_is_zero(&cancel.rhs));

    let a = cat();
    let b = cat().pow(3);
    let sys = z2_system(Representation::new(2, vec![a.clone(), b.clone()]).unwrap(), &[1, 1]);
    let eq = relator_equation(&sys, &sys.presentation.relators[0]).unwrap();
    let i = QMatrix::identity(2);
    assert_eq!(eq.coefficients[0], i.sub(&b));
    assert_eq!(eq.coefficients[1], a.sub(&i));
    // a coboundary η(g) = ψ(g)v − v satisfies the homogeneous equation
    let v = qv(&[5, -2]);
    let eta: Vec<Vec<Q>> = [&a, &b].iter().map(|m| vec_sub(&m.mul_vec(&v), &v)).collect();
    let lhs = vec_add(&eq.coefficients[0].mul_vec(&eta[0]), &eq.coefficients[1].mul_vec(&eta[1]));
    assert!(vec_is_zero(&lhs));
}

#[test]
fn free_group_lifts_trivially() {
    let p = GroupPresentation::from_symbols(&["a", "b"], &[]).unwrap();
    let sys = TwistedSystem::new(p, Representation::new(2, vec![cat(), cat()]).unwrap(), vec![]).unwrap();
    match solve_lifting(&sys).unwrap() {
        LiftingOutcome::Solved { eta, q, .. } => {
            assert!(eta.iter().all(|v| vec_is_zero(v)));
            assert_eq!(q, BigInt::one());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn cat_map_commutator_lifts_integrally() {
    let sys = z2_system(Representation::new(2, vec![cat(), cat()]).unwrap(), &[3, -7]);
    let LiftingOutcome::Solved { eta, q, .. } = solve_lifting(&sys).unwrap() else {
        panic!("expected a solution");
    };
    assert_eq!(q, BigInt::one());
    assert!(corrected_defect(&sys, &eta).unwrap().iter().all(|v| vec_is_zero(v)));
    let zero = vec![sys.zero_vector(); 2];
    assert_eq!(corrected_defect(&sys, &zero).unwrap(), vec![qv(&[3, -7])]);
    let wrong = vec![qv(&[1, 0]), qv(&[0, 0])];
    assert!(!vec_is_zero(&corrected_defect(&sys, &wrong).unwrap()[0]));
}

#[test]
fn trivial_action_obstructs() {
    let sys = z2_system(Representation::trivial(2, 2), &[1, 0]);
    let LiftingOutcome::Unsolvable { obstruction } = solve_lifting(&sys).unwrap() else {
        panic!("expected an obstruction");
    };
    let (m, b) = lifting::stacked_system(&sys).unwrap();
    for j in 0..m[0].len() {
        let s: Q = m.iter().zip(&obstruction).map(|(row, y)| &row[j] * y).sum();
        assert!(s.is_zero());
    }
    let s: Q = b.iter().zip(&obstruction).map(|(x, y)| x * y).sum();
    assert!(!s.is_zero());
}

#[test]
fn torsion_relator_needs_denominator() {
    let p = GroupPresentation::from_symbols(&["a"], &[vec!["a", "a"]]).unwrap();
    let sys = TwistedSystem::new(p, Representation::trivial(1, 1), vec![iv(&[1])]).unwrap();
    let LiftingOutcome::Solved { eta, q, .. } = solve_lifting(&sys).unwrap() else {
        panic!("expected a solution");
    };
    assert_eq!(q.to_i64(), Some(2));
    assert_eq!(eta[0][0], crate::exact::q_frac(-1, 2));
}

#[test]
fn conjugation_covariance() {
    let p_mat = QMatrix::from_i64_rows(&[vec![1, 2], vec![0, 1]]);
    let rho = Representation::new(2, vec![cat(), cat().pow(2)]).unwrap();
    let sys = z2_system(rho.clone(), &[4, 1]);
    let pd: Vec<BigInt> = p_mat.mul_vec(&qv(&[4, 1])).iter().map(|x| x.to_integer()).collect();
    let conj = TwistedSystem::new(z2(), rho.conjugate(&p_mat).unwrap(), vec![pd]).unwrap();
    let LiftingOutcome::Solved { eta, .. } = solve_lifting(&sys).unwrap() else {
        panic!("expected a solution");
    };
    let moved: Vec<Vec<Q>> = eta.iter().map(|v| p_mat.mul_vec(v)).collect();
    assert!(corrected_defect(&conj, &moved).unwrap().iter().all(|v| vec_is_zero(v)));
}

#[test]
fn malformed_systems() {
    assert!(matches!(
        TwistedSystem::new(z2(), Representation::trivial(2, 1), vec![iv(&[0, 0])]),
        Err(CohomologyError::Malformed(_))
    ));
    assert!(matches!(
        TwistedSystem::new(z2(), Representation::trivial(2, 2), vec![iv(&[0])]),
        Err(CohomologyError::DimensionMismatch { .. })
    ));
    assert!(matches!(
        Representation::new(2, vec![QMatrix::zeros(2, 2)]),
        Err(CohomologyError::NotInvertible(_))
    ));
}
