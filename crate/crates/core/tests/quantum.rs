use nalgebra::DVector;
use nlgame::game::feige;
use nlgame::quantum::*;
use nlgame::strategies::{correlation_of_quantum, eval_correlation, CMatrix, QuantumStrategy};
use nlgame::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn value(s: &QuantumStrategy) -> f64 {
    let g = feige();
    eval_correlation(&g, &correlation_of_quantum(&g, s).unwrap()).unwrap().to_f64()
}

fn one_by_one(v: f64) -> CMatrix {
    CMatrix::from_element(1, 1, Complex64::new(v, 0.0))
}

/// Both players always answer ⊥ with a one-dimensional product state.
fn classical_embedding() -> QuantumStrategy {
    let pvm = vec![one_by_one(0.0), one_by_one(0.0), one_by_one(1.0)];
    QuantumStrategy {
        dim_a: 1,
        dim_b: 1,
        state: DVector::from_element(1, Complex64::new(1.0, 0.0)),
        alice: vec![pvm.clone(), pvm.clone()],
        bob: vec![pvm.clone(), pvm],
    }
}

#[test]
fn optimal_value_and_overlaps() {
    let s = feige_optimal_strategy(0.75).unwrap();
    s.validate().unwrap();
    assert!((value(&s) - 9.0 / 16.0).abs() < 1e-10);
    let nu = nu_of_strategy(&s).unwrap();
    let want = NuMatrix::feige().entries;
    for i in 0..3 {
        for j in 0..3 {
            assert!((nu[i][j] - want[i][j]).abs() < 1e-10, "nu[{i}][{j}] = {}", nu[i][j]);
        }
    }
}

#[test]
fn formula_matches_simulation() {
    for k in 0..=20 {
        let p = k as f64 / 20.0;
        let s = feige_optimal_strategy(p).unwrap();
        assert!((value(&s) - winning_formula(p).unwrap()).abs() < 1e-12, "p = {p}");
    }
}

#[test]
fn argmax_is_three_quarters() {
    let p = golden_section_max(|p| winning_formula(p).unwrap(), 0.0, 1.0, 1e-12);
    assert!((p - 0.75).abs() < 1e-8, "argmax {p}");
    let scaled = golden_section_max(|p| 7.0 * winning_formula(p).unwrap() + 2.0, 0.0, 1.0, 1e-12);
    assert!((scaled - 0.75).abs() < 1e-8);
}

#[test]
fn hadamard_like_unitary() {
    let h = hadamard_like_from_nu(&NuMatrix::feige()).unwrap();
    let r6 = 6f64.sqrt() / 4.0;
    let want = [[0.75, 0.25, r6], [0.25, 0.75, -r6], [r6, -r6, -0.5]];
    for i in 0..3 {
        for j in 0..3 {
            assert!((h[(i, j)] - Complex64::new(want[i][j], 0.0)).norm() < 1e-12);
        }
    }
    let id = &h * h.adjoint();
    assert!((id - CMatrix::identity(3, 3)).norm() < 1e-12);
}

#[test]
fn degeneracy_report() {
    let r = check_degeneracy_condition(&NuMatrix::feige());
    assert!(r.pass);
    assert!(r.pairs.iter().all(|p| p.exact));
    assert_eq!(r.pairs.len(), 3);
    // (a, a) never satisfies the condition for this ν
    assert!(r.diagonal.iter().all(|p| p.witness.is_none()));
    let generic = NuMatrix::new(vec![
        vec![0.5, 0.3, 0.2],
        vec![0.3, 0.4, 0.3],
        vec![0.2, 0.3, 0.5],
    ])
    .unwrap();
    assert!(!check_degeneracy_condition(&generic).pass);
    assert!(matches!(nu_biased_rep(&generic), Err(Error::NotConstructible(_))));
}

#[test]
fn nu_validation() {
    assert!(matches!(NuMatrix::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]), Err(Error::BadNu(_))));
    assert!(matches!(NuMatrix::new(vec![vec![0.6, 0.6], vec![0.6, 0.6]]), Err(Error::BadNu(_))));
    let j = NuMatrix::from_json(r#"[["9/16","1/16","3/8"],["1/16","9/16","3/8"],["3/8","3/8","1/4"]]"#).unwrap();
    assert_eq!(j, NuMatrix::feige());
    let f = NuMatrix::from_json("[[0.5,0.5],[0.5,0.5]]").unwrap();
    assert!(f.exact.is_none());
    let rep = nu_biased_rep(&f).unwrap();
    assert!(rep.residual(&f) < 1e-12);
}

#[test]
fn biased_representation_and_equivalence() {
    let nu = NuMatrix::feige();
    let rep = nu_biased_rep(&nu).unwrap();
    assert!(rep.residual(&nu) < 1e-12);
    assert!(rep.pvm_defect() < 1e-12);

    let strat = BiasedRep::from_strategy(&feige_optimal_strategy(0.75).unwrap()).unwrap();
    assert!(strat.residual(&nu) < 1e-10);
    let eq = unitary_equivalence_check(&rep, &strat).expect("equivalent");
    assert!((&eq.u * eq.u.adjoint() - CMatrix::identity(3, 3)).norm() < 1e-9);

    let swapped = rep.relabeled(&[1, 0, 2]);
    assert!(unitary_equivalence_check(&rep, &swapped).is_some());

    let half = NuMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
    let other = NuMatrix::new(vec![vec![0.75, 0.25], vec![0.25, 0.75]]).unwrap();
    let r1 = nu_biased_rep(&half).unwrap();
    let r2 = nu_biased_rep(&other).unwrap();
    assert!(r2.residual(&other) < 1e-12);
    assert!(unitary_equivalence_check(&r1, &r2).is_none());
    assert!(unitary_equivalence_check(&r1, &rep).is_none());
}

#[test]
fn residuals_vanish_at_optimum() {
    let r = determining_residuals(&feige_optimal_strategy(0.75).unwrap()).unwrap();
    assert_eq!(r.gamma.len(), 6);
    assert_eq!(r.relations.len(), 18);
    assert!(r.max_residual < 1e-9, "{:?}", r);
    assert!(r.epsilon.abs() < 1e-10);
}

#[test]
fn classical_embedding_residual() {
    let r = determining_residuals(&classical_embedding()).unwrap();
    assert!((r.epsilon - (9.0 / 16.0 - value(&classical_embedding()))).abs() < 1e-15);
    assert!(r.epsilon > 0.0);
    // p⁰_⊥ p¹_⊥ p⁰_⊥ - ν p⁰_⊥ with ν = 1/4 acts as 3/4
    assert!((r.relations[8] - 0.75).abs() < 1e-12, "{:?}", r.relations);
    assert!(r.ratio.unwrap() > 0.0);
}

#[test]
fn rank_one_required() {
    let s = classical_embedding();
    assert!(nu_of_strategy(&s).is_err());
}

#[test]
fn domain_errors() {
    assert!(matches!(feige_optimal_strategy(-0.01), Err(Error::Domain(_))));
    assert!(matches!(winning_formula(f64::NAN), Err(Error::Domain(_))));
}

proptest! {
    #[test]
    fn family_is_valid(p in 0.0f64..=1.0) {
        let s = feige_optimal_strategy(p).unwrap();
        prop_assert!(s.validate().is_ok());
        prop_assert!(value(&s) <= 9.0 / 16.0 + 1e-12);
    }

    #[test]
    fn phase_solution_satisfies_equation(w in proptest::collection::vec(0.01f64..1.0, 1..5), pick in 0usize..5) {
        let mut a = w.clone();
        let l = pick % (a.len() + 1);
        let s: f64 = a.iter().sum();
        a.insert(l, s);
        let ph = phase_solve(&a).unwrap();
        let n = a.len();
        let total: Complex64 = (0..n - 1)
            .map(|j| Complex64::from_polar(a[j], 2.0 * std::f64::consts::PI * ph[j]))
            .sum::<Complex64>() + a[n - 1];
        prop_assert!(total.norm() < 1e-9 * s.max(1.0));
    }
}
