mod common;

use nlgame::game::{chsh, feige, Game};
use nlgame::ncpoly::{self, game_polynomial, normal_form, Alphabet, NcPoly};
use nlgame::npa;
use nlgame::rational::ratio;
use nlgame::strategies::{correlation_of_quantum, eval_correlation};

fn quantum_value(g: &Game, s: &nlgame::strategies::QuantumStrategy) -> f64 {
    eval_correlation(g, &correlation_of_quantum(g, s).unwrap()).unwrap().to_f64()
}

#[test]
fn game_polynomial_matches_correlation_value() {
    let mut rng = common::rng(101);
    for (g, answers) in [(feige(), 3), (chsh(), 2)] {
        let phi = game_polynomial(&g);
        for k in 0..100 {
            let s = common::random_strategy(&mut rng, (2, 2, answers, answers), 2 + k % 2, 2 + k % 3);
            let lhs = phi.expectation(&s).unwrap();
            let rhs = quantum_value(&g, &s);
            assert!((lhs.re - rhs).abs() < 1e-10, "{} vs {rhs}", lhs.re);
            assert!(lhs.im.abs() < 1e-10);
        }
    }
}

#[test]
fn verified_certificate_bounds_random_strategies() {
    let g = feige();
    let lambda = ratio(9, 16);
    let cert = npa::derive_certificate(&ncpoly::certificate_basis(), &lambda, 1e-4, npa::CERTIFICATE_DENOMINATOR, &g)
        .unwrap();
    assert!(ncpoly::sos_verify(&cert, &g).unwrap());
    let mut rng = common::rng(202);
    let mut best: f64 = 0.0;
    for k in 0..200 {
        let s = common::random_strategy(&mut rng, (2, 2, 3, 3), 2 + k % 3, 2 + k % 2);
        best = best.max(quantum_value(&g, &s));
    }
    assert!(best <= 0.5625 + 1e-10, "{best}");
}

#[test]
fn normal_form_is_idempotent_on_random_words() {
    let mut rng = common::rng(303);
    for alphabet in [Alphabet::FEIGE, Alphabet::of(&chsh())] {
        for _ in 0..200 {
            let raw = common::random_raw(&mut rng, alphabet, 4, 4);
            let nf = normal_form(&raw, alphabet).unwrap();
            assert_eq!(normal_form(&nf.to_raw(), alphabet).unwrap(), nf);
            assert_eq!(NcPoly::parse(&nf.to_string(), alphabet).unwrap(), nf);
        }
    }
}

#[test]
fn relation_polynomials_vanish_on_the_optimal_strategy() {
    let s = nlgame::quantum::feige_optimal_strategy(0.75).unwrap();
    for r in ncpoly::relation_set(&ncpoly::feige_nu()).unwrap() {
        let m = r.act(&s).unwrap();
        assert!(m.norm() < 1e-10, "{r}: {}", m.norm());
    }
}

#[test]
fn parsed_polynomials_print_back() {
    let huge = format!("1/2{}1", "0".repeat(100));
    let combining = format!("201*q11 - {huge}*q11");
    assert!(NcPoly::parse(&combining, Alphabet::FEIGE).is_err());
    let fine = format!("{huge}*q11 + p00");
    let p = NcPoly::parse(&fine, Alphabet::FEIGE).unwrap();
    assert_eq!(NcPoly::parse(&p.to_string(), Alphabet::FEIGE).unwrap(), p);
}
