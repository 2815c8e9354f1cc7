use nalgebra::DVector;
use nlgame::game::{chsh, feige};
use nlgame::ncpoly::{self, NcPoly};
use nlgame::npa::{self, parse_level, MomentProblem};
use nlgame::quantum::feige_optimal_strategy;
use nlgame::rational::to_f64;
use nlgame::sdp::SdpOptions;

fn coordinates(p: &MomentProblem, poly: &NcPoly) -> Option<DVector<f64>> {
    let mut v = DVector::zeros(p.dim());
    for (w, c) in poly.terms() {
        let k = p.index.iter().position(|u| u == w)?;
        v[k] += to_f64(c);
    }
    Some(v)
}

fn tight() -> SdpOptions {
    SdpOptions { tol: 1e-11, accept: 1e-6, max_iter: 200 }
}

#[test]
fn optimal_moments_annihilate_relations() {
    let g = feige();
    let p = npa::build_moment_sdp(&g, &parse_level("1+AB+A^2+A^3").unwrap(), false).unwrap();
    let sol = npa::sdp_solve_with(&p, tight()).unwrap();
    assert!((sol.value - 0.5625).abs() < 1e-6, "{}", sol.value);

    let rels = ncpoly::relation_set(&ncpoly::feige_nu()).unwrap();
    for r in &rels {
        let v = coordinates(&p, r).expect("relation words are index words");
        let ratio = (&sol.moment_matrix * &v).norm() / v.norm();
        assert!(ratio < 1e-4, "{r}: {ratio}");
    }

    // relations among the non-⊥ projectors come back exactly
    let found = npa::kernel_relations(&p, &sol, 1e-6, 64).unwrap();
    let mut matched = 0;
    for x in 0..2 {
        for a in 0..2 {
            for a2 in 0..2 {
                let r = &rels[x * 9 + a * 3 + a2];
                assert!(found.contains(r), "missing {r}");
                matched += 1;
            }
        }
    }
    assert_eq!(matched, 8);
}

#[test]
fn honest_strategy_is_feasible() {
    let g = feige();
    let s = feige_optimal_strategy(0.75).unwrap();
    for spec in ["1", "1+AB", "1+AB+A^2"] {
        let p = npa::build_moment_sdp(&g, &parse_level(spec).unwrap(), false).unwrap();
        let gamma = npa::strategy_moment_matrix(&p, &s).unwrap();
        let c = npa::check_moments(&p, &gamma).unwrap();
        assert!(c.max_violation < 1e-10, "{spec}: {}", c.max_violation);
        assert!(c.min_eigenvalue > -1e-10, "{spec}: {}", c.min_eigenvalue);
        assert!((c.objective - 0.5625).abs() < 1e-10, "{spec}: {}", c.objective);
    }
}

#[test]
fn chsh_reaches_tsirelson() {
    let target = (1.0 + 0.5f64.sqrt()) / 2.0;
    let v = npa::quantum_upper_bound(&chsh(), &parse_level("1+AB").unwrap(), false).unwrap();
    assert!((v - target).abs() < 1e-6, "{v}");
}

#[test]
fn levels_are_monotone() {
    let g = feige();
    let mut prev = f64::INFINITY;
    for spec in ["1", "1+AB", "2"] {
        let v = npa::quantum_upper_bound(&g, &parse_level(spec).unwrap(), false).unwrap();
        assert!(v <= prev + 1e-7, "{spec}: {v} > {prev}");
        assert!(v >= 0.5625 - 1e-7, "{spec}: {v}");
        prev = v;
    }
}

#[test]
fn malformed_levels_are_rejected() {
    for bad in ["", "1+", "A^", "1+AC", "x", "1++AB"] {
        assert!(parse_level(bad).is_err(), "{bad:?}");
    }
}
