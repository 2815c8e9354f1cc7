//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::time::{Duration, Instant};

use nlgame::classical::{self, BnbOptions};
use nlgame::game::{self, feige, feige_sync, find_isomorphism, guessing_components, or_game, parallel_repeat};
use nlgame::lp::{self, ns_value, Backend, NsOptions, Pricing};
use nlgame::ncpoly::{self, normal_form, raw_expectation, Alphabet};
use nlgame::npa::{self, parse_level};
use nlgame::quantum::{self, NuMatrix};
use nlgame::rational::{ratio, to_f64, Rational};
use nlgame::strategies::{
    classical_pair_strategy, classical_three_strategy, correlation_of_deterministic, correlation_of_quantum,
    eval_correlation, eval_deterministic, eval_deterministic_repeated, is_nonsignalling, is_synchronous, ns_strategy_feige3, CMatrix,
    DeterministicStrategy,
};
use num_complex::Complex64;

const PROPERTY_CASES: usize = 200;

enum Outcome {
    Pass(String),
    Skip(String),
}

type Check = Result<Outcome, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(elapsed < limit, || format!("{what} took {elapsed:.2?}, limit {limit:?}"))
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn c1_classical_single() -> Check {
    let t = Instant::now();
    let r = classical::classical_value_exhaustive(&feige()).map_err(e)?;
    let el = t.elapsed();
    ensure(r.optimum == ratio(1, 2), || format!("optimum {}", r.optimum))?;
    within(el, Duration::from_secs(1), "exhaustive search")?;
    Ok(Outcome::Pass(format!("ω_c = {} in {el:.2?}", r.optimum)))
}

fn c2_classical_double() -> Check {
    let g = parallel_repeat(&feige(), 2).map_err(e)?;
    let t = Instant::now();
    let r = classical::classical_value_exhaustive(&g).map_err(e)?;
    let el = t.elapsed();
    ensure(r.optimum == ratio(1, 2), || format!("optimum {}", r.optimum))?;
    ensure(r.nodes_explored == 6561, || format!("{} Bob strategies", r.nodes_explored))?;
    within(el, Duration::from_secs(5), "exhaustive search")?;
    Ok(Outcome::Pass(format!("ω_c = {} over {} Bob strategies in {el:.2?}", r.optimum, r.nodes_explored)))
}

fn c3_quantum_lower() -> Check {
    let g = feige();
    let s = quantum::feige_optimal_strategy(0.75).map_err(e)?;
    let v = eval_correlation(&g, &correlation_of_quantum(&g, &s).map_err(e)?).map_err(e)?.to_f64();
    ensure((v - 0.5625).abs() < 1e-10, || format!("value {v}"))?;
    let p = quantum::golden_section_max(|p| quantum::winning_formula(p).unwrap_or(f64::NEG_INFINITY), 0.0, 1.0, 1e-12);
    ensure((p - 0.75).abs() < 1e-8, || format!("argmax {p}"))?;
    Ok(Outcome::Pass(format!("value {v:.12}, argmax {p:.10}")))
}

fn c4_npa() -> Check {
    let t = Instant::now();
    let v = npa::quantum_upper_bound(&feige(), &parse_level("1+AB").map_err(e)?, false).map_err(e)?;
    let el = t.elapsed();
    ensure((v - 0.5625).abs() < 1e-6, || format!("value {v}"))?;
    within(el, Duration::from_secs(30), "NPA solve")?;
    Ok(Outcome::Pass(format!("NPA 1+AB = {v:.9} in {el:.2?}")))
}

fn c5_sos() -> Check {
    let g = feige();
    let basis = ncpoly::certificate_basis();
    let t = Instant::now();
    let cert = npa::derive_certificate(&basis, &ratio(9, 16), 1e-4, npa::CERTIFICATE_DENOMINATOR, &g).map_err(e)?;
    let derive = t.elapsed();
    let t = Instant::now();
    let identity = ncpoly::sos_verify(&cert, &g).map_err(e)?;
    let pd = ncpoly::rational_pd_check(&cert.y).map_err(e)?;
    let verify = t.elapsed();
    ensure(identity, || "identity F*YF = λ - Φ fails".into())?;
    ensure(pd, || "Y is not positive definite".into())?;
    within(derive, Duration::from_secs(600), "derivation")?;
    within(verify, Duration::from_secs(120), "verification")?;
    Ok(Outcome::Pass(format!(
        "{}x{} rational Y, derive {derive:.2?}, verify {verify:.2?}",
        cert.y.len(),
        cert.y.len()
    )))
}

fn c6_ns_exact() -> Check {
    let t = Instant::now();
    let opts = NsOptions {
        pricing: Pricing::Bland,
        ..NsOptions::default()
    };
    let r1 = ns_value(&feige(), &opts).map_err(e)?;
    let r2 = ns_value(&parallel_repeat(&feige(), 2).map_err(e)?, &opts).map_err(e)?;
    let el = t.elapsed();
    // |A||B||X||Y| is 36 for Feige and 1296 for Feige^2
    let g2_len = parallel_repeat(&feige(), 2).map_err(e)?.table_len();
    ensure(r1.vars == feige().table_len() && r2.vars == g2_len, || format!("{} and {} variables", r1.vars, r2.vars))?;
    ensure(r1.value.exact() == Some(&ratio(2, 3)), || format!("n=1 value {:?}", r1.value))?;
    ensure(r2.value.exact() == Some(&ratio(1, 2)), || format!("n=2 value {:?}", r2.value))?;
    ensure(r1.certified && r2.certified, || "duality certificate missing".into())?;
    within(el, Duration::from_secs(300), "exact LPs")?;
    Ok(Outcome::Pass(format!("2/3 ({} variables) and 1/2 ({} variables) exactly in {el:.2?}", r1.vars, r2.vars)))
}

fn c7_ns_triple() -> Check {
    let g = parallel_repeat(&feige(), 3).map_err(e)?;
    // the full 46656-variable LP has the same optimum as the orbit-reduced one
    let opts = NsOptions {
        backend: Backend::Float,
        symmetries: Some(classical::repetition_symmetries(&feige(), 3).map_err(e)?),
        ..NsOptions::default()
    };
    let r = ns_value(&g, &opts).map_err(e)?;
    let f = r.float_value.unwrap_or_else(|| r.value.to_f64());
    ensure((f - 1.0 / 3.0).abs() < 1e-7, || format!("float optimum {f}"))?;
    let w = ns_strategy_feige3();
    let wv = eval_correlation(&g, &w).map_err(e)?;
    ensure(wv.exact() == Some(&ratio(1, 3)), || format!("witness value {wv:?}"))?;
    ensure(is_nonsignalling(&w, 0.0), || "witness signals".into())?;
    Ok(Outcome::Pass(format!("float LP {f:.12} over {} orbit variables; exact witness 1/3", r.vars)))
}

fn c8_even_repetition() -> Check {
    for m in 1..=3 {
        let s = classical_pair_strategy(m).map_err(e)?;
        let v = eval_deterministic_repeated(&feige(), 2 * m, &s).map_err(e)?;
        let want = Rational::new(1.into(), (1u64 << m).into());
        ensure(v == want, || format!("m = {m}: {v}"))?;
        if m <= 2 {
            let g = parallel_repeat(&feige(), 2 * m).map_err(e)?;
            let table = eval_deterministic(&g, &s).map_err(e)?;
            ensure(table == want, || format!("m = {m} on the materialized game: {table}"))?;
        }
    }
    Ok(Outcome::Pass("2^-m for m = 1, 2, 3 (m ≤ 2 also on the materialized game)".into()))
}

fn c9a_triple_fast() -> Check {
    let g = parallel_repeat(&feige(), 3).map_err(e)?;
    let v = eval_deterministic(&g, &classical_three_strategy()).map_err(e)?;
    ensure(v == ratio(5, 16), || format!("witness value {v}"))?;
    let opts = BnbOptions {
        budget: Some(1_000_000),
        ..BnbOptions::default()
    };
    let r = classical::classical_value_bnb(&g, &opts).map_err(e)?;
    ensure(r.optimum <= ratio(5, 16), || format!("search found {}", r.optimum))?;
    Ok(Outcome::Pass(format!(
        "witness 5/16; budgeted search best {} (complete: {})",
        r.optimum, r.complete
    )))
}

fn c9b_triple_extended() -> Check {
    let g = parallel_repeat(&feige(), 3).map_err(e)?;
    let t = Instant::now();
    let opts = BnbOptions {
        budget: Some(10_000_000_000),
        incumbent: Some(classical_three_strategy()),
        symmetries: Some(classical::repetition_symmetries(&feige(), 3).map_err(e)?),
        ..BnbOptions::default()
    };
    let r = classical::classical_value_bnb(&g, &opts).map_err(e)?;
    let el = t.elapsed();
    if !r.complete {
        return Ok(Outcome::Skip(format!(
            "budget exhausted after {} nodes; certified interval [5/16, 1/3]",
            r.nodes_explored
        )));
    }
    ensure(r.optimum == ratio(5, 16), || format!("optimum {}", r.optimum))?;
    Ok(Outcome::Pass(format!(
        "optimum 5/16 after {} nodes in {el:.2?}",
        r.nodes_explored
    )))
}

fn c10_or_game() -> Check {
    let (g1, g2) = guessing_components();
    let combined = or_game(&g1, &g2).map_err(e)?;
    ensure(find_isomorphism(&combined, &feige()).is_some(), || "no isomorphism".into())?;
    for g in [&g1, &g2] {
        let c = classical::classical_value_exhaustive(g).map_err(e)?.optimum;
        ensure(c == ratio(1, 2), || format!("component classical value {c}"))?;
        let ns = ns_value(g, &NsOptions::default()).map_err(e)?;
        ensure(ns.value.exact() == Some(&ratio(1, 2)), || format!("component ns value {:?}", ns.value))?;
    }
    Ok(Outcome::Pass("isomorphic; components have ω_c = ω_ns = 1/2".into()))
}

fn c11_synchronous() -> Check {
    let g = feige_sync();
    let level = parse_level("1+AB").map_err(e)?;
    let free = npa::quantum_upper_bound(&g, &level, false).map_err(e)?;
    ensure((free - 0.5625).abs() < 1e-6, || format!("unconstrained value {free}"))?;
    let sync = npa::quantum_upper_bound(&g, &level, true).map_err(e)?;
    ensure((0.5 - 1e-6..=0.5625 + 1e-6).contains(&sync), || format!("synchronous value {sync}"))?;
    // both players answer A_x on question x
    let s = DeterministicStrategy {
        alice: vec![game::SYNC_A0, game::SYNC_A0 + 1],
        bob: vec![game::SYNC_A0, game::SYNC_A0 + 1],
    };
    let v = eval_deterministic(&g, &s).map_err(e)?;
    ensure(v == ratio(1, 2), || format!("synchronous strategy value {v}"))?;
    let corr = correlation_of_deterministic(&g, &s).map_err(e)?;
    ensure(is_synchronous(&corr, 0.0).map_err(e)?, || "strategy is not synchronous".into())?;
    Ok(Outcome::Pass(format!("free {free:.9}, synchronous {sync:.9}, classical synchronous 1/2")))
}

fn c12_selftest() -> Check {
    let s = quantum::feige_optimal_strategy(0.75).map_err(e)?;
    let r = quantum::determining_residuals(&s).map_err(e)?;
    ensure(r.gamma.len() == 6 && r.relations.len() == 18, || "residual counts".into())?;
    ensure(r.max_residual < 1e-9, || format!("max residual {}", r.max_residual))?;
    let nu = quantum::nu_of_strategy(&s).map_err(e)?;
    let want = ncpoly::feige_nu();
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((nu[i][j] - to_f64(&want[i][j])).abs());
        }
    }
    ensure(worst < 1e-10, || format!("ν deviation {worst}"))?;
    Ok(Outcome::Pass(format!("max residual {:.2e}, ν deviation {worst:.2e}", r.max_residual)))
}

fn c13_biased() -> Check {
    let nu = NuMatrix::feige();
    let report = quantum::check_degeneracy_condition(&nu);
    ensure(report.pass && report.pairs.iter().all(|p| p.exact), || format!("{report:?}"))?;
    let h = quantum::hadamard_like_from_nu(&nu).map_err(e)?;
    let unitarity = (&h * h.adjoint() - CMatrix::identity(3, 3)).norm();
    ensure(unitarity < 1e-10, || format!("‖HH* - I‖ = {unitarity}"))?;
    let mut modulus: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            modulus = modulus.max((h[(i, j)].norm() - nu.entries[i][j].sqrt()).abs());
        }
    }
    ensure(modulus < 1e-12, || format!("modulus deviation {modulus}"))?;
    let rep = quantum::nu_biased_rep(&nu).map_err(e)?;
    let res = rep.residual(&nu);
    ensure(res < 1e-10, || format!("representation residual {res}"))?;
    let eq = quantum::unitary_equivalence_check(&rep, &rep.relabeled(&[1, 0, 2]));
    ensure(eq.is_some(), || "relabeled representation not aligned".into())?;
    Ok(Outcome::Pass(format!(
        "unitarity {unitarity:.1e}, moduli {modulus:.1e}, representation {res:.1e}"
    )))
}

fn c14_properties() -> Check {
    let mut rng = common::rng(14);
    let feige_alpha = Alphabet::FEIGE;

    // normal form idempotence
    for _ in 0..PROPERTY_CASES {
        let raw = common::random_raw(&mut rng, feige_alpha, 4, 4);
        let nf = normal_form(&raw, feige_alpha).map_err(e)?;
        let again = normal_form(&nf.to_raw(), feige_alpha).map_err(e)?;
        ensure(nf == again, || format!("normal form not idempotent on {nf}"))?;
    }

    // evaluation homomorphism
    let mut worst: f64 = 0.0;
    for k in 0..PROPERTY_CASES {
        let s = common::random_strategy(&mut rng, (2, 2, 3, 3), 2 + k % 2, 2);
        let raw = common::random_raw(&mut rng, feige_alpha, 3, 3);
        let lhs = normal_form(&raw, feige_alpha).map_err(e)?.expectation(&s).map_err(e)?;
        let rhs: Complex64 = raw_expectation(&raw, &s).map_err(e)?;
        worst = worst.max((lhs - rhs).norm());
    }
    ensure(worst < 1e-9, || format!("evaluation mismatch {worst}"))?;

    // LP duality exactness
    for k in 0..PROPERTY_CASES {
        let sizes = if k % 4 == 0 { (2, 2, 3, 2) } else { (2, 2, 2, 2) };
        let g = common::random_game(&mut rng, sizes);
        let p = lp::ns_lp(&g);
        let sol = lp::solve_exact(&p, Pricing::Bland).map_err(e)?;
        p.certify(&sol).map_err(|err| format!("case {k}: {err}"))?;
        let c = classical::classical_value_exhaustive(&g).map_err(e)?.optimum;
        ensure(sol.objective >= c, || format!("case {k}: ns {} below classical {c}", sol.objective))?;
    }

    // honest strategies are feasible for the moment relaxation
    let g = feige();
    let problem = npa::build_moment_sdp(&g, &parse_level("1+AB").map_err(e)?, false).map_err(e)?;
    let mut viol: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    for k in 0..PROPERTY_CASES {
        let s = common::random_strategy(&mut rng, (2, 2, 3, 3), 2 + k % 2, 2 + (k / 2) % 2);
        let gamma = npa::strategy_moment_matrix(&problem, &s).map_err(e)?;
        let m = npa::check_moments(&problem, &gamma).map_err(e)?;
        let value = eval_correlation(&g, &correlation_of_quantum(&g, &s).map_err(e)?).map_err(e)?.to_f64();
        ensure((m.objective - value).abs() < 1e-9, || format!("case {k}: objective {} vs value {value}", m.objective))?;
        ensure(m.objective <= 0.5625 + 1e-6, || format!("case {k}: objective {}", m.objective))?;
        viol = viol.max(m.max_violation);
        min_eig = min_eig.min(m.min_eigenvalue);
    }
    ensure(viol < 1e-9, || format!("moment violation {viol}"))?;
    ensure(min_eig > -1e-9, || format!("moment eigenvalue {min_eig}"))?;
    Ok(Outcome::Pass(format!(
        "{PROPERTY_CASES} cases x 4 suites; evaluation {worst:.1e}, moments {viol:.1e}, min eigenvalue {min_eig:.1e}"
    )))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 15] = [
        ("1 classical value of Feige", c1_classical_single),
        ("2 classical value of Feige^2", c2_classical_double),
        ("3 quantum lower bound", c3_quantum_lower),
        ("4 NPA upper bound", c4_npa),
        ("5 exact SOS certificate", c5_sos),
        ("6 exact non-signalling values", c6_ns_exact),
        ("7 non-signalling value of Feige^3", c7_ns_triple),
        ("8 even repetition strategies", c8_even_repetition),
        ("9a Feige^3 classical, fast tier", c9a_triple_fast),
        ("9b Feige^3 classical, extended tier", c9b_triple_extended),
        ("10 or-game decomposition", c10_or_game),
        ("11 synchronous variant", c11_synchronous),
        ("12 self-test residuals", c12_selftest),
        ("13 biased representations", c13_biased),
        ("14 property suites", c14_properties),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let t = Instant::now();
        let outcome = check();
        let el = t.elapsed();
        match outcome {
            Ok(Outcome::Pass(d)) => println!("PASS criterion {name}: {d} [{el:.2?}]"),
            Ok(Outcome::Skip(d)) => println!("SKIP criterion {name}: {d} [{el:.2?}]"),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {name}: {d} [{el:.2?}]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
