mod common;

use common::random_game;
use nlgame::classical::{self, best_response, partial_bound, BnbOptions};
use nlgame::game::{
    chsh, feige, feige_sync, find_isomorphism, guessing_components, or_game, parallel_repeat, permutations, product,
    Game, Relabeling,
};
use nlgame::lp::{self, ns_value, Backend, NsOptions};
use nlgame::rational::{ratio, Rational};
use nlgame::strategies::{
    correlation_of_deterministic, eval_correlation, eval_deterministic, is_nonsignalling, product_strategy,
    Correlation, DeterministicStrategy, Table, Value,
};
use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Sizes = (usize, usize, usize, usize);

fn game_from(seed: u64, sizes: Sizes) -> Game {
    random_game(&mut ChaCha8Rng::seed_from_u64(seed), sizes)
}

fn random_relabeling(rng: &mut impl Rng, g: &Game) -> Relabeling {
    let mut pick = |n: usize| {
        let all = permutations(n);
        all[rng.random_range(0..all.len())].clone()
    };
    Relabeling {
        x_perm: pick(g.x_size()),
        y_perm: pick(g.y_size()),
        a_perm: pick(g.a_size()),
        b_perm: pick(g.b_size()),
    }
}

fn random_deterministic(rng: &mut impl Rng, g: &Game) -> DeterministicStrategy {
    DeterministicStrategy {
        alice: (0..g.x_size()).map(|_| rng.random_range(0..g.a_size())).collect(),
        bob: (0..g.y_size()).map(|_| rng.random_range(0..g.b_size())).collect(),
    }
}

fn exact_value(v: Value) -> Rational {
    v.exact().expect("exact backend").clone()
}

fn small_sizes() -> impl Strategy<Value = Sizes> {
    (1usize..=3, 1usize..=3, 1usize..=3, 1usize..=3)
}

#[test]
fn constructors_produce_valid_games() {
    let (g1, g2) = guessing_components();
    let games = [
        feige(),
        feige_sync(),
        chsh(),
        g1.clone(),
        g2.clone(),
        or_game(&g1, &g2).unwrap(),
        product(&feige(), &chsh()).unwrap(),
        parallel_repeat(&feige(), 2).unwrap(),
    ];
    for g in &games {
        assert!(g.validate().is_ok());
    }
}

#[test]
fn repetition_composes() {
    let f = feige();
    let f3 = parallel_repeat(&f, 3).unwrap();
    let split = product(&f, &parallel_repeat(&f, 2).unwrap()).unwrap();
    assert_eq!(f3, split);
    let split = product(&parallel_repeat(&f, 2).unwrap(), &f).unwrap();
    assert_eq!(f3, split);
}

#[test]
fn all_lose_game_has_value_zero() {
    let g = Game::from_fn((2, 2, 2, 2), |_, _| ratio(1, 4), |_, _, _, _| false).unwrap();
    let r = classical::classical_value_bnb(&g, &BnbOptions::default()).unwrap();
    assert!(r.optimum.is_zero());
    assert!(r.complete);
}

#[test]
fn feige_ns_at_least_classical() {
    let f = feige();
    let ns = exact_value(ns_value(&f, &NsOptions::default()).unwrap().value);
    let c = classical::classical_value_exhaustive(&f).unwrap().optimum;
    assert_eq!(c, ratio(1, 2));
    assert_eq!(ns, ratio(2, 3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn repetition_is_index_equal_to_products(seed in any::<u64>(), m in 1usize..=2, n in 1usize..=2) {
        let g = game_from(seed, (2, 2, 2, 2));
        let lhs = parallel_repeat(&g, m + n).unwrap();
        let rhs = product(&parallel_repeat(&g, m).unwrap(), &parallel_repeat(&g, n).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn isomorphism_is_symmetric(seed in any::<u64>(), sizes in small_sizes()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_game(&mut rng, sizes);
        let r = random_relabeling(&mut rng, &g);
        let h = r.apply(&g).unwrap();
        prop_assert!(r.maps(&g, &h));
        prop_assert!(r.inverse().maps(&h, &g));
        let fwd = find_isomorphism(&g, &h).expect("a relabeling exists");
        prop_assert!(fwd.maps(&g, &h));
        let back = find_isomorphism(&h, &g).expect("symmetric");
        prop_assert!(back.maps(&h, &g));
        prop_assert!(fwd.inverse().maps(&h, &g));
    }

    #[test]
    fn or_game_prior_is_product(s1 in any::<u64>(), s2 in any::<u64>(), z1 in small_sizes(), z2 in small_sizes()) {
        let g1 = game_from(s1, z1);
        let g2 = game_from(s2, z2);
        let o = or_game(&g1, &g2).unwrap();
        prop_assert!(o.validate().is_ok());
        for x1 in 0..g1.x_size() {
            for x2 in 0..g2.x_size() {
                for y1 in 0..g1.y_size() {
                    for y2 in 0..g2.y_size() {
                        let x = x1 + g1.x_size() * x2;
                        let y = y1 + g1.y_size() * y2;
                        prop_assert_eq!(o.prior(x, y), &(g1.prior(x1, y1) * g2.prior(x2, y2)));
                    }
                }
            }
        }
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), sizes in small_sizes()) {
        let g = game_from(seed, sizes);
        prop_assert_eq!(Game::from_json(&g.to_json()).unwrap(), g.clone());
        prop_assert_eq!(Game::from_json(&g.to_json_pretty()).unwrap(), g);
    }

    #[test]
    fn deterministic_correlations_are_nonsignalling(seed in any::<u64>(), sizes in small_sizes()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_game(&mut rng, sizes);
        let s = random_deterministic(&mut rng, &g);
        let c = correlation_of_deterministic(&g, &s).unwrap();
        prop_assert!(is_nonsignalling(&c, 0.0));
        prop_assert_eq!(exact_value(eval_correlation(&g, &c).unwrap()), eval_deterministic(&g, &s).unwrap());
    }

    #[test]
    fn evaluation_is_linear(seed in any::<u64>(), sizes in small_sizes(), num in 0i64..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_game(&mut rng, sizes);
        let c1 = correlation_of_deterministic(&g, &random_deterministic(&mut rng, &g)).unwrap();
        let c2 = correlation_of_deterministic(&g, &random_deterministic(&mut rng, &g)).unwrap();
        let t = ratio(num, 7);
        let one_minus = Rational::from_integer(1.into()) - &t;
        let (Table::Exact(a), Table::Exact(b)) = (&c1.table, &c2.table) else { unreachable!() };
        let mix: Vec<Rational> = a.iter().zip(b).map(|(u, v)| &t * u + &one_minus * v).collect();
        let mixed = Correlation::exact(g.sizes(), mix).unwrap();
        prop_assert!(is_nonsignalling(&mixed, 0.0));
        let lhs = exact_value(eval_correlation(&g, &mixed).unwrap());
        let rhs = &t * exact_value(eval_correlation(&g, &c1).unwrap())
            + &one_minus * exact_value(eval_correlation(&g, &c2).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn product_values_multiply(s1 in any::<u64>(), s2 in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(s1 ^ s2.rotate_left(17));
        let g = game_from(s1, (2, 2, 2, 2));
        let h = game_from(s2, (2, 2, 2, 2));
        let p = product(&g, &h).unwrap();
        let w1 = random_deterministic(&mut rng, &g);
        let w2 = random_deterministic(&mut rng, &h);
        let joint = product_strategy(&g, &w1, &h, &w2).unwrap();
        prop_assert_eq!(
            eval_deterministic(&p, &joint).unwrap(),
            eval_deterministic(&g, &w1).unwrap() * eval_deterministic(&h, &w2).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bnb_matches_exhaustive(seed in any::<u64>(), sizes in prop_oneof![
        Just((2, 2, 2, 2)), Just((3, 3, 2, 2)), Just((2, 4, 2, 3)), Just((3, 2, 3, 3)), Just((4, 4, 2, 2))
    ]) {
        let g = game_from(seed, sizes);
        let ex = classical::classical_value_exhaustive(&g).unwrap();
        let bb = classical::classical_value_bnb(&g, &BnbOptions::default()).unwrap();
        prop_assert!(bb.complete);
        prop_assert_eq!(&bb.optimum, &ex.optimum);
        prop_assert_eq!(eval_deterministic(&g, &bb.witness).unwrap(), bb.optimum);
    }

    #[test]
    fn bound_is_admissible(seed in any::<u64>(), mask in any::<u16>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_game(&mut rng, (3, 4, 2, 2));
        let partial: Vec<Option<usize>> = (0..g.y_size())
            .map(|y| (mask >> y & 1 == 1).then(|| rng.random_range(0..g.b_size())))
            .collect();
        let bound = partial_bound(&g, &partial).unwrap();
        let free: Vec<usize> = (0..g.y_size()).filter(|&y| partial[y].is_none()).collect();
        let mut best = Rational::zero();
        for code in 0..g.b_size().pow(free.len() as u32) {
            let mut bob: Vec<usize> = partial.iter().map(|b| b.unwrap_or(0)).collect();
            let mut c = code;
            for &y in &free {
                bob[y] = c % g.b_size();
                c /= g.b_size();
            }
            let (_, v) = best_response(&g, &bob).unwrap();
            best = best.max(v);
        }
        prop_assert!(bound >= best, "bound {} below subtree optimum {}", bound, best);
    }

    #[test]
    fn value_is_relabeling_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_game(&mut rng, (3, 3, 2, 3));
        let h = random_relabeling(&mut rng, &g).apply(&g).unwrap();
        let vg = classical::classical_value_exhaustive(&g).unwrap().optimum;
        let vh = classical::classical_value_bnb(&h, &BnbOptions::default()).unwrap().optimum;
        prop_assert_eq!(vg, vh);
    }

    #[test]
    fn classical_is_supermultiplicative(s1 in any::<u64>(), s2 in any::<u64>()) {
        let g = game_from(s1, (2, 2, 2, 2));
        let h = game_from(s2, (2, 2, 2, 2));
        let rg = classical::classical_value_exhaustive(&g).unwrap();
        let rh = classical::classical_value_exhaustive(&h).unwrap();
        let p = product(&g, &h).unwrap();
        let joint = product_strategy(&g, &rg.witness, &h, &rh.witness).unwrap();
        let lower = eval_deterministic(&p, &joint).unwrap();
        prop_assert_eq!(&lower, &(&rg.optimum * &rh.optimum));
        let rp = classical::classical_value_bnb(&p, &BnbOptions::default()).unwrap();
        prop_assert!(rp.optimum >= lower);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ns_dominates_classical_and_is_certified(seed in any::<u64>(), sizes in prop_oneof![
        Just((2, 2, 2, 2)), Just((2, 3, 2, 2)), Just((3, 2, 2, 3))
    ]) {
        let g = game_from(seed, sizes);
        let r = ns_value(&g, &NsOptions::default()).unwrap();
        prop_assert!(r.certified);
        prop_assert!(is_nonsignalling(&r.witness, 0.0));
        let ns = exact_value(r.value);
        prop_assert_eq!(exact_value(eval_correlation(&g, &r.witness).unwrap()), ns.clone());
        let c = classical::classical_value_exhaustive(&g).unwrap().optimum;
        prop_assert!(ns >= c);
        let f = ns_value(&g, &NsOptions { backend: Backend::Float, ..NsOptions::default() }).unwrap();
        prop_assert!((f.value.to_f64() - nlgame::rational::to_f64(&ns)).abs() < 1e-7);
    }

    #[test]
    fn lp_text_round_trips(seed in any::<u64>()) {
        let g = game_from(seed, (2, 2, 2, 2));
        let p = lp::ns_lp(&g);
        prop_assert_eq!(lp::parse_text(&lp::to_text(&p)).unwrap(), p);
    }
}
