#![allow(dead_code)]

use nalgebra::DVector;
use nlgame::game::Game;
use nlgame::ncpoly::{Alphabet, RawTerm};
use nlgame::rational::ratio;
use nlgame::strategies::{CMatrix, QuantumStrategy};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x5eed_f00d;

pub fn rng(offset: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED + offset)
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u: f64 = rng.random_range(f64::EPSILON..1.0);
    let v: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng))
}

pub fn random_unitary(rng: &mut impl Rng, d: usize) -> CMatrix {
    let m = CMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    m.qr().q()
}

/// A projective measurement with `outcomes` elements: a random orthonormal
/// basis split into contiguous groups of random sizes, possibly empty.
pub fn random_pvm(rng: &mut impl Rng, d: usize, outcomes: usize) -> Vec<CMatrix> {
    let u = random_unitary(rng, d);
    let owner: Vec<usize> = (0..d).map(|_| rng.random_range(0..outcomes)).collect();
    (0..outcomes)
        .map(|o| {
            let mut p = CMatrix::zeros(d, d);
            for (k, _) in owner.iter().enumerate().filter(|(_, w)| **w == o) {
                let col = u.column(k);
                p += &col * col.adjoint();
            }
            p
        })
        .collect()
}

pub fn random_strategy(rng: &mut impl Rng, sizes: (usize, usize, usize, usize), da: usize, db: usize) -> QuantumStrategy {
    let (xs, ys, a, b) = sizes;
    let state = DVector::from_fn(da * db, |_, _| complex_gaussian(rng));
    let norm = state.norm();
    QuantumStrategy {
        dim_a: da,
        dim_b: db,
        state: state / Complex64::new(norm, 0.0),
        alice: (0..xs).map(|_| random_pvm(rng, da, a)).collect(),
        bob: (0..ys).map(|_| random_pvm(rng, db, b)).collect(),
    }
}

pub fn random_raw(rng: &mut impl Rng, alphabet: Alphabet, terms: usize, max_len: usize) -> Vec<RawTerm> {
    (0..terms)
        .map(|_| {
            let la = rng.random_range(0..=max_len);
            let lb = rng.random_range(0..=max_len);
            RawTerm {
                coeff: ratio(rng.random_range(-5..=5), rng.random_range(1..=4)),
                alice: (0..la)
                    .map(|_| (rng.random_range(0..2), rng.random_range(0..alphabet.alice_answers)))
                    .collect(),
                bob: (0..lb)
                    .map(|_| (rng.random_range(0..2), rng.random_range(0..alphabet.bob_answers)))
                    .collect(),
            }
        })
        .collect()
}

/// Random predicate with a random positive prior.
pub fn random_game(rng: &mut impl Rng, sizes: (usize, usize, usize, usize)) -> Game {
    let (xs, ys, _, _) = sizes;
    let weights: Vec<i64> = (0..xs * ys).map(|_| rng.random_range(1..=4)).collect();
    let total: i64 = weights.iter().sum();
    let table: Vec<bool> = (0..sizes.0 * sizes.1 * sizes.2 * sizes.3).map(|_| rng.random_bool(0.4)).collect();
    Game::from_fn(
        sizes,
        |x, y| ratio(weights[x * ys + y], total),
        |a, b, x, y| table[((a * sizes.3 + b) * xs + x) * ys + y],
    )
    .expect("random game is valid")
}
