//! Exact classical values by enumerating Bob's deterministic strategies, with
//! Alice folded in through her best response.

use std::sync::atomic::{AtomicBool, AtomicI64, AtomicU64, Ordering};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{self, Game, Relabeling};
use crate::rational::Rational;
use crate::strategies::{eval_deterministic, DeterministicStrategy};

/// Default cap on the number of Bob strategies enumerated exhaustively.
pub const DEFAULT_EXHAUSTIVE_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    #[serde(with = "crate::rational::serde_str")]
    pub optimum: Rational,
    pub witness: DeterministicStrategy,
    pub nodes_explored: u64,
    pub pruned: u64,
    pub complete: bool,
}

/// Alice's best answer to each question against Bob's answers `bob`, ties to
/// the smallest answer, together with the resulting winning probability.
pub fn best_response(game: &Game, bob: &[usize]) -> Result<(Vec<usize>, Rational)> {
    if bob.len() != game.y_size() || bob.iter().any(|&b| b >= game.b_size()) {
        return Err(Error::ShapeMismatch("Bob strategy does not fit the game".into()));
    }
    let mut alice = Vec::with_capacity(game.x_size());
    let mut total = Rational::zero();
    for x in 0..game.x_size() {
        let mut best: Option<(usize, Rational)> = None;
        for a in 0..game.a_size() {
            let mut v = Rational::zero();
            for (y, &b) in bob.iter().enumerate() {
                if game.wins(a, b, x, y) {
                    v += game.prior(x, y);
                }
            }
            if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
                best = Some((a, v));
            }
        }
        let (a, v) = best.expect("answer set is nonempty");
        alice.push(a);
        total += v;
    }
    Ok((alice, total))
}

/// Prior scaled to integers by the least common denominator.
struct Weights {
    scale: BigInt,
    w: Vec<i64>,
}

fn integer_weights(game: &Game) -> Result<Weights> {
    let scale = game
        .prior_table()
        .iter()
        .fold(BigInt::one(), |l, p| l.lcm(p.denom()));
    let too_big = || Error::Domain("prior denominators too large for the integer search".into());
    if scale > BigInt::from(1i64 << 40) {
        return Err(too_big());
    }
    let w = game
        .prior_table()
        .iter()
        .map(|p| (p * Rational::from_integer(scale.clone())).to_integer().to_i64().ok_or_else(too_big))
        .collect::<Result<Vec<_>>>()?;
    Ok(Weights { scale, w })
}

impl Weights {
    fn to_rational(&self, v: i64) -> Rational {
        Rational::new(BigInt::from(v), self.scale.clone())
    }
}

/// Integer best-response value of Bob strategy `bob`.
fn int_value(game: &Game, w: &[i64], bob: &[usize]) -> i64 {
    let ys = game.y_size();
    (0..game.x_size())
        .map(|x| {
            (0..game.a_size())
                .map(|a| {
                    bob.iter()
                        .enumerate()
                        .filter(|&(y, &b)| game.wins(a, b, x, y))
                        .map(|(y, _)| w[x * ys + y])
                        .sum::<i64>()
                })
                .max()
                .unwrap_or(0)
        })
        .sum()
}

fn witness_for(game: &Game, bob: Vec<usize>) -> DeterministicStrategy {
    let (alice, _) = best_response(game, &bob).expect("bob strategy fits");
    DeterministicStrategy { alice, bob }
}

/// Maximum over all `b_size^y_size` Bob strategies; the witness is the
/// lexicographically smallest optimal Bob strategy with Alice's best response.
pub fn classical_value_exhaustive(game: &Game) -> Result<SearchReport> {
    classical_value_exhaustive_with_budget(game, DEFAULT_EXHAUSTIVE_BUDGET)
}

pub fn classical_value_exhaustive_with_budget(game: &Game, budget: u128) -> Result<SearchReport> {
    let (_, ys, _, bs) = game.sizes();
    let size = (bs as u128).checked_pow(ys as u32).unwrap_or(u128::MAX);
    if size > budget {
        return Err(Error::BudgetExceeded { size, budget });
    }
    let weights = integer_weights(game)?;
    let total = size as u64;
    // chunks are scanned in parallel; each keeps its first strict maximum
    let chunk = 4096u64;
    let best = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut best: Option<(i64, u64)> = None;
            for idx in c * chunk..((c + 1) * chunk).min(total) {
                let bob = lex_strategy(idx, bs, ys);
                let v = int_value(game, &weights.w, &bob);
                if best.is_none_or(|(bv, _)| v > bv) {
                    best = Some((v, idx));
                }
            }
            best.expect("chunk is nonempty")
        })
        .reduce_with(|l, r| if r.0 > l.0 || (r.0 == l.0 && r.1 < l.1) { r } else { l })
        .expect("at least one strategy");
    let witness = witness_for(game, lex_strategy(best.1, bs, ys));
    let optimum = weights.to_rational(best.0);
    debug_assert_eq!(eval_deterministic(game, &witness).ok(), Some(optimum.clone()));
    Ok(SearchReport {
        optimum,
        witness,
        nodes_explored: total,
        pruned: 0,
        complete: true,
    })
}

/// The `idx`-th Bob strategy in lexicographic order (`bob[0]` most significant).
fn lex_strategy(mut idx: u64, bs: usize, ys: usize) -> Vec<usize> {
    let mut out = vec![0; ys];
    for slot in out.iter_mut().rev() {
        *slot = (idx % bs as u64) as usize;
        idx /= bs as u64;
    }
    out
}

#[derive(Debug, Clone)]
pub struct BnbOptions {
    /// Maximum number of search nodes; `None` means unbounded.
    pub budget: Option<u64>,
    /// Strategy whose value seeds the incumbent.
    pub incumbent: Option<DeterministicStrategy>,
    /// Automorphisms of the game used to reduce Bob's first answer. When
    /// `None`, they are computed by brute force if the game is small enough.
    pub symmetries: Option<Vec<Relabeling>>,
    /// Subtree tasks dispatched in parallel are generated down to this many
    /// assigned questions.
    pub split_depth: usize,
}

impl Default for BnbOptions {
    fn default() -> Self {
        BnbOptions {
            budget: None,
            incumbent: None,
            symmetries: None,
            split_depth: 2,
        }
    }
}

/// Automorphisms of `G^{×n}` obtained by lifting the automorphisms of `G`.
pub fn repetition_symmetries(base: &Game, n: usize) -> Result<Vec<Relabeling>> {
    let auts = game::automorphisms(base)?;
    Ok(game::repeated_automorphisms(&auts, base, n))
}

struct Search<'a> {
    game: &'a Game,
    xs: usize,
    as_: usize,
    /// Questions of Bob in branching order.
    order: Vec<usize>,
    /// `delta[y][(b * xs + x) * as_ + a] = w(x,y) (V(a,b|x,y) − max_b' V(a,b'|x,y))`.
    delta: Vec<Vec<i64>>,
    /// Representative first answers for `order[0]`.
    root_answers: Vec<usize>,
    incumbent: AtomicI64,
    best: Mutex<Option<(i64, Vec<usize>)>>,
    nodes: AtomicU64,
    pruned: AtomicU64,
    budget: u64,
    stopped: AtomicBool,
}

impl Search<'_> {
    fn bound(&self, s: &[i64]) -> i64 {
        s.chunks_exact(self.as_)
            .map(|row| *row.iter().max().expect("answers nonempty"))
            .sum()
    }

    fn child(&self, s: &[i64], y: usize, b: usize) -> Vec<i64> {
        let len = self.xs * self.as_;
        let d = &self.delta[y][b * len..(b + 1) * len];
        s.iter().zip(d).map(|(u, v)| u + v).collect()
    }

    fn answers_at(&self, depth: usize) -> Vec<usize> {
        if depth == 0 {
            self.root_answers.clone()
        } else {
            (0..self.game.b_size()).collect()
        }
    }

    /// Children of a node that survive the incumbent, best bound first.
    fn expand(&self, depth: usize, s: &[i64]) -> Vec<(i64, usize, Vec<i64>)> {
        let y = self.order[depth];
        let inc = self.incumbent.load(Ordering::Relaxed);
        let mut kids = Vec::new();
        for b in self.answers_at(depth) {
            let c = self.child(s, y, b);
            let bnd = self.bound(&c);
            if bnd > inc {
                kids.push((bnd, b, c));
            } else {
                self.pruned.fetch_add(1, Ordering::Relaxed);
            }
        }
        kids.sort_by(|l, r| r.0.cmp(&l.0).then(l.1.cmp(&r.1)));
        kids
    }

    fn offer(&self, value: i64, assignment: &[usize]) {
        if value <= self.incumbent.load(Ordering::Relaxed) {
            return;
        }
        let mut best = self.best.lock().expect("lock");
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            let mut bob = vec![0; self.order.len()];
            for (depth, &b) in assignment.iter().enumerate() {
                bob[self.order[depth]] = b;
            }
            *best = Some((value, bob));
            self.incumbent.fetch_max(value, Ordering::Relaxed);
        }
    }

    fn dfs(&self, depth: usize, s: &[i64], assignment: &mut Vec<usize>) {
        if self.stopped.load(Ordering::Relaxed) {
            return;
        }
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.stopped.store(true, Ordering::Relaxed);
            return;
        }
        if depth == self.order.len() {
            self.offer(self.bound(s), assignment);
            return;
        }
        for (bnd, b, c) in self.expand(depth, s) {
            if bnd <= self.incumbent.load(Ordering::Relaxed) {
                self.pruned.fetch_add(1, Ordering::Relaxed);
                continue;
            }
            assignment.push(b);
            self.dfs(depth + 1, &c, assignment);
            assignment.pop();
        }
    }
}

fn root_representatives(game: &Game, y0: usize, symmetries: &[Relabeling]) -> Vec<usize> {
    let bs = game.b_size();
    let mut parent: Vec<usize> = (0..bs).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for r in symmetries {
        let fits = r.y_perm.len() == game.y_size() && r.b_perm.len() == bs;
        if !fits || r.y_perm[y0] != y0 {
            continue;
        }
        for b in 0..bs {
            let (u, v) = (find(&mut parent, b), find(&mut parent, r.b_perm[b]));
            if u != v {
                parent[u.max(v)] = u.min(v);
            }
        }
    }
    (0..bs).filter(|&b| find(&mut parent, b) == b).collect()
}

/// Depth-first branch and bound over Bob's strategies.
///
/// The bound for a partial assignment is `Σ_x max_a Σ_y π(x,y) u(a,x,y)` where
/// `u` is `V(a, g(y) | x, y)` on assigned questions and `max_b V(a,b|x,y)`
/// elsewhere. Subtrees whose bound does not exceed the incumbent are pruned.
pub fn classical_value_bnb(game: &Game, opts: &BnbOptions) -> Result<SearchReport> {
    let (xs, ys, as_, bs) = game.sizes();
    let weights = integer_weights(game)?;
    let w = &weights.w;

    let mut order: Vec<usize> = (0..ys).collect();
    let mass = |y: usize| (0..xs).map(|x| w[x * ys + y]).sum::<i64>();
    order.sort_by(|&l, &r| mass(r).cmp(&mass(l)).then(l.cmp(&r)));

    let len = xs * as_;
    let mut root = vec![0i64; len];
    let mut delta = vec![vec![0i64; bs * len]; ys];
    for x in 0..xs {
        for y in 0..ys {
            let wxy = w[x * ys + y];
            for a in 0..as_ {
                let max_v = (0..bs).any(|b| game.wins(a, b, x, y)) as i64;
                root[x * as_ + a] += wxy * max_v;
                for b in 0..bs {
                    let v = game.wins(a, b, x, y) as i64;
                    delta[y][b * len + x * as_ + a] = wxy * (v - max_v);
                }
            }
        }
    }

    let computed;
    let symmetries: &[Relabeling] = match &opts.symmetries {
        Some(s) => s,
        None => {
            computed = game::automorphisms(game).unwrap_or_default();
            &computed
        }
    };
    let root_answers = root_representatives(game, order[0], symmetries);

    let seed = match &opts.incumbent {
        Some(s) => {
            s.validate(game)?;
            s.bob.clone()
        }
        None => vec![0; ys],
    };
    let seed_value = int_value(game, w, &seed);

    let search = Search {
        game,
        xs,
        as_,
        order,
        delta,
        root_answers,
        incumbent: AtomicI64::new(seed_value),
        best: Mutex::new(None),
        nodes: AtomicU64::new(0),
        pruned: AtomicU64::new(0),
        budget: opts.budget.unwrap_or(u64::MAX),
        stopped: AtomicBool::new(false),
    };

    // breadth-first down to the split depth, then parallel depth-first
    let split = opts.split_depth.min(ys);
    let mut frontier: Vec<(Vec<usize>, i64, Vec<i64>)> = vec![(Vec::new(), search.bound(&root), root)];
    for depth in 0..split {
        let mut next = Vec::new();
        for (prefix, _, s) in &frontier {
            search.nodes.fetch_add(1, Ordering::Relaxed);
            for (bnd, b, c) in search.expand(depth, s) {
                let mut p = prefix.clone();
                p.push(b);
                next.push((p, bnd, c));
            }
        }
        frontier = next;
    }
    frontier.sort_by(|l, r| r.1.cmp(&l.1).then(l.0.cmp(&r.0)));
    frontier.into_par_iter().for_each(|(mut prefix, bnd, s)| {
        if bnd <= search.incumbent.load(Ordering::Relaxed) {
            search.pruned.fetch_add(1, Ordering::Relaxed);
            return;
        }
        search.dfs(prefix.len(), &s, &mut prefix);
    });

    let complete = !search.stopped.load(Ordering::Relaxed);
    let (value, bob) = search
        .best
        .into_inner()
        .expect("lock")
        .unwrap_or((seed_value, seed));
    let witness = match &opts.incumbent {
        Some(s) if s.bob == bob && int_value(game, w, &s.bob) == value => {
            // keep the caller's Alice if it is already a best response
            if eval_deterministic(game, s)? == weights.to_rational(value) {
                s.clone()
            } else {
                witness_for(game, bob)
            }
        }
        _ => witness_for(game, bob),
    };
    Ok(SearchReport {
        optimum: weights.to_rational(value),
        witness,
        nodes_explored: search.nodes.load(Ordering::Relaxed),
        pruned: search.pruned.load(Ordering::Relaxed),
        complete,
    })
}

/// The branch-and-bound bound for a partial Bob assignment (`None` = unassigned),
/// as an exact rational. Exposed for admissibility checks.
pub fn partial_bound(game: &Game, partial: &[Option<usize>]) -> Result<Rational> {
    if partial.len() != game.y_size() {
        return Err(Error::ShapeMismatch("partial assignment length".into()));
    }
    let mut total = Rational::zero();
    for x in 0..game.x_size() {
        let mut best = Rational::zero();
        for a in 0..game.a_size() {
            let mut v = Rational::zero();
            for (y, g) in partial.iter().enumerate() {
                let win = match g {
                    Some(b) => game.wins(a, *b, x, y),
                    None => (0..game.b_size()).any(|b| game.wins(a, b, x, y)),
                };
                if win {
                    v += game.prior(x, y);
                }
            }
            if v > best {
                best = v;
            }
        }
        total += best;
    }
    Ok(total)
}
