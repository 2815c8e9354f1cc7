//! Two-player nonlocal games: the data model, the builtin games, and the
//! product / parallel-repetition / or-game combinators.
//!
//! Index conventions:
//! * questions and answers are `0..k`; in Feige's game `⊥` is answer index 2;
//! * the prior is stored row-major, `prior[x * y_size + y]`;
//! * the predicate is stored a-major, `predicate[((a * b_size + b) * x_size + x) * y_size + y]`;
//! * tuples (repetitions, products, or-game question pairs) use little-endian
//!   mixed radix: coordinate 0 is the least significant digit.

use base64::Engine as _;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Default upper bound on the number of predicate entries a constructor may allocate.
pub const DEFAULT_TABLE_LIMIT: u128 = 100_000_000;

/// Index of `⊥` among the answers of [`feige`].
pub const BOT: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Labels {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub a: Vec<String>,
    pub b: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Game {
    x_size: usize,
    y_size: usize,
    a_size: usize,
    b_size: usize,
    prior: Vec<Rational>,
    predicate: Vec<bool>,
    labels: Option<Labels>,
}

/// Games compare by their sizes, prior and predicate; labels are ignored.
impl PartialEq for Game {
    fn eq(&self, other: &Self) -> bool {
        self.sizes() == other.sizes()
            && self.prior == other.prior
            && self.predicate == other.predicate
    }
}

impl Eq for Game {}

impl Game {
    /// Builds and validates a game from flat tables (see the module docs for index order).
    pub fn new(
        x_size: usize,
        y_size: usize,
        a_size: usize,
        b_size: usize,
        prior: Vec<Rational>,
        predicate: Vec<bool>,
    ) -> Result<Self> {
        let g = Game {
            x_size,
            y_size,
            a_size,
            b_size,
            prior,
            predicate,
            labels: None,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn from_fn(
        sizes: (usize, usize, usize, usize),
        prior: impl Fn(usize, usize) -> Rational,
        wins: impl Fn(usize, usize, usize, usize) -> bool,
    ) -> Result<Self> {
        let (xs, ys, as_, bs) = sizes;
        let mut p = Vec::with_capacity(xs * ys);
        for x in 0..xs {
            for y in 0..ys {
                p.push(prior(x, y));
            }
        }
        let mut v = Vec::with_capacity(as_ * bs * xs * ys);
        for a in 0..as_ {
            for b in 0..bs {
                for x in 0..xs {
                    for y in 0..ys {
                        v.push(wins(a, b, x, y));
                    }
                }
            }
        }
        Game::new(xs, ys, as_, bs, p, v)
    }

    /// Checks that the sizes are positive, the tables have the right length, and
    /// the prior is a probability distribution (exactly).
    pub fn validate(&self) -> Result<()> {
        let (xs, ys, as_, bs) = self.sizes();
        if xs == 0 || ys == 0 || as_ == 0 || bs == 0 {
            return Err(Error::ShapeMismatch("all set sizes must be positive".into()));
        }
        if self.prior.len() != xs * ys {
            return Err(Error::ShapeMismatch(format!(
                "prior has {} entries, expected {}",
                self.prior.len(),
                xs * ys
            )));
        }
        let expected = as_ * bs * xs * ys;
        if self.predicate.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "predicate has {} entries, expected {expected}",
                self.predicate.len()
            )));
        }
        if let Some(l) = &self.labels {
            if l.x.len() != xs || l.y.len() != ys || l.a.len() != as_ || l.b.len() != bs {
                return Err(Error::ShapeMismatch("label lists do not match set sizes".into()));
            }
        }
        if let Some(neg) = self.prior.iter().find(|p| *p < &Rational::zero()) {
            return Err(Error::NonstochasticPrior(format!("negative entry {neg}")));
        }
        let total: Rational = self.prior.iter().sum();
        if !total.is_one() {
            return Err(Error::NonstochasticPrior(format!("entries sum to {total}")));
        }
        Ok(())
    }

    pub fn sizes(&self) -> (usize, usize, usize, usize) {
        (self.x_size, self.y_size, self.a_size, self.b_size)
    }
    pub fn x_size(&self) -> usize {
        self.x_size
    }
    pub fn y_size(&self) -> usize {
        self.y_size
    }
    pub fn a_size(&self) -> usize {
        self.a_size
    }
    pub fn b_size(&self) -> usize {
        self.b_size
    }

    pub fn prior(&self, x: usize, y: usize) -> &Rational {
        &self.prior[x * self.y_size + y]
    }

    pub fn prior_table(&self) -> &[Rational] {
        &self.prior
    }

    #[inline]
    pub fn predicate_index(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        ((a * self.b_size + b) * self.x_size + x) * self.y_size + y
    }

    #[inline]
    pub fn wins(&self, a: usize, b: usize, x: usize, y: usize) -> bool {
        self.predicate[self.predicate_index(a, b, x, y)]
    }

    pub fn predicate_table(&self) -> &[bool] {
        &self.predicate
    }

    /// Number of entries in a table indexed by (a, b, x, y).
    pub fn table_len(&self) -> usize {
        self.predicate.len()
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    pub fn with_labels(mut self, labels: Labels) -> Result<Self> {
        self.labels = Some(labels);
        self.validate()?;
        Ok(self)
    }

    /// Whether `X = Y`, `A = B` as index sets.
    pub fn is_square(&self) -> bool {
        self.x_size == self.y_size && self.a_size == self.b_size
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GameJson::from(self)).expect("game serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&GameJson::from(self)).expect("game serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: GameJson = serde_json::from_str(s)?;
        raw.into_game()
    }
}

/// Wire format of a game; see [`Game::from_json`].
///
/// `predicate` is either a string of `0`/`1` characters in the a-major index
/// order of this module, or `base64:` followed by the base64 encoding of the
/// same bits packed least-significant-bit first (bit `k` is bit `k % 8` of byte `k / 8`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameJson {
    pub x_size: usize,
    pub y_size: usize,
    pub a_size: usize,
    pub b_size: usize,
    pub prior: Vec<Vec<String>>,
    pub predicate: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Labels>,
}

/// Predicates at least this long are written in base64 form.
const BASE64_THRESHOLD: usize = 4096;

impl From<&Game> for GameJson {
    fn from(g: &Game) -> Self {
        let prior = (0..g.x_size)
            .map(|x| (0..g.y_size).map(|y| rational::format(g.prior(x, y))).collect())
            .collect();
        let predicate = if g.predicate.len() >= BASE64_THRESHOLD {
            format!("base64:{}", encode_bits_base64(&g.predicate))
        } else {
            g.predicate.iter().map(|&w| if w { '1' } else { '0' }).collect()
        };
        GameJson {
            x_size: g.x_size,
            y_size: g.y_size,
            a_size: g.a_size,
            b_size: g.b_size,
            prior,
            predicate,
            labels: g.labels.clone(),
        }
    }
}

impl GameJson {
    pub fn into_game(self) -> Result<Game> {
        let (xs, ys, as_, bs) = (self.x_size, self.y_size, self.a_size, self.b_size);
        let entries = (xs as u128) * (ys as u128) * (as_ as u128) * (bs as u128);
        if entries > DEFAULT_TABLE_LIMIT {
            return Err(Error::OverflowGuard {
                entries,
                limit: DEFAULT_TABLE_LIMIT,
            });
        }
        if self.prior.len() != xs || self.prior.iter().any(|r| r.len() != ys) {
            return Err(Error::ShapeMismatch(format!("prior must be a {xs}x{ys} table")));
        }
        let prior = self
            .prior
            .iter()
            .flatten()
            .map(|s| rational::parse(s))
            .collect::<Result<Vec<_>>>()?;
        let n = entries as usize;
        let predicate = decode_predicate(&self.predicate, n)?;
        let mut g = Game::new(xs, ys, as_, bs, prior, predicate)?;
        if let Some(l) = self.labels {
            g = g.with_labels(l)?;
        }
        Ok(g)
    }
}

fn encode_bits_base64(bits: &[bool]) -> String {
    let mut bytes = vec![0u8; bits.len().div_ceil(8)];
    for (k, &bit) in bits.iter().enumerate() {
        if bit {
            bytes[k / 8] |= 1 << (k % 8);
        }
    }
    base64::engine::general_purpose::STANDARD.encode(bytes)
}

/// Decodes a predicate string of either encoding into exactly `n` bits.
pub fn decode_predicate(s: &str, n: usize) -> Result<Vec<bool>> {
    if let Some(b64) = s.strip_prefix("base64:") {
        let bytes = base64::engine::general_purpose::STANDARD
            .decode(b64.trim())
            .map_err(|e| Error::parse(7, e.to_string()))?;
        if bytes.len() != n.div_ceil(8) {
            return Err(Error::ShapeMismatch(format!(
                "base64 predicate has {} bytes, expected {}",
                bytes.len(),
                n.div_ceil(8)
            )));
        }
        if n % 8 != 0 && bytes[n / 8] >> (n % 8) != 0 {
            return Err(Error::parse(7, "padding bits must be zero"));
        }
        return Ok((0..n).map(|k| bytes[k / 8] >> (k % 8) & 1 == 1).collect());
    }
    let mut out = Vec::with_capacity(n);
    for (pos, c) in s.chars().enumerate() {
        match c {
            '0' => out.push(false),
            '1' => out.push(true),
            c if c.is_whitespace() => {}
            c => return Err(Error::parse(pos, format!("unexpected predicate character {c:?}"))),
        }
    }
    if out.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "predicate has {} entries, expected {n}",
            out.len()
        )));
    }
    Ok(out)
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn bit_and_bot() -> Vec<String> {
    vec!["0".into(), "1".into(), "⊥".into()]
}

/// Feige's game: bits as questions, answers `{0, 1, ⊥}`, uniform prior; the
/// players win iff `(a, b) = (⊥, x)` or `(a, b) = (y, ⊥)`.
pub fn feige() -> Game {
    let quarter = rational::ratio(1, 4);
    Game::from_fn(
        (2, 2, 3, 3),
        |_, _| quarter.clone(),
        |a, b, x, y| (a == BOT && b == x) || (a == y && b == BOT),
    )
    .and_then(|g| {
        g.with_labels(Labels {
            x: names(2),
            y: names(2),
            a: bit_and_bot(),
            b: bit_and_bot(),
        })
    })
    .expect("feige game is valid")
}

/// Answer indices of [`feige_sync`]: `A0, A1, B0, B1`.
pub const SYNC_A0: usize = 0;
pub const SYNC_B0: usize = 2;

/// The synchronous variant: answers `{A0, A1, B0, B1}`; win iff
/// `(a, b) = (Ax, Ax)` or `(a, b) = (By, By)`.
pub fn feige_sync() -> Game {
    let quarter = rational::ratio(1, 4);
    Game::from_fn(
        (2, 2, 4, 4),
        |_, _| quarter.clone(),
        |a, b, x, y| a == b && (a == SYNC_A0 + x || a == SYNC_B0 + y),
    )
    .and_then(|g| {
        let ans: Vec<String> = ["A0", "A1", "B0", "B1"].iter().map(|s| s.to_string()).collect();
        g.with_labels(Labels {
            x: names(2),
            y: names(2),
            a: ans.clone(),
            b: ans,
        })
    })
    .expect("synchronous feige game is valid")
}

/// The CHSH game: win iff `a XOR b = x AND y`, uniform prior.
pub fn chsh() -> Game {
    let quarter = rational::ratio(1, 4);
    Game::from_fn(
        (2, 2, 2, 2),
        |_, _| quarter.clone(),
        |a, b, x, y| (a ^ b) == (x & y),
    )
    .expect("chsh game is valid")
}

/// The two guessing games whose or-game is Feige's game.
///
/// In the first, Alice (one question) guesses Bob's bit while Bob can only
/// answer `⊥`; in the second the roles are swapped.
pub fn guessing_components() -> (Game, Game) {
    let half = rational::ratio(1, 2);
    let g1 = Game::from_fn((1, 2, 2, 1), |_, _| half.clone(), |a, _, _, y| a == y)
        .and_then(|g| {
            g.with_labels(Labels {
                x: vec!["*".into()],
                y: names(2),
                a: names(2),
                b: vec!["⊥".into()],
            })
        })
        .expect("first guessing game is valid");
    let g2 = Game::from_fn((2, 1, 1, 2), |_, _| half.clone(), |_, b, x, _| b == x)
        .and_then(|g| {
            g.with_labels(Labels {
                x: names(2),
                y: vec!["*".into()],
                a: vec!["⊥".into()],
                b: names(2),
            })
        })
        .expect("second guessing game is valid");
    (g1, g2)
}

fn check_limit(entries: u128, limit: u128) -> Result<()> {
    if entries > limit {
        Err(Error::OverflowGuard { entries, limit })
    } else {
        Ok(())
    }
}

fn joined_labels(g: &Game, h: &Game, sep: &str) -> Option<Labels> {
    let (lg, lh) = (g.labels.as_ref()?, h.labels.as_ref()?);
    let join = |u: &[String], v: &[String]| -> Vec<String> {
        let mut out = Vec::with_capacity(u.len() * v.len());
        for j in v {
            for i in u {
                out.push(format!("{i}{sep}{j}"));
            }
        }
        out
    };
    Some(Labels {
        x: join(&lg.x, &lh.x),
        y: join(&lg.y, &lh.y),
        a: join(&lg.a, &lh.a),
        b: join(&lg.b, &lh.b),
    })
}

/// The product game `g × h`: both games are played in parallel and the
/// players must win both. Tuple indices are little-endian (`g` is coordinate 0).
pub fn product(g: &Game, h: &Game) -> Result<Game> {
    product_with_limit(g, h, DEFAULT_TABLE_LIMIT)
}

pub fn product_with_limit(g: &Game, h: &Game, limit: u128) -> Result<Game> {
    let entries = g.table_len() as u128 * h.table_len() as u128;
    check_limit(entries, limit)?;
    let xs = g.x_size * h.x_size;
    let ys = g.y_size * h.y_size;
    let as_ = g.a_size * h.a_size;
    let bs = g.b_size * h.b_size;
    let split = |i: usize, k: usize| (i % k, i / k);
    let mut out = Game::from_fn(
        (xs, ys, as_, bs),
        |x, y| {
            let (x1, x2) = split(x, g.x_size);
            let (y1, y2) = split(y, g.y_size);
            g.prior(x1, y1) * h.prior(x2, y2)
        },
        |a, b, x, y| {
            let (a1, a2) = split(a, g.a_size);
            let (b1, b2) = split(b, g.b_size);
            let (x1, x2) = split(x, g.x_size);
            let (y1, y2) = split(y, g.y_size);
            g.wins(a1, b1, x1, y1) && h.wins(a2, b2, x2, y2)
        },
    )?;
    out.labels = joined_labels(g, h, ",");
    Ok(out)
}

/// The `n`-fold parallel repetition `G^{×n}` with the default table bound.
pub fn parallel_repeat(game: &Game, n: usize) -> Result<Game> {
    parallel_repeat_with_limit(game, n, DEFAULT_TABLE_LIMIT)
}

pub fn parallel_repeat_with_limit(game: &Game, n: usize, limit: u128) -> Result<Game> {
    if n == 0 {
        return Err(Error::Domain("repetition count must be at least 1".into()));
    }
    let entries = (game.table_len() as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    check_limit(entries, limit)?;
    let mut out = game.clone();
    for _ in 1..n {
        out = product_with_limit(&out, game, limit)?;
    }
    Ok(out)
}

/// Splits a little-endian mixed-radix index into `n` digits of base `radix`.
pub fn digits(mut index: usize, radix: usize, n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(index % radix);
        index /= radix;
    }
    out
}

/// Inverse of [`digits`].
pub fn from_digits(ds: &[usize], radix: usize) -> usize {
    ds.iter().rev().fold(0, |acc, &d| acc * radix + d)
}

/// The or-game `g1 ∨ g2`: questions are pairs `(x1, x2)` (index `x1 + |X1|·x2`),
/// answers are the disjoint union with all of `g1`'s answers first; the players
/// win iff both answer within the same component and win it.
///
/// The prior is the product `π1 × π2`. Only uniform component priors are
/// covered by the original construction; general priors are accepted here.
pub fn or_game(g1: &Game, g2: &Game) -> Result<Game> {
    let xs = g1.x_size * g2.x_size;
    let ys = g1.y_size * g2.y_size;
    let as_ = g1.a_size + g2.a_size;
    let bs = g1.b_size + g2.b_size;
    check_limit((xs * ys * as_ * bs) as u128, DEFAULT_TABLE_LIMIT)?;
    let mut out = Game::from_fn(
        (xs, ys, as_, bs),
        |x, y| g1.prior(x % g1.x_size, y % g1.y_size) * g2.prior(x / g1.x_size, y / g1.y_size),
        |a, b, x, y| {
            let (x1, x2) = (x % g1.x_size, x / g1.x_size);
            let (y1, y2) = (y % g1.y_size, y / g1.y_size);
            match (a < g1.a_size, b < g1.b_size) {
                (true, true) => g1.wins(a, b, x1, y1),
                (false, false) => g2.wins(a - g1.a_size, b - g1.b_size, x2, y2),
                _ => false,
            }
        },
    )?;
    if let (Some(l1), Some(l2)) = (&g1.labels, &g2.labels) {
        let pairs = |u: &[String], v: &[String]| {
            let mut o = Vec::new();
            for j in v {
                for i in u {
                    o.push(format!("({i},{j})"));
                }
            }
            o
        };
        let union = |u: &[String], v: &[String]| {
            u.iter()
                .map(|s| format!("1:{s}"))
                .chain(v.iter().map(|s| format!("2:{s}")))
                .collect::<Vec<_>>()
        };
        out.labels = Some(Labels {
            x: pairs(&l1.x, &l2.x),
            y: pairs(&l1.y, &l2.y),
            a: union(&l1.a, &l2.a),
            b: union(&l1.b, &l2.b),
        });
    }
    Ok(out)
}

/// Bijections on the four index sets. Applying `r` to a game `g` yields the
/// game `h` with `h.V(a_perm[a], b_perm[b] | x_perm[x], y_perm[y]) = g.V(a, b | x, y)`
/// and likewise for the prior.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relabeling {
    pub x_perm: Vec<usize>,
    pub y_perm: Vec<usize>,
    pub a_perm: Vec<usize>,
    pub b_perm: Vec<usize>,
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&i| i < p.len() && !std::mem::replace(&mut seen[i], true))
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

impl Relabeling {
    pub fn identity(game: &Game) -> Self {
        Relabeling {
            x_perm: (0..game.x_size).collect(),
            y_perm: (0..game.y_size).collect(),
            a_perm: (0..game.a_size).collect(),
            b_perm: (0..game.b_size).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("x", &self.x_perm),
            ("y", &self.y_perm),
            ("a", &self.a_perm),
            ("b", &self.b_perm),
        ] {
            if !is_permutation(p) {
                return Err(Error::Invalid(format!("{name} map is not a permutation")));
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Self {
        Relabeling {
            x_perm: invert(&self.x_perm),
            y_perm: invert(&self.y_perm),
            a_perm: invert(&self.a_perm),
            b_perm: invert(&self.b_perm),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Relabeling) -> Self {
        let c = |p: &[usize], q: &[usize]| q.iter().map(|&i| p[i]).collect::<Vec<_>>();
        Relabeling {
            x_perm: c(&self.x_perm, &other.x_perm),
            y_perm: c(&self.y_perm, &other.y_perm),
            a_perm: c(&self.a_perm, &other.a_perm),
            b_perm: c(&self.b_perm, &other.b_perm),
        }
    }

    pub fn apply(&self, g: &Game) -> Result<Game> {
        self.validate()?;
        let sizes_ok = self.x_perm.len() == g.x_size
            && self.y_perm.len() == g.y_size
            && self.a_perm.len() == g.a_size
            && self.b_perm.len() == g.b_size;
        if !sizes_ok {
            return Err(Error::ShapeMismatch("relabeling does not fit the game".into()));
        }
        let inv = self.inverse();
        Game::from_fn(
            g.sizes(),
            |x, y| g.prior(inv.x_perm[x], inv.y_perm[y]).clone(),
            |a, b, x, y| g.wins(inv.a_perm[a], inv.b_perm[b], inv.x_perm[x], inv.y_perm[y]),
        )
    }

    /// Whether applying `self` to `g` gives exactly `h` (priors and predicates).
    pub fn maps(&self, g: &Game, h: &Game) -> bool {
        if g.sizes() != h.sizes() {
            return false;
        }
        for x in 0..g.x_size {
            for y in 0..g.y_size {
                if g.prior(x, y) != h.prior(self.x_perm[x], self.y_perm[y]) {
                    return false;
                }
            }
        }
        for a in 0..g.a_size {
            for b in 0..g.b_size {
                for x in 0..g.x_size {
                    for y in 0..g.y_size {
                        let hv = h.wins(self.a_perm[a], self.b_perm[b], self.x_perm[x], self.y_perm[y]);
                        if g.wins(a, b, x, y) != hv {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// Largest set size accepted by the exhaustive relabeling searches.
pub const MAX_SEARCH_SIZE: usize = 6;

fn search_relabelings(g: &Game, h: &Game, mut visit: impl FnMut(Relabeling) -> bool) {
    if g.sizes() != h.sizes() {
        return;
    }
    let (xs, ys, as_, bs) = g.sizes();
    let xp = permutations(xs);
    let yp = permutations(ys);
    let ap = permutations(as_);
    let bp = permutations(bs);
    for px in &xp {
        for py in &yp {
            let priors_match = (0..xs)
                .all(|x| (0..ys).all(|y| g.prior(x, y) == h.prior(px[x], py[y])));
            if !priors_match {
                continue;
            }
            for pa in &ap {
                for pb in &bp {
                    let r = Relabeling {
                        x_perm: px.clone(),
                        y_perm: py.clone(),
                        a_perm: pa.clone(),
                        b_perm: pb.clone(),
                    };
                    if r.maps(g, h) && !visit(r) {
                        return;
                    }
                }
            }
        }
    }
}

fn check_search_size(g: &Game) -> Result<()> {
    let (xs, ys, as_, bs) = g.sizes();
    if [xs, ys, as_, bs].iter().any(|&s| s > MAX_SEARCH_SIZE) {
        return Err(Error::BudgetExceeded {
            size: [xs, ys, as_, bs].into_iter().max().unwrap_or(0) as u128,
            budget: MAX_SEARCH_SIZE as u128,
        });
    }
    Ok(())
}

/// Exhaustive search for a relabeling taking `g` to `h`.
///
/// Returns `None` when the games are not isomorphic (including differing
/// sizes) or when a set exceeds [`MAX_SEARCH_SIZE`].
pub fn find_isomorphism(g: &Game, h: &Game) -> Option<Relabeling> {
    check_search_size(g).ok()?;
    let mut found = None;
    search_relabelings(g, h, |r| {
        found = Some(r);
        false
    });
    found
}

/// All relabelings that fix `g` (its automorphism group), by brute force.
pub fn automorphisms(g: &Game) -> Result<Vec<Relabeling>> {
    check_search_size(g)?;
    let mut out = Vec::new();
    search_relabelings(g, g, |r| {
        out.push(r);
        true
    });
    Ok(out)
}

/// Automorphisms of `G^{×n}` generated by coordinate-wise automorphisms of `G`
/// and permutations of the coordinates.
pub fn repeated_automorphisms(base: &[Relabeling], base_game: &Game, n: usize) -> Vec<Relabeling> {
    let (xs, ys, as_, bs) = base_game.sizes();
    let lift = |choice: &[&Relabeling], order: &[usize], sel: fn(&Relabeling) -> &Vec<usize>, k: usize| {
        let total = k.pow(n as u32);
        (0..total)
            .map(|idx| {
                let ds = digits(idx, k, n);
                // coordinate i moves to position order[i] after being mapped by choice[i]
                let mut out = vec![0; n];
                for i in 0..n {
                    out[order[i]] = sel(choice[i])[ds[i]];
                }
                from_digits(&out, k)
            })
            .collect::<Vec<_>>()
    };
    let mut out = Vec::new();
    let m = base.len();
    for order in permutations(n) {
        for pick in 0..m.pow(n as u32) {
            let picks = digits(pick, m, n);
            let choice: Vec<&Relabeling> = picks.iter().map(|&i| &base[i]).collect();
            out.push(Relabeling {
                x_perm: lift(&choice, &order, |r| &r.x_perm, xs),
                y_perm: lift(&choice, &order, |r| &r.y_perm, ys),
                a_perm: lift(&choice, &order, |r| &r.a_perm, as_),
                b_perm: lift(&choice, &order, |r| &r.b_perm, bs),
            });
        }
    }
    out
}
