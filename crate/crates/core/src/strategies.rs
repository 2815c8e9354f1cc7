//! Correlations, deterministic and quantum strategies, and the explicit
//! strategies for Feige's game and its repetitions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{self, Game, BOT};
use crate::rational::{self, Rational};

/// Tolerance for PVM invariants (Hermitian, idempotent, complete).
pub const PVM_TOL: f64 = 1e-10;
/// Tolerance for state normalization.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(Rational),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => rational::to_f64(r),
            Value::Float(f) => *f,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Float(_) => None,
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Exact(r) => write!(f, "{r}"),
            Value::Float(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Table {
    Exact(Vec<Rational>),
    Float(Vec<f64>),
}

/// A table `p(a, b | x, y)` in the predicate index order of [`crate::game`].
#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    pub x_size: usize,
    pub y_size: usize,
    pub a_size: usize,
    pub b_size: usize,
    pub table: Table,
}

impl Correlation {
    pub fn exact(sizes: (usize, usize, usize, usize), table: Vec<Rational>) -> Result<Self> {
        Self::with_table(sizes, Table::Exact(table))
    }

    pub fn float(sizes: (usize, usize, usize, usize), table: Vec<f64>) -> Result<Self> {
        Self::with_table(sizes, Table::Float(table))
    }

    fn with_table(sizes: (usize, usize, usize, usize), table: Table) -> Result<Self> {
        let (x_size, y_size, a_size, b_size) = sizes;
        if x_size == 0 || y_size == 0 || a_size == 0 || b_size == 0 {
            return Err(Error::ShapeMismatch("all set sizes must be positive".into()));
        }
        let len = match &table {
            Table::Exact(t) => t.len(),
            Table::Float(t) => t.len(),
        };
        if len != x_size * y_size * a_size * b_size {
            return Err(Error::ShapeMismatch(format!(
                "correlation table has {len} entries, expected {}",
                x_size * y_size * a_size * b_size
            )));
        }
        Ok(Correlation {
            x_size,
            y_size,
            a_size,
            b_size,
            table,
        })
    }

    pub fn from_fn_exact(
        sizes: (usize, usize, usize, usize),
        f: impl Fn(usize, usize, usize, usize) -> Rational,
    ) -> Self {
        let (xs, ys, as_, bs) = sizes;
        let mut t = Vec::with_capacity(xs * ys * as_ * bs);
        for a in 0..as_ {
            for b in 0..bs {
                for x in 0..xs {
                    for y in 0..ys {
                        t.push(f(a, b, x, y));
                    }
                }
            }
        }
        Correlation {
            x_size: xs,
            y_size: ys,
            a_size: as_,
            b_size: bs,
            table: Table::Exact(t),
        }
    }

    pub fn sizes(&self) -> (usize, usize, usize, usize) {
        (self.x_size, self.y_size, self.a_size, self.b_size)
    }

    #[inline]
    pub fn index(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        ((a * self.b_size + b) * self.x_size + x) * self.y_size + y
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.table, Table::Exact(_))
    }

    pub fn get_f64(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        let i = self.index(a, b, x, y);
        match &self.table {
            Table::Exact(t) => rational::to_f64(&t[i]),
            Table::Float(t) => t[i],
        }
    }

    pub fn get_exact(&self, a: usize, b: usize, x: usize, y: usize) -> Option<&Rational> {
        match &self.table {
            Table::Exact(t) => Some(&t[self.index(a, b, x, y)]),
            Table::Float(_) => None,
        }
    }

    /// Checks nonnegativity and per-(x, y) normalization (exactly, or within `tol`).
    pub fn validate(&self, tol: f64) -> Result<()> {
        let (xs, ys, as_, bs) = self.sizes();
        for x in 0..xs {
            for y in 0..ys {
                match &self.table {
                    Table::Exact(t) => {
                        let mut s = Rational::zero();
                        for a in 0..as_ {
                            for b in 0..bs {
                                let v = &t[self.index(a, b, x, y)];
                                if v < &Rational::zero() {
                                    return Err(Error::Invalid(format!(
                                        "negative entry at ({a},{b}|{x},{y})"
                                    )));
                                }
                                s += v;
                            }
                        }
                        if !s.is_one() {
                            return Err(Error::Invalid(format!("row ({x},{y}) sums to {s}")));
                        }
                    }
                    Table::Float(t) => {
                        let mut s = 0.0;
                        for a in 0..as_ {
                            for b in 0..bs {
                                let v = t[self.index(a, b, x, y)];
                                if v < -tol {
                                    return Err(Error::Invalid(format!(
                                        "negative entry at ({a},{b}|{x},{y})"
                                    )));
                                }
                                s += v;
                            }
                        }
                        if (s - 1.0).abs() > tol {
                            return Err(Error::Invalid(format!("row ({x},{y}) sums to {s}")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CorrelationJson::from(self)).expect("correlation serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: CorrelationJson = serde_json::from_str(s)?;
        raw.into_correlation()
    }
}

/// Wire format: sizes as in the game format, `backend` is `"exact"` or
/// `"float"`, and `entries` is the flat table in predicate index order
/// (`"num/den"` strings for exact, numbers for float).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationJson {
    pub x_size: usize,
    pub y_size: usize,
    pub a_size: usize,
    pub b_size: usize,
    pub backend: String,
    pub entries: Vec<serde_json::Value>,
}

impl From<&Correlation> for CorrelationJson {
    fn from(c: &Correlation) -> Self {
        let (backend, entries) = match &c.table {
            Table::Exact(t) => (
                "exact",
                t.iter().map(|r| serde_json::Value::String(rational::format(r))).collect(),
            ),
            Table::Float(t) => ("float", t.iter().map(|&f| serde_json::json!(f)).collect()),
        };
        CorrelationJson {
            x_size: c.x_size,
            y_size: c.y_size,
            a_size: c.a_size,
            b_size: c.b_size,
            backend: backend.into(),
            entries,
        }
    }
}

impl CorrelationJson {
    pub fn into_correlation(self) -> Result<Correlation> {
        let entries = (self.x_size as u128)
            .saturating_mul(self.y_size as u128)
            .saturating_mul(self.a_size as u128)
            .saturating_mul(self.b_size as u128);
        if entries > game::DEFAULT_TABLE_LIMIT {
            return Err(Error::OverflowGuard {
                entries,
                limit: game::DEFAULT_TABLE_LIMIT,
            });
        }
        let sizes = (self.x_size, self.y_size, self.a_size, self.b_size);
        match self.backend.as_str() {
            "exact" => {
                let t = self
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(i, v)| match v {
                        serde_json::Value::String(s) => rational::parse(s),
                        _ => Err(Error::parse(i, "exact entries must be strings")),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Correlation::exact(sizes, t)
            }
            "float" => {
                let t = self
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        v.as_f64()
                            .filter(|f| f.is_finite())
                            .ok_or_else(|| Error::parse(i, "float entries must be finite numbers"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Correlation::float(sizes, t)
            }
            other => Err(Error::Invalid(format!("unknown backend {other:?}"))),
        }
    }
}

fn check_shape(game: &Game, corr: &Correlation) -> Result<()> {
    if game.sizes() != corr.sizes() {
        return Err(Error::ShapeMismatch(format!(
            "game has sizes {:?}, correlation {:?}",
            game.sizes(),
            corr.sizes()
        )));
    }
    Ok(())
}

/// Winning probability `Σ π(x,y) V(a,b|x,y) p(a,b|x,y)`; exact for exact tables.
pub fn eval_correlation(game: &Game, corr: &Correlation) -> Result<Value> {
    check_shape(game, corr)?;
    let (xs, ys, as_, bs) = game.sizes();
    match &corr.table {
        Table::Exact(t) => {
            // sum p over winning answers per (x,y) first, then weight by the prior
            let mut total = Rational::zero();
            for x in 0..xs {
                for y in 0..ys {
                    let pi = game.prior(x, y);
                    if pi.is_zero() {
                        continue;
                    }
                    let mut s = Rational::zero();
                    for a in 0..as_ {
                        for b in 0..bs {
                            let i = game.predicate_index(a, b, x, y);
                            if game.predicate_table()[i] && !t[i].is_zero() {
                                s += &t[i];
                            }
                        }
                    }
                    total += s * pi;
                }
            }
            Ok(Value::Exact(total))
        }
        Table::Float(t) => {
            let mut total = 0.0;
            for x in 0..xs {
                for y in 0..ys {
                    let pi = rational::to_f64(game.prior(x, y));
                    let mut s = 0.0;
                    for a in 0..as_ {
                        for b in 0..bs {
                            let i = game.predicate_index(a, b, x, y);
                            if game.predicate_table()[i] {
                                s += t[i];
                            }
                        }
                    }
                    total += pi * s;
                }
            }
            Ok(Value::Float(total))
        }
    }
}

/// Alice answers `alice[x]`, Bob answers `bob[y]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
}

impl DeterministicStrategy {
    pub fn validate(&self, game: &Game) -> Result<()> {
        if self.alice.len() != game.x_size() || self.bob.len() != game.y_size() {
            return Err(Error::ShapeMismatch("strategy length does not match question sets".into()));
        }
        if self.alice.iter().any(|&a| a >= game.a_size()) || self.bob.iter().any(|&b| b >= game.b_size()) {
            return Err(Error::ShapeMismatch("answer out of range".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("strategy serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Exact winning probability of a deterministic strategy.
pub fn eval_deterministic(game: &Game, s: &DeterministicStrategy) -> Result<Rational> {
    s.validate(game)?;
    let mut total = Rational::zero();
    for x in 0..game.x_size() {
        for y in 0..game.y_size() {
            if game.wins(s.alice[x], s.bob[y], x, y) {
                total += game.prior(x, y);
            }
        }
    }
    Ok(total)
}

/// Exact winning probability on `base^{×n}` without materializing the
/// repeated game: questions and answers are decoded coordinate-wise.
pub fn eval_deterministic_repeated(base: &Game, n: usize, s: &DeterministicStrategy) -> Result<Rational> {
    let (xs, ys, as_, bs) = base.sizes();
    let pow = |b: usize| {
        u32::try_from(n)
            .ok()
            .and_then(|e| b.checked_pow(e))
            .ok_or(Error::OverflowGuard {
                entries: u128::MAX,
                limit: usize::MAX as u128,
            })
    };
    let (nx, ny, na, nb) = (pow(xs)?, pow(ys)?, pow(as_)?, pow(bs)?);
    if s.alice.len() != nx || s.bob.len() != ny {
        return Err(Error::ShapeMismatch("strategy length does not match question sets".into()));
    }
    if s.alice.iter().any(|&a| a >= na) || s.bob.iter().any(|&b| b >= nb) {
        return Err(Error::ShapeMismatch("answer out of range".into()));
    }
    let alice: Vec<(Vec<usize>, Vec<usize>)> = (0..nx)
        .map(|x| (game::digits(x, xs, n), game::digits(s.alice[x], as_, n)))
        .collect();
    let bob: Vec<(Vec<usize>, Vec<usize>)> = (0..ny)
        .map(|y| (game::digits(y, ys, n), game::digits(s.bob[y], bs, n)))
        .collect();
    let mut total = Rational::zero();
    for (xd, ad) in &alice {
        for (yd, bd) in &bob {
            if (0..n).all(|i| base.wins(ad[i], bd[i], xd[i], yd[i])) {
                total += (0..n).fold(Rational::one(), |acc, i| acc * base.prior(xd[i], yd[i]));
            }
        }
    }
    Ok(total)
}

pub fn correlation_of_deterministic(game: &Game, s: &DeterministicStrategy) -> Result<Correlation> {
    s.validate(game)?;
    Ok(Correlation::from_fn_exact(game.sizes(), |a, b, x, y| {
        if s.alice[x] == a && s.bob[y] == b {
            Rational::one()
        } else {
            Rational::zero()
        }
    }))
}

/// Whether Alice's marginal is independent of `y` and Bob's of `x`.
/// Exact tables are compared exactly and `tol` is ignored.
pub fn is_nonsignalling(corr: &Correlation, tol: f64) -> bool {
    let (xs, ys, as_, bs) = corr.sizes();
    match &corr.table {
        Table::Exact(t) => {
            let bob_marg = |b, x, y| -> Rational {
                (0..as_).map(|a| &t[corr.index(a, b, x, y)]).sum()
            };
            let alice_marg = |a, x, y| -> Rational {
                (0..bs).map(|b| &t[corr.index(a, b, x, y)]).sum()
            };
            for y in 0..ys {
                for b in 0..bs {
                    let m0 = bob_marg(b, 0, y);
                    if (1..xs).any(|x| bob_marg(b, x, y) != m0) {
                        return false;
                    }
                }
            }
            for x in 0..xs {
                for a in 0..as_ {
                    let m0 = alice_marg(a, x, 0);
                    if (1..ys).any(|y| alice_marg(a, x, y) != m0) {
                        return false;
                    }
                }
            }
            true
        }
        Table::Float(t) => {
            let bob_marg = |b, x, y| -> f64 { (0..as_).map(|a| t[corr.index(a, b, x, y)]).sum() };
            let alice_marg = |a, x, y| -> f64 { (0..bs).map(|b| t[corr.index(a, b, x, y)]).sum() };
            for y in 0..ys {
                for b in 0..bs {
                    let m0 = bob_marg(b, 0, y);
                    if (1..xs).any(|x| (bob_marg(b, x, y) - m0).abs() > tol) {
                        return false;
                    }
                }
            }
            for x in 0..xs {
                for a in 0..as_ {
                    let m0 = alice_marg(a, x, 0);
                    if (1..ys).any(|y| (alice_marg(a, x, y) - m0).abs() > tol) {
                        return false;
                    }
                }
            }
            true
        }
    }
}

/// Whether `p(a, b | x, x) = 0` whenever `a ≠ b`.
pub fn is_synchronous(corr: &Correlation, tol: f64) -> Result<bool> {
    let (xs, ys, as_, bs) = corr.sizes();
    if xs != ys || as_ != bs {
        return Err(Error::ShapeMismatch("synchronicity needs equal question and answer sets".into()));
    }
    for x in 0..xs {
        for a in 0..as_ {
            for b in 0..bs {
                if a == b {
                    continue;
                }
                let nonzero = match &corr.table {
                    Table::Exact(t) => !t[corr.index(a, b, x, x)].is_zero(),
                    Table::Float(t) => t[corr.index(a, b, x, x)].abs() > tol,
                };
                if nonzero {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

pub type CMatrix = DMatrix<Complex64>;

/// A shared state on `C^{dim_a} ⊗ C^{dim_b}` (index `i * dim_b + j`) with a
/// projective measurement per question for each player.
#[derive(Debug, Clone)]
pub struct QuantumStrategy {
    pub dim_a: usize,
    pub dim_b: usize,
    pub state: DVector<Complex64>,
    pub alice: Vec<Vec<CMatrix>>,
    pub bob: Vec<Vec<CMatrix>>,
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_pvm(pvm: &[CMatrix], dim: usize, who: &str, q: usize) -> Result<()> {
    let mut sum = CMatrix::zeros(dim, dim);
    for (k, p) in pvm.iter().enumerate() {
        if p.nrows() != dim || p.ncols() != dim {
            return Err(Error::NotAStrategy(format!("{who} element ({q},{k}) has wrong size")));
        }
        if max_abs(&(p - p.adjoint())) > PVM_TOL {
            return Err(Error::NotAStrategy(format!("{who} element ({q},{k}) is not Hermitian")));
        }
        if max_abs(&(p * p - p)) > PVM_TOL {
            return Err(Error::NotAStrategy(format!("{who} element ({q},{k}) is not idempotent")));
        }
        sum += p;
    }
    if max_abs(&(sum - CMatrix::identity(dim, dim))) > PVM_TOL {
        return Err(Error::NotAStrategy(format!("{who} measurement {q} does not sum to identity")));
    }
    Ok(())
}

impl QuantumStrategy {
    pub fn validate(&self) -> Result<()> {
        if self.state.len() != self.dim_a * self.dim_b {
            return Err(Error::NotAStrategy("state length is not dim_a * dim_b".into()));
        }
        if (self.state.norm() - 1.0).abs() > NORM_TOL {
            return Err(Error::NotAStrategy(format!("state norm {}", self.state.norm())));
        }
        for (x, pvm) in self.alice.iter().enumerate() {
            check_pvm(pvm, self.dim_a, "alice", x)?;
        }
        for (y, pvm) in self.bob.iter().enumerate() {
            check_pvm(pvm, self.dim_b, "bob", y)?;
        }
        Ok(())
    }

    /// The state reshaped into a `dim_a × dim_b` matrix `M` with `ψ = Σ M_ij |i⟩|j⟩`.
    pub fn state_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.dim_a, self.dim_b, |i, j| self.state[i * self.dim_b + j])
    }

    /// `⟨ψ| A ⊗ B |ψ⟩` computed as `tr(M* A M Bᵀ)`.
    pub fn expectation(&self, alice_op: &CMatrix, bob_op: &CMatrix) -> Complex64 {
        let m = self.state_matrix();
        let lhs = alice_op * &m * bob_op.transpose();
        m.iter().zip(lhs.iter()).map(|(u, v)| u.conj() * v).sum()
    }
}

pub fn correlation_of_quantum(game: &Game, s: &QuantumStrategy) -> Result<Correlation> {
    s.validate()?;
    let (xs, ys, as_, bs) = game.sizes();
    if s.alice.len() != xs || s.bob.len() != ys {
        return Err(Error::ShapeMismatch("measurement count does not match question sets".into()));
    }
    if s.alice.iter().any(|m| m.len() != as_) || s.bob.iter().any(|m| m.len() != bs) {
        return Err(Error::ShapeMismatch("outcome count does not match answer sets".into()));
    }
    let m = s.state_matrix();
    let mut t = vec![0.0; xs * ys * as_ * bs];
    for x in 0..xs {
        for a in 0..as_ {
            let left = m.adjoint() * &s.alice[x][a] * &m;
            for y in 0..ys {
                for b in 0..bs {
                    // tr(M* P M Qᵀ)
                    let v: Complex64 = left
                        .iter()
                        .zip(s.bob[y][b].iter())
                        .map(|(l, q)| l * q)
                        .sum();
                    if v.im.abs() > PVM_TOL {
                        return Err(Error::NotAStrategy(format!(
                            "probability with imaginary part {}",
                            v.im
                        )));
                    }
                    t[((a * bs + b) * xs + x) * ys + y] = v.re;
                }
            }
        }
    }
    Correlation::float(game.sizes(), t)
}

/// The non-signalling correlation on Feige's game with value 2/3: weight 1/3
/// on `(⊥, x)`, on `(y, ⊥)`, and on `(1−y, 1−x)`.
pub fn ns_strategy_feige() -> Correlation {
    let third = rational::ratio(1, 3);
    Correlation::from_fn_exact((2, 2, 3, 3), |a, b, x, y| {
        let on = (a == BOT && b == x) || (a == y && b == BOT) || (a == 1 - y && b == 1 - x);
        if on {
            third.clone()
        } else {
            Rational::zero()
        }
    })
}

/// Non-signalling correlation on the three-fold Feige game with value 1/3: coordinate 0 plays
/// [`ns_strategy_feige`], coordinates 1 and 2 play the pair strategy.
pub fn ns_strategy_feige3() -> Correlation {
    let base = ns_strategy_feige();
    Correlation::from_fn_exact((8, 8, 27, 27), |a, b, x, y| {
        let (ad, bd) = (game::digits(a, 3, 3), game::digits(b, 3, 3));
        let (xd, yd) = (game::digits(x, 2, 3), game::digits(y, 2, 3));
        if ad[1] != BOT || ad[2] != xd[1] || bd[1] != yd[2] || bd[2] != BOT {
            return Rational::zero();
        }
        base.get_exact(ad[0], bd[0], xd[0], yd[0]).cloned().expect("exact table")
    })
}

/// The deterministic strategy on the 2m-fold Feige game winning with probability `2^{-m}`:
/// in each pair of coordinates `(2i, 2i+1)` Alice answers `(⊥, x_{2i})` and
/// Bob answers `(y_{2i+1}, ⊥)`.
pub fn classical_pair_strategy(m: usize) -> Result<DeterministicStrategy> {
    if m == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    let n = 2 * m;
    if n > 20 {
        return Err(Error::OverflowGuard {
            entries: 1u128 << n,
            limit: 1 << 20,
        });
    }
    let questions = 1usize << n;
    let mut alice = Vec::with_capacity(questions);
    let mut bob = Vec::with_capacity(questions);
    for q in 0..questions {
        let bits = game::digits(q, 2, n);
        let mut a = vec![0; n];
        let mut b = vec![0; n];
        for i in 0..m {
            a[2 * i] = BOT;
            a[2 * i + 1] = bits[2 * i];
            b[2 * i] = bits[2 * i + 1];
            b[2 * i + 1] = BOT;
        }
        alice.push(game::from_digits(&a, 3));
        bob.push(game::from_digits(&b, 3));
    }
    Ok(DeterministicStrategy { alice, bob })
}

/// The deterministic strategy on the three-fold Feige game winning with probability 5/16.
pub fn classical_three_strategy() -> DeterministicStrategy {
    let mut alice = Vec::with_capacity(8);
    let mut bob = Vec::with_capacity(8);
    for q in 0..8 {
        let v = game::digits(q, 2, 3);
        let a = [BOT, v[0] | v[2], if v[0] == 0 { BOT } else { 1 }];
        let and = v[1] & v[2];
        let b = [and, BOT, if and == 0 { v[1] } else { BOT }];
        alice.push(game::from_digits(&a, 3));
        bob.push(game::from_digits(&b, 3));
    }
    DeterministicStrategy { alice, bob }
}

/// Coordinate-wise strategy on `product(g, h)`.
pub fn product_strategy(
    g: &Game,
    s1: &DeterministicStrategy,
    h: &Game,
    s2: &DeterministicStrategy,
) -> Result<DeterministicStrategy> {
    s1.validate(g)?;
    s2.validate(h)?;
    let mut alice = vec![0; g.x_size() * h.x_size()];
    let mut bob = vec![0; g.y_size() * h.y_size()];
    for (x, slot) in alice.iter_mut().enumerate() {
        *slot = s1.alice[x % g.x_size()] + g.a_size() * s2.alice[x / g.x_size()];
    }
    for (y, slot) in bob.iter_mut().enumerate() {
        *slot = s1.bob[y % g.y_size()] + g.b_size() * s2.bob[y / g.y_size()];
    }
    Ok(DeterministicStrategy { alice, bob })
}
