//! Moment-matrix relaxations of the quantum value, and exact sum-of-squares
//! certificates derived from a feasibility program.
//!
//! The relaxation is real: a moment `⟨w⟩` is identified with `⟨w*⟩`, which
//! keeps the value an upper bound since honest moment matrices have PSD real
//! parts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::Game;
use crate::linalg::{self, Rref};
use crate::ncpoly::{self, game_polynomial, Alphabet, Letter, NcPoly, SosCertificate, Word};
use crate::rational::{self, Rational};
use crate::sdp::{self, SdpOptions, SdpProblem, SymMatrix};
use crate::strategies::QuantumStrategy;

/// Largest moment matrix built unless a different limit is passed.
pub const DEFAULT_MAX_DIM: usize = 200;
/// Default rounding grid for certificates: entries become multiples of `2^-24`.
pub const CERTIFICATE_DENOMINATOR: u64 = 1 << 24;
/// Largest degree accepted in a level string.
const MAX_LEVEL_DEGREE: usize = 6;

/// `k + A^{s1}B^{t1} + ...`: all words of degree at most `k`, plus words
/// with exactly `s` Alice letters and `t` Bob letters for each extra block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub base: usize,
    pub extras: Vec<(usize, usize)>,
}

impl Level {
    pub fn new(base: usize, extras: Vec<(usize, usize)>) -> Result<Level> {
        for &(s, t) in &extras {
            if s + t <= base {
                return Err(Error::Invalid(format!(
                    "block A^{s}B^{t} has degree {} which does not exceed the base {base}",
                    s + t
                )));
            }
        }
        Ok(Level { base, extras })
    }

    /// `(alice length, bob length)` shapes of the index words.
    fn shapes(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for i in 0..=self.base {
            for j in 0..=self.base - i {
                out.insert((i, j));
            }
        }
        out.extend(self.extras.iter().copied());
        out
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        let part = |f: &mut fmt::Formatter<'_>, tag: char, e: usize| match e {
            0 => Ok(()),
            1 => write!(f, "{tag}"),
            _ => write!(f, "{tag}^{e}"),
        };
        for &(s, t) in &self.extras {
            write!(f, "+")?;
            part(f, 'A', s)?;
            part(f, 'B', t)?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Level> {
        parse_level(s)
    }
}

struct LevelParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl LevelParser<'_> {
    fn ws(&mut self) {
        while self.s.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn int(&mut self) -> Result<usize> {
        self.ws();
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(start, "expected an integer"));
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("digits are ascii");
        match text.parse::<usize>() {
            Ok(v) if v <= MAX_LEVEL_DEGREE => Ok(v),
            _ => Err(Error::parse(start, format!("degree must be at most {MAX_LEVEL_DEGREE}"))),
        }
    }

    fn exponent(&mut self, tag: u8) -> Result<usize> {
        if self.peek() != Some(tag) {
            return Ok(0);
        }
        self.pos += 1;
        if self.peek() != Some(b'^') {
            return Ok(1);
        }
        self.pos += 1;
        let at = self.pos;
        let e = self.int()?;
        if e == 0 {
            return Err(Error::parse(at, "exponent must be positive"));
        }
        Ok(e)
    }
}

/// Parses `int ("+" block)*` where a block is `A^s B^t`, `A` meaning `A^1`.
pub fn parse_level(spec: &str) -> Result<Level> {
    let mut p = LevelParser {
        s: spec.as_bytes(),
        pos: 0,
    };
    let base = p.int()?;
    let mut extras = Vec::new();
    while p.peek() == Some(b'+') {
        p.pos += 1;
        let at = p.pos;
        let s = p.exponent(b'A')?;
        let t = p.exponent(b'B')?;
        if s + t == 0 {
            return Err(Error::parse(at, "expected a block such as A, AB or A^2"));
        }
        if s + t <= base {
            return Err(Error::parse(at, format!("block degree {} must exceed the base {base}", s + t)));
        }
        extras.push((s, t));
    }
    if p.peek().is_some() {
        return Err(Error::parse(p.pos, "trailing input"));
    }
    Ok(Level { base, extras })
}

/// Alternating words of `len` letters over `questions` questions with
/// `answers` non-eliminated answers each.
fn count_words(questions: usize, answers: usize, len: usize) -> u128 {
    if len == 0 {
        return 1;
    }
    let first = (questions as u128).saturating_mul(answers as u128);
    let next = (questions.saturating_sub(1) as u128).saturating_mul(answers as u128);
    (1..len).fold(first, |acc, _| acc.saturating_mul(next))
}

fn words(questions: usize, answers: usize, len: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &out {
            for q in 0..questions {
                if w.last().is_some_and(|l: &Letter| l.q as usize == q) {
                    continue;
                }
                for a in 0..answers {
                    let mut v = w.clone();
                    v.push(Letter::new(q, a));
                    next.push(v);
                }
            }
        }
        out = next;
    }
    out
}

/// Value of a moment-matrix entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entry {
    Zero,
    One,
    Var(usize),
}

/// The moment SDP: maximize `Σ c_w y_w + c_0` over moment matrices
/// `Γ(y)` with `Γ_ij = y_{canonical(u_i* u_j)}` positive semidefinite.
#[derive(Debug, Clone)]
pub struct MomentProblem {
    pub level: Level,
    pub alphabet: Alphabet,
    pub index: Vec<Word>,
    /// Canonical words that appear as entries, one variable each.
    pub variables: Vec<Word>,
    /// Row-major `dim × dim`.
    pub entries: Vec<Entry>,
    pub objective: Vec<(usize, Rational)>,
    pub objective_constant: Rational,
    /// Linear equalities `Σ e_v y_v = f` among the variables.
    pub constraints: Vec<(Vec<(usize, Rational)>, Rational)>,
    /// Coordinates over the index of vectors every feasible moment matrix
    /// annihilates; the cone is restricted to their orthogonal complement.
    pub kernel: Vec<Vec<Rational>>,
    pub sync: bool,
}

impl MomentProblem {
    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> Entry {
        self.entries[i * self.dim() + j]
    }

    /// `Γ(y)` for a full assignment of the variables.
    pub fn moment_matrix(&self, y: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| match self.entry(i, j) {
            Entry::Zero => 0.0,
            Entry::One => 1.0,
            Entry::Var(v) => y[v],
        })
    }

    pub fn objective_value(&self, y: &[f64]) -> f64 {
        rational::to_f64(&self.objective_constant)
            + self.objective.iter().map(|(v, c)| rational::to_f64(c) * y[*v]).sum::<f64>()
    }
}

pub fn build_moment_sdp(game: &Game, level: &Level, sync: bool) -> Result<MomentProblem> {
    build_moment_sdp_with_limit(game, level, sync, DEFAULT_MAX_DIM)
}

pub fn build_moment_sdp_with_limit(game: &Game, level: &Level, sync: bool, max_dim: usize) -> Result<MomentProblem> {
    let (xs, ys, na, nb) = game.sizes();
    let alphabet = Alphabet::of(game);
    if sync && !game.is_square() {
        return Err(Error::ShapeMismatch(
            "synchronicity needs equal question and answer sets".into(),
        ));
    }
    let shapes = level.shapes();
    let total = shapes.iter().fold(0u128, |acc, &(s, t)| {
        acc.saturating_add(count_words(xs, na - 1, s).saturating_mul(count_words(ys, nb - 1, t)))
    });
    if total > max_dim as u128 {
        return Err(Error::SizeBudget {
            dim: usize::try_from(total).unwrap_or(usize::MAX),
            limit: max_dim,
        });
    }
    let mut index = BTreeSet::new();
    for &(s, t) in &shapes {
        let bob = words(ys, nb - 1, t);
        for a in words(xs, na - 1, s) {
            for b in &bob {
                index.insert(Word {
                    alice: a.clone(),
                    bob: b.clone(),
                });
            }
        }
    }
    let index: Vec<Word> = index.into_iter().collect();
    let n = index.len();

    let mut raw = Vec::with_capacity(n * n);
    let mut names: BTreeSet<Word> = BTreeSet::new();
    for u in &index {
        let adj = u.adjoint();
        for v in &index {
            let w = adj.mul(v).map(|w| w.canonical());
            if let Some(w) = &w {
                if !w.is_identity() {
                    names.insert(w.clone());
                }
            }
            raw.push(w);
        }
    }
    let variables: Vec<Word> = names.into_iter().collect();
    let slot: BTreeMap<&Word, usize> = variables.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let entries: Vec<Entry> = raw
        .iter()
        .map(|w| match w {
            None => Entry::Zero,
            Some(w) if w.is_identity() => Entry::One,
            Some(w) => Entry::Var(slot[w]),
        })
        .collect();

    // linear form over the variables, with the identity coefficient split off
    let linear = |p: &NcPoly, what: &str| -> Result<(Vec<(usize, Rational)>, Rational)> {
        let mut out = Vec::new();
        let mut constant = Rational::zero();
        for (w, c) in p.canonical_coefficients() {
            if w.is_identity() {
                constant = c;
            } else {
                let v = slot.get(&w).ok_or_else(|| {
                    Error::Invalid(format!("{what} involves {w}, which the level does not reach"))
                })?;
                out.push((*v, c));
            }
        }
        Ok((out, constant))
    };
    let (objective, objective_constant) = linear(&game_polynomial(game), "the game polynomial")?;

    let mut constraints = Vec::new();
    let mut kernel = Vec::new();
    if sync {
        for x in 0..xs {
            for a in 0..na {
                for b in 0..nb {
                    if a == b {
                        continue;
                    }
                    let p = NcPoly::alice(x, a, alphabet)?.mul(&NcPoly::bob(x, b, alphabet)?)?;
                    let (row, c) = linear(&p, "a synchronicity constraint")?;
                    constraints.push((row, -c));
                    // ⟨(pq)* pq⟩ = ⟨pq⟩ = 0 forces Γ v = 0 for the coordinates v of pq
                    let mut v = vec![Rational::zero(); n];
                    let mut inside = true;
                    for (w, c) in p.terms() {
                        match index.binary_search(w) {
                            Ok(i) => v[i] = c.clone(),
                            Err(_) => inside = false,
                        }
                    }
                    if inside {
                        kernel.push(v);
                    }
                }
            }
        }
    }
    for v in &kernel {
        for i in 0..n {
            let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
            let mut constant = Rational::zero();
            for (j, c) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                match entries[i * n + j] {
                    Entry::Zero => {}
                    Entry::One => constant += c,
                    Entry::Var(k) => *row.entry(k).or_insert_with(Rational::zero) += c,
                }
            }
            row.retain(|_, c| !c.is_zero());
            if !row.is_empty() || !constant.is_zero() {
                constraints.push((row.into_iter().collect(), -constant));
            }
        }
    }
    Ok(MomentProblem {
        level: level.clone(),
        alphabet,
        index,
        variables,
        entries,
        objective,
        objective_constant,
        constraints,
        kernel,
        sync,
    })
}

#[derive(Debug, Clone)]
pub struct NpaSolution {
    /// Upper bound on the quantum value (dual objective of the moment SDP).
    pub value: f64,
    pub primal_value: f64,
    /// One entry per problem variable.
    pub moments: Vec<f64>,
    pub moment_matrix: DMatrix<f64>,
    /// Gram matrix of the sum-of-squares dual, over the index words.
    pub gram: DMatrix<f64>,
    pub iterations: usize,
    pub trace: Vec<String>,
}

impl NpaSolution {
    pub fn gap(&self) -> f64 {
        (self.value - self.primal_value).abs()
    }
}

fn positions(p: &MomentProblem) -> (Vec<(usize, usize)>, Vec<Vec<(usize, usize)>>) {
    let n = p.dim();
    let mut ones = Vec::new();
    let mut by_var = vec![Vec::new(); p.variables.len()];
    for i in 0..n {
        for j in i..n {
            match p.entry(i, j) {
                Entry::Zero => {}
                Entry::One => ones.push((i, j)),
                Entry::Var(v) => by_var[v].push((i, j)),
            }
        }
    }
    (ones, by_var)
}

fn f64s(v: &[Rational]) -> Vec<f64> {
    v.iter().map(rational::to_f64).collect()
}

/// Orthonormal basis of the span of `dirs` in the trace inner product of the
/// matrices they parametrize; coordinate `k` fills `weights[k]` entries.
fn orthonormalize(dirs: &[Vec<f64>], weights: &[f64]) -> Vec<Vec<f64>> {
    if dirs.is_empty() {
        return Vec::new();
    }
    let rows = weights.len();
    let root: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let m = DMatrix::from_fn(rows, dirs.len(), |i, k| dirs[k][i] * root[i]);
    let q = m.qr().q();
    (0..dirs.len())
        .map(|k| (0..rows).map(|i| q[(i, k)] / root[i]).collect())
        .collect()
}

/// Solves the moment SDP with the equality constraints eliminated by an
/// exact affine parametrization of the variables.
pub fn sdp_solve(p: &MomentProblem) -> Result<NpaSolution> {
    sdp_solve_with(p, SdpOptions::default())
}

pub fn sdp_solve_with(p: &MomentProblem, opts: SdpOptions) -> Result<NpaSolution> {
    let n = p.dim();
    let nv = p.variables.len();
    let param = linalg::rref(nv, &p.constraints)?;
    let y0 = f64s(&param.particular());
    let mut basis: Vec<Vec<f64>> = param.null_space().iter().map(|v| f64s(v)).collect();
    let (ones, by_var) = positions(p);
    if !p.constraints.is_empty() {
        let weights: Vec<f64> = by_var
            .iter()
            .map(|pos| pos.iter().map(|&(i, j)| if i == j { 1.0 } else { 2.0 }).sum())
            .collect();
        // unit norm only: a full orthonormalization would densify the directions
        for z in basis.iter_mut() {
            let norm = z.iter().zip(&weights).map(|(v, w)| v * v * w).sum::<f64>().sqrt();
            z.iter_mut().for_each(|v| *v /= norm);
        }
    }

    let mut c = DMatrix::<f64>::zeros(n, n);
    for &(i, j) in &ones {
        c[(i, j)] = 1.0;
        c[(j, i)] = 1.0;
    }
    for (v, pos) in by_var.iter().enumerate() {
        for &(i, j) in pos {
            c[(i, j)] = y0[v];
            c[(j, i)] = y0[v];
        }
    }
    let cost: Vec<f64> = {
        let mut dense = vec![0.0; nv];
        for (v, coef) in &p.objective {
            dense[*v] = rational::to_f64(coef);
        }
        dense
    };
    let shift = rational::to_f64(&p.objective_constant) + cost.iter().zip(&y0).map(|(a, b)| a * b).sum::<f64>();
    let a: Vec<SymMatrix> = basis
        .iter()
        .map(|z| {
            let mut e = Vec::new();
            for (v, zv) in z.iter().enumerate() {
                if *zv != 0.0 {
                    e.extend(by_var[v].iter().map(|&(i, j)| (i, j, -zv)));
                }
            }
            SymMatrix::Sparse(e)
        })
        .collect();
    let b: Vec<f64> = basis
        .iter()
        .map(|z| z.iter().zip(&cost).map(|(a, b)| a * b).sum())
        .collect();

    // facial reduction: Γ = W Γ' Wᵀ on the complement of the forced kernel
    let face = (!p.kernel.is_empty()).then(|| complement(&p.kernel, n));
    let (c, a) = match &face {
        None => (c, a),
        Some(w) => {
            let wt = w.transpose();
            let reduce = |m: &SymMatrix| {
                let mut d = DMatrix::zeros(n, n);
                m.add_to(&mut d, 1.0);
                SymMatrix::Dense(&wt * d * w)
            };
            (&wt * c * w, a.iter().map(reduce).collect())
        }
    };

    if a.is_empty() {
        // nothing to optimize: the moment matrix is fixed
        let min = sdp::min_eigenvalue(&c);
        if min < -1e-9 {
            return Err(Error::Infeasible);
        }
        return Ok(NpaSolution {
            value: shift,
            primal_value: shift,
            moments: y0.clone(),
            moment_matrix: p.moment_matrix(&y0),
            gram: DMatrix::zeros(n, n),
            iterations: 0,
            trace: Vec::new(),
        });
    }

    let sol = sdp::solve(&SdpProblem { c, a, b }, opts)?;
    let mut moments = y0;
    for (t, z) in sol.y.iter().zip(&basis) {
        for (m, zv) in moments.iter_mut().zip(z) {
            *m += t * zv;
        }
    }
    Ok(NpaSolution {
        value: shift + sol.dual_objective,
        primal_value: shift + sol.primal_objective,
        moment_matrix: p.moment_matrix(&moments),
        moments,
        gram: match &face {
            None => sol.x,
            Some(w) => w * sol.x * w.transpose(),
        },
        iterations: sol.iterations,
        trace: sol.trace,
    })
}

/// Orthonormal columns spanning the complement of the span of `kernel`.
fn complement(kernel: &[Vec<Rational>], n: usize) -> DMatrix<f64> {
    let k = DMatrix::from_fn(n, kernel.len(), |i, j| rational::to_f64(&kernel[j][i]));
    let eig = SymmetricEigen::new(&k * k.transpose());
    let top = eig.eigenvalues.max().max(1.0);
    let keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] < 1e-9 * top).collect();
    DMatrix::from_fn(n, keep.len(), |i, j| eig.eigenvectors[(i, keep[j])])
}

/// Upper bound on the quantum value at the given level.
pub fn quantum_upper_bound(game: &Game, level: &Level, sync: bool) -> Result<f64> {
    Ok(sdp_solve(&build_moment_sdp(game, level, sync)?)?.value)
}

/// Largest coefficient of `F* X F - (value - Φ)` over canonical words after
/// discarding components along the equality constraints.
pub fn dual_sos_residual(p: &MomentProblem, sol: &NpaSolution) -> f64 {
    let nv = p.variables.len();
    // coordinates: 0 for the identity, 1 + v for variable v
    let mut r = vec![0.0; nv + 1];
    let (ones, by_var) = positions(p);
    let weight = |(i, j): (usize, usize)| if i == j { sol.gram[(i, i)] } else { 2.0 * sol.gram[(i, j)] };
    r[0] = ones.iter().map(|&e| weight(e)).sum::<f64>() - (sol.value - rational::to_f64(&p.objective_constant));
    for (v, pos) in by_var.iter().enumerate() {
        r[1 + v] = pos.iter().map(|&e| weight(e)).sum();
    }
    for (v, c) in &p.objective {
        r[1 + v] += rational::to_f64(c);
    }
    if !p.constraints.is_empty() {
        let rows: Vec<Vec<f64>> = p
            .constraints
            .iter()
            .map(|(row, f)| {
                let mut d = vec![0.0; nv + 1];
                d[0] = -rational::to_f64(f);
                for (v, e) in row {
                    d[1 + v] = rational::to_f64(e);
                }
                d
            })
            .collect();
        let m = DMatrix::from_fn(nv + 1, rows.len(), |i, k| rows[k][i]);
        let rv = DVector::from_vec(r.clone());
        let svd = m.clone().svd(true, true);
        if let Ok(mu) = svd.solve(&rv, 1e-12) {
            let rest = rv - m * mu;
            r = rest.iter().copied().collect();
        }
    }
    r.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// `Re⟨ψ| u_i* u_j |ψ⟩` over the index words of `p`.
pub fn strategy_moment_matrix(p: &MomentProblem, s: &QuantumStrategy) -> Result<DMatrix<f64>> {
    let vecs = p
        .index
        .iter()
        .map(|w| NcPoly::from_term(w.clone(), Rational::one()).act(s))
        .collect::<Result<Vec<_>>>()?;
    let n = p.dim();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        vecs[i].iter().zip(vecs[j].iter()).map(|(a, b)| (a.conj() * b).re).sum()
    }))
}

#[derive(Debug, Clone, Copy)]
pub struct MomentCheck {
    pub objective: f64,
    /// Largest violation of an identification, constant entry or constraint.
    pub max_violation: f64,
    pub min_eigenvalue: f64,
}

/// Measures how far a candidate moment matrix is from the feasible set.
pub fn check_moments(p: &MomentProblem, gamma: &DMatrix<f64>) -> Result<MomentCheck> {
    let n = p.dim();
    if gamma.nrows() != n || gamma.ncols() != n {
        return Err(Error::DimensionMismatch(format!("expected a {n}x{n} matrix")));
    }
    let mut value: Vec<Option<f64>> = vec![None; p.variables.len()];
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let g = gamma[(i, j)];
            match p.entry(i, j) {
                Entry::Zero => worst = worst.max(g.abs()),
                Entry::One => worst = worst.max((g - 1.0).abs()),
                Entry::Var(v) => match value[v] {
                    None => value[v] = Some(g),
                    Some(first) => worst = worst.max((g - first).abs()),
                },
            }
        }
    }
    let y: Vec<f64> = value.iter().map(|v| v.unwrap_or(0.0)).collect();
    for (row, f) in &p.constraints {
        let lhs: f64 = row.iter().map(|(v, e)| rational::to_f64(e) * y[*v]).sum();
        worst = worst.max((lhs - rational::to_f64(f)).abs());
    }
    Ok(MomentCheck {
        objective: p.objective_value(&y),
        max_violation: worst,
        min_eigenvalue: sdp::min_eigenvalue(gamma),
    })
}

/// Polynomials spanning the numerical kernel of the optimal moment matrix:
/// eigenvectors with eigenvalue below `tol`, row-reduced and rationalized.
pub fn kernel_relations(p: &MomentProblem, sol: &NpaSolution, tol: f64, max_den: u64) -> Result<Vec<NcPoly>> {
    let eig = SymmetricEigen::new(sol.moment_matrix.clone());
    // reversed index order puts pivots on the longest words
    let kernel: Vec<Vec<f64>> = (0..p.dim())
        .filter(|&k| eig.eigenvalues[k] < tol)
        .map(|k| eig.eigenvectors.column(k).iter().rev().copied().collect())
        .collect();
    let words: Vec<Word> = p.index.iter().rev().cloned().collect();
    ncpoly::extract_relations(&kernel, &words, max_den)
}

/// The linear system `F* Y F = target` in the upper-triangular entries of a
/// symmetric `Y`, in reduced row echelon form.
#[derive(Debug, Clone)]
pub struct GramSystem {
    pub alphabet: Alphabet,
    pub basis: Vec<NcPoly>,
    pub lambda: Rational,
    pub target: NcPoly,
    /// `(i, j)` with `i <= j` for each unknown.
    pub pairs: Vec<(usize, usize)>,
    pub rref: Rref,
}

impl GramSystem {
    /// Returns `Infeasible` when no symmetric `Y` satisfies the identity.
    pub fn new(basis: Vec<NcPoly>, alphabet: Alphabet, lambda: Rational, target: NcPoly) -> Result<GramSystem> {
        let n = basis.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let adj: Vec<NcPoly> = basis.iter().map(NcPoly::adjoint).collect();
        let mut rows: BTreeMap<Word, Vec<(usize, Rational)>> = BTreeMap::new();
        for (col, &(i, j)) in pairs.iter().enumerate() {
            let mut g = adj[i].mul(&basis[j])?;
            if i != j {
                g = &g + &adj[j].mul(&basis[i])?;
            }
            for (w, c) in g.terms() {
                rows.entry(w.clone()).or_default().push((col, c.clone()));
            }
        }
        for (w, _) in target.terms() {
            rows.entry(w.clone()).or_default();
        }
        let system: Vec<(Vec<(usize, Rational)>, Rational)> =
            rows.into_iter().map(|(w, row)| (row, target.coeff(&w))).collect();
        let rref = linalg::rref(pairs.len(), &system)?;
        Ok(GramSystem {
            alphabet,
            basis,
            lambda,
            target,
            pairs,
            rref,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn to_matrix<T: Clone>(&self, z: &[T], zero: T) -> Vec<Vec<T>> {
        let n = self.dim();
        let mut y = vec![vec![zero; n]; n];
        for (&(i, j), v) in self.pairs.iter().zip(z) {
            y[i][j] = v.clone();
            y[j][i] = v.clone();
        }
        y
    }

    fn to_dmatrix(&self, z: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        let mut y = DMatrix::zeros(n, n);
        for (&(i, j), v) in self.pairs.iter().zip(z) {
            y[(i, j)] = *v;
            y[(j, i)] = *v;
        }
        y
    }
}

/// `F* Y F = λ - Φ_G` for the game polynomial of `game`.
pub fn gram_system(basis: &[NcPoly], lambda: &Rational, game: &Game) -> Result<GramSystem> {
    let target = &NcPoly::constant(lambda.clone()) - &game_polynomial(game);
    GramSystem::new(basis.to_vec(), Alphabet::of(game), lambda.clone(), target)
}

#[derive(Debug, Clone)]
pub struct FeasibleGram {
    pub system: GramSystem,
    pub y: DMatrix<f64>,
    /// Smallest eigenvalue of `y`; at least the requested epsilon.
    pub min_eigenvalue: f64,
}

/// Finds `Y ⪰ εI` with `F* Y F = λ - Φ_G` by maximizing the smallest
/// eigenvalue over the affine solution set.
pub fn feasibility_sdp(basis: &[NcPoly], lambda: &Rational, epsilon: f64, game: &Game) -> Result<FeasibleGram> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    maximize_min_eigenvalue(gram_system(basis, lambda, game)?, epsilon)
}

pub fn maximize_min_eigenvalue(system: GramSystem, epsilon: f64) -> Result<FeasibleGram> {
    let n = system.dim();
    let y0 = f64s(&system.rref.particular());
    let weights: Vec<f64> = system.pairs.iter().map(|&(i, j)| if i == j { 1.0 } else { 2.0 }).collect();
    let raw: Vec<Vec<f64>> = system.rref.null_space().iter().map(|v| f64s(v)).collect();
    let directions = orthonormalize(&raw, &weights);
    let c = system.to_dmatrix(&y0);
    let mut a: Vec<SymMatrix> = directions
        .iter()
        .map(|z| {
            SymMatrix::Sparse(
                system
                    .pairs
                    .iter()
                    .zip(z)
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(&(i, j), v)| (i, j, -v))
                    .collect(),
            )
        })
        .collect();
    a.push(SymMatrix::Sparse((0..n).map(|i| (i, i, 1.0)).collect()));
    let mut b = vec![0.0; directions.len()];
    b.push(1.0);
    let sol = sdp::solve(&SdpProblem { c, a, b }, SdpOptions::default())?;
    let mut z = y0;
    for (t, d) in sol.y.iter().zip(&directions) {
        for (zv, dv) in z.iter_mut().zip(d) {
            *zv += t * dv;
        }
    }
    let y = system.to_dmatrix(&z);
    let min_eigenvalue = sdp::min_eigenvalue(&y);
    if min_eigenvalue < epsilon {
        return Err(Error::Infeasible);
    }
    Ok(FeasibleGram {
        system,
        y,
        min_eigenvalue,
    })
}

/// Nearest multiple of `1/den`. A shared grid keeps the exact pivot solve
/// free of the huge common denominators independent roundings would produce.
fn on_grid(v: f64, den: u64) -> Result<Rational> {
    let scaled = (v * den as f64).round();
    if den == 0 || !scaled.is_finite() || scaled.abs() > 9.0e15 {
        return Err(Error::RoundingFailed(format!("cannot place {v} on a grid of 1/{den}")));
    }
    Ok(Rational::new(
        num_bigint::BigInt::from(scaled as i64),
        num_bigint::BigInt::from(den),
    ))
}

/// Rounds the free coordinates of `y` to multiples of `1/denom_bound`, solves the pivot coordinates exactly so the identity holds,
/// and accepts the result only if it is a verified positive definite certificate.
pub fn round_certificate(system: &GramSystem, y: &DMatrix<f64>, denom_bound: u64) -> Result<SosCertificate> {
    let n = system.dim();
    if y.nrows() != n || y.ncols() != n {
        return Err(Error::DimensionMismatch(format!("expected a {n}x{n} matrix")));
    }
    let free = system.rref.free_columns();
    let values = free
        .iter()
        .map(|&k| {
            let (i, j) = system.pairs[k];
            on_grid(0.5 * (y[(i, j)] + y[(j, i)]), denom_bound)
        })
        .collect::<Result<Vec<_>>>()?;
    let z = system.rref.solve_with(&values);
    let cert = SosCertificate {
        alphabet: system.alphabet,
        basis: system.basis.clone(),
        y: system.to_matrix(&z, Rational::zero()),
        lambda: system.lambda.clone(),
    };
    if ncpoly::gram_polynomial(&cert.basis, &cert.y)? != system.target {
        return Err(Error::RoundingFailed("rounded matrix misses the identity".into()));
    }
    if !ncpoly::rational_pd_check(&cert.y)? {
        return Err(Error::RoundingFailed("rounded matrix is not positive definite".into()));
    }
    Ok(cert)
}

/// Feasibility program followed by rounding.
pub fn derive_certificate(
    basis: &[NcPoly],
    lambda: &Rational,
    epsilon: f64,
    denom_bound: u64,
    game: &Game,
) -> Result<SosCertificate> {
    let fg = feasibility_sdp(basis, lambda, epsilon, game)?;
    round_certificate(&fg.system, &fg.y, denom_bound)
}

/// Certificate for `ω ≤ λ` over the monomial index of an unconstrained
/// relaxation, with `λ` the solved value plus `margin` rounded up to a
/// multiple of `1/denom_bound`.
pub fn moment_certificate(p: &MomentProblem, sol: &NpaSolution, margin: f64, denom_bound: u64, game: &Game) -> Result<SosCertificate> {
    if p.sync {
        return Err(Error::Invalid("certificates for constrained relaxations are not supported".into()));
    }
    if !(margin > 0.0 && margin.is_finite()) || denom_bound == 0 {
        return Err(Error::Domain("margin and denominator bound must be positive".into()));
    }
    let scaled = ((sol.value + margin) * denom_bound as f64).ceil();
    let lambda = Rational::new(
        num_bigint::BigInt::from(scaled as i64),
        num_bigint::BigInt::from(denom_bound),
    );
    let basis: Vec<NcPoly> = p
        .index
        .iter()
        .map(|w| NcPoly::from_term(w.clone(), Rational::one()))
        .collect();
    let system = gram_system(&basis, &lambda, game)?;
    let fg = maximize_min_eigenvalue(system, 1e-12)?;
    round_certificate(&fg.system, &fg.y, denom_bound)
}
