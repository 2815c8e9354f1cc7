//! Noncommutative polynomials in the projections of two players' measurements.
//!
//! Each measurement with `k` outcomes contributes generators for outcomes
//! `0..k-1`; the last outcome is eliminated through `p_{k-1} = 1 - Σ p_a`, so
//! for Feige's game the letters are `p^x_0, p^x_1` and `⊥` never appears.
//! Words alternate questions within each player, which makes them a basis:
//! two polynomials are equal iff their coefficients are.
//!
//! Text grammar: sums and differences of products of factors, where a factor
//! is a rational literal (`3`, `-1/16` after a sign, `0.25`), `I`, a generator
//! `p<x><a>` / `q<y><b>` (single digits) or `p[x,a]` / `q[y,b]`, or a
//! parenthesized expression. `*` is optional between factors. Naming the
//! eliminated outcome expands it, so `p02` is `I - p00 - p01` in Feige's game.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::Game;
use crate::linalg;
use crate::rational::{self, int, ratio, Rational};
use crate::strategies::{CMatrix, QuantumStrategy};

/// Total word degree allowed in any product.
pub const MAX_DEGREE: usize = 12;
/// Term count allowed in a product before it is refused.
pub const MAX_TERMS: usize = 200_000;
/// Default denominator bound for rationalizing certificates.
pub const DEFAULT_DENOMINATOR: u64 = 1 << 16;
const MAX_NESTING: usize = 64;
const MAX_LITERAL_LEN: usize = 200;

/// Outcome counts per measurement for each player.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    pub alice_answers: usize,
    pub bob_answers: usize,
}

impl Alphabet {
    pub const FEIGE: Alphabet = Alphabet {
        alice_answers: 3,
        bob_answers: 3,
    };

    pub fn of(game: &Game) -> Self {
        Alphabet {
            alice_answers: game.a_size(),
            bob_answers: game.b_size(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub q: u16,
    pub a: u16,
}

impl Letter {
    pub fn new(q: usize, a: usize) -> Self {
        Letter {
            q: q as u16,
            a: a as u16,
        }
    }
}

/// A product `(Alice word) ⊗ (Bob word)`, each alternating in questions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    pub alice: Vec<Letter>,
    pub bob: Vec<Letter>,
}

impl Ord for Word {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree()
            .cmp(&o.degree())
            .then_with(|| o.alice.len().cmp(&self.alice.len()))
            .then_with(|| self.alice.cmp(&o.alice))
            .then_with(|| self.bob.cmp(&o.bob))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

fn is_alternating(w: &[Letter]) -> bool {
    w.windows(2).all(|p| p[0].q != p[1].q)
}

/// Concatenates two alternating words, or `None` if the product vanishes.
fn join(u: &[Letter], v: &[Letter]) -> Option<Vec<Letter>> {
    match (u.last(), v.first()) {
        (Some(l), Some(f)) if l.q == f.q => {
            if l.a != f.a {
                return None;
            }
            let mut out = u.to_vec();
            out.extend_from_slice(&v[1..]);
            Some(out)
        }
        _ => {
            let mut out = u.to_vec();
            out.extend_from_slice(v);
            Some(out)
        }
    }
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn new(alice: Vec<Letter>, bob: Vec<Letter>) -> Result<Self> {
        if !is_alternating(&alice) || !is_alternating(&bob) {
            return Err(Error::Invalid("word repeats a question in adjacent letters".into()));
        }
        Ok(Word { alice, bob })
    }

    pub fn degree(&self) -> usize {
        self.alice.len() + self.bob.len()
    }

    pub fn is_identity(&self) -> bool {
        self.alice.is_empty() && self.bob.is_empty()
    }

    pub fn adjoint(&self) -> Word {
        Word {
            alice: self.alice.iter().rev().copied().collect(),
            bob: self.bob.iter().rev().copied().collect(),
        }
    }

    /// The smaller of the word and its adjoint.
    pub fn canonical(&self) -> Word {
        let adj = self.adjoint();
        if adj < *self {
            adj
        } else {
            self.clone()
        }
    }

    pub fn mul(&self, o: &Word) -> Option<Word> {
        Some(Word {
            alice: join(&self.alice, &o.alice)?,
            bob: join(&self.bob, &o.bob)?,
        })
    }
}

fn fmt_letter(f: &mut fmt::Formatter<'_>, tag: char, l: &Letter) -> fmt::Result {
    if l.q < 10 && l.a < 10 {
        write!(f, "{tag}{}{}", l.q, l.a)
    } else {
        write!(f, "{tag}[{},{}]", l.q, l.a)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for (tag, letters) in [('p', &self.alice), ('q', &self.bob)] {
            for l in letters {
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                fmt_letter(f, tag, l)?;
            }
        }
        Ok(())
    }
}

/// Polynomial with exact rational coefficients, always in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NcPoly {
    terms: BTreeMap<Word, Rational>,
}

impl NcPoly {
    pub fn zero() -> Self {
        NcPoly::default()
    }

    pub fn one() -> Self {
        NcPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        NcPoly::from_term(Word::identity(), c)
    }

    pub fn from_term(w: Word, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        NcPoly { terms }
    }

    fn generator(x: usize, a: usize, answers: usize, bob: bool) -> Result<Self> {
        if a >= answers {
            return Err(Error::Invalid(format!("answer {a} out of range {answers}")));
        }
        if x > u16::MAX as usize || answers > u16::MAX as usize {
            return Err(Error::Invalid("index too large".into()));
        }
        let letter = |a: usize| {
            let l = vec![Letter::new(x, a)];
            if bob {
                Word {
                    alice: vec![],
                    bob: l,
                }
            } else {
                Word {
                    alice: l,
                    bob: vec![],
                }
            }
        };
        if a + 1 < answers {
            return Ok(NcPoly::from_term(letter(a), Rational::one()));
        }
        let mut p = NcPoly::one();
        for b in 0..answers - 1 {
            p.add_term(letter(b), -Rational::one());
        }
        Ok(p)
    }

    /// Alice's projection `p^x_a`, expanded if `a` is the eliminated outcome.
    pub fn alice(x: usize, a: usize, alphabet: Alphabet) -> Result<Self> {
        NcPoly::generator(x, a, alphabet.alice_answers, false)
    }

    /// Bob's projection `q^y_b`, expanded if `b` is the eliminated outcome.
    pub fn bob(y: usize, b: usize, alphabet: Alphabet) -> Result<Self> {
        NcPoly::generator(y, b, alphabet.bob_answers, true)
    }

    pub(crate) fn add_term(&mut self, w: Word, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> Rational {
        self.terms.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Word::identity())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::degree).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> NcPoly {
        if c.is_zero() {
            return NcPoly::zero();
        }
        NcPoly {
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, o: &NcPoly) -> Result<NcPoly> {
        let degree = self.degree() + o.degree();
        if degree > MAX_DEGREE {
            return Err(Error::DegreeCap {
                degree,
                limit: MAX_DEGREE,
            });
        }
        if self.len().saturating_mul(o.len()) > MAX_TERMS * 16 {
            return Err(Error::Invalid("product has too many terms".into()));
        }
        let mut out = NcPoly::zero();
        for (u, c) in &self.terms {
            for (v, d) in &o.terms {
                if let Some(w) = u.mul(v) {
                    out.add_term(w, c * d);
                }
            }
        }
        if out.len() > MAX_TERMS {
            return Err(Error::Invalid("product has too many terms".into()));
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> NcPoly {
        NcPoly {
            terms: self.terms.iter().map(|(w, c)| (w.adjoint(), c.clone())).collect(),
        }
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.adjoint() == *self
    }

    pub fn is_alice_only(&self) -> bool {
        self.terms.keys().all(|w| w.bob.is_empty())
    }

    /// Coefficients keyed by canonical word, merging each word with its adjoint.
    pub fn canonical_coefficients(&self) -> BTreeMap<Word, Rational> {
        let mut out: BTreeMap<Word, Rational> = BTreeMap::new();
        for (w, c) in &self.terms {
            *out.entry(w.canonical()).or_insert_with(Rational::zero) += c;
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    pub fn parse(s: &str, alphabet: Alphabet) -> Result<NcPoly> {
        let mut p = Parser {
            s: s.as_bytes(),
            pos: 0,
            alphabet,
            depth: 0,
        };
        let out = p.expr()?;
        p.ws();
        if p.pos != p.s.len() {
            return Err(Error::parse(p.pos, "trailing input"));
        }
        // accepted polynomials must print back within the literal limit
        if out.terms.values().any(|c| rational::format(c).len() > MAX_LITERAL_LEN) {
            return Err(Error::parse(0, "combined coefficient too long"));
        }
        Ok(out)
    }

    pub fn to_raw(&self) -> Vec<RawTerm> {
        let letters = |w: &[Letter]| w.iter().map(|l| (l.q as usize, l.a as usize)).collect();
        self.terms
            .iter()
            .map(|(w, c)| RawTerm {
                coeff: c.clone(),
                alice: letters(&w.alice),
                bob: letters(&w.bob),
            })
            .collect()
    }

    /// `(π_A ⊗ π_B)(self) |ψ⟩`, returned in the state-matrix layout of
    /// [`QuantumStrategy::state_matrix`].
    pub fn act(&self, s: &QuantumStrategy) -> Result<CMatrix> {
        act_terms(
            self.terms.iter().map(|(w, c)| {
                let l = |v: &[Letter]| v.iter().map(|l| (l.q as usize, l.a as usize)).collect::<Vec<_>>();
                (rational::to_f64(c), l(&w.alice), l(&w.bob))
            }),
            s,
        )
    }

    /// `⟨ψ| (π_A ⊗ π_B)(self) |ψ⟩`.
    pub fn expectation(&self, s: &QuantumStrategy) -> Result<Complex64> {
        let m = s.state_matrix();
        Ok(inner(&m, &self.act(s)?))
    }
}

fn inner(u: &CMatrix, v: &CMatrix) -> Complex64 {
    u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum()
}

fn word_operator(letters: &[(usize, usize)], pvms: &[Vec<CMatrix>], dim: usize) -> Result<CMatrix> {
    let mut m = CMatrix::identity(dim, dim);
    for &(q, a) in letters {
        let p = pvms
            .get(q)
            .and_then(|v| v.get(a))
            .ok_or_else(|| Error::ShapeMismatch(format!("no projection for letter ({q},{a})")))?;
        m *= p;
    }
    Ok(m)
}

fn act_terms<I>(terms: I, s: &QuantumStrategy) -> Result<CMatrix>
where
    I: Iterator<Item = (f64, Vec<(usize, usize)>, Vec<(usize, usize)>)>,
{
    let m = s.state_matrix();
    let mut out = CMatrix::zeros(s.dim_a, s.dim_b);
    for (c, alice, bob) in terms {
        let a = word_operator(&alice, &s.alice, s.dim_a)?;
        let b = word_operator(&bob, &s.bob, s.dim_b)?;
        out += (a * &m * b.transpose()) * Complex64::new(c, 0.0);
    }
    Ok(out)
}

/// A monomial with unrestricted letters, before normalization. Letters may
/// name the eliminated outcome and repeat questions.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTerm {
    pub coeff: Rational,
    pub alice: Vec<(usize, usize)>,
    pub bob: Vec<(usize, usize)>,
}

/// Rewrites raw monomials by idempotence, same-question orthogonality and
/// elimination of the last outcome.
pub fn normal_form(raw: &[RawTerm], alphabet: Alphabet) -> Result<NcPoly> {
    let mut out = NcPoly::zero();
    for t in raw {
        let mut p = NcPoly::constant(t.coeff.clone());
        for &(x, a) in &t.alice {
            p = p.mul(&NcPoly::alice(x, a, alphabet)?)?;
        }
        for &(y, b) in &t.bob {
            p = p.mul(&NcPoly::bob(y, b, alphabet)?)?;
        }
        out = &out + &p;
    }
    Ok(out)
}

/// `⟨ψ| (π_A ⊗ π_B)(Σ raw) |ψ⟩` with every letter taken literally.
pub fn raw_expectation(raw: &[RawTerm], s: &QuantumStrategy) -> Result<Complex64> {
    let v = act_terms(
        raw.iter()
            .map(|t| (rational::to_f64(&t.coeff), t.alice.clone(), t.bob.clone())),
        s,
    )?;
    Ok(inner(&s.state_matrix(), &v))
}

impl Add for &NcPoly {
    type Output = NcPoly;
    fn add(self, o: &NcPoly) -> NcPoly {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &NcPoly {
    type Output = NcPoly;
    fn sub(self, o: &NcPoly) -> NcPoly {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &NcPoly {
    type Output = NcPoly;
    fn neg(self) -> NcPoly {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if k == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if c.is_negative() { " - " } else { " + " })?;
            }
            if w.is_identity() {
                write!(f, "{}", rational::format(&mag))?;
            } else if mag.is_one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "{} {w}", rational::format(&mag))?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    alphabet: Alphabet,
    depth: usize,
}

impl Parser<'_> {
    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<NcPoly> {
        let mut acc = NcPoly::zero();
        let mut neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        loop {
            let t = self.term()?;
            acc = if neg { &acc - &t } else { &acc + &t };
            match self.peek() {
                Some(b'+') => neg = false,
                Some(b'-') => neg = true,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<NcPoly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                }
                Some(c) if c.is_ascii_digit() || matches!(c, b'p' | b'q' | b'I' | b'(') => {}
                _ => return Ok(acc),
            }
            let f = self.factor()?;
            acc = acc.mul(&f).map_err(|e| Error::parse(self.pos, e.to_string()))?;
        }
    }

    fn factor(&mut self) -> Result<NcPoly> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(b'I') => {
                self.pos += 1;
                Ok(NcPoly::one())
            }
            Some(tag @ (b'p' | b'q')) => {
                self.pos += 1;
                let (x, a) = self.indices()?;
                let r = if tag == b'p' {
                    NcPoly::alice(x, a, self.alphabet)
                } else {
                    NcPoly::bob(x, a, self.alphabet)
                };
                r.map_err(|e| Error::parse(start, e.to_string()))
            }
            Some(b'(') => {
                if self.depth >= MAX_NESTING {
                    return Err(Error::parse(self.pos, "parentheses nested too deeply"));
                }
                self.pos += 1;
                self.depth += 1;
                let e = self.expr()?;
                self.depth -= 1;
                if self.peek() != Some(b')') {
                    return Err(Error::parse(self.pos, "expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(_) => Err(Error::parse(self.pos, "expected a factor")),
            None => Err(Error::parse(self.pos, "unexpected end of input")),
        }
    }

    fn digits(&mut self) -> &[u8] {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        &self.s[start..self.pos]
    }

    fn number(&mut self) -> Result<NcPoly> {
        let start = self.pos;
        self.digits();
        if self.pos < self.s.len() && matches!(self.s[self.pos], b'/' | b'.') {
            self.pos += 1;
            if self.digits().is_empty() {
                return Err(Error::parse(self.pos, "malformed rational literal"));
            }
        }
        if self.pos - start > MAX_LITERAL_LEN {
            return Err(Error::parse(start, "rational literal too long"));
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        let c = rational::parse(text).map_err(|_| Error::parse(start, format!("bad literal {text:?}")))?;
        Ok(NcPoly::constant(c))
    }

    fn small(&mut self) -> Result<usize> {
        let at = self.pos;
        let d = self.digits();
        if d.is_empty() || d.len() > 5 {
            return Err(Error::parse(at, "expected an index"));
        }
        let v: usize = std::str::from_utf8(d).expect("ascii digits").parse().expect("digits");
        if v > u16::MAX as usize {
            return Err(Error::parse(at, "index too large"));
        }
        Ok(v)
    }

    fn indices(&mut self) -> Result<(usize, usize)> {
        if self.s.get(self.pos) == Some(&b'[') {
            self.pos += 1;
            self.ws();
            let x = self.small()?;
            if self.peek() != Some(b',') {
                return Err(Error::parse(self.pos, "expected ','"));
            }
            self.pos += 1;
            self.ws();
            let a = self.small()?;
            if self.peek() != Some(b']') {
                return Err(Error::parse(self.pos, "expected ']'"));
            }
            self.pos += 1;
            return Ok((x, a));
        }
        let digit = |p: &mut Self| -> Result<usize> {
            match p.s.get(p.pos) {
                Some(c) if c.is_ascii_digit() => {
                    p.pos += 1;
                    Ok((c - b'0') as usize)
                }
                _ => Err(Error::parse(p.pos, "expected a digit")),
            }
        };
        let x = digit(self)?;
        let a = digit(self)?;
        Ok((x, a))
    }
}

/// `Σ π(x,y) V(a,b|x,y) p^x_a ⊗ q^y_b` in normal form.
pub fn game_polynomial(game: &Game) -> NcPoly {
    let (xs, ys, as_, bs) = game.sizes();
    let (ea, eb) = (as_ - 1, bs - 1);
    let mut out = NcPoly::zero();
    let v = |a, b, x, y| if game.wins(a, b, x, y) { 1i64 } else { 0 };
    let lone = |q: usize, a: usize, bob: bool| {
        let l = vec![Letter::new(q, a)];
        if bob {
            Word {
                alice: vec![],
                bob: l,
            }
        } else {
            Word {
                alice: l,
                bob: vec![],
            }
        }
    };
    for x in 0..xs {
        for y in 0..ys {
            let pi = game.prior(x, y);
            if pi.is_zero() {
                continue;
            }
            let pi = pi.clone();
            let vee = v(ea, eb, x, y);
            out.add_term(Word::identity(), &pi * int(vee));
            for a in 0..ea {
                out.add_term(lone(x, a, false), &pi * int(v(a, eb, x, y) - vee));
            }
            for b in 0..eb {
                out.add_term(lone(y, b, true), &pi * int(v(ea, b, x, y) - vee));
            }
            for a in 0..ea {
                for b in 0..eb {
                    let c = v(a, b, x, y) - v(ea, b, x, y) - v(a, eb, x, y) + vee;
                    let w = Word {
                        alice: vec![Letter::new(x, a)],
                        bob: vec![Letter::new(y, b)],
                    };
                    out.add_term(w, &pi * int(c));
                }
            }
        }
    }
    out
}

const BASIS_TEXT: [&str; 32] = [
    "p00*p11*p00 - 1/16 p00",
    "p01*p11*p01 - 9/16 p01",
    "p10*p01*p10 - 1/16 p10",
    "p11*p01*p11 - 9/16 p11",
    "p00*p10*p00 - 9/16 p00",
    "p10*p00*p10 - 9/16 p10",
    "p01*p10*p01 - 1/16 p01",
    "p11*p00*p11 - 1/16 p11",
    "3/4 p10*p01 + 3/4 p01*p10 + 5/4 p01*p11 + 5/4 p11*p01 + 5/16 p00 - 3/8 p10 - 9/16 p01 - 15/8 p11 + q00",
    "3/4 p10*p01 + 3/4 p01*p10 + 5/4 p01*p11 + 5/4 p11*p01 - 3/16 p00 + 1/8 p10 - 33/16 p01 - 3/8 p11 + q01",
    "3/4 p10*p01 + 3/4 p01*p10 + 5/4 p01*p11 + 5/4 p11*p01 + 9/16 p00 - 9/8 p10 - 13/16 p01 - 9/8 p11 + q10",
    "3/4 p10*p01 + 3/4 p01*p10 + 5/4 p01*p11 + 5/4 p11*p01 - 15/16 p00 + 3/8 p10 - 21/16 p01 - 5/8 p11 + q11",
    "I + 2/3 p10*p01 + 2/3 p01*p10 + 2 p01*p11 + 2 p11*p01 - 1/2 p00 - 2/3 p10 - 13/6 p01 - 2 p11",
    "p00*q00 - 3/8 p10*p01 - 3/4 p01*p10 + 3/4 p11*p00 + 1/8 p11*p01 - 5/32 p00 + 3/16 p10 + 3/32 p01 - 3/16 p11",
    "p00*q10 + 3/8 p10*p01 + 9/4 p01*p10 - 9/4 p11*p00 - 5/8 p11*p01 + 9/32 p00 - 9/16 p10 - 3/32 p01 + 9/16 p11",
    "p10*q00 + 9/8 p10*p01 + 15/8 p01*p10 + 5/8 p01*p11 - 15/8 p11*p00 + 15/32 p00 - 9/16 p10 - 15/32 p01",
    "p10*q10 + 7/8 p10*p01 + 21/8 p01*p10 + 7/8 p01*p11 - 21/8 p11*p00 + 21/32 p00 - 21/16 p10 - 21/32 p01",
    "p00*q01 + 9/8 p10*p01 - 3/4 p01*p10 + 3/4 p11*p00 + 5/8 p11*p01 - 9/32 p00 + 3/16 p10 - 9/32 p01 - 3/16 p11",
    "p00*q11 + 7/8 p10*p01 - 7/4 p01*p10 + 7/4 p11*p00 + 7/8 p11*p01 - 35/32 p00 + 7/16 p10 - 7/32 p01 - 7/16 p11",
    "p10*q01 - 3/8 p10*p01 + 3/8 p01*p10 + 1/8 p01*p11 - 3/8 p11*p00 + 3/32 p00 - 1/16 p10 - 3/32 p01",
    "p10*q11 + 3/8 p10*p01 - 15/8 p01*p10 - 5/8 p01*p11 + 15/8 p11*p00 - 15/32 p00 + 3/16 p10 + 15/32 p01",
    "p01*q00 + 3/8 p01*p10 - 5/8 p01*p11 + 3/16 p01",
    "p01*q10 - 3/8 p01*p10 + 1/8 p01*p11 - 1/16 p01",
    "p11*q00 + 7/8 p11*p00 + 7/8 p11*p01 - 21/16 p11",
    "p11*q10 + 9/8 p11*p00 + 5/8 p11*p01 - 9/16 p11",
    "p01*q01 + 7/8 p01*p10 + 7/8 p01*p11 - 21/16 p01",
    "p01*q11 + 9/8 p01*p10 + 5/8 p01*p11 - 9/16 p01",
    "p11*q01 + 3/8 p11*p00 - 5/8 p11*p01 + 3/16 p11",
    "p11*q11 - 3/8 p11*p00 + 1/8 p11*p01 - 1/16 p11",
    "p00*p10 + 3 p01*p10 - 3 p11*p00 - p11*p01 - 3/4 p10 + 3/4 p11",
    "p10*p00 - 3 p01*p10 - p01*p11 + 3 p11*p00 - 3/4 p00 + 3/4 p01",
    "p00*p11 - p10*p01 - p01*p10 + p11*p00 - 1/4 p00 + 1/4 p10 + 1/4 p01 - 1/4 p11",
];

/// The 32 basis polynomials of the Feige sum-of-squares decomposition.
pub fn certificate_basis() -> Vec<NcPoly> {
    BASIS_TEXT
        .iter()
        .map(|s| NcPoly::parse(s, Alphabet::FEIGE).expect("basis literal parses"))
        .collect()
}

const ANTICOMMUTATORS: &str = "-3/4 (p01*p10 + p10*p01) - 5/4 (p01*p11 + p11*p01)";
const GAMMA_LINEAR: [&str; 4] = [
    "- 5/16 p00 + 3/8 p10 + 9/16 p01 + 15/8 p11",
    "+ 3/16 p00 - 1/8 p10 + 33/16 p01 + 3/8 p11",
    "- 9/16 p00 + 9/8 p10 + 13/16 p01 + 9/8 p11",
    "+ 15/16 p00 - 3/8 p10 + 21/16 p01 + 5/8 p11",
];

/// Alice-side polynomials `γ^y_b` simulating Bob's projections, indexed
/// `3y + b` with `b = 2` the eliminated outcome.
pub fn gamma_polynomials() -> Vec<NcPoly> {
    let mut out = Vec::with_capacity(6);
    for y in 0..2 {
        let g: Vec<NcPoly> = (0..2)
            .map(|b| {
                let s = format!("{ANTICOMMUTATORS} {}", GAMMA_LINEAR[2 * y + b]);
                NcPoly::parse(&s, Alphabet::FEIGE).expect("gamma literal parses")
            })
            .collect();
        let rest = &(&NcPoly::one() - &g[0]) - &g[1];
        out.extend(g);
        out.push(rest);
    }
    out
}

/// The overlap matrix of the optimal Feige measurements; rows and columns are
/// ordered `0, 1, ⊥`.
pub fn feige_nu() -> Vec<Vec<Rational>> {
    vec![
        vec![ratio(9, 16), ratio(1, 16), ratio(3, 8)],
        vec![ratio(1, 16), ratio(9, 16), ratio(3, 8)],
        vec![ratio(3, 8), ratio(3, 8), ratio(1, 4)],
    ]
}

pub fn check_nu(nu: &[Vec<Rational>]) -> Result<()> {
    let n = nu.len();
    if n == 0 || nu.iter().any(|r| r.len() != n) {
        return Err(Error::BadNu("matrix must be square and nonempty".into()));
    }
    for i in 0..n {
        for j in 0..i {
            if nu[i][j] != nu[j][i] {
                return Err(Error::BadNu(format!("entries ({i},{j}) and ({j},{i}) differ")));
            }
        }
        let s: Rational = nu[i].iter().sum();
        if !s.is_one() {
            return Err(Error::BadNu(format!("row {i} sums to {s}")));
        }
    }
    Ok(())
}

/// `p^x_a p^{1-x}_{a'} p^x_a - ν_{aa'} p^x_a` for `x ∈ {0,1}` and
/// `a, a' ∈ {0,1,⊥}`, ordered by `(x, a, a')`.
pub fn relation_set(nu: &[Vec<Rational>]) -> Result<Vec<NcPoly>> {
    check_nu(nu)?;
    if nu.len() != 3 {
        return Err(Error::BadNu("expected a 3x3 matrix".into()));
    }
    let mut out = Vec::with_capacity(18);
    for x in 0..2 {
        for a in 0..3 {
            let p = NcPoly::alice(x, a, Alphabet::FEIGE)?;
            for a2 in 0..3 {
                let q = NcPoly::alice(1 - x, a2, Alphabet::FEIGE)?;
                let r = p.mul(&q)?.mul(&p)?;
                out.push(&r - &p.scale(&nu[a][a2]));
            }
        }
    }
    Ok(out)
}

/// Claimed identity `F* Y F = λ - Φ_G` with `Y` positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct SosCertificate {
    pub alphabet: Alphabet,
    pub basis: Vec<NcPoly>,
    pub y: Vec<Vec<Rational>>,
    pub lambda: Rational,
}

#[derive(Debug, Serialize, Deserialize)]
struct CertificateJson {
    lambda: String,
    basis: Vec<String>,
    #[serde(rename = "Y")]
    y: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    answers: Option<[usize; 2]>,
}

impl SosCertificate {
    pub fn to_json(&self) -> String {
        let j = CertificateJson {
            lambda: rational::format(&self.lambda),
            basis: self.basis.iter().map(ToString::to_string).collect(),
            y: self.y.iter().map(|r| r.iter().map(rational::format).collect()).collect(),
            answers: (self.alphabet != Alphabet::FEIGE)
                .then_some([self.alphabet.alice_answers, self.alphabet.bob_answers]),
        };
        serde_json::to_string_pretty(&j).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: CertificateJson = serde_json::from_str(s)?;
        let alphabet = match j.answers {
            Some([a, b]) if a >= 1 && b >= 1 && a <= u16::MAX as usize && b <= u16::MAX as usize => Alphabet {
                alice_answers: a,
                bob_answers: b,
            },
            Some(_) => return Err(Error::Invalid("answer counts out of range".into())),
            None => Alphabet::FEIGE,
        };
        let basis = j
            .basis
            .iter()
            .map(|p| NcPoly::parse(p, alphabet))
            .collect::<Result<Vec<_>>>()?;
        let y = j
            .y
            .iter()
            .map(|r| r.iter().map(|v| rational::parse(v)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(SosCertificate {
            alphabet,
            basis,
            y,
            lambda: rational::parse(&j.lambda)?,
        })
    }
}

/// `Σ_ij Y_ij F_i* F_j`, summed over rows in parallel and merged in order.
pub fn gram_polynomial(basis: &[NcPoly], y: &[Vec<Rational>]) -> Result<NcPoly> {
    let n = basis.len();
    if y.len() != n || y.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "Y must be {n}x{n} to match the basis"
        )));
    }
    let adj: Vec<NcPoly> = basis.iter().map(NcPoly::adjoint).collect();
    let rows: Vec<Result<NcPoly>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = NcPoly::zero();
            for j in 0..n {
                if !y[i][j].is_zero() {
                    acc = &acc + &adj[i].mul(&basis[j])?.scale(&y[i][j]);
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = NcPoly::zero();
    for r in rows {
        total = &total + &r?;
    }
    Ok(total)
}

/// `F* Y F - (λ - Φ_G)`; zero exactly when the identity holds.
pub fn sos_residual(cert: &SosCertificate, game: &Game) -> Result<NcPoly> {
    if Alphabet::of(game) != cert.alphabet {
        return Err(Error::DimensionMismatch("certificate alphabet does not match the game".into()));
    }
    let lhs = gram_polynomial(&cert.basis, &cert.y)?;
    let rhs = &NcPoly::constant(cert.lambda.clone()) - &game_polynomial(game);
    Ok(&lhs - &rhs)
}

pub fn sos_verify(cert: &SosCertificate, game: &Game) -> Result<bool> {
    if !sos_residual(cert, game)?.is_zero() {
        return Ok(false);
    }
    match rational_pd_check(&cert.y) {
        Ok(pd) => Ok(pd),
        Err(Error::NotSymmetric) => Ok(false),
        Err(e) => Err(e),
    }
}

pub fn rational_pd_check(y: &[Vec<Rational>]) -> Result<bool> {
    linalg::is_positive_definite(y)
}

/// Turns numerically computed kernel vectors (coordinates over `monomials`)
/// into exact polynomials: row-reduce, drop entries below `1e-7`, and
/// rationalize the rest with denominators at most `max_den`.
pub fn extract_relations(kernel: &[Vec<f64>], monomials: &[Word], max_den: u64) -> Result<Vec<NcPoly>> {
    if kernel.iter().any(|v| v.len() != monomials.len()) {
        return Err(Error::DimensionMismatch("kernel vectors must match the monomial list".into()));
    }
    let reduced = linalg::rref_f64(kernel.to_vec(), 1e-7);
    let mut out = Vec::with_capacity(reduced.len());
    for row in reduced {
        let mut p = NcPoly::zero();
        for (v, w) in row.iter().zip(monomials) {
            if *v != 0.0 {
                p.add_term(w.clone(), rational::rationalize(*v, max_den)?);
            }
        }
        if !p.is_zero() {
            out.push(p);
        }
    }
    Ok(out)
}

/// Evaluates Alice-only polynomials on Alice's side of a strategy.
pub fn alice_operator(p: &NcPoly, s: &QuantumStrategy) -> Result<CMatrix> {
    if !p.is_alice_only() {
        return Err(Error::Invalid("polynomial involves Bob's generators".into()));
    }
    let mut out = DMatrix::zeros(s.dim_a, s.dim_a);
    for (w, c) in p.terms() {
        let letters: Vec<(usize, usize)> = w.alice.iter().map(|l| (l.q as usize, l.a as usize)).collect();
        out += word_operator(&letters, &s.alice, s.dim_a)? * Complex64::new(rational::to_f64(c), 0.0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game;
    use proptest::prelude::*;

    fn fp(s: &str) -> NcPoly {
        NcPoly::parse(s, Alphabet::FEIGE).unwrap()
    }

    #[test]
    fn rewrite_rules() {
        assert_eq!(fp("p00*p00"), fp("p00"));
        assert!(fp("p00*p01").is_zero());
        assert_eq!(fp("p00 + p01 + p02"), NcPoly::one());
        assert_eq!(fp("p02*p02"), fp("p02"));
        assert!(fp("p02*p00").is_zero());
        assert_eq!(fp("q12"), fp("I - q10 - q11"));
        // players commute
        assert_eq!(fp("q00*p11"), fp("p11*q00"));
    }

    #[test]
    fn adjoint_reverses() {
        assert_eq!(fp("p00*p11").adjoint(), fp("p11*p00"));
        let p = fp("2 p00*p11*q10*q01 - 1/3 p10");
        assert_eq!(p.adjoint().adjoint(), p);
        assert_eq!(p.adjoint(), fp("2 p11*p00*q01*q10 - 1/3 p10"));
    }

    #[test]
    fn display_round_trips() {
        for s in BASIS_TEXT {
            let p = fp(s);
            assert_eq!(fp(&p.to_string()), p, "{s}");
        }
        assert_eq!(NcPoly::zero().to_string(), "0");
        assert_eq!(fp("-1/2 I + p00").to_string(), "-1/2 + p00");
        let big = NcPoly::parse("p[12,3]*q[0,1]", Alphabet { alice_answers: 5, bob_answers: 3 }).unwrap();
        assert_eq!(big.to_string(), "p[12,3]*q01");
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "p0", "p03", "p00 +", "(p00", "p00 ** p11", "1/0 p00", "x", "p[1 2]", "3."] {
            assert!(matches!(NcPoly::parse(bad, Alphabet::FEIGE), Err(Error::Parse { .. })), "{bad:?}");
        }
        let deep = format!("{}p00{}", "(".repeat(100), ")".repeat(100));
        assert!(NcPoly::parse(&deep, Alphabet::FEIGE).is_err());
        let long = vec!["(p00 + p10)"; 13].join("*");
        assert!(NcPoly::parse(&long, Alphabet::FEIGE).is_err());
    }

    #[test]
    fn feige_game_polynomial() {
        let phi = game_polynomial(&game::feige());
        assert!(phi.is_self_adjoint());
        // hand expansion of the (x,y) = (0,0) block:
        // 1/4 [(1 - p00 - p01) q00 + p00 (1 - q00 - q01)]
        let q00 = Word {
            alice: vec![],
            bob: vec![Letter::new(0, 0)],
        };
        assert_eq!(phi.coeff(&q00), ratio(1, 4));
        let p00q00 = Word {
            alice: vec![Letter::new(0, 0)],
            bob: vec![Letter::new(0, 0)],
        };
        assert_eq!(phi.coeff(&p00q00), ratio(-1, 2));
        assert_eq!(phi.constant_term(), int(0));
        let all_true = Game::from_fn((1, 1, 2, 2), |_, _| int(1), |_, _, _, _| true).unwrap();
        assert_eq!(game_polynomial(&all_true), NcPoly::one());
    }

    #[test]
    fn certificate_basis_shape() {
        let f = certificate_basis();
        assert_eq!(f.len(), 32);
        assert_eq!(f[0].len(), 2);
        assert_eq!(f[0].coeff(&Word { alice: vec![Letter::new(0, 0)], bob: vec![] }), ratio(-1, 16));
        assert_eq!(f[12].constant_term(), int(1));
        for p in &f {
            assert_eq!(normal_form(&p.to_raw(), Alphabet::FEIGE).unwrap(), *p);
        }
    }

    #[test]
    fn gamma_properties() {
        let g = gamma_polynomials();
        assert_eq!(g.len(), 6);
        for y in 0..2 {
            let s = &(&g[3 * y] + &g[3 * y + 1]) + &g[3 * y + 2];
            assert_eq!(s, NcPoly::one());
        }
        assert!(g.iter().all(NcPoly::is_self_adjoint));
        let p11 = Word {
            alice: vec![Letter::new(1, 1)],
            bob: vec![],
        };
        assert_eq!(g[0].coeff(&p11), ratio(15, 8));
        // the basis rows 9..12 are q^y_b - γ^y_b
        let f = certificate_basis();
        for (k, (y, b)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
            let q = NcPoly::bob(y, b, Alphabet::FEIGE).unwrap();
            assert_eq!(f[8 + k], &q - &g[3 * y + b]);
        }
    }

    #[test]
    fn relations() {
        let r = relation_set(&feige_nu()).unwrap();
        assert_eq!(r.len(), 18);
        assert!(r.iter().all(NcPoly::is_self_adjoint));
        // p⁰_⊥ p¹_⊥ p⁰_⊥ - 1/4 p⁰_⊥ has degree three after expansion
        assert_eq!(r[8].degree(), 3);
        assert_eq!(r[1], fp("p00*p11*p00 - 1/16 p00"));
        let mut bad = feige_nu();
        bad[0][1] = ratio(1, 8);
        assert!(matches!(relation_set(&bad), Err(Error::BadNu(_))));
    }

    #[test]
    fn sos_rejections() {
        let g = game::feige();
        let f = certificate_basis();
        let zero = vec![vec![int(0); 32]; 32];
        let c = SosCertificate {
            alphabet: Alphabet::FEIGE,
            basis: f.clone(),
            y: zero,
            lambda: ratio(9, 16),
        };
        assert!(!sos_verify(&c, &g).unwrap());
        let one = SosCertificate {
            alphabet: Alphabet::FEIGE,
            basis: vec![NcPoly::one()],
            y: vec![vec![int(1)]],
            lambda: ratio(9, 16),
        };
        assert!(!sos_verify(&one, &g).unwrap());
        let wrong = SosCertificate {
            y: vec![vec![int(1); 2]],
            ..one.clone()
        };
        assert!(matches!(sos_verify(&wrong, &g), Err(Error::DimensionMismatch(_))));
        // an all-true game is certified at λ = 1 by the empty sum
        let all_true = Game::from_fn((1, 1, 3, 3), |_, _| int(1), |_, _, _, _| true).unwrap();
        let trivial = SosCertificate {
            lambda: int(1),
            y: vec![vec![int(1)]],
            basis: vec![NcPoly::zero()],
            alphabet: Alphabet::FEIGE,
        };
        assert!(sos_verify(&trivial, &all_true).unwrap());
    }

    #[test]
    fn certificate_json_round_trip() {
        let c = SosCertificate {
            alphabet: Alphabet::FEIGE,
            basis: certificate_basis()[..2].to_vec(),
            y: vec![vec![int(1), ratio(1, 3)], vec![ratio(1, 3), int(2)]],
            lambda: ratio(9, 16),
        };
        let back = SosCertificate::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn pd_check() {
        assert!(rational_pd_check(&[vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap());
        assert!(!rational_pd_check(&[vec![int(1), int(2)], vec![int(2), int(1)]]).unwrap());
    }

    #[test]
    fn extraction() {
        let w = |a: &[(usize, usize)]| Word {
            alice: a.iter().map(|&(q, x)| Letter::new(q, x)).collect(),
            bob: vec![],
        };
        let monos = vec![w(&[]), w(&[(0, 0)]), w(&[(1, 0)])];
        assert!(extract_relations(&[], &monos, 100).unwrap().is_empty());
        let one = extract_relations(&[vec![0.0, 1.0, 0.0]], &monos, 100).unwrap();
        assert_eq!(one, vec![fp("p00")]);
        let noisy = extract_relations(&[vec![0.5 + 1e-9, -0.25, 1e-9]], &monos, 100).unwrap();
        assert_eq!(noisy, vec![fp("I - 1/2 p00")]);
    }

    fn raw_strategy(alice_len: usize, bob_len: usize) -> impl Strategy<Value = Vec<RawTerm>> {
        let letter = (0usize..2, 0usize..3);
        let term = (
            -5i64..6,
            prop::collection::vec(letter.clone(), 0..=alice_len),
            prop::collection::vec(letter, 0..=bob_len),
        )
            .prop_map(|(c, alice, bob)| RawTerm {
                coeff: int(c),
                alice,
                bob,
            });
        prop::collection::vec(term, 0..5)
    }

    proptest! {
        #[test]
        fn normal_form_is_idempotent(raw in raw_strategy(3, 2)) {
            let n = normal_form(&raw, Alphabet::FEIGE).unwrap();
            prop_assert_eq!(normal_form(&n.to_raw(), Alphabet::FEIGE).unwrap(), n.clone());
            prop_assert_eq!(NcPoly::parse(&n.to_string(), Alphabet::FEIGE).unwrap(), n);
        }

        // factors of degree at most 3 keep triple products under the cap
        #[test]
        fn multiplication_is_associative(a in raw_strategy(2, 1), b in raw_strategy(2, 1), c in raw_strategy(2, 1)) {
            let (a, b, c) = (
                normal_form(&a, Alphabet::FEIGE).unwrap(),
                normal_form(&b, Alphabet::FEIGE).unwrap(),
                normal_form(&c, Alphabet::FEIGE).unwrap(),
            );
            let l = a.mul(&b).unwrap().mul(&c).unwrap();
            let r = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
            prop_assert_eq!(a.mul(&b).unwrap().adjoint(), b.adjoint().mul(&a.adjoint()).unwrap());
        }
    }
}
