//! Plain-text LP format.
//!
//! ```text
//! # comment
//! vars 3
//! max 1/4 x0 + x2
//! row x0 + x1 - 2 x2 <= 1
//! row x0 = 1/3
//! free x1
//! ```
//!
//! One statement per line: `vars N` must come first; `max EXPR` sets the
//! objective (at most once); `row EXPR REL RHS` adds a constraint with
//! `REL` one of `<=`, `=`, `>=`; `free x_i ...` marks variables free (all
//! others are nonnegative). `EXPR` is `0` or a sum of terms `[+|-] [COEF] x<i>`
//! with `COEF` a rational literal (`3`, `-2/5`, `0.25`).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Zero};

use super::{LpProblem, Relation, VarKind};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Variable counts above this are rejected by the parser.
const MAX_VARS: usize = 2_000_000;

pub fn to_text(p: &LpProblem) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "vars {}", p.num_vars());
    let _ = writeln!(s, "max {}", expr_text(p.objective.iter().enumerate().map(|(j, c)| (j, c))));
    for c in &p.constraints {
        let _ = writeln!(
            s,
            "row {} {} {}",
            expr_text(c.coeffs.iter().map(|(j, v)| (*j, v))),
            c.rel.symbol(),
            rational::format(&c.rhs)
        );
    }
    let free: Vec<String> = p
        .kinds
        .iter()
        .enumerate()
        .filter(|(_, k)| **k == VarKind::Free)
        .map(|(j, _)| format!("x{j}"))
        .collect();
    if !free.is_empty() {
        let _ = writeln!(s, "free {}", free.join(" "));
    }
    s
}

fn expr_text<'a>(terms: impl Iterator<Item = (usize, &'a Rational)>) -> String {
    let mut out = String::new();
    for (j, c) in terms {
        if c.is_zero() {
            continue;
        }
        let neg = c < &Rational::zero();
        let mag = if neg { -c.clone() } else { c.clone() };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !mag.is_one() {
            let _ = write!(out, "{} ", rational::format(&mag));
        }
        let _ = write!(out, "x{j}");
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

struct Cursor<'a> {
    line: &'a str,
    pos: usize,
    base: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.line[self.pos..].starts_with([' ', '\t']) {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.line.len()
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.base + self.pos, msg)
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.line[start..];
        let len = rest
            .find(|c: char| c.is_whitespace() || "+-<>=".contains(c))
            .unwrap_or(rest.len());
        self.pos += len;
        &self.line[start..start + len]
    }

    fn var(&mut self, nvars: usize) -> Result<usize> {
        let w = self.word();
        let idx = w
            .strip_prefix('x')
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|d| d.parse::<usize>().ok())
            .ok_or_else(|| self.err(format!("expected variable, found {w:?}")))?;
        if idx >= nvars {
            return Err(self.err(format!("variable x{idx} out of range")));
        }
        Ok(idx)
    }

    /// Parses an expression, stopping before a relation symbol or end of line.
    fn expr(&mut self, nvars: usize) -> Result<BTreeMap<usize, Rational>> {
        let mut out = BTreeMap::new();
        let mut first = true;
        loop {
            self.skip_ws();
            let rest = &self.line[self.pos..];
            if rest.is_empty() || rest.starts_with(['<', '>', '=']) {
                if first {
                    return Err(self.err("empty expression"));
                }
                return Ok(out);
            }
            let mut sign = Rational::one();
            if rest.starts_with('+') || rest.starts_with('-') {
                if rest.starts_with('-') {
                    sign = -sign;
                }
                self.pos += 1;
            } else if !first {
                return Err(self.err("expected '+' or '-'"));
            }
            self.skip_ws();
            let rest = &self.line[self.pos..];
            if rest.starts_with('x') {
                let j = self.var(nvars)?;
                *out.entry(j).or_insert_with(Rational::zero) += sign;
            } else {
                let at = self.pos;
                let w = self.word();
                let c = rational::parse(w).map_err(|_| Error::parse(self.base + at, format!("bad coefficient {w:?}")))?;
                if self.at_end() || self.line[self.pos..].starts_with(['<', '>', '=', '+', '-']) {
                    if first && c.is_zero() && out.is_empty() {
                        first = false;
                        continue;
                    }
                    return Err(self.err("coefficient must be followed by a variable"));
                }
                let j = self.var(nvars)?;
                *out.entry(j).or_insert_with(Rational::zero) += sign * c;
            }
            first = false;
        }
    }
}

pub fn parse_text(text: &str) -> Result<LpProblem> {
    let mut problem: Option<LpProblem> = None;
    let mut has_objective = false;
    let mut base = 0;
    for raw in text.split_inclusive('\n') {
        let line_base = base;
        base += raw.len();
        let line = raw.split('#').next().unwrap_or("").trim_end();
        let mut cur = Cursor {
            line,
            pos: 0,
            base: line_base,
        };
        if cur.at_end() {
            continue;
        }
        let kw = cur.word();
        match (kw, problem.as_mut()) {
            ("vars", None) => {
                let w = cur.word();
                let n: usize = w.parse().map_err(|_| cur.err(format!("bad variable count {w:?}")))?;
                if n > MAX_VARS {
                    return Err(cur.err("too many variables"));
                }
                problem = Some(LpProblem::new(n));
            }
            ("vars", Some(_)) => return Err(cur.err("duplicate 'vars'")),
            (_, None) => return Err(cur.err("'vars' must come first")),
            ("max", Some(p)) => {
                if has_objective {
                    return Err(cur.err("duplicate objective"));
                }
                has_objective = true;
                for (j, c) in cur.expr(p.num_vars())? {
                    p.objective[j] = c;
                }
            }
            ("row", Some(p)) => {
                let e = cur.expr(p.num_vars())?;
                cur.skip_ws();
                let rest = &cur.line[cur.pos..];
                let rel = if rest.starts_with("<=") {
                    cur.pos += 2;
                    Relation::Le
                } else if rest.starts_with(">=") {
                    cur.pos += 2;
                    Relation::Ge
                } else if rest.starts_with('=') {
                    cur.pos += 1;
                    Relation::Eq
                } else {
                    return Err(cur.err("expected relation"));
                };
                cur.skip_ws();
                let at = cur.pos;
                let rhs = rational::parse(&cur.line[cur.pos..])
                    .map_err(|_| Error::parse(line_base + at, "bad right-hand side"))?;
                let coeffs = e.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                p.add(coeffs, rel, rhs);
                continue;
            }
            ("free", Some(p)) => {
                while !cur.at_end() {
                    let j = cur.var(p.num_vars())?;
                    p.kinds[j] = VarKind::Free;
                }
            }
            (other, Some(_)) => return Err(cur.err(format!("unknown statement {other:?}"))),
        }
        if !cur.at_end() {
            return Err(cur.err("trailing input"));
        }
    }
    problem.ok_or_else(|| Error::parse(0, "missing 'vars'"))
}
