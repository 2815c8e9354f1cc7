//! Linear programs with exact rational data, an exact simplex, a floating
//! revised simplex, and the non-signalling value of a game.

mod exact;
mod float;
mod ns;
mod text;

pub use exact::{solve_exact, Pricing};
pub use float::solve_float;
pub use ns::{ns_lp, ns_value, symmetrize, NsOptions, NsResult, SymmetricLp, EXACT_VAR_BUDGET, FLOAT_VAR_BUDGET};
pub use text::{parse_text, to_text};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    NonNeg,
    Free,
}

/// A sparse row `Σ coeffs · x  rel  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub rel: Relation,
    pub rhs: Rational,
}

/// `maximize objective · x` subject to `constraints`, with each variable either
/// nonnegative or free.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<Rational>,
    pub kinds: Vec<VarKind>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Float,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub objective: Rational,
    pub x: Vec<Rational>,
    /// One multiplier per constraint of the original problem.
    pub duals: Vec<Rational>,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloatSolution {
    pub objective: f64,
    pub x: Vec<f64>,
    /// One multiplier per constraint of the original problem.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    Exact(ExactSolution),
    Float(FloatSolution),
}

impl Solution {
    pub fn objective_f64(&self) -> f64 {
        match self {
            Solution::Exact(s) => rational::to_f64(&s.objective),
            Solution::Float(s) => s.objective,
        }
    }
}

impl LpProblem {
    pub fn new(num_vars: usize) -> Self {
        LpProblem {
            objective: vec![Rational::zero(); num_vars],
            kinds: vec![VarKind::NonNeg; num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<(usize, Rational)>, rel: Relation, rhs: Rational) {
        self.constraints.push(Constraint { coeffs, rel, rhs });
    }

    pub fn validate(&self) -> Result<()> {
        if self.kinds.len() != self.objective.len() {
            return Err(Error::DimensionMismatch("one kind per variable required".into()));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if let Some((j, _)) = c.coeffs.iter().find(|(j, _)| *j >= self.num_vars()) {
                return Err(Error::DimensionMismatch(format!("row {i} references variable {j}")));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn row_value(&self, row: &Constraint, x: &[Rational]) -> Rational {
        row.coeffs.iter().map(|(j, c)| c * &x[*j]).sum()
    }

    /// Exact feasibility of a point.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let signs_ok = self
            .kinds
            .iter()
            .zip(x)
            .all(|(k, v)| *k == VarKind::Free || !v.is_negative());
        signs_ok
            && self.constraints.iter().all(|row| {
                let lhs = self.row_value(row, x);
                match row.rel {
                    Relation::Le => lhs <= row.rhs,
                    Relation::Eq => lhs == row.rhs,
                    Relation::Ge => lhs >= row.rhs,
                }
            })
    }

    /// Largest constraint or sign violation of a floating point.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, v) in self.kinds.iter().zip(x) {
            if *k == VarKind::NonNeg {
                worst = worst.max(-v);
            }
        }
        for row in &self.constraints {
            let lhs: f64 = row.coeffs.iter().map(|(j, c)| rational::to_f64(c) * x[*j]).sum();
            let rhs = rational::to_f64(&row.rhs);
            let v = match row.rel {
                Relation::Le => lhs - rhs,
                Relation::Eq => (lhs - rhs).abs(),
                Relation::Ge => rhs - lhs,
            };
            worst = worst.max(v);
        }
        worst
    }

    /// Exact optimality certificate: primal feasibility, dual feasibility,
    /// equal objectives and complementary slackness.
    pub fn certify(&self, sol: &ExactSolution) -> Result<()> {
        let fail = |m: &str| Err(Error::Invalid(format!("certificate check failed: {m}")));
        if !self.is_feasible(&sol.x) {
            return fail("primal infeasible");
        }
        if sol.duals.len() != self.constraints.len() {
            return fail("dual length");
        }
        for (row, y) in self.constraints.iter().zip(&sol.duals) {
            let sign_ok = match row.rel {
                Relation::Le => !y.is_negative(),
                Relation::Ge => !y.is_positive(),
                Relation::Eq => true,
            };
            if !sign_ok {
                return fail("dual sign");
            }
            if !y.is_zero() && self.row_value(row, &sol.x) != row.rhs {
                return fail("complementary slackness on a row");
            }
        }
        let mut aty = vec![Rational::zero(); self.num_vars()];
        for (row, y) in self.constraints.iter().zip(&sol.duals) {
            if y.is_zero() {
                continue;
            }
            for (j, c) in &row.coeffs {
                aty[*j] += c * y;
            }
        }
        for j in 0..self.num_vars() {
            let slack = &aty[j] - &self.objective[j];
            let ok = match self.kinds[j] {
                VarKind::NonNeg => !slack.is_negative(),
                VarKind::Free => slack.is_zero(),
            };
            if !ok {
                return fail("dual infeasible");
            }
            if !slack.is_zero() && !sol.x[j].is_zero() {
                return fail("complementary slackness on a variable");
            }
        }
        let primal = self.objective_value(&sol.x);
        let dual: Rational = self
            .constraints
            .iter()
            .zip(&sol.duals)
            .map(|(row, y)| &row.rhs * y)
            .sum();
        if primal != dual || primal != sol.objective {
            return fail("objective mismatch");
        }
        Ok(())
    }
}

pub fn solve_lp(p: &LpProblem, backend: Backend) -> Result<Solution> {
    match backend {
        Backend::Exact => solve_exact(p, Pricing::Bland).map(Solution::Exact),
        Backend::Float => solve_float(p).map(Solution::Float),
    }
}

/// The problem in equality form `A z = b`, `z ≥ 0`, `b ≥ 0`, shared by both solvers.
pub(crate) struct StandardForm {
    /// Sparse rows over the standard columns.
    pub rows: Vec<Vec<(usize, Rational)>>,
    pub rhs: Vec<Rational>,
    pub cost: Vec<Rational>,
    /// `+1` or `−1`: the sign applied to each original row.
    pub row_sign: Vec<i8>,
    /// For each row, a column that is a unit vector on it with coefficient 1, if any.
    pub unit_col: Vec<Option<usize>>,
    /// Columns of each original variable: `(positive part, negative part)`.
    pub var_cols: Vec<(usize, Option<usize>)>,
    pub ncols: usize,
}

pub(crate) fn standard_form(p: &LpProblem) -> Result<StandardForm> {
    p.validate()?;
    let mut var_cols = Vec::with_capacity(p.num_vars());
    let mut ncols = 0;
    for k in &p.kinds {
        match k {
            VarKind::NonNeg => {
                var_cols.push((ncols, None));
                ncols += 1;
            }
            VarKind::Free => {
                var_cols.push((ncols, Some(ncols + 1)));
                ncols += 2;
            }
        }
    }
    let mut cost = vec![Rational::zero(); ncols];
    for (j, c) in p.objective.iter().enumerate() {
        let (pos, neg) = var_cols[j];
        cost[pos] = c.clone();
        if let Some(n) = neg {
            cost[n] = -c;
        }
    }
    let mut rows = Vec::with_capacity(p.constraints.len());
    let mut rhs = Vec::with_capacity(p.constraints.len());
    let mut row_sign = Vec::with_capacity(p.constraints.len());
    let mut unit_col = Vec::with_capacity(p.constraints.len());
    for c in &p.constraints {
        let mut merged = std::collections::BTreeMap::<usize, Rational>::new();
        for (j, v) in &c.coeffs {
            let (pos, neg) = var_cols[*j];
            *merged.entry(pos).or_insert_with(Rational::zero) += v;
            if let Some(n) = neg {
                *merged.entry(n).or_insert_with(Rational::zero) -= v;
            }
        }
        let mut row: Vec<(usize, Rational)> = merged.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        let slack = match c.rel {
            Relation::Le => Some(Rational::from_integer(1.into())),
            Relation::Ge => Some(Rational::from_integer((-1).into())),
            Relation::Eq => None,
        };
        let mut slack_col = None;
        if let Some(s) = slack {
            row.push((ncols, s));
            cost.push(Rational::zero());
            slack_col = Some(ncols);
            ncols += 1;
        }
        let sign: i8 = if c.rhs.is_negative() { -1 } else { 1 };
        if sign < 0 {
            for (_, v) in row.iter_mut() {
                *v = -v.clone();
            }
        }
        let unit = slack_col.filter(|&s| row.iter().any(|(j, v)| *j == s && v > &Rational::zero()));
        rows.push(row);
        rhs.push(if sign < 0 { -c.rhs.clone() } else { c.rhs.clone() });
        row_sign.push(sign);
        unit_col.push(unit);
    }
    Ok(StandardForm {
        rows,
        rhs,
        cost,
        row_sign,
        unit_col,
        var_cols,
        ncols,
    })
}

impl StandardForm {
    pub fn recover_x<T: Clone + std::ops::Sub<Output = T>>(&self, z: &[T]) -> Vec<T> {
        self.var_cols
            .iter()
            .map(|&(pos, neg)| match neg {
                Some(n) => z[pos].clone() - z[n].clone(),
                None => z[pos].clone(),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn one_var(rows: &[(Relation, i64)]) -> LpProblem {
        let mut p = LpProblem::new(1);
        p.objective[0] = int(1);
        for &(rel, rhs) in rows {
            p.add(vec![(0, int(1))], rel, int(rhs));
        }
        p
    }

    #[test]
    fn trivial_bounded() {
        let p = one_var(&[(Relation::Le, 1)]);
        for b in [Backend::Exact, Backend::Float] {
            let s = solve_lp(&p, b).unwrap();
            assert!((s.objective_f64() - 1.0).abs() < 1e-12);
        }
        let Solution::Exact(s) = solve_lp(&p, Backend::Exact).unwrap() else {
            panic!()
        };
        assert_eq!(s.objective, int(1));
        p.certify(&s).unwrap();
    }

    #[test]
    fn trivial_infeasible() {
        let p = one_var(&[(Relation::Ge, 2), (Relation::Le, 1)]);
        for b in [Backend::Exact, Backend::Float] {
            assert_eq!(solve_lp(&p, b), Err(Error::Infeasible));
        }
    }

    #[test]
    fn trivial_unbounded() {
        let mut p = one_var(&[]);
        p.kinds[0] = VarKind::Free;
        for b in [Backend::Exact, Backend::Float] {
            assert_eq!(solve_lp(&p, b), Err(Error::Unbounded));
        }
    }

    #[test]
    fn small_mixed_problem() {
        // max 3x + 2y  s.t. x + y <= 4, x + 3y <= 6, x <= 3, y free, y >= -1
        let mut p = LpProblem::new(2);
        p.objective = vec![int(3), int(2)];
        p.kinds[1] = VarKind::Free;
        p.add(vec![(0, int(1)), (1, int(1))], Relation::Le, int(4));
        p.add(vec![(0, int(1)), (1, int(3))], Relation::Le, int(6));
        p.add(vec![(0, int(1))], Relation::Le, int(3));
        p.add(vec![(1, int(1))], Relation::Ge, int(-1));
        let Solution::Exact(s) = solve_lp(&p, Backend::Exact).unwrap() else {
            panic!()
        };
        assert_eq!(s.objective, int(11));
        assert_eq!(s.x, vec![int(3), int(1)]);
        p.certify(&s).unwrap();
        let f = solve_lp(&p, Backend::Float).unwrap();
        assert!((f.objective_f64() - 11.0).abs() < 1e-9);
    }

    #[test]
    fn redundant_equalities() {
        // x + y = 1 stated twice, plus 2x + 2y = 2
        let mut p = LpProblem::new(2);
        p.objective = vec![ratio(1, 2), int(1)];
        for k in 1..=2 {
            p.add(vec![(0, int(k)), (1, int(k))], Relation::Eq, int(k));
        }
        p.add(vec![(0, int(1)), (1, int(1))], Relation::Eq, int(1));
        let Solution::Exact(s) = solve_lp(&p, Backend::Exact).unwrap() else {
            panic!()
        };
        assert_eq!(s.objective, int(1));
        p.certify(&s).unwrap();
        assert!((solve_lp(&p, Backend::Float).unwrap().objective_f64() - 1.0).abs() < 1e-12);
    }
}
