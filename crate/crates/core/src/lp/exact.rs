//! Two-phase dense-tableau simplex over exact rationals.

use super::{standard_form, ExactSolution, LpProblem};
use crate::error::{Error, Result};
use crate::hybrid::Q;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pricing {
    /// Smallest-index entering and leaving variables; never cycles.
    Bland,
    /// Most negative reduced cost, switching to Bland's rule for good after a
    /// run of degenerate pivots.
    DantzigThenBland,
}

/// Degenerate pivots tolerated before Dantzig pricing gives way to Bland's rule.
const DEGENERATE_RUN: usize = 50;

struct Tableau {
    rows: Vec<Vec<Q>>,
    /// Reduced costs `c_B B⁻¹ A_j − c_j`; the last entry is the objective value.
    obj: Vec<Q>,
    basis: Vec<usize>,
    ncols: usize,
    pivots: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Q {
        &self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let inv = self.rows[r][q].recip();
        if !inv.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v = &*v * &inv;
                }
            }
        }
        let nz: Vec<usize> = (0..=self.ncols).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let (before, rest) = self.rows.split_at_mut(r);
        let (prow, after) = rest.split_first_mut().expect("pivot row exists");
        let eliminate = |row: &mut Vec<Q>| {
            if row[q].is_zero() {
                return;
            }
            let f = row[q].clone();
            for &j in &nz {
                let d = &f * &prow[j];
                row[j] = &row[j] - &d;
            }
        };
        before.iter_mut().for_each(eliminate);
        after.iter_mut().for_each(eliminate);
        eliminate(&mut self.obj);
        self.basis[r] = q;
        self.pivots += 1;
    }

    fn entering(&self, allowed: &dyn Fn(usize) -> bool, bland: bool) -> Option<usize> {
        let mut best: Option<usize> = None;
        for j in 0..self.ncols {
            if !self.obj[j].is_negative() || !allowed(j) {
                continue;
            }
            if bland {
                return Some(j);
            }
            if best.is_none_or(|b| self.obj[j] < self.obj[b]) {
                best = Some(j);
            }
        }
        best
    }

    fn leaving(&self, q: usize) -> Option<usize> {
        let mut best: Option<(usize, Q)> = None;
        for i in 0..self.rows.len() {
            let a = &self.rows[i][q];
            if !a.is_positive() {
                continue;
            }
            let ratio = self.rhs(i) / a;
            let better = match &best {
                None => true,
                Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
            };
            if better {
                best = Some((i, ratio));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Runs simplex iterations until optimal (`Ok`) or unbounded (`Err`).
    fn optimize(&mut self, allowed: &dyn Fn(usize) -> bool, pricing: Pricing) -> Result<()> {
        let mut bland = pricing == Pricing::Bland;
        let mut degenerate = 0;
        loop {
            let Some(q) = self.entering(allowed, bland) else {
                return Ok(());
            };
            let Some(r) = self.leaving(q) else {
                return Err(Error::Unbounded);
            };
            if self.rhs(r).is_zero() {
                degenerate += 1;
                if degenerate >= DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            self.pivot(r, q);
        }
    }

    fn set_objective(&mut self, cost: &[Q]) {
        let width = self.ncols + 1;
        let mut obj: Vec<Q> = (0..width)
            .map(|j| if j < self.ncols { -&cost[j] } else { Q::ZERO })
            .collect();
        for (i, &b) in self.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            for j in 0..width {
                if !self.rows[i][j].is_zero() {
                    obj[j] = &obj[j] + &(&cost[b] * &self.rows[i][j]);
                }
            }
        }
        self.obj = obj;
    }
}

/// Exact optimum, primal point and dual multipliers.
pub fn solve_exact(p: &LpProblem, pricing: Pricing) -> Result<ExactSolution> {
    let sf = standard_form(p)?;
    let m = sf.rows.len();
    let mut id_col = Vec::with_capacity(m);
    let mut n_art = 0;
    for u in &sf.unit_col {
        match u {
            Some(c) => id_col.push(*c),
            None => {
                id_col.push(sf.ncols + n_art);
                n_art += 1;
            }
        }
    }
    let ncols = sf.ncols + n_art;
    let is_art = |j: usize| j >= sf.ncols;
    let mut rows = vec![vec![Q::ZERO; ncols + 1]; m];
    for (i, row) in sf.rows.iter().enumerate() {
        for (j, v) in row {
            rows[i][*j] = Q::from(v);
        }
        rows[i][id_col[i]] = Q::ONE;
        rows[i][ncols] = Q::from(&sf.rhs[i]);
    }
    let mut t = Tableau {
        rows,
        obj: Vec::new(),
        basis: id_col.clone(),
        ncols,
        pivots: 0,
    };

    if n_art > 0 {
        let phase1: Vec<Q> = (0..ncols)
            .map(|j| if is_art(j) { Q::int(-1) } else { Q::ZERO })
            .collect();
        t.set_objective(&phase1);
        t.optimize(&|_| true, pricing)?;
        if t.obj[ncols].is_negative() {
            return Err(Error::Infeasible);
        }
        // drive zero-level artificials out of the basis where possible
        for i in 0..m {
            if !is_art(t.basis[i]) {
                continue;
            }
            if let Some(q) = (0..sf.ncols).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, q);
            }
        }
    }

    let mut cost: Vec<Q> = sf.cost.iter().map(Q::from).collect();
    cost.resize(ncols, Q::ZERO);
    t.set_objective(&cost);
    t.optimize(&|j| !is_art(j), pricing)?;

    let mut z = vec![Rational::from_integer(0.into()); ncols];
    for (i, &b) in t.basis.iter().enumerate() {
        z[b] = t.rhs(i).to_rational();
    }
    let x = sf.recover_x(&z[..sf.ncols]);
    let duals = (0..m)
        .map(|i| {
            let y = t.obj[id_col[i]].to_rational();
            if sf.row_sign[i] < 0 {
                -y
            } else {
                y
            }
        })
        .collect();
    Ok(ExactSolution {
        objective: t.obj[ncols].to_rational(),
        x,
        duals,
        pivots: t.pivots,
    })
}
