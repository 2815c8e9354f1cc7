//! Two-phase revised simplex in double precision with a dense basis inverse
//! and Devex (approximate steepest-edge) pricing.

use nalgebra::DMatrix;

use super::{standard_form, FloatSolution, LpProblem};
use crate::error::{Error, Result};
use crate::rational;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;
const REINVERT_EVERY: usize = 100;

struct Revised {
    m: usize,
    /// Sparse columns, artificials included.
    cols: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    binv: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    xb: Vec<f64>,
    weights: Vec<f64>,
    iterations: usize,
    since_reinvert: usize,
}

impl Revised {
    fn binv_row(&self, i: usize) -> &[f64] {
        &self.binv[i * self.m..(i + 1) * self.m]
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for &(k, v) in &self.cols[j] {
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.binv[i * self.m + k] * v;
            }
        }
        out
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        for (i, &b) in self.basis.iter().enumerate() {
            let c = cost[b];
            if c != 0.0 {
                for (yk, bk) in y.iter_mut().zip(self.binv_row(i)) {
                    *yk += c * bk;
                }
            }
        }
        y
    }

    fn reinvert(&mut self) -> Result<()> {
        let m = self.m;
        let mut b = DMatrix::<f64>::zeros(m, m);
        for (i, &j) in self.basis.iter().enumerate() {
            for &(k, v) in &self.cols[j] {
                b[(k, i)] = v;
            }
        }
        let inv = b.try_inverse().ok_or_else(|| Error::NumericalFailure {
            msg: "singular basis during reinversion".into(),
            trace: vec![format!("iteration {}", self.iterations)],
        })?;
        for i in 0..m {
            for k in 0..m {
                self.binv[i * m + k] = inv[(i, k)];
            }
        }
        for i in 0..m {
            let v: f64 = self.binv_row(i).iter().zip(&self.rhs).map(|(a, b)| a * b).sum();
            self.xb[i] = if v.abs() < FEAS_TOL { 0.0 } else { v };
        }
        self.since_reinvert = 0;
        Ok(())
    }

    fn pivot(&mut self, r: usize, q: usize, alpha: &[f64]) {
        let m = self.m;
        let theta = self.xb[r] / alpha[r];
        for i in 0..m {
            if i != r {
                self.xb[i] -= theta * alpha[i];
                if self.xb[i].abs() < 1e-13 {
                    self.xb[i] = 0.0;
                }
            }
        }
        self.xb[r] = theta;
        let pr = alpha[r];
        for k in 0..m {
            self.binv[r * m + k] /= pr;
        }
        let prow: Vec<f64> = self.binv_row(r).to_vec();
        for (i, &a) in alpha.iter().enumerate() {
            if i == r || a == 0.0 {
                continue;
            }
            for (dst, src) in self.binv[i * m..(i + 1) * m].iter_mut().zip(&prow) {
                *dst -= a * src;
            }
        }
        self.in_basis[self.basis[r]] = false;
        self.in_basis[q] = true;
        self.basis[r] = q;
        self.iterations += 1;
        self.since_reinvert += 1;
    }

    /// Simplex loop for `maximize cost · z`; `allowed` filters entering columns
    /// and `frozen` marks basic columns that must stay at zero.
    fn optimize(&mut self, cost: &[f64], allowed: &dyn Fn(usize) -> bool, frozen: &dyn Fn(usize) -> bool) -> Result<()> {
        let n = self.cols.len();
        let limit = 50 * (n + self.m) + 1000;
        self.weights = vec![1.0; n];
        loop {
            if self.iterations > limit {
                return Err(Error::NumericalFailure {
                    msg: "simplex iteration limit reached".into(),
                    trace: vec![format!("iterations {}", self.iterations)],
                });
            }
            if self.since_reinvert >= REINVERT_EVERY {
                self.reinvert()?;
            }
            let y = self.duals(cost);
            let mut best: Option<(f64, usize)> = None;
            for j in 0..n {
                if self.in_basis[j] || !allowed(j) {
                    continue;
                }
                let d = cost[j] - self.cols[j].iter().map(|&(k, v)| y[k] * v).sum::<f64>();
                if d > COST_TOL {
                    let score = d * d / self.weights[j];
                    if best.is_none_or(|(s, _)| score > s) {
                        best = Some((score, j));
                    }
                }
            }
            let Some((_, q)) = best else {
                return Ok(());
            };
            let alpha = self.ftran(q);
            let mut leave: Option<(f64, usize)> = None;
            for i in 0..self.m {
                let a = alpha[i];
                let ratio = if frozen(self.basis[i]) && a.abs() > PIVOT_TOL {
                    0.0
                } else if a > PIVOT_TOL {
                    self.xb[i].max(0.0) / a
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some((br, bi)) => {
                        ratio < br - 1e-12
                            || (ratio <= br + 1e-12 && a.abs() > alpha[bi].abs())
                    }
                };
                if better {
                    leave = Some((ratio, i));
                }
            }
            let Some((_, r)) = leave else {
                return Err(Error::Unbounded);
            };
            // Devex reference weights
            let ar = alpha[r];
            let wq = self.weights[q].max(1.0);
            let rho = self.binv_row(r).to_vec();
            for j in 0..n {
                if self.in_basis[j] || j == q {
                    continue;
                }
                let arj: f64 = self.cols[j].iter().map(|&(k, v)| rho[k] * v).sum();
                if arj != 0.0 {
                    let cand = (arj / ar).powi(2) * wq;
                    if cand > self.weights[j] {
                        self.weights[j] = cand;
                    }
                }
            }
            let leaving = self.basis[r];
            self.weights[leaving] = (wq / (ar * ar)).max(1.0);
            self.pivot(r, q, &alpha);
        }
    }
}

pub fn solve_float(p: &LpProblem) -> Result<FloatSolution> {
    let sf = standard_form(p)?;
    let m = sf.rows.len();
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); sf.ncols];
    for (i, row) in sf.rows.iter().enumerate() {
        for (j, v) in row {
            cols[*j].push((i, rational::to_f64(v)));
        }
    }
    let mut basis = Vec::with_capacity(m);
    for (i, u) in sf.unit_col.iter().enumerate() {
        match u {
            Some(c) => basis.push(*c),
            None => {
                basis.push(cols.len());
                cols.push(vec![(i, 1.0)]);
            }
        }
    }
    let n = cols.len();
    let n_struct = sf.ncols;
    let mut in_basis = vec![false; n];
    for &b in &basis {
        in_basis[b] = true;
    }
    let mut binv = vec![0.0; m * m];
    for i in 0..m {
        binv[i * m + i] = 1.0;
    }
    let rhs: Vec<f64> = sf.rhs.iter().map(rational::to_f64).collect();
    let mut s = Revised {
        m,
        cols,
        rhs: rhs.clone(),
        binv,
        basis,
        in_basis,
        xb: rhs,
        weights: Vec::new(),
        iterations: 0,
        since_reinvert: 0,
    };
    let is_art = |j: usize| j >= n_struct;
    if n > n_struct {
        let phase1: Vec<f64> = (0..n).map(|j| if is_art(j) { -1.0 } else { 0.0 }).collect();
        s.optimize(&phase1, &|_| true, &|_| false)?;
        s.reinvert()?;
        let infeas: f64 = s
            .basis
            .iter()
            .zip(&s.xb)
            .filter(|(b, _)| is_art(**b))
            .map(|(_, v)| *v)
            .sum();
        if infeas > 1e-7 {
            return Err(Error::Infeasible);
        }
    }
    let mut cost: Vec<f64> = sf.cost.iter().map(rational::to_f64).collect();
    cost.resize(n, 0.0);
    s.optimize(&cost, &|j| !is_art(j), &|j| is_art(j))?;
    s.reinvert()?;
    let mut z = vec![0.0; n];
    for (i, &b) in s.basis.iter().enumerate() {
        z[b] = s.xb[i];
    }
    let x = sf.recover_x(&z[..n_struct]);
    let duals = s
        .duals(&cost)
        .into_iter()
        .zip(&sf.row_sign)
        .map(|(y, &sign)| if sign < 0 { -y } else { y })
        .collect();
    let objective = p
        .objective
        .iter()
        .zip(&x)
        .map(|(c, v)| rational::to_f64(c) * v)
        .sum();
    Ok(FloatSolution {
        objective,
        x,
        duals,
        iterations: s.iterations,
    })
}
