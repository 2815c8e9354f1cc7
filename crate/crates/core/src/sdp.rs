//! Dense primal-dual interior-point solver for small semidefinite programs.
//!
//! Primal: minimize `⟨C, X⟩` subject to `⟨A_i, X⟩ = b_i`, `X ⪰ 0`.
//! Dual: maximize `b·y` subject to `S = C - Σ y_i A_i ⪰ 0`.
//!
//! Infeasible-start path following with the HKM search direction and a
//! Mehrotra predictor-corrector step.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Symmetric constraint matrix, stored sparsely (upper triangle) or densely.
#[derive(Debug, Clone)]
pub enum SymMatrix {
    /// Entries `(i, j, v)` with `i <= j`; `(i, j)` with `i < j` stands for both
    /// `(i, j)` and `(j, i)`.
    Sparse(Vec<(usize, usize, f64)>),
    Dense(DMatrix<f64>),
}

impl SymMatrix {
    /// `⟨self, X⟩ = tr(self · X)` for symmetric `X`.
    pub fn dot(&self, x: &DMatrix<f64>) -> f64 {
        match self {
            SymMatrix::Sparse(e) => e
                .iter()
                .map(|&(i, j, v)| if i == j { v * x[(i, i)] } else { v * (x[(i, j)] + x[(j, i)]) })
                .sum(),
            SymMatrix::Dense(a) => a.dot(x),
        }
    }

    /// Adds `c · self` to `out`.
    pub fn add_to(&self, out: &mut DMatrix<f64>, c: f64) {
        match self {
            SymMatrix::Sparse(e) => {
                for &(i, j, v) in e {
                    out[(i, j)] += c * v;
                    if i != j {
                        out[(j, i)] += c * v;
                    }
                }
            }
            SymMatrix::Dense(a) => *out += a * c,
        }
    }

    /// `X · self`.
    fn right_mul(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            SymMatrix::Sparse(e) => {
                let n = x.nrows();
                let mut out = DMatrix::zeros(n, n);
                for &(i, j, v) in e {
                    for r in 0..n {
                        out[(r, j)] += v * x[(r, i)];
                    }
                    if i != j {
                        for r in 0..n {
                            out[(r, i)] += v * x[(r, j)];
                        }
                    }
                }
                out
            }
            SymMatrix::Dense(a) => x * a,
        }
    }

    fn frobenius(&self) -> f64 {
        match self {
            SymMatrix::Sparse(e) => e
                .iter()
                .map(|&(i, j, v)| if i == j { v * v } else { 2.0 * v * v })
                .sum::<f64>()
                .sqrt(),
            SymMatrix::Dense(a) => a.norm(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub c: DMatrix<f64>,
    pub a: Vec<SymMatrix>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    /// Relative duality gap and infeasibility targets.
    pub tol: f64,
    /// Looser targets under which a stalled run still returns its best iterate.
    pub accept: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions {
            tol: 1e-8,
            accept: 1e-6,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub s: DMatrix<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub iterations: usize,
    pub trace: Vec<String>,
}

impl SdpSolution {
    pub fn gap(&self) -> f64 {
        (self.primal_objective - self.dual_objective).abs()
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

/// Largest `α ≤ 1` with `M + α·dM ⪰ 0`, damped by `gamma`.
fn step_length(m: &DMatrix<f64>, dm: &DMatrix<f64>, gamma: f64) -> Option<f64> {
    let l = Cholesky::new(m.clone())?.l();
    let linv = l.clone().try_inverse()?;
    let mut t = &linv * dm * linv.transpose();
    symmetrize(&mut t);
    let min = SymmetricEigen::new(t).eigenvalues.min();
    Some(if min >= 0.0 { 1.0 } else { (gamma * -1.0 / min).min(1.0) })
}

fn failure(msg: impl Into<String>, trace: &[String]) -> Error {
    Error::NumericalFailure {
        msg: msg.into(),
        trace: trace.to_vec(),
    }
}

pub fn solve(p: &SdpProblem, opts: SdpOptions) -> Result<SdpSolution> {
    let n = p.c.nrows();
    let m = p.a.len();
    if p.c.ncols() != n || p.b.len() != m {
        return Err(Error::DimensionMismatch("SDP data sizes disagree".into()));
    }
    for a in &p.a {
        let ok = match a {
            SymMatrix::Sparse(e) => e.iter().all(|&(i, j, _)| i <= j && j < n),
            SymMatrix::Dense(d) => d.nrows() == n && d.ncols() == n,
        };
        if !ok {
            return Err(Error::DimensionMismatch("constraint matrix does not fit".into()));
        }
    }
    let norm_a: Vec<f64> = p.a.iter().map(SymMatrix::frobenius).collect();
    let norm_b = p.b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let norm_c = p.c.norm();
    let alpha0 = (0..m)
        .map(|i| (1.0 + p.b[i].abs()) / (1.0 + norm_a[i]))
        .fold(1.0, f64::max)
        * n as f64;
    let beta0 = (1.0 + norm_a.iter().copied().fold(norm_c, f64::max)) / (n as f64).sqrt();
    let mut x = DMatrix::<f64>::identity(n, n) * alpha0;
    let mut s = DMatrix::<f64>::identity(n, n) * beta0.max(1.0);
    let mut y = DVector::<f64>::zeros(m);
    let mut trace = Vec::new();

    let a_of = |x: &DMatrix<f64>| DVector::from_iterator(m, p.a.iter().map(|a| a.dot(x)));
    let at_of = |y: &DVector<f64>| {
        let mut out = DMatrix::zeros(n, n);
        for (a, v) in p.a.iter().zip(y.iter()) {
            if *v != 0.0 {
                a.add_to(&mut out, *v);
            }
        }
        out
    };
    let b = DVector::from_vec(p.b.clone());
    let mut best: Option<(f64, SdpSolution)> = None;
    let stalled = |best: Option<(f64, SdpSolution)>, msg: &str, trace: &[String]| match best {
        Some((err, mut sol)) if err < opts.accept => {
            sol.trace = trace.to_vec();
            sol.trace.push(format!("{msg}; returning iterate {} with error {err:.2e}", sol.iterations));
            Ok(sol)
        }
        _ => Err(failure(msg, trace)),
    };

    for iter in 0..opts.max_iter {
        let rp = &b - a_of(&x);
        let rd = &p.c - at_of(&y) - &s;
        let mu = x.dot(&s) / n as f64;
        let pobj = p.c.dot(&x);
        let dobj = b.dot(&y);
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let pinf = rp.norm() / (1.0 + norm_b);
        let dinf = rd.norm() / (1.0 + norm_c);
        trace.push(format!(
            "iter {iter}: pobj {pobj:.10e} dobj {dobj:.10e} gap {gap:.2e} pinf {pinf:.2e} dinf {dinf:.2e} mu {mu:.2e}"
        ));
        if !(pobj.is_finite() && dobj.is_finite()) {
            return Err(failure("objective became non-finite", &trace));
        }
        let err = gap.max(pinf).max(dinf);
        let current = || SdpSolution {
            x: x.clone(),
            y: y.clone(),
            s: s.clone(),
            primal_objective: pobj,
            dual_objective: dobj,
            iterations: iter,
            trace: Vec::new(),
        };
        if err < opts.tol {
            let mut sol = current();
            sol.trace = trace;
            return Ok(sol);
        }
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, current()));
        }
        let Some(sinv) = Cholesky::new(s.clone()).map(|c| c.inverse()) else {
            return stalled(best, "dual slack lost definiteness", &trace);
        };
        // Schur complement M_ij = ⟨A_i, X A_j S⁻¹⟩
        let g: Vec<DMatrix<f64>> = p.a.iter().map(|a| a.right_mul(&x) * &sinv).collect();
        let mut schur = DMatrix::<f64>::zeros(m, m);
        for j in 0..m {
            for i in 0..m {
                schur[(i, j)] = p.a[i].dot_general(&g[j]);
            }
        }
        symmetrize(&mut schur);
        let scale = schur.diagonal().iter().copied().fold(0.0, f64::max).max(1.0);
        let chol = match Cholesky::new(schur.clone()) {
            Some(c) => c,
            None => {
                let reg = DMatrix::identity(m, m) * (1e-13 * scale);
                match Cholesky::new(schur + reg) {
                    Some(c) => c,
                    None => return stalled(best, "Schur complement is singular", &trace),
                }
            }
        };
        let xrd = &x * &rd * &sinv;
        let direction = |rc: &DMatrix<f64>| {
            let base = rc * &sinv - &x - &xrd;
            let rhs = &rp - a_of(&base);
            let dy = chol.solve(&rhs);
            let ds = &rd - at_of(&dy);
            let mut dx = rc * &sinv - &x - &x * &ds * &sinv;
            symmetrize(&mut dx);
            (dx, dy, ds)
        };
        let (dxa, _, dsa) = direction(&DMatrix::zeros(n, n));
        let (Some(ap), Some(ad)) = (step_length(&x, &dxa, 1.0), step_length(&s, &dsa, 1.0)) else {
            return stalled(best, "iterate lost definiteness", &trace);
        };
        let mu_aff = (&x + &dxa * ap).dot(&(&s + &dsa * ad)) / n as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
        let rc = DMatrix::<f64>::identity(n, n) * (sigma * mu) - &dxa * &dsa;
        let (dx, dy, ds) = direction(&rc);
        let gamma = 0.95;
        let (Some(ap), Some(ad)) = (step_length(&x, &dx, gamma), step_length(&s, &ds, gamma)) else {
            return stalled(best, "iterate lost definiteness", &trace);
        };
        x += &dx * ap;
        y += &dy * ad;
        s += &ds * ad;
        symmetrize(&mut x);
        symmetrize(&mut s);
    }
    stalled(best, "iteration limit reached", &trace)
}

impl SymMatrix {
    /// `tr(self · G)` for a general square `G`.
    fn dot_general(&self, g: &DMatrix<f64>) -> f64 {
        match self {
            SymMatrix::Sparse(e) => e
                .iter()
                .map(|&(i, j, v)| if i == j { v * g[(i, i)] } else { v * (g[(i, j)] + g[(j, i)]) })
                .sum(),
            SymMatrix::Dense(a) => a.component_mul(&g.transpose()).sum(),
        }
    }
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let mut t = m.clone();
    symmetrize(&mut t);
    SymmetricEigen::new(t).eigenvalues.min()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_cut_triangle() {
        // maximize Σ_{i<j} (1 - X_ij)/2 for the triangle: optimum 9/4 with X_ij = -1/2.
        // As a minimization: min ⟨C, X⟩, C = (J - I)/4 shifted, with diag(X) = 1.
        let n = 3;
        let c = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 0.25 });
        let a = (0..n).map(|i| SymMatrix::Sparse(vec![(i, i, 1.0)])).collect();
        let p = SdpProblem {
            c,
            a,
            b: vec![1.0; n],
        };
        let sol = solve(&p, SdpOptions::default()).unwrap();
        assert!((sol.primal_objective + 0.75).abs() < 1e-7, "{}", sol.primal_objective);
        assert!(sol.gap() < 1e-7);
        assert!((sol.x[(0, 1)] + 0.5).abs() < 1e-6);
    }

    #[test]
    fn dense_constraint_and_min_eigen() {
        // max t s.t. C - tI ⪰ 0 is the smallest eigenvalue of C
        let c = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let p = SdpProblem {
            c: c.clone(),
            a: vec![SymMatrix::Dense(DMatrix::identity(2, 2))],
            b: vec![1.0],
        };
        let sol = solve(&p, SdpOptions::default()).unwrap();
        assert!((sol.dual_objective - 1.0).abs() < 1e-7);
        assert!((min_eigenvalue(&c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_shapes() {
        let p = SdpProblem {
            c: DMatrix::identity(2, 2),
            a: vec![SymMatrix::Sparse(vec![(0, 2, 1.0)])],
            b: vec![1.0],
        };
        assert!(matches!(solve(&p, SdpOptions::default()), Err(Error::DimensionMismatch(_))));
    }
}
