//! Exact row reduction and affine parametrization of rational linear systems.

use crate::error::{Error, Result};
use crate::hybrid::Q;
use crate::rational::Rational;

/// Reduced row echelon form of `[A | b]` for a system `A z = b`.
#[derive(Debug, Clone)]
pub struct Rref {
    pub ncols: usize,
    /// Nonzero rows only; row `k` has a leading one in column `pivots[k]`.
    pub rows: Vec<Vec<Q>>,
    pub rhs: Vec<Q>,
    pub pivots: Vec<usize>,
}

/// Row-reduces a sparse system given as `(coefficients, rhs)` rows.
/// Returns `Infeasible` if the system is inconsistent.
pub fn rref(ncols: usize, system: &[(Vec<(usize, Rational)>, Rational)]) -> Result<Rref> {
    let mut rows: Vec<Vec<Q>> = Vec::with_capacity(system.len());
    let mut rhs: Vec<Q> = Vec::with_capacity(system.len());
    for (coeffs, b) in system {
        let mut row = vec![Q::ZERO; ncols];
        for (j, v) in coeffs {
            if *j >= ncols {
                return Err(Error::DimensionMismatch(format!("column {j} out of range {ncols}")));
            }
            row[*j] = &row[*j] + &Q::from(v);
        }
        rows.push(row);
        rhs.push(Q::from(b));
    }
    let m = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        rhs.swap(r, p);
        let inv = rows[r][col].recip();
        if !inv.is_one() {
            for v in rows[r].iter_mut().filter(|v| !v.is_zero()) {
                *v = &*v * &inv;
            }
            rhs[r] = &rhs[r] * &inv;
        }
        let nz: Vec<usize> = (col..ncols).filter(|&j| !rows[r][j].is_zero()).collect();
        let prow = rows[r].clone();
        let pb = rhs[r].clone();
        for i in 0..m {
            if i == r || rows[i][col].is_zero() {
                continue;
            }
            let f = rows[i][col].clone();
            for &j in &nz {
                rows[i][j] = &rows[i][j] - &(&f * &prow[j]);
            }
            rhs[i] = &rhs[i] - &(&f * &pb);
        }
        pivots.push(col);
        r += 1;
    }
    if rhs[r..].iter().any(|b| !b.is_zero()) {
        return Err(Error::Infeasible);
    }
    rows.truncate(r);
    rhs.truncate(r);
    Ok(Rref {
        ncols,
        rows,
        rhs,
        pivots,
    })
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols).filter(|&j| !is_pivot[j]).collect()
    }

    /// Completes a solution from values of the free columns (in
    /// `free_columns()` order).
    pub fn solve_with(&self, free_values: &[Rational]) -> Vec<Rational> {
        let free = self.free_columns();
        assert_eq!(free.len(), free_values.len(), "one value per free column");
        let fq: Vec<Q> = free_values.iter().map(Q::from).collect();
        let mut z = vec![Q::ZERO; self.ncols];
        for (f, v) in free.iter().zip(&fq) {
            z[*f] = v.clone();
        }
        for (k, &p) in self.pivots.iter().enumerate() {
            let mut v = self.rhs[k].clone();
            for (f, fv) in free.iter().zip(&fq) {
                let a = &self.rows[k][*f];
                if !a.is_zero() && !fv.is_zero() {
                    v = &v - &(a * fv);
                }
            }
            z[p] = v;
        }
        z.iter().map(Q::to_rational).collect()
    }

    /// Solution with all free columns zero.
    pub fn particular(&self) -> Vec<Rational> {
        let zeros = vec![Rational::from_integer(0.into()); self.ncols - self.rank()];
        self.solve_with(&zeros)
    }

    /// One null-space vector per free column: a one there, zeros at the other
    /// free columns.
    pub fn null_space(&self) -> Vec<Vec<Rational>> {
        let zero = Rational::from_integer(0.into());
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = vec![zero.clone(); self.ncols];
                v[f] = Rational::from_integer(1.into());
                for (k, &p) in self.pivots.iter().enumerate() {
                    let a = &self.rows[k][f];
                    if !a.is_zero() {
                        v[p] = (-a).to_rational();
                    }
                }
                v
            })
            .collect()
    }

    /// Whether `v` lies in the row space of the reduced matrix.
    pub fn row_space_contains(&self, v: &[Rational]) -> bool {
        let mut r: Vec<Q> = v.iter().map(Q::from).collect();
        for (k, &p) in self.pivots.iter().enumerate() {
            if r[p].is_zero() {
                continue;
            }
            let f = r[p].clone();
            for j in 0..self.ncols {
                if !self.rows[k][j].is_zero() {
                    r[j] = &r[j] - &(&f * &self.rows[k][j]);
                }
            }
        }
        r.iter().all(Q::is_zero)
    }
}

/// Row reduction in floating point with partial pivoting; entries below `tol`
/// after elimination are treated as zero. Returns the nonzero rows.
pub fn rref_f64(mut rows: Vec<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        let (p, best) = (r..m)
            .map(|i| (i, rows[i][col].abs()))
            .fold((r, 0.0), |acc, c| if c.1 > acc.1 { c } else { acc });
        if best <= tol {
            for row in rows.iter_mut().skip(r) {
                row[col] = 0.0;
            }
            continue;
        }
        rows.swap(r, p);
        let piv = rows[r][col];
        for v in rows[r].iter_mut() {
            *v /= piv;
        }
        let prow = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[col];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
            }
        }
        r += 1;
    }
    rows.truncate(r);
    for row in rows.iter_mut() {
        for v in row.iter_mut() {
            if v.abs() <= tol {
                *v = 0.0;
            }
        }
    }
    rows
}

/// Exact LDLᵀ test for positive definiteness of a symmetric rational matrix.
pub fn is_positive_definite(y: &[Vec<Rational>]) -> Result<bool> {
    let n = y.len();
    if y.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch("matrix is not square".into()));
    }
    for i in 0..n {
        for j in 0..i {
            if y[i][j] != y[j][i] {
                return Err(Error::NotSymmetric);
            }
        }
    }
    let mut a: Vec<Vec<Q>> = y.iter().map(|r| r.iter().map(Q::from).collect()).collect();
    for k in 0..n {
        if !a[k][k].is_positive() {
            return Ok(false);
        }
        let inv = a[k][k].recip();
        // lower triangle only; column k is read but not written in this step
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] * &inv;
            for j in k + 1..=i {
                if !a[j][k].is_zero() {
                    let d = &f * &a[j][k];
                    a[i][j] = &a[i][j] - &d;
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn sys(rows: &[(&[(usize, i64)], i64)]) -> Vec<(Vec<(usize, Rational)>, Rational)> {
        rows.iter()
            .map(|(c, b)| (c.iter().map(|(j, v)| (*j, int(*v))).collect(), int(*b)))
            .collect()
    }

    #[test]
    fn parametrizes_affine_space() {
        // x0 + x1 + x2 = 3, x0 - x1 = 1, and a redundant copy
        let s = sys(&[(&[(0, 1), (1, 1), (2, 1)], 3), (&[(0, 1), (1, -1)], 1), (&[(0, 2), (2, 1)], 4)]);
        let r = rref(3, &s).unwrap();
        assert_eq!(r.rank(), 2);
        assert_eq!(r.free_columns(), vec![2]);
        let z = r.solve_with(&[int(4)]);
        assert_eq!(z, vec![int(0), int(-1), int(4)]);
        let n = &r.null_space()[0];
        assert_eq!(n, &vec![ratio(-1, 2), ratio(-1, 2), int(1)]);
        assert!(r.row_space_contains(&[int(1), int(-1), int(0)]));
        assert!(!r.row_space_contains(&[int(0), int(0), int(1)]));
    }

    #[test]
    fn detects_inconsistency() {
        let s = sys(&[(&[(0, 1)], 1), (&[(0, 2)], 3)]);
        assert_eq!(rref(1, &s).unwrap_err(), Error::Infeasible);
    }

    #[test]
    fn definiteness() {
        let id = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        assert!(is_positive_definite(&id).unwrap());
        let bad = vec![vec![int(1), int(2)], vec![int(2), int(1)]];
        assert!(!is_positive_definite(&bad).unwrap());
        let psd = vec![vec![int(1), int(1)], vec![int(1), int(1)]];
        assert!(!is_positive_definite(&psd).unwrap());
        let asym = vec![vec![int(1), int(2)], vec![int(0), int(1)]];
        assert_eq!(is_positive_definite(&asym), Err(Error::NotSymmetric));
        let h3 = vec![
            vec![int(2), int(-1), int(0)],
            vec![int(-1), int(2), int(-1)],
            vec![int(0), int(-1), int(2)],
        ];
        assert!(is_positive_definite(&h3).unwrap());
    }

    #[test]
    fn float_rref_zeroes_noise() {
        let rows = vec![vec![1.0, 2.0, 1e-12], vec![2.0, 4.0, 1.0]];
        let r = rref_f64(rows, 1e-9);
        assert_eq!(r.len(), 2);
        assert_eq!(r[0], vec![1.0, 2.0, 0.0]);
        assert_eq!(r[1], vec![0.0, 0.0, 1.0]);
    }
}
