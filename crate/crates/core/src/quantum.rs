//! The optimal strategy family for Feige's game, ν-biased measurements, and
//! self-testing residual diagnostics.

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;
use num_integer::Roots;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{self, permutations};
use crate::ncpoly::{self, alice_operator, Alphabet, NcPoly};
use crate::rational::{self, Rational};
use crate::strategies::{correlation_of_quantum, eval_correlation, max_abs, CMatrix, QuantumStrategy};

const ORTHO_TOL: f64 = 1e-12;
/// Second-largest eigenvalue bound for a projection to count as rank one.
pub const RANK_ONE_TOL: f64 = 1e-8;
/// Tolerance for the degeneracy condition and phase equations on float input.
pub const PHASE_TOL: f64 = 1e-9;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn real_matrix(n: usize, rows: &[f64]) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| c(rows[i * n + j]))
}

fn projector(v: &DVector<Complex64>) -> CMatrix {
    v * v.adjoint()
}

fn check_unit_interval(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("p = {p} is outside [0, 1]")))
    }
}

/// `X̃ = X ⊕ 1` on `C^3 = C^2 ⊕ C`.
pub fn x_tilde() -> CMatrix {
    real_matrix(3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0])
}

/// `Z̃ = Z ⊕ 1`.
pub fn z_tilde() -> CMatrix {
    real_matrix(3, &[1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0])
}

/// The basis `{|~0⟩, |~1⟩, |⊥⟩}` for a weight `p` of `|0⟩` in `|⊥⟩`.
#[derive(Debug, Clone)]
pub struct FeigeFamily {
    pub p: f64,
    pub tilde0: DVector<Complex64>,
    pub tilde1: DVector<Complex64>,
    pub bot: DVector<Complex64>,
}

impl FeigeFamily {
    /// `|⊥⟩ = √p|0⟩ + √(1-p)|2⟩`; the reflection `|~0⟩⟨~0| - |~1⟩⟨~1|` maps
    /// `X̃|0⟩ = |1⟩` to the normalized projection of `|2⟩` onto `|⊥⟩^⊥` and fixes `|⊥⟩`.
    pub fn new(p: f64) -> Result<Self> {
        check_unit_interval(p)?;
        let (s, t) = (p.sqrt(), (1.0 - p).sqrt());
        let v = |a: f64, b: f64, d: f64| DVector::from_vec(vec![c(a), c(b), c(d)]);
        let bot = v(s, 0.0, t);
        let u = v(-t, 0.0, s);
        let one = v(0.0, 1.0, 0.0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let tilde0 = (&one + &u) * c(r);
        let tilde1 = (&one - &u) * c(r);
        Ok(FeigeFamily { p, tilde0, tilde1, bot })
    }

    /// `[|~0⟩, |~1⟩, |⊥⟩]`.
    pub fn basis(&self) -> [&DVector<Complex64>; 3] {
        [&self.tilde0, &self.tilde1, &self.bot]
    }

    /// `P^x_a = W_x|ã⟩⟨ã|W_x` with `W_x = X̃Z̃^xX̃`, `Q^y_b = X̃P^y_bX̃`, and the
    /// maximally entangled state on `C^3 ⊗ C^3`.
    pub fn strategy(&self) -> QuantumStrategy {
        let xt = x_tilde();
        let w = [CMatrix::identity(3, 3), &xt * z_tilde() * &xt];
        let alice: Vec<Vec<CMatrix>> = w
            .iter()
            .map(|wx| self.basis().iter().map(|v| wx * projector(v) * wx).collect())
            .collect();
        let bob = alice
            .iter()
            .map(|pvm| pvm.iter().map(|p| &xt * p * &xt).collect())
            .collect();
        let amp = c(1.0 / 3f64.sqrt());
        let state = DVector::from_fn(9, |k, _| if k % 4 == 0 { amp } else { Complex64::zero() });
        QuantumStrategy {
            dim_a: 3,
            dim_b: 3,
            state,
            alice,
            bob,
        }
    }
}

pub fn feige_optimal_strategy(p: f64) -> Result<QuantumStrategy> {
    Ok(FeigeFamily::new(p)?.strategy())
}

/// Winning probability of the family: `p(2 - p + 2√(1-p))/3`.
pub fn winning_formula(p: f64) -> Result<f64> {
    check_unit_interval(p)?;
    Ok(p * (2.0 - p + 2.0 * (1.0 - p).sqrt()) / 3.0)
}

/// Maximizer of a unimodal `f` on `[lo, hi]` by golden-section search.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        }
    }
    0.5 * (lo + hi)
}

/// A symmetric matrix with positive entries and unit row sums.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NuMatrix {
    pub entries: Vec<Vec<f64>>,
    /// Present when built from rationals; enables exact checks.
    #[serde(skip)]
    pub exact: Option<Vec<Vec<Rational>>>,
}

impl NuMatrix {
    pub fn new(entries: Vec<Vec<f64>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|r| r.len() != n) {
            return Err(Error::BadNu("matrix must be square and nonempty".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let v = entries[i][j];
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::BadNu(format!("entry ({i},{j}) = {v} is not positive")));
                }
                if (v - entries[j][i]).abs() > ORTHO_TOL {
                    return Err(Error::BadNu(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
            let s: f64 = entries[i].iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::BadNu(format!("row {i} sums to {s}")));
            }
        }
        Ok(NuMatrix { entries, exact: None })
    }

    pub fn from_rational(nu: &[Vec<Rational>]) -> Result<Self> {
        ncpoly::check_nu(nu)?;
        if nu.iter().flatten().any(|v| !v.is_positive()) {
            return Err(Error::BadNu("entries must be strictly positive".into()));
        }
        let mut m = NuMatrix::new(nu.iter().map(|r| r.iter().map(rational::to_f64).collect()).collect())?;
        m.exact = Some(nu.to_vec());
        Ok(m)
    }

    /// The overlap matrix of the optimal Feige strategy.
    pub fn feige() -> Self {
        NuMatrix::from_rational(&ncpoly::feige_nu()).expect("feige nu is valid")
    }

    /// Rows of JSON numbers or rational strings such as `"9/16"`.
    pub fn from_json(s: &str) -> Result<Self> {
        let rows: Vec<Vec<serde_json::Value>> = serde_json::from_str(s)?;
        let all_strings = rows.iter().flatten().all(serde_json::Value::is_string);
        if all_strings {
            let exact = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|v| rational::parse(v.as_str().expect("checked string")))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            return NuMatrix::from_rational(&exact);
        }
        let entries = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| match v {
                        serde_json::Value::Number(n) => n.as_f64().ok_or_else(|| Error::BadNu("bad number".into())),
                        serde_json::Value::String(s) => rational::parse(s).map(|r| rational::to_f64(&r)),
                        _ => Err(Error::BadNu("entries must be numbers or rational strings".into())),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        NuMatrix::new(entries)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }
}

/// Phases `φ_1..φ_{n-1}` in `[0, 1)` with `Σ_j e^{2πiφ_j} a_j + a_n = 0`, when
/// some `a_l` equals the sum of the others (the solution is then unique).
pub fn phase_solve(a: &[f64]) -> Result<Vec<f64>> {
    if a.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::NonpositiveInput);
    }
    if a.len() < 2 {
        return Err(Error::NoUniqueSolution);
    }
    let total: f64 = a.iter().sum();
    let l = (0..a.len())
        .find(|&l| (total - 2.0 * a[l]).abs() <= PHASE_TOL * total.max(1.0))
        .ok_or(Error::NoUniqueSolution)?;
    Ok(phases_for(a.len(), l))
}

/// Exact variant: the condition is tested in rational arithmetic.
pub fn phase_solve_exact(a: &[Rational]) -> Result<Vec<f64>> {
    if a.iter().any(|v| !v.is_positive()) {
        return Err(Error::NonpositiveInput);
    }
    if a.len() < 2 {
        return Err(Error::NoUniqueSolution);
    }
    let total: Rational = a.iter().sum();
    let l = (0..a.len())
        .find(|&l| total == &a[l] + &a[l])
        .ok_or(Error::NoUniqueSolution)?;
    Ok(phases_for(a.len(), l))
}

fn phases_for(n: usize, l: usize) -> Vec<f64> {
    if l == n - 1 {
        vec![0.5; n - 1]
    } else {
        (0..n - 1).map(|j| if j == l { 0.5 } else { 0.0 }).collect()
    }
}

/// `√r` as `coef · √radical` with a square-free `radical`, when the numbers
/// are small enough to factor.
fn split_sqrt(r: &Rational) -> Option<(Rational, u64)> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().to_u64()?;
    let d = r.denom().to_u64()?;
    let mut m = (n as u128).checked_mul(d as u128)?;
    if m > 1u128 << 60 {
        return None;
    }
    let mut square: u64 = 1;
    let mut k: u128 = 2;
    while k * k <= m {
        while m % (k * k) == 0 {
            m /= k * k;
            square *= k as u64;
        }
        k += 1;
        if k * k * k > m && (m as u64).sqrt().pow(2) != m as u64 {
            break;
        }
    }
    let root = (m as u64).sqrt();
    if root * root == m as u64 {
        square *= root;
        m = 1;
    }
    Some((
        Rational::new(square.into(), d.into()),
        u64::try_from(m).ok()?,
    ))
}

/// Exact test of `Σ_{k≠l} √x_k = √x_l`, or `None` if a term is too large to factor.
fn sqrt_sum_equal(terms: &[Rational], l: usize) -> Option<bool> {
    let mut by_radical: std::collections::BTreeMap<u64, Rational> = std::collections::BTreeMap::new();
    for (k, t) in terms.iter().enumerate() {
        let (coef, rad) = split_sqrt(t)?;
        let e = by_radical.entry(rad).or_insert_with(Rational::zero);
        if k == l {
            *e -= coef;
        } else {
            *e += coef;
        }
    }
    Some(by_radical.values().all(Zero::is_zero))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairWitness {
    pub a: usize,
    pub b: usize,
    /// Some `l` with `Σ_{k≠l} √(ν_ak ν_bk) = √(ν_al ν_bl)`.
    pub witness: Option<usize>,
    /// Whether the witness was established in exact arithmetic.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegeneracyReport {
    /// Unordered pairs `a < b`.
    pub pairs: Vec<PairWitness>,
    pub pass: bool,
    /// The same condition for `a = b`; reported only, since row orthogonality
    /// involves distinct rows alone.
    pub diagonal: Vec<PairWitness>,
}

fn witness(nu: &NuMatrix, a: usize, b: usize) -> PairWitness {
    let n = nu.dim();
    if let Some(ex) = &nu.exact {
        let terms: Vec<Rational> = (0..n).map(|k| &ex[a][k] * &ex[b][k]).collect();
        let mut decided = true;
        for l in 0..n {
            match sqrt_sum_equal(&terms, l) {
                Some(true) => {
                    return PairWitness {
                        a,
                        b,
                        witness: Some(l),
                        exact: true,
                    }
                }
                Some(false) => {}
                None => decided = false,
            }
        }
        if decided {
            return PairWitness {
                a,
                b,
                witness: None,
                exact: true,
            };
        }
    }
    let e = &nu.entries;
    let terms: Vec<f64> = (0..n).map(|k| (e[a][k] * e[b][k]).sqrt()).collect();
    let total: f64 = terms.iter().sum();
    let w = (0..n).find(|&l| (total - 2.0 * terms[l]).abs() <= PHASE_TOL);
    PairWitness {
        a,
        b,
        witness: w,
        exact: false,
    }
}

pub fn check_degeneracy_condition(nu: &NuMatrix) -> DegeneracyReport {
    let n = nu.dim();
    let pairs: Vec<PairWitness> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .map(|(a, b)| witness(nu, a, b))
        .collect();
    let pass = pairs.iter().all(|p| p.witness.is_some());
    DegeneracyReport {
        pairs,
        pass,
        diagonal: (0..n).map(|a| witness(nu, a, a)).collect(),
    }
}

/// The unitary with `|h_ij| = √ν_ij` in dephased form (first row and column
/// real positive), phases solved row by row against the first row.
pub fn hadamard_like_from_nu(nu: &NuMatrix) -> Result<CMatrix> {
    let n = nu.dim();
    if n > 4 {
        return Err(Error::NotConstructible(format!("dimension {n} exceeds 4")));
    }
    let root: Vec<Vec<f64>> = nu.entries.iter().map(|r| r.iter().map(|v| v.sqrt()).collect()).collect();
    let mut h = CMatrix::zeros(n, n);
    for k in 0..n {
        h[(0, k)] = c(root[0][k]);
    }
    for a in 1..n {
        h[(a, 0)] = c(root[a][0]);
        // Σ_{k≥1} e^{2πiφ_k} √ν_0k √ν_ak + √ν_00 √ν_a0 = 0
        let mut coeffs: Vec<f64> = (1..n).map(|k| root[0][k] * root[a][k]).collect();
        coeffs.push(root[0][0] * root[a][0]);
        let phases = match &nu.exact {
            Some(ex) => {
                let mut sq: Vec<Rational> = (1..n).map(|k| &ex[0][k] * &ex[a][k]).collect();
                sq.push(&ex[0][0] * &ex[a][0]);
                let l = (0..n).find(|&l| sqrt_sum_equal(&sq, l) == Some(true));
                match l {
                    Some(l) => Ok(phases_for(n, l)),
                    None => phase_solve(&coeffs),
                }
            }
            None => phase_solve(&coeffs),
        }
        .map_err(|e| Error::NotConstructible(format!("row {a} against row 0: {e}")))?;
        for k in 1..n {
            h[(a, k)] = Complex64::from_polar(root[a][k], 2.0 * std::f64::consts::PI * phases[k - 1]);
        }
    }
    for a in 1..n {
        for b in a + 1..n {
            let dot: Complex64 = (0..n).map(|k| h[(a, k)] * h[(b, k)].conj()).sum();
            if dot.norm() > 1e-10 {
                return Err(Error::NotConstructible(format!("rows {a} and {b} are not orthogonal")));
            }
        }
    }
    Ok(h)
}

/// Two projection families on `C^n`, with `E_iF_jE_i = ν_ij E_i`.
#[derive(Debug, Clone)]
pub struct BiasedRep {
    pub n: usize,
    pub e: Vec<CMatrix>,
    pub f: Vec<CMatrix>,
    pub h: CMatrix,
}

impl BiasedRep {
    /// `(E, F) = (Alice's measurement 0, Alice's measurement 1)`.
    pub fn from_strategy(s: &QuantumStrategy) -> Result<Self> {
        if s.alice.len() != 2 {
            return Err(Error::ShapeMismatch("expected two measurements".into()));
        }
        let e = s.alice[0].clone();
        let f = s.alice[1].clone();
        let ev: Vec<DVector<Complex64>> = e.iter().map(rank_one_vector).collect::<Result<_>>()?;
        let fv: Vec<DVector<Complex64>> = f.iter().map(rank_one_vector).collect::<Result<_>>()?;
        let n = e.len();
        let h = CMatrix::from_fn(n, n, |i, j| ev[i].dotc(&fv[j]));
        Ok(BiasedRep { n: s.dim_a, e, f, h })
    }

    /// Relabels both families by `perm`: element `i` becomes element `perm[i]`.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        BiasedRep {
            n: self.n,
            e: perm.iter().map(|&i| self.e[i].clone()).collect(),
            f: perm.iter().map(|&i| self.f[i].clone()).collect(),
            h: CMatrix::from_fn(self.h.nrows(), self.h.ncols(), |i, j| self.h[(perm[i], perm[j])]),
        }
    }

    /// Largest deviation from `E_iF_jE_i = ν_ij E_i` and `F_jE_iF_j = ν_ij F_j`.
    pub fn residual(&self, nu: &NuMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, ei) in self.e.iter().enumerate() {
            for (j, fj) in self.f.iter().enumerate() {
                let v = c(nu.entries[i][j]);
                worst = worst.max(max_abs(&(ei * fj * ei - ei * v)));
                worst = worst.max(max_abs(&(fj * ei * fj - fj * v)));
            }
        }
        worst
    }

    /// Largest PVM defect over both families.
    pub fn pvm_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for fam in [&self.e, &self.f] {
            let mut sum = CMatrix::zeros(self.n, self.n);
            for p in fam.iter() {
                worst = worst.max(max_abs(&(p * p - p))).max(max_abs(&(p - p.adjoint())));
                sum += p;
            }
            worst = worst.max(max_abs(&(sum - CMatrix::identity(self.n, self.n))));
        }
        worst
    }
}

/// `E_i = |i⟩⟨i|`, `F_j = |h_j⟩⟨h_j|` for the columns of the Hadamard-like unitary.
pub fn nu_biased_rep(nu: &NuMatrix) -> Result<BiasedRep> {
    let n = nu.dim();
    if !(2..=3).contains(&n) {
        return Err(Error::NotConstructible(format!("dimension {n} is outside 2..=3")));
    }
    let report = check_degeneracy_condition(nu);
    if let Some(p) = report.pairs.iter().find(|p| p.witness.is_none()) {
        return Err(Error::NotConstructible(format!(
            "degeneracy condition fails for pair ({}, {})",
            p.a, p.b
        )));
    }
    let h = hadamard_like_from_nu(nu)?;
    let e = (0..n)
        .map(|i| CMatrix::from_fn(n, n, |r, s| if r == i && s == i { c(1.0) } else { Complex64::zero() }))
        .collect();
    let f = (0..n).map(|j| projector(&h.column(j).into_owned())).collect();
    Ok(BiasedRep { n, e, f, h })
}

/// Unit vector spanning the range of a rank-one projection.
fn rank_one_vector(p: &CMatrix) -> Result<DVector<Complex64>> {
    let eig = SymmetricEigen::new(p.clone());
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    if vals.len() > 1 && vals[1] >= RANK_ONE_TOL {
        return Err(Error::NotRankOne(format!("second eigenvalue {}", vals[1])));
    }
    if vals.first().is_none_or(|v| *v < 0.5) {
        return Err(Error::NotRankOne("projection is zero".into()));
    }
    let k = (0..p.nrows())
        .max_by(|&a, &b| p[(a, a)].re.total_cmp(&p[(b, b)].re))
        .expect("nonempty");
    let col = p.column(k).into_owned();
    let norm = col.norm();
    Ok(col / c(norm))
}

/// Witness of `π₂(E_i) = U π₁(E_{σ(i)}) U*` and `π₂(F_j) = U π₁(F_{σ'(j)}) U*`.
#[derive(Debug, Clone)]
pub struct Equivalence {
    pub u: CMatrix,
    pub e_perm: Vec<usize>,
    pub f_perm: Vec<usize>,
}

/// Searches simultaneous relabelings `(σ, σ')` and solves for the unitary
/// aligning rank-one ranges; `None` if no pair of relabelings works.
pub fn unitary_equivalence_check(r1: &BiasedRep, r2: &BiasedRep) -> Option<Equivalence> {
    let n = r1.e.len();
    if r1.n != r2.n || n != r2.e.len() || r1.f.len() != r2.f.len() || n == 0 || r1.n != n {
        return None;
    }
    let vecs = |fam: &[CMatrix]| fam.iter().map(rank_one_vector).collect::<Result<Vec<_>>>().ok();
    let (e1, f1, e2, f2) = (vecs(&r1.e)?, vecs(&r1.f)?, vecs(&r2.e)?, vecs(&r2.f)?);
    let perms = permutations(n);
    for sigma in &perms {
        for sigma2 in &perms {
            let mut phases = Vec::with_capacity(n);
            for i in 0..n {
                let num = e2[i].dotc(&f2[0]);
                let den = e1[sigma[i]].dotc(&f1[sigma2[0]]);
                if den.norm() < 1e-9 || num.norm() < 1e-9 {
                    break;
                }
                let r = num / den;
                phases.push(r / c(r.norm()));
            }
            if phases.len() != n {
                continue;
            }
            let mut u = CMatrix::zeros(n, n);
            for i in 0..n {
                u += &e2[i] * e1[sigma[i]].adjoint() * phases[i];
            }
            let conj = |m: &CMatrix| &u * m * u.adjoint();
            let ok = (0..n).all(|i| max_abs(&(conj(&r1.e[sigma[i]]) - &r2.e[i])) < 1e-9)
                && (0..n).all(|j| max_abs(&(conj(&r1.f[sigma2[j]]) - &r2.f[j])) < 1e-9);
            if ok {
                return Some(Equivalence {
                    u,
                    e_perm: sigma.clone(),
                    f_perm: sigma2.clone(),
                });
            }
        }
    }
    None
}

/// `ν_{aa'} = tr(P^0_a P^1_{a'})` for a strategy whose Alice projections are
/// all rank one.
pub fn nu_of_strategy(s: &QuantumStrategy) -> Result<Vec<Vec<f64>>> {
    if s.alice.len() != 2 {
        return Err(Error::ShapeMismatch("expected two Alice measurements".into()));
    }
    for p in s.alice.iter().flatten() {
        rank_one_vector(p)?;
    }
    Ok(s.alice[0]
        .iter()
        .map(|p| s.alice[1].iter().map(|q| (p * q).trace().re).collect())
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub value: f64,
    /// `9/16 - value`.
    pub epsilon: f64,
    /// `‖(I ⊗ Q^y_b)ψ - (γ^y_b ⊗ I)ψ‖`, indexed `3y + b`.
    pub gamma: Vec<f64>,
    /// `‖(r ⊗ I)ψ‖` over the relation set, ordered `(x, a, a')`.
    pub relations: Vec<f64>,
    pub max_residual: f64,
    /// `max_residual / √ε` when `ε > 0`; a diagnostic without a threshold.
    pub ratio: Option<f64>,
}

pub fn determining_residuals(s: &QuantumStrategy) -> Result<ResidualReport> {
    let g = game::feige();
    let value = eval_correlation(&g, &correlation_of_quantum(&g, s)?)?.to_f64();
    let m = s.state_matrix();
    let mut gamma = Vec::with_capacity(6);
    for (k, gp) in ncpoly::gamma_polynomials().iter().enumerate() {
        let (y, b) = (k / 3, k % 3);
        let lhs = &m * s.bob[y][b].transpose();
        let rhs = alice_operator(gp, s)? * &m;
        gamma.push((lhs - rhs).norm());
    }
    let relations = ncpoly::relation_set(&ncpoly::feige_nu())?
        .iter()
        .map(|r| Ok((alice_operator(r, s)? * &m).norm()))
        .collect::<Result<Vec<f64>>>()?;
    let max_residual = gamma.iter().chain(&relations).fold(0.0, |a: f64, b| a.max(*b));
    let epsilon = 9.0 / 16.0 - value;
    Ok(ResidualReport {
        value,
        epsilon,
        gamma,
        relations,
        max_residual,
        ratio: (epsilon > 1e-12).then(|| max_residual / epsilon.sqrt()),
    })
}

/// Evaluates an Alice-side polynomial in the Feige alphabet on `s`.
pub fn alice_polynomial(text: &str, s: &QuantumStrategy) -> Result<CMatrix> {
    alice_operator(&NcPoly::parse(text, Alphabet::FEIGE)?, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn family_basis_at_three_quarters() {
        let f = FeigeFamily::new(0.75).unwrap();
        let r = 1.0 / 8f64.sqrt();
        let want0 = [-r, std::f64::consts::FRAC_1_SQRT_2, 3f64.sqrt() * r];
        for k in 0..3 {
            assert!((f.tilde0[k].re - want0[k]).abs() < 1e-15);
            assert!((f.tilde1[k].re - [r, std::f64::consts::FRAC_1_SQRT_2, -3f64.sqrt() * r][k]).abs() < 1e-15);
        }
        let b = f.basis();
        for i in 0..3 {
            for j in 0..3 {
                let d = b[i].dotc(b[j]).norm();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < ORTHO_TOL);
            }
        }
        assert!(FeigeFamily::new(1.5).is_err());
        assert!(winning_formula(-0.1).is_err());
    }

    #[test]
    fn structural_identities() {
        let xt = x_tilde();
        let z = z_tilde();
        let w = &xt * &z * &xt;
        assert_eq!(&z * &w, &w * &z);
        let s = feige_optimal_strategy(0.3).unwrap();
        s.validate().unwrap();
        for y in 0..2 {
            for b in 0..3 {
                assert_eq!(s.bob[y][b], &xt * &s.alice[y][b] * &xt);
            }
        }
    }

    #[test]
    fn phase_examples() {
        assert_eq!(phase_solve(&[1.0, 1.0]).unwrap(), vec![0.5]);
        assert_eq!(phase_solve_exact(&[ratio(3, 16), ratio(3, 16), ratio(6, 16)]).unwrap(), vec![0.5, 0.5]);
        let a = [(27f64 / 128.0).sqrt(), (3f64 / 128.0).sqrt(), (12f64 / 128.0).sqrt()];
        let ph = phase_solve(&a).unwrap();
        assert_eq!(ph, vec![0.5, 0.0]);
        let res: Complex64 = ph
            .iter()
            .zip(&a)
            .map(|(p, v)| Complex64::from_polar(*v, 2.0 * std::f64::consts::PI * p))
            .sum::<Complex64>()
            + a[2];
        assert!(res.norm() < 1e-12);
        assert_eq!(phase_solve(&[1.0, 2.0, 4.0]), Err(Error::NoUniqueSolution));
        assert_eq!(phase_solve(&[1.0, 0.0]), Err(Error::NonpositiveInput));
    }

    #[test]
    fn square_root_splitting() {
        assert_eq!(split_sqrt(&ratio(27, 128)), Some((ratio(3, 16), 6)));
        assert_eq!(split_sqrt(&ratio(9, 16)), Some((ratio(3, 4), 1)));
        assert!(sqrt_sum_equal(&[ratio(27, 128), ratio(3, 128), ratio(12, 128)], 0).unwrap());
        assert!(!sqrt_sum_equal(&[ratio(1, 2), ratio(1, 3), ratio(1, 5)], 0).unwrap());
    }
}
