//! The non-signalling value as a linear program over correlation tables.

use std::collections::HashMap;

use num_traits::{One, Zero};

use super::{solve_exact, solve_float, Backend, ExactSolution, LpProblem, Pricing, Relation};
use crate::error::{Error, Result};
use crate::game::{Game, Relabeling};
use crate::rational::{self, Rational};
use crate::strategies::{is_nonsignalling, Correlation, Value};

/// Default variable budgets of the two backends.
pub const EXACT_VAR_BUDGET: usize = 5_000;
pub const FLOAT_VAR_BUDGET: usize = 100_000;

/// Variables are the entries of `p(a,b|x,y)` in predicate index order. Rows:
/// normalization per `(x,y)`, then Bob's marginal for each `(b,y)` equated
/// between consecutive `x`, then Alice's for each `(a,x)` between consecutive `y`.
pub fn ns_lp(game: &Game) -> LpProblem {
    let (xs, ys, as_, bs) = game.sizes();
    let mut lp = LpProblem::new(game.table_len());
    for a in 0..as_ {
        for b in 0..bs {
            for x in 0..xs {
                for y in 0..ys {
                    if game.wins(a, b, x, y) {
                        lp.objective[game.predicate_index(a, b, x, y)] = game.prior(x, y).clone();
                    }
                }
            }
        }
    }
    let one = Rational::one;
    for x in 0..xs {
        for y in 0..ys {
            let row = (0..as_)
                .flat_map(|a| (0..bs).map(move |b| (a, b)))
                .map(|(a, b)| (game.predicate_index(a, b, x, y), one()))
                .collect();
            lp.add(row, Relation::Eq, one());
        }
    }
    for y in 0..ys {
        for b in 0..bs {
            for x in 0..xs.saturating_sub(1) {
                let mut row = Vec::with_capacity(2 * as_);
                for a in 0..as_ {
                    row.push((game.predicate_index(a, b, x, y), one()));
                    row.push((game.predicate_index(a, b, x + 1, y), -one()));
                }
                lp.add(row, Relation::Eq, Rational::zero());
            }
        }
    }
    for x in 0..xs {
        for a in 0..as_ {
            for y in 0..ys.saturating_sub(1) {
                let mut row = Vec::with_capacity(2 * bs);
                for b in 0..bs {
                    row.push((game.predicate_index(a, b, x, y), one()));
                    row.push((game.predicate_index(a, b, x, y + 1), -one()));
                }
                lp.add(row, Relation::Eq, Rational::zero());
            }
        }
    }
    lp
}

/// An LP restricted to points that are constant on the orbits of a symmetry group.
#[derive(Debug, Clone)]
pub struct SymmetricLp {
    pub lp: LpProblem,
    pub orbit_of: Vec<usize>,
}

impl SymmetricLp {
    pub fn expand<T: Clone>(&self, z: &[T]) -> Vec<T> {
        self.orbit_of.iter().map(|&o| z[o].clone()).collect()
    }
}

/// Orbits of correlation-table indices under game relabelings.
pub fn table_orbits(game: &Game, symmetries: &[Relabeling]) -> Vec<usize> {
    let n = game.table_len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let (xs, ys, as_, bs) = game.sizes();
    for r in symmetries {
        if r.x_perm.len() != xs || r.y_perm.len() != ys || r.a_perm.len() != as_ || r.b_perm.len() != bs {
            continue;
        }
        for a in 0..as_ {
            for b in 0..bs {
                for x in 0..xs {
                    for y in 0..ys {
                        let i = game.predicate_index(a, b, x, y);
                        let j = game.predicate_index(r.a_perm[a], r.b_perm[b], r.x_perm[x], r.y_perm[y]);
                        let (u, v) = (find(&mut parent, i), find(&mut parent, j));
                        if u != v {
                            parent[u.max(v)] = u.min(v);
                        }
                    }
                }
            }
        }
    }
    let mut label = HashMap::new();
    (0..n)
        .map(|i| {
            let root = find(&mut parent, i);
            let next = label.len();
            *label.entry(root).or_insert(next)
        })
        .collect()
}

/// Restricts `lp` to orbit-constant points; duplicate rows are dropped.
pub fn symmetrize(lp: &LpProblem, orbit_of: &[usize]) -> SymmetricLp {
    let k = orbit_of.iter().max().map_or(0, |m| m + 1);
    let mut out = LpProblem::new(k);
    for (j, c) in lp.objective.iter().enumerate() {
        out.objective[orbit_of[j]] += c;
    }
    let mut seen = std::collections::HashSet::new();
    for row in &lp.constraints {
        let mut agg = std::collections::BTreeMap::<usize, Rational>::new();
        for (j, c) in &row.coeffs {
            *agg.entry(orbit_of[*j]).or_insert_with(Rational::zero) += c;
        }
        let coeffs: Vec<(usize, Rational)> = agg.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if coeffs.is_empty() && row.rhs.is_zero() {
            continue;
        }
        // scale so the leading coefficient is 1 before deduplicating
        let lead = coeffs.first().map(|(_, c)| c.clone()).unwrap_or_else(Rational::one);
        let key: Vec<String> = coeffs
            .iter()
            .map(|(j, c)| format!("{j}:{}", c / &lead))
            .chain([
                format!("{:?}{}", row.rel, lead > Rational::zero()),
                format!("{}", &row.rhs / &lead),
            ])
            .collect();
        if !seen.insert(key) {
            continue;
        }
        out.add(coeffs, row.rel, row.rhs.clone());
    }
    SymmetricLp {
        lp: out,
        orbit_of: orbit_of.to_vec(),
    }
}

#[derive(Debug, Clone)]
pub struct NsOptions {
    pub backend: Backend,
    /// Relabelings fixing the game; the LP is solved over orbit-constant points.
    pub symmetries: Option<Vec<Relabeling>>,
    pub pricing: Pricing,
    /// Denominator bound for promoting a floating solution to an exact one.
    pub promote_den: u64,
    pub var_budget: Option<usize>,
}

impl Default for NsOptions {
    fn default() -> Self {
        NsOptions {
            backend: Backend::Exact,
            symmetries: None,
            pricing: Pricing::Bland,
            promote_den: 1000,
            var_budget: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NsResult {
    pub value: Value,
    pub float_value: Option<f64>,
    pub witness: Correlation,
    /// A floating solve whose rounded primal and dual points were verified exactly.
    pub promoted: bool,
    /// Exact primal/dual optimality was checked.
    pub certified: bool,
    pub rows: usize,
    pub vars: usize,
}

pub fn ns_value(game: &Game, opts: &NsOptions) -> Result<NsResult> {
    let full = ns_lp(game);
    let sym = opts.symmetries.as_ref().map(|s| symmetrize(&full, &table_orbits(game, s)));
    let solved = sym.as_ref().map_or(&full, |s| &s.lp);
    let expand = |z: &[Rational]| sym.as_ref().map_or_else(|| z.to_vec(), |s| s.expand(z));
    let budget = opts.var_budget.unwrap_or(match opts.backend {
        Backend::Exact => EXACT_VAR_BUDGET,
        Backend::Float => FLOAT_VAR_BUDGET,
    });
    if solved.num_vars() > budget {
        return Err(Error::BudgetExceeded {
            size: solved.num_vars() as u128,
            budget: budget as u128,
        });
    }
    let rows = solved.constraints.len();
    let vars = solved.num_vars();
    match opts.backend {
        Backend::Exact => {
            let sol = solve_exact(solved, opts.pricing)?;
            solved.certify(&sol)?;
            let x = expand(&sol.x);
            check_full(&full, &x, &sol.objective)?;
            let witness = Correlation::exact(game.sizes(), x)?;
            debug_assert!(is_nonsignalling(&witness, 0.0));
            Ok(NsResult {
                value: Value::Exact(sol.objective),
                float_value: None,
                witness,
                promoted: false,
                certified: true,
                rows,
                vars,
            })
        }
        Backend::Float => {
            let sol = solve_float(solved)?;
            let promoted = promote(solved, &sol.x, &sol.duals, opts.promote_den)
                .filter(|e| (rational::to_f64(&e.objective) - sol.objective).abs() < 1e-7)
                .filter(|e| check_full(&full, &expand(&e.x), &e.objective).is_ok());
            match promoted {
                Some(e) => Ok(NsResult {
                    value: Value::Exact(e.objective.clone()),
                    float_value: Some(sol.objective),
                    witness: Correlation::exact(game.sizes(), expand(&e.x))?,
                    promoted: true,
                    certified: true,
                    rows,
                    vars,
                }),
                None => {
                    let x = sym.as_ref().map_or_else(|| sol.x.clone(), |s| s.expand(&sol.x));
                    Ok(NsResult {
                        value: Value::Float(sol.objective),
                        float_value: Some(sol.objective),
                        witness: Correlation::float(game.sizes(), x)?,
                        promoted: false,
                        certified: false,
                        rows,
                        vars,
                    })
                }
            }
        }
    }
}

fn check_full(full: &LpProblem, x: &[Rational], objective: &Rational) -> Result<()> {
    if !full.is_feasible(x) || &full.objective_value(x) != objective {
        return Err(Error::Invalid("expanded witness fails the full non-signalling LP".into()));
    }
    Ok(())
}

/// Rounds a floating primal/dual pair and checks it exactly.
fn promote(lp: &LpProblem, x: &[f64], duals: &[f64], max_den: u64) -> Option<ExactSolution> {
    let xr = x
        .iter()
        .map(|&v| rational::rationalize(v, max_den))
        .collect::<Result<Vec<_>>>()
        .ok()?;
    let yr = duals
        .iter()
        .map(|&v| rational::rationalize(v, max_den))
        .collect::<Result<Vec<_>>>()
        .ok()?;
    let sol = ExactSolution {
        objective: lp.objective_value(&xr),
        x: xr,
        duals: yr,
        pivots: 0,
    };
    lp.certify(&sol).ok()?;
    Some(sol)
}
