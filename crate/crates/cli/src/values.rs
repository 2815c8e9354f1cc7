use nlgame::classical::{self, BnbOptions};
use nlgame::game::{feige, parallel_repeat};
use nlgame::lp::{ns_value, Backend, NsOptions};
use nlgame::npa;
use nlgame::quantum::feige_optimal_strategy;
use nlgame::rational::ratio;
use nlgame::strategies::{
    classical_pair_strategy, classical_three_strategy, correlation_of_quantum, eval_correlation,
    eval_deterministic, ns_strategy_feige3, DeterministicStrategy, Value as GameValue,
};
use nlgame::Result;
use serde_json::{json, Value};

use crate::report::{exact, float, tagged};

pub const FAST_BNB_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    Classical,
    Quantum,
    Ns,
}

#[derive(Debug, Clone, Default)]
pub struct SearchFlags {
    pub extended: bool,
    pub budget: Option<u64>,
    pub seed: Option<DeterministicStrategy>,
}

fn game_value(v: &GameValue, tol: f64) -> Value {
    match v {
        GameValue::Exact(r) => exact(r),
        GameValue::Float(f) => float(*f, tol),
    }
}

pub fn classical_entry(n: usize, flags: &SearchFlags) -> Result<Value> {
    match n {
        1 | 2 => {
            let g = parallel_repeat(&feige(), n)?;
            let r = classical::classical_value_exhaustive(&g)?;
            Ok(json!({
                "value": exact(&r.optimum),
                "tag": "computed exactly (exhaustive)",
                "witness": r.witness,
            }))
        }
        3 => {
            let g = parallel_repeat(&feige(), 3)?;
            let seed = flags.seed.clone().unwrap_or_else(classical_three_strategy);
            let lower = eval_deterministic(&g, &seed)?;
            let budget = match (flags.extended, flags.budget) {
                (_, Some(b)) => Some(b),
                (true, None) => None,
                (false, None) => Some(FAST_BNB_BUDGET),
            };
            let opts = BnbOptions {
                budget,
                incumbent: Some(seed),
                symmetries: Some(classical::repetition_symmetries(&feige(), 3)?),
                ..BnbOptions::default()
            };
            let r = classical::classical_value_bnb(&g, &opts)?;
            if r.complete {
                Ok(json!({
                    "value": exact(&r.optimum),
                    "tag": "computed exactly (branch and bound)",
                    "nodes": r.nodes_explored,
                    "witness": r.witness,
                }))
            } else {
                Ok(json!({
                    "value": format!("[{}, 1/3]", nlgame::rational::format(&lower)),
                    "tag": "budget exhausted; certified interval",
                    "interval": [exact(&lower), exact(&ratio(1, 3))],
                    "incumbent": exact(&r.optimum),
                    "nodes": r.nodes_explored,
                }))
            }
        }
        4 => {
            let g = parallel_repeat(&feige(), 4)?;
            let v = eval_deterministic(&g, &classical_pair_strategy(2)?)?;
            Ok(json!({
                "value": exact(&v),
                "tag": "strategy witness + theorem (ω_ns ≤ 2^{-n/2} for even n)",
            }))
        }
        _ => Err(nlgame::Error::Domain(format!("n = {n} is outside 1..=4"))),
    }
}

pub fn ns_options(n: usize, backend: Backend, symmetric: bool) -> Result<NsOptions> {
    Ok(NsOptions {
        backend,
        symmetries: if symmetric {
            Some(classical::repetition_symmetries(&feige(), n)?)
        } else {
            None
        },
        ..NsOptions::default()
    })
}

pub fn ns_entry(n: usize) -> Result<Value> {
    match n {
        1 | 2 => {
            let g = parallel_repeat(&feige(), n)?;
            let r = ns_value(&g, &ns_options(n, Backend::Exact, true)?)?;
            Ok(tagged(game_value(&r.value, 0.0), "computed exactly (rational simplex)"))
        }
        3 => {
            let g = parallel_repeat(&feige(), 3)?;
            let r = ns_value(&g, &ns_options(3, Backend::Float, true)?)?;
            let witness = eval_correlation(&g, &ns_strategy_feige3())?;
            let tag = if r.promoted {
                "computed numerically, promoted to exact"
            } else {
                "computed numerically"
            };
            Ok(json!({
                "value": game_value(&r.value, 1e-7),
                "tag": tag,
                "float_solve": r.float_value,
                "witness_value": game_value(&witness, 0.0),
            }))
        }
        4 => {
            let g = parallel_repeat(&feige(), 4)?;
            let v = eval_deterministic(&g, &classical_pair_strategy(2)?)?;
            Ok(tagged(exact(&v), "strategy witness + theorem (ω_ns ≤ 2^{-n/2} for even n)"))
        }
        _ => Err(nlgame::Error::Domain(format!("n = {n} is outside 1..=4"))),
    }
}

pub fn quantum_entry(n: usize, flags: &SearchFlags) -> Result<Value> {
    match n {
        1 => {
            let g = feige();
            let s = feige_optimal_strategy(0.75)?;
            let lower = eval_correlation(&g, &correlation_of_quantum(&g, &s)?)?.to_f64();
            let level = npa::parse_level("1+AB")?;
            let upper = npa::quantum_upper_bound(&g, &level, false)?;
            Ok(json!({
                "value": float(upper, 1e-6),
                "tag": "computed numerically (NPA 1+AB upper bound, explicit strategy lower bound)",
                "lower_bound": float(lower, 1e-10),
                "upper_bound": float(upper, 1e-6),
                "claimed": exact(&ratio(9, 16)),
            }))
        }
        2 => {
            let c = classical_entry(2, flags)?;
            let ns = ns_entry(2)?;
            Ok(json!({
                "value": c["value"].clone(),
                "tag": "sandwich (classical = ns)",
                "classical": c["value"].clone(),
                "ns": ns["value"].clone(),
            }))
        }
        3 => Ok(json!({
            "value": "?",
            "tag": "unknown (open question)",
            "bounds": [exact(&ratio(5, 16)), exact(&ratio(1, 3))],
            "lower_source": "classical witness",
            "upper_source": "non-signalling value",
        })),
        4 => Ok(tagged(
            exact(&ratio(1, 4)),
            "sandwich (even-n theorem + strategy)",
        )),
        _ => Err(nlgame::Error::Domain(format!("n = {n} is outside 1..=4"))),
    }
}

pub fn entry(n: usize, which: Which, flags: &SearchFlags) -> Result<Value> {
    match which {
        Which::Classical => classical_entry(n, flags),
        Which::Ns => ns_entry(n),
        Which::Quantum => quantum_entry(n, flags),
    }
}
