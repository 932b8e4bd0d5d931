//! JSON documents for states, prices and arbitrage solutions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::arbitrage::{ArbitrageSolution, Move};
use crate::economics::{EconError, PriceOracle};
use crate::state::{Balance, Pool, State};
use crate::token::{Symbol, Token, UserId};

#[derive(Debug, Error)]
pub enum DocError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Price(#[from] EconError),
}

/// `{"prices": {...}, "wallets": {"A": {"t0": 1.0}}, "pools": [...]}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    #[serde(default)]
    pub prices: BTreeMap<Symbol, f64>,
    #[serde(default)]
    pub wallets: BTreeMap<UserId, BTreeMap<Token, f64>>,
    #[serde(default)]
    pub pools: Vec<PoolDoc>,
}

/// `pair` is written sorted; `reserves[i]` belongs to `pair[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolDoc {
    pub pair: [Symbol; 2],
    pub reserves: [f64; 2],
}

impl StateDoc {
    pub fn from_state(s: &State<f64>, o: &PriceOracle<f64>) -> Self {
        StateDoc {
            prices: o.iter().map(|(t, p)| (t.clone(), *p)).collect(),
            wallets: s
                .wallets
                .iter()
                .map(|w| {
                    let b = w.balance.iter().map(|(t, v)| (t.clone(), *v)).collect();
                    (w.user.clone(), b)
                })
                .collect(),
            pools: s
                .pools
                .iter()
                .map(|p| PoolDoc {
                    pair: [p.pair.first().clone(), p.pair.second().clone()],
                    reserves: p.reserves,
                })
                .collect(),
        }
    }

    /// The state and oracle described. Pools given in either token order
    /// are aligned; structural problems are left for `State::validate`.
    pub fn to_state(&self) -> Result<(State<f64>, PriceOracle<f64>), DocError> {
        let mut s = State::new();
        for (u, entries) in &self.wallets {
            let b: Balance<f64> = entries.iter().map(|(t, v)| (t.clone(), *v)).collect();
            s = s.with_wallet(u.clone(), b);
        }
        for p in &self.pools {
            s = s.with_pool(Pool::new(
                p.pair[0].clone(),
                p.reserves[0],
                p.pair[1].clone(),
                p.reserves[1],
            ));
        }
        let o = PriceOracle::from_prices(self.prices.iter().map(|(t, p)| (t.clone(), *p)))?;
        Ok((s, o))
    }

    pub fn parse(text: &str) -> Result<Self, DocError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("state documents always serialize")
    }
}

/// `{"move": {"kind": "swap", "x", "in", "out"} | {"kind": "empty"}, "gain", "feasible"}`.
pub fn solution_json(sol: &ArbitrageSolution<f64>) -> Value {
    let mv = match &sol.mv {
        Move::Empty => json!({ "kind": "empty" }),
        Move::Swap { x, t_in, t_out } => json!({
            "kind": "swap",
            "x": x,
            "in": t_in.as_str(),
            "out": t_out.as_str(),
        }),
    };
    json!({ "move": mv, "gain": sol.gain, "feasible": sol.feasible })
}
