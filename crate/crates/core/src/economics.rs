//! Prices, net worth and gain.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::scalar::{cmp_tol, Scalar};
use crate::semantics::{Machine, Rejection};
use crate::state::State;
use crate::swap_rate::SwapRate;
use crate::token::{Pair, Symbol, Token, UserId};
use crate::tx::{Action, Transaction};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EconError {
    #[error("no price for token {0}")]
    UnpricedToken(Token),
    #[error("minted supply of {0} is zero")]
    ZeroMintedSupply(Pair),
    #[error("no pool for {0}")]
    NoSuchPool(Pair),
    #[error("price of {0} must be positive and finite")]
    NonPositivePrice(Symbol),
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error("transaction rejected: {0}")]
    Rejected(Rejection),
}

/// Prices of atomic tokens. Every stored price is positive and finite.
#[derive(Clone, Debug, PartialEq)]
pub struct PriceOracle<S> {
    prices: BTreeMap<Symbol, S>,
}

impl<S> Default for PriceOracle<S> {
    fn default() -> Self {
        PriceOracle {
            prices: BTreeMap::new(),
        }
    }
}

impl<S: Scalar> PriceOracle<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_prices(prices: impl IntoIterator<Item = (Symbol, S)>) -> Result<Self, EconError> {
        prices
            .into_iter()
            .try_fold(Self::new(), |o, (t, p)| o.set_price(t, p))
    }

    /// A new oracle with `t` priced at `p`. Changing prices between steps
    /// does not preserve global net worth.
    pub fn set_price(&self, t: Symbol, p: S) -> Result<Self, EconError> {
        if !(p > S::zero() && p.is_finite_scalar()) {
            return Err(EconError::NonPositivePrice(t));
        }
        let mut next = self.clone();
        next.prices.insert(t, p);
        Ok(next)
    }

    pub fn remove_price(&self, t: &Symbol) -> Self {
        let mut next = self.clone();
        next.prices.remove(t);
        next
    }

    pub fn get(&self, t: &Symbol) -> Result<S, EconError> {
        self.prices
            .get(t)
            .cloned()
            .ok_or_else(|| EconError::UnpricedToken(Token::Atomic(t.clone())))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &S)> {
        self.prices.iter()
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }
}

/// Price of a token: the oracle for atomic tokens; for a minted token, the
/// value of the pool's reserves divided by the minted supply.
pub fn price<S: Scalar>(s: &State<S>, o: &PriceOracle<S>, t: &Token) -> Result<S, EconError> {
    match t {
        Token::Atomic(sym) => o.get(sym),
        Token::Minted(pair) => {
            let pool = s
                .pool(pair)
                .ok_or_else(|| EconError::NoSuchPool(pair.clone()))?;
            let supply = s.supply(t);
            if supply <= S::zero() {
                return Err(EconError::ZeroMintedSupply(pair.clone()));
            }
            let value = pool.reserves[0].clone() * o.get(pair.first())?
                + pool.reserves[1].clone() * o.get(pair.second())?;
            Ok(value / supply)
        }
    }
}

/// Units of `t1` needed to buy one unit of `t0`.
pub fn exchange_rate<S: Scalar>(
    o: &PriceOracle<S>,
    t0: &Symbol,
    t1: &Symbol,
) -> Result<S, EconError> {
    Ok(o.get(t0)? / o.get(t1)?)
}

/// Value of `u`'s wallet; zero when `u` has no wallet. Zero entries are
/// skipped, so they need no price.
pub fn net_worth<S: Scalar>(s: &State<S>, o: &PriceOracle<S>, u: &UserId) -> Result<S, EconError> {
    let Some(w) = s.wallet(u) else {
        return Ok(S::zero());
    };
    let mut total = S::zero();
    for (t, v) in w.balance.iter() {
        if *v != S::zero() {
            total = total + v.clone() * price(s, o, t)?;
        }
    }
    Ok(total)
}

/// Sum of every wallet's net worth. Pools count only through minted tokens.
pub fn global_net_worth<S: Scalar>(s: &State<S>, o: &PriceOracle<S>) -> Result<S, EconError> {
    let mut total = S::zero();
    for u in s.users() {
        total = total + net_worth(s, o, u)?;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gain<S> {
    pub value: S,
    /// `false` when the trace was not enabled; `value` is then zero.
    pub enabled: bool,
}

/// Net-worth change of `u` across `tr`, or zero if `tr` is not enabled.
pub fn gain<S: Scalar, R: SwapRate<S>>(
    m: &Machine<S, R>,
    s: &State<S>,
    o: &PriceOracle<S>,
    u: &UserId,
    tr: &[Transaction<S>],
) -> Result<Gain<S>, EconError> {
    match m.run_final(s, tr) {
        Err(_) => Ok(Gain {
            value: S::zero(),
            enabled: false,
        }),
        Ok(after) => Ok(Gain {
            value: net_worth(&after, o, u)? - net_worth(s, o, u)?,
            enabled: true,
        }),
    }
}

struct SwapView<S> {
    x: S,
    t_in: Symbol,
    t_out: Symbol,
    rate: S,
    pair: Pair,
}

fn swap_view<S: Scalar, R: SwapRate<S>>(
    m: &Machine<S, R>,
    s: &State<S>,
    tx: &Transaction<S>,
) -> Result<SwapView<S>, EconError> {
    let (x, t_in, t_out) = match &tx.action {
        Action::Swap { x, t_in, t_out } | Action::GSwap { x, t_in, t_out, .. } => {
            (x.clone(), t_in.clone(), t_out.clone())
        }
        _ => return Err(EconError::PreconditionViolated("transaction is not a swap")),
    };
    m.apply(s, tx).map_err(EconError::Rejected)?;
    let pair = tx.pair();
    let pool = s.pool(&pair).expect("enabled swap has a pool");
    let rate = m.rate.rate(
        &x,
        pool.reserve(&t_in).expect("token in pair"),
        pool.reserve(&t_out).expect("token in pair"),
    );
    Ok(SwapView {
        x,
        t_in,
        t_out,
        rate,
        pair,
    })
}

/// Closed-form gain of `holder` caused by the swap `tx`:
/// for the swapper `x * (SX*P(out) - P(in)) * (1 - h/supply)`, for anyone
/// else `-x * (SX*P(out) - P(in)) * h/supply`, where `h` is the holder's
/// minted-token balance before the swap.
pub fn swap_gain_closed<S: Scalar, R: SwapRate<S>>(
    m: &Machine<S, R>,
    s: &State<S>,
    o: &PriceOracle<S>,
    holder: &UserId,
    tx: &Transaction<S>,
) -> Result<S, EconError> {
    let v = swap_view(m, s, tx)?;
    if s.wallet(holder).is_none() {
        return Err(EconError::PreconditionViolated("holder has no wallet"));
    }
    let minted = Token::Minted(v.pair.clone());
    let supply = s.supply(&minted);
    if supply <= S::zero() {
        return Err(EconError::ZeroMintedSupply(v.pair));
    }
    let share = s.holding(holder, &minted) / supply;
    let edge = v.x * (v.rate * o.get(&v.t_out)? - o.get(&v.t_in)?);
    if *holder == tx.user {
        Ok(edge * (S::one() - share))
    } else {
        Ok(S::zero() - edge * share)
    }
}

/// Sign of the swapper's gain, read off the comparison of the swap rate
/// with the exchange rate. Requires the swapper to hold none of the pair's
/// minted token.
pub fn gain_sign<S: Scalar, R: SwapRate<S>>(
    m: &Machine<S, R>,
    s: &State<S>,
    o: &PriceOracle<S>,
    tx: &Transaction<S>,
) -> Result<Ordering, EconError> {
    let v = swap_view(m, s, tx)?;
    if s.holding(&tx.user, &Token::Minted(v.pair.clone())) != S::zero() {
        return Err(EconError::PreconditionViolated(
            "swapper holds minted tokens of the pair",
        ));
    }
    let x = exchange_rate(o, &v.t_in, &v.t_out)?;
    Ok(cmp_tol(&v.rate, &x, &m.tol))
}
