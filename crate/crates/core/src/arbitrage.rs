//! Single-move arbitrage: the swap that maximises a user's gain against one
//! pool, given external prices.

use std::cmp::Ordering;

use thiserror::Error;

use crate::economics::{self, exchange_rate, EconError, PriceOracle};
use crate::scalar::{cmp_tol, Real};
use crate::semantics::Machine;
use crate::state::{Balance, Pool, State};
use crate::swap_rate::{ConstantProduct, Property, SwapRate};
use crate::token::{Symbol, Token, UserId};
use crate::tx::Transaction;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ArbError {
    #[error("invalid problem: {0}")]
    InvalidProblem(&'static str),
    #[error("swap rate does not declare {0:?}")]
    UncertifiedFunction(Vec<Property>),
    #[error("equilibrium not bracketed within the doubling budget")]
    NotBracketable,
    #[error(transparent)]
    Econ(#[from] EconError),
}

/// A user facing one pool. The user must hold none of the pool's minted
/// token, and both pool tokens must be priced.
#[derive(Clone, Debug, PartialEq)]
pub struct ArbitrageProblem<S> {
    pub pool: Pool<S>,
    pub oracle: PriceOracle<S>,
    pub user: UserId,
    pub user_balance: Balance<S>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Direction {
    pub t_in: Symbol,
    pub t_out: Symbol,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Move<S> {
    Empty,
    Swap { x: S, t_in: Symbol, t_out: Symbol },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArbitrageSolution<S> {
    pub mv: Move<S>,
    pub gain: S,
    /// Whether the user's own balance covers the input. The gain is
    /// reported for the optimal swap either way.
    pub feasible: bool,
}

impl<S: Real> ArbitrageSolution<S> {
    fn empty() -> Self {
        ArbitrageSolution {
            mv: Move::Empty,
            gain: S::zero(),
            feasible: true,
        }
    }
}

impl<S: Real> ArbitrageProblem<S> {
    pub fn new(
        pool: Pool<S>,
        oracle: PriceOracle<S>,
        user: UserId,
        user_balance: Balance<S>,
    ) -> Result<Self, ArbError> {
        let p = ArbitrageProblem {
            pool,
            oracle,
            user,
            user_balance,
        };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<(), ArbError> {
        if self.pool.pair.is_degenerate() {
            return Err(ArbError::InvalidProblem("pool tokens must differ"));
        }
        if !(self.pool.reserves[0] > S::zero() && self.pool.reserves[1] > S::zero()) {
            return Err(ArbError::InvalidProblem("pool reserves must be positive"));
        }
        if self.user_balance.get(&self.pool.minted()) != S::zero() {
            return Err(ArbError::InvalidProblem(
                "user must hold none of the pool's minted token",
            ));
        }
        self.oracle.get(self.pool.pair.first())?;
        self.oracle.get(self.pool.pair.second())?;
        Ok(())
    }

    /// The game's initial state: the user's wallet and the pool.
    pub fn state(&self) -> State<S> {
        State::new()
            .with_wallet(self.user.clone(), self.user_balance.clone())
            .with_pool(self.pool.clone())
    }

    /// `(r_in, r_out)` for swapping `t_in` into `t_out`.
    fn reserves(&self, d: &Direction) -> (S, S) {
        (
            *self.pool.reserve(&d.t_in).expect("token in pair"),
            *self.pool.reserve(&d.t_out).expect("token in pair"),
        )
    }

    fn directions(&self) -> [Direction; 2] {
        let (a, b) = (
            self.pool.pair.first().clone(),
            self.pool.pair.second().clone(),
        );
        [
            Direction {
                t_in: a.clone(),
                t_out: b.clone(),
            },
            Direction { t_in: b, t_out: a },
        ]
    }

    fn x_rate(&self, d: &Direction) -> Result<S, ArbError> {
        Ok(exchange_rate(&self.oracle, &d.t_in, &d.t_out)?)
    }

    /// Gain of swapping `x` in direction `d`, evaluated on the game state
    /// with the user's input balance topped up to `x` if needed.
    pub fn swap_gain<R: SwapRate<S>>(&self, rate: R, d: &Direction, x: S) -> Result<S, ArbError> {
        let mut s = self.state();
        let tin = Token::Atomic(d.t_in.clone());
        let w = s.wallet_mut(&self.user).expect("game state has the user");
        if w.balance.get(&tin) < x {
            w.balance.set(tin, x);
        }
        let m = Machine::new(rate);
        let tx = Transaction::swap(self.user.clone(), x, d.t_in.clone(), d.t_out.clone());
        Ok(economics::gain(&m, &s, &self.oracle, &self.user, &[tx])?.value)
    }

    fn feasible(&self, d: &Direction, x: S) -> bool {
        self.user_balance.get(&Token::Atomic(d.t_in.clone())) >= x
    }
}

/// The direction whose marginal swap rate `SX(0, r_in, r_out)` exceeds the
/// exchange rate, if any. At most one direction can qualify for a reversible
/// rate; `None` means the pool is at equilibrium within `tol`.
pub fn pick_direction<S: Real, R: SwapRate<S>>(
    p: &ArbitrageProblem<S>,
    rate: &R,
    tol: S,
) -> Result<Option<Direction>, ArbError> {
    p.check()?;
    for d in p.directions() {
        let (r_in, r_out) = p.reserves(&d);
        let marginal = rate.rate(&S::zero(), &r_in, &r_out);
        if cmp_tol(&marginal, &p.x_rate(&d)?, &tol) == Ordering::Greater {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

/// Closed-form optimum for the constant-product rate:
/// `x0 = sqrt(P(out)/P(in) * r_in * r_out) - r_in`.
pub fn solve_constant_product<S: Real>(
    p: &ArbitrageProblem<S>,
    tol: S,
) -> Result<ArbitrageSolution<S>, ArbError> {
    let Some(d) = pick_direction(p, &ConstantProduct, tol)? else {
        return Ok(ArbitrageSolution::empty());
    };
    let (r_in, r_out) = p.reserves(&d);
    let ratio = p.oracle.get(&d.t_out)? / p.oracle.get(&d.t_in)?;
    let x0 = (ratio * r_in * r_out).sqrt() - r_in;
    if x0 <= S::zero() {
        return Ok(ArbitrageSolution::empty());
    }
    finish(p, ConstantProduct, d, x0)
}

fn finish<S: Real, R: SwapRate<S>>(
    p: &ArbitrageProblem<S>,
    rate: R,
    d: Direction,
    x0: S,
) -> Result<ArbitrageSolution<S>, ArbError> {
    let gain = p.swap_gain(rate, &d, x0)?;
    Ok(ArbitrageSolution {
        feasible: p.feasible(&d, x0),
        mv: Move::Swap {
            x: x0,
            t_in: d.t_in,
            t_out: d.t_out,
        },
        gain,
    })
}

const MAX_DOUBLINGS: usize = 200;
const MAX_BISECTIONS: usize = 256;

/// Marginal rate after swapping `x`, minus the exchange rate:
/// `g(x) = SX(0, r_in + x, r_out - x*SX(x, r_in, r_out)) - X`.
/// Once the swap would empty the output reserve the marginal rate is zero.
fn equilibrium_gap<S: Real, R: SwapRate<S>>(rate: &R, r_in: S, r_out: S, x_rate: S, x: S) -> S {
    let out_after = r_out - x * rate.rate(&x, &r_in, &r_out);
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(out_after > S::zero()) {
        return -x_rate;
    }
    rate.rate(&S::zero(), &(r_in + x), &out_after) - x_rate
}

/// Upper end of a bracket `[0, hi]` with `g(hi) < 0`, doubling from 1.
fn bracket<S: Real, R: SwapRate<S>>(rate: &R, r_in: S, r_out: S, x_rate: S) -> Option<S> {
    let mut hi = S::one();
    for _ in 0..=MAX_DOUBLINGS {
        if equilibrium_gap(rate, r_in, r_out, x_rate, hi) < S::zero() {
            return Some(hi);
        }
        hi = hi + hi;
    }
    None
}

fn required() -> [Property; 4] {
    [
        Property::OutputBound,
        Property::StrictlyMonotonic,
        Property::Additive,
        Property::Reversible,
    ]
}

/// Optimum for any rate declaring output-boundedness, strict monotonicity,
/// additivity and reversibility: the input at which the marginal rate after
/// the swap equals the exchange rate, found by bisection on `[0, hi]`.
/// Stops when `|g| <= tol * X` or the bracket cannot shrink further.
pub fn solve_generic<S: Real, R: SwapRate<S>>(
    p: &ArbitrageProblem<S>,
    rate: &R,
    tol: S,
) -> Result<ArbitrageSolution<S>, ArbError> {
    let declared = rate.declared();
    let missing: Vec<Property> = required()
        .into_iter()
        .filter(|q| !declared.contains(q))
        .collect();
    if !missing.is_empty() {
        return Err(ArbError::UncertifiedFunction(missing));
    }
    let Some(d) = pick_direction(p, rate, tol)? else {
        return Ok(ArbitrageSolution::empty());
    };
    let (r_in, r_out) = p.reserves(&d);
    let x_rate = p.x_rate(&d)?;
    if equilibrium_gap(rate, r_in, r_out, x_rate, S::zero()) <= S::zero() {
        return Ok(ArbitrageSolution::empty());
    }
    let mut hi = bracket(rate, r_in, r_out, x_rate).ok_or(ArbError::NotBracketable)?;
    let mut lo = S::zero();
    let two = S::one() + S::one();
    let mut mid = (lo + hi) / two;
    for _ in 0..MAX_BISECTIONS {
        mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        let g = equilibrium_gap(rate, r_in, r_out, x_rate, mid);
        if g.abs() <= tol * x_rate {
            break;
        }
        if g > S::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    finish(p, rate, d, mid)
}

/// Best of `grid` log-spaced inputs in `[x_max * 1e-12, x_max]`, where
/// `x_max` is the bisection bracket for direction `d` (or `10 * r_in` if
/// there is none). Each point is scored with the net-worth gain, so this is
/// independent of the equilibrium condition.
pub fn brute_force<S: Real, R: SwapRate<S>>(
    p: &ArbitrageProblem<S>,
    rate: &R,
    d: &Direction,
    grid: usize,
) -> Result<(S, S), ArbError> {
    assert!(grid >= 2, "grid needs at least two points");
    p.check()?;
    let (r_in, r_out) = p.reserves(d);
    let x_max = bracket(rate, r_in, r_out, p.x_rate(d)?).unwrap_or(r_in * S::lit(10.0));
    let span = S::lit(-12.0);
    let last = S::from_usize(grid - 1).expect("grid fits the scalar");
    let mut best: Option<(S, S)> = None;
    for i in 0..grid {
        let frac = S::one() - S::from_usize(i).expect("index fits the scalar") / last;
        let x = x_max * S::lit(10.0).powf(span * frac);
        let g = p.swap_gain(rate, d, x)?;
        if best.as_ref().is_none_or(|(_, b)| g > *b) {
            best = Some((x, g));
        }
    }
    Ok(best.expect("grid is non-empty"))
}
