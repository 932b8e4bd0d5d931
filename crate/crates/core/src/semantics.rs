//! The step function: deposits, swaps and redeems, with their guarded forms.

use std::fmt;

use thiserror::Error;

use crate::scalar::{approx_eq, Scalar};
use crate::state::{Pool, State};
use crate::swap_rate::SwapRate;
use crate::token::{Pair, Symbol, Token, UserId};
use crate::tx::{Action, Transaction};

/// The rule premise that blocked a transaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Error)]
pub enum Rejection {
    #[error("payer does not hold enough tokens")]
    InsufficientBalance,
    /// No pool exists for the pair but its minted token is in circulation,
    /// so a pool-creating deposit is not allowed either.
    #[error("minted token already in circulation")]
    PoolExists,
    #[error("no pool for the token pair")]
    PoolMissing,
    #[error("deposit does not match the pool's reserve ratio")]
    RatioMismatch,
    #[error("redeem would consume the whole minted supply")]
    SupplyDepleted,
    #[error("swap output is not below the output reserve")]
    OutputExceedsReserve,
    #[error("amount must be strictly positive")]
    NonPositiveAmount,
    #[error("guard bound not met")]
    GuardViolated,
    #[error("the two tokens must differ")]
    SameToken,
}

impl Rejection {
    /// Stable identifier used in CLI output and tests.
    pub fn id(self) -> &'static str {
        match self {
            Rejection::InsufficientBalance => "InsufficientBalance",
            Rejection::PoolExists => "PoolExists",
            Rejection::PoolMissing => "PoolMissing",
            Rejection::RatioMismatch => "RatioMismatch",
            Rejection::SupplyDepleted => "SupplyDepleted",
            Rejection::OutputExceedsReserve => "OutputExceedsReserve",
            Rejection::NonPositiveAmount => "NonPositiveAmount",
            Rejection::GuardViolated => "GuardViolated",
            Rejection::SameToken => "SameToken",
        }
    }
}

/// What an accepted step did, in terms of amounts moved.
#[derive(Clone, Debug, PartialEq)]
pub enum Effect<S> {
    /// A pool was created; `minted` units went to the payer.
    Created {
        minted: S,
    },
    /// `amounts` follow the token order written in the transaction.
    Deposited {
        amounts: [S; 2],
        minted: S,
    },
    /// `paid` is in canonical pair order.
    Redeemed {
        burned: S,
        paid: [S; 2],
    },
    Swapped {
        x: S,
        y: S,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Halted<S> {
    /// States reached before the failing step, starting with the input.
    pub states: Vec<State<S>>,
    pub index: usize,
    pub reason: Rejection,
}

impl<S> fmt::Display for Halted<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "transaction {} rejected: {}",
            self.index,
            self.reason.id()
        )
    }
}

impl<S: fmt::Debug> std::error::Error for Halted<S> {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("no pool for the pair")]
    NoSuchPool,
    #[error("minted supply is zero")]
    ZeroMintedSupply,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum NotMergeable {
    #[error("transactions belong to different users")]
    DifferentUsers,
    #[error("transactions have different types")]
    DifferentKinds,
    #[error("transactions act on different token pairs")]
    DifferentPairs,
    #[error("swaps go in opposite directions")]
    OppositeDirections,
    #[error("guarded transactions are not merged")]
    Guarded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum InvertError {
    #[error("transaction is not enabled: {0}")]
    NotEnabled(Rejection),
    #[error("pool-creating deposits have no inverse")]
    NotInvertible,
}

/// Redeem rate of side `side` (canonical order): reserve over minted supply.
pub fn redeem_rate<S: Scalar>(s: &State<S>, pair: &Pair, side: usize) -> Result<S, QueryError> {
    let pool = s.pool(pair).ok_or(QueryError::NoSuchPool)?;
    let supply = s.supply(&Token::Minted(pair.clone()));
    if supply <= S::zero() {
        return Err(QueryError::ZeroMintedSupply);
    }
    Ok(pool.reserves[side].clone() / supply)
}

/// Combines two transactions of one user into a single one with the summed
/// amounts. Swaps are combined only in the same direction; the result is
/// equivalent to the pair only under an additive swap rate.
pub fn merge<S: Scalar>(
    a: &Transaction<S>,
    b: &Transaction<S>,
) -> Result<Transaction<S>, NotMergeable> {
    if a.user != b.user {
        return Err(NotMergeable::DifferentUsers);
    }
    if a.is_guarded() || b.is_guarded() {
        return Err(NotMergeable::Guarded);
    }
    if a.kind() != b.kind() {
        return Err(NotMergeable::DifferentKinds);
    }
    if a.pair() != b.pair() {
        return Err(NotMergeable::DifferentPairs);
    }
    let action = match (&a.action, &b.action) {
        (
            Action::Dep { v0, t0, v1, t1 },
            Action::Dep {
                v0: w0,
                t0: u0,
                v1: w1,
                ..
            },
        ) => {
            let (w0, w1) = if u0 == t0 {
                (w0.clone(), w1.clone())
            } else {
                (w1.clone(), w0.clone())
            };
            Action::Dep {
                v0: v0.clone() + w0,
                t0: t0.clone(),
                v1: v1.clone() + w1,
                t1: t1.clone(),
            }
        }
        (Action::Rdm { v, pair }, Action::Rdm { v: w, .. }) => Action::Rdm {
            v: v.clone() + w.clone(),
            pair: pair.clone(),
        },
        (
            Action::Swap { x, t_in, t_out },
            Action::Swap {
                x: z, t_in: u_in, ..
            },
        ) => {
            if t_in != u_in {
                return Err(NotMergeable::OppositeDirections);
            }
            Action::Swap {
                x: x.clone() + z.clone(),
                t_in: t_in.clone(),
                t_out: t_out.clone(),
            }
        }
        _ => unreachable!("kinds and guards already compared"),
    };
    Ok(Transaction {
        user: a.user.clone(),
        action,
    })
}

/// Step function parameterised by the swap rate and the tolerance used for
/// equality premises (deposit ratio, guard boundaries).
#[derive(Clone, Debug)]
pub struct Machine<S, R> {
    pub rate: R,
    pub tol: S,
}

fn positive<S: Scalar>(v: &S) -> Result<(), Rejection> {
    if *v > S::zero() && v.is_finite_scalar() {
        Ok(())
    } else {
        Err(Rejection::NonPositiveAmount)
    }
}

fn distinct(a: &Symbol, b: &Symbol) -> Result<(), Rejection> {
    if a == b {
        Err(Rejection::SameToken)
    } else {
        Ok(())
    }
}

impl<S: Scalar, R: SwapRate<S>> Machine<S, R> {
    pub fn new(rate: R) -> Self {
        Machine {
            rate,
            tol: S::default_tolerance(),
        }
    }

    pub fn with_tolerance(rate: R, tol: S) -> Self {
        Machine { rate, tol }
    }

    /// `a >= b`, allowing `a` to fall short by the tolerance.
    fn at_least(&self, a: &S, b: &S) -> bool {
        *a >= *b || approx_eq(a, b, &self.tol)
    }

    fn funded(&self, s: &State<S>, u: &UserId, t: &Token, v: &S) -> Result<(), Rejection> {
        if s.wallet(u).is_some() && s.holding(u, t) >= *v {
            Ok(())
        } else {
            Err(Rejection::InsufficientBalance)
        }
    }

    pub fn apply(&self, s: &State<S>, tx: &Transaction<S>) -> Result<State<S>, Rejection> {
        self.apply_with_effect(s, tx).map(|(next, _)| next)
    }

    pub fn apply_with_effect(
        &self,
        s: &State<S>,
        tx: &Transaction<S>,
    ) -> Result<(State<S>, Effect<S>), Rejection> {
        let u = &tx.user;
        match &tx.action {
            Action::Dep { v0, t0, v1, t1 } => self.deposit(s, u, [v0, v1], [t0, t1]),
            Action::Swap { x, t_in, t_out } => self.swap(s, u, x, t_in, t_out, None),
            Action::Rdm { v, pair } => self.redeem(s, u, v, pair, None),
            Action::GSwap {
                x,
                t_in,
                t_out,
                y_min,
            } => self.swap(s, u, x, t_in, t_out, Some(y_min)),
            Action::GRdm { v, pair, min } => self.redeem(s, u, v, pair, Some(min)),
            Action::GDep {
                v0_min,
                v0_max,
                t0,
                v1_min,
                v1_max,
                t1,
            } => {
                distinct(t0, t1)?;
                let pool = s
                    .pool(&Pair::new(t0.clone(), t1.clone()))
                    .ok_or(Rejection::PoolMissing)?;
                let r0 = pool.reserve(t0).expect("token in pair").clone();
                let r1 = pool.reserve(t1).expect("token in pair").clone();
                let within = |lo: &S, v: &S, hi: &S| self.at_least(v, lo) && self.at_least(hi, v);
                let c1 = v0_max.clone() * r1.clone() / r0.clone();
                let c2 = v1_max.clone() * r0 / r1;
                let (d0, d1) = if within(v1_min, &c1, v1_max) {
                    (v0_max.clone(), c1)
                } else if within(v0_min, &c2, v0_max) {
                    (c2, v1_max.clone())
                } else {
                    return Err(Rejection::GuardViolated);
                };
                self.deposit(s, u, [&d0, &d1], [t0, t1])
            }
        }
    }

    fn deposit(
        &self,
        s: &State<S>,
        u: &UserId,
        v: [&S; 2],
        t: [&Symbol; 2],
    ) -> Result<(State<S>, Effect<S>), Rejection> {
        distinct(t[0], t[1])?;
        positive(v[0])?;
        positive(v[1])?;
        let pair = Pair::new(t[0].clone(), t[1].clone());
        let minted_tok = Token::Minted(pair.clone());
        let supply = s.supply(&minted_tok);
        let existing = s.pool(&pair).cloned();
        if existing.is_none() && supply != S::zero() {
            return Err(Rejection::PoolExists);
        }
        for i in 0..2 {
            self.funded(s, u, &Token::Atomic(t[i].clone()), v[i])?;
        }
        let mut next = s.clone();
        let (minted, effect) = match existing {
            None => {
                next.pools.push(Pool::new(
                    t[0].clone(),
                    v[0].clone(),
                    t[1].clone(),
                    v[1].clone(),
                ));
                (
                    v[0].clone(),
                    Effect::Created {
                        minted: v[0].clone(),
                    },
                )
            }
            Some(pool) => {
                let r0 = pool.reserve(t[0]).expect("token in pair").clone();
                let r1 = pool.reserve(t[1]).expect("token in pair").clone();
                let lhs = r1.clone() * v[0].clone();
                let rhs = r0.clone() * v[1].clone();
                if !approx_eq(&lhs, &rhs, &self.tol) {
                    return Err(Rejection::RatioMismatch);
                }
                if supply <= S::zero() {
                    return Err(Rejection::SupplyDepleted);
                }
                let minted = v[0].clone() * supply / r0;
                let p = next.pool_mut(&pair).expect("pool exists");
                for i in 0..2 {
                    let side = pair.side_of(t[i]).expect("token in pair");
                    p.reserves[side] = p.reserves[side].clone() + v[i].clone();
                }
                (
                    minted.clone(),
                    Effect::Deposited {
                        amounts: [v[0].clone(), v[1].clone()],
                        minted,
                    },
                )
            }
        };
        let w = next.wallet_mut(u).expect("funded payer has a wallet");
        for i in 0..2 {
            w.balance.debit(&Token::Atomic(t[i].clone()), v[i].clone());
        }
        w.balance.credit(&minted_tok, minted);
        Ok((next, effect))
    }

    fn swap(
        &self,
        s: &State<S>,
        u: &UserId,
        x: &S,
        t_in: &Symbol,
        t_out: &Symbol,
        y_min: Option<&S>,
    ) -> Result<(State<S>, Effect<S>), Rejection> {
        distinct(t_in, t_out)?;
        positive(x)?;
        let pair = Pair::new(t_in.clone(), t_out.clone());
        let pool = s.pool(&pair).ok_or(Rejection::PoolMissing)?;
        self.funded(s, u, &Token::Atomic(t_in.clone()), x)?;
        let (i_in, i_out) = (
            pair.side_of(t_in).expect("token in pair"),
            pair.side_of(t_out).expect("token in pair"),
        );
        let r_out = &pool.reserves[i_out];
        let y = x.clone() * self.rate.rate(x, &pool.reserves[i_in], r_out);
        if !(y < *r_out && y >= S::zero()) {
            return Err(Rejection::OutputExceedsReserve);
        }
        if let Some(m) = y_min {
            if !self.at_least(&y, m) {
                return Err(Rejection::GuardViolated);
            }
        }
        let mut next = s.clone();
        let p = next.pool_mut(&pair).expect("pool exists");
        p.reserves[i_in] = p.reserves[i_in].clone() + x.clone();
        p.reserves[i_out] = p.reserves[i_out].clone() - y.clone();
        let w = next.wallet_mut(u).expect("funded payer has a wallet");
        w.balance.debit(&Token::Atomic(t_in.clone()), x.clone());
        w.balance.credit(&Token::Atomic(t_out.clone()), y.clone());
        Ok((next, Effect::Swapped { x: x.clone(), y }))
    }

    fn redeem(
        &self,
        s: &State<S>,
        u: &UserId,
        v: &S,
        pair: &Pair,
        min: Option<&[S; 2]>,
    ) -> Result<(State<S>, Effect<S>), Rejection> {
        distinct(pair.first(), pair.second())?;
        positive(v)?;
        let pool = s.pool(pair).ok_or(Rejection::PoolMissing)?;
        let minted_tok = Token::Minted(pair.clone());
        self.funded(s, u, &minted_tok, v)?;
        let supply = s.supply(&minted_tok);
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN is rejected too
        if !(*v < supply) {
            return Err(Rejection::SupplyDepleted);
        }
        let paid = [
            v.clone() * pool.reserves[0].clone() / supply.clone(),
            v.clone() * pool.reserves[1].clone() / supply,
        ];
        if let Some(min) = min {
            if !(self.at_least(&paid[0], &min[0]) && self.at_least(&paid[1], &min[1])) {
                return Err(Rejection::GuardViolated);
            }
        }
        let mut next = s.clone();
        let p = next.pool_mut(pair).expect("pool exists");
        for (r, out) in p.reserves.iter_mut().zip(&paid) {
            *r = r.clone() - out.clone();
        }
        let w = next.wallet_mut(u).expect("funded payer has a wallet");
        w.balance.debit(&minted_tok, v.clone());
        for (i, out) in paid.iter().enumerate() {
            w.balance
                .credit(&Token::Atomic(pair.get(i).clone()), out.clone());
        }
        Ok((
            next,
            Effect::Redeemed {
                burned: v.clone(),
                paid,
            },
        ))
    }

    /// Executes `tr` from `s`. On success returns every state visited,
    /// starting with `s` itself (so `tr.len() + 1` states).
    pub fn run(&self, s: &State<S>, tr: &[Transaction<S>]) -> Result<Vec<State<S>>, Halted<S>> {
        let mut states = vec![s.clone()];
        for (index, tx) in tr.iter().enumerate() {
            match self.apply(states.last().expect("non-empty"), tx) {
                Ok(next) => states.push(next),
                Err(reason) => {
                    return Err(Halted {
                        states,
                        index,
                        reason,
                    })
                }
            }
        }
        Ok(states)
    }

    /// Final state of `tr` from `s`.
    pub fn run_final(&self, s: &State<S>, tr: &[Transaction<S>]) -> Result<State<S>, Halted<S>> {
        let mut cur = s.clone();
        for (index, tx) in tr.iter().enumerate() {
            cur = self.apply(&cur, tx).map_err(|reason| Halted {
                states: Vec::new(),
                index,
                reason,
            })?;
        }
        Ok(cur)
    }

    pub fn enabled(&self, s: &State<S>, tr: &[Transaction<S>]) -> bool {
        self.run_final(s, tr).is_ok()
    }

    /// A transaction undoing `tx` from the state it leads to.
    pub fn invert(&self, s: &State<S>, tx: &Transaction<S>) -> Result<Transaction<S>, InvertError> {
        let (_, effect) = self
            .apply_with_effect(s, tx)
            .map_err(InvertError::NotEnabled)?;
        let pair = tx.pair();
        let user = tx.user.clone();
        Ok(match effect {
            Effect::Created { .. } => return Err(InvertError::NotInvertible),
            Effect::Deposited { minted, .. } => Transaction::rdm(user, minted, pair),
            Effect::Redeemed { paid, .. } => {
                let [p0, p1] = paid;
                Transaction::dep(user, p0, pair.first().clone(), p1, pair.second().clone())
            }
            Effect::Swapped { y, .. } => {
                let (t_in, t_out) = match &tx.action {
                    Action::Swap { t_in, t_out, .. } | Action::GSwap { t_in, t_out, .. } => {
                        (t_in.clone(), t_out.clone())
                    }
                    _ => unreachable!("swap effect comes from a swap"),
                };
                Transaction::swap(user, y, t_out, t_in)
            }
        })
    }
}
