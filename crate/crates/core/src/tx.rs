//! Transactions and traces.

use std::collections::BTreeSet;
use std::fmt;

use crate::scalar::Scalar;
use crate::state::State;
use crate::token::{Pair, Symbol, UserId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Dep,
    Swap,
    Rdm,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Dep => "dep",
            Kind::Swap => "swap",
            Kind::Rdm => "rdm",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Action<S> {
    Dep {
        v0: S,
        t0: Symbol,
        v1: S,
        t1: Symbol,
    },
    Swap {
        x: S,
        t_in: Symbol,
        t_out: Symbol,
    },
    Rdm {
        v: S,
        pair: Pair,
    },
    /// Swap that also requires the output to be at least `y_min`.
    GSwap {
        x: S,
        t_in: Symbol,
        t_out: Symbol,
        y_min: S,
    },
    /// Redeem that requires each payout to reach `min[i]` (canonical order).
    GRdm {
        v: S,
        pair: Pair,
        min: [S; 2],
    },
    /// Deposit of the largest amounts within both ranges that respect the
    /// pool ratio.
    GDep {
        v0_min: S,
        v0_max: S,
        t0: Symbol,
        v1_min: S,
        v1_max: S,
        t1: Symbol,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transaction<S> {
    pub user: UserId,
    pub action: Action<S>,
}

pub type Trace<S> = Vec<Transaction<S>>;

impl<S: Scalar> Transaction<S> {
    pub fn dep(user: UserId, v0: S, t0: Symbol, v1: S, t1: Symbol) -> Self {
        Transaction {
            user,
            action: Action::Dep { v0, t0, v1, t1 },
        }
    }

    pub fn swap(user: UserId, x: S, t_in: Symbol, t_out: Symbol) -> Self {
        Transaction {
            user,
            action: Action::Swap { x, t_in, t_out },
        }
    }

    pub fn rdm(user: UserId, v: S, pair: Pair) -> Self {
        Transaction {
            user,
            action: Action::Rdm { v, pair },
        }
    }

    /// Deposit of `v0` units of `t0` with the matching amount of `t1` for
    /// the current pool ratio, so the ratio premise holds by construction.
    /// `None` when there is no pool on the pair or its `t0` reserve is zero.
    pub fn dep_exact(s: &State<S>, user: UserId, v0: S, t0: Symbol, t1: Symbol) -> Option<Self> {
        let pool = s.pool(&Pair::new(t0.clone(), t1.clone()))?;
        let r0 = pool.reserve(&t0)?.clone();
        let r1 = pool.reserve(&t1)?.clone();
        if r0 == S::zero() {
            return None;
        }
        let v1 = v0.clone() * r1 / r0;
        Some(Self::dep(user, v0, t0, v1, t1))
    }

    pub fn kind(&self) -> Kind {
        match self.action {
            Action::Dep { .. } | Action::GDep { .. } => Kind::Dep,
            Action::Swap { .. } | Action::GSwap { .. } => Kind::Swap,
            Action::Rdm { .. } | Action::GRdm { .. } => Kind::Rdm,
        }
    }

    pub fn is_guarded(&self) -> bool {
        matches!(
            self.action,
            Action::GSwap { .. } | Action::GRdm { .. } | Action::GDep { .. }
        )
    }

    /// The pair of atomic tokens the transaction acts on.
    pub fn pair(&self) -> Pair {
        match &self.action {
            Action::Dep { t0, t1, .. } | Action::GDep { t0, t1, .. } => {
                Pair::new(t0.clone(), t1.clone())
            }
            Action::Swap { t_in, t_out, .. } | Action::GSwap { t_in, t_out, .. } => {
                Pair::new(t_in.clone(), t_out.clone())
            }
            Action::Rdm { pair, .. } | Action::GRdm { pair, .. } => pair.clone(),
        }
    }

    /// Atomic tokens affected by the transaction.
    pub fn tokens(&self) -> BTreeSet<Symbol> {
        let p = self.pair();
        [p.first().clone(), p.second().clone()]
            .into_iter()
            .collect()
    }

    /// Amounts in a fixed order, used for canonical sorting.
    pub fn amounts(&self) -> Vec<S> {
        match &self.action {
            Action::Dep { v0, v1, .. } => vec![v0.clone(), v1.clone()],
            Action::Swap { x, .. } => vec![x.clone()],
            Action::Rdm { v, .. } => vec![v.clone()],
            Action::GSwap { x, y_min, .. } => vec![x.clone(), y_min.clone()],
            Action::GRdm { v, min, .. } => vec![v.clone(), min[0].clone(), min[1].clone()],
            Action::GDep {
                v0_min,
                v0_max,
                v1_min,
                v1_max,
                ..
            } => vec![
                v0_min.clone(),
                v0_max.clone(),
                v1_min.clone(),
                v1_max.clone(),
            ],
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Transaction<T> {
        let action = match &self.action {
            Action::Dep { v0, t0, v1, t1 } => Action::Dep {
                v0: f(v0),
                t0: t0.clone(),
                v1: f(v1),
                t1: t1.clone(),
            },
            Action::Swap { x, t_in, t_out } => Action::Swap {
                x: f(x),
                t_in: t_in.clone(),
                t_out: t_out.clone(),
            },
            Action::Rdm { v, pair } => Action::Rdm {
                v: f(v),
                pair: pair.clone(),
            },
            Action::GSwap {
                x,
                t_in,
                t_out,
                y_min,
            } => Action::GSwap {
                x: f(x),
                t_in: t_in.clone(),
                t_out: t_out.clone(),
                y_min: f(y_min),
            },
            Action::GRdm { v, pair, min } => Action::GRdm {
                v: f(v),
                pair: pair.clone(),
                min: [f(&min[0]), f(&min[1])],
            },
            Action::GDep {
                v0_min,
                v0_max,
                t0,
                v1_min,
                v1_max,
                t1,
            } => Action::GDep {
                v0_min: f(v0_min),
                v0_max: f(v0_max),
                t0: t0.clone(),
                v1_min: f(v1_min),
                v1_max: f(v1_max),
                t1: t1.clone(),
            },
        };
        Transaction {
            user: self.user.clone(),
            action,
        }
    }
}

/// Surface syntax, e.g. `A: swap(30:t0, t1)`.
impl<S: fmt::Display> fmt::Display for Transaction<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.user)?;
        match &self.action {
            Action::Dep { v0, t0, v1, t1 } => write!(f, "dep({v0}:{t0}, {v1}:{t1})"),
            Action::Swap { x, t_in, t_out } => write!(f, "swap({x}:{t_in}, {t_out})"),
            Action::Rdm { v, pair } => write!(f, "rdm({v}:{pair})"),
            Action::GSwap {
                x,
                t_in,
                t_out,
                y_min,
            } => write!(f, "swap({x}:{t_in}, {t_out}, min={y_min})"),
            Action::GRdm { v, pair, min } => write!(
                f,
                "rdm({v}:{pair}, min={}:{}, min={}:{})",
                min[0],
                pair.first(),
                min[1],
                pair.second()
            ),
            Action::GDep {
                v0_min,
                v0_max,
                t0,
                v1_min,
                v1_max,
                t1,
            } => write!(
                f,
                "dep(min={v0_min} max={v0_max}:{t0}, min={v1_min} max={v1_max}:{t1})"
            ),
        }
    }
}
