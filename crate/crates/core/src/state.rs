//! Balances, wallets, pools and blockchain states.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::scalar::{approx_eq, Scalar};
use crate::token::{Pair, Symbol, Token, UserId};

/// Token balance of a wallet. Absent entries read as zero; explicit zero
/// entries are kept as given but are indistinguishable from absent ones for
/// [`State::supply`] and [`state_eq`].
#[derive(Clone, Debug, PartialEq)]
pub struct Balance<S>(BTreeMap<Token, S>);

impl<S> Default for Balance<S> {
    fn default() -> Self {
        Balance(BTreeMap::new())
    }
}

impl<S: Scalar> Balance<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, t: &Token) -> S {
        self.0.get(t).cloned().unwrap_or_else(S::zero)
    }

    pub fn set(&mut self, t: Token, v: S) {
        self.0.insert(t, v);
    }

    pub fn credit(&mut self, t: &Token, v: S) {
        let cur = self.get(t);
        self.0.insert(t.clone(), cur + v);
    }

    /// Subtracts without checking; callers check funding first.
    pub fn debit(&mut self, t: &Token, v: S) {
        let cur = self.get(t);
        self.0.insert(t.clone(), cur - v);
    }

    pub fn with(mut self, t: impl Into<Token>, v: S) -> Self {
        self.set(t.into(), v);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Token, &S)> {
        self.0.iter()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.0.keys()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Scalar> FromIterator<(Token, S)> for Balance<S> {
    fn from_iter<I: IntoIterator<Item = (Token, S)>>(iter: I) -> Self {
        Balance(iter.into_iter().collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Wallet<S> {
    pub user: UserId,
    pub balance: Balance<S>,
}

impl<S: Scalar> Wallet<S> {
    pub fn new(user: UserId, balance: Balance<S>) -> Self {
        Wallet { user, balance }
    }
}

/// A two-token pool. `reserves[i]` belongs to `pair.get(i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pool<S> {
    pub pair: Pair,
    pub reserves: [S; 2],
}

impl<S: Scalar> Pool<S> {
    /// Builds a pool from reserves given in any token order.
    pub fn new(a: Symbol, ra: S, b: Symbol, rb: S) -> Self {
        let reserves = if a <= b { [ra, rb] } else { [rb, ra] };
        Pool {
            pair: Pair::new(a, b),
            reserves,
        }
    }

    pub fn reserve(&self, t: &Symbol) -> Option<&S> {
        self.pair.side_of(t).map(|i| &self.reserves[i])
    }

    pub fn minted(&self) -> Token {
        Token::Minted(self.pair.clone())
    }
}

/// Where a structural problem was found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    Wallet(UserId, Token),
    Pool(Pair, usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Wallet(u, t) => write!(f, "wallet {u}, token {t}"),
            Location::Pool(p, i) => write!(f, "pool {p}, reserve of {}", p.get(*i)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateWallet(UserId),
    DuplicatePool(Pair),
    DegeneratePool(Pair),
    NegativeAmount(Location),
    NonFiniteAmount(Location),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateWallet(u) => write!(f, "duplicate wallet for {u}"),
            Violation::DuplicatePool(p) => write!(f, "duplicate pool on {p}"),
            Violation::DegeneratePool(p) => {
                write!(f, "pool {p} has identical member tokens")
            }
            Violation::NegativeAmount(l) => write!(f, "negative amount at {l}"),
            Violation::NonFiniteAmount(l) => write!(f, "non-finite amount at {l}"),
        }
    }
}

/// A composition of wallets and pools.
///
/// Stored as vectors so that malformed inputs (two wallets for one user, two
/// pools on one pair) can be represented and reported by [`State::validate`].
/// Order is irrelevant to every operation.
#[derive(Clone, Debug, PartialEq)]
pub struct State<S> {
    pub wallets: Vec<Wallet<S>>,
    pub pools: Vec<Pool<S>>,
}

impl<S> Default for State<S> {
    fn default() -> Self {
        State {
            wallets: Vec::new(),
            pools: Vec::new(),
        }
    }
}

impl<S: Scalar> State<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_wallet(mut self, user: UserId, balance: Balance<S>) -> Self {
        self.wallets.push(Wallet::new(user, balance));
        self
    }

    pub fn with_pool(mut self, pool: Pool<S>) -> Self {
        self.pools.push(pool);
        self
    }

    pub fn wallet(&self, u: &UserId) -> Option<&Wallet<S>> {
        self.wallets.iter().find(|w| &w.user == u)
    }

    pub fn wallet_mut(&mut self, u: &UserId) -> Option<&mut Wallet<S>> {
        self.wallets.iter_mut().find(|w| &w.user == u)
    }

    /// Balance of `t` held by `u`; zero when the user has no wallet.
    pub fn holding(&self, u: &UserId, t: &Token) -> S {
        self.wallet(u).map_or_else(S::zero, |w| w.balance.get(t))
    }

    pub fn pool(&self, p: &Pair) -> Option<&Pool<S>> {
        self.pools.iter().find(|q| &q.pair == p)
    }

    pub fn pool_mut(&mut self, p: &Pair) -> Option<&mut Pool<S>> {
        self.pools.iter_mut().find(|q| &q.pair == p)
    }

    pub fn users(&self) -> impl Iterator<Item = &UserId> {
        self.wallets.iter().map(|w| &w.user)
    }

    /// Total amount of `t` in wallets, plus pool reserves for atomic `t`.
    pub fn supply(&self, t: &Token) -> S {
        let mut total = S::zero();
        for w in &self.wallets {
            total = total + w.balance.get(t);
        }
        if let Token::Atomic(sym) = t {
            for p in &self.pools {
                for i in 0..2 {
                    if p.pair.get(i) == sym {
                        total = total + p.reserves[i].clone();
                    }
                }
            }
        }
        total
    }

    /// Every atomic token mentioned anywhere in the state.
    pub fn atomic_tokens(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for w in &self.wallets {
            for t in w.balance.tokens() {
                match t {
                    Token::Atomic(s) => {
                        out.insert(s.clone());
                    }
                    Token::Minted(p) => {
                        out.insert(p.first().clone());
                        out.insert(p.second().clone());
                    }
                }
            }
        }
        for p in &self.pools {
            out.insert(p.pair.first().clone());
            out.insert(p.pair.second().clone());
        }
        out
    }

    /// Structural well-formedness. Never aborts; an empty list means ok.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen_users = BTreeSet::new();
        for w in &self.wallets {
            if !seen_users.insert(w.user.clone()) {
                out.push(Violation::DuplicateWallet(w.user.clone()));
            }
            for (t, v) in w.balance.iter() {
                check_amount(v, || Location::Wallet(w.user.clone(), t.clone()), &mut out);
            }
        }
        let mut seen_pairs = BTreeSet::new();
        for p in &self.pools {
            if p.pair.is_degenerate() {
                out.push(Violation::DegeneratePool(p.pair.clone()));
            }
            if !seen_pairs.insert(p.pair.clone()) {
                out.push(Violation::DuplicatePool(p.pair.clone()));
            }
            for (i, r) in p.reserves.iter().enumerate() {
                check_amount(r, || Location::Pool(p.pair.clone(), i), &mut out);
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// No pools and no minted tokens held (zero entries are ignored).
    pub fn is_initial(&self) -> bool {
        self.pools.is_empty()
            && self.wallets.iter().all(|w| {
                w.balance
                    .iter()
                    .all(|(t, v)| t.is_atomic() || *v == S::zero())
            })
    }

    /// Converts every amount with `f`, e.g. from exact rationals to `f64`.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> State<T> {
        State {
            wallets: self
                .wallets
                .iter()
                .map(|w| Wallet {
                    user: w.user.clone(),
                    balance: w.balance.iter().map(|(t, v)| (t.clone(), f(v))).collect(),
                })
                .collect(),
            pools: self
                .pools
                .iter()
                .map(|p| Pool {
                    pair: p.pair.clone(),
                    reserves: [f(&p.reserves[0]), f(&p.reserves[1])],
                })
                .collect(),
        }
    }
}

fn check_amount<S: Scalar>(v: &S, loc: impl Fn() -> Location, out: &mut Vec<Violation>) {
    if !v.is_finite_scalar() {
        out.push(Violation::NonFiniteAmount(loc()));
    } else if *v < S::zero() {
        out.push(Violation::NegativeAmount(loc()));
    }
}

/// Equality up to wallet/pool order, with absent entries read as zero and
/// amounts compared with [`approx_eq`].
pub fn state_eq<S: Scalar>(a: &State<S>, b: &State<S>, tol: &S) -> bool {
    let users_a: BTreeSet<_> = a.users().cloned().collect();
    let users_b: BTreeSet<_> = b.users().cloned().collect();
    if users_a != users_b || users_a.len() != a.wallets.len() || users_b.len() != b.wallets.len() {
        return false;
    }
    for wa in &a.wallets {
        let wb = b.wallet(&wa.user).expect("same user set");
        let tokens: BTreeSet<&Token> = wa.balance.tokens().chain(wb.balance.tokens()).collect();
        for t in tokens {
            if !approx_eq(&wa.balance.get(t), &wb.balance.get(t), tol) {
                return false;
            }
        }
    }
    let pairs_a: BTreeSet<_> = a.pools.iter().map(|p| p.pair.clone()).collect();
    let pairs_b: BTreeSet<_> = b.pools.iter().map(|p| p.pair.clone()).collect();
    if pairs_a != pairs_b || pairs_a.len() != a.pools.len() || pairs_b.len() != b.pools.len() {
        return false;
    }
    a.pools.iter().all(|pa| {
        let pb = b.pool(&pa.pair).expect("same pair set");
        approx_eq(&pa.reserves[0], &pb.reserves[0], tol)
            && approx_eq(&pa.reserves[1], &pb.reserves[1], tol)
    })
}
