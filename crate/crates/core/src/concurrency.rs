//! Concurrent transactions and reordering of traces.
//!
//! Two distinct transactions are concurrent when neither is a swap, or when
//! they act on disjoint token sets. This is a sufficient condition for the
//! two orders to reach the same state; [`commutes`] checks the actual
//! outcome on a given state.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};

use thiserror::Error;

use crate::scalar::Scalar;
use crate::semantics::{Machine, Rejection};
use crate::state::{state_eq, State};
use crate::swap_rate::SwapRate;
use crate::tx::{Kind, Transaction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum ConcurrencyError {
    #[error("concurrency is only defined for distinct transactions")]
    IdenticalTransactions,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    /// `tx1` then `tx2`.
    Forward,
    /// `tx2` then `tx1`.
    Reverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum CommuteError {
    #[error("{0:?} order is not enabled: {1}")]
    NotEnabled(Order, Rejection),
}

pub fn concurrent<S: Scalar>(
    a: &Transaction<S>,
    b: &Transaction<S>,
) -> Result<bool, ConcurrencyError> {
    if a == b {
        return Err(ConcurrencyError::IdenticalTransactions);
    }
    Ok(independent(a, b))
}

/// [`concurrent`], with identical transactions treated as dependent.
fn independent<S: Scalar>(a: &Transaction<S>, b: &Transaction<S>) -> bool {
    if a == b {
        return false;
    }
    if a.kind() != Kind::Swap && b.kind() != Kind::Swap {
        return true;
    }
    a.tokens().is_disjoint(&b.tokens())
}

/// Runs both orders from `s` and compares the final states.
pub fn commutes<S: Scalar, R: SwapRate<S>>(
    m: &Machine<S, R>,
    s: &State<S>,
    a: &Transaction<S>,
    b: &Transaction<S>,
    tol: &S,
) -> Result<bool, CommuteError> {
    let fwd = m
        .run_final(s, &[a.clone(), b.clone()])
        .map_err(|h| CommuteError::NotEnabled(Order::Forward, h.reason))?;
    let rev = m
        .run_final(s, &[b.clone(), a.clone()])
        .map_err(|h| CommuteError::NotEnabled(Order::Reverse, h.reason))?;
    Ok(state_eq(&fwd, &rev, tol))
}

/// Total order used inside normal-form layers: user, kind, tokens, amounts.
fn canonical_cmp<S: Scalar>(a: &Transaction<S>, b: &Transaction<S>) -> Ordering {
    a.user
        .cmp(&b.user)
        .then(a.kind().cmp(&b.kind()))
        .then_with(|| a.is_guarded().cmp(&b.is_guarded()))
        .then_with(|| a.tokens().cmp(&b.tokens()))
        .then_with(|| {
            let (x, y) = (a.amounts(), b.amounts());
            x.iter()
                .zip(&y)
                .map(|(p, q)| p.partial_cmp(q).unwrap_or(Ordering::Equal))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(x.len().cmp(&y.len()))
        })
        .then_with(|| format!("{:?}", a.action).cmp(&format!("{:?}", b.action)))
}

/// Foata normal form: each transaction goes in the layer after the deepest
/// earlier transaction it depends on; layers are sorted canonically.
pub fn foata_normal_form<S: Scalar>(tr: &[Transaction<S>]) -> Vec<Vec<Transaction<S>>> {
    let mut level = vec![0usize; tr.len()];
    let mut layers: Vec<Vec<Transaction<S>>> = Vec::new();
    for i in 0..tr.len() {
        let depth = (0..i)
            .filter(|&j| !independent(&tr[j], &tr[i]))
            .map(|j| level[j] + 1)
            .max()
            .unwrap_or(0);
        level[i] = depth;
        if layers.len() <= depth {
            layers.resize_with(depth + 1, Vec::new);
        }
        layers[depth].push(tr[i].clone());
    }
    for l in &mut layers {
        l.sort_by(canonical_cmp);
    }
    layers
}

/// Whether `b` can be obtained from `a` by swapping adjacent concurrent
/// transactions.
pub fn mazurkiewicz_equiv<S: Scalar>(a: &[Transaction<S>], b: &[Transaction<S>]) -> bool {
    a.len() == b.len() && foata_normal_form(a) == foata_normal_form(b)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReorderReport {
    /// Distinct permutations visited, including the original order.
    pub explored: usize,
    pub enabled: usize,
    /// Permutations not enabled from the state (nothing to compare).
    pub skipped: usize,
    /// `false` when the budget stopped the search early.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ReorderError<S> {
    #[error("the original trace is not enabled (step {index}: {reason})")]
    NotEnabled { index: usize, reason: Rejection },
    #[error("permutation {permutation:?} reaches a different state")]
    Counterexample {
        permutation: Vec<usize>,
        expected: State<S>,
        found: State<S>,
    },
}

/// Explores every order reachable from `tr` by transposing adjacent
/// concurrent transactions (breadth-first, at most `budget` orders) and
/// checks that each enabled one ends in the same state as `tr`.
pub fn check_reorder_soundness<S: Scalar, R: SwapRate<S>>(
    m: &Machine<S, R>,
    s: &State<S>,
    tr: &[Transaction<S>],
    tol: &S,
    budget: usize,
) -> Result<ReorderReport, ReorderError<S>> {
    let expected = m.run_final(s, tr).map_err(|h| ReorderError::NotEnabled {
        index: h.index,
        reason: h.reason,
    })?;
    let start: Vec<usize> = (0..tr.len()).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut report = ReorderReport {
        explored: 0,
        enabled: 0,
        skipped: 0,
        complete: true,
    };
    while let Some(perm) = queue.pop_front() {
        if report.explored == budget {
            report.complete = false;
            break;
        }
        report.explored += 1;
        let order: Vec<Transaction<S>> = perm.iter().map(|&i| tr[i].clone()).collect();
        match m.run_final(s, &order) {
            Ok(found) => {
                if !state_eq(&expected, &found, tol) {
                    return Err(ReorderError::Counterexample {
                        permutation: perm,
                        expected,
                        found,
                    });
                }
                report.enabled += 1;
            }
            Err(_) => report.skipped += 1,
        }
        for k in 0..perm.len().saturating_sub(1) {
            if independent(&tr[perm[k]], &tr[perm[k + 1]]) {
                let mut next = perm.clone();
                next.swap(k, k + 1);
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(report)
}
