//! The two-user worked example: initial wallets, the six transactions and
//! the states as displayed (amounts rounded to integers).

use amm_core::{sym, user, Balance, Pair, Pool, Scalar, State, Token, Transaction};

pub fn initial<S: Scalar>() -> State<S> {
    let n = |v: f64| S::lit(v);
    State::new()
        .with_wallet(
            user("A"),
            Balance::new()
                .with(sym("t0"), n(70.0))
                .with(sym("t1"), n(70.0)),
        )
        .with_wallet(
            user("B"),
            Balance::new()
                .with(sym("t0"), n(30.0))
                .with(sym("t1"), n(10.0)),
        )
}

pub fn trace<S: Scalar>() -> Vec<Transaction<S>> {
    let n = |v: f64| S::lit(v);
    let p = Pair::new(sym("t0"), sym("t1"));
    vec![
        Transaction::dep(user("A"), n(70.0), sym("t0"), n(70.0), sym("t1")),
        Transaction::swap(user("B"), n(30.0), sym("t0"), sym("t1")),
        Transaction::swap(user("B"), n(21.0), sym("t1"), sym("t0")),
        Transaction::rdm(user("A"), n(30.0), p.clone()),
        Transaction::swap(user("B"), n(30.0), sym("t0"), sym("t1")),
        Transaction::rdm(user("A"), n(30.0), p),
    ]
}

/// `(A's t0, t1, {t0,t1}; B's t0, t1; pool t0, t1)` after each step, as
/// displayed. Entries left out of the display are zero.
pub const DISPLAYED: [[f64; 7]; 7] = [
    [70.0, 70.0, 0.0, 30.0, 10.0, 0.0, 0.0],
    [0.0, 0.0, 70.0, 30.0, 10.0, 70.0, 70.0],
    [0.0, 0.0, 70.0, 0.0, 31.0, 100.0, 49.0],
    [0.0, 0.0, 70.0, 30.0, 10.0, 70.0, 70.0],
    [30.0, 30.0, 40.0, 30.0, 10.0, 40.0, 40.0],
    [30.0, 30.0, 40.0, 0.0, 27.0, 70.0, 23.0],
    [82.0, 47.0, 10.0, 0.0, 27.0, 18.0, 6.0],
];

pub fn flatten(s: &State<f64>) -> [f64; 7] {
    let (a, b) = (user("A"), user("B"));
    let (t0, t1) = (Token::from(sym("t0")), Token::from(sym("t1")));
    let m = Token::Minted(Pair::new(sym("t0"), sym("t1")));
    let [r0, r1] = s
        .pool(&Pair::new(sym("t0"), sym("t1")))
        .map_or([0.0, 0.0], |p| p.reserves);
    [
        s.holding(&a, &t0),
        s.holding(&a, &t1),
        s.holding(&a, &m),
        s.holding(&b, &t0),
        s.holding(&b, &t1),
        r0,
        r1,
    ]
}

/// The displayed final state, with the prices used for it.
pub fn rounded_final() -> State<f64> {
    State::new()
        .with_wallet(
            user("A"),
            Balance::new()
                .with(sym("t0"), 82.0)
                .with(sym("t1"), 47.0)
                .with(Pair::new(sym("t0"), sym("t1")), 10.0),
        )
        .with_wallet(user("B"), Balance::new().with(sym("t1"), 27.0))
        .with_pool(Pool::new(sym("t0"), 18.0, sym("t1"), 6.0))
}

pub const PRICES: [(&str, f64); 2] = [("t0", 5.0), ("t1", 9.0)];

/// The trace in the text format.
pub const TEXT: &str = "\
price t0 5
price t1 9
wallet A 70:t0 70:t1
wallet B 30:t0 10:t1
A: dep(70:t0, 70:t1)
B: swap(30:t0, t1)
B: swap(21:t1, t0)
A: rdm(30:{t0,t1})
B: swap(30:t0, t1)
A: rdm(30:{t0,t1})
";
