//! Random reachable states and the law checks shared by the property suites
//! and the acceptance binary. Every law takes an RNG, builds one case and
//! returns `Ok(true)` when checked, `Ok(false)` when the case was not
//! applicable, and `Err` with a description when the law failed.
#![allow(dead_code)]

use std::cmp::Ordering;

use amm_core::arbitrage::{pick_direction, solve_constant_product, ArbitrageProblem, Move};
use amm_core::concurrency::{check_reorder_soundness, concurrent};
use amm_core::economics::{gain, gain_sign, global_net_worth, swap_gain_closed};
use amm_core::semantics::merge;
use amm_core::{
    approx_eq, redeem_rate, state_eq, sym, user, Balance, ConstantProduct, Machine, Pair,
    PriceOracle, State, Token, Transaction, UserId,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-9;
pub const TOKENS: [&str; 4] = ["t0", "t1", "t2", "t3"];
pub const USERS: [&str; 4] = ["A", "B", "C", "D"];
/// Arbitrageur and swapper who never deposits.
pub const OUTSIDER: &str = "Z";

pub type Cp = Machine<f64, ConstantProduct>;
pub type Law = fn(&mut ChaCha8Rng) -> Result<bool, String>;

pub fn machine() -> Cp {
    Machine::with_tolerance(ConstantProduct, TOL)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Log-uniform in `[lo, hi)`.
pub fn amount(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

pub fn p01() -> Pair {
    Pair::new(sym("t0"), sym("t1"))
}

pub fn oracle(rng: &mut impl Rng) -> PriceOracle<f64> {
    PriceOracle::from_prices(TOKENS.iter().map(|t| (sym(t), amount(rng, 0.1, 10.0)))).unwrap()
}

pub fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= TOL * scale.abs().max(1.0)
}

/// Wallets for `USERS` and the outsider, then pool `{t0,t1}` (and sometimes
/// `{t2,t3}`) created by deposits, then up to `steps` random enabled moves.
/// The outsider never holds minted tokens.
pub fn reachable(rng: &mut impl Rng, steps: usize) -> State<f64> {
    let mut s = State::new();
    for u in USERS.iter().chain([&OUTSIDER]) {
        let b: Balance<f64> = TOKENS
            .iter()
            .map(|t| (Token::from(sym(t)), amount(rng, 100.0, 10_000.0)))
            .collect();
        s = s.with_wallet(user(u), b);
    }
    s = create_pool(rng, &s, "t0", "t1");
    if rng.gen_bool(0.5) {
        s = create_pool(rng, &s, "t2", "t3");
    }
    let m = machine();
    for _ in 0..rng.gen_range(0..=steps) {
        let tx = random_tx(rng, &s, false);
        if let Ok(next) = m.apply(&s, &tx) {
            s = next;
        }
    }
    s
}

/// A random user creates the `{a,b}` pool.
pub fn create_pool(rng: &mut impl Rng, s: &State<f64>, a: &str, b: &str) -> State<f64> {
    let u = user(USERS[rng.gen_range(0..USERS.len())]);
    let tx = Transaction::dep(
        u,
        amount(rng, 1.0, 100.0),
        sym(a),
        amount(rng, 1.0, 100.0),
        sym(b),
    );
    machine().apply(s, &tx).expect("funded pool creation")
}

/// A random transaction on an existing pool, usually enabled. The outsider
/// only swaps; with `with_outsider` false it is never picked.
pub fn random_tx(rng: &mut impl Rng, s: &State<f64>, with_outsider: bool) -> Transaction<f64> {
    let pool = &s.pools[rng.gen_range(0..s.pools.len())];
    let (mut a, mut b) = (pool.pair.first().clone(), pool.pair.second().clone());
    if rng.gen_bool(0.5) {
        std::mem::swap(&mut a, &mut b);
    }
    let pick_outsider = with_outsider && rng.gen_bool(0.2);
    let u = if pick_outsider {
        user(OUTSIDER)
    } else {
        user(USERS[rng.gen_range(0..USERS.len())])
    };
    let kind = if pick_outsider {
        1
    } else {
        rng.gen_range(0..3)
    };
    match kind {
        0 => {
            let held = s.holding(&u, &Token::from(a.clone()));
            let frac = rng.gen_range(0.001..0.5);
            let tx = Transaction::dep_exact(s, u.clone(), held * frac, a.clone(), b.clone())
                .expect("pool exists");
            if s.holding(&u, &Token::from(b.clone())) >= dep_amounts(&tx)[1] {
                tx
            } else {
                Transaction::swap(u, held * frac, a, b)
            }
        }
        1 => {
            let held = s.holding(&u, &Token::from(a.clone()));
            Transaction::swap(u, held * rng.gen_range(0.001..0.5), a, b)
        }
        _ => {
            let minted = pool.minted();
            let held = s.holding(&u, &minted);
            let v = held.min(s.supply(&minted) * 0.9) * rng.gen_range(0.01..1.0);
            Transaction::rdm(u, v, pool.pair.clone())
        }
    }
}

pub fn dep_amounts(tx: &Transaction<f64>) -> [f64; 2] {
    match &tx.action {
        amm_core::Action::Dep { v0, v1, .. } => [*v0, *v1],
        _ => panic!("not a deposit"),
    }
}

/// A user other than the outsider holding some minted `pair`, if any.
pub fn holder(s: &State<f64>, pair: &Pair) -> Option<UserId> {
    let t = Token::Minted(pair.clone());
    USERS
        .iter()
        .map(|u| user(u))
        .filter(|u| s.holding(u, &t) > 0.0)
        .max_by(|a, b| s.holding(a, &t).total_cmp(&s.holding(b, &t)))
}

fn rel(a: f64, b: f64) -> bool {
    approx_eq(&a, &b, &TOL)
}

fn states_match(a: &State<f64>, b: &State<f64>) -> bool {
    state_eq(a, b, &TOL)
}

// ---------------------------------------------------------------------------
// Redeem-only drain

/// Redeems `{t0,t1}` until the `t0` reserve reaches `target`: whenever one
/// holder can cover the whole remaining amount they redeem it, otherwise the
/// largest holder redeems everything they hold.
pub fn drain(
    m: &Cp,
    s: &State<f64>,
    pair: &Pair,
    side: usize,
    target: f64,
) -> Result<(State<f64>, Vec<Transaction<f64>>), String> {
    let minted = Token::Minted(pair.clone());
    let mut s = s.clone();
    let mut trace = Vec::new();
    for _ in 0..=s.wallets.len() {
        let pool = s.pool(pair).ok_or("pool vanished")?;
        let r = pool.reserves[side];
        if r <= target {
            break;
        }
        let supply = s.supply(&minted);
        let v = (r - target) / r * supply;
        let holders = s
            .wallets
            .iter()
            .map(|w| (w.user.clone(), w.balance.get(&minted)))
            .filter(|(_, h)| *h > 0.0);
        let tx = match holders.clone().find(|(_, h)| *h >= v) {
            Some((u, _)) => Transaction::rdm(u, v, pair.clone()),
            None => {
                let (u, h) = holders
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .ok_or("nobody holds minted tokens")?;
                Transaction::rdm(u, h, pair.clone())
            }
        };
        s = m.apply(&s, &tx).map_err(|e| format!("{tx}: {e}"))?;
        trace.push(tx);
    }
    Ok((s, trace))
}

// ---------------------------------------------------------------------------
// Laws

pub fn law_determinism(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let m = machine();
    let s = reachable(rng, 6);
    let tx = random_tx(rng, &s, true);
    let a = m.apply(&s, &tx);
    let b = m.apply(&s, &tx);
    if a == b {
        Ok(true)
    } else {
        Err(format!("{tx} gave two results"))
    }
}

/// Non-depletion, atomic supply, and for dep/rdm the reserve ratio and
/// redeem rates, across one accepted step.
pub fn law_step_preservation(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let m = machine();
    let s = reachable(rng, 6);
    let tx = random_tx(rng, &s, true);
    let Ok(t) = m.apply(&s, &tx) else {
        return Ok(false);
    };
    if !t.is_valid() {
        return Err(format!("{tx}: invalid result {:?}", t.validate()));
    }
    for p in &t.pools {
        if p.reserves.iter().any(|r| *r <= 0.0) || t.supply(&p.minted()) <= 0.0 {
            return Err(format!("{tx}: pool {} depleted", p.pair));
        }
    }
    for a in s.atomic_tokens() {
        let a = Token::from(a);
        if !rel(s.supply(&a), t.supply(&a)) {
            return Err(format!("{tx}: supply of {a} moved"));
        }
    }
    if tx.kind() != amm_core::Kind::Swap {
        let pair = tx.pair();
        let (p, q) = (s.pool(&pair).unwrap(), t.pool(&pair).unwrap());
        if !rel(p.reserves[1] / p.reserves[0], q.reserves[1] / q.reserves[0]) {
            return Err(format!("{tx}: reserve ratio moved"));
        }
        for side in 0..2 {
            let before = redeem_rate(&s, &pair, side).unwrap();
            let after = redeem_rate(&t, &pair, side).unwrap();
            if !rel(before, after) {
                return Err(format!(
                    "{tx}: redeem rate {side} moved {before} -> {after}"
                ));
            }
        }
    }
    Ok(true)
}

pub fn law_net_worth_preserved(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let m = machine();
    let o = oracle(rng);
    let s = reachable(rng, 6);
    let tx = random_tx(rng, &s, true);
    let Ok(t) = m.apply(&s, &tx) else {
        return Ok(false);
    };
    let (a, b) = (
        global_net_worth(&s, &o).unwrap(),
        global_net_worth(&t, &o).unwrap(),
    );
    if rel(a, b) {
        Ok(true)
    } else {
        Err(format!("{tx}: global net worth {a} -> {b}"))
    }
}

fn split(
    rng: &mut ChaCha8Rng,
    s: &State<f64>,
    kind: usize,
) -> Option<(Transaction<f64>, Transaction<f64>)> {
    let pair = p01();
    let (t0, t1) = (sym("t0"), sym("t1"));
    match kind {
        0 => {
            let u = user(USERS[rng.gen_range(0..USERS.len())]);
            let h0 = s.holding(&u, &Token::from(t0.clone()));
            let h1 = s.holding(&u, &Token::from(t1.clone()));
            let pool = s.pool(&pair)?;
            let cap = h0.min(h1 * pool.reserves[0] / pool.reserves[1]) * 0.45;
            let a = Transaction::dep_exact(
                s,
                u.clone(),
                cap * rng.gen_range(0.01..1.0),
                t0.clone(),
                t1.clone(),
            )?;
            let b = Transaction::dep_exact(s, u, cap * rng.gen_range(0.01..1.0), t0, t1)?;
            Some((a, b))
        }
        1 => {
            let u = holder(s, &pair)?;
            let minted = Token::Minted(pair.clone());
            let cap = s.holding(&u, &minted).min(s.supply(&minted) * 0.99) * 0.5;
            let a = Transaction::rdm(u.clone(), cap * rng.gen_range(0.01..1.0), pair.clone());
            let b = Transaction::rdm(u, cap * rng.gen_range(0.01..1.0), pair);
            Some((a, b))
        }
        _ => {
            let u = user(OUTSIDER);
            let (a_in, a_out) = if rng.gen_bool(0.5) {
                (t0, t1)
            } else {
                (t1, t0)
            };
            let cap = s.holding(&u, &Token::from(a_in.clone())) * 0.5;
            let a = Transaction::swap(
                u.clone(),
                cap * rng.gen_range(0.001..1.0),
                a_in.clone(),
                a_out.clone(),
            );
            let b = Transaction::swap(u, cap * rng.gen_range(0.001..1.0), a_in, a_out);
            Some((a, b))
        }
    }
}

fn additivity(rng: &mut ChaCha8Rng, kind: usize) -> Result<bool, String> {
    let m = machine();
    let s = reachable(rng, 6);
    let Some((a, b)) = split(rng, &s, kind) else {
        return Ok(false);
    };
    let merged = merge(&a, &b).map_err(|e| e.to_string())?;
    let two = m.run_final(&s, &[a.clone(), b.clone()]);
    let one = m.run_final(&s, std::slice::from_ref(&merged));
    match (two, one) {
        (Ok(x), Ok(y)) if states_match(&x, &y) => Ok(true),
        (Ok(_), Ok(_)) => Err(format!("{a}; {b} differs from {merged}")),
        (Err(h), _) => Err(format!("{a}; {b} not enabled: {}", h.reason)),
        (_, Err(h)) => Err(format!("{merged} not enabled: {}", h.reason)),
    }
}

pub fn law_dep_additive(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    additivity(rng, 0)
}

pub fn law_rdm_additive(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    additivity(rng, 1)
}

pub fn law_swap_additive(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    additivity(rng, 2)
}

fn reversibility(rng: &mut ChaCha8Rng, kind: usize) -> Result<bool, String> {
    let m = machine();
    let s = reachable(rng, 6);
    let Some((tx, _)) = split(rng, &s, kind) else {
        return Ok(false);
    };
    let back = m.invert(&s, &tx).map_err(|e| format!("{tx}: {e}"))?;
    match m.run_final(&s, &[tx.clone(), back.clone()]) {
        Ok(t) if states_match(&s, &t) => Ok(true),
        Ok(_) => Err(format!("{tx}; {back} does not return to the start")),
        Err(h) => Err(format!("{tx}; {back} not enabled: {}", h.reason)),
    }
}

pub fn law_dep_reversible(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    reversibility(rng, 0)
}

pub fn law_rdm_reversible(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    reversibility(rng, 1)
}

pub fn law_swap_reversible(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    reversibility(rng, 2)
}

/// Swap gains sum to zero over all users and match the closed form for each
/// holder; a swapper holding the whole minted supply gains nothing.
pub fn law_swap_gain(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let m = machine();
    let o = oracle(rng);
    let sole = rng.gen_bool(0.3);
    let s = if sole {
        // Only the creator has deposited; hand their share to A.
        let mut s = reachable(rng, 0);
        let minted = s.pools[0].minted();
        let creator = holder(&s, &s.pools[0].pair).unwrap();
        let h = s.holding(&creator, &minted);
        s.wallet_mut(&creator)
            .unwrap()
            .balance
            .set(minted.clone(), 0.0);
        s.wallet_mut(&user("A")).unwrap().balance.credit(&minted, h);
        s
    } else {
        reachable(rng, 6)
    };
    let swapper = if sole {
        user("A")
    } else {
        user(USERS[rng.gen_range(0..USERS.len())])
    };
    let (t_in, t_out) = if rng.gen_bool(0.5) {
        ("t0", "t1")
    } else {
        ("t1", "t0")
    };
    let x = s.holding(&swapper, &Token::from(sym(t_in))) * rng.gen_range(0.001..0.5);
    let tx = Transaction::swap(swapper.clone(), x, sym(t_in), sym(t_out));
    if m.apply(&s, &tx).is_err() {
        return Ok(false);
    }
    let scale = global_net_worth(&s, &o).unwrap();
    let mut total = 0.0;
    for u in s.users() {
        let g = gain(&m, &s, &o, u, std::slice::from_ref(&tx))
            .unwrap()
            .value;
        let c = swap_gain_closed(&m, &s, &o, u, &tx).unwrap();
        if !close(g, c, scale) {
            return Err(format!("{tx}: gain of {u} is {g}, closed form {c}"));
        }
        total += g;
    }
    if !close(total, 0.0, scale) {
        return Err(format!("{tx}: gains sum to {total}"));
    }
    if sole {
        let g = gain(&m, &s, &o, &swapper, std::slice::from_ref(&tx))
            .unwrap()
            .value;
        if !close(g, 0.0, scale) {
            return Err(format!("{tx}: sole holder gains {g}"));
        }
    }
    Ok(true)
}

fn outsider_swap(
    rng: &mut ChaCha8Rng,
    s: &State<f64>,
    t_in: &str,
    t_out: &str,
) -> Transaction<f64> {
    let z = user(OUTSIDER);
    let x = s.holding(&z, &Token::from(sym(t_in))) * rng.gen_range(0.0001..0.5);
    Transaction::swap(z, x, sym(t_in), sym(t_out))
}

fn random_direction(rng: &mut ChaCha8Rng) -> (&'static str, &'static str) {
    if rng.gen_bool(0.5) {
        ("t0", "t1")
    } else {
        ("t1", "t0")
    }
}

fn outsider_gain(m: &Cp, s: &State<f64>, o: &PriceOracle<f64>, tr: &[Transaction<f64>]) -> f64 {
    let g = gain(m, s, o, &user(OUTSIDER), tr).unwrap();
    assert!(g.enabled, "trace not enabled");
    g.value
}

/// The sign of a swap's gain is the sign of the swap rate against the
/// exchange rate, for a swapper with no minted tokens.
pub fn law_gain_sign(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let m = machine();
    let o = oracle(rng);
    let s = reachable(rng, 6);
    let (a, b) = random_direction(rng);
    let tx = outsider_swap(rng, &s, a, b);
    if m.apply(&s, &tx).is_err() {
        return Ok(false);
    }
    let g = outsider_gain(&m, &s, &o, std::slice::from_ref(&tx));
    let expected = gain_sign(&m, &s, &o, &tx).map_err(|e| e.to_string())?;
    let scale = global_net_worth(&s, &o).unwrap();
    let observed = if close(g, 0.0, scale) {
        Ordering::Equal
    } else {
        g.total_cmp(&0.0)
    };
    if observed == expected || close(g, 0.0, scale) {
        Ok(true)
    } else {
        Err(format!(
            "{tx}: gain {g} but rate comparison says {expected:?}"
        ))
    }
}

/// A profitable swap in one direction makes every swap in the other
/// direction a loss.
pub fn law_unique_direction(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let m = machine();
    let o = oracle(rng);
    let s = reachable(rng, 6);
    let fwd = outsider_swap(rng, &s, "t0", "t1");
    let bwd = outsider_swap(rng, &s, "t1", "t0");
    if m.apply(&s, &fwd).is_err() || m.apply(&s, &bwd).is_err() {
        return Ok(false);
    }
    let gf = outsider_gain(&m, &s, &o, std::slice::from_ref(&fwd));
    let gb = outsider_gain(&m, &s, &o, std::slice::from_ref(&bwd));
    if gf > 0.0 && gb >= 0.0 || gb > 0.0 && gf >= 0.0 {
        Err(format!("{fwd} gains {gf} and {bwd} gains {gb}"))
    } else {
        Ok(true)
    }
}

/// Another user's deposit before a swap raises the swapper's gain; a redeem
/// lowers it. The swapper holds no minted tokens.
pub fn law_slippage(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let m = machine();
    let o = oracle(rng);
    let s = reachable(rng, 6);
    let (a, b) = random_direction(rng);
    let swap = outsider_swap(rng, &s, a, b);
    let before = if rng.gen_bool(0.5) {
        split(rng, &s, 0).map(|(d, _)| d)
    } else {
        split(rng, &s, 1).map(|(r, _)| r)
    };
    let Some(before) = before else {
        return Ok(false);
    };
    if !m.enabled(&s, std::slice::from_ref(&swap))
        || !m.enabled(&s, &[before.clone(), swap.clone()])
    {
        return Ok(false);
    }
    let alone = outsider_gain(&m, &s, &o, std::slice::from_ref(&swap));
    let after = outsider_gain(&m, &s, &o, &[before.clone(), swap.clone()]);
    let ok = match before.kind() {
        amm_core::Kind::Dep => after > alone,
        _ => after < alone,
    };
    if ok {
        Ok(true)
    } else {
        Err(format!("{before}; {swap}: gain {after} vs {alone} alone"))
    }
}

pub fn problem(s: &State<f64>, o: &PriceOracle<f64>) -> ArbitrageProblem<f64> {
    let z = user(OUTSIDER);
    ArbitrageProblem::new(
        s.pool(&p01()).unwrap().clone(),
        o.clone(),
        z.clone(),
        s.wallet(&z).unwrap().balance.clone(),
    )
    .unwrap()
}

fn arbitrage_scaling(rng: &mut ChaCha8Rng, kind: usize) -> Result<bool, String> {
    let m = machine();
    let o = oracle(rng);
    let s = reachable(rng, 6);
    let Some((tx, _)) = split(rng, &s, kind) else {
        return Ok(false);
    };
    let Ok(t) = m.apply(&s, &tx) else {
        return Err(format!("{tx} not enabled"));
    };
    let a = match &tx.action {
        amm_core::Action::Dep { v1, .. } => {
            let r1 = s.pool(&p01()).unwrap().reserves[1];
            (r1 + v1) / r1
        }
        amm_core::Action::Rdm { v, .. } => 1.0 - v / s.supply(&Token::Minted(p01())),
        _ => unreachable!(),
    };
    let old = solve_constant_product(&problem(&s, &o), 1e-12).map_err(|e| e.to_string())?;
    let new = solve_constant_product(&problem(&t, &o), 1e-12).map_err(|e| e.to_string())?;
    match (&old.mv, &new.mv) {
        (Move::Empty, Move::Empty) => Ok(true),
        (
            Move::Swap { x, t_in, .. },
            Move::Swap {
                x: x2, t_in: t_in2, ..
            },
        ) => {
            if t_in != t_in2 || !rel(a * x, *x2) || !rel(a * old.gain, new.gain) {
                Err(format!(
                    "after {tx} (a = {a}): x {x} -> {x2}, gain {} -> {}",
                    old.gain, new.gain
                ))
            } else {
                Ok(true)
            }
        }
        _ => Err(format!("after {tx}: {:?} became {:?}", old.mv, new.mv)),
    }
}

pub fn law_arbitrage_after_deposit(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    arbitrage_scaling(rng, 0)
}

pub fn law_arbitrage_after_redeem(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    arbitrage_scaling(rng, 1)
}

/// After the optimal swap no direction is profitable.
pub fn law_arbitrage_equilibrium(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let o = oracle(rng);
    let s = reachable(rng, 6);
    let p = problem(&s, &o);
    let sol = solve_constant_product(&p, 1e-12).map_err(|e| e.to_string())?;
    let Move::Swap { x, t_in, t_out } = sol.mv else {
        return Ok(false);
    };
    let mut pool = p.pool.clone();
    let y = x * pool.reserve(&t_out).unwrap() / (pool.reserve(&t_in).unwrap() + x);
    let i = pool.pair.side_of(&t_in).unwrap();
    pool.reserves[i] += x;
    pool.reserves[1 - i] -= y;
    let after = ArbitrageProblem::new(pool, o, p.user, p.user_balance).unwrap();
    match pick_direction(&after, &ConstantProduct, 1e-6).map_err(|e| e.to_string())? {
        None => Ok(true),
        Some(d) => Err(format!("still profitable {} -> {}", d.t_in, d.t_out)),
    }
}

/// Two concurrent transactions enabled in both orders reach the same state.
pub fn law_concurrent_commute(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let m = machine();
    let s = reachable(rng, 6);
    let a = random_tx(rng, &s, true);
    let b = random_tx(rng, &s, true);
    if a == b || !concurrent(&a, &b).unwrap() {
        return Ok(false);
    }
    let (Ok(x), Ok(y)) = (
        m.run_final(&s, &[a.clone(), b.clone()]),
        m.run_final(&s, &[b.clone(), a.clone()]),
    ) else {
        return Ok(false);
    };
    if states_match(&x, &y) {
        Ok(true)
    } else {
        Err(format!("{a} and {b} do not commute"))
    }
}

/// An enabled random trace of at most `len` steps over pools of all four
/// tokens.
pub fn random_trace(rng: &mut ChaCha8Rng, len: usize) -> (State<f64>, Vec<Transaction<f64>>) {
    let m = machine();
    let mut s = reachable(rng, 0);
    if s.pools.len() < 2 {
        s = create_pool(rng, &s, "t2", "t3");
    }
    let start = s.clone();
    let mut trace = Vec::new();
    let n = rng.gen_range(1..=len);
    while trace.len() < n {
        let tx = random_tx(rng, &s, true);
        if let Ok(next) = m.apply(&s, &tx) {
            s = next;
            trace.push(tx);
        }
    }
    (start, trace)
}

pub fn law_reorder_sound(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let (s, trace) = random_trace(rng, 8);
    match check_reorder_soundness(&machine(), &s, &trace, &TOL, 2_000) {
        Ok(r) if r.explored > 0 => Ok(true),
        Ok(_) => Err("nothing explored".into()),
        Err(e) => Err(format!("{e}")),
    }
}

/// The drain procedure reaches any lower `t0` reserve using redeems only.
pub fn law_liquidity(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let m = machine();
    let s = reachable(rng, 10);
    let pair = p01();
    let r0 = s.pool(&pair).unwrap().reserves[0];
    let target = r0 * rng.gen_range(0.001..0.999);
    let (t, trace) = drain(&m, &s, &pair, 0, target)?;
    if trace.iter().any(|tx| tx.kind() != amm_core::Kind::Rdm) {
        return Err("drain used a non-redeem".into());
    }
    let got = t.pool(&pair).unwrap().reserves[0];
    if rel(got, target) {
        Ok(true)
    } else {
        Err(format!("drained to {got}, wanted {target}"))
    }
}

/// Runs `law` on `cases` applicable cases from consecutive seeds. Gives up
/// after `50 * cases` attempts.
pub fn check_law(law: Law, seed: u64, cases: usize) -> Result<usize, String> {
    let mut checked = 0;
    let mut attempts = 0u64;
    while checked < cases {
        if attempts > 50 * cases as u64 {
            return Err(format!(
                "only {checked} applicable cases in {attempts} attempts"
            ));
        }
        let mut r = rng(seed.wrapping_add(attempts));
        attempts += 1;
        match law(&mut r) {
            Ok(true) => checked += 1,
            Ok(false) => {}
            Err(e) => return Err(format!("seed {}: {e}", seed.wrapping_add(attempts - 1))),
        }
    }
    Ok(checked)
}

pub mod walkthrough;
