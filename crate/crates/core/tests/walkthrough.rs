mod common;

use amm_core::economics::{net_worth, price};
use amm_core::{
    dsl, global_net_worth, ratio, sym, user, BigRational, ConstantProduct, Machine, Pair,
    PriceOracle, State, Token,
};
use common::walkthrough;

fn q(n: i64, d: i64) -> BigRational {
    ratio(n, d)
}

fn exact_states() -> Vec<State<BigRational>> {
    let m = Machine::new(ConstantProduct);
    m.run(&walkthrough::initial(), &walkthrough::trace())
        .expect("enabled")
}

#[test]
fn exact_replay() {
    let states = exact_states();
    assert_eq!(states.len(), 7);
    let last = states.last().unwrap();
    let pool = last.pool(&Pair::new(sym("t0"), sym("t1"))).unwrap();
    assert_eq!(pool.reserves, [q(35, 2), q(40, 7)]);
    let (a, b) = (user("A"), user("B"));
    assert_eq!(last.holding(&a, &Token::from(sym("t0"))), q(165, 2));
    assert_eq!(last.holding(&a, &Token::from(sym("t1"))), q(330, 7));
    assert_eq!(
        last.holding(&a, &Token::Minted(pool.pair.clone())),
        q(10, 1)
    );
    assert_eq!(last.holding(&b, &Token::from(sym("t1"))), q(190, 7));

    // before the last redeem
    let s5 = &states[5];
    let p5 = s5.pool(&pool.pair).unwrap();
    assert_eq!(p5.reserves, [q(70, 1), q(160, 7)]);
    assert_eq!(
        amm_core::redeem_rate(&states[5], &pool.pair, 1).unwrap(),
        q(4, 7)
    );
}

#[test]
fn exact_supply_and_products() {
    let states = exact_states();
    let (t0, t1) = (Token::from(sym("t0")), Token::from(sym("t1")));
    for s in &states {
        assert_eq!(s.supply(&t0), q(100, 1));
        assert_eq!(s.supply(&t1), q(80, 1));
    }
    let product = |s: &State<BigRational>| {
        let p = &s.pools[0].reserves;
        p[0].clone() * p[1].clone()
    };
    for s in &states[1..=3] {
        assert_eq!(product(s), q(4900, 1));
    }
    assert_eq!(product(&states[4]), q(1600, 1));
    assert_eq!(product(&states[5]), q(1600, 1));
}

#[test]
fn float_replay_matches_display() {
    let m = Machine::new(ConstantProduct);
    let states = m
        .run(&walkthrough::initial::<f64>(), &walkthrough::trace())
        .unwrap();
    for (i, (s, shown)) in states.iter().zip(walkthrough::DISPLAYED).enumerate() {
        let got = walkthrough::flatten(s);
        for (g, d) in got.iter().zip(shown) {
            assert!(
                (g - d).abs() <= 0.5 + 1e-9,
                "step {i}: {got:?} vs {shown:?}"
            );
        }
    }
}

#[test]
fn exact_net_worth_is_constant() {
    let o = PriceOracle::from_prices([(sym("t0"), q(5, 1)), (sym("t1"), q(9, 1))]).unwrap();
    for s in exact_states() {
        assert_eq!(global_net_worth(&s, &o).unwrap(), q(1220, 1));
    }
}

#[test]
fn rounded_final_state_economics() {
    let o = PriceOracle::from_prices(walkthrough::PRICES.map(|(t, p)| (sym(t), p))).unwrap();
    let s = walkthrough::rounded_final();
    let m = Token::Minted(Pair::new(sym("t0"), sym("t1")));
    assert_eq!(price(&s, &o, &m).unwrap(), 14.4);
    assert_eq!(net_worth(&s, &o, &user("A")).unwrap(), 977.0);
    assert_eq!(net_worth(&s, &o, &user("B")).unwrap(), 243.0);
    let s0 = walkthrough::initial::<f64>();
    assert_eq!(net_worth(&s0, &o, &user("A")).unwrap(), 980.0);
    assert_eq!(net_worth(&s0, &o, &user("B")).unwrap(), 240.0);
}

#[test]
fn text_form_parses_to_the_same_trace() {
    let tf = dsl::parse(walkthrough::TEXT).unwrap();
    assert_eq!(tf.transactions, walkthrough::trace::<f64>());
    assert!(amm_core::state_eq(
        &tf.initial_state(),
        &walkthrough::initial(),
        &0.0
    ));
}
