use std::fmt::Write as _;

use amm_core::State;

/// Six significant digits, trailing zeros dropped.
pub fn g6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-4..6).contains(&e) {
        let s = format!("{:.*}", (5 - e).max(0) as usize, x);
        trim(&s).to_string()
    } else {
        let s = format!("{x:.5e}");
        let (m, exp) = s.split_once('e').expect("exponent form");
        format!("{}e{exp}", trim(m))
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn state(s: &State<f64>) -> String {
    let mut out = String::new();
    for w in &s.wallets {
        let items: Vec<String> = w
            .balance
            .iter()
            .map(|(t, v)| format!("{}:{t}", g6(*v)))
            .collect();
        writeln!(out, "  {}[{}]", w.user, items.join(", ")).unwrap();
    }
    for p in &s.pools {
        writeln!(
            out,
            "  ({}:{}, {}:{})",
            g6(p.reserves[0]),
            p.pair.first(),
            g6(p.reserves[1]),
            p.pair.second()
        )
        .unwrap();
    }
    out
}
