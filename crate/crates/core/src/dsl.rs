//! Line-based trace language.
//!
//! ```text
//! # two users, one pool
//! price t0 5
//! price t1 9
//! wallet A 70:t0 70:t1
//! wallet B 30:t0 10:t1
//! A: dep(70:t0, 70:t1)
//! B: swap(30:t0, t1)
//! A: rdm(30:{t0,t1})
//! B: swap(30:t0, t1, min=20)
//! A: rdm(10:{t0,t1}, min=5:t0, min=5:t1)
//! A: dep(min=1 max=10:t0, min=1 max=10:t1)
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::economics::{EconError, PriceOracle};
use crate::state::{Balance, State};
use crate::token::{Pair, Symbol, Token, UserId};
use crate::tx::{Action, Transaction};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// A parsed trace file. Declarations keep their textual order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TraceFile {
    pub prices: Vec<(Symbol, f64)>,
    pub wallets: Vec<(UserId, Vec<(f64, Token)>)>,
    pub transactions: Vec<Transaction<f64>>,
}

impl TraceFile {
    pub fn initial_state(&self) -> State<f64> {
        let mut s = State::new();
        for (u, entries) in &self.wallets {
            let mut b = Balance::new();
            for (v, t) in entries {
                b.credit(t, *v);
            }
            s = s.with_wallet(u.clone(), b);
        }
        s
    }

    pub fn oracle(&self) -> Result<PriceOracle<f64>, EconError> {
        PriceOracle::from_prices(self.prices.iter().cloned())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Tok<'a> {
    Ident(&'a str),
    Num(f64),
    Punct(char),
}

impl fmt::Display for Tok<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "number {n}"),
            Tok::Punct(c) => write!(f, "`{c}`"),
        }
    }
}

struct Lexed<'a> {
    toks: Vec<(Tok<'a>, usize)>,
    end_col: usize,
}

fn lex(line: &str) -> Result<Lexed<'_>, (usize, String)> {
    let mut toks = Vec::new();
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (start, c) = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].1.is_ascii_alphanumeric() || chars[j].1 == '_') {
                j += 1;
            }
            let end = chars.get(j).map_or(line.len(), |p| p.0);
            toks.push((Tok::Ident(&line[start..end]), col));
            i = j;
        } else if c.is_ascii_digit() || c == '.' || c == '-' || c == '+' {
            let mut j = i + 1;
            while j < chars.len() {
                let d = chars[j].1;
                let prev = chars[j - 1].1;
                let sign = (d == '-' || d == '+') && (prev == 'e' || prev == 'E');
                if !(d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || sign) {
                    break;
                }
                j += 1;
            }
            let end = chars.get(j).map_or(line.len(), |p| p.0);
            let text = &line[start..end];
            let valid = text
                .trim_start_matches(['-', '+'])
                .starts_with(|ch: char| ch.is_ascii_digit() || ch == '.');
            match text.parse::<f64>() {
                Ok(v) if valid && v.is_finite() => toks.push((Tok::Num(v), col)),
                _ => return Err((col, format!("malformed number `{text}`"))),
            }
            i = j;
        } else if "():,{}=".contains(c) {
            toks.push((Tok::Punct(c), col));
            i += 1;
        } else {
            return Err((col, format!("unexpected character `{c}`")));
        }
    }
    Ok(Lexed {
        toks,
        end_col: line.chars().count() + 1,
    })
}

struct Cursor<'a> {
    toks: Vec<(Tok<'a>, usize)>,
    pos: usize,
    end_col: usize,
}

type Res<T> = Result<T, (usize, String)>;

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<Tok<'a>> {
        self.toks.get(self.pos).map(|t| t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.1)
    }

    fn err<T>(&self, expected: &str) -> Res<T> {
        let found = self
            .peek()
            .map_or_else(|| "end of line".to_string(), |t| t.to_string());
        Err((self.col(), format!("expected {expected}, found {found}")))
    }

    fn punct(&mut self, c: char) -> Res<()> {
        if self.peek() == Some(Tok::Punct(c)) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("`{c}`"))
        }
    }

    fn ident(&mut self, what: &str) -> Res<(&'a str, usize)> {
        let col = self.col();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok((s, col))
            }
            _ => self.err(what),
        }
    }

    fn keyword(&mut self, kw: &str) -> Res<()> {
        if self.peek() == Some(Tok::Ident(kw)) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("`{kw}`"))
        }
    }

    fn number(&mut self) -> Res<(f64, usize)> {
        let col = self.col();
        match self.peek() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok((v, col))
            }
            _ => self.err("a number"),
        }
    }

    fn symbol(&mut self) -> Res<Symbol> {
        let (s, _) = self.ident("a token name")?;
        Ok(Symbol::new(s).expect("lexer yields identifiers"))
    }

    /// `{a,b}` with `{` already peeked.
    fn minted(&mut self) -> Res<Pair> {
        let col = self.col();
        self.punct('{')?;
        let a = self.symbol()?;
        self.punct(',')?;
        let b = self.symbol()?;
        self.punct('}')?;
        Pair::distinct(a, b).map_err(|e| (col, e.to_string()))
    }

    fn token(&mut self) -> Res<Token> {
        if self.peek() == Some(Tok::Punct('{')) {
            Ok(Token::Minted(self.minted()?))
        } else {
            Ok(Token::Atomic(self.symbol()?))
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn end(&self) -> Res<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.err("end of line")
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        self.peek() == Some(Tok::Ident(kw))
    }
}

enum Stmt {
    Price(Symbol, f64),
    Wallet(UserId, Vec<(f64, Token)>),
    Tx(Transaction<f64>),
}

/// `min=a max=b:t` or `a:t`.
enum DepArg {
    Plain(f64, Symbol),
    Range(f64, f64, Symbol),
}

fn dep_arg(c: &mut Cursor) -> Res<DepArg> {
    if c.is_kw("min") {
        c.keyword("min")?;
        c.punct('=')?;
        let (lo, _) = c.number()?;
        c.keyword("max")?;
        c.punct('=')?;
        let (hi, _) = c.number()?;
        c.punct(':')?;
        Ok(DepArg::Range(lo, hi, c.symbol()?))
    } else {
        let (v, _) = c.number()?;
        c.punct(':')?;
        Ok(DepArg::Plain(v, c.symbol()?))
    }
}

fn action(c: &mut Cursor) -> Res<Action<f64>> {
    let (name, col) = c.ident("`dep`, `swap` or `rdm`")?;
    match name {
        "dep" => {
            c.punct('(')?;
            let a = dep_arg(c)?;
            c.punct(',')?;
            let b = dep_arg(c)?;
            c.punct(')')?;
            let act = match (a, b) {
                (DepArg::Plain(v0, t0), DepArg::Plain(v1, t1)) => Action::Dep { v0, t0, v1, t1 },
                (DepArg::Range(v0_min, v0_max, t0), DepArg::Range(v1_min, v1_max, t1)) => {
                    Action::GDep {
                        v0_min,
                        v0_max,
                        t0,
                        v1_min,
                        v1_max,
                        t1,
                    }
                }
                _ => {
                    return Err((
                        col,
                        "dep arguments must be both plain or both ranged".into(),
                    ))
                }
            };
            let (t0, t1) = match &act {
                Action::Dep { t0, t1, .. } | Action::GDep { t0, t1, .. } => (t0, t1),
                _ => unreachable!(),
            };
            if t0 == t1 {
                return Err((col, "dep tokens must differ".into()));
            }
            Ok(act)
        }
        "swap" => {
            c.punct('(')?;
            let (x, _) = c.number()?;
            c.punct(':')?;
            let t_in = c.symbol()?;
            c.punct(',')?;
            let t_out = c.symbol()?;
            let y_min = if c.peek() == Some(Tok::Punct(',')) {
                c.punct(',')?;
                c.keyword("min")?;
                c.punct('=')?;
                Some(c.number()?.0)
            } else {
                None
            };
            c.punct(')')?;
            if t_in == t_out {
                return Err((col, "swap tokens must differ".into()));
            }
            Ok(match y_min {
                None => Action::Swap { x, t_in, t_out },
                Some(y_min) => Action::GSwap {
                    x,
                    t_in,
                    t_out,
                    y_min,
                },
            })
        }
        "rdm" => {
            c.punct('(')?;
            let (v, _) = c.number()?;
            c.punct(':')?;
            if c.peek() != Some(Tok::Punct('{')) {
                return c.err("a minted token `{a,b}`");
            }
            let pair = c.minted()?;
            let mut mins: Vec<(f64, Symbol, usize)> = Vec::new();
            while c.peek() == Some(Tok::Punct(',')) {
                c.punct(',')?;
                let col = c.col();
                c.keyword("min")?;
                c.punct('=')?;
                let (m, _) = c.number()?;
                c.punct(':')?;
                mins.push((m, c.symbol()?, col));
            }
            c.punct(')')?;
            if mins.is_empty() {
                return Ok(Action::Rdm { v, pair });
            }
            let mut min = [f64::NAN, f64::NAN];
            for (m, t, col) in &mins {
                match pair.side_of(t) {
                    Some(i) if min[i].is_nan() => min[i] = *m,
                    Some(_) => return Err((*col, format!("duplicate bound for {t}"))),
                    None => return Err((*col, format!("{t} is not in {pair}"))),
                }
            }
            if min.iter().any(|m| m.is_nan()) {
                return Err((col, "guarded rdm needs a bound for each token".into()));
            }
            Ok(Action::GRdm { v, pair, min })
        }
        _ => Err((
            col,
            format!("expected `dep`, `swap` or `rdm`, found `{name}`"),
        )),
    }
}

fn statement(c: &mut Cursor) -> Res<Stmt> {
    let second_is_colon = c.toks.get(1).map(|t| t.0) == Some(Tok::Punct(':'));
    if c.is_kw("price") && !second_is_colon {
        c.keyword("price")?;
        let t = c.symbol()?;
        let (p, col) = c.number()?;
        c.end()?;
        if p <= 0.0 {
            return Err((col, format!("price of {t} must be positive")));
        }
        return Ok(Stmt::Price(t, p));
    }
    if c.is_kw("wallet") && !second_is_colon {
        c.keyword("wallet")?;
        let (u, _) = c.ident("a user name")?;
        let mut entries = Vec::new();
        while !c.at_end() {
            let (v, col) = c.number()?;
            if v < 0.0 {
                return Err((col, "wallet amounts must be nonnegative".into()));
            }
            c.punct(':')?;
            entries.push((v, c.token()?));
        }
        return Ok(Stmt::Wallet(UserId::new(u).expect("identifier"), entries));
    }
    let (u, _) = c.ident("`price`, `wallet` or a user name")?;
    c.punct(':')?;
    let action = action(c)?;
    c.end()?;
    Ok(Stmt::Tx(Transaction {
        user: UserId::new(u).expect("identifier"),
        action,
    }))
}

/// Parses a whole file, reporting every erroneous line.
pub fn parse(text: &str) -> Result<TraceFile, Vec<ParseError>> {
    let mut tf = TraceFile::default();
    let mut errors = Vec::new();
    let mut users = BTreeSet::new();
    let mut priced = BTreeSet::new();
    for (n, line) in text.lines().enumerate() {
        let fail = |col: usize, message: String| ParseError {
            line: n + 1,
            col,
            message,
        };
        let lexed = match lex(line) {
            Ok(l) => l,
            Err((col, m)) => {
                errors.push(fail(col, m));
                continue;
            }
        };
        if lexed.toks.is_empty() {
            continue;
        }
        let first_col = lexed.toks[0].1;
        let mut c = Cursor {
            toks: lexed.toks,
            pos: 0,
            end_col: lexed.end_col,
        };
        match statement(&mut c) {
            Err((col, m)) => errors.push(fail(col, m)),
            Ok(Stmt::Price(t, p)) => {
                if priced.insert(t.clone()) {
                    tf.prices.push((t, p));
                } else {
                    errors.push(fail(first_col, format!("duplicate price for {t}")));
                }
            }
            Ok(Stmt::Wallet(u, entries)) => {
                if users.insert(u.clone()) {
                    tf.wallets.push((u, entries));
                } else {
                    errors.push(fail(first_col, format!("duplicate wallet for {u}")));
                }
            }
            Ok(Stmt::Tx(tx)) => tf.transactions.push(tx),
        }
    }
    if errors.is_empty() {
        Ok(tf)
    } else {
        Err(errors)
    }
}

/// Prints a file that [`parse`] reads back to an equal [`TraceFile`].
pub fn render(tf: &TraceFile) -> String {
    let mut out = String::new();
    for (t, p) in &tf.prices {
        let _ = writeln!(out, "price {t} {p}");
    }
    for (u, entries) in &tf.wallets {
        let _ = write!(out, "wallet {u}");
        for (v, t) in entries {
            let _ = write!(out, " {v}:{t}");
        }
        out.push('\n');
    }
    for tx in &tf.transactions {
        let _ = writeln!(out, "{tx}");
    }
    out
}
