//! Identifiers: atomic token symbols, users, token pairs and token types.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentError {
    #[error("identifier is empty")]
    Empty,
    #[error("`{0}` is not an identifier ([A-Za-z_][A-Za-z0-9_]*)")]
    Malformed(String),
    #[error("minted token needs two distinct atomic tokens, got `{0}` twice")]
    SameToken(String),
    #[error("`{0}` is not a token (expected `sym` or `{{a,b}}`)")]
    BadToken(String),
}

pub(crate) fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn check_ident(s: &str) -> Result<(), IdentError> {
    if s.is_empty() {
        Err(IdentError::Empty)
    } else if !is_ident(s) {
        Err(IdentError::Malformed(s.to_string()))
    } else {
        Ok(())
    }
}

macro_rules! ident_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(s: &str) -> Result<Self, IdentError> {
                check_ident(s)?;
                Ok(Self(Arc::from(s)))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl FromStr for $name {
            type Err = IdentError;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                Self::new(s)
            }
        }

        impl Serialize for $name {
            fn serialize<Z: Serializer>(&self, ser: Z) -> Result<Z::Ok, Z::Error> {
                ser.serialize_str(&self.0)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
                let s = String::deserialize(de)?;
                Self::new(&s).map_err(serde::de::Error::custom)
            }
        }
    };
}

ident_type!(
    /// Name of an atomic token type, e.g. `t0`.
    Symbol
);
ident_type!(
    /// Name of a user owning a wallet.
    UserId
);

/// Shorthand for building a [`Symbol`] from a known-good literal.
pub fn sym(s: &str) -> Symbol {
    Symbol::new(s).expect("valid symbol literal")
}

/// Shorthand for building a [`UserId`] from a known-good literal.
pub fn user(s: &str) -> UserId {
    UserId::new(s).expect("valid user literal")
}

/// An unordered pair of atomic symbols, stored in lexicographic order.
///
/// The pair may be degenerate (`a == a`) so that malformed pools can still be
/// represented and reported by validation; [`Pair::distinct`] and
/// [`Token::minted`] reject that case.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    lo: Symbol,
    hi: Symbol,
}

impl Pair {
    pub fn new(a: Symbol, b: Symbol) -> Self {
        if a <= b {
            Pair { lo: a, hi: b }
        } else {
            Pair { lo: b, hi: a }
        }
    }

    pub fn distinct(a: Symbol, b: Symbol) -> Result<Self, IdentError> {
        if a == b {
            return Err(IdentError::SameToken(a.to_string()));
        }
        Ok(Self::new(a, b))
    }

    pub fn first(&self) -> &Symbol {
        &self.lo
    }

    pub fn second(&self) -> &Symbol {
        &self.hi
    }

    /// Canonical side (0 or 1) of `t`, if it belongs to the pair.
    pub fn side_of(&self, t: &Symbol) -> Option<usize> {
        if *t == self.lo {
            Some(0)
        } else if *t == self.hi {
            Some(1)
        } else {
            None
        }
    }

    pub fn get(&self, side: usize) -> &Symbol {
        if side == 0 {
            &self.lo
        } else {
            &self.hi
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, t: &Symbol) -> bool {
        self.side_of(t).is_some()
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo, self.hi)
    }
}

impl fmt::Debug for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A token type: atomic, or the minted (liquidity) token of a pair.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Token {
    Atomic(Symbol),
    Minted(Pair),
}

impl Token {
    pub fn minted(a: Symbol, b: Symbol) -> Result<Self, IdentError> {
        Ok(Token::Minted(Pair::distinct(a, b)?))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Token::Atomic(_))
    }
}

impl From<Symbol> for Token {
    fn from(s: Symbol) -> Self {
        Token::Atomic(s)
    }
}

impl From<Pair> for Token {
    fn from(p: Pair) -> Self {
        Token::Minted(p)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Atomic(s) => fmt::Display::fmt(s, f),
            Token::Minted(p) => fmt::Display::fmt(p, f),
        }
    }
}

impl fmt::Debug for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Token {
    type Err = IdentError;

    /// Parses `t0` or `{t0,t1}` (whitespace inside the braces allowed).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
            let mut parts = inner.split(',');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => {
                    Token::minted(Symbol::new(a.trim())?, Symbol::new(b.trim())?)
                }
                _ => Err(IdentError::BadToken(s.to_string())),
            }
        } else {
            Ok(Token::Atomic(Symbol::new(s)?))
        }
    }
}

impl Serialize for Token {
    fn serialize<Z: Serializer>(&self, ser: Z) -> Result<Z::Ok, Z::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Token {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
