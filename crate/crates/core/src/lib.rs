//! Executable model of constant-function automated market makers.
//!
//! States are compositions of user wallets and two-token pools; transactions
//! (deposit, swap, redeem and their guarded forms) move tokens between them
//! according to a deterministic step function. On top of that sit a price
//! layer (net worth, gain), sampled checkers for swap-rate properties, an
//! arbitrage solver and a concurrency/reordering engine.
//!
//! Everything is generic over the scalar type. Use `f64` for normal work and
//! [`BigRational`] for exact replays.

pub mod arbitrage;
pub mod concurrency;
pub mod dsl;
pub mod economics;
pub mod io;
pub mod scalar;
pub mod semantics;
pub mod state;
pub mod swap_rate;
pub mod token;
pub mod tx;

pub use arbitrage::{ArbitrageProblem, ArbitrageSolution, Direction, Move};
pub use economics::{gain, global_net_worth, net_worth, price, PriceOracle};
pub use num_rational::BigRational;
pub use scalar::{approx_eq, ratio, rel_eq, Real, Scalar};
pub use semantics::{merge, redeem_rate, Effect, Halted, Machine, Rejection};
pub use state::{state_eq, Balance, Pool, State, Violation, Wallet};
pub use swap_rate::{
    ConstantProduct, ConstantProductWithFee, Property, PropertyCheckConfig, SwapRate, WeightedMean,
};
pub use token::{sym, user, Pair, Symbol, Token, UserId};
pub use tx::{Action, Kind, Trace, Transaction};

pub type State64 = State<f64>;
pub type ExactState = State<BigRational>;
pub type Transaction64 = Transaction<f64>;
pub type ExactTransaction = Transaction<BigRational>;
