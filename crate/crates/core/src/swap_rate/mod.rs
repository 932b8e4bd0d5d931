//! Swap-rate functions `SX(x, r_in, r_out)`: output tokens per input token
//! for a swap of `x` against reserves `r_in` (input side) and `r_out`.

mod check;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::scalar::{Real, Scalar};

pub use check::{
    additive_at, certify, check_additive, check_homogeneous, check_monotonic, check_output_bound,
    check_reversible, Counterexample, Mismatch, PropertyCheckConfig, PropertyReport, Verdict,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    OutputBound,
    Monotonic,
    StrictlyMonotonic,
    Additive,
    Reversible,
    Homogeneous,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::OutputBound,
        Property::Monotonic,
        Property::StrictlyMonotonic,
        Property::Additive,
        Property::Reversible,
        Property::Homogeneous,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Property::OutputBound => "output_bound",
            Property::Monotonic => "monotonic",
            Property::StrictlyMonotonic => "strictly_monotonic",
            Property::Additive => "additive",
            Property::Reversible => "reversible",
            Property::Homogeneous => "homogeneous",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

pub type PropertySet = BTreeSet<Property>;

pub fn all_properties() -> PropertySet {
    Property::ALL.into_iter().collect()
}

/// A swap-rate function together with the properties it claims to satisfy.
///
/// `rate` is only ever called with `x >= 0` and strictly positive reserves.
pub trait SwapRate<S>: Send + Sync {
    fn name(&self) -> String;
    fn rate(&self, x: &S, r_in: &S, r_out: &S) -> S;
    fn declared(&self) -> PropertySet;
}

impl<S, R: SwapRate<S> + ?Sized> SwapRate<S> for &R {
    fn name(&self) -> String {
        (**self).name()
    }
    fn rate(&self, x: &S, r_in: &S, r_out: &S) -> S {
        (**self).rate(x, r_in, r_out)
    }
    fn declared(&self) -> PropertySet {
        (**self).declared()
    }
}

impl<S, R: SwapRate<S> + ?Sized> SwapRate<S> for Box<R> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn rate(&self, x: &S, r_in: &S, r_out: &S) -> S {
        (**self).rate(x, r_in, r_out)
    }
    fn declared(&self) -> PropertySet {
        (**self).declared()
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum RateError {
    #[error("fee factor must lie in (0, 1], got {0}")]
    BadFee(f64),
    #[error("weights must be positive and finite, got ({0}, {1})")]
    BadWeights(f64, f64),
}

/// `SX(x, r0, r1) = r1 / (r0 + x)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConstantProduct;

impl<S: Scalar> SwapRate<S> for ConstantProduct {
    fn name(&self) -> String {
        "constprod".into()
    }

    fn rate(&self, x: &S, r_in: &S, r_out: &S) -> S {
        r_out.clone() / (r_in.clone() + x.clone())
    }

    fn declared(&self) -> PropertySet {
        all_properties()
    }
}

/// `SX(x, r0, r1) = phi * r1 / (r0 + phi * x)`: the input is charged a fee of
/// `1 - phi` before it reaches the constant-product curve.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantProductWithFee<S> {
    phi: S,
}

impl<S: Scalar> ConstantProductWithFee<S> {
    pub fn new(phi: S) -> Result<Self, RateError> {
        if !(phi > S::zero() && phi <= S::one()) || !phi.is_finite_scalar() {
            return Err(RateError::BadFee(phi.to_f64_lossy()));
        }
        Ok(ConstantProductWithFee { phi })
    }

    pub fn phi(&self) -> &S {
        &self.phi
    }
}

impl<S: Scalar> SwapRate<S> for ConstantProductWithFee<S> {
    fn name(&self) -> String {
        format!("constprod-fee:{}", self.phi.to_f64_lossy())
    }

    fn rate(&self, x: &S, r_in: &S, r_out: &S) -> S {
        self.phi.clone() * r_out.clone() / (r_in.clone() + self.phi.clone() * x.clone())
    }

    fn declared(&self) -> PropertySet {
        if self.phi == S::one() {
            return all_properties();
        }
        [
            Property::OutputBound,
            Property::Monotonic,
            Property::StrictlyMonotonic,
            Property::Homogeneous,
        ]
        .into_iter()
        .collect()
    }
}

/// Rate of a pool keeping `r_in^w_in * r_out^w_out` constant:
/// `r_out * (1 - (r_in / (r_in + x))^(w_in / w_out)) / x`, with the limit
/// `w_in * r_out / (w_out * r_in)` at `x = 0`.
///
/// Declares no properties unless told to; run [`certify`] to find out.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedMean<S> {
    w_in: S,
    w_out: S,
    declared: PropertySet,
}

impl<S: Real> WeightedMean<S> {
    pub fn new(w_in: S, w_out: S) -> Result<Self, RateError> {
        let ok = |w: &S| *w > S::zero() && w.is_finite_scalar();
        if !ok(&w_in) || !ok(&w_out) {
            return Err(RateError::BadWeights(
                w_in.to_f64_lossy(),
                w_out.to_f64_lossy(),
            ));
        }
        Ok(WeightedMean {
            w_in,
            w_out,
            declared: PropertySet::new(),
        })
    }

    pub fn declaring(mut self, props: impl IntoIterator<Item = Property>) -> Self {
        self.declared = props.into_iter().collect();
        self
    }
}

impl<S: Real> SwapRate<S> for WeightedMean<S> {
    fn name(&self) -> String {
        format!(
            "weighted:{}:{}",
            self.w_in.to_f64_lossy(),
            self.w_out.to_f64_lossy()
        )
    }

    fn rate(&self, x: &S, r_in: &S, r_out: &S) -> S {
        let k = self.w_in / self.w_out;
        if *x == S::zero() {
            return k * *r_out / *r_in;
        }
        // 1 - (1 + x/r_in)^-k, evaluated without cancellation for small x.
        let share = -(-k * (*x / *r_in).ln_1p()).exp_m1();
        *r_out * share / *x
    }

    fn declared(&self) -> PropertySet {
        self.declared.clone()
    }
}

/// Adapter turning a closure into a [`SwapRate`], mainly for experiments
/// and for exercising the property checkers on deliberately broken rates.
pub struct FnRate<F> {
    name: String,
    f: F,
    declared: PropertySet,
}

impl<F> FnRate<F> {
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnRate {
            name: name.into(),
            f,
            declared: PropertySet::new(),
        }
    }

    pub fn declaring(mut self, props: impl IntoIterator<Item = Property>) -> Self {
        self.declared = props.into_iter().collect();
        self
    }
}

impl<S, F> SwapRate<S> for FnRate<F>
where
    F: Fn(&S, &S, &S) -> S + Send + Sync,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn rate(&self, x: &S, r_in: &S, r_out: &S) -> S {
        (self.f)(x, r_in, r_out)
    }

    fn declared(&self) -> PropertySet {
        self.declared.clone()
    }
}
