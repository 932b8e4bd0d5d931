//! Numeric abstraction shared by every module.
//!
//! The model is stated over the nonnegative reals. Binary floating point
//! (`f64`, `f32`) is the working type; [`num_rational::BigRational`] gives an
//! exact replay of any computation that stays inside the field operations,
//! which the test-suite uses as an oracle for the floating point results.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive, Zero};

/// An ordered field element usable as a token amount, reserve or price.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// `false` for NaN and infinities.
    fn is_finite_scalar(&self) -> bool;

    /// Relative tolerance used for equality premises (`r1*v0 = r0*v1`) and
    /// for state comparison. Zero for exact types.
    fn default_tolerance() -> Self;

    /// Unit roundoff scale: machine epsilon for floats, zero for exact types.
    fn epsilon_scalar() -> Self;

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            Self::zero() - self.clone()
        } else {
            self.clone()
        }
    }

    /// Converts a literal; panics only on NaN or infinity input.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(|| panic!("{v} is not representable"))
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn is_finite_scalar(&self) -> bool {
        self.is_finite()
    }

    fn default_tolerance() -> Self {
        1e-9
    }

    fn epsilon_scalar() -> Self {
        f64::EPSILON
    }
}

impl Scalar for f32 {
    fn is_finite_scalar(&self) -> bool {
        self.is_finite()
    }

    fn default_tolerance() -> Self {
        1e-5
    }

    fn epsilon_scalar() -> Self {
        f32::EPSILON
    }
}

impl Scalar for BigRational {
    fn is_finite_scalar(&self) -> bool {
        true
    }

    fn default_tolerance() -> Self {
        BigRational::zero()
    }

    fn epsilon_scalar() -> Self {
        BigRational::zero()
    }
}

/// Scalars that also support the transcendental operations needed by the
/// arbitrage solver and the weighted swap rate.
pub trait Real: Scalar + Float {}

impl<T: Scalar + Float> Real for T {}

/// Builds an exact rational `num / den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn max3<S: Scalar>(a: S, b: S, c: S) -> S {
    let m = if a > b { a } else { b };
    if m > c {
        m
    } else {
        c
    }
}

/// `|a - b| <= tol * max(|a|, |b|, 1)`: relative away from zero, absolute
/// near zero. This is the equality contract for amounts and states.
pub fn approx_eq<S: Scalar>(a: &S, b: &S, tol: &S) -> bool {
    let diff = (a.clone() - b.clone()).abs_val();
    let scale = max3(a.abs_val(), b.abs_val(), S::one());
    diff <= tol.clone() * scale
}

/// Purely relative comparison, `|a - b| <= tol * max(|a|, |b|)`. Used for
/// swap-rate identities whose values may be far below one.
pub fn rel_eq<S: Scalar>(a: &S, b: &S, tol: &S) -> bool {
    if a == b {
        return true;
    }
    let diff = (a.clone() - b.clone()).abs_val();
    let scale = if a.abs_val() > b.abs_val() {
        a.abs_val()
    } else {
        b.abs_val()
    };
    diff <= tol.clone() * scale
}

/// Sign of `a - b` with `approx_eq` treated as equal.
pub fn cmp_tol<S: Scalar>(a: &S, b: &S, tol: &S) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    if approx_eq(a, b, tol) {
        Ordering::Equal
    } else if a < b {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}
