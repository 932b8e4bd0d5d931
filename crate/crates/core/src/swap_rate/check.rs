//! Sampled checkers for the behavioural properties of swap-rate functions.
//!
//! Sampling is evidence, not proof. Samples are drawn log-uniformly from
//! `value_range`; sample `i` of a given property comes from its own ChaCha
//! stream, so results depend only on the seed and not on evaluation order.
//!
//! Inequalities are compared exactly (non-strict ones with a 1e-12 relative
//! guard band). Identities are compared with a relative tolerance of
//! `rel_tol` plus a few ulps, so that `rel_tol = 0` still works for floats.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use super::{Property, SwapRate};
use crate::scalar::{rel_eq, Scalar};

/// Ulps allowed on identities on top of `rel_tol`.
const ROUNDING_SLACK: f64 = 8.0;

/// Relative guard band for non-strict inequalities.
const GUARD_BAND: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyCheckConfig {
    pub samples: usize,
    pub value_range: (f64, f64),
    pub rel_tol: f64,
    pub rng_seed: u64,
}

impl Default for PropertyCheckConfig {
    fn default() -> Self {
        PropertyCheckConfig {
            samples: 10_000,
            value_range: (1e-6, 1e6),
            rel_tol: 1e-9,
            rng_seed: 0,
        }
    }
}

impl PropertyCheckConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.samples = n;
        self
    }

    fn assert_valid(&self) {
        let (lo, hi) = self.value_range;
        assert!(
            lo > 0.0 && hi > lo && hi.is_finite(),
            "value_range must satisfy 0 < lo < hi < inf, got {:?}",
            self.value_range
        );
        assert!(self.rel_tol >= 0.0, "rel_tol must be nonnegative");
    }

    fn rng(&self, prop: Property, i: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(((prop as u64) << 48) | i as u64);
        rng
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        let (lo, hi) = self.value_range;
        let u: f64 = rng.gen();
        (lo.ln() + u * (hi.ln() - lo.ln())).exp().clamp(lo, hi)
    }
}

/// A sample on which a property failed.
#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub property: Property,
    pub inputs: Vec<(&'static str, f64)>,
    pub lhs: f64,
    pub rhs: f64,
}

impl Counterexample {
    pub fn to_json(&self) -> Value {
        let mut inputs = Map::new();
        for (k, v) in &self.inputs {
            inputs.insert((*k).to_string(), json!(v));
        }
        json!({ "inputs": inputs, "lhs": self.lhs, "rhs": self.rhs })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Pass { checked: usize, skipped: usize },
    Fail(Counterexample),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Fail(c) => Some(c),
            Verdict::Pass { .. } => None,
        }
    }
}

enum Sample {
    Ok,
    Skip,
    Bad(Vec<(&'static str, f64)>, f64, f64),
}

fn run(
    cfg: &PropertyCheckConfig,
    prop: Property,
    mut one: impl FnMut(&mut ChaCha8Rng) -> Sample,
) -> Verdict {
    cfg.assert_valid();
    let mut skipped = 0;
    for i in 0..cfg.samples {
        let mut rng = cfg.rng(prop, i);
        match one(&mut rng) {
            Sample::Ok => {}
            Sample::Skip => skipped += 1,
            Sample::Bad(inputs, lhs, rhs) => {
                return Verdict::Fail(Counterexample {
                    property: prop,
                    inputs,
                    lhs,
                    rhs,
                })
            }
        }
    }
    Verdict::Pass {
        checked: cfg.samples - skipped,
        skipped,
    }
}

fn f64s<S: Scalar>(v: &S) -> f64 {
    v.to_f64_lossy()
}

fn usable<S: Scalar>(v: &S) -> bool {
    v.is_finite_scalar()
}

fn identity_tol<S: Scalar>(rel_tol: &S) -> S {
    rel_tol.clone() + S::lit(ROUNDING_SLACK) * S::epsilon_scalar()
}

/// `SX(x, r0, r1) < r1 / x`.
pub fn check_output_bound<S: Scalar, F: SwapRate<S> + ?Sized>(
    f: &F,
    cfg: &PropertyCheckConfig,
) -> Verdict {
    run(cfg, Property::OutputBound, |rng| {
        let (x, r0, r1) = (cfg.draw(rng), cfg.draw(rng), cfg.draw(rng));
        let (xs, r0s, r1s) = (S::lit(x), S::lit(r0), S::lit(r1));
        let lhs = f.rate(&xs, &r0s, &r1s);
        let rhs = r1s / xs;
        if usable(&lhs) && lhs < rhs {
            Sample::Ok
        } else {
            Sample::Bad(
                vec![("x", x), ("r0", r0), ("r1", r1)],
                f64s(&lhs),
                f64s(&rhs),
            )
        }
    })
}

/// Samples `(x, r0, r1)` and a perturbation `(x', r0', r1')` with
/// `x' <= x`, `r0' <= r0`, `r1' >= r1`; each coordinate is either kept or
/// improved by a factor in `[1.01, 10)`. Requires `SX` not to decrease, and
/// with `strict` to increase whenever some coordinate moved.
pub fn check_monotonic<S: Scalar, F: SwapRate<S> + ?Sized>(
    f: &F,
    cfg: &PropertyCheckConfig,
    strict: bool,
) -> Verdict {
    let prop = if strict {
        Property::StrictlyMonotonic
    } else {
        Property::Monotonic
    };
    run(cfg, prop, |rng| {
        let (x, r0, r1) = (cfg.draw(rng), cfg.draw(rng), cfg.draw(rng));
        let mut moved = [rng.gen_bool(0.5), rng.gen_bool(0.5), rng.gen_bool(0.5)];
        if !moved.iter().any(|m| *m) {
            moved[rng.gen_range(0..3)] = true;
        }
        let mut factor = || {
            (rng.gen::<f64>() * 10f64.ln() + 1.01f64.ln())
                .exp()
                .min(10.0)
        };
        let x2 = if moved[0] { x / factor() } else { x };
        let r02 = if moved[1] { r0 / factor() } else { r0 };
        let r12 = if moved[2] { r1 * factor() } else { r1 };
        let lhs = f.rate(&S::lit(x), &S::lit(r0), &S::lit(r1));
        let rhs = f.rate(&S::lit(x2), &S::lit(r02), &S::lit(r12));
        let ok = usable(&lhs)
            && usable(&rhs)
            && if strict {
                lhs < rhs
            } else {
                lhs <= rhs.clone() + rhs.abs_val() * S::lit(GUARD_BAND)
            };
        if ok {
            Sample::Ok
        } else {
            Sample::Bad(
                vec![
                    ("x", x),
                    ("r0", r0),
                    ("r1", r1),
                    ("x'", x2),
                    ("r0'", r02),
                    ("r1'", r12),
                ],
                f64s(&lhs),
                f64s(&rhs),
            )
        }
    })
}

/// Evaluates the additivity identity at one point.
///
/// Returns `None` when `r1 - alpha*x <= 0` (the split swap is undefined),
/// otherwise `(single, composite)`.
pub fn additive_at<S: Scalar, F: SwapRate<S> + ?Sized>(
    f: &F,
    x: &S,
    y: &S,
    r0: &S,
    r1: &S,
) -> Option<(S, S)> {
    let alpha = f.rate(x, r0, r1);
    let out = alpha.clone() * x.clone();
    let r1_after = r1.clone() - out.clone();
    if r1_after <= S::zero() {
        return None;
    }
    let beta = f.rate(y, &(r0.clone() + x.clone()), &r1_after);
    let single = f.rate(&(x.clone() + y.clone()), r0, r1);
    let composite = (out + beta * y.clone()) / (x.clone() + y.clone());
    Some((single, composite))
}

/// `SX(x+y, r0, r1) = (alpha*x + beta*y) / (x+y)` with
/// `alpha = SX(x, r0, r1)` and `beta = SX(y, r0+x, r1 - alpha*x)`.
pub fn check_additive<S: Scalar, F: SwapRate<S> + ?Sized>(
    f: &F,
    cfg: &PropertyCheckConfig,
) -> Verdict {
    let rel = S::lit(cfg.rel_tol);
    run(cfg, Property::Additive, |rng| {
        let (x, y, r0, r1) = (cfg.draw(rng), cfg.draw(rng), cfg.draw(rng), cfg.draw(rng));
        let Some((single, composite)) =
            additive_at(f, &S::lit(x), &S::lit(y), &S::lit(r0), &S::lit(r1))
        else {
            return Sample::Skip;
        };
        if usable(&single) && usable(&composite) && rel_eq(&single, &composite, &identity_tol(&rel))
        {
            Sample::Ok
        } else {
            Sample::Bad(
                vec![("x", x), ("y", y), ("r0", r0), ("r1", r1)],
                f64s(&single),
                f64s(&composite),
            )
        }
    })
}

/// `SX(alpha*x, r1 - alpha*x, r0 + x) = 1/alpha` with `alpha = SX(x, r0, r1)`.
pub fn check_reversible<S: Scalar, F: SwapRate<S> + ?Sized>(
    f: &F,
    cfg: &PropertyCheckConfig,
) -> Verdict {
    let rel = S::lit(cfg.rel_tol);
    run(cfg, Property::Reversible, |rng| {
        let (x, r0, r1) = (cfg.draw(rng), cfg.draw(rng), cfg.draw(rng));
        let (xs, r0s, r1s) = (S::lit(x), S::lit(r0), S::lit(r1));
        let alpha = f.rate(&xs, &r0s, &r1s);
        if !usable(&alpha) || alpha <= S::zero() {
            return Sample::Bad(
                vec![("x", x), ("r0", r0), ("r1", r1)],
                f64s(&alpha),
                f64::NAN,
            );
        }
        let out = alpha.clone() * xs.clone();
        let r1_after = r1s.clone() - out.clone();
        if r1_after <= S::zero() {
            return Sample::Skip;
        }
        let lhs = f.rate(&out, &r1_after, &(r0s + xs));
        let rhs = S::one() / alpha;
        if usable(&lhs) && rel_eq(&lhs, &rhs, &identity_tol(&rel)) {
            Sample::Ok
        } else {
            Sample::Bad(
                vec![("x", x), ("r0", r0), ("r1", r1)],
                f64s(&lhs),
                f64s(&rhs),
            )
        }
    })
}

/// `SX(a*x, a*r0, a*r1) = SX(x, r0, r1)`.
pub fn check_homogeneous<S: Scalar, F: SwapRate<S> + ?Sized>(
    f: &F,
    cfg: &PropertyCheckConfig,
) -> Verdict {
    let rel = S::lit(cfg.rel_tol);
    run(cfg, Property::Homogeneous, |rng| {
        let (a, x, r0, r1) = (cfg.draw(rng), cfg.draw(rng), cfg.draw(rng), cfg.draw(rng));
        let (as_, xs, r0s, r1s) = (S::lit(a), S::lit(x), S::lit(r0), S::lit(r1));
        let lhs = f.rate(
            &(as_.clone() * xs.clone()),
            &(as_.clone() * r0s.clone()),
            &(as_ * r1s.clone()),
        );
        let rhs = f.rate(&xs, &r0s, &r1s);
        if usable(&lhs) && usable(&rhs) && rel_eq(&lhs, &rhs, &identity_tol(&rel)) {
            Sample::Ok
        } else {
            Sample::Bad(
                vec![("a", a), ("x", x), ("r0", r0), ("r1", r1)],
                f64s(&lhs),
                f64s(&rhs),
            )
        }
    })
}

/// Disagreement between what a function declares and what sampling found.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mismatch {
    /// Declared, but a counterexample was found.
    DeclaredButFailed(Property),
    /// Not declared, but every sample passed.
    PassedButUndeclared(Property),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyReport {
    pub function: String,
    pub seed: u64,
    pub samples: usize,
    pub results: BTreeMap<Property, Verdict>,
    pub mismatches: Vec<Mismatch>,
}

impl PropertyReport {
    pub fn passed(&self, p: Property) -> bool {
        self.results.get(&p).is_some_and(Verdict::passed)
    }

    pub fn all_passed(&self) -> bool {
        self.results.values().all(Verdict::passed)
    }

    /// Properties that passed, as a set usable for declaring them.
    pub fn passing(&self) -> super::PropertySet {
        self.results
            .iter()
            .filter(|(_, v)| v.passed())
            .map(|(p, _)| *p)
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let mut props = Map::new();
        let mut cex = Map::new();
        for (p, v) in &self.results {
            props.insert(p.key().to_string(), json!({ "pass": v.passed() }));
            if let Some(c) = v.counterexample() {
                cex.insert(p.key().to_string(), c.to_json());
            }
        }
        let mismatches: Vec<Value> = self
            .mismatches
            .iter()
            .map(|m| match m {
                Mismatch::DeclaredButFailed(p) => {
                    json!({ "property": p.key(), "kind": "declared_but_failed" })
                }
                Mismatch::PassedButUndeclared(p) => {
                    json!({ "property": p.key(), "kind": "passed_but_undeclared" })
                }
            })
            .collect();
        json!({
            "function": self.function,
            "properties": props,
            "counterexamples": cex,
            "mismatches": mismatches,
            "samples": self.samples,
            "seed": self.seed,
        })
    }
}

/// Runs every checker and compares the outcome with `f.declared()`.
pub fn certify<S: Scalar, F: SwapRate<S> + ?Sized>(
    f: &F,
    cfg: &PropertyCheckConfig,
) -> PropertyReport {
    let mut results = BTreeMap::new();
    results.insert(Property::OutputBound, check_output_bound(f, cfg));
    results.insert(Property::Monotonic, check_monotonic(f, cfg, false));
    results.insert(Property::StrictlyMonotonic, check_monotonic(f, cfg, true));
    results.insert(Property::Additive, check_additive(f, cfg));
    results.insert(Property::Reversible, check_reversible(f, cfg));
    results.insert(Property::Homogeneous, check_homogeneous(f, cfg));
    let declared = f.declared();
    let mismatches = results
        .iter()
        .filter_map(|(p, v)| match (declared.contains(p), v.passed()) {
            (true, false) => Some(Mismatch::DeclaredButFailed(*p)),
            (false, true) => Some(Mismatch::PassedButUndeclared(*p)),
            _ => None,
        })
        .collect();
    PropertyReport {
        function: f.name(),
        seed: cfg.rng_seed,
        samples: cfg.samples,
        results,
        mismatches,
    }
}
