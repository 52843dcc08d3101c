//! Iteration of `phi_c(x) = x^2 - c` and of the integer numerator map
//! `X -> (X^2 - a)/d`, with full orbit classification.
//!
//! Every classification carries a machine-checkable certificate: either the
//! indices of a repeated value, or an escape certificate (p-adic valuation
//! mismatch, or archimedean growth past the escape bound) that can be
//! re-validated independently of the classifier.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::numbers::{ceil_sqrt, factor, supp, v_p, Factorization, Rational, Valuation};
use crate::{Error, Result};

/// Default backstop for the orbit iteration loop. Theory guarantees the loop
/// terminates long before this; hitting the cap is an internal error.
pub const DEFAULT_ITERATION_CAP: u64 = 1_000_000;

/// A parameter `c` of the quadratic family, with `den(c) = d^2` data when the
/// denominator is a perfect square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadParam {
    c: Rational,
    a: BigInt,
    square: Option<SquareDenom>,
}

/// The square-root data of a perfect-square denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareDenom {
    pub d: u64,
    pub factorization: Factorization,
    /// `s = |supp(d)|`.
    pub s: usize,
}

impl QuadParam {
    pub fn new(c: Rational) -> Result<Self> {
        let a = c.numer().clone();
        let den = c.denom().clone();
        let (root, exact) = crate::numbers::integer_sqrt(&den)?;
        let square = if exact {
            let d = root.to_u64().ok_or_else(|| {
                Error::Argument(format!("denominator root {root} exceeds 64 bits"))
            })?;
            let factorization = factor(d);
            let s = factorization.num_primes();
            Some(SquareDenom { d, factorization, s })
        } else {
            None
        };
        Ok(QuadParam { c, a, square })
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    /// `a = num(c)`.
    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn den(&self) -> &BigInt {
        self.c.denom()
    }

    /// `d` with `den(c) = d^2`, when the denominator is a perfect square.
    pub fn d(&self) -> Option<u64> {
        self.square.as_ref().map(|sq| sq.d)
    }

    pub fn square(&self) -> Option<&SquareDenom> {
        self.square.as_ref()
    }

    /// `s = |supp(d)|`, when `d` is present.
    pub fn s(&self) -> Option<usize> {
        self.square.as_ref().map(|sq| sq.s)
    }
}

/// Orbit classification outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitKind {
    Periodic { period: usize },
    Preperiodic { tail: usize, period: usize },
    Wandering,
}

/// Independently re-checkable evidence for an orbit classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// `trajectory[again] == trajectory[first]` with `first < again`.
    Repeat { first: usize, again: usize },
    /// `2 * v_p(trajectory[at_index]) != v_p(c)`, which forces the p-adic
    /// valuation of later iterates to diverge to minus infinity.
    PadicEscape { p: u64, at_index: usize },
    /// `|trajectory[at_index]| > bound`, past which absolute values strictly
    /// increase under `phi_c`.
    ArchimedeanEscape { bound: Rational, at_index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitResult {
    pub kind: OrbitKind,
    pub trajectory: Vec<Rational>,
    pub certificate: Certificate,
}

impl OrbitResult {
    /// Re-validate the certificate against the stated equations, without
    /// trusting the classifier's control flow.
    pub fn certificate_holds(&self, c: &QuadParam) -> bool {
        match &self.certificate {
            Certificate::Repeat { first, again } => {
                first < again
                    && *again < self.trajectory.len()
                    && self.trajectory[*first] == self.trajectory[*again]
            }
            Certificate::PadicEscape { p, at_index } => {
                let Some(x) = self.trajectory.get(*at_index) else {
                    return false;
                };
                padic_mismatch(c, x, *p)
            }
            Certificate::ArchimedeanEscape { bound, at_index } => {
                let Some(x) = self.trajectory.get(*at_index) else {
                    return false;
                };
                bound_is_admissible(c, bound)
                    && x.abs() > *bound
                    && phi(c, x).abs() > x.abs()
            }
        }
    }
}

// A bound is admissible when beta >= (1 + sqrt(1 + 4|c|))/2, equivalently
// (2*beta - 1)^2 >= 1 + 4|c| (all our bounds satisfy beta >= 1/2).
fn bound_is_admissible(c: &QuadParam, beta: &Rational) -> bool {
    let one = Rational::from(BigInt::from(1));
    let t = beta * Rational::from(BigInt::from(2)) - &one;
    &t * &t >= one + c.c().abs() * Rational::from(BigInt::from(4))
}

/// Does `p` certify p-adic divergence of the orbit of `x`?
///
/// True when `2 * v_p(x) != v_p(c)` (in `Z ∪ {inf}`) and at least one of the
/// two valuations is negative; either way `v_p` of the iterates then drops
/// without bound.
fn padic_mismatch(c: &QuadParam, x: &Rational, p: u64) -> bool {
    let vc = v_p(c.c(), p).ok();
    let vx = v_p(x, p).ok();
    let (Some(vc), Some(vx)) = (vc, vx) else {
        return false;
    };
    let mismatch = match (vc, vx) {
        (Valuation::Finite(vc), Valuation::Finite(vx)) => 2 * vx != vc,
        (Valuation::Infinity, Valuation::Infinity) => false,
        _ => true,
    };
    let negative = matches!(vc, Valuation::Finite(v) if v < 0)
        || matches!(vx, Valuation::Finite(v) if v < 0);
    mismatch && negative
}

/// One step of the quadratic map: `x^2 - c`, exact and reduced.
pub fn phi(c: &QuadParam, x: &Rational) -> Rational {
    x * x - c.c()
}

/// The integer numerator map `X -> (X^2 - a)/d`.
///
/// Defined exactly when `X^2 = a (mod d)`; equals `d * phi_c(X/d)`.
pub fn numerator_map(c: &QuadParam, x_num: &BigInt) -> Result<BigInt> {
    let sq = c
        .square()
        .ok_or_else(|| Error::Precondition("numerator map requires den(c) = d^2".into()))?;
    let d = BigInt::from(sq.d);
    let t = x_num * x_num - c.a();
    let (q, r) = num_integer::Integer::div_rem(&t, &d);
    if !r.is_zero() {
        return Err(Error::Precondition(format!(
            "numerator map undefined: {x_num}^2 - {} not divisible by {d}",
            c.a()
        )));
    }
    Ok(q)
}

/// An exact rational `beta` with `beta >= (1 + sqrt(1 + 4|c|))/2`, so every
/// `x` with `|x| > beta` has strictly increasing absolute values under
/// `phi_c` and hence wanders.
///
/// When `d` is present this is the smallest such rational of the form
/// `k/(2d)`.
pub fn escape_bound(c: &QuadParam) -> Rational {
    match c.square() {
        Some(sq) => {
            // beta = (d + ceil(sqrt(d^2 + 4|a|))) / (2d)
            let d = BigInt::from(sq.d);
            let inner = &d * &d + BigInt::from(4) * c.a().abs();
            let root = ceil_sqrt(&inner).expect("nonnegative");
            Rational::new(&d + root, BigInt::from(2) * d)
        }
        None => {
            // beta = (den + ceil(sqrt(den * (den + 4|a|)))) / (2 den)
            let den = c.den().clone();
            let inner = &den * (&den + BigInt::from(4) * c.a().abs());
            let root = ceil_sqrt(&inner).expect("nonnegative");
            Rational::new(&den + root, BigInt::from(2) * den)
        }
    }
}

/// Find a prime witnessing `2 * v_p(x) != v_p(c)`, if one exists.
///
/// Such a prime exists exactly when `den(c)` is not a perfect square or
/// `den(x) != d`.
fn padic_witness(c: &QuadParam, x: &Rational) -> Option<u64> {
    let mut primes: BTreeSet<u64> = supp(c.den()).unwrap_or_default();
    if let Ok(px) = supp(x.denom()) {
        primes.extend(px);
    }
    primes.into_iter().find(|&p| padic_mismatch(c, x, p))
}

/// Classify the orbit of `x` under `phi_c` with the default iteration cap.
///
/// Panics only if the internal cap is hit, which would indicate a bug: the
/// escape checks make the reachable region finite.
pub fn classify(c: &QuadParam, x: &Rational) -> OrbitResult {
    classify_capped(c, x, DEFAULT_ITERATION_CAP).expect("iteration cap exceeded")
}

/// Classify with an explicit iteration cap.
pub fn classify_capped(c: &QuadParam, x: &Rational, cap: u64) -> Result<OrbitResult> {
    // (1) Denominator gate: unless den(c) = d^2 and den(x) = d, some prime
    // certifies p-adic divergence immediately.
    let d = match c.square() {
        Some(sq) => BigInt::from(sq.d),
        None => {
            let p = padic_witness(c, x).expect("non-square den(c) must yield a witness");
            return Ok(OrbitResult {
                kind: OrbitKind::Wandering,
                trajectory: vec![x.clone()],
                certificate: Certificate::PadicEscape { p, at_index: 0 },
            });
        }
    };
    if *x.denom() != d {
        let p = padic_witness(c, x).expect("denominator mismatch must yield a witness");
        return Ok(OrbitResult {
            kind: OrbitKind::Wandering,
            trajectory: vec![x.clone()],
            certificate: Certificate::PadicEscape { p, at_index: 0 },
        });
    }

    let beta = escape_bound(c);
    let mut visited: HashMap<Rational, usize> = HashMap::new();
    let mut trajectory: Vec<Rational> = Vec::new();
    let mut current = x.clone();
    for _ in 0..cap {
        if let Some(&first) = visited.get(&current) {
            let again = trajectory.len();
            trajectory.push(current);
            let period = again - first;
            let kind = if first == 0 {
                OrbitKind::Periodic { period }
            } else {
                OrbitKind::Preperiodic { tail: first, period }
            };
            return Ok(OrbitResult {
                kind,
                trajectory,
                certificate: Certificate::Repeat { first, again },
            });
        }
        if current.abs() > beta {
            let at_index = trajectory.len();
            trajectory.push(current);
            return Ok(OrbitResult {
                kind: OrbitKind::Wandering,
                trajectory,
                certificate: Certificate::ArchimedeanEscape { bound: beta, at_index },
            });
        }
        visited.insert(current.clone(), trajectory.len());
        trajectory.push(current.clone());
        let next = phi(c, &current);
        if *next.denom() != d {
            let at_index = trajectory.len();
            let p = padic_witness(c, &next).expect("denominator drift must yield a witness");
            trajectory.push(next);
            return Ok(OrbitResult {
                kind: OrbitKind::Wandering,
                trajectory,
                certificate: Certificate::PadicEscape { p, at_index },
            });
        }
        current = next;
    }
    Err(Error::IterationCap(cap))
}

/// The cycle through a periodic point `x`, in orbit order starting at `x`.
pub fn cycle_of(c: &QuadParam, x: &Rational) -> Result<Vec<Rational>> {
    let result = classify(c, x);
    match result.kind {
        OrbitKind::Periodic { period } => Ok(result.trajectory[..period].to_vec()),
        _ => Err(Error::Precondition(format!(
            "cycle_of requires a periodic point, got {:?}",
            result.kind
        ))),
    }
}
