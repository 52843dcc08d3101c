//! Blind-iteration oracle, independent of the solver's candidate filtering
//! and certificate machinery. Classification here uses only two elementary
//! facts proved from scratch:
//!
//! * if |x| > |c| + 2 then |phi(x)| > 2|x|, so the orbit escapes;
//! * if v_p(x) < 0 and 2 v_p(x) < v_p(c) then v_p(phi(x)) = 2 v_p(x), so
//!   the p-part of the denominator squares forever.
//!
//! Everything else is plain iterate-and-look-for-a-repeat.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use quadcycles::numbers::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Blind {
    Periodic,
    Preperiodic,
    Wandering,
}

const STEP_CAP: usize = 10_000;

fn trial_factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn v_p_big(n: &BigInt, p: u64) -> i64 {
    use num_traits::Zero;
    if n.is_zero() {
        // Effectively infinite: larger than any valuation met here.
        return i64::MAX / 4;
    }
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while (&n % &p).magnitude().to_u64() == Some(0) {
        n /= &p;
        v += 1;
    }
    v
}

fn v_p_rat(x: &Rational, p: u64) -> i64 {
    v_p_big(x.numer(), p) - v_p_big(x.denom(), p)
}

/// Classify by raw iteration. Panics if the orbit neither repeats nor
/// triggers an escape rule within the step cap; on the corpora used here
/// that would indicate an oracle bug worth surfacing.
pub fn blind_classify(c: &Rational, x0: &Rational) -> Blind {
    let big = c.abs() + Rational::from(BigInt::from(2));
    let mut seen: HashMap<Rational, usize> = HashMap::new();
    let mut x = x0.clone();
    for step in 0..STEP_CAP {
        if x.abs() > big {
            return Blind::Wandering;
        }
        let den = x
            .denom()
            .magnitude()
            .to_u64()
            .expect("bounded orbit denominators stay small");
        for (p, e) in trial_factor(den) {
            let vx = -(e as i64);
            if 2 * vx < v_p_rat(c, p) {
                return Blind::Wandering;
            }
        }
        if let Some(&first) = seen.get(&x) {
            return if first == 0 {
                Blind::Periodic
            } else {
                Blind::Preperiodic
            };
        }
        seen.insert(x.clone(), step);
        x = &x * &x - c;
    }
    panic!("blind oracle hit step cap on c={c}, x={x0}");
}

/// Brute-force the rational preperiodic structure of `c = a/d^2` by blind
/// iteration over a candidate net four times wider than needed: every
/// `x = X/d` with `|X| <= 2 (d + ceil sqrt(d^2 + 4|a|))`, no coprimality or
/// congruence filtering.
pub fn blind_solve(c: &Rational) -> (BTreeSet<Rational>, BTreeSet<Rational>) {
    let den = c.denom().magnitude().to_u64().expect("small denominator");
    let d = (den as f64).sqrt().round() as u64;
    assert_eq!(d * d, den, "oracle corpus uses square denominators");
    let a = c.numer().abs().to_u64().expect("small numerator");
    let mut root = 0u64;
    while root * root < d * d + 4 * a {
        root += 1;
    }
    let bound = (2 * (d + root)) as i64;
    let mut per = BTreeSet::new();
    let mut preper = BTreeSet::new();
    for num in -bound..=bound {
        let x = Rational::new(BigInt::from(num), BigInt::from(d));
        match blind_classify(c, &x) {
            Blind::Periodic => {
                per.insert(x);
            }
            Blind::Preperiodic => {
                preper.insert(x);
            }
            Blind::Wandering => {}
        }
    }
    (per, preper)
}
