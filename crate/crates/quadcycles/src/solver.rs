//! Complete computation of `Per(phi_c)` and `PrePer(phi_c)` for a given `c`.
//!
//! Candidate numerators are cut down by the structural constraints (common
//! denominator `d`, `X^2 = a mod d`, archimedean escape bound) and every
//! survivor is classified by exact orbit iteration, so the resulting sets are
//! complete, not sampled.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::dynamics::{classify_capped, cycle_of, QuadParam, OrbitKind, DEFAULT_ITERATION_CAP};
use crate::numbers::{ceil_sqrt, format_rational, integer_sqrt, Rational};
use crate::{Error, Result};

/// The full rational periodic/preperiodic structure of one parameter `c`.
#[derive(Clone, Debug)]
pub struct PeriodicSet {
    pub param: QuadParam,
    /// Cycles in orbit order, each rotated so its smallest element is first,
    /// sorted by first element.
    pub cycles: Vec<Vec<Rational>>,
    /// Numerators of the cycles, same shape as `cycles`.
    pub cycle_numerators: Vec<Vec<BigInt>>,
    /// All periodic points, ascending.
    pub per: Vec<Rational>,
    /// Strictly preperiodic points, ascending.
    pub preper: Vec<Rational>,
    /// Numerators of `per`, ascending.
    pub num_per: Vec<BigInt>,
    /// Numerators of `preper`, ascending.
    pub num_preper: Vec<BigInt>,
    /// Distinct residues of `num(per)` mod `d`.
    pub m_classes: usize,
    /// Distinct residues of `num(per + preper)` mod `d` (the numerators of
    /// the full preperiodic set in the inclusive sense).
    pub preper_classes: usize,
    /// Why the sets are empty without any search (e.g. non-square
    /// denominator), when that applies.
    pub empty_reason: Option<String>,
}

// A cycle never contains both x and -x (they share an image), so the
// absolute numerator singles out one starting point.
fn rotation_key(x: &Rational) -> (BigInt, BigInt) {
    (x.numer().abs(), x.numer().clone())
}

/// Rotate a cycle so the element with the smallest absolute numerator
/// comes first, keeping orbit order after it.
fn canonical_rotation(cycle: Vec<Rational>) -> Vec<Rational> {
    let start = cycle
        .iter()
        .enumerate()
        .min_by_key(|(_, x)| rotation_key(x))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut out = cycle;
    out.rotate_left(start);
    out
}

fn residue_classes(nums: impl Iterator<Item = BigInt>, d: u64) -> usize {
    let d = BigInt::from(d);
    let set: BTreeSet<BigInt> = nums.map(|x| x.mod_floor(&d)).collect();
    set.len()
}

/// All integers `X` that can be the numerator of a preperiodic point:
/// `|X| <= d * beta`, `gcd(X, d) = 1`, `X^2 = a (mod d)`, ascending.
///
/// Empty when `den(c)` is not a perfect square (no preperiodic points exist
/// at all in that case).
pub fn candidate_numerators(c: &QuadParam) -> Vec<BigInt> {
    let Some(sq) = c.square() else {
        return Vec::new();
    };
    let d = BigInt::from(sq.d);
    // d * beta = (d + ceil(sqrt(d^2 + 4|a|))) / 2, floored to an integer.
    let inner = &d * &d + BigInt::from(4) * c.a().abs();
    let bound: BigInt = (&d + ceil_sqrt(&inner).expect("nonnegative")) / 2;
    let a_mod = c.a().mod_floor(&d);
    let mut out = Vec::new();
    let mut x = -bound.clone();
    while x <= bound {
        if x.gcd(&d).is_one() && (&x * &x).mod_floor(&d) == a_mod {
            out.push(x.clone());
        }
        x += 1;
    }
    out
}

/// Compute the complete periodic/preperiodic structure for `c`.
pub fn solve(c: &Rational) -> Result<PeriodicSet> {
    solve_capped(c, DEFAULT_ITERATION_CAP)
}

/// `solve` with an explicit orbit-iteration cap.
pub fn solve_capped(c: &Rational, cap: u64) -> Result<PeriodicSet> {
    let param = QuadParam::new(c.clone())?;
    let Some(sq) = param.square().cloned() else {
        return Ok(PeriodicSet {
            param,
            cycles: Vec::new(),
            cycle_numerators: Vec::new(),
            per: Vec::new(),
            preper: Vec::new(),
            num_per: Vec::new(),
            num_preper: Vec::new(),
            m_classes: 0,
            preper_classes: 0,
            empty_reason: Some("denominator not a perfect square".into()),
        });
    };
    let d = BigInt::from(sq.d);
    let mut per: Vec<Rational> = Vec::new();
    let mut preper: Vec<Rational> = Vec::new();
    for x_num in candidate_numerators(&param) {
        let x = Rational::new(x_num, d.clone());
        match classify_capped(&param, &x, cap)?.kind {
            OrbitKind::Periodic { .. } => per.push(x),
            OrbitKind::Preperiodic { .. } => preper.push(x),
            OrbitKind::Wandering => {}
        }
    }
    per.sort();
    preper.sort();

    let mut cycles: Vec<Vec<Rational>> = Vec::new();
    let mut assigned: HashSet<Rational> = HashSet::new();
    for x in &per {
        if assigned.contains(x) {
            continue;
        }
        let cycle = cycle_of(&param, x)?;
        for y in &cycle {
            assigned.insert(y.clone());
        }
        cycles.push(canonical_rotation(cycle));
    }
    cycles.sort_by_key(|cyc| rotation_key(&cyc[0]));

    let numerator_of = |x: &Rational| x.numer() * &d / x.denom();
    let cycle_numerators: Vec<Vec<BigInt>> = cycles
        .iter()
        .map(|cyc| cyc.iter().map(&numerator_of).collect())
        .collect();
    let num_per: Vec<BigInt> = per.iter().map(&numerator_of).collect();
    let num_preper: Vec<BigInt> = preper.iter().map(&numerator_of).collect();
    let m_classes = residue_classes(num_per.iter().cloned(), sq.d);
    let preper_classes =
        residue_classes(num_per.iter().chain(num_preper.iter()).cloned(), sq.d);

    // Call-Goldstine: |PrePer| <= 2^(s+2) + 1; a breach here is a solver bug.
    debug_assert!(per.len() + preper.len() <= (1usize << (sq.s + 2)) + 1);

    Ok(PeriodicSet {
        param,
        cycles,
        cycle_numerators,
        per,
        preper,
        num_per,
        num_preper,
        m_classes,
        preper_classes,
        empty_reason: None,
    })
}

impl PeriodicSet {
    pub fn d(&self) -> Option<u64> {
        self.param.d()
    }

    pub fn s(&self) -> Option<usize> {
        self.param.s()
    }

    pub fn max_cycle_len(&self) -> usize {
        self.cycles.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.cycles.iter().map(Vec::len).collect();
        lens.sort_unstable();
        lens
    }

    /// Build a set from explicit parts, bypassing the solver. Intended for
    /// negative-control inputs in law tests.
    pub fn from_parts(c: &Rational, cycle_numerators: Vec<Vec<i64>>, preper_nums: Vec<i64>) -> Result<Self> {
        let param = QuadParam::new(c.clone())?;
        let d = param
            .d()
            .ok_or_else(|| Error::Precondition("from_parts requires den(c) = d^2".into()))?;
        let cycle_numerators: Vec<Vec<BigInt>> = cycle_numerators
            .into_iter()
            .map(|cyc| cyc.into_iter().map(BigInt::from).collect())
            .collect();
        let mut num_per: Vec<BigInt> = cycle_numerators.iter().flatten().cloned().collect();
        num_per.sort();
        let num_preper: Vec<BigInt> = preper_nums.into_iter().map(BigInt::from).collect();
        let d_big = BigInt::from(d);
        let cycles: Vec<Vec<Rational>> = cycle_numerators
            .iter()
            .map(|cyc| {
                cyc.iter()
                    .map(|x| Rational::new(x.clone(), d_big.clone()))
                    .collect()
            })
            .collect();
        let per: Vec<Rational> = num_per
            .iter()
            .map(|x| Rational::new(x.clone(), d_big.clone()))
            .collect();
        let preper: Vec<Rational> = num_preper
            .iter()
            .map(|x| Rational::new(x.clone(), d_big.clone()))
            .collect();
        let m_classes = residue_classes(num_per.iter().cloned(), d);
        let preper_classes =
            residue_classes(num_per.iter().chain(num_preper.iter()).cloned(), d);
        Ok(PeriodicSet {
            param,
            cycles,
            cycle_numerators,
            per,
            preper,
            num_per,
            num_preper,
            m_classes,
            preper_classes,
            empty_reason: None,
        })
    }

    pub fn to_json(&self) -> PeriodicSetJson {
        PeriodicSetJson {
            c: format_rational(self.param.c()),
            d: self.d(),
            s: self.s(),
            cycles: self
                .cycles
                .iter()
                .map(|cyc| cyc.iter().map(format_rational).collect())
                .collect(),
            per: self.per.iter().map(format_rational).collect(),
            preper: self.preper.iter().map(format_rational).collect(),
            m_classes: self.m_classes,
            preper_classes: self.preper_classes,
            reason: self.empty_reason.clone(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("serialization cannot fail")
    }
}

/// Canonical JSON form of a [`PeriodicSet`]; byte-stable given the sorting
/// rules of the solver.
#[derive(Debug, Serialize)]
pub struct PeriodicSetJson {
    pub c: String,
    pub d: Option<u64>,
    pub s: Option<usize>,
    pub cycles: Vec<Vec<String>>,
    pub per: Vec<String>,
    pub preper: Vec<String>,
    pub m_classes: usize,
    pub preper_classes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// All rational `x` with `x^2 = c + y`: empty, `{0}`, or a `+/-` pair.
pub fn preimages(c: &QuadParam, y: &Rational) -> Vec<Rational> {
    let t = c.c() + y;
    if t.is_negative() {
        return Vec::new();
    }
    if t.is_zero() {
        return vec![Rational::zero()];
    }
    let (rn, en) = integer_sqrt(t.numer()).expect("positive");
    let (rd, ed) = integer_sqrt(t.denom()).expect("positive");
    if en && ed {
        let root = Rational::new(rn, rd);
        vec![root.clone(), -root]
    } else {
        Vec::new()
    }
}
