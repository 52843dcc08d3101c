//! Finite-precision checks of the period constraints for polynomial
//! iteration over the p-adic integers, plus the conjugation used in the
//! divisible-by-16 argument.
//!
//! Z_p is modeled as integers mod `p^K` with an explicit working precision
//! `K`; every reported quantity is tagged with the precision it was computed
//! at, and nothing here claims exact Z_p periods for synthetic mod-`p^k`
//! data.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::numbers::{is_prime, v_p, Rational, Valuation};
use crate::{Error, Result};

/// Default working exponent: arithmetic mod `p^64`.
pub const DEFAULT_PRECISION: u32 = 64;

const PERIOD_CAP: u64 = 1_000_000;
const BRUTE_LIMIT: u64 = 1_000_000;

/// A polynomial over Z_p at working precision `K`: rational coefficients
/// with nonnegative p-valuation, reduced mod `p^k` on demand.
#[derive(Clone, Debug)]
pub struct PadicPoly {
    coeffs: Vec<Rational>,
    p: u64,
    precision: u32,
}

impl PadicPoly {
    /// `coeffs` ascending by degree; degree must be at least 2 and every
    /// coefficient must lie in Z_p (denominator coprime to `p`).
    pub fn new(coeffs: Vec<Rational>, p: u64, precision: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Argument(format!("p = {p} is not prime")));
        }
        if precision == 0 {
            return Err(Error::Argument("precision must be at least 1".into()));
        }
        let degree = coeffs
            .iter()
            .rposition(|c| !c.is_zero())
            .ok_or_else(|| Error::Argument("zero polynomial".into()))?;
        if degree < 2 {
            return Err(Error::Argument(format!("degree {degree} < 2")));
        }
        for (i, c) in coeffs.iter().enumerate() {
            if let Valuation::Finite(v) = v_p(c, p)? {
                if v < 0 {
                    return Err(Error::Argument(format!(
                        "coefficient of t^{i} has v_{p} = {v} < 0, not in Z_{p}"
                    )));
                }
            }
        }
        let coeffs = coeffs[..=degree].to_vec();
        Ok(PadicPoly { coeffs, p, precision })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    fn modulus(&self, k: u32) -> BigInt {
        BigInt::from(self.p).pow(k)
    }

    fn reduce_coeff(&self, c: &Rational, modulus: &BigInt) -> BigInt {
        // c = a/b with gcd(b, p) = 1: reduce as a * b^-1 mod p^k.
        let a = c.numer().mod_floor(modulus);
        let b = c.denom().mod_floor(modulus);
        let ext = b.extended_gcd(modulus);
        debug_assert!(ext.gcd.is_one());
        (a * ext.x).mod_floor(modulus)
    }

    /// Evaluate mod `p^k` by Horner's rule.
    pub fn eval_mod(&self, x: &BigInt, k: u32) -> BigInt {
        let m = self.modulus(k);
        let x = x.mod_floor(&m);
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = (acc * &x + self.reduce_coeff(c, &m)).mod_floor(&m);
        }
        acc
    }

    /// Evaluate the formal derivative mod `p^k`.
    pub fn derivative_eval_mod(&self, x: &BigInt, k: u32) -> BigInt {
        let m = self.modulus(k);
        let x = x.mod_floor(&m);
        let mut acc = BigInt::zero();
        for (i, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = (acc * &x + BigInt::from(i) * self.reduce_coeff(c, &m)).mod_floor(&m);
        }
        acc
    }

    /// Exact evaluation over Q.
    pub fn eval_rational(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

/// Least `n >= 1` with `g^n(alpha) = alpha (mod p^k)`.
///
/// Errors when `alpha` is not on a cycle of the reduced map.
pub fn period_mod(g: &PadicPoly, alpha: &BigInt, k: u32) -> Result<u64> {
    if k > g.precision {
        return Err(Error::Argument(format!(
            "exponent {k} exceeds working precision {}",
            g.precision
        )));
    }
    let m = g.modulus(k);
    let start = alpha.mod_floor(&m);
    let mut seen: HashSet<BigInt> = HashSet::new();
    seen.insert(start.clone());
    let mut x = start.clone();
    for steps in 1..=PERIOD_CAP {
        x = g.eval_mod(&x, k);
        if x == start {
            return Ok(steps);
        }
        if !seen.insert(x.clone()) {
            return Err(Error::NotPeriodic(format!(
                "{start} is preperiodic, not periodic, mod {}^{k}",
                g.p
            )));
        }
    }
    Err(Error::IterationCap(PERIOD_CAP))
}

/// The multiplier `(g^m)'(alpha) mod p`, computed along the mod-p cycle by
/// the chain rule.
pub fn multiplier(g: &PadicPoly, alpha: &BigInt, m: u64) -> u64 {
    let p = BigInt::from(g.p);
    let mut x = alpha.mod_floor(&p);
    let mut acc = BigInt::one();
    for _ in 0..m {
        acc = (acc * g.derivative_eval_mod(&x, 1)).mod_floor(&p);
        x = g.eval_mod(&x, 1);
    }
    acc.to_u64().expect("residue mod p fits u64")
}

/// Multiplicative order of `u` mod `p`, or `None` when `u = 0 (mod p)`.
pub fn multiplicative_order(u: u64, p: u64) -> Option<u64> {
    let u = u % p;
    if u == 0 {
        return None;
    }
    let mut acc = 1u64;
    for t in 1..p {
        acc = acc * u % p;
        if acc == 1 {
            return Some(t);
        }
    }
    unreachable!("order of a unit divides p - 1")
}

/// The finite set of periods permitted by the period theorem:
/// `{m, mr} ∪ {m r p^e : e >= 1, p^(e-1) <= 2/(p-1)}`.
///
/// Taking the inequality literally, the `e`-range is `{1, 2}` for `p = 2`,
/// `{1}` for `p = 3`, and empty for `p >= 5`.
pub fn allowed_periods(m: u64, r: Option<u64>, p: u64) -> BTreeSet<u64> {
    let mut allowed = BTreeSet::new();
    allowed.insert(m);
    let Some(r) = r else {
        return allowed;
    };
    allowed.insert(m * r);
    let e_max = match p {
        2 => 2,
        3 => 1,
        _ => 0,
    };
    let mut pe = 1u64;
    for _ in 0..e_max {
        pe *= p;
        allowed.insert(m * r * pe);
    }
    allowed
}

/// All quantities of the period theorem for one periodic point.
#[derive(Clone, Debug, Serialize)]
pub struct ZieveData {
    pub alpha: String,
    /// Period at the working precision.
    pub n: u64,
    /// Period mod p.
    pub m: u64,
    /// `(g^m)'(alpha) mod p`.
    pub multiplier: u64,
    /// Order of the multiplier mod p; `None` encodes infinity.
    pub r: Option<u64>,
    pub allowed: Vec<u64>,
    pub consistent: bool,
    pub precision: u32,
}

/// Check the claimed period `n` of `alpha` against the allowed-period set.
///
/// `n` must be the minimal period at the polynomial's working precision;
/// anything else is rejected rather than silently recomputed.
pub fn zieve_check(g: &PadicPoly, alpha: &BigInt, n: u64) -> Result<ZieveData> {
    let actual = period_mod(g, alpha, g.precision)?;
    if actual != n {
        return Err(Error::Precondition(format!(
            "claimed period {n} but alpha has period {actual} mod {}^{}; \
             raise the precision if {n} is the exact period",
            g.p, g.precision
        )));
    }
    let m = period_mod(g, alpha, 1)?;
    let mult = multiplier(g, alpha, m);
    let r = multiplicative_order(mult, g.p);
    let allowed = allowed_periods(m, r, g.p);
    let consistent = allowed.contains(&n);
    Ok(ZieveData {
        alpha: alpha.to_string(),
        n,
        m,
        multiplier: mult,
        r,
        allowed: allowed.into_iter().collect(),
        consistent,
        precision: g.precision,
    })
}

/// Outcome of the divisible-by-16 conjugation for `c` with `v_2(c) = -2`.
#[derive(Clone, Debug)]
pub enum Div16Outcome {
    /// `f(t) = t^2 + t - (c + 1/4)` lies in Z_2[t]; the translate
    /// `x -> x - 1/2` carries any rational cycle of `phi_c` into Z_2.
    Accepted { poly: PadicPoly },
    /// `v_2(c + 1/4) < 0`: no cycle with the common denominator `d` can
    /// exist for this `c`.
    Rejected { v2_shifted: i64 },
}

/// Build the conjugated polynomial `t^2 + t - (c + 1/4)` used to transport
/// cycles of `phi_c` into Z_2. Requires `v_2(c) = -2`.
pub fn conjugate_for_div16(c: &Rational) -> Result<Div16Outcome> {
    match v_p(c, 2)? {
        Valuation::Finite(-2) => {}
        v => {
            return Err(Error::Precondition(format!(
                "conjugation requires v_2(c) = -2, got {v}"
            )))
        }
    }
    let shifted = c + Rational::new(BigInt::one(), BigInt::from(4));
    match v_p(&shifted, 2)? {
        Valuation::Finite(v) if v < 0 => Ok(Div16Outcome::Rejected { v2_shifted: v }),
        _ => {
            let coeffs = vec![-shifted, Rational::one(), Rational::one()];
            Ok(Div16Outcome::Accepted {
                poly: PadicPoly::new(coeffs, 2, DEFAULT_PRECISION)?,
            })
        }
    }
}

/// The coordinate change `x -> x - 1/2` from `phi_c` space into the
/// conjugated polynomial's space.
pub fn translate(x: &Rational) -> Rational {
    x - Rational::new(BigInt::one(), BigInt::from(2))
}

/// Exhaustively tabulate every residue mod `p^k` lying on a cycle of the
/// reduced map, with its period. Oracle generator for the period checks.
pub fn brute_periodic_points(g: &PadicPoly, k: u32) -> Result<Vec<(u64, u64)>> {
    let modulus_big = g.modulus(k);
    let modulus = modulus_big
        .to_u64()
        .filter(|&m| m <= BRUTE_LIMIT)
        .ok_or_else(|| {
            Error::Argument(format!("p^k = {modulus_big} exceeds brute-force limit"))
        })?;
    let step: Vec<u64> = (0..modulus)
        .map(|x| {
            g.eval_mod(&BigInt::from(x), k)
                .to_u64()
                .expect("residue fits u64")
        })
        .collect();
    // Functional graph: every walk ends in a cycle; color nodes to find them.
    const UNSEEN: u8 = 0;
    const IN_PATH: u8 = 1;
    const DONE: u8 = 2;
    let mut state = vec![UNSEEN; modulus as usize];
    let mut out = Vec::new();
    for start in 0..modulus {
        if state[start as usize] != UNSEEN {
            continue;
        }
        let mut path = Vec::new();
        let mut x = start;
        while state[x as usize] == UNSEEN {
            state[x as usize] = IN_PATH;
            path.push(x);
            x = step[x as usize];
        }
        if state[x as usize] == IN_PATH {
            // Found a new cycle: everything in `path` from x onward.
            let cycle_start = path.iter().position(|&y| y == x).unwrap();
            let period = (path.len() - cycle_start) as u64;
            for &y in &path[cycle_start..] {
                out.push((y, period));
            }
        }
        for y in path {
            state[y as usize] = DONE;
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Parse a polynomial in the variable `t`, e.g. `t^2+t-1` or `2*t^2 - 3/4`.
pub fn parse_poly(s: &str) -> Result<Vec<Rational>> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut coeffs: Vec<Rational> = Vec::new();
    let mut add = |deg: usize, coef: Rational| {
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, Rational::zero());
        }
        coeffs[deg] += coef;
    };
    // Split into signed terms.
    let bytes = compact.as_bytes();
    let mut term_start = 0;
    let mut boundaries = Vec::new();
    for (i, &b) in bytes.iter().enumerate() {
        if (b == b'+' || b == b'-') && i > 0 && bytes[i - 1] != b'^' && bytes[i - 1] != b'/' {
            boundaries.push(i);
        }
    }
    boundaries.push(compact.len());
    for &end in &boundaries {
        let term = &compact[term_start..end];
        term_start = end;
        if term.is_empty() {
            continue;
        }
        let (sign, body) = match term.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, term.strip_prefix('+').unwrap_or(term)),
        };
        let (coef_str, deg) = match body.find('t') {
            None => (body, 0usize),
            Some(pos) => {
                let coef = body[..pos].trim_end_matches('*');
                let rest = &body[pos + 1..];
                let deg = if rest.is_empty() {
                    1
                } else {
                    let exp = rest.strip_prefix('^').ok_or_else(|| {
                        Error::Parse(format!("bad term {term:?} in polynomial"))
                    })?;
                    exp.parse::<usize>()
                        .map_err(|e| Error::Parse(format!("bad exponent in {term:?}: {e}")))?
                };
                (coef, deg)
            }
        };
        let coef = if coef_str.is_empty() {
            Rational::one()
        } else {
            crate::numbers::parse_rational(coef_str)?
        };
        add(deg, coef * Rational::from(BigInt::from(sign)));
    }
    Ok(coeffs)
}
