//! Exact integer and rational arithmetic plus the elementary number theory
//! (valuations, factorization, CRT, integer square roots) used everywhere else.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Exact rational number, always stored reduced with positive denominator.
pub type Rational = num_rational::BigRational;

/// Parse a rational from the grammar `a/b` or `a`, optional leading minus.
pub fn parse_rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
}

/// Render a rational as `a/b`, or just `a` when the denominator is 1.
pub fn format_rational(x: &Rational) -> String {
    x.to_string()
}

/// p-adic valuation value: an integer, or infinity for the zero element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(r) => write!(f, "{r}"),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}

/// Complete prime factorization, ascending by prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub prime_powers: Vec<(u64, u32)>,
}

impl Factorization {
    /// The factored integer, `prod p^e`.
    pub fn value(&self) -> BigInt {
        let mut acc = BigInt::from(1u32);
        for &(p, e) in &self.prime_powers {
            acc *= BigInt::from(p).pow(e);
        }
        acc
    }

    /// Distinct primes, ascending.
    pub fn primes(&self) -> Vec<u64> {
        self.prime_powers.iter().map(|&(p, _)| p).collect()
    }

    /// Number of distinct prime factors.
    pub fn num_primes(&self) -> usize {
        self.prime_powers.len()
    }

    /// Exponent of `p`, 0 when `p` does not divide the value.
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.prime_powers
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin primality test for `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    // This base set is deterministic for all n < 2^64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const TRIAL_LIMIT: u64 = 1 << 20;

/// Pollard rho (Brent variant) with a deterministic constant schedule.
fn pollard_rho(n: u64) -> u64 {
    debug_assert!(n > 1 && !is_prime(n) && n & 1 == 1);
    // Deterministic: walk through polynomial offsets c = 1, 2, 3, ...
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

/// Complete prime factorization of `n >= 1`. Deterministic.
///
/// Trial division up to `2^20`, then Brent-style rho for any remaining
/// composite cofactor (desk-scale inputs keep this cheap).
pub fn factor(n: u64) -> Factorization {
    assert!(n >= 1, "factor requires n >= 1");
    let mut prime_powers = Vec::new();
    let mut m = n;
    let mut push = |p: u64, e: u32| {
        if e > 0 {
            prime_powers.push((p, e));
        }
    };
    let mut e2 = 0;
    while m & 1 == 0 {
        m >>= 1;
        e2 += 1;
    }
    push(2, e2);
    let mut p = 3u64;
    while p <= TRIAL_LIMIT && p * p <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        push(p, e);
        p += 2;
    }
    // Remaining cofactor: 1, a prime, or a product of primes > 2^20.
    let mut stack = Vec::new();
    if m > 1 {
        stack.push(m);
    }
    let mut large = Vec::new();
    while let Some(q) = stack.pop() {
        if is_prime(q) {
            large.push(q);
        } else {
            let d = pollard_rho(q);
            stack.push(d);
            stack.push(q / d);
        }
    }
    large.sort_unstable();
    let mut i = 0;
    while i < large.len() {
        let p = large[i];
        let mut e = 0;
        while i < large.len() && large[i] == p {
            e += 1;
            i += 1;
        }
        push(p, e);
    }
    Factorization { prime_powers }
}

fn bigint_to_u64_abs(n: &BigInt, what: &str) -> Result<u64> {
    n.abs()
        .to_u64()
        .ok_or_else(|| Error::Argument(format!("{what} too large for 64-bit factorization: {n}")))
}

/// `supp(d)`: the set of distinct primes dividing `|d|`. Errors on `d = 0`.
pub fn supp(d: &BigInt) -> Result<BTreeSet<u64>> {
    if d.is_zero() {
        return Err(Error::Argument("supp(0) is undefined".into()));
    }
    let n = bigint_to_u64_abs(d, "supp argument")?;
    Ok(factor(n).primes().into_iter().collect())
}

/// `supp` for machine integers.
pub fn supp_i64(d: i64) -> Result<BTreeSet<u64>> {
    supp(&BigInt::from(d))
}

/// p-adic valuation of a nonzero integer.
pub fn v_p_int(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut m = n.clone();
    let mut r = 0i64;
    loop {
        let (q, rem) = m.div_rem(&p);
        if !rem.is_zero() {
            return r;
        }
        m = q;
        r += 1;
    }
}

/// p-adic valuation `v_p(x)` of a rational, with `Infinity` for `x = 0`.
pub fn v_p(x: &Rational, p: u64) -> Result<Valuation> {
    if !is_prime(p) {
        return Err(Error::Argument(format!("v_p requires a prime, got {p}")));
    }
    if x.is_zero() {
        return Ok(Valuation::Infinity);
    }
    Ok(Valuation::Finite(
        v_p_int(x.numer(), p) - v_p_int(x.denom(), p),
    ))
}

/// Floor of the square root of `n >= 0`, plus whether it is exact.
pub fn integer_sqrt(n: &BigInt) -> Result<(BigInt, bool)> {
    if n.is_negative() {
        return Err(Error::Argument(format!("integer_sqrt of negative {n}")));
    }
    let r = n.sqrt();
    let exact = &r * &r == *n;
    Ok((r, exact))
}

/// Smallest integer `r` with `r^2 >= n`, for `n >= 0`.
pub fn ceil_sqrt(n: &BigInt) -> Result<BigInt> {
    let (r, exact) = integer_sqrt(n)?;
    Ok(if exact { r } else { r + 1 })
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Combine congruences `x = r_i (mod m_i)` with pairwise coprime moduli.
///
/// Returns `(x, prod m_i)` with `0 <= x < prod m_i`.
pub fn crt_combine(residues: &[(i64, u64)]) -> Result<(u64, u64)> {
    let mut x: i128 = 0;
    let mut m: i128 = 1;
    for &(r, modulus) in residues {
        if modulus == 0 {
            return Err(Error::Argument("crt modulus must be positive".into()));
        }
        let mi = modulus as i128;
        let (g, inv, _) = ext_gcd(m % mi, mi);
        if g != 1 {
            return Err(Error::Argument(format!(
                "crt moduli not pairwise coprime (gcd {g} at modulus {modulus})"
            )));
        }
        let prod = m
            .checked_mul(mi)
            .ok_or_else(|| Error::Argument("crt modulus product overflow".into()))?;
        // x' = x + m * ((r - x)/m mod mi)
        let t = ((r as i128 - x) % mi * inv).rem_euclid(mi);
        x += m * t;
        m = prod;
        x = x.rem_euclid(m);
    }
    Ok((x as u64, m as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn v_p_examples() {
        assert_eq!(v_p(&rat("29/16"), 2).unwrap(), Valuation::Finite(-4));
        assert_eq!(v_p(&rat("45"), 3).unwrap(), Valuation::Finite(2));
        assert_eq!(v_p(&rat("0"), 5).unwrap(), Valuation::Infinity);
        assert!(v_p(&rat("1"), 4).is_err());
    }

    #[test]
    fn supp_examples() {
        let s45: Vec<u64> = supp_i64(45).unwrap().into_iter().collect();
        assert_eq!(s45, vec![3, 5]);
        assert!(supp_i64(1).unwrap().is_empty());
        let sm16: Vec<u64> = supp_i64(-16).unwrap().into_iter().collect();
        assert_eq!(sm16, vec![2]);
        assert!(supp_i64(0).is_err());
    }

    #[test]
    fn factor_examples() {
        assert_eq!(factor(16).prime_powers, vec![(2, 4)]);
        assert_eq!(factor(144).prime_powers, vec![(2, 4), (3, 2)]);
        assert_eq!(factor(1).prime_powers, vec![]);
        // 10^9 + 7 is prime (independent oracle: Miller-Rabin).
        assert!(is_prime(1_000_000_007));
        assert_eq!(factor(1_000_000_007).prime_powers, vec![(1_000_000_007, 1)]);
    }

    #[test]
    fn factor_roundtrip_exhaustive_small() {
        for n in 1u64..=100_000 {
            let f = factor(n);
            assert_eq!(f.value(), BigInt::from(n), "factor({n}) round trip");
            for &(p, _) in &f.prime_powers {
                assert!(is_prime(p), "factor({n}) listed non-prime {p}");
            }
        }
    }

    #[test]
    fn factor_large_semiprime() {
        // Two primes above the trial division limit.
        let p = 1_048_583u64;
        let q = 1_048_589u64;
        assert!(is_prime(p) && is_prime(q));
        assert_eq!(factor(p * q).prime_powers, vec![(p, 1), (q, 1)]);
    }

    #[test]
    fn integer_sqrt_examples() {
        let (r, e) = integer_sqrt(&BigInt::from(16)).unwrap();
        assert_eq!((r, e), (BigInt::from(4), true));
        let (r, e) = integer_sqrt(&BigInt::from(17)).unwrap();
        assert_eq!((r, e), (BigInt::from(4), false));
        let (r, e) = integer_sqrt(&BigInt::from(29 * 29)).unwrap();
        assert_eq!((r, e), (BigInt::from(29), true));
        assert!(integer_sqrt(&BigInt::from(-1)).is_err());
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt_combine(&[(1, 4), (2, 3)]).unwrap(), (5, 12));
        assert_eq!(crt_combine(&[(3, 4), (1, 3)]).unwrap(), (7, 12));
        // Oracle: exhaustive scan 0..143.
        let expect = (0..144u64)
            .find(|x| x % 16 == 1 && x % 9 == 2)
            .unwrap();
        assert_eq!(expect, 65);
        assert_eq!(crt_combine(&[(1, 16), (2, 9)]).unwrap(), (65, 144));
        assert!(crt_combine(&[(1, 4), (1, 6)]).is_err());
    }

    proptest! {
        #[test]
        fn valuation_is_additive(ax in 1i64..10_000, bx in 1i64..10_000,
                                 ay in 1i64..10_000, by in 1i64..10_000,
                                 pi in 0usize..4) {
            let p = [2u64, 3, 5, 7][pi];
            let x = Rational::new(BigInt::from(ax), BigInt::from(bx));
            let y = Rational::new(BigInt::from(ay), BigInt::from(by));
            let (vx, vy) = match (v_p(&x, p).unwrap(), v_p(&y, p).unwrap()) {
                (Valuation::Finite(a), Valuation::Finite(b)) => (a, b),
                _ => unreachable!(),
            };
            prop_assert_eq!(v_p(&(&x * &y), p).unwrap(), Valuation::Finite(vx + vy));
            let s = &x + &y;
            match v_p(&s, p).unwrap() {
                Valuation::Finite(vs) => {
                    prop_assert!(vs >= vx.min(vy));
                    if vx != vy {
                        prop_assert_eq!(vs, vx.min(vy));
                    }
                }
                Valuation::Infinity => prop_assert_eq!(vx, vy),
            }
        }

        #[test]
        fn factor_roundtrip_random(n in 1u64..u64::MAX / 2) {
            prop_assert_eq!(factor(n).value(), BigInt::from(n));
        }

        #[test]
        fn integer_sqrt_brackets(n in 0u64..u64::MAX) {
            let n = BigInt::from(n);
            let (r, exact) = integer_sqrt(&n).unwrap();
            prop_assert!(&r * &r <= n);
            prop_assert!((&r + 1) * (&r + 1) > n);
            prop_assert_eq!(exact, &r * &r == n);
        }

        #[test]
        fn crt_reduces_to_inputs(r1 in 0i64..16, r2 in 0i64..9, r3 in 0i64..25) {
            let (x, m) = crt_combine(&[(r1, 16), (r2, 9), (r3, 25)]).unwrap();
            prop_assert_eq!(m, 3600);
            prop_assert_eq!(x % 16, r1 as u64);
            prop_assert_eq!(x % 9, r2 as u64);
            prop_assert_eq!(x % 25, r3 as u64);
        }
    }
}
