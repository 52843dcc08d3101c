//! Structural laws of rational periodic points, as executable predicates.
//!
//! Each checker evaluates one proved statement on a [`PeriodicSet`] and
//! returns pass, fail with a minimal re-checkable witness, or not-applicable
//! when the statement's hypotheses do not hold. During sweeps these act as
//! tripwires: a fail is either an implementation bug or mathematics news, and
//! is escalated, never discarded.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::numbers::supp;
use crate::solver::PeriodicSet;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LawId {
    ProductIdentity,
    PairwiseProduct,
    SumSupport,
    OddDenominator,
    Div16,
    ClassBounds,
    SameClassSum,
    Mod3Mod5,
    #[serde(rename = "cycle_bound_3free")]
    CycleBound3Free,
    FpsConjecture,
}

impl LawId {
    pub const ALL: [LawId; 10] = [
        LawId::ProductIdentity,
        LawId::PairwiseProduct,
        LawId::SumSupport,
        LawId::OddDenominator,
        LawId::Div16,
        LawId::ClassBounds,
        LawId::SameClassSum,
        LawId::Mod3Mod5,
        LawId::CycleBound3Free,
        LawId::FpsConjecture,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            LawId::ProductIdentity => "product_identity",
            LawId::PairwiseProduct => "pairwise_product",
            LawId::SumSupport => "sum_support",
            LawId::OddDenominator => "odd_denominator",
            LawId::Div16 => "div16",
            LawId::ClassBounds => "class_bounds",
            LawId::SameClassSum => "same_class_sum",
            LawId::Mod3Mod5 => "mod3_mod5",
            LawId::CycleBound3Free => "cycle_bound_3free",
            LawId::FpsConjecture => "fps_conjecture",
        }
    }
}

impl fmt::Display for LawId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LawId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LawId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown law id {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LawStatus {
    Pass,
    Fail,
    NotApplicable,
}

/// Outcome of one checker run. A `Fail` always carries a witness that
/// re-validates by plugging the quoted values back into the law's equation.
#[derive(Clone, Debug, Serialize)]
pub struct LawReport {
    pub law_id: LawId,
    pub status: LawStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub context: String,
}

impl LawReport {
    fn pass(law_id: LawId, context: String) -> Self {
        LawReport { law_id, status: LawStatus::Pass, witness: None, context }
    }

    fn fail(law_id: LawId, context: String, witness: Value) -> Self {
        LawReport { law_id, status: LawStatus::Fail, witness: Some(witness), context }
    }

    fn na(law_id: LawId, context: String) -> Self {
        LawReport { law_id, status: LawStatus::NotApplicable, witness: None, context }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("serialization cannot fail")
    }
}

fn context_for(ps: &PeriodicSet) -> String {
    format!("c={}", ps.param.c())
}

fn d_pow(d: u64, e: usize) -> BigInt {
    BigInt::from(d).pow(e as u32)
}

/// Within-cycle product identity: for each cycle `(X_1..X_l)` of numerators
/// and offset `k` not divisible by `l`, `prod_i (X_i + X_{i+k}) = d^l` with
/// indices mod `l`.
pub fn check_product_identity_k(ps: &PeriodicSet, k: usize) -> Result<LawReport> {
    let n = ps.num_per.len();
    if n == 0 {
        return Err(Error::Argument("product identity needs a nonempty Per".into()));
    }
    if k < 1 || k > n - 1 {
        return Err(Error::Argument(format!("offset k={k} out of range 1..={}", n - 1)));
    }
    let d = ps.d().expect("nonempty Per implies d present");
    let ctx = format!("{} k={k}", context_for(ps));
    let mut applicable = false;
    for (ci, cyc) in ps.cycle_numerators.iter().enumerate() {
        let len = cyc.len();
        if len < 2 || k % len == 0 {
            continue;
        }
        applicable = true;
        let mut product = BigInt::from(1);
        for i in 0..len {
            product *= &cyc[i] + &cyc[(i + k) % len];
        }
        let expected = d_pow(d, len);
        if product != expected {
            return Ok(LawReport::fail(
                LawId::ProductIdentity,
                ctx,
                json!({
                    "cycle": ci,
                    "numerators": cyc.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "k": k,
                    "product": product.to_string(),
                    "expected": expected.to_string(),
                }),
            ));
        }
    }
    Ok(if applicable {
        LawReport::pass(LawId::ProductIdentity, ctx)
    } else {
        LawReport::na(LawId::ProductIdentity, ctx)
    })
}

/// `prod_{i<j} (X_i + X_j) = +/- d^(n(n-1)/2)` over all of `num(Per)`.
pub fn check_pairwise_product(ps: &PeriodicSet) -> LawReport {
    let n = ps.num_per.len();
    let ctx = context_for(ps);
    if n < 2 {
        return LawReport::na(LawId::PairwiseProduct, ctx);
    }
    let d = ps.d().expect("nonempty Per implies d present");
    let mut product = BigInt::from(1);
    for i in 0..n {
        for j in i + 1..n {
            product *= &ps.num_per[i] + &ps.num_per[j];
        }
    }
    let expected = d_pow(d, n * (n - 1) / 2);
    if product == expected || product == -&expected {
        LawReport::pass(LawId::PairwiseProduct, ctx)
    } else {
        LawReport::fail(
            LawId::PairwiseProduct,
            ctx,
            json!({
                "numerators": ps.num_per.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "product": product.to_string(),
                "expected_abs": expected.to_string(),
            }),
        )
    }
}

/// Pairwise sums of periodic numerators factor over `supp(d)` only, and the
/// numerators are pairwise coprime.
pub fn check_sum_support(ps: &PeriodicSet) -> LawReport {
    let n = ps.num_per.len();
    let ctx = context_for(ps);
    if n < 2 {
        return LawReport::na(LawId::SumSupport, ctx);
    }
    let d = ps.d().expect("nonempty Per implies d present");
    let supp_d = supp(&BigInt::from(d)).unwrap_or_default();
    for i in 0..n {
        for j in i + 1..n {
            let x = &ps.num_per[i];
            let y = &ps.num_per[j];
            let sum = x + y;
            let bad_sum = if sum.is_zero() {
                true
            } else {
                match supp(&sum) {
                    Ok(sp) => !sp.is_subset(&supp_d),
                    Err(_) => true,
                }
            };
            if bad_sum || !x.gcd(y).is_one() {
                return LawReport::fail(
                    LawId::SumSupport,
                    ctx,
                    json!({
                        "x": x.to_string(),
                        "y": y.to_string(),
                        "sum": sum.to_string(),
                        "supp_d": supp_d.iter().collect::<Vec<_>>(),
                        "coprime": x.gcd(y).is_one(),
                    }),
                );
            }
        }
    }
    LawReport::pass(LawId::SumSupport, ctx)
}

/// Odd `den(c)` forces `|Per| <= 2`.
pub fn check_odd_denominator(ps: &PeriodicSet) -> LawReport {
    let ctx = context_for(ps);
    if ps.param.den().is_even() {
        return LawReport::na(LawId::OddDenominator, ctx);
    }
    if ps.num_per.len() <= 2 {
        LawReport::pass(LawId::OddDenominator, ctx)
    } else {
        LawReport::fail(
            LawId::OddDenominator,
            ctx,
            json!({ "per_size": ps.num_per.len() }),
        )
    }
}

/// A cycle of length >= 3 forces `16 | den(c)`.
pub fn check_div16(ps: &PeriodicSet) -> LawReport {
    let ctx = context_for(ps);
    let max_len = ps.max_cycle_len();
    if max_len < 3 || (ps.param.den() % BigInt::from(16)).is_zero() {
        LawReport::pass(LawId::Div16, ctx)
    } else {
        LawReport::fail(
            LawId::Div16,
            ctx,
            json!({
                "max_cycle_len": max_len,
                "den": ps.param.den().to_string(),
            }),
        )
    }
}

fn classes_mod_d(nums: &[BigInt], d: u64) -> BTreeMap<BigInt, Vec<BigInt>> {
    let d = BigInt::from(d);
    let mut map: BTreeMap<BigInt, Vec<BigInt>> = BTreeMap::new();
    for x in nums {
        map.entry(x.mod_floor(&d)).or_default().push(x.clone());
    }
    map
}

/// Class-counting bounds for `d` divisible by 4: `m <= |Per| <= m+2`,
/// `|Per| <= 2^s + 2`, and at most `2^s` classes mod `d` among preperiodic
/// numerators. When `|Per| = m+2`, the two doubled classes must carry
/// opposite sums `+2` and `-2`.
pub fn check_class_bounds(ps: &PeriodicSet) -> LawReport {
    let ctx = context_for(ps);
    let Some(d) = ps.d() else {
        return LawReport::na(LawId::ClassBounds, ctx);
    };
    if d % 4 != 0 {
        return LawReport::na(LawId::ClassBounds, ctx);
    }
    let s = ps.s().expect("d present");
    let n = ps.num_per.len();
    let m = ps.m_classes;
    let two_s = 1usize << s;
    let mut failures = Vec::new();
    if !(m <= n && n <= m + 2) {
        failures.push(json!({ "bound": "m <= |Per| <= m+2", "m": m, "per_size": n }));
    }
    if n > two_s + 2 {
        failures.push(json!({ "bound": "|Per| <= 2^s+2", "s": s, "per_size": n }));
    }
    if ps.preper_classes > two_s {
        failures.push(json!({
            "bound": "preper classes <= 2^s",
            "s": s,
            "preper_classes": ps.preper_classes,
        }));
    }
    if n == m + 2 && n >= 2 {
        // Saturated case: exactly two doubled classes with sums +2 and -2.
        let classes = classes_mod_d(&ps.num_per, d);
        let doubled: Vec<&Vec<BigInt>> =
            classes.values().filter(|v| v.len() >= 2).collect();
        let sums_ok = doubled.len() == 2
            && doubled.iter().all(|v| v.len() == 2)
            && {
                let mut sums: Vec<BigInt> =
                    doubled.iter().map(|v| &v[0] + &v[1]).collect();
                sums.sort();
                sums == vec![BigInt::from(-2), BigInt::from(2)]
            };
        if !sums_ok {
            failures.push(json!({
                "bound": "|Per| = m+2 forces two doubled classes with sums +2 and -2",
                "classes": classes
                    .values()
                    .map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            }));
        }
    }
    if failures.is_empty() {
        LawReport::pass(LawId::ClassBounds, ctx)
    } else {
        LawReport::fail(LawId::ClassBounds, ctx, json!({ "violations": failures }))
    }
}

/// Distinct periodic numerators in the same class mod `d` (with `4 | d`) sum
/// to `+/- 2`, and no class holds more than two of them.
pub fn check_same_class_sum(ps: &PeriodicSet) -> LawReport {
    let ctx = context_for(ps);
    let Some(d) = ps.d() else {
        return LawReport::na(LawId::SameClassSum, ctx);
    };
    if d % 4 != 0 {
        return LawReport::na(LawId::SameClassSum, ctx);
    }
    for (residue, class) in classes_mod_d(&ps.num_per, d) {
        if class.len() > 2 {
            return LawReport::fail(
                LawId::SameClassSum,
                ctx,
                json!({
                    "residue": residue.to_string(),
                    "class": class.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "reason": "more than 2 elements in one class",
                }),
            );
        }
        if class.len() == 2 {
            let sum = &class[0] + &class[1];
            if sum.abs() != BigInt::from(2) {
                return LawReport::fail(
                    LawId::SameClassSum,
                    ctx,
                    json!({
                        "x": class[0].to_string(),
                        "y": class[1].to_string(),
                        "sum": sum.to_string(),
                    }),
                );
            }
        }
    }
    LawReport::pass(LawId::SameClassSum, ctx)
}

/// Mod-3 and mod-5 residue patterns of a single cycle of numerators.
pub fn check_mod3_mod5_cycle(cycle_nums: &[BigInt], d: u64) -> LawReport {
    let n = cycle_nums.len();
    let ctx = format!("cycle of length {n}, d={d}");
    let check3 = d % 3 != 0 && n >= 3;
    let check5 = d % 5 != 0 && n >= 4;
    if !check3 && !check5 {
        return LawReport::na(LawId::Mod3Mod5, ctx);
    }
    if check3 {
        let residues: Vec<BigInt> = cycle_nums
            .iter()
            .map(|x| x.mod_floor(&BigInt::from(3)))
            .collect();
        let ok = !residues[0].is_zero() && residues.iter().all(|r| *r == residues[0]);
        if !ok {
            return LawReport::fail(
                LawId::Mod3Mod5,
                ctx,
                json!({
                    "modulus": 3,
                    "residues": residues.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                    "expected": "one nonzero residue repeated",
                }),
            );
        }
    }
    if check5 {
        let residues: Vec<BigInt> = cycle_nums
            .iter()
            .map(|x| x.mod_floor(&BigInt::from(5)))
            .collect();
        let constant = !residues[0].is_zero() && residues.iter().all(|r| *r == residues[0]);
        let alternating = n % 2 == 0 && {
            let u = &residues[0];
            let v = &residues[1];
            !u.is_zero()
                && !v.is_zero()
                && u != v
                && (u + v).mod_floor(&BigInt::from(5)) != BigInt::zero()
                && residues
                    .iter()
                    .enumerate()
                    .all(|(i, r)| *r == *if i % 2 == 0 { u } else { v })
        };
        if !(constant || alternating) {
            // An odd-length two-residue pattern lands here deliberately: the
            // two-residue branch of the statement presumes even length.
            return LawReport::fail(
                LawId::Mod3Mod5,
                ctx,
                json!({
                    "modulus": 5,
                    "residues": residues.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                    "expected": "one nonzero residue, or two non-opposite nonzero residues alternating (even length)",
                    "odd_length_two_residue": n % 2 == 1,
                }),
            );
        }
    }
    LawReport::pass(LawId::Mod3Mod5, ctx)
}

/// [`check_mod3_mod5_cycle`] over every cycle of the set.
pub fn check_mod3_mod5(ps: &PeriodicSet) -> LawReport {
    let ctx = context_for(ps);
    let Some(d) = ps.d() else {
        return LawReport::na(LawId::Mod3Mod5, ctx);
    };
    let mut any_pass = false;
    for cyc in &ps.cycle_numerators {
        let report = check_mod3_mod5_cycle(cyc, d);
        match report.status {
            LawStatus::Fail => {
                return LawReport::fail(LawId::Mod3Mod5, ctx, report.witness.unwrap_or(Value::Null))
            }
            LawStatus::Pass => any_pass = true,
            LawStatus::NotApplicable => {}
        }
    }
    if any_pass {
        LawReport::pass(LawId::Mod3Mod5, ctx)
    } else {
        LawReport::na(LawId::Mod3Mod5, ctx)
    }
}

/// When `4 | d` and `3` does not divide `d`, no cycle exceeds `2^s + 1`.
pub fn check_cycle_bound_3free(ps: &PeriodicSet) -> LawReport {
    let ctx = context_for(ps);
    let Some(d) = ps.d() else {
        return LawReport::na(LawId::CycleBound3Free, ctx);
    };
    if d % 4 != 0 || d % 3 == 0 {
        return LawReport::na(LawId::CycleBound3Free, ctx);
    }
    let s = ps.s().expect("d present");
    let bound = (1usize << s) + 1;
    match ps.cycle_lengths().into_iter().find(|&len| len > bound) {
        None => LawReport::pass(LawId::CycleBound3Free, ctx),
        Some(len) => LawReport::fail(
            LawId::CycleBound3Free,
            ctx,
            json!({ "cycle_len": len, "bound": bound, "s": s }),
        ),
    }
}

/// The conjecture itself: no cycle of length 4 or more. A fail here is the
/// search target and must be escalated, not discarded.
pub fn check_fps_conjecture(ps: &PeriodicSet) -> LawReport {
    let ctx = context_for(ps);
    let max_len = ps.max_cycle_len();
    if max_len <= 3 {
        LawReport::pass(LawId::FpsConjecture, ctx)
    } else {
        let s = ps.s().unwrap_or(0);
        LawReport::fail(
            LawId::FpsConjecture,
            ctx,
            json!({
                "max_cycle_len": max_len,
                "s": s,
                // s <= 2 would contradict a proved theorem (implementation
                // bug); s >= 3 would be a genuine counterexample candidate.
                "classification": if s <= 2 { "contradicts_theorem" } else { "fps_candidate" },
            }),
        )
    }
}

/// Run every checker applicable to a whole [`PeriodicSet`], with the product
/// identity evaluated for all offsets `k` and merged (worst status wins).
pub fn run_all(ps: &PeriodicSet) -> Vec<LawReport> {
    let n = ps.num_per.len();
    let product = if n >= 2 {
        let mut merged = LawReport::na(LawId::ProductIdentity, context_for(ps));
        for k in 1..n {
            let r = check_product_identity_k(ps, k).expect("k in range");
            match r.status {
                LawStatus::Fail => {
                    merged = r;
                    break;
                }
                LawStatus::Pass => merged = r,
                LawStatus::NotApplicable => {}
            }
        }
        merged
    } else {
        LawReport::na(LawId::ProductIdentity, context_for(ps))
    };
    vec![
        product,
        check_pairwise_product(ps),
        check_sum_support(ps),
        check_odd_denominator(ps),
        check_div16(ps),
        check_class_bounds(ps),
        check_same_class_sum(ps),
        check_mod3_mod5(ps),
        check_cycle_bound_3free(ps),
        check_fps_conjecture(ps),
    ]
}

/// One way of writing `2^k = e1*2^k1 + e2*2^k2` with signs `e` in `{-1, +1}`
/// and natural exponents, normalized so `k1 <= k2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TwoPowerDecomposition {
    pub e1: i8,
    pub k1: u32,
    pub e2: i8,
    pub k2: u32,
}

impl TwoPowerDecomposition {
    pub fn value(&self) -> i64 {
        self.e1 as i64 * (1i64 << self.k1) + self.e2 as i64 * (1i64 << self.k2)
    }
}

/// All ways (up to order) of expressing `2^k` as a signed sum of two powers
/// of two with natural exponents: `{(+,k-1),(+,k-1)}` when `k >= 1`, and
/// `{(-,k),(+,k+1)}` always. For `k = 0` the first form would need exponent
/// `-1`, so only one decomposition exists.
pub fn two_power_decompositions(k: u32) -> Vec<TwoPowerDecomposition> {
    let mut out = Vec::new();
    if k >= 1 {
        out.push(TwoPowerDecomposition { e1: 1, k1: k - 1, e2: 1, k2: k - 1 });
    }
    out.push(TwoPowerDecomposition { e1: -1, k1: k, e2: 1, k2: k + 1 });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::parse_rational;
    use crate::solver::solve;
    use std::collections::BTreeSet;

    fn golden() -> PeriodicSet {
        solve(&parse_rational("29/16").unwrap()).unwrap()
    }

    fn synthetic(c: &str, cycles: Vec<Vec<i64>>, preper: Vec<i64>) -> PeriodicSet {
        PeriodicSet::from_parts(&parse_rational(c).unwrap(), cycles, preper).unwrap()
    }

    #[test]
    fn law_id_serde_matches_as_str() {
        for id in LawId::ALL {
            let json = serde_json::to_string(&id).unwrap();
            assert_eq!(json, format!("{:?}", id.as_str()));
            assert_eq!(id.as_str().parse::<LawId>().unwrap(), id);
        }
    }

    #[test]
    fn product_identity_golden() {
        let ps = golden();
        // Oracle: (-1 + -7)(-7 + 5)(5 + -1) = (-8)(-2)(4) = 64 = 4^3.
        for k in [1, 2] {
            let r = check_product_identity_k(&ps, k).unwrap();
            assert_eq!(r.status, LawStatus::Pass, "k={k}");
        }
        assert!(check_product_identity_k(&ps, 3).is_err());
        assert!(check_product_identity_k(&ps, 0).is_err());
    }

    #[test]
    fn product_identity_two_cycle() {
        let ps = solve(&parse_rational("1").unwrap()).unwrap();
        // per = {-1, 0}: (-1+0)(0+(-1)) = 1 = 1^2.
        let r = check_product_identity_k(&ps, 1).unwrap();
        assert_eq!(r.status, LawStatus::Pass);
    }

    #[test]
    fn product_identity_synthetic_fail() {
        let ps = synthetic("29/16", vec![vec![1, 5]], vec![]);
        let r = check_product_identity_k(&ps, 1).unwrap();
        assert_eq!(r.status, LawStatus::Fail);
        assert!(r.witness.is_some());
    }

    #[test]
    fn pairwise_product_golden_and_controls() {
        assert_eq!(check_pairwise_product(&golden()).status, LawStatus::Pass);
        let ok = synthetic("29/16", vec![vec![1], vec![3]], vec![]);
        assert_eq!(check_pairwise_product(&ok).status, LawStatus::Pass); // 1+3 = 4 = d
        let bad = synthetic("29/16", vec![vec![1], vec![5]], vec![]);
        let r = check_pairwise_product(&bad);
        assert_eq!(r.status, LawStatus::Fail); // 6 != +/-4
    }

    #[test]
    fn sum_support_golden_and_control() {
        assert_eq!(check_sum_support(&golden()).status, LawStatus::Pass);
        let bad = synthetic("29/16", vec![vec![1], vec![5]], vec![]);
        assert_eq!(check_sum_support(&bad).status, LawStatus::Fail); // supp(6) = {2,3}
    }

    #[test]
    fn odd_denominator_cases() {
        let c1 = solve(&parse_rational("1").unwrap()).unwrap();
        assert_eq!(check_odd_denominator(&c1).status, LawStatus::Pass);
        let c0 = solve(&parse_rational("0").unwrap()).unwrap();
        assert_eq!(check_odd_denominator(&c0).status, LawStatus::Pass);
        assert_eq!(check_odd_denominator(&golden()).status, LawStatus::NotApplicable);
    }

    #[test]
    fn div16_cases() {
        assert_eq!(check_div16(&golden()).status, LawStatus::Pass);
        let c1 = solve(&parse_rational("1").unwrap()).unwrap();
        assert_eq!(check_div16(&c1).status, LawStatus::Pass);
        // Hypothetical 3-cycle with d = 2: must fail.
        let bad = synthetic("1/4", vec![vec![1, 3, 5]], vec![]);
        assert_eq!(check_div16(&bad).status, LawStatus::Fail);
    }

    #[test]
    fn class_bounds_cases() {
        assert_eq!(check_class_bounds(&golden()).status, LawStatus::Pass);
        let c34 = solve(&parse_rational("3/4").unwrap()).unwrap();
        assert_eq!(check_class_bounds(&c34).status, LawStatus::NotApplicable); // d = 2
        let bad = synthetic("29/16", vec![vec![1], vec![5], vec![9], vec![13]], vec![]);
        assert_eq!(check_class_bounds(&bad).status, LawStatus::Fail); // m=1, |per|=4
    }

    #[test]
    fn same_class_sum_cases() {
        assert_eq!(check_same_class_sum(&golden()).status, LawStatus::Pass);
        let vac = synthetic("29/16", vec![vec![1], vec![3]], vec![]);
        assert_eq!(check_same_class_sum(&vac).status, LawStatus::Pass);
        let bad = synthetic("29/16", vec![vec![1], vec![9]], vec![]);
        assert_eq!(check_same_class_sum(&bad).status, LawStatus::Fail); // 1+9 = 10
    }

    #[test]
    fn mod3_mod5_cases() {
        let nums: Vec<BigInt> = [-1i64, -7, 5].map(BigInt::from).to_vec();
        let r = check_mod3_mod5_cycle(&nums, 4);
        assert_eq!(r.status, LawStatus::Pass); // (2,2,2) mod 3; n=3 skips mod 5
        let bad: Vec<BigInt> = [1i64, 2, 4].map(BigInt::from).to_vec();
        assert_eq!(check_mod3_mod5_cycle(&bad, 4).status, LawStatus::Fail);
        let short: Vec<BigInt> = [1i64, 3].map(BigInt::from).to_vec();
        assert_eq!(check_mod3_mod5_cycle(&short, 4).status, LawStatus::NotApplicable);
    }

    #[test]
    fn mod5_alternating_and_odd_length() {
        // Even length, two non-opposite residues alternating: ok.
        let alt: Vec<BigInt> = [1i64, 2, 6, 7].map(BigInt::from).to_vec();
        assert_eq!(check_mod3_mod5_cycle(&alt, 4).status, LawStatus::Fail); // mod 3 fails first
        let alt5: Vec<BigInt> = [1i64, 7, 1, 7].map(BigInt::from).to_vec();
        // residues mod 3: (1,1,1,1) ok; mod 5: (1,2,1,2) alternating, 1+2=3 != 0.
        assert_eq!(check_mod3_mod5_cycle(&alt5, 4).status, LawStatus::Pass);
        // Odd length with two residues mod 5 cannot alternate: fail.
        let odd: Vec<BigInt> = [1i64, 7, 1, 7, 1].map(BigInt::from).to_vec();
        let r = check_mod3_mod5_cycle(&odd, 4);
        assert_eq!(r.status, LawStatus::Fail);
        assert_eq!(r.witness.unwrap()["odd_length_two_residue"], true);
    }

    #[test]
    fn cycle_bound_3free_cases() {
        assert_eq!(check_cycle_bound_3free(&golden()).status, LawStatus::Pass);
        let d12 = synthetic("1/144", vec![vec![1]], vec![]);
        assert_eq!(check_cycle_bound_3free(&d12).status, LawStatus::NotApplicable);
        let bad = synthetic("29/16", vec![vec![1, 3, 5, 7]], vec![]);
        assert_eq!(check_cycle_bound_3free(&bad).status, LawStatus::Fail); // 4 > 2^1+1
    }

    #[test]
    fn fps_conjecture_cases() {
        assert_eq!(check_fps_conjecture(&golden()).status, LawStatus::Pass);
        let c0 = solve(&parse_rational("0").unwrap()).unwrap();
        assert_eq!(check_fps_conjecture(&c0).status, LawStatus::Pass);
        let bad = synthetic("29/16", vec![vec![1, 3, 5, 7]], vec![]);
        let r = check_fps_conjecture(&bad);
        assert_eq!(r.status, LawStatus::Fail);
        assert_eq!(r.witness.unwrap()["classification"], "contradicts_theorem");
    }

    #[test]
    fn two_power_examples() {
        let d3: BTreeSet<_> = two_power_decompositions(3).into_iter().collect();
        let expect: BTreeSet<_> = [
            TwoPowerDecomposition { e1: 1, k1: 2, e2: 1, k2: 2 },
            TwoPowerDecomposition { e1: -1, k1: 3, e2: 1, k2: 4 },
        ]
        .into_iter()
        .collect();
        assert_eq!(d3, expect);
        assert_eq!(two_power_decompositions(0).len(), 1);
        let d1: BTreeSet<_> = two_power_decompositions(1).into_iter().collect();
        assert!(d1.contains(&TwoPowerDecomposition { e1: 1, k1: 0, e2: 1, k2: 0 }));
    }

    /// Independent oracle: exhaustive scan over exponents up to `k + 2`.
    fn two_power_oracle(k: u32) -> BTreeSet<TwoPowerDecomposition> {
        let target = 1i64 << k;
        let mut out = BTreeSet::new();
        for k1 in 0..=k + 2 {
            for k2 in k1..=k + 2 {
                for e1 in [-1i8, 1] {
                    for e2 in [-1i8, 1] {
                        let v = e1 as i64 * (1i64 << k1) + e2 as i64 * (1i64 << k2);
                        if v == target {
                            // Normalize sign order for equal exponents.
                            let (e1, e2) = if k1 == k2 && e1 > e2 { (e2, e1) } else { (e1, e2) };
                            out.insert(TwoPowerDecomposition { e1, k1, e2, k2 });
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn two_power_matches_exhaustive_search() {
        for k in 0..=20u32 {
            let got: BTreeSet<_> = two_power_decompositions(k).into_iter().collect();
            assert_eq!(got, two_power_oracle(k), "k={k}");
            assert!(got.iter().all(|dec| dec.value() == 1i64 << k));
            if k >= 1 {
                assert_eq!(got.len(), 2);
            }
        }
    }

    #[test]
    fn run_all_passes_on_golden() {
        for report in run_all(&golden()) {
            assert_ne!(report.status, LawStatus::Fail, "{report:?}");
        }
    }

    #[test]
    fn cross_identity_consistency_on_golden() {
        // Product over all k of the offset identities equals the square of
        // the pairwise product: each unordered pair appears exactly twice.
        let ps = golden();
        let n = ps.num_per.len();
        let cyc = &ps.cycle_numerators[0];
        let mut all_k = BigInt::from(1);
        for k in 1..n {
            for i in 0..n {
                all_k *= &cyc[i] + &cyc[(i + k) % n];
            }
        }
        let mut pairwise = BigInt::from(1);
        for i in 0..n {
            for j in i + 1..n {
                pairwise *= &ps.num_per[i] + &ps.num_per[j];
            }
        }
        assert_eq!(all_k, &pairwise * &pairwise);
    }
}
