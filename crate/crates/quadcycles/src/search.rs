//! Parameter sweep over c = a/d^2 looking for rational cycles of length 4
//! or more, with law checking along the way.
//!
//! Output is deterministic: records are keyed and sorted by (d, a), so the
//! same configuration produces byte-identical output regardless of how many
//! worker threads are used.

use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::BigInt;
use serde::Serialize;

use crate::laws::{run_all, LawStatus};
use crate::numbers::{v_p_int, Rational};
use crate::solver::solve_capped;
use crate::{Error, Result};

/// Sweep configuration. `a` ranges over integers coprime to `d` in
/// `a_min..=a_max` for each listed `d`.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub d_values: Vec<u64>,
    pub a_min: i64,
    pub a_max: i64,
    /// Run the full law suite on each parameter (slower); cycle-length
    /// escalation happens either way.
    pub laws_enabled: bool,
    /// Worker threads; 1 forces the sequential path.
    pub jobs: usize,
    pub max_iter: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            d_values: vec![1, 2, 3, 4],
            a_min: -100,
            a_max: 100,
            laws_enabled: true,
            jobs: 1,
            max_iter: crate::dynamics::DEFAULT_ITERATION_CAP,
        }
    }
}

/// One sweep record: summary statistics for a single c = a/d^2.
#[derive(Clone, Debug, Serialize)]
pub struct SearchRecord {
    pub d: u64,
    pub a: i64,
    /// Number of distinct odd primes dividing d.
    pub s: u32,
    pub v2_d: u32,
    pub cycle_lengths: Vec<usize>,
    pub per_size: usize,
    pub preper_size: usize,
    pub m_classes: usize,
    /// Law ids with status Fail; empty when laws are disabled or all pass.
    pub laws_failed: Vec<String>,
    /// Set when a cycle of length >= 4 or a law failure was found.
    pub escalation: bool,
}

/// Full detail retained for escalated parameters.
#[derive(Clone, Debug, Serialize)]
pub struct Escalation {
    pub d: u64,
    pub a: i64,
    pub detail: serde_json::Value,
    pub failed_laws: Vec<serde_json::Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchSummary {
    pub parameters: u64,
    pub nonempty_per: u64,
    pub max_cycle_len: usize,
    /// Histogram of max cycle length keyed by s.
    pub by_s: BTreeMap<u32, usize>,
    /// Histogram of max cycle length keyed by v_2(d).
    pub by_v2: BTreeMap<u32, usize>,
    pub escalations: usize,
}

#[derive(Debug)]
pub struct SearchOutcome {
    pub records: Vec<SearchRecord>,
    pub escalations: Vec<Escalation>,
    pub summary: SearchSummary,
}

fn process_one(d: u64, a: i64, cfg: &SearchConfig) -> Result<(SearchRecord, Option<Escalation>)> {
    let c = Rational::new(BigInt::from(a), BigInt::from(d) * BigInt::from(d));
    let ps = solve_capped(&c, cfg.max_iter)?;
    let s = ps.s().expect("a/d^2 has a square denominator") as u32;
    let v2_d = v_p_int(&BigInt::from(d), 2) as u32;
    let cycle_lengths = ps.cycle_lengths();
    let mut laws_failed = Vec::new();
    let mut failed_reports = Vec::new();
    if cfg.laws_enabled {
        for report in run_all(&ps) {
            if report.status == LawStatus::Fail {
                laws_failed.push(report.law_id.as_str().to_string());
                failed_reports.push(serde_json::to_value(&report).map_err(io_err)?);
            }
        }
    }
    let long_cycle = cycle_lengths.iter().any(|&l| l >= 4);
    let escalation = long_cycle || !laws_failed.is_empty();
    let record = SearchRecord {
        d,
        a,
        s,
        v2_d,
        per_size: ps.per.len(),
        preper_size: ps.preper.len(),
        m_classes: ps.m_classes,
        cycle_lengths,
        laws_failed,
        escalation,
    };
    let esc = if escalation {
        Some(Escalation {
            d,
            a,
            detail: serde_json::to_value(ps.to_json()).map_err(io_err)?,
            failed_laws: failed_reports,
        })
    } else {
        None
    };
    Ok((record, esc))
}

fn work_items(cfg: &SearchConfig) -> Result<Vec<(u64, i64)>> {
    if cfg.d_values.is_empty() {
        return Err(Error::Argument("no d values given".into()));
    }
    if cfg.a_min > cfg.a_max {
        return Err(Error::Argument(format!(
            "empty a range {}..={}",
            cfg.a_min, cfg.a_max
        )));
    }
    let mut items = Vec::new();
    for &d in &cfg.d_values {
        if d == 0 {
            return Err(Error::Argument("d = 0 is not a denominator".into()));
        }
        for a in cfg.a_min..=cfg.a_max {
            if num_integer::gcd(a.unsigned_abs(), d) == 1 {
                items.push((d, a));
            }
        }
    }
    Ok(items)
}

#[cfg(feature = "parallel")]
fn run_items(items: Vec<(u64, i64)>, cfg: &SearchConfig) -> Result<Vec<(SearchRecord, Option<Escalation>)>> {
    use rayon::prelude::*;
    if cfg.jobs <= 1 {
        return items.into_iter().map(|(d, a)| process_one(d, a, cfg)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Argument(format!("thread pool: {e}")))?;
    pool.install(|| {
        items
            .into_par_iter()
            .map(|(d, a)| process_one(d, a, cfg))
            .collect()
    })
}

#[cfg(not(feature = "parallel"))]
fn run_items(items: Vec<(u64, i64)>, cfg: &SearchConfig) -> Result<Vec<(SearchRecord, Option<Escalation>)>> {
    items.into_iter().map(|(d, a)| process_one(d, a, cfg)).collect()
}

/// Run the sweep. Records come back sorted by (d, a).
pub fn run_search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    let items = work_items(cfg)?;
    let mut results = run_items(items, cfg)?;
    results.sort_by_key(|(r, _)| (r.d, r.a));

    let mut records = Vec::with_capacity(results.len());
    let mut escalations = Vec::new();
    let mut by_s: BTreeMap<u32, usize> = BTreeMap::new();
    let mut by_v2: BTreeMap<u32, usize> = BTreeMap::new();
    let mut nonempty = 0u64;
    let mut max_cycle = 0usize;
    for (record, esc) in results {
        let longest = record.cycle_lengths.iter().copied().max().unwrap_or(0);
        let s_slot = by_s.entry(record.s).or_insert(0);
        *s_slot = (*s_slot).max(longest);
        let v_slot = by_v2.entry(record.v2_d).or_insert(0);
        *v_slot = (*v_slot).max(longest);
        if !record.cycle_lengths.is_empty() {
            nonempty += 1;
        }
        max_cycle = max_cycle.max(longest);
        if let Some(esc) = esc {
            escalations.push(esc);
        }
        records.push(record);
    }
    let summary = SearchSummary {
        parameters: records.len() as u64,
        nonempty_per: nonempty,
        max_cycle_len: max_cycle,
        by_s,
        by_v2,
        escalations: escalations.len(),
    };
    Ok(SearchOutcome { records, escalations, summary })
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// One JSON object per line, in (d, a) order.
pub fn write_ndjson<W: Write>(out: &mut W, records: &[SearchRecord]) -> Result<()> {
    for record in records {
        let line = serde_json::to_string(record).map_err(io_err)?;
        writeln!(out, "{line}").map_err(io_err)?;
    }
    Ok(())
}

/// Fixed-column CSV; `laws_failed` is a `;`-joined list.
pub fn write_csv<W: Write>(out: &mut W, records: &[SearchRecord]) -> Result<()> {
    writeln!(out, "d,a,s,v2_d,per_size,preper_size,max_cycle_len,m_classes,laws_failed")
        .map_err(io_err)?;
    for r in records {
        let max_cycle = r.cycle_lengths.iter().copied().max().unwrap_or(0);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.d,
            r.a,
            r.s,
            r.v2_d,
            r.per_size,
            r.preper_size,
            max_cycle,
            r.m_classes,
            r.laws_failed.join(";")
        )
        .map_err(io_err)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> SearchConfig {
        SearchConfig {
            d_values: vec![1, 2, 4],
            a_min: -40,
            a_max: 40,
            laws_enabled: true,
            jobs: 1,
            max_iter: crate::dynamics::DEFAULT_ITERATION_CAP,
        }
    }

    #[test]
    fn skips_non_coprime_parameters() {
        let items = work_items(&SearchConfig {
            d_values: vec![4],
            a_min: 1,
            a_max: 8,
            ..SearchConfig::default()
        })
        .unwrap();
        assert_eq!(items, vec![(4, 1), (4, 3), (4, 5), (4, 7)]);
    }

    #[test]
    fn golden_parameter_appears_with_three_cycle() {
        let out = run_search(&small_cfg()).unwrap();
        let rec = out
            .records
            .iter()
            .find(|r| r.d == 4 && r.a == 29)
            .expect("29/16 in range");
        assert_eq!(rec.cycle_lengths, vec![3]);
        assert_eq!(rec.per_size, 3);
        assert_eq!(rec.preper_size, 5);
        assert!(rec.laws_failed.is_empty());
        assert!(!rec.escalation);
    }

    #[test]
    fn no_law_failures_on_small_corpus() {
        let out = run_search(&small_cfg()).unwrap();
        assert!(out.escalations.is_empty());
        assert_eq!(out.summary.max_cycle_len, 3);
        assert!(out.summary.nonempty_per > 0);
    }

    #[test]
    fn records_sorted_by_d_then_a() {
        let out = run_search(&small_cfg()).unwrap();
        let keys: Vec<_> = out.records.iter().map(|r| (r.d, r.a)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_output_matches_sequential() {
        let mut cfg = small_cfg();
        let seq = run_search(&cfg).unwrap();
        cfg.jobs = 4;
        let par = run_search(&cfg).unwrap();
        let mut seq_buf = Vec::new();
        let mut par_buf = Vec::new();
        write_ndjson(&mut seq_buf, &seq.records).unwrap();
        write_ndjson(&mut par_buf, &par.records).unwrap();
        assert_eq!(seq_buf, par_buf);
    }

    #[test]
    fn csv_has_fixed_header() {
        let out = run_search(&SearchConfig {
            d_values: vec![2],
            a_min: 1,
            a_max: 3,
            ..small_cfg()
        })
        .unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &out.records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text
            .starts_with("d,a,s,v2_d,per_size,preper_size,max_cycle_len,m_classes,laws_failed\n"));
        assert_eq!(text.lines().count(), 1 + out.records.len());
    }

    #[test]
    fn rejects_bad_config() {
        assert!(run_search(&SearchConfig { d_values: vec![], ..small_cfg() }).is_err());
        assert!(run_search(&SearchConfig { d_values: vec![0], ..small_cfg() }).is_err());
        assert!(run_search(&SearchConfig { a_min: 5, a_max: 1, ..small_cfg() }).is_err());
    }
}
