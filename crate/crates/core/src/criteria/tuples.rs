//! Counter for close pairs of floored growth values.
//!
//! For a growth map with values m_n, a pair of distinct offsets (n1, n2) is
//! close at level k when |⌊m_{k+n1}⌋ − ⌊m_{k+n2}⌋| ≤ δ and, whenever both
//! backward indices exist (k ≥ max(n1, n2)), the backward displacements are
//! within δ as well. The counter must stay bounded in k for the series
//! criteria to have a chance; affine growth is the canonical failure.

use super::{conjunction, floor_seq};
use crate::error::{Error, Result};
use crate::growth::GrowthMap;
use crate::proxy::{diverges_by_doubling, CheckVerdict};
use serde::{Deserialize, Serialize};

/// Stored tuples are dropped past this many per level to keep reports small.
const TUPLE_STORE_LIMIT: usize = 4096;

/// Close-pair data at one level k.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TupleCount {
    pub k: u64,
    /// Pairs (both orders) whose forward displacements are within δ.
    pub forward: usize,
    /// Pairs (both orders) with k ≥ max(n1, n2) whose backward
    /// displacements are within δ.
    pub backward: usize,
    /// Pairs counted by the conjunction: forward close, and backward close
    /// whenever the backward indices exist.
    pub joint: usize,
    /// Joint counts at caps n_cap/8, n_cap/4, n_cap/2, n_cap.
    pub counts_by_cap: Vec<usize>,
    /// Whether the count stopped changing across the cap ladder.
    pub stabilized: bool,
    /// Counted ordered pairs (n1 < n2) at the full cap; empty when the level
    /// is refuted or the count exceeds the storage limit.
    pub tuples: Vec<[u64; 2]>,
    pub verdict: CheckVerdict,
}

/// Close-pair counts over a range of levels with a boundedness verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TupleCountReport {
    pub delta: f64,
    pub n_cap: usize,
    pub k_max: u64,
    pub per_k: Vec<TupleCount>,
    pub max_count: usize,
    /// Smallest level attaining the maximum count.
    pub argmax_k: u64,
    /// Supported: every level stabilized and the maximum is attained in the
    /// first half of the range. Refuted: some level keeps growing
    /// proportionally to the cap.
    pub verdict: CheckVerdict,
}

fn count_level(floors: &[f64], k: u64, delta: f64, caps: &[usize]) -> TupleCount {
    let k_us = k as usize;
    let cap = *caps.last().unwrap();
    let fwd = &floors[k_us..=k_us + cap];
    let monotone = fwd.windows(2).all(|w| w[0] <= w[1]);
    let slack = delta + 1e-9;

    let mut forward = 0usize;
    let mut backward = 0usize;
    let mut by_cap = vec![0usize; caps.len()];
    let mut tuples: Vec<[u64; 2]> = Vec::new();
    let mut overflowed = false;

    for n1 in 0..cap {
        for n2 in (n1 + 1)..=cap {
            let diff = (fwd[n2] - fwd[n1]).abs();
            if diff > slack {
                if monotone {
                    break;
                }
                continue;
            }
            forward += 2;
            let applicable = n2 <= k_us;
            let back_ok = if applicable {
                let bdiff = (floors[k_us - n1] - floors[k_us - n2]).abs();
                let ok = bdiff <= slack;
                if ok {
                    backward += 2;
                }
                ok
            } else {
                true
            };
            if back_ok {
                for (j, &c) in caps.iter().enumerate() {
                    if n2 <= c {
                        by_cap[j] += 2;
                    }
                }
                if tuples.len() < TUPLE_STORE_LIMIT {
                    tuples.push([n1 as u64, n2 as u64]);
                } else {
                    overflowed = true;
                }
            }
        }
    }

    let joint = *by_cap.last().unwrap();
    let stabilized = by_cap.windows(2).all(|w| w[0] == w[1]);
    let as_f64: Vec<f64> = by_cap.iter().map(|&c| c as f64).collect();
    let verdict = if stabilized {
        CheckVerdict::Supported
    } else if diverges_by_doubling(&as_f64) {
        CheckVerdict::Refuted
    } else {
        CheckVerdict::Inconclusive
    };
    if verdict == CheckVerdict::Refuted || overflowed {
        tuples.clear();
    }
    TupleCount {
        k,
        forward,
        backward,
        joint,
        counts_by_cap: by_cap,
        stabilized,
        tuples,
        verdict,
    }
}

/// Count close pairs at every level k in [1, k_max] under a cap ladder
/// n_cap/8, n_cap/4, n_cap/2, n_cap.
pub fn tuple_counter(f: &GrowthMap, k_max: u64, delta: f64, n_cap: usize) -> Result<TupleCountReport> {
    if delta <= 0.0 || !delta.is_finite() {
        return Err(Error::Argument(format!("delta must be positive and finite, got {delta}")));
    }
    if k_max == 0 {
        return Err(Error::Argument("tuple counter needs k_max >= 1".into()));
    }
    if n_cap < 8 {
        return Err(Error::Argument("tuple counter needs n_cap >= 8 for the cap ladder".into()));
    }
    let caps: Vec<usize> = [8, 4, 2, 1].iter().map(|d| n_cap / d).collect();
    let floors = floor_seq(f, k_max as usize + n_cap)?;

    let mut per_k = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        per_k.push(count_level(&floors, k, delta, &caps));
    }

    let (argmax_k, max_count) = per_k
        .iter()
        .map(|row| (row.k, row.joint))
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .unwrap();
    let row_verdict = conjunction(per_k.iter().map(|r| r.verdict));
    let verdict = match row_verdict {
        CheckVerdict::Refuted => CheckVerdict::Refuted,
        CheckVerdict::Supported if max_count == 0 || argmax_k <= (k_max / 2).max(1) => {
            CheckVerdict::Supported
        }
        _ => CheckVerdict::Inconclusive,
    };
    Ok(TupleCountReport { delta, n_cap, k_max, per_k, max_count, argmax_k, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reference count with no windowing tricks: full double loop over the
    /// same conjunction, both orders.
    fn brute_force(f: &GrowthMap, k: u64, delta: f64, cap: usize) -> usize {
        let m: Vec<f64> = (0..=(k as usize + cap))
            .map(|n| f.eval(n as f64).floor())
            .collect();
        let ku = k as usize;
        let mut count = 0;
        for n1 in 0..=cap {
            for n2 in 0..=cap {
                if n1 == n2 {
                    continue;
                }
                if (m[ku + n1] - m[ku + n2]).abs() > delta {
                    continue;
                }
                if n1.max(n2) <= ku && (m[ku - n1] - m[ku - n2]).abs() > delta {
                    continue;
                }
                count += 1;
            }
        }
        count
    }

    #[test]
    fn quadratic_growth_has_no_close_pairs_at_delta_two() {
        let f = GrowthMap::PolynomialQ { q: 2.0 };
        assert_eq!(brute_force(&f, 1, 2.0, 100), 0);
        let report = tuple_counter(&f, 1, 2.0, 100).unwrap();
        assert_eq!(report.per_k[0].joint, 0);
        assert_eq!(report.verdict, CheckVerdict::Supported);
    }

    #[test]
    fn quadratic_growth_counts_match_brute_force_at_delta_five() {
        let f = GrowthMap::PolynomialQ { q: 2.0 };
        let report = tuple_counter(&f, 3, 5.0, 64).unwrap();
        for row in &report.per_k {
            assert_eq!(row.joint, brute_force(&f, row.k, 5.0, 64), "level {}", row.k);
        }
        // Floors 2, 5, 10 at level 1: the adjacent pairs (0,1) and (1,2) are
        // close both ways that apply, nothing else is.
        assert_eq!(report.per_k[0].joint, 4);
        assert_eq!(report.per_k[0].forward, 4);
        assert_eq!(report.per_k[0].backward, 2);
        assert_eq!(report.per_k[0].tuples, vec![[0, 1], [1, 2]]);
    }

    #[test]
    fn affine_growth_is_unbounded_under_cap_doubling() {
        let f = GrowthMap::Affine;
        let report = tuple_counter(&f, 2, 2.0, 4096).unwrap();
        let row = &report.per_k[0];
        assert!(!row.stabilized);
        assert!(row.counts_by_cap.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(row.verdict, CheckVerdict::Refuted);
        assert_eq!(report.verdict, CheckVerdict::Refuted);
        assert!(row.tuples.is_empty());
    }

    #[test]
    fn quadratic_counts_stay_bounded_over_levels() {
        let f = GrowthMap::PolynomialQ { q: 2.0 };
        for delta in [1.0, 2.0, 5.0] {
            let report = tuple_counter(&f, 100, delta, 256).unwrap();
            assert_eq!(report.verdict, CheckVerdict::Supported, "delta {delta}");
            // Every counted offset respects the closed-form cutoff
            // (delta + 2)/2 - k for quadratic growth.
            for row in &report.per_k {
                let cutoff = (delta + 2.0) / 2.0 - row.k as f64;
                for t in &row.tuples {
                    assert!(
                        (t[0] as f64) <= cutoff && (t[1] as f64) <= cutoff,
                        "tuple {t:?} at level {} beats cutoff {cutoff}",
                        row.k
                    );
                }
            }
        }
    }

    #[test]
    fn counts_are_monotone_in_delta() {
        let f = GrowthMap::PolynomialQ { q: 1.5 };
        let mut last = 0;
        for delta in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let report = tuple_counter(&f, 5, delta, 64).unwrap();
            let total: usize = report.per_k.iter().map(|r| r.joint).sum();
            assert!(total >= last, "count dropped when delta grew to {delta}");
            last = total;
        }
    }

    #[test]
    fn rejects_degenerate_arguments() {
        let f = GrowthMap::Affine;
        assert!(tuple_counter(&f, 1, 0.0, 64).is_err());
        assert!(tuple_counter(&f, 0, 1.0, 64).is_err());
        assert!(tuple_counter(&f, 1, 1.0, 4).is_err());
    }
}
