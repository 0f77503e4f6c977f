//! Growth maps `f : [0,∞) → [1,∞)`, the derived sequence `m_k = f(k)`,
//! integer hit-time schedules, and the pairing-function construction that
//! turns a table of hit times into a growth map.

use crate::error::{Error, Result};
use crate::proxy::{self, ProxyReport, TrendVerdict};
use crate::Cx;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A monotone growth map with `f(t) ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum GrowthMap {
    /// `f(t) = t^q + 1`, `q ≥ 1`.
    PolynomialQ { q: f64 },
    /// `f(t) = e^{(2t+1)π + ζ}`, `ζ > 0`.
    ExpPi { zeta: f64 },
    /// `f(t) = t + 1`.
    Affine,
    /// Monotone samples `(t, f(t))` with right-constant interpolation inside
    /// the sampled range and last-slope extension beyond it.
    Tabulated { samples: Vec<(f64, f64)> },
}

impl GrowthMap {
    pub fn polynomial(q: f64) -> Result<Self> {
        if q < 1.0 {
            return Err(Error::Argument(format!("polynomial exponent must be ≥ 1, got {q}")));
        }
        Ok(GrowthMap::PolynomialQ { q })
    }

    pub fn exp_pi(zeta: f64) -> Result<Self> {
        if zeta <= 0.0 {
            return Err(Error::Argument(format!("exp-pi offset must be > 0, got {zeta}")));
        }
        Ok(GrowthMap::ExpPi { zeta })
    }

    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Argument("tabulated growth map needs samples".into()));
        }
        for w in samples.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Argument("tabulated abscissae must increase".into()));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::Argument("tabulated values must be nondecreasing".into()));
            }
        }
        if samples.iter().any(|&(_, v)| v < 1.0) {
            return Err(Error::Argument("growth map values must be ≥ 1".into()));
        }
        Ok(GrowthMap::Tabulated { samples })
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            GrowthMap::PolynomialQ { q } => t.powf(*q) + 1.0,
            GrowthMap::ExpPi { zeta } => ((2.0 * t + 1.0) * PI + zeta).exp(),
            GrowthMap::Affine => t + 1.0,
            GrowthMap::Tabulated { samples } => {
                let first = samples[0];
                let last = samples[samples.len() - 1];
                if t < first.0 {
                    return first.1;
                }
                if t >= last.0 {
                    let slope = if samples.len() >= 2 {
                        let prev = samples[samples.len() - 2];
                        (last.1 - prev.1) / (last.0 - prev.0)
                    } else {
                        0.0
                    };
                    return last.1 + slope * (t - last.0);
                }
                // Right-constant: the value at the largest sample point ≤ t.
                let idx = samples.partition_point(|&(s, _)| s <= t) - 1;
                samples[idx].1
            }
        }
    }

    /// `⌊f(n)⌋` as an integer; errors when the value is not finite.
    pub fn floor_at(&self, n: f64) -> Result<u64> {
        let v = self.eval(n);
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Data(format!("growth map value at {n} is {v}")));
        }
        Ok(v.floor() as u64)
    }
}

/// `m_0..m_{k_max}` with `m_k = f(k)`.
pub fn m_seq(f: &GrowthMap, k_max: usize) -> Vec<f64> {
    (0..=k_max).map(|k| f.eval(k as f64)).collect()
}

pub use crate::proxy::CheckVerdict;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaqartReport {
    pub verdict: CheckVerdict,
    pub proxy: ProxyReport,
}

/// Finite-horizon check of `liminf m_k / k > 0`.
pub fn check_baqart(f: &GrowthMap, k_max: usize) -> Result<BaqartReport> {
    if k_max < 10 {
        return Err(Error::Argument("check_baqart needs k_max ≥ 10".into()));
    }
    let ratios: Vec<f64> = (1..=k_max).map(|k| f.eval(k as f64) / k as f64).collect();
    let proxy = proxy::liminf_proxy(&ratios, 1e-6);
    let verdict = match proxy.verdict {
        // Divergent ratios certainly have positive liminf.
        TrendVerdict::Positive | TrendVerdict::Divergent => CheckVerdict::Supported,
        TrendVerdict::ZeroTrend => CheckVerdict::Refuted,
        TrendVerdict::Inconclusive => CheckVerdict::Inconclusive,
    };
    Ok(BaqartReport { verdict, proxy })
}

/// `F(n,k) = (n+k-2)(n+k-1)/2 + n`, a bijection of the positive-integer pairs
/// onto the positive integers.
pub fn pairing_f(n: u64, k: u64) -> Result<u64> {
    if n == 0 || k == 0 {
        return Err(Error::Argument("pairing_f needs n, k ≥ 1".into()));
    }
    let d = n + k - 2;
    Ok(d * (d + 1) / 2 + n)
}

/// Output of [`build_f0_schedule`]: the raw recursion and the composed map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct F0Schedule {
    /// `f0[N]` for `N = 0..=levels`.
    pub f0: Vec<u64>,
    /// `f = g ∘ f0` as a tabulated growth map, where `g` is replaced by
    /// `max(g, identity)` so that `f(N)` dominates `f0(N)`.
    pub map: GrowthMap,
}

/// Build the growth map that spreads a table of hit times onto residue slots.
///
/// `hit_times[n]` is the prefix of hit times for target index `n+1`; all
/// entries across all targets must be pairwise at least 1 apart. `g` is the
/// caller's bound on hit-time magnitude (`|t_{F⁻¹(N)}| ≤ g(N)`), typically
/// tabulated from the same prefix.
pub fn build_f0_schedule(hit_times: &[Vec<Cx>], g: &GrowthMap, levels: usize) -> Result<F0Schedule> {
    let flat: Vec<((usize, usize), Cx)> = hit_times
        .iter()
        .enumerate()
        .flat_map(|(n, row)| row.iter().enumerate().map(move |(k, &t)| ((n + 1, k + 1), t)))
        .collect();
    for i in 0..flat.len() {
        for j in i + 1..flat.len() {
            let d = (flat[i].1 - flat[j].1).norm();
            if d < 1.0 - 1e-12 {
                return Err(Error::Construction(format!(
                    "hit times t_{:?} and t_{:?} are only {d:.6} apart (need ≥ 1)",
                    flat[i].0, flat[j].0
                )));
            }
        }
    }
    let mut f0 = vec![1u64];
    for n in 1..=levels {
        let nn = n as u64;
        // max of F over 1 ≤ j ≤ N, 1 ≤ k ≤ N², computed directly.
        let mut fmax = 0u64;
        for j in 1..=nn {
            fmax = fmax.max(pairing_f(j, nn * nn)?);
        }
        let bound = f0[n - 1] + 1 + fmax;
        f0.push(bound + 1);
    }
    let samples: Vec<(f64, f64)> = f0
        .iter()
        .enumerate()
        .map(|(n, &v)| {
            let x = v as f64;
            (n as f64, g.eval(x).max(x))
        })
        .collect();
    Ok(F0Schedule { f0, map: GrowthMap::tabulated(samples)? })
}

/// How the hit times of a schedule are produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ScheduleKind {
    /// Explicit finite prefix `t_1, t_2, ...`.
    Table { times: Vec<Cx> },
    /// `t_n = n · step` along a fixed direction.
    RayMultiples { step: Cx },
    /// `t_n = n + i·(−3−2n+√(8n+9))/2`, riding the branch boundary of the
    /// two-branch rational weight on the quarter-plane sector.
    BranchCurve,
}

/// A sequence of pairwise separated hit times with a growth bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub kind: ScheduleKind,
    /// Claimed pairwise separation δ > 0.
    pub separation: f64,
    /// Claimed bound `|t_n| ≤ growth(n)`.
    pub growth: GrowthMap,
}

impl Schedule {
    /// `t_n` for `n ≥ 1`; table schedules error past their stored prefix.
    pub fn time(&self, n: u64) -> Result<Cx> {
        if n == 0 {
            return Err(Error::Argument("schedule indices start at 1".into()));
        }
        match &self.kind {
            ScheduleKind::Table { times } => times
                .get((n - 1) as usize)
                .copied()
                .ok_or_else(|| Error::Horizon(format!("schedule table has no entry {n}"))),
            ScheduleKind::RayMultiples { step } => Ok(*step * n as f64),
            ScheduleKind::BranchCurve => {
                let nf = n as f64;
                let y = (-3.0 - 2.0 * nf + (8.0 * nf + 9.0).sqrt()) / 2.0;
                Ok(Cx::new(nf, y))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ScheduleViolation {
    Separation { n: u64, m: u64, dist: f64 },
    GrowthBound { n: u64, magnitude: f64, bound: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleReport {
    pub verdict: CheckVerdict,
    pub first_violation: Option<ScheduleViolation>,
}

/// Exhaustively verify the separation and growth-bound invariants on a prefix.
pub fn check_schedule(schedule: &Schedule, prefix_len: u64) -> Result<ScheduleReport> {
    if prefix_len < 2 {
        return Err(Error::Argument("check_schedule needs prefix_len ≥ 2".into()));
    }
    let times: Vec<Cx> = (1..=prefix_len).map(|n| schedule.time(n)).collect::<Result<_>>()?;
    for n in 0..times.len() {
        for m in n + 1..times.len() {
            let d = (times[n] - times[m]).norm();
            if d < schedule.separation - 1e-12 {
                return Ok(ScheduleReport {
                    verdict: CheckVerdict::Refuted,
                    first_violation: Some(ScheduleViolation::Separation {
                        n: n as u64 + 1,
                        m: m as u64 + 1,
                        dist: d,
                    }),
                });
            }
        }
    }
    for (i, t) in times.iter().enumerate() {
        let n = i as u64 + 1;
        let bound = schedule.growth.eval(n as f64);
        if t.norm() > bound * (1.0 + 1e-9) + 1e-9 {
            return Ok(ScheduleReport {
                verdict: CheckVerdict::Refuted,
                first_violation: Some(ScheduleViolation::GrowthBound {
                    n,
                    magnitude: t.norm(),
                    bound,
                }),
            });
        }
    }
    Ok(ScheduleReport { verdict: CheckVerdict::Supported, first_violation: None })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModricReport {
    pub verdict: CheckVerdict,
    /// Tail-window minima of the gap sequence at the three doubling horizons.
    pub windows: [f64; 3],
}

/// Finite-horizon check of `|t_{⌊m_{n+1}⌋} − t_{⌊m_n⌋}| → ∞`.
pub fn check_modric(schedule: &Schedule, f: &GrowthMap, n_max: usize) -> Result<ModricReport> {
    if n_max < 4 {
        return Err(Error::Argument("check_modric needs n_max ≥ 4".into()));
    }
    let mut gaps = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let a = f.floor_at(n as f64)?.max(1);
        let b = f.floor_at(n as f64 + 1.0)?.max(1);
        gaps.push((schedule.time(b)? - schedule.time(a)?).norm());
    }
    let h = gaps.len();
    let tail_min = |hh: usize| -> f64 {
        let hh = hh.max(1).min(h);
        gaps[hh / 2..hh].iter().copied().fold(f64::INFINITY, f64::min)
    };
    let w = [tail_min(h / 4), tail_min(h / 2), tail_min(h)];
    let verdict = if w[0] < w[1] && w[1] < w[2] && w[2] >= 2.0 * w[0] {
        CheckVerdict::Supported
    } else if w[2] <= 1.1 * w[0] {
        CheckVerdict::Refuted
    } else {
        CheckVerdict::Inconclusive
    };
    Ok(ModricReport { verdict, windows: w })
}
