//! Checkers for the series, counter, and interval hypotheses behind the
//! recurrence criteria, plus the necessary-condition side.
//!
//! Shared plumbing lives here: tail profiles with random-subset probes,
//! verdict aggregation, midpoint quadrature over regions with a recorded
//! half-step defect, and time resolution for ray versus schedule driven
//! checks. The individual checkers live in the submodules.

pub mod flows;
pub mod necessary;
pub mod operators;
pub mod series;
pub mod tuples;

pub use flows::{check_athens, AthensParams, OverlapCount};
pub use necessary::{
    check_backspace, check_nasser_tube, check_qwea, BackspaceParams, NasserReport, TubeReport,
};
pub use operators::{check_ffhc, check_ffhc_intervals, check_oma, OperatorMap, OmaParams};
pub use series::{check_dov, check_dovs, DovParams};
pub use tuples::{tuple_counter, TupleCountReport};

use crate::error::{Error, Result};
use crate::funcspace::GridFunction;
use crate::geometry::{Cell, Layout, Region, Sector};
use crate::growth::{GrowthMap, Schedule};
use crate::proxy::{diverges_by_doubling, CheckVerdict};
use crate::weights::WeightFn;
use crate::Cx;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A tail counts as small when it sits below this fraction of the
/// leading-term scale of its profile.
pub const TAIL_REL_TOL: f64 = 1e-2;
/// Absolute floor for tail comparisons, so series that underflow to zero
/// still pass instead of tripping on a zero scale.
pub const TAIL_ABS_TOL: f64 = 1e-12;

/// Sampling budget for one series check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesBudget {
    /// Largest term index evaluated.
    pub n_max: usize,
    /// Ascending truncation points; tails and partial sums are recorded at
    /// each. Needs four rungs for the divergence rule to be able to fire.
    pub ladder: Vec<usize>,
    /// Number of random finite subsets of the post-ladder indices.
    pub probes: usize,
    /// Largest subset cardinality drawn.
    pub probe_size: usize,
    pub seed: u64,
}

impl SeriesBudget {
    /// Ladder at n/16, n/8, n/4, n/2 with probes drawn from (n/2, n].
    pub fn with_horizon(n_max: usize) -> Self {
        let mut ladder: Vec<usize> = [16, 8, 4, 2].iter().map(|d| (n_max / d).max(1)).collect();
        ladder.dedup();
        SeriesBudget { n_max, ladder, probes: 32, probe_size: 16, seed: 7 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(Error::Argument("series budget needs n_max >= 1".into()));
        }
        if self.ladder.is_empty() {
            return Err(Error::Argument("series budget needs a nonempty ladder".into()));
        }
        if self.ladder.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Argument("series ladder must be strictly ascending".into()));
        }
        if *self.ladder.last().unwrap() > self.n_max {
            return Err(Error::Argument("series ladder exceeds n_max".into()));
        }
        Ok(())
    }
}

/// Tail data of one series (one row of a [`TailProfile`]).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailRow {
    /// Outer index the series depends on (0 when there is none).
    pub k: u64,
    /// Magnitude of the first nonvanishing term scale: max |term| over n up
    /// to the first ladder rung.
    pub first_term: f64,
    /// Partial sums of term magnitudes at the ladder rungs.
    pub partials: Vec<f64>,
    /// Largest single-term magnitude past each rung.
    pub sup_tails: Vec<f64>,
    /// Magnitude of the sum past each rung (norm of the remainder for
    /// vector-valued series).
    pub sum_tails: Vec<f64>,
    /// Largest probe sum ‖Σ_{n∈F} term_n‖ over the drawn subsets.
    pub max_probe: f64,
    pub probe_count: usize,
    pub verdict: CheckVerdict,
}

/// Tail behaviour of a family of series indexed by k, at a ladder of
/// truncation points, with random-finite-subset probes past the ladder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailProfile {
    pub ladder: Vec<usize>,
    pub rows: Vec<TailRow>,
    /// Tolerance the supported verdict used: max of the relative and the
    /// absolute floor.
    pub epsilon: f64,
    /// Whether the recorded sum tails are nonincreasing along the ladder in
    /// every row (expected for absolutely convergent inputs).
    pub nonincreasing: bool,
    /// Full sums per row, in row order; used to watch uniformity in k.
    pub totals: Vec<f64>,
    pub verdict: CheckVerdict,
}

impl TailProfile {
    /// Conjunction over rows, with one extra refutation route: totals that
    /// keep growing across the k ladder break uniformity even when each row
    /// is individually tame.
    fn finalize(mut self) -> Self {
        let mut verdict = conjunction(self.rows.iter().map(|r| r.verdict));
        if self.totals.len() >= 4 && diverges_by_doubling(&self.totals) {
            verdict = CheckVerdict::Refuted;
        }
        self.verdict = verdict;
        self
    }
}

/// Sup-form evidence: displaced sups past a rung ladder, measured against a
/// ladder of tolerances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupLadder {
    pub epsilons: Vec<f64>,
    /// Per tolerance, the first budget rung past which every later displaced
    /// sup stays below it; `None` when the horizon never gets there.
    pub cutoffs: Vec<Option<usize>>,
    /// Largest displaced sup past each budget rung.
    pub tail_sups: Vec<f64>,
    /// Largest sup over the random finite index subsets drawn past the last
    /// rung.
    pub probe_max: f64,
    pub probe_count: usize,
    pub verdict: CheckVerdict,
}

/// Evidence attached to one hypothesis of a criterion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionReport {
    pub label: String,
    pub verdict: CheckVerdict,
    /// Series evidence, one profile per probe vector or compact set.
    pub tails: Vec<TailProfile>,
    /// Sup-form evidence, one ladder per compact set.
    pub sups: Vec<SupLadder>,
    /// Free-form numeric evidence (defects, counts, sups).
    pub evidence: Vec<f64>,
    /// Quadrature step used for integral terms, when any.
    pub quad_step: Option<f64>,
    /// Change of a reference integral under one quadrature half-step.
    pub half_step_defect: Option<f64>,
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub fn new(label: impl Into<String>, verdict: CheckVerdict) -> Self {
        ConditionReport {
            label: label.into(),
            verdict,
            tails: Vec::new(),
            sups: Vec::new(),
            evidence: Vec::new(),
            quad_step: None,
            half_step_defect: None,
            notes: Vec::new(),
        }
    }

    /// Condition whose verdict is the conjunction over the given profiles.
    pub fn from_tails(label: impl Into<String>, tails: Vec<TailProfile>) -> Self {
        let verdict = conjunction(tails.iter().map(|t| t.verdict));
        let mut report = ConditionReport::new(label, verdict);
        report.tails = tails;
        report
    }

    /// Condition whose verdict is the conjunction over sup ladders.
    pub fn from_sups(label: impl Into<String>, sups: Vec<SupLadder>) -> Self {
        let verdict = conjunction(sups.iter().map(|s| s.verdict));
        let mut report = ConditionReport::new(label, verdict);
        report.sups = sups;
        report
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Verdicts for every hypothesis of one criterion plus their conjunction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: String,
    pub conditions: Vec<ConditionReport>,
    pub overall: CheckVerdict,
}

impl CriterionReport {
    pub fn new(id: impl Into<String>, conditions: Vec<ConditionReport>) -> Self {
        let overall = conjunction(conditions.iter().map(|c| c.verdict));
        CriterionReport { id: id.into(), conditions, overall }
    }

    pub fn condition(&self, label: &str) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| c.label == label)
    }
}

/// Refuted dominates, then inconclusive; supported only when unanimous.
pub fn conjunction(verdicts: impl IntoIterator<Item = CheckVerdict>) -> CheckVerdict {
    let mut out = CheckVerdict::Supported;
    for v in verdicts {
        match v {
            CheckVerdict::Refuted => return CheckVerdict::Refuted,
            CheckVerdict::Inconclusive => out = CheckVerdict::Inconclusive,
            CheckVerdict::Supported => {}
        }
    }
    out
}

/// How displacement indices are turned into points of the parameter sector:
/// scalar multiples of a fixed direction, or lookup in a discrete schedule.
#[derive(Clone, Copy)]
pub enum TimeSpec<'a> {
    Ray(Cx),
    Sched(&'a Schedule),
}

impl<'a> TimeSpec<'a> {
    /// The time attached to the (floored) index `m`.
    ///
    /// Ray mode scales the direction; schedule mode looks the index up, so
    /// it must fit in a machine integer and the schedule must reach it.
    pub fn time(&self, m: f64) -> Result<Cx> {
        if !m.is_finite() || m < 0.0 {
            return Err(Error::Argument(format!("time index {m} is not a finite nonnegative value")));
        }
        match self {
            TimeSpec::Ray(t0) => Ok(*t0 * m),
            TimeSpec::Sched(s) => {
                if m > u64::MAX as f64 {
                    return Err(Error::Horizon(format!("schedule index {m:.3e} overflows")));
                }
                s.time((m as u64).max(1))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            TimeSpec::Ray(t0) => format!("ray t0={:.4}{:+.4}i", t0.re, t0.im),
            TimeSpec::Sched(_) => "schedule".into(),
        }
    }
}

/// Floors of m_0..m_{k_max} as exact-as-representable reals.
///
/// Kept in floating point: steep growth maps overflow machine integers long
/// before they overflow f64, and every consumer multiplies by a complex
/// direction anyway.
pub(crate) fn floor_seq(f: &GrowthMap, k_max: usize) -> Result<Vec<f64>> {
    let m = crate::growth::m_seq(f, k_max);
    let mut out = Vec::with_capacity(m.len());
    for (n, v) in m.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::Horizon(format!("growth value m_{n} is not finite")));
        }
        out.push(v.floor());
    }
    Ok(out)
}

/// The weight extended by zero outside the sector the space lives on.
pub fn ext_eval(weight: &WeightFn, sector: &Sector, z: Cx) -> f64 {
    if sector.contains(z) {
        weight.eval_c(z)
    } else {
        0.0
    }
}

/// Midpoint rule over the cells of a region.
pub fn integrate_region(region: &Region, g: impl Fn(Cx) -> f64) -> f64 {
    region.cells.iter().map(|c| g(c.center) * c.weight).sum()
}

/// The same region with every cell split once along its layout.
///
/// Returns `None` for layouts with no exploitable structure on nonreal
/// cells; purely real irregular cells are treated as intervals of length
/// equal to their quadrature weight.
pub fn half_step_region(region: &Region) -> Option<Region> {
    match region.layout {
        Layout::Uniform1D { origin, step, n } => {
            Region::uniform_1d(region.sector, origin, step / 2.0, 2 * n).ok()
        }
        Layout::Polar { r0, dr, nr, theta0, dtheta, ntheta } => {
            let mut cells = Vec::with_capacity(4 * nr * ntheta);
            for i in 0..2 * nr {
                let r = r0 + (i as f64 + 0.5) * dr / 2.0;
                for j in 0..2 * ntheta {
                    let th = theta0 + (j as f64 + 0.5) * dtheta / 2.0;
                    cells.push(Cell {
                        center: Cx::from_polar(r, th),
                        weight: r * (dr / 2.0) * (dtheta / 2.0),
                    });
                }
            }
            Some(Region {
                sector: region.sector,
                cells,
                tag: format!("{}-half-step", region.tag),
                extent: region.extent,
                layout: Layout::Polar {
                    r0,
                    dr: dr / 2.0,
                    nr: 2 * nr,
                    theta0,
                    dtheta: dtheta / 2.0,
                    ntheta: 2 * ntheta,
                },
            })
        }
        Layout::Irregular => {
            if region.cells.iter().any(|c| c.center.im != 0.0) {
                return None;
            }
            let mut cells = Vec::with_capacity(2 * region.cells.len());
            for c in &region.cells {
                let h = c.weight / 2.0;
                for s in [-0.5, 0.5] {
                    cells.push(Cell {
                        center: Cx::new(c.center.re + s * h, 0.0),
                        weight: h,
                    });
                }
            }
            Some(Region {
                sector: region.sector,
                cells,
                tag: format!("{}-half-step", region.tag),
                extent: region.extent,
                layout: Layout::Irregular,
            })
        }
    }
}

/// Absolute change of the midpoint integral under one half-step refinement.
pub fn half_step_defect(region: &Region, g: impl Fn(Cx) -> f64) -> Option<f64> {
    let fine = half_step_region(region)?;
    Some((integrate_region(region, &g) - integrate_region(&fine, &g)).abs())
}

/// Representative cell diameter of a region, for recording quadrature steps.
pub fn region_step(region: &Region) -> f64 {
    match region.layout {
        Layout::Uniform1D { step, .. } => step,
        Layout::Polar { dr, .. } => dr,
        Layout::Irregular => region
            .cells
            .iter()
            .map(|c| c.weight)
            .fold(0.0_f64, f64::max),
    }
}

/// Random finite subsets of `lo..=hi`, each of cardinality in
/// `1..=max_size`, sorted and deduplicated. Empty when the range is.
pub(crate) fn probe_subsets(
    lo: usize,
    hi: usize,
    count: usize,
    max_size: usize,
    seed: u64,
) -> Vec<Vec<usize>> {
    if lo > hi || count == 0 || max_size == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let size = rng.gen_range(1..=max_size);
            let mut f: Vec<usize> = (0..size).map(|_| rng.gen_range(lo..=hi)).collect();
            f.sort_unstable();
            f.dedup();
            f
        })
        .collect()
}

fn row_verdict(
    partials: &[f64],
    sup_tail_last: f64,
    max_probe: f64,
    total: f64,
    epsilon: f64,
) -> CheckVerdict {
    if diverges_by_doubling(partials) {
        return CheckVerdict::Refuted;
    }
    if total == 0.0 {
        return CheckVerdict::Supported;
    }
    if sup_tail_last <= epsilon && max_probe <= epsilon {
        return CheckVerdict::Supported;
    }
    CheckVerdict::Inconclusive
}

/// Build the tail profile of a scalar series family.
///
/// `term(k, n)` returns the magnitude of the n-th term (n ≥ 1) of the series
/// attached to outer index `k`; `n_end(k)` caps the index range for finite
/// sums (`None` runs to the budget horizon). Probes are drawn from the
/// indices past the last ladder rung and skipped once a row is refuted.
pub fn scalar_tail_profile(
    k_values: &[u64],
    budget: &SeriesBudget,
    n_end: impl Fn(u64) -> Option<usize>,
    term: impl Fn(u64, usize) -> Result<f64>,
) -> Result<TailProfile> {
    budget.validate()?;
    if k_values.is_empty() {
        return Err(Error::Argument("tail profile needs at least one row".into()));
    }
    let last_rung = *budget.ladder.last().unwrap();
    let mut rows = Vec::with_capacity(k_values.len());
    let mut totals = Vec::with_capacity(k_values.len());
    let mut scale = 0.0_f64;

    struct Raw {
        k: u64,
        end: usize,
        first: f64,
        partials: Vec<f64>,
        sup_tails: Vec<f64>,
        total: f64,
    }
    let mut raws = Vec::with_capacity(k_values.len());

    for &k in k_values {
        let end = n_end(k).unwrap_or(budget.n_max).min(budget.n_max);
        let mut partial = 0.0;
        let mut partials = Vec::with_capacity(budget.ladder.len());
        let mut magnitudes = Vec::with_capacity(end);
        let mut first = 0.0_f64;
        for n in 1..=end {
            let t = term(k, n)?;
            if !t.is_finite() || t < 0.0 {
                return Err(Error::Data(format!(
                    "series term magnitude at k={k}, n={n} is {t}; must be finite and nonnegative"
                )));
            }
            partial += t;
            magnitudes.push(t);
            if n <= budget.ladder[0] {
                first = first.max(t);
            }
            if budget.ladder.contains(&n) {
                partials.push(partial);
            }
        }
        // Rungs past the final index of a finite sum record the full sum.
        while partials.len() < budget.ladder.len() {
            partials.push(partial);
        }
        let sup_tails: Vec<f64> = budget
            .ladder
            .iter()
            .map(|&rung| {
                magnitudes
                    .iter()
                    .skip(rung)
                    .copied()
                    .fold(0.0_f64, f64::max)
            })
            .collect();
        scale = scale.max(first);
        totals.push(partial);
        raws.push(Raw { k, end, first, partials, sup_tails, total: partial });
    }

    let epsilon = (TAIL_REL_TOL * scale).max(TAIL_ABS_TOL);
    let mut nonincreasing = true;
    for raw in raws {
        let sum_tails: Vec<f64> = raw.partials.iter().map(|p| raw.total - p).collect();
        if sum_tails.windows(2).any(|w| w[1] > w[0] + 1e-9 * (1.0 + raw.total.abs())) {
            nonincreasing = false;
        }
        let refuted = diverges_by_doubling(&raw.partials);
        let (max_probe, probe_count) = if refuted || raw.total == 0.0 {
            (0.0, 0)
        } else {
            let subsets = probe_subsets(
                last_rung + 1,
                raw.end,
                budget.probes,
                budget.probe_size,
                budget.seed ^ raw.k,
            );
            let mut max_probe = 0.0_f64;
            let n_subsets = subsets.len();
            for f in &subsets {
                let mut s = 0.0;
                for &n in f {
                    s += term(raw.k, n)?;
                }
                max_probe = max_probe.max(s);
            }
            (max_probe, n_subsets)
        };
        let sup_last = *raw.sup_tails.last().unwrap();
        let verdict = row_verdict(&raw.partials, sup_last, max_probe, raw.total, epsilon);
        rows.push(TailRow {
            k: raw.k,
            first_term: raw.first,
            partials: raw.partials,
            sup_tails: raw.sup_tails,
            sum_tails,
            max_probe,
            probe_count,
            verdict,
        });
    }

    let profile = TailProfile {
        ladder: budget.ladder.clone(),
        rows,
        epsilon,
        nonincreasing,
        totals,
        verdict: CheckVerdict::Inconclusive,
    };
    Ok(profile.finalize())
}

/// Build the tail profile of a vector-valued series family in a function
/// space; magnitudes are norms in the space of the `zero` template.
///
/// The remainder norms come from snapshots of the running sum, so a single
/// pass per row suffices; probe sums re-evaluate their terms.
pub fn vector_tail_profile(
    k_values: &[u64],
    budget: &SeriesBudget,
    zero: &GridFunction,
    n_end: impl Fn(u64) -> Option<usize>,
    term: impl Fn(u64, usize) -> Result<GridFunction>,
) -> Result<TailProfile> {
    budget.validate()?;
    if k_values.is_empty() {
        return Err(Error::Argument("tail profile needs at least one row".into()));
    }
    let last_rung = *budget.ladder.last().unwrap();
    let mut rows = Vec::with_capacity(k_values.len());
    let mut totals = Vec::with_capacity(k_values.len());
    let mut scale = 0.0_f64;

    struct Raw {
        k: u64,
        end: usize,
        first: f64,
        partials: Vec<f64>,
        sup_tails: Vec<f64>,
        sum_tails: Vec<f64>,
        total: f64,
    }
    let mut raws = Vec::with_capacity(k_values.len());

    for &k in k_values {
        let end = n_end(k).unwrap_or(budget.n_max).min(budget.n_max);
        let mut running = zero.clone();
        let mut snapshots: Vec<GridFunction> = Vec::with_capacity(budget.ladder.len());
        let mut partials_norm = Vec::with_capacity(budget.ladder.len());
        let mut term_norms = Vec::with_capacity(end);
        let mut first = 0.0_f64;
        for n in 1..=end {
            let t = term(k, n)?;
            let tn = t.norm()?;
            if !tn.is_finite() {
                return Err(Error::Data(format!("term norm at k={k}, n={n} is not finite")));
            }
            term_norms.push(tn);
            running.add_scaled(&t, 1.0)?;
            if n <= budget.ladder[0] {
                first = first.max(tn);
            }
            if budget.ladder.contains(&n) {
                snapshots.push(running.clone());
                partials_norm.push(running.norm()?);
            }
        }
        while snapshots.len() < budget.ladder.len() {
            snapshots.push(running.clone());
            partials_norm.push(running.norm()?);
        }
        let mut sum_tails = Vec::with_capacity(budget.ladder.len());
        for snap in &snapshots {
            let mut rem = running.clone();
            rem.add_scaled(snap, -1.0)?;
            sum_tails.push(rem.norm()?);
        }
        let sup_tails: Vec<f64> = budget
            .ladder
            .iter()
            .map(|&rung| term_norms.iter().skip(rung).copied().fold(0.0_f64, f64::max))
            .collect();
        let total = running.norm()?;
        scale = scale.max(first);
        totals.push(total);
        raws.push(Raw { k, end, first, partials: partials_norm, sup_tails, sum_tails, total });
    }

    let epsilon = (TAIL_REL_TOL * scale).max(TAIL_ABS_TOL);
    let mut nonincreasing = true;
    for raw in raws {
        if raw
            .sum_tails
            .windows(2)
            .any(|w| w[1] > w[0] + 1e-9 * (1.0 + raw.total.abs()))
        {
            nonincreasing = false;
        }
        let refuted = diverges_by_doubling(&raw.partials);
        let (max_probe, probe_count) = if refuted || raw.total == 0.0 {
            (0.0, 0)
        } else {
            let subsets = probe_subsets(
                last_rung + 1,
                raw.end,
                budget.probes,
                budget.probe_size,
                budget.seed ^ raw.k,
            );
            // Probe subsets overlap heavily, so cache a bounded number of
            // terms instead of recomputing operator applications per draw.
            let mut cache: std::collections::HashMap<usize, GridFunction> =
                std::collections::HashMap::new();
            let mut max_probe = 0.0_f64;
            let n_subsets = subsets.len();
            for f in &subsets {
                let mut s = zero.clone();
                for &n in f {
                    if let Some(t) = cache.get(&n) {
                        s.add_scaled(t, 1.0)?;
                    } else {
                        let t = term(raw.k, n)?;
                        s.add_scaled(&t, 1.0)?;
                        if cache.len() < 64 {
                            cache.insert(n, t);
                        }
                    }
                }
                max_probe = max_probe.max(s.norm()?);
            }
            (max_probe, n_subsets)
        };
        let sup_last = *raw.sup_tails.last().unwrap();
        let verdict = row_verdict(&raw.partials, sup_last, max_probe, raw.total, epsilon);
        rows.push(TailRow {
            k: raw.k,
            first_term: raw.first,
            partials: raw.partials,
            sup_tails: raw.sup_tails,
            sum_tails: raw.sum_tails,
            max_probe,
            probe_count,
            verdict,
        });
    }

    let profile = TailProfile {
        ladder: budget.ladder.clone(),
        rows,
        epsilon,
        nonincreasing,
        totals,
        verdict: CheckVerdict::Inconclusive,
    };
    Ok(profile.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{Bump, SpaceTag};
    use crate::weights::catalog;

    fn geometric_term(_k: u64, n: usize) -> Result<f64> {
        Ok(0.5_f64.powi(n as i32))
    }

    #[test]
    fn geometric_series_is_supported() {
        let budget = SeriesBudget::with_horizon(256);
        let profile = scalar_tail_profile(&[0], &budget, |_| None, geometric_term).unwrap();
        assert_eq!(profile.verdict, CheckVerdict::Supported);
        assert!(profile.nonincreasing);
        assert_eq!(profile.rows[0].probe_count, 32);
        let expect = 1.0;
        assert!((profile.totals[0] - expect).abs() < 1e-10);
    }

    #[test]
    fn harmonic_series_is_refuted_on_a_four_rung_ladder() {
        let budget = SeriesBudget {
            n_max: 4096,
            ladder: vec![512, 1024, 2048, 4096],
            probes: 32,
            probe_size: 16,
            seed: 7,
        };
        let profile =
            scalar_tail_profile(&[0], &budget, |_| None, |_, n| Ok(1.0 / n as f64)).unwrap();
        assert_eq!(profile.verdict, CheckVerdict::Refuted);
        // Refuted rows skip their probes.
        assert_eq!(profile.rows[0].probe_count, 0);
    }

    #[test]
    fn slow_tail_is_inconclusive_not_supported() {
        // Geometric decay at ratio 0.9: the partial-sum increments shrink, so
        // the doubling rule stays quiet, but the sup tail past the last rung
        // (0.9^33 ≈ 0.031) is still above a percent of the first term.
        let budget = SeriesBudget::with_horizon(64);
        let profile =
            scalar_tail_profile(&[0], &budget, |_| None, |_, n| Ok(0.9f64.powi(n as i32)))
                .unwrap();
        assert_eq!(profile.verdict, CheckVerdict::Inconclusive);
    }

    #[test]
    fn all_zero_rows_are_supported() {
        let budget = SeriesBudget::with_horizon(64);
        let profile = scalar_tail_profile(&[1, 2], &budget, |_| None, |_, _| Ok(0.0)).unwrap();
        assert_eq!(profile.verdict, CheckVerdict::Supported);
        assert_eq!(profile.rows[1].probe_count, 0);
    }

    #[test]
    fn growing_totals_across_k_refute_uniformity() {
        // Each row alone converges fast, but the total scales like k.
        let budget = SeriesBudget::with_horizon(128);
        let ks = [1, 2, 4, 8, 16];
        let profile = scalar_tail_profile(&ks, &budget, |_| None, |k, n| {
            Ok(k as f64 * 0.5_f64.powi(n as i32))
        })
        .unwrap();
        assert_eq!(profile.verdict, CheckVerdict::Refuted);
    }

    #[test]
    fn finite_sums_pad_their_ladder() {
        let budget = SeriesBudget::with_horizon(64);
        let profile = scalar_tail_profile(&[3], &budget, |k| Some(k as usize), |_, n| {
            Ok(1.0 / n as f64)
        })
        .unwrap();
        let row = &profile.rows[0];
        let h3 = 1.0 + 0.5 + 1.0 / 3.0;
        assert!((row.partials.last().unwrap() - h3).abs() < 1e-12);
        assert_eq!(row.verdict, CheckVerdict::Supported);
    }

    #[test]
    fn vector_profile_matches_scalar_on_disjoint_bumps() {
        // Translates of a fixed bump with geometric amplitudes: the remainder
        // norm equals the sum of the term norms, so both profiles agree.
        let w = catalog("const", &[1.0]).unwrap();
        let tag = SpaceTag::lp(1.0, w).unwrap();
        let grid = crate::funcspace::grid_for(
            &crate::weights::Domain::Interval { lo: 0.0, hi: 200.0 },
            200.0,
            0.05,
        )
        .unwrap();
        let grid = std::sync::Arc::new(grid);
        let zero = GridFunction::zeros(tag.clone(), grid.clone());
        let budget = SeriesBudget {
            n_max: 24,
            ladder: vec![2, 4, 8, 16],
            probes: 8,
            probe_size: 4,
            seed: 3,
        };
        let profile = vector_tail_profile(&[0], &budget, &zero, |_| None, |_, n| {
            let bump = Bump::new(Cx::new(4.0 * n as f64, 0.0), 1.0, 0.5_f64.powi(n as i32))?;
            Ok(bump.to_grid(tag.clone(), grid.clone()))
        })
        .unwrap();
        assert_eq!(profile.verdict, CheckVerdict::Supported);
        assert!(profile.nonincreasing);
        let row = &profile.rows[0];
        assert!(row.sum_tails.last().unwrap() < &row.first_term);
    }

    #[test]
    fn probe_subsets_are_deterministic_and_in_range() {
        let a = probe_subsets(10, 20, 32, 16, 5);
        let b = probe_subsets(10, 20, 32, 16, 5);
        assert_eq!(a, b);
        assert_eq!(a.len(), 32);
        for f in &a {
            assert!(!f.is_empty());
            assert!(f.iter().all(|&n| (10..=20).contains(&n)));
            assert!(f.windows(2).all(|w| w[0] < w[1]));
        }
        assert!(probe_subsets(21, 20, 32, 16, 5).is_empty());
    }

    #[test]
    fn half_step_preserves_measure_and_shrinks_defect() {
        let region = Region::uniform_1d(Sector::half_line(), 0.0, 0.25, 8).unwrap();
        let fine = half_step_region(&region).unwrap();
        assert!((region.total_measure() - fine.total_measure()).abs() < 1e-12);
        // Midpoint error on x^2 drops by about 4 per half-step.
        let coarse_err = (integrate_region(&region, |z| z.re * z.re) - 8.0 / 3.0).abs();
        let fine_err = (integrate_region(&fine, |z| z.re * z.re) - 8.0 / 3.0).abs();
        assert!(fine_err < coarse_err / 3.0);
        let defect = half_step_defect(&region, |z| z.re * z.re).unwrap();
        assert!(defect > 0.0 && defect < coarse_err * 2.0);
    }

    #[test]
    fn irregular_real_regions_still_refine() {
        let region = Region::from_intervals_1d(&[(0.0, 1.0), (2.0, 2.5)], 0.25, 3.0).unwrap();
        let fine = half_step_region(&region).unwrap();
        assert_eq!(fine.cells.len(), 2 * region.cells.len());
        assert!((region.total_measure() - fine.total_measure()).abs() < 1e-12);
    }

    #[test]
    fn conjunction_rules() {
        use CheckVerdict::*;
        assert_eq!(conjunction([Supported, Supported]), Supported);
        assert_eq!(conjunction([Supported, Inconclusive]), Inconclusive);
        assert_eq!(conjunction([Inconclusive, Refuted]), Refuted);
        assert_eq!(conjunction([]), Supported);
    }

    #[test]
    fn time_spec_resolves_rays_and_schedules() {
        let t0 = Cx::new(0.0, 2.0);
        let ray = TimeSpec::Ray(t0);
        assert_eq!(ray.time(5.0).unwrap(), t0 * 5.0);
        let sched = Schedule {
            kind: crate::growth::ScheduleKind::RayMultiples { step: Cx::new(1.0, 0.0) },
            separation: 1.0,
            growth: GrowthMap::Affine,
        };
        let spec = TimeSpec::Sched(&sched);
        assert_eq!(spec.time(4.0).unwrap(), Cx::new(4.0, 0.0));
        // Index zero is clamped to the first schedule entry.
        assert_eq!(spec.time(0.0).unwrap(), Cx::new(1.0, 0.0));
        assert!(ray.time(f64::NAN).is_err());
    }

    #[test]
    fn floor_seq_tracks_growth() {
        let f = GrowthMap::PolynomialQ { q: 2.0 };
        let floors = floor_seq(&f, 4).unwrap();
        assert_eq!(floors, vec![1.0, 2.0, 5.0, 10.0, 17.0]);
    }

    #[test]
    fn ext_eval_vanishes_off_sector() {
        let w = catalog("polynomial-s", &[2.0]).unwrap();
        let sector = Sector::half_line();
        assert!(ext_eval(&w, &sector, Cx::new(1.0, 0.0)) > 0.0);
        assert_eq!(ext_eval(&w, &sector, Cx::new(-3.0, 0.0)), 0.0);
    }
}
