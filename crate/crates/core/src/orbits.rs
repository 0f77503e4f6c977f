//! Orbit experiments: visit records along translation orbits, hit densities,
//! scheduled-visit checks against window sequences, the staggered series
//! construction of vectors revisiting several targets, and the transfer of
//! discrete hit densities to continuous ones.

use crate::densities::{lower_f_density, lower_mn_density, DensityEstimate, IndexSet};
use crate::dynamics::{apply, right_inverse_translation, SemigroupOp};
use crate::error::{Error, Result};
use crate::funcspace::{Family, GridFunction};
use crate::geometry::Region;
use crate::growth::{m_seq, GrowthMap};
use crate::proxy::diverges_by_doubling;
use crate::Cx;
use serde::Serialize;
use std::sync::Arc;

/// Windows enumerated when fitting a growth map below a discrete horizon.
const WINDOW_CAP: usize = 512;
/// Members of each residue class enumerated for the construction series.
const SERIES_CAP: usize = 512;
/// Partial-sum ladder (member counts) for the divergence rule.
const SERIES_LADDER: [usize; 4] = [64, 128, 256, 512];

/// Closed ball in a function space: a center and a metric radius.
#[derive(Debug, Clone)]
pub struct TargetBall {
    pub center: GridFunction,
    pub radius: f64,
}

impl TargetBall {
    pub fn new(center: GridFunction, radius: f64) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::Argument(format!(
                "target radius must be positive and finite, got {radius}"
            )));
        }
        Ok(TargetBall { center, radius })
    }
}

/// Distances and hit flags along a uniformly sampled orbit.
///
/// Invariant: `hits[i]` iff `distances[i] < radius`.
#[derive(Debug, Clone, Serialize)]
pub struct VisitRecord {
    pub times: Vec<f64>,
    pub step: f64,
    pub radius: f64,
    pub distances: Vec<f64>,
    pub hits: Vec<bool>,
}

impl VisitRecord {
    pub fn hit_count(&self) -> usize {
        self.hits.iter().filter(|h| **h).count()
    }

    pub fn hit_times(&self) -> Vec<f64> {
        self.times
            .iter()
            .zip(&self.hits)
            .filter_map(|(t, h)| h.then_some(*t))
            .collect()
    }

    /// Largest time the record can vouch for: last sample plus half a cell.
    pub fn horizon(&self) -> f64 {
        match self.times.last() {
            Some(t) => t + 0.5 * self.step,
            None => 0.0,
        }
    }

    /// Hit set as a region of the half line: each hit sample dilated to its
    /// full time cell `[t - step/2, t + step/2]`, adjacent cells merged.
    pub fn hit_region(&self) -> Result<Region> {
        let half = 0.5 * self.step;
        let mut intervals: Vec<(f64, f64)> = Vec::new();
        for (t, h) in self.times.iter().zip(&self.hits) {
            if !h {
                continue;
            }
            let lo = (t - half).max(0.0);
            let hi = t + half;
            match intervals.last_mut() {
                Some(last) if lo <= last.1 + 1e-12 => last.1 = hi,
                _ => intervals.push((lo, hi)),
            }
        }
        Region::from_intervals_1d(&intervals, self.step, self.horizon())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,distance,hit\n");
        for ((t, d), h) in self.times.iter().zip(&self.distances).zip(&self.hits) {
            out.push_str(&format!("{t},{d},{}\n", u8::from(*h)));
        }
        out
    }
}

/// Sample the orbit `t ↦ op_at(t)·x` on `{0, t_step, …} ∩ [0, t_max]` and
/// record the metric distance to the target center at every time.
pub fn hitting_set(
    op_at: impl Fn(f64) -> SemigroupOp,
    x: &GridFunction,
    target: &TargetBall,
    t_max: f64,
    t_step: f64,
) -> Result<VisitRecord> {
    if !t_max.is_finite() || !t_step.is_finite() || t_max <= 0.0 || t_step <= 0.0 {
        return Err(Error::Argument("time grid needs t_max > 0 and t_step > 0".into()));
    }
    let points = (t_max / t_step + 1e-9).floor() as usize + 1;
    let mut times = Vec::with_capacity(points);
    let mut distances = Vec::with_capacity(points);
    let mut hits = Vec::with_capacity(points);
    for i in 0..points {
        let t = i as f64 * t_step;
        let y = apply(&op_at(t), x)?;
        let d = y.metric(&target.center)?;
        times.push(t);
        distances.push(d);
        hits.push(d < target.radius);
    }
    Ok(VisitRecord { times, step: t_step, radius: target.radius, distances, hits })
}

/// Lower f-density of the hit set of a record.
///
/// The record must extend past the deepest window: `f(t_max)` may not exceed
/// the record horizon, otherwise hits would be silently censored.
pub fn orbit_f_density(
    record: &VisitRecord,
    f: &GrowthMap,
    t_max: f64,
    t_step: f64,
) -> Result<DensityEstimate> {
    let needed = f.eval(t_max);
    if !needed.is_finite() {
        return Err(Error::Data(format!("window radius at {t_max} is {needed}")));
    }
    let have = record.horizon();
    if needed > have + 1e-9 {
        return Err(Error::Horizon(format!(
            "window f({t_max}) = {needed:.3} exceeds the record horizon {have:.3}; \
             hits past the horizon would be censored"
        )));
    }
    lower_f_density(&record.hit_region()?, f, t_max, t_step)
}

/// Largest window count whose windows fit below the discrete horizon.
fn fitted_windows(f: &GrowthMap, horizon: u64) -> Result<(Vec<f64>, usize)> {
    let m = m_seq(f, WINDOW_CAP);
    let mut top = 0.0f64;
    let mut fit = 0usize;
    for n in 1..=WINDOW_CAP {
        let next = top.max(m[n - 1]);
        if next > horizon as f64 {
            break;
        }
        top = next;
        fit = n;
    }
    if fit < 8 {
        return Err(Error::Horizon(format!(
            "only {fit} windows of the growth map fit below the horizon {horizon}; \
             the liminf proxy needs at least 8"
        )));
    }
    Ok((m, fit))
}

/// Visit schedule for [`scheduled_visits`]: powers of one translation, or an
/// explicit time list. Both apply `T(t_n)` to the initial vector; for the
/// translation semigroup `T(n·t0) = T(t0)^n` exactly, and sampling from the
/// initial vector avoids compounding interpolation error.
#[derive(Debug, Clone)]
pub enum OrbitSchedule {
    Power { t0: f64 },
    Times(Vec<f64>),
}

impl OrbitSchedule {
    fn time_at(&self, n: usize) -> f64 {
        match self {
            OrbitSchedule::Power { t0 } => *t0 * n as f64,
            OrbitSchedule::Times(ts) => ts[n - 1],
        }
    }

    fn validate(&self, n_max: usize) -> Result<()> {
        match self {
            OrbitSchedule::Power { t0 } => {
                if !t0.is_finite() || *t0 <= 0.0 {
                    return Err(Error::Argument(format!("schedule step must be > 0, got {t0}")));
                }
            }
            OrbitSchedule::Times(ts) => {
                if ts.len() < n_max {
                    return Err(Error::Argument(format!(
                        "schedule lists {} times but n_max is {n_max}",
                        ts.len()
                    )));
                }
                if ts.iter().any(|t| !t.is_finite() || *t < 0.0) {
                    return Err(Error::Argument("schedule times must be finite and ≥ 0".into()));
                }
            }
        }
        Ok(())
    }
}

/// Visits of one target along a schedule, with the window density of the
/// hit indices.
#[derive(Debug, Clone, Serialize)]
pub struct TargetVisits {
    pub hits: Vec<u64>,
    pub min_distance: f64,
    pub density: DensityEstimate,
}

/// For each target, collect `{n ≤ n_max : T(t_n)x ∈ V}` and estimate its
/// lower density against the windows `[1, f(n-1)]`.
///
/// The deepest sampled time must stay on the grid: orbits past the extent are
/// all-censored and would fake misses.
pub fn scheduled_visits(
    schedule: &OrbitSchedule,
    x: &GridFunction,
    targets: &[TargetBall],
    f: &GrowthMap,
    n_max: usize,
) -> Result<Vec<TargetVisits>> {
    if targets.is_empty() {
        return Err(Error::Argument("need at least one target".into()));
    }
    if n_max < 8 {
        return Err(Error::Argument(format!("n_max must be at least 8, got {n_max}")));
    }
    schedule.validate(n_max)?;
    let extent = x.grid.extent;
    let deepest = (1..=n_max).map(|n| schedule.time_at(n)).fold(0.0, f64::max);
    if deepest > extent + 1e-9 {
        let usable = match schedule {
            OrbitSchedule::Power { t0 } => (extent / t0).floor() as usize,
            OrbitSchedule::Times(ts) => {
                ts.iter().take_while(|t| **t <= extent + 1e-9).count()
            }
        };
        return Err(Error::Horizon(format!(
            "schedule reaches {deepest:.3} but the grid ends at {extent:.3}; \
             at most n = {usable} is usable"
        )));
    }
    let (m, fit) = fitted_windows(f, n_max as u64)?;

    let mut hit_lists: Vec<Vec<u64>> = vec![Vec::new(); targets.len()];
    let mut min_dist = vec![f64::INFINITY; targets.len()];
    for n in 1..=n_max {
        let t = schedule.time_at(n);
        let y = apply(&SemigroupOp::Translation { t: Cx::new(t, 0.0) }, x)?;
        for (k, target) in targets.iter().enumerate() {
            let d = y.metric(&target.center)?;
            min_dist[k] = min_dist[k].min(d);
            if d < target.radius {
                hit_lists[k].push(n as u64);
            }
        }
    }

    hit_lists
        .into_iter()
        .zip(min_dist)
        .map(|(hits, min_distance)| {
            let set = IndexSet::new(hits.clone(), n_max as u64)?;
            let density = lower_mn_density(&set, &m[..fit], fit)?;
            Ok(TargetVisits { hits, min_distance, density })
        })
        .collect()
}

/// Norm of the translate `S_t y` (support moved to the right by `t`),
/// evaluated analytically from the weight: the integrand lives on the cells
/// of `y` itself, so the value is available far beyond the grid extent.
fn displaced_norm(y: &GridFunction, shift: f64) -> f64 {
    let w = &y.tag.weight;
    let off = Cx::new(shift, 0.0);
    match y.tag.family {
        Family::LpRho { p } => {
            let mut acc = 0.0;
            for (cell, v) in y.grid.cells.iter().zip(&y.values) {
                if *v != 0.0 {
                    acc += v.abs().powf(p) * w.eval_c(cell.center + off) * cell.weight;
                }
            }
            acc.powf(1.0 / p)
        }
        Family::C0Rho => {
            let mut acc = 0.0f64;
            for (cell, v) in y.grid.cells.iter().zip(&y.values) {
                acc = acc.max(v.abs() * w.eval_c(cell.center + off));
            }
            acc
        }
    }
}

/// Per-level bookkeeping of the series construction.
#[derive(Debug, Clone, Serialize)]
pub struct ConstructionLog {
    pub levels: usize,
    /// Norm of each level's materialized contribution (amplitude included).
    pub level_norms: Vec<f64>,
    /// Translates actually placed on the grid, per level.
    pub level_terms: Vec<usize>,
    /// Series mass of the unplaced translates, per level.
    pub level_tails: Vec<f64>,
    pub tail: f64,
    pub tail_tolerance: f64,
    /// Partial sums of each level's displaced-norm series on the ladder.
    pub series_partials: Vec<Vec<f64>>,
}

/// Build `x = Σ_j a_j Σ_{n ∈ A_j} S_{t0·⌊f(n)⌋} y_j` with the residue classes
/// `A_j = {n ≥ j : n ≡ j-1 mod 2J}` (all of ℕ when J = 1).
///
/// The staggered classes keep simultaneous returns apart: at the visit times
/// of level j every other level's nearest translate is at least one window
/// gap away. Before anything is materialized, each level's displaced-norm
/// series is summed on a doubling ladder; a series that keeps doubling
/// refuses the construction, and so does an unplaced tail at or above the
/// tolerance. Those two checks are the series-convergence precondition the
/// sufficient criteria test in their displaced rows.
pub fn construct_fh_vector(
    f: &GrowthMap,
    t0: f64,
    seeds: &[GridFunction],
    amplitudes: Option<&[f64]>,
    tail_tolerance: f64,
) -> Result<(GridFunction, ConstructionLog)> {
    if seeds.is_empty() {
        return Err(Error::Argument("need at least one seed".into()));
    }
    if !t0.is_finite() || t0 <= 0.0 {
        return Err(Error::Argument(format!("time step must be > 0, got {t0}")));
    }
    if !tail_tolerance.is_finite() || tail_tolerance <= 0.0 {
        return Err(Error::Argument("tail tolerance must be positive".into()));
    }
    let defaults: Vec<f64> = (1..=seeds.len()).map(|j| 0.5f64.powi(j as i32)).collect();
    let amps = match amplitudes {
        Some(a) => {
            if a.len() != seeds.len() {
                return Err(Error::Shape(format!(
                    "{} amplitudes for {} seeds",
                    a.len(),
                    seeds.len()
                )));
            }
            if a.iter().any(|c| !c.is_finite() || *c < 0.0) {
                return Err(Error::Argument("amplitudes must be finite and ≥ 0".into()));
            }
            a.to_vec()
        }
        None => defaults,
    };
    for y in &seeds[1..] {
        if y.tag != seeds[0].tag || !Arc::ptr_eq(&y.grid, &seeds[0].grid) {
            return Err(Error::Shape("seeds must live on one grid in one space".into()));
        }
    }

    let levels = seeds.len();
    let modulus = if levels == 1 { 1 } else { 2 * levels };
    let extent = seeds[0].grid.extent;

    // Enumerate each class once: shifts, terms, and the placement cut.
    let mut placed: Vec<Vec<f64>> = Vec::with_capacity(levels);
    let mut level_tails = Vec::with_capacity(levels);
    let mut series_partials = Vec::with_capacity(levels);
    for (j0, y) in seeds.iter().enumerate() {
        let residue = j0 % modulus;
        let mut shifts = Vec::new();
        let mut terms = Vec::new();
        let mut n = j0 + 1;
        while terms.len() < SERIES_CAP {
            if n % modulus == residue {
                let shift = t0 * f.floor_at(n as f64)? as f64;
                shifts.push(shift);
                terms.push(amps[j0] * displaced_norm(y, shift));
            }
            n += 1;
        }
        let partials: Vec<f64> = SERIES_LADDER
            .iter()
            .map(|&k| terms[..k].iter().sum())
            .collect();
        if diverges_by_doubling(&partials) {
            return Err(Error::Construction(format!(
                "displaced-norm series of level {} keeps doubling: partials {:?}",
                j0 + 1,
                partials
            )));
        }
        let cut = shifts
            .iter()
            .take_while(|s| **s + y.support_radius <= extent + 1e-12)
            .count();
        level_tails.push(terms[cut..].iter().sum::<f64>());
        series_partials.push(partials);
        placed.push(shifts[..cut].to_vec());
    }

    let tail: f64 = level_tails.iter().sum();
    if tail >= tail_tolerance {
        return Err(Error::Construction(format!(
            "series mass {tail:.3e} outside the grid is not under the tolerance \
             {tail_tolerance:.3e}; per-level tails {level_tails:?}"
        )));
    }

    let mut x = GridFunction::zeros(seeds[0].tag.clone(), seeds[0].grid.clone());
    let mut level_norms = Vec::with_capacity(levels);
    let mut level_terms = Vec::with_capacity(levels);
    for (j0, y) in seeds.iter().enumerate() {
        let mut level = GridFunction::zeros(y.tag.clone(), y.grid.clone());
        for shift in &placed[j0] {
            let translate = right_inverse_translation(Cx::new(*shift, 0.0), y)?;
            level.add_scaled(&translate, 1.0)?;
        }
        level_norms.push(amps[j0] * level.norm()?);
        level_terms.push(placed[j0].len());
        x.add_scaled(&level, amps[j0])?;
    }

    let log = ConstructionLog {
        levels,
        level_norms,
        level_terms,
        level_tails,
        tail,
        tail_tolerance,
        series_partials,
    };
    Ok((x, log))
}

/// Discrete-to-continuous consistency of hit densities.
#[derive(Debug, Clone, Serialize)]
pub struct TransferReport {
    pub discrete: DensityEstimate,
    pub continuous: DensityEstimate,
    /// Half time-cell of the continuous record: hits persist on `[t-δ, t+δ]`.
    pub dilation: f64,
    pub matched: usize,
    pub unmatched: usize,
    /// Discrete hits past the continuous horizon; not matchable either way.
    pub beyond_horizon: usize,
    pub vacuous: bool,
    pub consistent: bool,
}

/// Check that a positive discrete hit density survives the passage to
/// continuous time.
///
/// `indices` are the visited iterate indices (the scheduled visit at position
/// n happened at time `t0·indices[n]`); their hit set is measured against the
/// windows of `f`. The continuous record's hit set is measured against the
/// composed windows `g(f(t))`, tabulated at the density grid nodes. The
/// report also matches every discrete hit time to a continuous hit in the
/// same time cell.
pub fn transfer_check(
    t0: f64,
    indices: &[u64],
    hits: &[bool],
    continuous: &VisitRecord,
    f: &GrowthMap,
    g: impl Fn(f64) -> f64,
    t_step: f64,
) -> Result<TransferReport> {
    if indices.is_empty() || indices.len() != hits.len() {
        return Err(Error::Shape(format!(
            "{} indices with {} hit flags",
            indices.len(),
            hits.len()
        )));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Data("scheduled indices must increase".into()));
    }
    if !t0.is_finite() || t0 <= 0.0 || !t_step.is_finite() || t_step <= 0.0 {
        return Err(Error::Argument("t0 and t_step must be positive".into()));
    }
    if continuous.times.is_empty() {
        return Err(Error::Argument("continuous record is empty".into()));
    }

    let hit_indices: Vec<u64> = indices
        .iter()
        .zip(hits)
        .filter_map(|(i, h)| h.then_some(*i))
        .collect();
    let vacuous = hit_indices.is_empty();
    let horizon = *indices.last().unwrap();
    let set = IndexSet::new(hit_indices.clone(), horizon)?;
    let (m, fit) = fitted_windows(f, horizon)?;
    let discrete = lower_mn_density(&set, &m[..fit], fit)?;

    // Tabulate g∘f at the density grid nodes; right-constant interpolation
    // makes the tabulated map exact exactly where the density is sampled.
    let have = continuous.horizon();
    let mut samples = vec![(0.0, g(f.eval(0.0)))];
    let mut points = 0usize;
    loop {
        let t = (points + 1) as f64 * t_step;
        let v = g(f.eval(t));
        if !v.is_finite() || v > have + 1e-9 {
            break;
        }
        samples.push((t, v));
        points += 1;
        if points > 200_000 {
            return Err(Error::Argument(
                "composed windows grow too slowly for the continuous horizon".into(),
            ));
        }
    }
    if points < 8 {
        return Err(Error::Horizon(format!(
            "only {points} composed windows fit below the continuous horizon {have:.3}; \
             the liminf proxy needs at least 8"
        )));
    }
    let composed = GrowthMap::tabulated(samples)?;
    let t_max = points as f64 * t_step;
    let continuous_density =
        lower_f_density(&continuous.hit_region()?, &composed, t_max, t_step)?;

    let half = 0.5 * continuous.step;
    let t_first = continuous.times[0];
    let mut matched = 0usize;
    let mut unmatched = 0usize;
    let mut beyond_horizon = 0usize;
    for &i in &hit_indices {
        let t_d = t0 * i as f64;
        if t_d > have + 1e-9 {
            beyond_horizon += 1;
            continue;
        }
        let j = ((t_d - t_first) / continuous.step).round() as i64;
        let found = (j - 1..=j + 1).any(|k| {
            k >= 0
                && (k as usize) < continuous.times.len()
                && continuous.hits[k as usize]
                && (continuous.times[k as usize] - t_d).abs() <= half + 1e-9
        });
        if found {
            matched += 1;
        } else {
            unmatched += 1;
        }
    }

    let consistent = vacuous || !(discrete.value > 0.0) || continuous_density.value > 0.0;
    Ok(TransferReport {
        discrete,
        continuous: continuous_density,
        dilation: half,
        matched,
        unmatched,
        beyond_horizon,
        vacuous,
        consistent,
    })
}
