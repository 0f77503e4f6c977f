//! Series-of-integrals and sup-form conditions for translation semigroups:
//! the backward-window, forward-window, and displaced-weight families, with
//! the close-pair counter as precondition and the schedule-separation check
//! for the discrete-times variant.

use super::{
    conjunction, ext_eval, floor_seq, half_step_defect, integrate_region, probe_subsets,
    region_step, scalar_tail_profile, tuple_counter, ConditionReport, CriterionReport,
    SeriesBudget, SupLadder, TimeSpec,
};
use crate::error::{Error, Result};
use crate::geometry::{Region, Sector};
use crate::growth::{check_modric, GrowthMap};
use crate::proxy::CheckVerdict;
use crate::weights::WeightFn;
use crate::Cx;

/// Inputs shared by the series and sup-form checkers.
pub struct DovParams<'a> {
    /// Weight of the function space; extended by zero off the sector.
    pub weight: &'a WeightFn,
    /// Sector the space lives on.
    pub sector: Sector,
    pub f: &'a GrowthMap,
    /// Integrability exponent of the space; recorded, the conditions
    /// themselves integrate the bare weight.
    pub p: f64,
    /// Compact sets, one series family per set.
    pub regions: &'a [Region],
    /// Levels the window conditions are checked at.
    pub k_values: Vec<u64>,
    pub budget: SeriesBudget,
    /// Budget for the displaced series when it needs a longer horizon than
    /// the window conditions.
    pub tail_budget: Option<SeriesBudget>,
    /// Offset cap for the close-pair precondition.
    pub tuple_cap: usize,
}

impl<'a> DovParams<'a> {
    fn validate(&self) -> Result<()> {
        if self.regions.is_empty() {
            return Err(Error::Argument("need at least one compact set".into()));
        }
        if self.regions.iter().any(|r| r.is_empty()) {
            return Err(Error::Argument("compact sets must have cells".into()));
        }
        if self.k_values.is_empty() {
            return Err(Error::Argument("need at least one level k".into()));
        }
        if self.k_values.contains(&0) {
            return Err(Error::Argument("levels start at k = 1".into()));
        }
        Ok(())
    }

    fn k_max(&self) -> u64 {
        *self.k_values.iter().max().unwrap()
    }

    /// Closeness level for the pair counter: twice the largest point of the
    /// compact sets, measured in units of the time scale.
    fn pair_delta(&self, time: &TimeSpec) -> f64 {
        let reach = self
            .regions
            .iter()
            .flat_map(|r| r.cells.iter())
            .map(|c| 2.0 * c.center.norm())
            .fold(0.0_f64, f64::max);
        let scale = match time {
            TimeSpec::Ray(t0) => t0.norm(),
            TimeSpec::Sched(s) => s.separation,
        };
        if scale > 0.0 {
            (reach / scale).max(1e-6)
        } else {
            1e-6
        }
    }
}

fn preconditions(params: &DovParams, time: &TimeSpec) -> Result<Vec<ConditionReport>> {
    let mut out = Vec::new();
    let delta = params.pair_delta(time);
    let counter = tuple_counter(params.f, params.k_max(), delta, params.tuple_cap)?;
    let mut cond = ConditionReport::new("close-pair counter", counter.verdict);
    cond.evidence = vec![delta, counter.max_count as f64, counter.argmax_k as f64];
    cond = cond.with_note(format!(
        "max close-pair count {} at level {} of {}, delta {:.3}",
        counter.max_count, counter.argmax_k, counter.k_max, delta
    ));
    out.push(cond);

    if let TimeSpec::Sched(schedule) = time {
        let n_max = params.budget.n_max.min(256).max(4);
        let modric = check_modric(schedule, params.f, n_max)?;
        let mut cond = ConditionReport::new("schedule separation growth", modric.verdict);
        cond.evidence = modric.windows.to_vec();
        out.push(cond);
    }
    Ok(out)
}

/// Series-of-integrals conditions: for each compact set K,
/// backward windows Σ_{n≤k} ∫_K ρ̃(x − (τ(⌊m_k⌋) − τ(⌊m_{k−n}⌋))) dx,
/// forward windows Σ_n ∫_K ρ̃(x − (τ(⌊m_{k+n}⌋) − τ(⌊m_k⌋))) dx uniformly
/// over the levels, and the displaced series Σ_n ∫_K ρ(x + τ(⌊m_n⌋)) dx,
/// preceded by the close-pair counter (and the separation check when times
/// come from a schedule).
pub fn check_dov(params: &DovParams, time: TimeSpec) -> Result<CriterionReport> {
    params.validate()?;
    let tail_budget = params.tail_budget.clone().unwrap_or_else(|| params.budget.clone());
    let k_max = params.k_max() as usize;
    let horizon = (k_max + params.budget.n_max).max(tail_budget.n_max);
    let floors = floor_seq(params.f, horizon)?;

    let mut conditions = preconditions(params, &time)?;

    let displaced = |region: &Region, d: Cx, sign: f64| -> f64 {
        integrate_region(region, |x| ext_eval(params.weight, &params.sector, x + d * sign))
    };

    // Backward windows: finite sums up to the level.
    let mut tails = Vec::new();
    for region in params.regions {
        let profile = scalar_tail_profile(
            &params.k_values,
            &params.budget,
            |k| Some(k as usize),
            |k, n| {
                let k = k as usize;
                let d = time.time(floors[k])? - time.time(floors[k - n])?;
                Ok(displaced(region, d, -1.0))
            },
        )?;
        tails.push(profile);
    }
    let mut cond = ConditionReport::from_tails("backward series", tails);
    cond.quad_step = Some(region_step(&params.regions[0]));
    let k0 = params.k_values[0] as usize;
    let d0 = time.time(floors[k0])? - time.time(floors[k0 - 1])?;
    cond.half_step_defect = half_step_defect(&params.regions[0], |x| {
        ext_eval(params.weight, &params.sector, x - d0)
    });
    conditions.push(cond);

    // Forward windows: series uniform over the levels.
    let mut tails = Vec::new();
    for region in params.regions {
        let profile = scalar_tail_profile(
            &params.k_values,
            &params.budget,
            |_| None,
            |k, n| {
                let k = k as usize;
                let d = time.time(floors[k + n])? - time.time(floors[k])?;
                Ok(displaced(region, d, -1.0))
            },
        )?;
        tails.push(profile);
    }
    let mut cond = ConditionReport::from_tails("forward series", tails);
    cond.quad_step = Some(region_step(&params.regions[0]));
    let d0 = time.time(floors[k0 + 1])? - time.time(floors[k0])?;
    cond.half_step_defect = half_step_defect(&params.regions[0], |x| {
        ext_eval(params.weight, &params.sector, x - d0)
    });
    conditions.push(cond);

    // Displaced series: one series per compact set.
    let mut tails = Vec::new();
    for region in params.regions {
        let profile = scalar_tail_profile(&[0], &tail_budget, |_| None, |_, n| {
            let d = time.time(floors[n])?;
            Ok(displaced(region, d, 1.0))
        })?;
        tails.push(profile);
    }
    let mut cond = ConditionReport::from_tails("displaced series", tails);
    cond.quad_step = Some(region_step(&params.regions[0]));
    let d1 = time.time(floors[1])?;
    cond.half_step_defect = half_step_defect(&params.regions[0], |x| {
        ext_eval(params.weight, &params.sector, x + d1)
    });
    cond = cond.with_note(format!("space exponent p = {}", params.p));
    conditions.push(cond);

    Ok(CriterionReport::new("dov", conditions))
}

/// Sup ladder over per-offset sups `s_n`, n starting at 1.
pub(super) fn sup_ladder(s: &[f64], budget: &SeriesBudget, epsilons: &[f64], seed: u64) -> SupLadder {
    // Rungs at or past the horizon have an empty tail window and carry no
    // evidence either way; drop them instead of reporting a vacuous sup.
    let rungs: Vec<usize> = budget.ladder.iter().copied().filter(|&r| r < s.len()).collect();
    if rungs.is_empty() {
        return SupLadder {
            epsilons: epsilons.to_vec(),
            cutoffs: vec![None; epsilons.len()],
            tail_sups: Vec::new(),
            probe_max: 0.0,
            probe_count: 0,
            verdict: CheckVerdict::Inconclusive,
        };
    }
    let tail_sups: Vec<f64> = rungs
        .iter()
        .map(|&rung| s.iter().skip(rung).copied().fold(0.0_f64, f64::max))
        .collect();
    let cutoffs: Vec<Option<usize>> = epsilons
        .iter()
        .map(|&eps| {
            rungs
                .iter()
                .zip(&tail_sups)
                .find(|(_, &t)| t < eps)
                .map(|(&rung, _)| rung)
        })
        .collect();
    let last_rung = *rungs.last().unwrap();
    let subsets = probe_subsets(last_rung + 1, s.len(), budget.probes, budget.probe_size, seed);
    let probe_count = subsets.len();
    let probe_max = subsets
        .iter()
        .flat_map(|f| f.iter().map(|&n| s[n - 1]))
        .fold(0.0_f64, f64::max);
    let eps_max = epsilons.iter().copied().fold(0.0_f64, f64::max);
    let verdict = if cutoffs.iter().all(|c| c.is_some()) {
        CheckVerdict::Supported
    } else if tail_sups.last().unwrap() >= &eps_max
        && tail_sups.last().unwrap() >= &(0.99 * tail_sups[0])
    {
        CheckVerdict::Refuted
    } else {
        CheckVerdict::Inconclusive
    };
    SupLadder {
        epsilons: epsilons.to_vec(),
        cutoffs,
        tail_sups,
        probe_max,
        probe_count,
        verdict,
    }
}

/// Sup-form conditions: instead of sums of integrals, the displaced weight
/// sups over K must drop below every tolerance in `epsilons` past some
/// rung, uniformly over levels; random finite index subsets probe the tail.
pub fn check_dovs(params: &DovParams, time: TimeSpec, epsilons: &[f64]) -> Result<CriterionReport> {
    params.validate()?;
    if epsilons.is_empty() || epsilons.iter().any(|&e| e <= 0.0) {
        return Err(Error::Argument("tolerance ladder must be positive".into()));
    }
    params.budget.validate()?;
    let k_span = params.k_max() as usize;
    let n_max = params.budget.n_max;
    let floors = floor_seq(params.f, n_max + 2 * k_span)?;

    let mut conditions = preconditions(params, &time)?;

    let sup_over = |region: &Region, d: Cx, sign: f64| -> f64 {
        region
            .cells
            .iter()
            .map(|c| ext_eval(params.weight, &params.sector, c.center + d * sign))
            .fold(0.0_f64, f64::max)
    };

    // Backward sups: for each offset n, the worst level k ≥ n in reach.
    let mut sups = Vec::new();
    for region in params.regions {
        let mut s = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            let mut worst = 0.0_f64;
            for k in n..=(n + k_span) {
                let d = time.time(floors[k])? - time.time(floors[k - n])?;
                worst = worst.max(sup_over(region, d, -1.0));
            }
            s.push(worst);
        }
        sups.push(sup_ladder(&s, &params.budget, epsilons, params.budget.seed));
    }
    conditions.push(ConditionReport::from_sups("backward sups", sups));

    // Forward sups: worst level in the sampled window.
    let mut sups = Vec::new();
    for region in params.regions {
        let mut s = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            let mut worst = 0.0_f64;
            for k in 1..=k_span {
                let d = time.time(floors[k + n])? - time.time(floors[k])?;
                worst = worst.max(sup_over(region, d, -1.0));
            }
            s.push(worst);
        }
        sups.push(sup_ladder(&s, &params.budget, epsilons, params.budget.seed ^ 1));
    }
    conditions.push(ConditionReport::from_sups("forward sups", sups));

    // Displaced sups.
    let mut sups = Vec::new();
    for region in params.regions {
        let mut s = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            let d = time.time(floors[n])?;
            s.push(sup_over(region, d, 1.0));
        }
        sups.push(sup_ladder(&s, &params.budget, epsilons, params.budget.seed ^ 2));
    }
    let cond = ConditionReport::from_sups("displaced sups", sups)
        .with_note(format!("space exponent p = {}", params.p));
    conditions.push(cond);

    let overall = conjunction(conditions.iter().map(|c| c.verdict));
    let mut report = CriterionReport::new("dovs", conditions);
    report.overall = overall;
    Ok(report)
}
