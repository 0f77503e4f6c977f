//! Drives one named criterion from an [`ExperimentConfig`] and folds the
//! outcome into a [`RunReport`].

use sectorlab::criteria::{
    check_athens, check_backspace, check_dov, check_dovs, check_ffhc, check_nasser_tube,
    check_oma, check_qwea, AthensParams, BackspaceParams, CriterionReport, DovParams, OmaParams,
    OperatorMap, TimeSpec,
};
use sectorlab::dynamics::{apply, right_inverse_translation, MarsFamily, SemigroupOp};
use sectorlab::error::{Error, Result};
use sectorlab::funcspace::GridFunction;
use sectorlab::geometry::Ray;
use sectorlab::report::{ladder_series, RunReport, Series};
use sectorlab::Cx;

use crate::config::{DynamicsConfig, ExperimentConfig};

pub const CRITERIA: [&str; 8] =
    ["dov", "dovs", "oma", "f-fhc", "athens", "backspace", "qwea", "nasser-tube"];

pub(crate) fn translation_ops() -> OperatorMap<'static> {
    fn fwd(t: Cx, y: &GridFunction) -> Result<GridFunction> {
        apply(&SemigroupOp::Translation { t }, y)
    }
    fn back(t: Cx, y: &GridFunction) -> Result<GridFunction> {
        right_inverse_translation(t, y)
    }
    OperatorMap { forward: &fwd, backward: &back }
}

/// Tail-sum and displaced-sup trajectories from a criterion report, for the
/// plot subcommand: one series per condition that carries ladder evidence.
pub(crate) fn criterion_series(report: &CriterionReport) -> Vec<Series> {
    let mut out = Vec::new();
    for cond in &report.conditions {
        if let Some(profile) = cond.tails.first() {
            if let Some(row) = profile.rows.first() {
                out.push(ladder_series(
                    format!("{} {} partial sums", report.id, cond.label),
                    &profile.ladder,
                    &row.partials,
                ));
            }
        }
        if let Some(ladder) = cond.sups.first() {
            let rungs: Vec<usize> = (1..=ladder.tail_sups.len()).collect();
            out.push(ladder_series(
                format!("{} {} displaced sups", report.id, cond.label),
                &rungs,
                &ladder.tail_sups,
            ));
        }
    }
    out
}

fn require_semiflow(cfg: &ExperimentConfig) -> Result<sectorlab::dynamics::Semiflow> {
    cfg.flow()?.ok_or_else(|| {
        Error::Argument("this criterion needs semiflow dynamics in the config".into())
    })
}

fn defect_ladder(n_max: usize) -> Vec<u64> {
    let mut out: Vec<u64> = [1usize, 2, 4, 8]
        .iter()
        .map(|&d| d.min(n_max) as u64)
        .collect();
    out.dedup();
    out
}

/// Runs the named criterion and returns the filled report. The subject line,
/// config echo, and series are all deterministic for a fixed config.
pub fn run_criterion(cfg: &ExperimentConfig, criterion: &str) -> Result<RunReport> {
    cfg.validate()?;
    let config_echo = serde_json::to_value(cfg)?;
    let mut report = RunReport::new(format!("check {criterion}"), cfg.seed, config_echo);

    let crit = match criterion {
        "dov" | "dovs" => {
            let weight = cfg.weight()?;
            let f = cfg.growth()?;
            let regions = cfg.regions_1d()?;
            let params = DovParams {
                weight: &weight,
                sector: cfg.sector()?,
                f: &f,
                p: cfg.space.p,
                regions: &regions,
                k_values: cfg.horizons.k_values.clone(),
                budget: cfg.budget(),
                tail_budget: cfg.tail_budget(),
                tuple_cap: cfg.horizons.tuple_cap,
            };
            let schedule = cfg.schedule()?;
            let time = match &schedule {
                Some(s) => TimeSpec::Sched(s),
                None => TimeSpec::Ray(cfg.ray_time()?),
            };
            if criterion == "dov" {
                check_dov(&params, time)?
            } else {
                check_dovs(&params, time, &cfg.horizons.epsilons)?
            }
        }
        "oma" | "f-fhc" => {
            if matches!(cfg.dynamics, DynamicsConfig::Semiflow { .. }) {
                return Err(Error::Argument(
                    "composite checks drive the translation semigroup; use athens for semiflow dynamics"
                        .into(),
                ));
            }
            let ops = translation_ops();
            let f = cfg.growth()?;
            let probes = cfg.probes()?;
            let params = OmaParams {
                k_values: cfg.horizons.k_values.clone(),
                budget: cfg.budget(),
                tail_budget: cfg.tail_budget(),
                defect_ladder: defect_ladder(cfg.horizons.n_max),
            };
            if criterion == "oma" {
                let schedule = cfg.schedule()?;
                let time = match &schedule {
                    Some(s) => TimeSpec::Sched(s),
                    None => TimeSpec::Ray(cfg.ray_time()?),
                };
                check_oma(&ops, &f, time, &probes, &params)?
            } else {
                let quad_step = cfg.space.resolution.min(1.0);
                check_ffhc(&ops, &f, cfg.ray_time()?, &probes, quad_step, &params)?
            }
        }
        "athens" => {
            let flow = require_semiflow(cfg)?;
            let weight = cfg.weight()?;
            let f = cfg.growth()?;
            let regions = cfg.regions_for_flow(&flow)?;
            let family = cfg.family();
            let params = AthensParams {
                flow: &flow,
                weight: &weight,
                family,
                f: &f,
                regions: &regions,
                k_values: cfg.horizons.k_values.clone(),
                budget: cfg.budget(),
                tail_budget: cfg.tail_budget(),
                overlap_cap: cfg.horizons.tuple_cap,
                epsilons: if family == MarsFamily::C0 {
                    cfg.horizons.epsilons.clone()
                } else {
                    Vec::new()
                },
                admissibility_budget: 1000,
            };
            check_athens(&params, TimeSpec::Ray(cfg.ray_time()?))?
        }
        "backspace" => {
            let weight = cfg.weight()?;
            let f = cfg.growth()?;
            let n = cfg.horizons.n_max as u64;
            let mut i_values: Vec<usize> =
                vec![0, cfg.horizons.n_max / 4, cfg.horizons.n_max / 2];
            i_values.dedup();
            i_values.retain(|&i| i + 1 < cfg.horizons.n_max);
            if i_values.is_empty() {
                i_values.push(0);
            }
            let params = BackspaceParams {
                family: cfg.family(),
                weight: &weight,
                angle: cfg.ray_angle(),
                sequence: (1..=n).collect(),
                f: &f,
                eps: cfg.horizons.eps,
                i_values,
                budget: cfg.budget(),
            };
            check_backspace(&params)?
        }
        "qwea" => {
            let weight = cfg.weight()?;
            check_qwea(&weight, cfg.sector()?, &cfg.fan()?, 0.5, cfg.horizons.doublings)?
        }
        "nasser-tube" => {
            let weight = cfg.weight()?;
            let ray = Ray::new(cfg.sector()?, cfg.ray_angle())?;
            let nasser =
                check_nasser_tube(&weight, &ray, &cfg.ms(), &cfg.caps(), cfg.space.resolution)?;
            for tube in &nasser.tubes {
                report.push_row(
                    "tube",
                    format!("ray {:.4} half-width {}", nasser.ray_angle, tube.m),
                    tube.verdict,
                    format!("mass partials {:?}", tube.partials),
                );
                let rungs: Vec<usize> = (1..=tube.partials.len()).collect();
                report.series.push(ladder_series(
                    format!("tube mass half-width {}", tube.m),
                    &rungs,
                    &tube.partials,
                ));
            }
            report.evidence.as_object_mut().expect("evidence starts as an object").insert(
                "nasser-tube".into(),
                serde_json::to_value(&nasser)?,
            );
            return Ok(report);
        }
        other => {
            return Err(Error::UnknownName(format!(
                "criterion {other}; expected one of {}",
                CRITERIA.join(", ")
            )))
        }
    };

    report.add_criterion(criterion, &crit)?;
    report.series.extend(criterion_series(&crit));
    Ok(report)
}
