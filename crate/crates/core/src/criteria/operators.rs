//! Operator-level recurrence conditions: composite forward/backward sums on
//! probe vectors, the unit-interval window integrals, and the identity
//! defect of the forward/backward pairing.

use super::{
    conjunction, floor_seq, vector_tail_profile, ConditionReport, CriterionReport, SeriesBudget,
    TimeSpec,
};
use crate::error::{Error, Result};
use crate::funcspace::GridFunction;
use crate::growth::GrowthMap;
use crate::proxy::CheckVerdict;
use crate::Cx;
use serde::{Deserialize, Serialize};

/// Forward and backward operator families, applied at absolute times.
pub struct OperatorMap<'a> {
    /// The semigroup operator at the given time.
    pub forward: &'a dyn Fn(Cx, &GridFunction) -> Result<GridFunction>,
    /// The backward (right inverse) map at the given time.
    pub backward: &'a dyn Fn(Cx, &GridFunction) -> Result<GridFunction>,
}

/// Budgets for the composite checks.
#[derive(Debug, Clone)]
pub struct OmaParams {
    /// Levels the window conditions are checked at.
    pub k_values: Vec<u64>,
    pub budget: SeriesBudget,
    /// Budget for the backward-orbit series when it needs a longer horizon.
    pub tail_budget: Option<SeriesBudget>,
    /// Indices where the identity defect is sampled.
    pub defect_ladder: Vec<u64>,
}

impl OmaParams {
    fn validate(&self) -> Result<()> {
        if self.k_values.is_empty() || self.k_values.contains(&0) {
            return Err(Error::Argument("levels must be nonempty and start at k = 1".into()));
        }
        if self.defect_ladder.is_empty() {
            return Err(Error::Argument("defect ladder must be nonempty".into()));
        }
        Ok(())
    }
}

fn require_probes(probes: &[GridFunction]) -> Result<()> {
    if probes.len() < 3 {
        return Err(Error::Argument(format!(
            "need at least 3 probe vectors, got {}",
            probes.len()
        )));
    }
    Ok(())
}

/// Composite-sum conditions on probe vectors: backward-window composites
/// Σ_{n≤k} T(τ(⌊m_k⌋)) S_{⌊m_{k−n}⌋} y, forward-window composites
/// Σ_n T(τ(⌊m_k⌋)) S_{⌊m_{k+n}⌋} y uniformly over levels, the backward
/// orbit Σ_n S_{⌊m_n⌋} y, and the identity defect
/// ‖T(τ(⌊m_n⌋)) S_{⌊m_n⌋} y − y‖ along a sample ladder.
pub fn check_oma(
    ops: &OperatorMap,
    f: &GrowthMap,
    time: TimeSpec,
    probes: &[GridFunction],
    params: &OmaParams,
) -> Result<CriterionReport> {
    params.validate()?;
    require_probes(probes)?;
    let tail_budget = params.tail_budget.clone().unwrap_or_else(|| params.budget.clone());
    let k_max = *params.k_values.iter().max().unwrap() as usize;
    let defect_max = *params.defect_ladder.iter().max().unwrap() as usize;
    let horizon = (k_max + params.budget.n_max)
        .max(tail_budget.n_max)
        .max(defect_max);
    let floors = floor_seq(f, horizon)?;

    let mut conditions = Vec::new();

    // Backward-window composites: finite sums up to the level.
    let mut tails = Vec::new();
    for y in probes {
        let zero = GridFunction::zeros(y.tag.clone(), y.grid.clone());
        let profile = vector_tail_profile(
            &params.k_values,
            &params.budget,
            &zero,
            |k| Some(k as usize),
            |k, n| {
                let k = k as usize;
                let back = (ops.backward)(time.time(floors[k - n])?, y)?;
                (ops.forward)(time.time(floors[k])?, &back)
            },
        )?;
        tails.push(profile);
    }
    conditions.push(ConditionReport::from_tails("backward composites", tails));

    // Forward-window composites: series uniform over levels.
    let mut tails = Vec::new();
    for y in probes {
        let zero = GridFunction::zeros(y.tag.clone(), y.grid.clone());
        let profile = vector_tail_profile(
            &params.k_values,
            &params.budget,
            &zero,
            |_| None,
            |k, n| {
                let k = k as usize;
                let back = (ops.backward)(time.time(floors[k + n])?, y)?;
                (ops.forward)(time.time(floors[k])?, &back)
            },
        )?;
        tails.push(profile);
    }
    conditions.push(ConditionReport::from_tails("forward composites", tails));

    // Backward orbit.
    let mut tails = Vec::new();
    for y in probes {
        let zero = GridFunction::zeros(y.tag.clone(), y.grid.clone());
        let profile = vector_tail_profile(&[0], &tail_budget, &zero, |_| None, |_, n| {
            (ops.backward)(time.time(floors[n])?, y)
        })?;
        tails.push(profile);
    }
    conditions.push(ConditionReport::from_tails("backward orbit", tails));

    // Identity defect along the sample ladder.
    let mut evidence = Vec::new();
    let mut verdicts = Vec::new();
    for y in probes {
        let tol = y.quad_tolerance().max(1e-12);
        let mut worst = 0.0_f64;
        for &n in &params.defect_ladder {
            let t = time.time(floors[n as usize])?;
            let roundtrip = (ops.forward)(t, &(ops.backward)(t, y)?)?;
            let defect = roundtrip.sub(y)?.norm()?;
            evidence.push(defect);
            worst = worst.max(defect);
        }
        verdicts.push(if worst <= tol {
            CheckVerdict::Supported
        } else {
            CheckVerdict::Inconclusive
        });
    }
    let mut cond = ConditionReport::new("identity defect", conjunction(verdicts));
    cond.evidence = evidence;
    cond = cond.with_note("defects are measured against each probe's interpolation tolerance");
    conditions.push(cond);

    Ok(CriterionReport::new("oma", conditions))
}

/// The two unit-length windows attached to a level and an offset: the
/// forward window [⌊m_{k+n}⌋−⌊m_k⌋−1, ⌊m_{k+n}⌋−⌊m_k⌋] and the backward
/// window [⌊m_k⌋−⌊m_{k−n}⌋, ⌊m_k⌋−⌊m_{k−n}⌋+1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FfhcIntervals {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

pub fn check_ffhc_intervals(f: &GrowthMap, k: u64, n: u64) -> Result<FfhcIntervals> {
    if k == 0 || n == 0 {
        return Err(Error::Argument("window indices start at 1".into()));
    }
    if k < n {
        return Err(Error::Argument(format!(
            "the backward window needs k ≥ n, got k = {k}, n = {n}"
        )));
    }
    let floors = floor_seq(f, (k + n) as usize)?;
    let fwd = floors[(k + n) as usize] - floors[k as usize];
    let back = floors[k as usize] - floors[(k - n) as usize];
    Ok(FfhcIntervals {
        a: [fwd - 1.0, fwd],
        b: [back, back + 1.0],
    })
}

/// Midpoint quadrature of t ↦ op(t·t0, y) over [lo, hi].
fn window_integral(
    op: &dyn Fn(Cx, &GridFunction) -> Result<GridFunction>,
    t0: Cx,
    y: &GridFunction,
    lo: f64,
    hi: f64,
    step: f64,
) -> Result<GridFunction> {
    let len = hi - lo;
    let nodes = ((len / step).round() as usize).max(1);
    let h = len / nodes as f64;
    let mut acc = GridFunction::zeros(y.tag.clone(), y.grid.clone());
    for j in 0..nodes {
        let t = lo + (j as f64 + 0.5) * h;
        acc.add_scaled(&op(t0 * t, y)?, h)?;
    }
    Ok(acc)
}

/// Interval-integral conditions: the forward/backward identity on probes at
/// a few ray times, finite sums of forward-operator integrals over shifted
/// backward windows, and series of backward-map integrals over forward
/// windows, all by midpoint quadrature with a recorded half-step defect.
pub fn check_ffhc(
    ops: &OperatorMap,
    f: &GrowthMap,
    t0: Cx,
    probes: &[GridFunction],
    quad_step: f64,
    params: &OmaParams,
) -> Result<CriterionReport> {
    params.validate()?;
    require_probes(probes)?;
    if quad_step <= 0.0 || quad_step > 1.0 {
        return Err(Error::Argument("quadrature step must lie in (0, 1]".into()));
    }
    let k_max = *params.k_values.iter().max().unwrap() as usize;
    let horizon = k_max + params.budget.n_max;
    let floors = floor_seq(f, horizon)?;

    let mut conditions = Vec::new();

    // Identity on probes at a few ray times.
    let mut evidence = Vec::new();
    let mut verdicts = Vec::new();
    for y in probes {
        let tol = y.quad_tolerance().max(1e-12);
        let mut worst = 0.0_f64;
        for scale in [1.0, 2.5, 7.0] {
            let t = t0 * scale;
            let roundtrip = (ops.forward)(t, &(ops.backward)(t, y)?)?;
            let defect = roundtrip.sub(y)?.norm()?;
            evidence.push(defect);
            worst = worst.max(defect);
        }
        verdicts.push(if worst <= tol {
            CheckVerdict::Supported
        } else {
            CheckVerdict::Inconclusive
        });
    }
    let mut cond = ConditionReport::new("identity on probes", conjunction(verdicts));
    cond.evidence = evidence;
    conditions.push(cond);

    // Degenerate growth produces nonpositive forward displacements; the
    // window integrals are then meaningless and the check cannot decide.
    let k0 = params.k_values[0] as usize;
    let degenerate = floors[k0 + 1] - floors[k0] <= 0.0;

    // Forward operator over shifted backward windows: finite sums per level.
    if degenerate {
        conditions.push(
            ConditionReport::new("translate over backward windows", CheckVerdict::Inconclusive)
                .with_note("growth floors are constant; windows collapse"),
        );
    } else {
        let mut tails = Vec::new();
        for y in probes {
            let zero = GridFunction::zeros(y.tag.clone(), y.grid.clone());
            for shift in [0.0, 1.7] {
                let profile = vector_tail_profile(
                    &params.k_values,
                    &params.budget,
                    &zero,
                    |k| Some(k as usize),
                    |k, n| {
                        let k = k as usize;
                        let back = floors[k] - floors[k - n];
                        window_integral(
                            ops.forward,
                            t0,
                            y,
                            shift + back,
                            shift + back + 1.0,
                            quad_step,
                        )
                    },
                )?;
                tails.push(profile);
            }
        }
        let mut cond = ConditionReport::from_tails("translate over backward windows", tails);
        cond.quad_step = Some(quad_step);
        cond = cond.with_note("windows are also checked shifted by 1.7");
        conditions.push(cond);
    }

    // Backward map over forward windows: series per level.
    if degenerate {
        conditions.push(
            ConditionReport::new("inverse over forward windows", CheckVerdict::Inconclusive)
                .with_note(format!(
                    "nonpositive forward displacement at level {k0}; the window [{}, {}] is invalid",
                    floors[k0 + 1] - floors[k0] - 1.0,
                    floors[k0 + 1] - floors[k0]
                )),
        );
    } else {
        let mut tails = Vec::new();
        for y in probes {
            let zero = GridFunction::zeros(y.tag.clone(), y.grid.clone());
            let profile = vector_tail_profile(
                &params.k_values,
                &params.budget,
                &zero,
                |_| None,
                |k, n| {
                    let k = k as usize;
                    let fwd = floors[k + n] - floors[k];
                    window_integral(ops.backward, t0, y, fwd - 1.0, fwd, quad_step)
                },
            )?;
            tails.push(profile);
        }
        let mut cond = ConditionReport::from_tails("inverse over forward windows", tails);
        cond.quad_step = Some(quad_step);
        // Half-step defect on the first window integral.
        let y = &probes[0];
        let fwd = floors[k0 + 1] - floors[k0];
        let coarse = window_integral(ops.backward, t0, y, fwd - 1.0, fwd, quad_step)?;
        let fine = window_integral(ops.backward, t0, y, fwd - 1.0, fwd, quad_step / 2.0)?;
        cond.half_step_defect = Some(coarse.sub(&fine)?.norm()?);
        conditions.push(cond);
    }

    Ok(CriterionReport::new("f-fhc", conditions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{apply, right_inverse_translation, SemigroupOp};
    use crate::funcspace::{grid_for, Bump, SpaceTag};
    use crate::weights::{catalog, Domain};
    use std::sync::Arc;

    fn translation_ops() -> OperatorMap<'static> {
        fn fwd(t: Cx, y: &GridFunction) -> Result<GridFunction> {
            apply(&SemigroupOp::Translation { t }, y)
        }
        fn back(t: Cx, y: &GridFunction) -> Result<GridFunction> {
            right_inverse_translation(t, y)
        }
        OperatorMap { forward: &fwd, backward: &back }
    }

    fn bump_probes(s: f64, extent: f64, resolution: f64) -> Vec<GridFunction> {
        let weight = catalog("polynomial-s", &[s]).unwrap();
        let tag = SpaceTag::lp(1.0, weight).unwrap();
        let grid = Arc::new(
            grid_for(&Domain::Interval { lo: 0.0, hi: extent }, extent, resolution).unwrap(),
        );
        [2.0, 3.0, 5.0]
            .iter()
            .map(|&c| {
                Bump::new(Cx::new(c, 0.0), 1.0, 1.0)
                    .unwrap()
                    .to_grid(tag.clone(), grid.clone())
            })
            .collect()
    }

    fn quadratic_params() -> OmaParams {
        OmaParams {
            k_values: vec![4, 8],
            budget: SeriesBudget {
                n_max: 24,
                ladder: vec![2, 4, 8, 16],
                probes: 32,
                probe_size: 8,
                seed: 7,
            },
            tail_budget: None,
            defect_ladder: vec![1, 2, 4, 8],
        }
    }

    #[test]
    fn translation_with_fast_decay_weight_is_supported() {
        let probes = bump_probes(2.0, 1040.0, 0.05);
        let ops = translation_ops();
        let f = GrowthMap::PolynomialQ { q: 2.0 };
        let report = check_oma(
            &ops,
            &f,
            TimeSpec::Ray(Cx::new(1.0, 0.0)),
            &probes,
            &quadratic_params(),
        )
        .unwrap();
        assert_eq!(report.overall, CheckVerdict::Supported);
        // The backward orbit decays like the fourth power of the offset.
        let orbit = report.condition("backward orbit").unwrap();
        let row = &orbit.tails[0].rows[0];
        assert!(row.sup_tails.last().unwrap() < &(0.01 * row.first_term));
        // Exact right inverse: the roundtrip defect is interpolation noise.
        let defect = report.condition("identity defect").unwrap();
        assert!(defect.evidence.iter().all(|d| *d < 0.5));
    }

    #[test]
    fn translation_with_slow_decay_weight_is_refuted_on_the_backward_orbit() {
        let probes = bump_probes(1.0, 1035.0, 0.1);
        let ops = translation_ops();
        let f = GrowthMap::Affine;
        let mut params = quadratic_params();
        params.k_values = vec![2, 4];
        params.budget = SeriesBudget {
            n_max: 12,
            ladder: vec![1, 2, 4, 8],
            probes: 8,
            probe_size: 4,
            seed: 7,
        };
        params.tail_budget = Some(SeriesBudget {
            n_max: 1024,
            ladder: vec![128, 256, 512, 1024],
            probes: 8,
            probe_size: 4,
            seed: 7,
        });
        let report = check_oma(
            &ops,
            &f,
            TimeSpec::Ray(Cx::new(1.0, 0.0)),
            &probes,
            &params,
        )
        .unwrap();
        assert_eq!(report.overall, CheckVerdict::Refuted);
        assert_eq!(
            report.condition("backward orbit").unwrap().verdict,
            CheckVerdict::Refuted
        );
    }

    #[test]
    fn too_few_probes_are_rejected() {
        let probes = bump_probes(2.0, 100.0, 0.1);
        let ops = translation_ops();
        let f = GrowthMap::PolynomialQ { q: 2.0 };
        let err = check_oma(
            &ops,
            &f,
            TimeSpec::Ray(Cx::new(1.0, 0.0)),
            &probes[..2],
            &quadratic_params(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn window_formulas_match_direct_substitution() {
        // Affine: floors are 1, 2, 3, ...; level 3, offset 2.
        let f = GrowthMap::Affine;
        let w = check_ffhc_intervals(&f, 3, 2).unwrap();
        assert_eq!(w.a, [1.0, 2.0]);
        assert_eq!(w.b, [2.0, 3.0]);
        // Quadratic: floors 1, 2, 5, 10; level 2, offset 1.
        let f = GrowthMap::PolynomialQ { q: 2.0 };
        let w = check_ffhc_intervals(&f, 2, 1).unwrap();
        assert_eq!(w.a, [4.0, 5.0]);
        assert_eq!(w.b, [3.0, 4.0]);
        // Boundary level equals offset.
        let w = check_ffhc_intervals(&f, 2, 2).unwrap();
        assert_eq!(w.b, [4.0, 5.0]);
        assert!(check_ffhc_intervals(&f, 1, 2).is_err());
        assert!(check_ffhc_intervals(&f, 0, 1).is_err());
    }

    #[test]
    fn window_integrals_are_supported_for_fast_decay() {
        // The deepest forward window sits at floor(16) - floor(4) = 240, and
        // the inverse translation needs the support to fit after the shift.
        // Weight decay t^{-3} keeps the four-term probe sums past the last
        // rung under a percent of the leading window.
        let probes = bump_probes(3.0, 250.0, 0.05);
        let ops = translation_ops();
        let f = GrowthMap::PolynomialQ { q: 2.0 };
        let mut params = quadratic_params();
        params.k_values = vec![2, 4];
        params.budget = SeriesBudget {
            n_max: 12,
            ladder: vec![1, 2, 4, 8],
            probes: 8,
            probe_size: 4,
            seed: 7,
        };
        let report = check_ffhc(
            &ops,
            &f,
            Cx::new(1.0, 0.0),
            &probes,
            0.25,
            &params,
        )
        .unwrap();
        assert_eq!(report.overall, CheckVerdict::Supported);
        let windows = report.condition("inverse over forward windows").unwrap();
        assert_eq!(windows.quad_step, Some(0.25));
        // Refining the quadrature step changes the reference integral a
        // little, and the defect is on record.
        assert!(windows.half_step_defect.unwrap() < 0.05);
    }

    #[test]
    fn constant_growth_flags_degenerate_windows() {
        let probes = bump_probes(2.0, 110.0, 0.1);
        let ops = translation_ops();
        let f = GrowthMap::Tabulated {
            samples: vec![(0.0, 5.0), (1.0, 5.0)],
        };
        let mut params = quadratic_params();
        params.k_values = vec![2, 4];
        params.budget = SeriesBudget {
            n_max: 12,
            ladder: vec![1, 2, 4, 8],
            probes: 8,
            probe_size: 4,
            seed: 7,
        };
        let report = check_ffhc(&ops, &f, Cx::new(1.0, 0.0), &probes, 0.25, &params).unwrap();
        assert_eq!(report.overall, CheckVerdict::Inconclusive);
        let flagged = report.condition("inverse over forward windows").unwrap();
        assert_eq!(flagged.verdict, CheckVerdict::Inconclusive);
        assert!(flagged.notes[0].contains("nonpositive"));
    }
}
