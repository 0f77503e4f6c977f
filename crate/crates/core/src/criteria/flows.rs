//! Conditions transported along a semiflow: images of a compact set are
//! tracked through the flow, their pairwise overlaps are counted as the
//! precondition, and the weight mass carried onto (or pulled back from)
//! those images forms the series and sup conditions.

use super::series::sup_ladder;
use super::{
    conjunction, floor_seq, half_step_defect, integrate_region, region_step, scalar_tail_profile,
    ConditionReport, CriterionReport, SeriesBudget, TimeSpec,
};
use crate::dynamics::{mars_grid_search, MarsFamily, Pt, Semiflow};
use crate::error::{Error, Result};
use crate::geometry::{Layout, Region};
use crate::growth::GrowthMap;
use crate::proxy::{diverges_by_doubling, CheckVerdict};
use crate::weights::{ExtendedWeight, WeightFn};
use crate::Cx;
use serde::{Deserialize, Serialize};

/// Stored pairs are dropped past this many per level to keep reports small.
const OVERLAP_STORE_LIMIT: usize = 4096;

/// Conservative hull of a compact set: an interval for 1-D flows, a disk
/// for planar ones. Images under the flow are again hulls of this shape;
/// an image whose coordinates overflow f64 has left every representable
/// bounded set and is marked escaped.
#[derive(Debug, Clone, Copy)]
enum Hull {
    Interval { lo: f64, hi: f64 },
    Ball { cx: f64, cy: f64, r: f64 },
    Escaped,
}

fn region_hull(region: &Region, dim: usize) -> Hull {
    if dim == 1 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for c in &region.cells {
            let pad = match region.layout {
                Layout::Uniform1D { step, .. } => 0.5 * step,
                Layout::Polar { .. } => 0.0,
                Layout::Irregular => 0.5 * c.weight,
            };
            lo = lo.min(c.center.re - pad);
            hi = hi.max(c.center.re + pad);
        }
        Hull::Interval { lo, hi }
    } else {
        let mut x0 = f64::INFINITY;
        let mut x1 = f64::NEG_INFINITY;
        let mut y0 = f64::INFINITY;
        let mut y1 = f64::NEG_INFINITY;
        for c in &region.cells {
            x0 = x0.min(c.center.re);
            x1 = x1.max(c.center.re);
            y0 = y0.min(c.center.im);
            y1 = y1.max(c.center.im);
        }
        let cx = 0.5 * (x0 + x1);
        let cy = 0.5 * (y0 + y1);
        let mut r = 0.0_f64;
        for c in &region.cells {
            let d = ((c.center.re - cx).powi(2) + (c.center.im - cy).powi(2)).sqrt();
            r = r.max(d + 0.5 * c.weight.max(0.0).sqrt());
        }
        Hull::Ball { cx, cy, r }
    }
}

/// Image of a hull under the flow at the given gap. Backward-oriented gaps
/// are flipped first; overlap of images is symmetric under that. Planar
/// images use the conformal stretch `sqrt(|det|)` sampled at the center and
/// two boundary points, which covers the catalog flows.
fn image_hull(flow: &Semiflow, gap: Cx, base: &Hull) -> Result<Hull> {
    let g = if gap.re < 0.0 { -gap } else { gap };
    match *base {
        Hull::Interval { lo, hi } => {
            let a = flow.eval(g, [lo, 0.0])[0];
            let b = flow.eval(g, [hi, 0.0])[0];
            if !a.is_finite() || !b.is_finite() {
                return Ok(Hull::Escaped);
            }
            Ok(Hull::Interval { lo: a.min(b), hi: a.max(b) })
        }
        Hull::Ball { cx, cy, r } => {
            let c = flow.eval(g, [cx, cy]);
            let stretch = [[cx, cy], [cx + r, cy], [cx, cy + r]]
                .iter()
                .map(|&p| flow.jac_det(g, p).abs())
                .fold(0.0_f64, f64::max)
                .sqrt();
            if !c[0].is_finite() || !c[1].is_finite() || !stretch.is_finite() {
                return Ok(Hull::Escaped);
            }
            Ok(Hull::Ball { cx: c[0], cy: c[1], r: r * stretch })
        }
        Hull::Escaped => Ok(Hull::Escaped),
    }
}

fn hulls_overlap(a: &Hull, b: &Hull) -> bool {
    const TOL: f64 = 1e-12;
    match (a, b) {
        (Hull::Interval { lo: a0, hi: a1 }, Hull::Interval { lo: b0, hi: b1 }) => {
            *a0 <= b1 + TOL && *b0 <= a1 + TOL
        }
        (Hull::Ball { cx: ax, cy: ay, r: ar }, Hull::Ball { cx: bx, cy: by, r: br }) => {
            ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt() <= ar + br + TOL
        }
        _ => false,
    }
}

fn hull_width(h: &Hull) -> f64 {
    match h {
        Hull::Interval { lo, hi } => hi - lo,
        Hull::Ball { r, .. } => 2.0 * r,
        Hull::Escaped => f64::INFINITY,
    }
}

/// Image-overlap data at one level k.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OverlapCount {
    pub k: u64,
    /// Pairs (both orders) whose forward gap still maps the set onto itself.
    pub forward: usize,
    /// Pairs (both orders) with k ≥ max(n1, n2) overlapping backward too.
    pub backward: usize,
    /// Pairs counted by the conjunction: forward overlap, and backward
    /// overlap whenever the backward indices exist.
    pub joint: usize,
    /// Joint counts at caps n_cap/8, n_cap/4, n_cap/2, n_cap.
    pub counts_by_cap: Vec<usize>,
    pub stabilized: bool,
    /// First offset whose transported image collapses to zero width in
    /// floating point. Pair tests use gap images and stay valid past it;
    /// this is a diagnostic, not a truncation.
    pub saturated_at: Option<u64>,
    /// Counted ordered pairs (n1 < n2) at the full cap; empty when the
    /// level is refuted or the count exceeds the storage limit.
    pub tuples: Vec<[u64; 2]>,
    pub verdict: CheckVerdict,
}

/// Image-overlap counts over a range of levels with a boundedness verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OverlapReport {
    pub n_cap: usize,
    pub k_max: u64,
    pub per_k: Vec<OverlapCount>,
    pub max_count: usize,
    /// Smallest level attaining the maximum count.
    pub argmax_k: u64,
    /// Supported: every level stabilized and the maximum is attained in the
    /// first half of the range. Refuted: some level keeps growing
    /// proportionally to the cap.
    pub verdict: CheckVerdict,
}

fn count_level(
    flow: &Semiflow,
    times: &[Cx],
    base: &Hull,
    k: u64,
    caps: &[usize],
) -> Result<OverlapCount> {
    let k_us = k as usize;
    let cap = *caps.last().unwrap();

    let mut saturated_at = None;
    if hull_width(base) > 0.0 {
        for n in 1..=cap {
            let img = image_hull(flow, times[k_us + n] - times[k_us], base)?;
            if hull_width(&img) <= 0.0 {
                saturated_at = Some(n as u64);
                break;
            }
        }
    }

    let mut forward = 0usize;
    let mut backward = 0usize;
    let mut by_cap = vec![0usize; caps.len()];
    let mut tuples: Vec<[u64; 2]> = Vec::new();
    let mut overflowed = false;

    for n1 in 0..cap {
        for n2 in (n1 + 1)..=cap {
            let img = image_hull(flow, times[k_us + n2] - times[k_us + n1], base)?;
            if !hulls_overlap(&img, base) {
                continue;
            }
            forward += 2;
            let applicable = n2 <= k_us;
            let back_ok = if applicable {
                let img_b = image_hull(flow, times[k_us - n1] - times[k_us - n2], base)?;
                let ok = hulls_overlap(&img_b, base);
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
                if tuples.len() < OVERLAP_STORE_LIMIT {
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
    Ok(OverlapCount {
        k,
        forward,
        backward,
        joint,
        counts_by_cap: by_cap,
        stabilized,
        saturated_at,
        tuples,
        verdict,
    })
}

/// Count overlapping image pairs at every level k in [1, k_max] under a cap
/// ladder n_cap/8, n_cap/4, n_cap/2, n_cap. The set is reduced to its hull;
/// that overcounts at worst, so a bounded result here is trustworthy.
pub fn overlap_counter(
    flow: &Semiflow,
    f: &GrowthMap,
    time: &TimeSpec,
    region: &Region,
    k_max: u64,
    n_cap: usize,
) -> Result<OverlapReport> {
    if k_max == 0 {
        return Err(Error::Argument("overlap counter needs k_max >= 1".into()));
    }
    if n_cap < 8 {
        return Err(Error::Argument("overlap counter needs n_cap >= 8 for the cap ladder".into()));
    }
    if region.is_empty() {
        return Err(Error::Argument("compact set must have cells".into()));
    }
    let caps: Vec<usize> = [8, 4, 2, 1].iter().map(|d| n_cap / d).collect();
    let floors = floor_seq(f, k_max as usize + n_cap)?;
    let times = floors
        .iter()
        .map(|&m| time.time(m))
        .collect::<Result<Vec<Cx>>>()?;
    let base = region_hull(region, flow.dim());

    let mut per_k = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        per_k.push(count_level(flow, &times, &base, k, &caps)?);
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
    Ok(OverlapReport { n_cap, k_max, per_k, max_count, argmax_k, verdict })
}

/// Inputs for the transported-mass and pointwise-sup checkers.
pub struct AthensParams<'a> {
    pub flow: &'a Semiflow,
    /// Weight of the function space; extended by zero off its own domain.
    pub weight: &'a WeightFn,
    /// Integral or uniform family; picks between mass series and sup
    /// ladders.
    pub family: MarsFamily,
    pub f: &'a GrowthMap,
    /// Compact sets, one condition family per set.
    pub regions: &'a [Region],
    /// Levels the window conditions are checked at.
    pub k_values: Vec<u64>,
    pub budget: SeriesBudget,
    /// Budget for the orbit condition when it needs a longer horizon.
    pub tail_budget: Option<SeriesBudget>,
    /// Offset cap for the image-overlap precondition.
    pub overlap_cap: usize,
    /// Tolerance ladder for the uniform family's sup conditions.
    pub epsilons: Vec<f64>,
    /// Sample budget for the transport-bound search; 0 skips that
    /// precondition.
    pub admissibility_budget: usize,
}

impl<'a> AthensParams<'a> {
    fn validate(&self) -> Result<()> {
        if self.regions.is_empty() {
            return Err(Error::Argument("need at least one compact set".into()));
        }
        if self.regions.iter().any(|r| r.is_empty()) {
            return Err(Error::Argument("compact sets must have cells".into()));
        }
        if self.k_values.is_empty() || self.k_values.contains(&0) {
            return Err(Error::Argument("levels must be nonempty and start at k = 1".into()));
        }
        if self.overlap_cap < 8 {
            return Err(Error::Argument("overlap cap must be at least 8".into()));
        }
        if self.family == MarsFamily::C0
            && (self.epsilons.is_empty() || self.epsilons.iter().any(|&e| e <= 0.0))
        {
            return Err(Error::Argument(
                "the uniform family needs a positive tolerance ladder".into(),
            ));
        }
        Ok(())
    }

    fn k_max(&self) -> u64 {
        *self.k_values.iter().max().unwrap()
    }
}

/// Flow-transported conditions. For the integral family, each compact set K
/// carries three series of transported masses ∫_K ρ̃(φ(τ, x)) |det Dφ(τ, x)| dx:
/// backward gaps τ(⌊m_k⌋) − τ(⌊m_{k−n}⌋) summed up to the level, forward
/// gaps τ(⌊m_{k+n}⌋) − τ(⌊m_k⌋) as a series uniform over levels, and orbit
/// times τ(⌊m_n⌋). The uniform family replaces the integrals by sups of the
/// pulled-back weight ρ̃(φ⁻¹(τ, x)) over K for the gap conditions and of
/// ρ(φ(τ, x)) for the orbit condition. Preconditions: a sampled transport
/// bound for the weight and boundedness of the image-overlap counter.
pub fn check_athens(params: &AthensParams, time: TimeSpec) -> Result<CriterionReport> {
    params.validate()?;
    let flow = params.flow;
    let dim = flow.dim();
    let tail_budget = params.tail_budget.clone().unwrap_or_else(|| params.budget.clone());
    let k_span = params.k_max() as usize;
    let n_max = params.budget.n_max;
    let horizon = (k_span + n_max)
        .max(tail_budget.n_max)
        .max(n_max + 2 * k_span)
        .max(k_span + params.overlap_cap);
    let floors = floor_seq(params.f, horizon)?;
    let ext = ExtendedWeight::new(params.weight.clone());

    let mut conditions = Vec::new();

    if params.admissibility_budget > 0 {
        let found = mars_grid_search(flow, params.weight, params.family, params.admissibility_budget)?;
        let cond = match found {
            Some((m, omega)) => {
                let mut c = ConditionReport::new("weight transport bound", CheckVerdict::Supported);
                c.evidence = vec![m, omega];
                c.with_note(format!("sampled bound holds at M = {m}, omega = {omega}"))
            }
            None => ConditionReport::new("weight transport bound", CheckVerdict::Inconclusive)
                .with_note("no (M, omega) pair on the search grid bounds the transported weight"),
        };
        conditions.push(cond);
    }

    {
        let mut verdicts = Vec::new();
        let mut evidence = Vec::new();
        let mut saturated = false;
        for region in params.regions {
            let rep = overlap_counter(flow, params.f, &time, region, params.k_max(), params.overlap_cap)?;
            verdicts.push(rep.verdict);
            evidence.push(rep.max_count as f64);
            evidence.push(rep.argmax_k as f64);
            saturated |= rep.per_k.iter().any(|r| r.saturated_at.is_some());
        }
        let mut cond = ConditionReport::new("image-overlap counter", conjunction(verdicts));
        cond.evidence = evidence;
        if saturated {
            cond = cond.with_note(
                "transported images collapse to machine precision at large gaps; \
                 pair tests use gap images and remain valid",
            );
        }
        conditions.push(cond);
    }

    let gap = |a: f64, b: f64| -> Result<Cx> { Ok(time.time(a)? - time.time(b)?) };

    match params.family {
        MarsFamily::Lp => {
            let transported = |region: &Region, tau: Cx| -> f64 {
                integrate_region(region, |z| {
                    let pt: Pt = [z.re, z.im];
                    let y = flow.eval(tau, pt);
                    if !y[0].is_finite() || !y[1].is_finite() {
                        return f64::NAN;
                    }
                    let mass = ext.eval(&y[..dim]);
                    if mass > 0.0 {
                        mass * flow.jac_det(tau, pt)
                    } else {
                        mass
                    }
                })
            };
            let k0 = params.k_values[0] as usize;

            let mut tails = Vec::new();
            for region in params.regions {
                let profile = scalar_tail_profile(
                    &params.k_values,
                    &params.budget,
                    |k| Some(k as usize),
                    |k, n| {
                        let k = k as usize;
                        Ok(transported(region, gap(floors[k], floors[k - n])?))
                    },
                )?;
                tails.push(profile);
            }
            let mut cond = ConditionReport::from_tails("backward transport", tails);
            cond.quad_step = Some(region_step(&params.regions[0]));
            let tau0 = gap(floors[k0], floors[k0 - 1])?;
            cond.half_step_defect = half_step_defect(&params.regions[0], |z| {
                let pt: Pt = [z.re, z.im];
                let y = flow.eval(tau0, pt);
                let mass = ext.eval(&y[..dim]);
                if mass > 0.0 {
                    mass * flow.jac_det(tau0, pt)
                } else {
                    mass
                }
            });
            conditions.push(cond);

            let mut tails = Vec::new();
            for region in params.regions {
                let profile = scalar_tail_profile(
                    &params.k_values,
                    &params.budget,
                    |_| None,
                    |k, n| {
                        let k = k as usize;
                        Ok(transported(region, gap(floors[k + n], floors[k])?))
                    },
                )?;
                tails.push(profile);
            }
            let mut cond = ConditionReport::from_tails("forward transport", tails);
            cond.quad_step = Some(region_step(&params.regions[0]));
            conditions.push(cond);

            let mut tails = Vec::new();
            for region in params.regions {
                let profile = scalar_tail_profile(&[0], &tail_budget, |_| None, |_, n| {
                    Ok(transported(region, time.time(floors[n])?))
                })?;
                tails.push(profile);
            }
            let cond = ConditionReport::from_tails("orbit transport", tails)
                .with_note("mass carried onto the image: integrand rho(phi) |det Dphi|");
            conditions.push(cond);
        }
        MarsFamily::C0 => {
            let pullback_sup = |region: &Region, tau: Cx| -> Result<f64> {
                let mut worst = 0.0_f64;
                for c in &region.cells {
                    let pt: Pt = [c.center.re, c.center.im];
                    let pre = flow.inverse(tau, pt);
                    if !pre[0].is_finite() || !pre[1].is_finite() {
                        return Err(Error::Data(format!(
                            "flow preimage at gap {tau} is not finite"
                        )));
                    }
                    worst = worst.max(ext.eval(&pre[..dim]));
                }
                Ok(worst)
            };

            let mut sups = Vec::new();
            for region in params.regions {
                let mut s = Vec::with_capacity(n_max);
                for n in 1..=n_max {
                    let mut worst = 0.0_f64;
                    for k in n..=(n + k_span) {
                        worst = worst.max(pullback_sup(region, gap(floors[k], floors[k - n])?)?);
                    }
                    s.push(worst);
                }
                sups.push(sup_ladder(&s, &params.budget, &params.epsilons, params.budget.seed));
            }
            conditions.push(ConditionReport::from_sups("backward point sups", sups));

            let mut sups = Vec::new();
            for region in params.regions {
                let mut s = Vec::with_capacity(n_max);
                for n in 1..=n_max {
                    let mut worst = 0.0_f64;
                    for k in 1..=k_span {
                        worst = worst.max(pullback_sup(region, gap(floors[k + n], floors[k])?)?);
                    }
                    s.push(worst);
                }
                sups.push(sup_ladder(&s, &params.budget, &params.epsilons, params.budget.seed ^ 1));
            }
            conditions.push(ConditionReport::from_sups("forward point sups", sups));

            let mut sups = Vec::new();
            let mut left_domain = 0usize;
            for region in params.regions {
                let mut s = Vec::with_capacity(n_max);
                for n in 1..=n_max {
                    let tau = time.time(floors[n])?;
                    let mut worst = 0.0_f64;
                    for c in &region.cells {
                        let pt: Pt = [c.center.re, c.center.im];
                        let y = flow.eval(tau, pt);
                        // An overflowed image escaped every bounded set; the
                        // point is unobservable here, same as leaving the
                        // domain. NaN coordinates fail `contains` as well.
                        if !params.weight.domain.contains(&y[..dim]) {
                            left_domain += 1;
                            continue;
                        }
                        let w = params.weight.eval(&y[..dim]);
                        if !w.is_finite() {
                            left_domain += 1;
                            continue;
                        }
                        worst = worst.max(w);
                    }
                    s.push(worst);
                }
                sups.push(sup_ladder(&s, &params.budget, &params.epsilons, params.budget.seed ^ 2));
            }
            let mut cond = ConditionReport::from_sups("orbit point sups", sups);
            if left_domain > 0 {
                cond = cond.with_note(format!(
                    "{left_domain} transported points left the weight domain and carry no mass"
                ));
            }
            conditions.push(cond);
        }
    }

    Ok(CriterionReport::new("athens", conditions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ConjMap;
    use crate::geometry::{truncate, Sector};
    use crate::weights::catalog;
    use std::f64::consts::FRAC_PI_4;

    fn unit_budget(n_max: usize, ladder: Vec<usize>) -> SeriesBudget {
        SeriesBudget { n_max, ladder, probes: 16, probe_size: 8, seed: 7 }
    }

    fn logistic_set() -> Region {
        Region::from_intervals_1d(&[(0.2, 0.8)], 0.01, 1.0).unwrap()
    }

    /// Exact transported mass for the logistic flow with the reciprocal
    /// weight on (0, 1): the integrand is e^{−τ}/(x·D(x)) with
    /// D = x + (1−x)e^{−τ}, whose antiderivative is ln(x/D(x)) times 1/β.
    fn logistic_mass(a: f64, b: f64, tau: f64) -> f64 {
        let beta = (-tau).exp();
        let alpha = 1.0 - beta;
        (b * (a * alpha + beta) / (a * (b * alpha + beta))).ln()
    }

    #[test]
    fn logistic_mass_oracle_matches_hand_values() {
        // τ → 0: the mass degenerates to ∫ dx/x = ln(b/a).
        let near = logistic_mass(0.2, 0.8, 1e-12);
        assert!((near - (4.0_f64).ln()).abs() < 1e-9);
        // Large τ: 3.75·e^{−τ} to first order, and below the coarse
        // K-dependent envelope 12·e^{−τ}.
        for tau in [3.0, 5.0, 9.0, 16.0] {
            let m = logistic_mass(0.2, 0.8, tau);
            let e = (-tau).exp();
            assert!(m <= 3.76 * e, "tau {tau}: {m} vs {}", 3.76 * e);
            assert!(m >= 2.5 * e);
            assert!(m <= 12.0 * e);
        }
    }

    #[test]
    fn logistic_with_reciprocal_weight_is_supported() {
        let flow = Semiflow::Logistic;
        let weight = catalog("recip", &[]).unwrap();
        let f = GrowthMap::PolynomialQ { q: 2.0 };
        let regions = vec![logistic_set()];
        let params = AthensParams {
            flow: &flow,
            weight: &weight,
            family: MarsFamily::Lp,
            f: &f,
            regions: &regions,
            k_values: vec![2, 5],
            budget: unit_budget(64, vec![8, 16, 32, 64]),
            tail_budget: None,
            overlap_cap: 32,
            epsilons: vec![],
            admissibility_budget: 1000,
        };
        let report = check_athens(&params, TimeSpec::Ray(Cx::new(1.0, 0.0))).unwrap();
        assert_eq!(report.overall, CheckVerdict::Supported);

        // The sampled transport bound is found on the coarse grid.
        let bound = report.condition("weight transport bound").unwrap();
        assert_eq!(bound.verdict, CheckVerdict::Supported);
        assert!(bound.evidence[0] >= 1.0);

        // No image pair overlaps: consecutive gaps are at least 3 while the
        // set separates from itself past ln 16 ≈ 2.77.
        let overlaps = report.condition("image-overlap counter").unwrap();
        assert_eq!(overlaps.verdict, CheckVerdict::Supported);
        assert_eq!(overlaps.evidence[0], 0.0);
        assert!(overlaps.notes.iter().any(|n| n.contains("collapse")));

        // Forward series first term against the closed form: level 2,
        // offset 1 has gap (3² + 1) − (2² + 1) = 5.
        let fwd = report.condition("forward transport").unwrap();
        let first = fwd.tails[0].rows[0].first_term;
        let exact = logistic_mass(0.2, 0.8, 5.0);
        assert!((first - exact).abs() <= 0.02 * exact, "{first} vs {exact}");

        // Orbit series first term: τ = ⌊m_1⌋ = 2.
        let orbit = report.condition("orbit transport").unwrap();
        let first = orbit.tails[0].rows[0].first_term;
        let exact = logistic_mass(0.2, 0.8, 2.0);
        assert!((first - exact).abs() <= 0.02 * exact, "{first} vs {exact}");

        // Quadrature evidence on the backward series. The recorded step is
        // the measured cell length, which carries the division rounding.
        let back = report.condition("backward transport").unwrap();
        let step = back.quad_step.unwrap();
        assert!((step - 0.01).abs() < 1e-9, "step {step}");
        assert!(back.half_step_defect.unwrap() < 1e-3);
    }

    #[test]
    fn overlap_counter_counts_zero_and_flags_saturation() {
        let flow = Semiflow::Logistic;
        let f = GrowthMap::PolynomialQ { q: 2.0 };
        let region = logistic_set();
        let time = TimeSpec::Ray(Cx::new(1.0, 0.0));
        let rep = overlap_counter(&flow, &f, &time, &region, 12, 32).unwrap();
        assert_eq!(rep.verdict, CheckVerdict::Supported);
        assert_eq!(rep.max_count, 0);
        assert!(rep.per_k.iter().all(|r| r.joint == 0 && r.stabilized));
        // At level 1 the image of [0.195, 0.805] collapses numerically once
        // the gap passes ≈ 37.4; the first such offset is n = 6 (gap 48).
        assert_eq!(rep.per_k[0].saturated_at, Some(6));
    }

    #[test]
    fn slow_schedule_overlaps_forever_and_is_refuted() {
        let flow = Semiflow::Logistic;
        let f = GrowthMap::Affine;
        let region = logistic_set();
        let time = TimeSpec::Ray(Cx::new(1.0, 0.0));
        let rep = overlap_counter(&flow, &f, &time, &region, 6, 64).unwrap();
        // Unit gaps never separate the set from itself (ln 16 > 2), so the
        // count grows with the cap at every level.
        assert_eq!(rep.verdict, CheckVerdict::Refuted);
        assert!(rep.per_k.iter().all(|r| r.verdict == CheckVerdict::Refuted));
        assert!(rep.per_k[0].tuples.is_empty());
        assert!(rep.max_count > 100);
    }

    #[test]
    fn schedule_times_are_resolved_through_the_table() {
        use crate::growth::{Schedule, ScheduleKind};
        let flow = Semiflow::Logistic;
        let f = GrowthMap::PolynomialQ { q: 2.0 };
        let region = logistic_set();
        let schedule = Schedule {
            kind: ScheduleKind::RayMultiples { step: Cx::new(0.5, 0.0) },
            separation: 0.5,
            growth: GrowthMap::PolynomialQ { q: 2.0 },
        };
        let rep =
            overlap_counter(&flow, &f, &TimeSpec::Sched(&schedule), &region, 8, 32).unwrap();
        // Halved gaps keep a few early pairs below the separation threshold
        // but the counts stabilize at small levels.
        assert_eq!(rep.verdict, CheckVerdict::Supported);
        assert_eq!(rep.max_count, 4);
        assert_eq!(rep.argmax_k, 1);
    }

    #[test]
    fn conjugated_shift_transports_mass_exactly() {
        let flow = Semiflow::Conjugated { map: ConjMap::LinearScale { c: 2.0 } };
        let weight = catalog("exp-cone", &[]).unwrap();
        let f = GrowthMap::PolynomialQ { q: 2.0 };
        let set = truncate(Sector::angle(FRAC_PI_4).unwrap(), 2.0, 0.25).unwrap();
        let regions = vec![set.clone()];
        let params = AthensParams {
            flow: &flow,
            weight: &weight,
            family: MarsFamily::Lp,
            f: &f,
            regions: &regions,
            k_values: vec![2, 4],
            budget: unit_budget(24, vec![3, 6, 12, 24]),
            tail_budget: None,
            overlap_cap: 16,
            epsilons: vec![],
            admissibility_budget: 2000,
        };
        let report = check_athens(&params, TimeSpec::Ray(Cx::new(1.0, 0.0))).unwrap();
        assert_eq!(report.overall, CheckVerdict::Supported);

        // The flow is a rigid shift by τ/2, so the transported mass is the
        // plain quadrature of ρ(z + τ/2) with unit Jacobian.
        let oracle = |tau: f64| -> f64 {
            set.cells
                .iter()
                .map(|c| c.weight * (-(c.center.re + 0.5 * tau) + c.center.im.abs()).exp())
                .sum()
        };
        let fwd = report.condition("forward transport").unwrap();
        let first = fwd.tails[0].rows[0].first_term;
        let exact = oracle(5.0);
        assert!((first - exact).abs() <= 1e-12 + 1e-9 * exact, "{first} vs {exact}");
        let orbit = report.condition("orbit transport").unwrap();
        let first = orbit.tails[0].rows[0].first_term;
        let exact = oracle(2.0);
        assert!((first - exact).abs() <= 1e-12 + 1e-9 * exact);
    }

    #[test]
    fn uniform_family_shift_flow_is_supported() {
        let flow = Semiflow::Conjugated { map: ConjMap::LinearScale { c: 2.0 } };
        let weight = catalog("exp-cone", &[]).unwrap();
        let f = GrowthMap::PolynomialQ { q: 2.0 };
        let regions = vec![truncate(Sector::angle(FRAC_PI_4).unwrap(), 2.0, 0.25).unwrap()];
        let params = AthensParams {
            flow: &flow,
            weight: &weight,
            family: MarsFamily::C0,
            f: &f,
            regions: &regions,
            k_values: vec![2],
            budget: unit_budget(32, vec![2, 4, 8, 16]),
            tail_budget: None,
            overlap_cap: 16,
            epsilons: vec![1e-2, 1e-4],
            admissibility_budget: 1000,
        };
        let report = check_athens(&params, TimeSpec::Ray(Cx::new(1.0, 0.0))).unwrap();
        assert_eq!(report.overall, CheckVerdict::Supported);
        let back = report.condition("backward point sups").unwrap();
        assert!(back.sups[0].cutoffs.iter().all(|c| c.is_some()));
        // Orbit sups decay like e^{−τ_n/2}.
        let orbit = report.condition("orbit point sups").unwrap();
        let tails = &orbit.sups[0].tail_sups;
        assert!(tails.last().unwrap() < &1e-4);
    }

    #[test]
    fn uniform_family_contracting_flow_is_refuted() {
        // Pulling [1, 2] back through the dilation flow piles the preimages
        // onto the origin where the weight stays at 1.
        let flow = Semiflow::ExpScale { dim: 1 };
        let weight = catalog("polynomial-s", &[2.0]).unwrap();
        let f = GrowthMap::PolynomialQ { q: 2.0 };
        let regions = vec![Region::from_intervals_1d(&[(1.0, 2.0)], 0.05, 2.0).unwrap()];
        let params = AthensParams {
            flow: &flow,
            weight: &weight,
            family: MarsFamily::C0,
            f: &f,
            regions: &regions,
            k_values: vec![2],
            budget: unit_budget(32, vec![2, 4, 8, 16]),
            tail_budget: None,
            overlap_cap: 16,
            epsilons: vec![1e-2],
            admissibility_budget: 0,
        };
        let report = check_athens(&params, TimeSpec::Ray(Cx::new(1.0, 0.0))).unwrap();
        assert_eq!(report.overall, CheckVerdict::Refuted);
        assert_eq!(
            report.condition("backward point sups").unwrap().verdict,
            CheckVerdict::Refuted
        );
    }

    #[test]
    fn degenerate_arguments_are_rejected() {
        let flow = Semiflow::Logistic;
        let weight = catalog("recip", &[]).unwrap();
        let f = GrowthMap::PolynomialQ { q: 2.0 };
        let regions = vec![logistic_set()];
        let mut params = AthensParams {
            flow: &flow,
            weight: &weight,
            family: MarsFamily::C0,
            f: &f,
            regions: &regions,
            k_values: vec![2],
            budget: unit_budget(16, vec![2, 4, 8, 16]),
            tail_budget: None,
            overlap_cap: 16,
            epsilons: vec![],
            admissibility_budget: 0,
        };
        // Uniform family without tolerances.
        assert!(check_athens(&params, TimeSpec::Ray(Cx::new(1.0, 0.0))).is_err());
        params.epsilons = vec![1e-2];
        params.overlap_cap = 4;
        assert!(check_athens(&params, TimeSpec::Ray(Cx::new(1.0, 0.0))).is_err());
        let empty: Vec<Region> = vec![];
        params.overlap_cap = 16;
        params.regions = &empty;
        assert!(check_athens(&params, TimeSpec::Ray(Cx::new(1.0, 0.0))).is_err());
    }
}
