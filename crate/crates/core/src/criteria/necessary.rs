//! Necessary-side checks: weight mass in tubes around rays, tail smallness
//! along a candidate index sequence, and radial decay across a fan of rays.
//! These run in the refuting direction: a failure here rules the dynamics
//! out, while support only keeps the door open.

use super::{
    conjunction, ext_eval, integrate_region, ConditionReport, CriterionReport, SeriesBudget,
    TailProfile, TailRow,
};
use crate::densities::{lower_mn_density, IndexSet, POSITIVE_THRESHOLD};
use crate::dynamics::MarsFamily;
use crate::error::{Error, Result};
use crate::geometry::{tube_region, Ray, Sector};
use crate::growth::{m_seq, GrowthMap};
use crate::proxy::{diverges_by_doubling, increments_decay, liminf_proxy, CheckVerdict, TrendVerdict};
use crate::weights::WeightFn;
use crate::Cx;
use serde::{Deserialize, Serialize};

/// Mass of the weight in one tube, recorded along a cap ladder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TubeReport {
    /// Tube half-width.
    pub m: f64,
    /// Integral up to each cap.
    pub partials: Vec<f64>,
    /// Supported: the increments decay (the mass converges). Refuted: the
    /// increments keep pace with the doubling caps.
    pub verdict: CheckVerdict,
}

/// Tube masses around one ray for a ladder of widths.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NasserReport {
    pub ray_angle: f64,
    pub tubes: Vec<TubeReport>,
    /// Conjunction over the widths: one divergent tube refutes the ray.
    pub verdict: CheckVerdict,
}

/// Integrate the weight over tubes of each half-width in `ms` around the
/// ray, truncated at every cap in `caps`. Finite mass at every width backs
/// the chaos route along this ray; mass growing linearly with the cap rules
/// it out.
pub fn check_nasser_tube(
    weight: &WeightFn,
    ray: &Ray,
    ms: &[f64],
    caps: &[f64],
    resolution: f64,
) -> Result<NasserReport> {
    if ms.is_empty() || ms.iter().any(|&m| m <= 0.0 || !m.is_finite()) {
        return Err(Error::Argument("tube widths must be positive and finite".into()));
    }
    if caps.len() < 3 {
        return Err(Error::Argument("need at least three caps to judge a trend".into()));
    }
    if caps.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument("caps must be strictly ascending".into()));
    }
    let mut tubes = Vec::with_capacity(ms.len());
    for &m in ms {
        let mut partials = Vec::with_capacity(caps.len());
        for &cap in caps {
            let region = tube_region(ray, m, cap, resolution)?;
            partials.push(integrate_region(&region, |z| ext_eval(weight, &ray.sector, z)));
        }
        if partials.iter().any(|p| !p.is_finite()) {
            return Err(Error::Data(format!("tube mass at width {m} is not finite")));
        }
        let verdict = if diverges_by_doubling(&partials) {
            CheckVerdict::Refuted
        } else if increments_decay(&partials) {
            CheckVerdict::Supported
        } else {
            CheckVerdict::Inconclusive
        };
        tubes.push(TubeReport { m, partials, verdict });
    }
    let verdict = conjunction(tubes.iter().map(|t| t.verdict));
    Ok(NasserReport { ray_angle: ray.angle, tubes, verdict })
}

/// Inputs for the candidate-sequence tail check.
pub struct BackspaceParams<'a> {
    /// Integral or uniform family: sums of displaced weights versus sups.
    pub family: MarsFamily,
    pub weight: &'a WeightFn,
    /// Direction the displacements move along.
    pub angle: f64,
    /// Candidate subsequence n_1 < n_2 < ...; the check needs it strictly
    /// increasing.
    pub sequence: Vec<u64>,
    /// Window sequence the density precondition counts against.
    pub f: &'a GrowthMap,
    /// Tail budget the tails must stay below.
    pub eps: f64,
    /// Starting positions i (0-based into the sequence) the tails are
    /// anchored at.
    pub i_values: Vec<usize>,
    pub budget: SeriesBudget,
}

impl<'a> BackspaceParams<'a> {
    fn validate(&self) -> Result<()> {
        if self.sequence.len() < 2 {
            return Err(Error::Argument("candidate sequence needs at least two entries".into()));
        }
        if self.sequence.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Argument("candidate sequence must be strictly increasing".into()));
        }
        if self.eps <= 0.0 || !self.eps.is_finite() {
            return Err(Error::Argument("tail budget eps must be positive and finite".into()));
        }
        if self.i_values.is_empty() {
            return Err(Error::Argument("need at least one starting position".into()));
        }
        if self.i_values.iter().any(|&i| i + 1 >= self.sequence.len()) {
            return Err(Error::Argument(
                "starting positions must leave at least one later sequence entry".into(),
            ));
        }
        Ok(())
    }
}

/// Tail check along a candidate sequence: the displaced weights
/// ρ((n_{i+j} − n_i)·e^{iθ}) summed (integral family) or sup-ed (uniform
/// family) over j must stay below eps for every anchor i, the sequence must
/// keep positive lower density against the window sequence, and the weight
/// must stay bounded along the direction itself.
pub fn check_backspace(params: &BackspaceParams) -> Result<CriterionReport> {
    params.validate()?;
    params.budget.validate()?;
    let dir = Cx::from_polar(1.0, params.angle);
    let seq = &params.sequence;
    let sector = match params.weight.domain {
        crate::weights::Domain::Sector { sector } => sector,
        _ => Sector::half_line(),
    };

    let mut conditions = Vec::new();

    // Density precondition. Windows past the enumerated horizon would censor
    // the counts, so the window index stops where the windows do.
    {
        let horizon = *seq.last().unwrap();
        let set = IndexSet::new(seq.clone(), horizon)?;
        let cap = 512usize;
        let m = m_seq(params.f, cap);
        let mut n_density = 0usize;
        let mut top = 0.0_f64;
        for n in 1..=cap {
            let next = top.max(m[n - 1]);
            if next > horizon as f64 {
                break;
            }
            top = next;
            n_density = n;
        }
        let cond = if n_density < 8 {
            ConditionReport::new("sequence density", CheckVerdict::Inconclusive)
                .with_note("window sequence escapes the enumerated horizon before 8 windows fit")
        } else {
            let d = lower_mn_density(&set, &m[..n_density], n_density)?;
            let verdict = match d.verdict {
                TrendVerdict::Positive | TrendVerdict::Divergent => CheckVerdict::Supported,
                TrendVerdict::ZeroTrend => CheckVerdict::Refuted,
                TrendVerdict::Inconclusive => CheckVerdict::Inconclusive,
            };
            let mut c = ConditionReport::new("sequence density", verdict);
            c.evidence = vec![d.finite_value().unwrap_or(f64::MAX)];
            c
        };
        conditions.push(cond);
    }

    // Anchored tails.
    {
        let term = |i: usize, j: usize| -> f64 {
            let gap = (seq[i + j] - seq[i]) as f64;
            ext_eval(params.weight, &sector, dir * gap)
        };
        let ladder = &params.budget.ladder;
        let mut rows = Vec::with_capacity(params.i_values.len());
        let mut totals = Vec::with_capacity(params.i_values.len());
        for &i in &params.i_values {
            let end = (seq.len() - 1 - i).min(params.budget.n_max);
            let mut partials = vec![0.0; ladder.len()];
            let mut sup_tails = vec![0.0_f64; ladder.len()];
            let mut first_term = 0.0_f64;
            let mut total = 0.0;
            let mut sup = 0.0_f64;
            for j in 1..=end {
                let t = term(i, j);
                if !t.is_finite() || t < 0.0 {
                    return Err(Error::Data(format!("weight term at anchor {i}, offset {j} is {t}")));
                }
                total += t;
                sup = sup.max(t);
                if j <= ladder[0] {
                    first_term = first_term.max(t);
                }
                for (r, &rung) in ladder.iter().enumerate() {
                    if j <= rung {
                        partials[r] = total;
                    } else {
                        sup_tails[r] = sup_tails[r].max(t);
                    }
                }
            }
            let anchored = match params.family {
                MarsFamily::Lp => total,
                MarsFamily::C0 => sup,
            };
            let verdict = if diverges_by_doubling(&partials) || anchored >= params.eps {
                CheckVerdict::Refuted
            } else if end < params.budget.n_max || increments_decay(&partials) {
                CheckVerdict::Supported
            } else {
                CheckVerdict::Inconclusive
            };
            let sum_tails = partials.iter().map(|p| total - p).collect();
            rows.push(TailRow {
                k: i as u64,
                first_term,
                partials,
                sup_tails,
                sum_tails,
                max_probe: 0.0,
                probe_count: 0,
                verdict,
            });
            totals.push(anchored);
        }
        let verdict = conjunction(rows.iter().map(|r| r.verdict));
        let profile = TailProfile {
            ladder: ladder.clone(),
            rows,
            epsilon: params.eps,
            nonincreasing: true,
            totals,
            verdict,
        };
        let label = match params.family {
            MarsFamily::Lp => "anchored tail sums",
            MarsFamily::C0 => "anchored tail sups",
        };
        let mut cond = ConditionReport::new(label, verdict);
        cond.tails = vec![profile];
        conditions.push(cond);
    }

    // Boundedness of the weight along the direction itself.
    {
        let reach = (seq[seq.len() - 1] - seq[0]) as f64;
        let samples = 64usize;
        let values: Vec<f64> = (1..=samples)
            .map(|j| ext_eval(params.weight, &sector, dir * (reach * j as f64 / samples as f64)))
            .collect();
        let proxy = liminf_proxy(&values, POSITIVE_THRESHOLD);
        let verdict = match proxy.verdict {
            TrendVerdict::Divergent => CheckVerdict::Refuted,
            TrendVerdict::Inconclusive => CheckVerdict::Inconclusive,
            _ => CheckVerdict::Supported,
        };
        let mut cond = ConditionReport::new("direction boundedness", verdict);
        cond.evidence = vec![values.iter().copied().fold(0.0_f64, f64::max)];
        conditions.push(cond);
    }

    Ok(CriterionReport::new("backspace", conditions))
}

/// Radial decay across a fan of rays: the weight sampled at doubling radii
/// along each ray must trend to zero. A ray where it stays bounded away
/// from zero, or grows, refutes the decay route.
pub fn check_qwea(
    weight: &WeightFn,
    sector: Sector,
    fan: &[f64],
    r0: f64,
    doublings: usize,
) -> Result<CriterionReport> {
    if fan.is_empty() {
        return Err(Error::Argument("need at least one ray angle".into()));
    }
    if r0 <= 0.0 || !r0.is_finite() {
        return Err(Error::Argument("base radius must be positive and finite".into()));
    }
    if doublings < 8 {
        return Err(Error::Argument("need at least 8 doubling radii for the trend proxy".into()));
    }
    let mut conditions = Vec::with_capacity(fan.len());
    for &phi in fan {
        let ray = Ray::new(sector, phi)?;
        let values: Vec<f64> = (0..doublings)
            .map(|j| {
                let r = r0 * (1u64 << j) as f64;
                ext_eval(weight, &sector, ray.point(r))
            })
            .collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data(format!("weight along ray {phi} overflows")));
        }
        let proxy = liminf_proxy(&values, POSITIVE_THRESHOLD);
        let verdict = match proxy.verdict {
            TrendVerdict::ZeroTrend => CheckVerdict::Supported,
            TrendVerdict::Positive | TrendVerdict::Divergent => CheckVerdict::Refuted,
            TrendVerdict::Inconclusive => CheckVerdict::Inconclusive,
        };
        let mut cond = ConditionReport::new(format!("ray {phi:.4}"), verdict);
        cond.evidence = proxy.windows.to_vec();
        conditions.push(cond);
    }
    Ok(CriterionReport::new("qwea", conditions))
}
