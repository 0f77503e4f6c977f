//! Semigroup operators: translation with its right inverses, composition
//! operators induced by the semiflow catalog, sampled checks of the weighted
//! conjugation inequality, and the commuting-diagram defect.

use crate::error::{Error, Result};
use crate::funcspace::GridFunction;
use crate::geometry::{Layout, Sector};
use crate::proxy::CheckVerdict;
use crate::weights::{Domain, WeightFn};
use crate::Cx;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, PI};

/// Coordinate change `F` used by the conjugated flow `φ(t,x) = F⁻¹(t + F(x))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "kebab-case")]
pub enum ConjMap {
    /// `F(z) = c·z`, `c > 0`.
    LinearScale { c: f64 },
    /// `F(z) = c·z̄`, `c > 0`.
    LinearScaleConj { c: f64 },
    /// `F(z) = z^a e^{iα(1−a)}` on the sector of half-angle α, `a ∈ (0,1)`.
    SectorPower { a: f64, alpha: f64 },
    /// `F(x) = ln(x/(1−x))` on (0,1); conjugates translation to the logistic
    /// flow exactly.
    Logit,
}

impl ConjMap {
    pub fn eval(&self, z: Cx) -> Cx {
        match self {
            ConjMap::LinearScale { c } => z * *c,
            ConjMap::LinearScaleConj { c } => z.conj() * *c,
            ConjMap::SectorPower { a, alpha } => {
                z.powf(*a) * Cx::from_polar(1.0, alpha * (1.0 - a))
            }
            ConjMap::Logit => Cx::new((z.re / (1.0 - z.re)).ln(), 0.0),
        }
    }

    pub fn inverse(&self, w: Cx) -> Cx {
        match self {
            ConjMap::LinearScale { c } => w / *c,
            ConjMap::LinearScaleConj { c } => (w / *c).conj(),
            ConjMap::SectorPower { a, alpha } => {
                (w * Cx::from_polar(1.0, -alpha * (1.0 - a))).powf(1.0 / a)
            }
            ConjMap::Logit => Cx::new(1.0 / (1.0 + (-w.re).exp()), 0.0),
        }
    }

    /// |F′| at z (the conformal stretch factor; modulus is the same for the
    /// conjugated variant).
    fn deriv_abs(&self, z: Cx) -> f64 {
        match self {
            ConjMap::LinearScale { c } | ConjMap::LinearScaleConj { c } => *c,
            ConjMap::SectorPower { a, .. } => a * z.norm().powf(a - 1.0),
            ConjMap::Logit => 1.0 / (z.re * (1.0 - z.re)),
        }
    }

    /// |(F⁻¹)′| at w.
    fn inv_deriv_abs(&self, w: Cx) -> f64 {
        match self {
            ConjMap::LinearScale { c } | ConjMap::LinearScaleConj { c } => 1.0 / c,
            ConjMap::SectorPower { a, .. } => (1.0 / a) * w.norm().powf(1.0 / a - 1.0),
            ConjMap::Logit => {
                let s = 1.0 / (1.0 + (-w.re).exp());
                s * (1.0 - s)
            }
        }
    }

    fn dim(&self) -> usize {
        match self {
            ConjMap::Logit => 1,
            _ => 2,
        }
    }

    fn state_domain(&self) -> Result<Domain> {
        Ok(match self {
            ConjMap::Logit => Domain::Interval { lo: 0.0, hi: 1.0 },
            ConjMap::SectorPower { alpha, .. } => {
                Domain::Sector { sector: Sector::angle(*alpha)? }
            }
            _ => Domain::Sector { sector: Sector::angle(FRAC_PI_4)? },
        })
    }
}

/// The semiflow catalog; every entry has closed-form flow, inverse, and
/// Jacobian determinant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Semiflow {
    /// `φ(t,x) = x/(x+(1−x)e^{−t})` on (0,1).
    Logistic,
    /// `φ(t,x) = e^t·x` on ℝ^dim (dim ≤ 2 for grids).
    ExpScale { dim: usize },
    /// Spiral `e^{pt}·(rotation by qt)` on the exterior of the unit disk.
    RotationDilation { p: f64, q: f64 },
    /// `φ(t,x) = (Re t + x^{α₁})^{1/α₁}` on (1,∞), sector time.
    PowerShift { alpha1: f64 },
    /// `φ(t,x) = F⁻¹(t + F(x))`.
    Conjugated { map: ConjMap },
}

/// A state point; 1-D flows use only the first coordinate.
pub type Pt = [f64; 2];

fn to_pt(z: Cx) -> Pt {
    [z.re, z.im]
}

fn to_cx(p: Pt) -> Cx {
    Cx::new(p[0], p[1])
}

impl Semiflow {
    pub fn dim(&self) -> usize {
        match self {
            Semiflow::Logistic | Semiflow::PowerShift { .. } => 1,
            Semiflow::ExpScale { dim } => *dim,
            Semiflow::RotationDilation { .. } => 2,
            Semiflow::Conjugated { map } => map.dim(),
        }
    }

    /// The state domain Ω.
    pub fn state_domain(&self) -> Result<Domain> {
        Ok(match self {
            Semiflow::Logistic => Domain::Interval { lo: 0.0, hi: 1.0 },
            Semiflow::ExpScale { dim } => Domain::Plane { dim: *dim },
            Semiflow::RotationDilation { .. } => Domain::ExteriorDisk { radius: 1.0 },
            Semiflow::PowerShift { .. } => Domain::Interval { lo: 1.0, hi: f64::INFINITY },
            Semiflow::Conjugated { map } => map.state_domain()?,
        })
    }

    /// The sector the time parameter ranges over.
    pub fn time_domain(&self) -> Sector {
        match self {
            Semiflow::PowerShift { .. } | Semiflow::Conjugated { .. } => {
                Sector::angle(FRAC_PI_4).expect("fixed angle is valid")
            }
            _ => Sector::half_line(),
        }
    }

    pub fn eval(&self, t: Cx, x: Pt) -> Pt {
        match self {
            Semiflow::Logistic => {
                let e = (-t.re).exp();
                [x[0] / (x[0] + (1.0 - x[0]) * e), 0.0]
            }
            Semiflow::ExpScale { .. } => {
                let s = t.re.exp();
                [s * x[0], s * x[1]]
            }
            Semiflow::RotationDilation { p, q } => {
                let s = (p * t.re).exp();
                let (sin, cos) = (q * t.re).sin_cos();
                [s * (x[0] * cos - x[1] * sin), s * (x[0] * sin + x[1] * cos)]
            }
            Semiflow::PowerShift { alpha1 } => {
                [(t.re + x[0].powf(*alpha1)).powf(1.0 / alpha1), 0.0]
            }
            Semiflow::Conjugated { map } => to_pt(map.inverse(t + map.eval(to_cx(x)))),
        }
    }

    /// `φ(t,·)⁻¹(y)`, defined on the image of the time-t slice.
    pub fn inverse(&self, t: Cx, y: Pt) -> Pt {
        match self {
            Semiflow::Logistic => {
                let e = (-t.re).exp();
                [y[0] * e / (y[0] * e + 1.0 - y[0]), 0.0]
            }
            Semiflow::ExpScale { .. } => {
                let s = (-t.re).exp();
                [s * y[0], s * y[1]]
            }
            Semiflow::RotationDilation { p, q } => {
                let s = (-p * t.re).exp();
                let (sin, cos) = (-q * t.re).sin_cos();
                [s * (y[0] * cos - y[1] * sin), s * (y[0] * sin + y[1] * cos)]
            }
            Semiflow::PowerShift { alpha1 } => {
                [(y[0].powf(*alpha1) - t.re).max(0.0).powf(1.0 / alpha1), 0.0]
            }
            Semiflow::Conjugated { map } => to_pt(map.inverse(map.eval(to_cx(y)) - t)),
        }
    }

    /// `|det Dφ(t,x)|` with respect to the state variable.
    pub fn jac_det(&self, t: Cx, x: Pt) -> f64 {
        match self {
            Semiflow::Logistic => {
                let e = (-t.re).exp();
                let d = x[0] + (1.0 - x[0]) * e;
                e / (d * d)
            }
            Semiflow::ExpScale { dim } => (*dim as f64 * t.re).exp(),
            Semiflow::RotationDilation { p, .. } => (2.0 * p * t.re).exp(),
            Semiflow::PowerShift { alpha1 } => {
                let u = t.re + x[0].powf(*alpha1);
                u.powf(1.0 / alpha1 - 1.0) * x[0].powf(alpha1 - 1.0)
            }
            Semiflow::Conjugated { map } => {
                let w = t + map.eval(to_cx(x));
                let stretch = map.inv_deriv_abs(w) * map.deriv_abs(to_cx(x));
                if map.dim() == 1 {
                    stretch
                } else {
                    // Conformal (or anti-conformal) planar map: the Jacobian
                    // determinant is the squared stretch factor.
                    stretch * stretch
                }
            }
        }
    }
}

/// Build a catalog semiflow by name.
pub fn semiflow_catalog(name: &str, params: &[f64]) -> Result<Semiflow> {
    let need = |i: usize| -> Result<f64> {
        params
            .get(i)
            .copied()
            .ok_or_else(|| Error::Argument(format!("semiflow {name} needs parameter {i}")))
    };
    Ok(match name {
        "logistic" => Semiflow::Logistic,
        "exp-scale" => {
            let dim = params.first().copied().unwrap_or(1.0);
            if dim != 1.0 && dim != 2.0 {
                return Err(Error::Argument(format!(
                    "exp-scale grids support dimension 1 or 2, got {dim}"
                )));
            }
            Semiflow::ExpScale { dim: dim as usize }
        }
        "rotation-dilation" => Semiflow::RotationDilation { p: need(0)?, q: need(1)? },
        "power-shift" => {
            let a1 = need(0)?;
            if !(0.0 < a1 && a1 <= 1.0) {
                return Err(Error::Argument(format!("power-shift exponent must be in (0,1], got {a1}")));
            }
            Semiflow::PowerShift { alpha1: a1 }
        }
        "conjugated-linear" => Semiflow::Conjugated { map: ConjMap::LinearScale { c: need(0)? } },
        "conjugated-linear-conj" => {
            Semiflow::Conjugated { map: ConjMap::LinearScaleConj { c: need(0)? } }
        }
        "conjugated-sector-power" => {
            let (a, alpha) = (need(0)?, need(1)?);
            if !(0.0 < a && a < 1.0) {
                return Err(Error::Argument(format!("sector-power exponent must be in (0,1), got {a}")));
            }
            Semiflow::Conjugated { map: ConjMap::SectorPower { a, alpha } }
        }
        "conjugated-logit" => Semiflow::Conjugated { map: ConjMap::Logit },
        other => return Err(Error::UnknownName(format!("semiflow {other}"))),
    })
}

/// One semigroup operator: translation by a sector step, or composition with a
/// semiflow at a fixed time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op")]
pub enum SemigroupOp {
    Translation { t: Cx },
    Composition { flow: Semiflow, t: Cx },
}

/// Interpolated read of `gf` at an arbitrary point. Returns the value and a
/// censored flag: true when the point lies inside the function's domain but
/// beyond the grid, so the zero used is a truncation artifact.
fn sample_at(gf: &GridFunction, z: Cx) -> Result<(f64, bool)> {
    let domain = &gf.tag.weight.domain;
    let dim = domain.dim();
    let pt_in_domain = if dim == 1 {
        domain.contains(&[z.re])
    } else {
        domain.contains(&[z.re, z.im])
    };
    match gf.grid.layout {
        Layout::Uniform1D { origin, step, n } => {
            let pos = (z.re - origin) / step - 0.5;
            let read = |i: i64| -> f64 {
                if i < 0 || i >= n as i64 {
                    0.0
                } else {
                    gf.values[i as usize]
                }
            };
            if pos <= -1.0 || pos >= n as f64 {
                return Ok((0.0, pt_in_domain));
            }
            let i0 = pos.floor();
            let frac = pos - i0;
            let i0 = i0 as i64;
            Ok(((1.0 - frac) * read(i0) + frac * read(i0 + 1), false))
        }
        Layout::Polar { r0, dr, nr, theta0, dtheta, ntheta } => {
            let r = z.norm();
            let full_circle = (dtheta * ntheta as f64 - 2.0 * PI).abs() < 1e-9;
            let mut th = z.arg();
            if full_circle && th < theta0 {
                th += 2.0 * PI;
            }
            let rpos = (r - r0) / dr - 0.5;
            let tpos = (th - theta0) / dtheta - 0.5;
            if rpos <= -1.0 || rpos >= nr as f64 || (!full_circle && (th < theta0 - dtheta || th > theta0 + dtheta * (ntheta as f64 + 1.0))) {
                return Ok((0.0, pt_in_domain));
            }
            let read = |ri: i64, ti: i64| -> f64 {
                if ri < 0 || ri >= nr as i64 {
                    return 0.0;
                }
                let ti = if full_circle {
                    ti.rem_euclid(ntheta as i64)
                } else if ti < 0 {
                    0
                } else if ti >= ntheta as i64 {
                    ntheta as i64 - 1
                } else {
                    ti
                };
                gf.values[ri as usize * ntheta + ti as usize]
            };
            let (ri0, rfrac) = (rpos.floor(), rpos - rpos.floor());
            let (ti0, tfrac) = (tpos.floor(), tpos - tpos.floor());
            let (ri0, ti0) = (ri0 as i64, ti0 as i64);
            let v = (1.0 - rfrac) * ((1.0 - tfrac) * read(ri0, ti0) + tfrac * read(ri0, ti0 + 1))
                + rfrac * ((1.0 - tfrac) * read(ri0 + 1, ti0) + tfrac * read(ri0 + 1, ti0 + 1));
            Ok((v, false))
        }
        Layout::Irregular => {
            Err(Error::Shape("interpolation needs a structured grid layout".into()))
        }
    }
}

/// Apply a semigroup operator by resampling the grid values.
pub fn apply(op: &SemigroupOp, x: &GridFunction) -> Result<GridFunction> {
    let mut out = x.clone();
    let mut censored = 0usize;
    match op {
        SemigroupOp::Translation { t } => {
            if !x.grid.sector.contains(*t) {
                return Err(Error::Argument(format!(
                    "translation step {t} lies outside the index sector"
                )));
            }
            if t.norm() == 0.0 {
                return Ok(out);
            }
            for (i, cell) in x.grid.cells.iter().enumerate() {
                let (v, clipped) = sample_at(x, cell.center + t)?;
                out.values[i] = v;
                censored += clipped as usize;
            }
        }
        SemigroupOp::Composition { flow, t } => {
            if !flow.time_domain().contains(*t) {
                return Err(Error::Argument(format!(
                    "time {t} lies outside the flow's time sector"
                )));
            }
            let dim = flow.dim();
            for (i, cell) in x.grid.cells.iter().enumerate() {
                let p = if dim == 1 { [cell.center.re, 0.0] } else { to_pt(cell.center) };
                let y = flow.eval(*t, p);
                let (v, clipped) = sample_at(x, Cx::new(y[0], if dim == 1 { 0.0 } else { y[1] }))?;
                out.values[i] = v;
                censored += clipped as usize;
            }
        }
    }
    out.support_radius = measured_support(&out);
    if censored > 0 {
        let tail = crate::funcspace::weight_tail_integral(&x.tag.weight, x.grid.extent)
            .map(|b| format!("; weight tail integral beyond the grid ≤ {b:.3e}"))
            .unwrap_or_default();
        out.note = Some(format!("{censored} cells read beyond the grid and used 0{tail}"));
    }
    Ok(out)
}

/// Right inverse of translation: shift the support forward by `t`, zero behind.
/// The result must still fit inside the grid, otherwise the truncation is too
/// small and the caller has to enlarge it.
pub fn right_inverse_translation(t: Cx, f: &GridFunction) -> Result<GridFunction> {
    if !f.grid.sector.contains(t) {
        return Err(Error::Argument(format!("shift {t} lies outside the index sector")));
    }
    let needed = f.support_radius + t.norm();
    if needed > f.grid.extent + 1e-12 {
        return Err(Error::Truncation { needed, have: f.grid.extent });
    }
    let mut out = f.clone();
    for (i, cell) in f.grid.cells.iter().enumerate() {
        let (v, _) = sample_at(f, cell.center - t)?;
        out.values[i] = v;
    }
    out.support_radius = measured_support(&out);
    Ok(out)
}

/// Support radius read off the grid values.
fn measured_support(gf: &GridFunction) -> f64 {
    gf.grid
        .cells
        .iter()
        .zip(&gf.values)
        .filter(|(_, v)| **v != 0.0)
        .map(|(c, _)| c.center.norm())
        .fold(0.0, f64::max)
}

/// Report of the sampled semiflow-law check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowLawReport {
    pub max_identity_defect: f64,
    pub max_cocycle_defect: f64,
    pub max_inverse_defect: f64,
    /// Sampled injectivity evidence: monotone time slices in 1-D, nonvanishing
    /// Jacobian in 2-D. Necessary, not sufficient.
    pub injectivity: CheckVerdict,
    pub samples: usize,
}

/// Sample φ(0,x)=x, the cocycle law, and the slice inverse at random points.
pub fn check_semiflow_laws(flow: &Semiflow, budget: usize, seed: u64) -> Result<FlowLawReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = flow.state_domain()?;
    let tdom = flow.time_domain();
    let dim = flow.dim();
    let mut id_d = 0.0f64;
    let mut co_d = 0.0f64;
    let mut inv_d = 0.0f64;
    let mut min_jac = f64::INFINITY;
    let mut mono_ok = true;
    let rel = |a: Pt, b: Pt| -> f64 {
        let na = (a[0] - b[0]).hypot(a[1] - b[1]);
        na / (1.0 + b[0].hypot(b[1]))
    };
    let sample_time = |rng: &mut ChaCha8Rng| -> Cx {
        let r = 5.0 * rng.gen::<f64>();
        if tdom.dim() == 1 {
            Cx::new(r, 0.0)
        } else {
            let a = tdom.half_angle();
            Cx::from_polar(r, -a + 2.0 * a * rng.gen::<f64>())
        }
    };
    for _ in 0..budget {
        let xv = domain.sample(&mut rng);
        let x: Pt = if dim == 1 { [xv[0], 0.0] } else { [xv[0], xv[1]] };
        let t = sample_time(&mut rng);
        let s = sample_time(&mut rng);
        id_d = id_d.max(rel(flow.eval(Cx::new(0.0, 0.0), x), x));
        let via = flow.eval(t, flow.eval(s, x));
        let direct = flow.eval(t + s, x);
        co_d = co_d.max(rel(via, direct));
        let y = flow.eval(t, x);
        inv_d = inv_d.max(rel(flow.eval(t, flow.inverse(t, y)), y));
        min_jac = min_jac.min(flow.jac_det(t, x).abs());
        if dim == 1 {
            // Monotone slice: nearby ordered states stay ordered.
            let h = 1e-4 * (1.0 + x[0].abs());
            let x2 = [x[0] + h, 0.0];
            if domain.contains(&[x2[0]]) && flow.eval(t, x2)[0] <= flow.eval(t, x)[0] {
                mono_ok = false;
            }
        }
    }
    let injectivity = if dim == 1 {
        if mono_ok { CheckVerdict::Supported } else { CheckVerdict::Refuted }
    } else if min_jac > 0.0 {
        CheckVerdict::Supported
    } else {
        CheckVerdict::Refuted
    };
    Ok(FlowLawReport {
        max_identity_defect: id_d,
        max_cocycle_defect: co_d,
        max_inverse_defect: inv_d,
        injectivity,
        samples: budget,
    })
}

/// Which side of the weighted conjugation inequality to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarsFamily {
    /// `ρ₁(x) ≤ M e^{ω|t|} ρ₁(φ(t,x)) |det Dφ(t,x)|` (the Lp transfer bound).
    Lp,
    /// `ρ(x) ≤ M e^{ω|t|} ρ(φ(t,x))` (the sup-norm transfer bound).
    C0,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarsReport {
    pub verdict: CheckVerdict,
    pub m_const: f64,
    pub omega: f64,
    pub pairs: usize,
    pub max_ratio: f64,
    /// `(t, x)` violating the inequality, when refuted. A non-finite ratio
    /// (weight overflow) counts as a violation, not an error.
    pub witness: Option<(Cx, Vec<f64>)>,
}

/// Sampled check of the weighted conjugation inequality for a semiflow.
pub fn check_lemma_mars(
    flow: &Semiflow,
    weight: &WeightFn,
    family: MarsFamily,
    m_const: f64,
    omega: f64,
    sample_budget: usize,
) -> Result<MarsReport> {
    if m_const < 1.0 {
        return Err(Error::Argument("constant M must be ≥ 1".into()));
    }
    let budget = sample_budget.max(1000);
    let mut rng = ChaCha8Rng::seed_from_u64(1203);
    let domain = flow.state_domain()?;
    let tdom = flow.time_domain();
    let dim = flow.dim();
    let mut max_ratio = 0.0f64;
    let mut witness = None;
    for _ in 0..budget {
        let xv = domain.sample(&mut rng);
        let x: Pt = if dim == 1 { [xv[0], 0.0] } else { [xv[0], xv[1]] };
        let r = 20.0 * rng.gen::<f64>() * rng.gen::<f64>();
        let t = if tdom.dim() == 1 {
            Cx::new(r, 0.0)
        } else {
            let a = tdom.half_angle();
            Cx::from_polar(r, -a + 2.0 * a * rng.gen::<f64>())
        };
        let y = flow.eval(t, x);
        let num = weight.eval(&xv);
        let yv: Vec<f64> = if dim == 1 { vec![y[0]] } else { vec![y[0], y[1]] };
        let mut den = weight.eval(&yv) * (omega * t.norm()).exp();
        if family == MarsFamily::Lp {
            den *= flow.jac_det(t, x);
        }
        let ratio = num / den;
        if !ratio.is_finite() || ratio > max_ratio {
            if !ratio.is_finite() {
                max_ratio = f64::INFINITY;
            } else {
                max_ratio = ratio;
            }
            if !(ratio <= m_const * (1.0 + 1e-12)) && witness.is_none() {
                witness = Some((t, xv.clone()));
            }
        }
    }
    let verdict = if max_ratio <= m_const * (1.0 + 1e-12) {
        CheckVerdict::Supported
    } else {
        CheckVerdict::Refuted
    };
    if verdict == CheckVerdict::Supported {
        witness = None;
    }
    Ok(MarsReport { verdict, m_const, omega, pairs: budget, max_ratio, witness })
}

/// Coarse (M, ω) search for the conjugation inequality.
pub fn mars_grid_search(
    flow: &Semiflow,
    weight: &WeightFn,
    family: MarsFamily,
    sample_budget: usize,
) -> Result<Option<(f64, f64)>> {
    for &m in &[1.0, 10.0, 100.0] {
        for omega in 0..=8 {
            let rep = check_lemma_mars(flow, weight, family, m, omega as f64, sample_budget)?;
            if rep.verdict == CheckVerdict::Supported {
                return Ok(Some((m, omega as f64)));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConjugacyReport {
    /// Max over the probe times of ‖Ψ(T(t)x) − S(t)(Ψx)‖.
    pub max_defect: f64,
    /// Ψ maps the probe to (numerical) zero; the diagram is vacuous.
    pub psi_degenerate: bool,
}

/// Commuting-diagram defect of an intertwining map between two semigroups.
pub fn conjugacy_check(
    make_t: &dyn Fn(Cx) -> SemigroupOp,
    make_s: &dyn Fn(Cx) -> SemigroupOp,
    psi: &dyn Fn(&GridFunction) -> Result<GridFunction>,
    x: &GridFunction,
    times: &[Cx],
) -> Result<ConjugacyReport> {
    let psi_x = psi(x)?;
    let psi_degenerate = psi_x.norm()? < 1e-300;
    let mut max_defect = 0.0f64;
    for &t in times {
        let left = psi(&apply(&make_t(t), x)?)?;
        let right = apply(&make_s(t), &psi_x)?;
        max_defect = max_defect.max(left.sub(&right)?.norm()?);
    }
    Ok(ConjugacyReport { max_defect, psi_degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{grid_for, Bump, SpaceTag};
    use crate::weights::catalog;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn all_flows() -> Vec<Semiflow> {
        vec![
            semiflow_catalog("logistic", &[]).unwrap(),
            semiflow_catalog("exp-scale", &[1.0]).unwrap(),
            semiflow_catalog("exp-scale", &[2.0]).unwrap(),
            semiflow_catalog("rotation-dilation", &[0.3, 1.2]).unwrap(),
            semiflow_catalog("power-shift", &[0.5]).unwrap(),
            semiflow_catalog("conjugated-linear", &[2.0]).unwrap(),
            semiflow_catalog("conjugated-linear-conj", &[1.5]).unwrap(),
            semiflow_catalog("conjugated-sector-power", &[0.5, FRAC_PI_4]).unwrap(),
            semiflow_catalog("conjugated-logit", &[]).unwrap(),
        ]
    }

    #[test]
    fn logistic_spot_value_and_inverse() {
        let f = Semiflow::Logistic;
        let t = Cx::new(2f64.ln(), 0.0);
        assert_relative_eq!(f.eval(t, [0.5, 0.0])[0], 2.0 / 3.0, max_relative = 1e-12);
        let y = f.eval(t, [0.3, 0.0]);
        assert_relative_eq!(f.inverse(t, y)[0], 0.3, max_relative = 1e-12);
    }

    #[test]
    fn rotation_dilation_identity_at_zero_time() {
        let f = semiflow_catalog("rotation-dilation", &[0.3, 1.2]).unwrap();
        let x = [1.5, -0.7];
        let y = f.eval(Cx::new(0.0, 0.0), x);
        assert_relative_eq!(y[0], x[0], max_relative = 1e-14);
        assert_relative_eq!(y[1], x[1], max_relative = 1e-14);
        assert_relative_eq!(f.jac_det(Cx::new(2.0, 0.0), x), (2.0f64 * 0.3 * 2.0).exp());
    }

    #[test]
    fn power_shift_formula() {
        let f = semiflow_catalog("power-shift", &[0.5]).unwrap();
        // (t + √x)² at t=3, x=4: (3+2)² = 25.
        assert_relative_eq!(f.eval(Cx::new(3.0, 0.0), [4.0, 0.0])[0], 25.0, max_relative = 1e-12);
    }

    #[test]
    fn logit_conjugation_reproduces_logistic_exactly() {
        let conj = semiflow_catalog("conjugated-logit", &[]).unwrap();
        let log = Semiflow::Logistic;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = [0.02 + 0.96 * rng.gen::<f64>(), 0.0];
            let t = Cx::new(4.0 * rng.gen::<f64>(), 0.0);
            assert_relative_eq!(conj.eval(t, x)[0], log.eval(t, x)[0], max_relative = 1e-10);
            assert_relative_eq!(
                conj.jac_det(t, x),
                log.jac_det(t, x),
                max_relative = 1e-8
            );
        }
    }

    #[test]
    fn semiflow_laws_hold_for_catalog() {
        for flow in all_flows() {
            let rep = check_semiflow_laws(&flow, 1000, 77).unwrap();
            assert!(rep.max_identity_defect < 1e-8, "{flow:?}: {rep:?}");
            assert!(rep.max_cocycle_defect < 1e-8, "{flow:?}: {rep:?}");
            assert!(rep.max_inverse_defect < 1e-8, "{flow:?}: {rep:?}");
            assert_eq!(rep.injectivity, CheckVerdict::Supported, "{flow:?}");
        }
    }

    #[test]
    fn logistic_jacobian_matches_finite_differences() {
        let f = Semiflow::Logistic;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let x = 0.05 + 0.9 * rng.gen::<f64>();
            let t = Cx::new(6.0 * rng.gen::<f64>(), 0.0);
            let h = 1e-6;
            let fd = (f.eval(t, [x + h, 0.0])[0] - f.eval(t, [x - h, 0.0])[0]) / (2.0 * h);
            assert_relative_eq!(f.jac_det(t, x2(x)), fd, max_relative = 1e-6);
        }
        fn x2(x: f64) -> Pt {
            [x, 0.0]
        }
    }

    fn line_tag() -> SpaceTag {
        SpaceTag::lp(1.0, catalog("polynomial-s", &[2.0]).unwrap()).unwrap()
    }

    #[test]
    fn zero_translation_is_identity() {
        let tag = line_tag();
        let grid = Arc::new(grid_for(&tag.weight.domain, 12.0, 1e-3).unwrap());
        let f = Bump::new(Cx::new(5.0, 0.0), 1.0, 1.0).unwrap().to_grid(tag, grid);
        let g = apply(&SemigroupOp::Translation { t: Cx::new(0.0, 0.0) }, &f).unwrap();
        assert_eq!(f.values, g.values);
    }

    #[test]
    fn translation_shifts_bump_toward_origin() {
        let tag = line_tag();
        let grid = Arc::new(grid_for(&tag.weight.domain, 12.0, 1e-3).unwrap());
        let f = Bump::new(Cx::new(5.0, 0.0), 1.0, 1.0).unwrap().to_grid(tag.clone(), Arc::clone(&grid));
        let g = apply(&SemigroupOp::Translation { t: Cx::new(2.0, 0.0) }, &f).unwrap();
        let target = Bump::new(Cx::new(3.0, 0.0), 1.0, 1.0).unwrap();
        let sup = g
            .grid
            .cells
            .iter()
            .zip(&g.values)
            .map(|(c, v)| (v - target.eval(c.center)).abs())
            .fold(0.0f64, f64::max);
        assert!(sup < 1e-3, "sup defect {sup}");
    }

    #[test]
    fn right_inverse_then_translation_is_identity() {
        let tag = line_tag();
        let grid = Arc::new(grid_for(&tag.weight.domain, 12.0, 1e-3).unwrap());
        let f = Bump::new(Cx::new(3.0, 0.0), 1.0, 1.0).unwrap().to_grid(tag, grid);
        let t = Cx::new(1.5, 0.0);
        let s = right_inverse_translation(t, &f).unwrap();
        assert!(s.support_radius > f.support_radius);
        let back = apply(&SemigroupOp::Translation { t }, &s).unwrap();
        let sup = back
            .values
            .iter()
            .zip(&f.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(sup < 1e-3, "sup defect {sup}");
    }

    #[test]
    fn shift_algebra_on_common_ray() {
        // S(r)T(t) = S(r−t) for r ≥ t on bumps.
        let tag = line_tag();
        let grid = Arc::new(grid_for(&tag.weight.domain, 12.0, 1e-3).unwrap());
        let f = Bump::new(Cx::new(2.0, 0.0), 1.0, 1.0).unwrap().to_grid(tag, grid);
        let shifted = apply(&SemigroupOp::Translation { t: Cx::new(1.0, 0.0) }, &f).unwrap();
        let lhs = right_inverse_translation(Cx::new(3.0, 0.0), &shifted).unwrap();
        let rhs = right_inverse_translation(Cx::new(2.0, 0.0), &f).unwrap();
        let sup = lhs
            .values
            .iter()
            .zip(&rhs.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(sup < 1e-3, "sup defect {sup}");
    }

    #[test]
    fn right_inverse_fails_when_support_would_leave_grid() {
        let tag = line_tag();
        let grid = Arc::new(grid_for(&tag.weight.domain, 8.0, 0.01).unwrap());
        let f = Bump::new(Cx::new(5.0, 0.0), 1.0, 1.0).unwrap().to_grid(tag, grid);
        let err = right_inverse_translation(Cx::new(4.0, 0.0), &f).unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }), "got {err:?}");
    }

    #[test]
    fn translation_semigroup_law_on_grid() {
        let tag = line_tag();
        let grid = Arc::new(grid_for(&tag.weight.domain, 12.0, 1e-3).unwrap());
        let f = Bump::new(Cx::new(6.0, 0.0), 1.0, 1.0).unwrap().to_grid(tag, grid);
        for i in 0..5 {
            for j in 0..5 {
                let (t, s) = (0.3 * i as f64, 0.25 * j as f64);
                let two = apply(
                    &SemigroupOp::Translation { t: Cx::new(t, 0.0) },
                    &apply(&SemigroupOp::Translation { t: Cx::new(s, 0.0) }, &f).unwrap(),
                )
                .unwrap();
                let one =
                    apply(&SemigroupOp::Translation { t: Cx::new(t + s, 0.0) }, &f).unwrap();
                let sup = two
                    .values
                    .iter()
                    .zip(&one.values)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                assert!(sup < 10.0 * 1e-3, "t={t} s={s}: {sup}");
            }
        }
    }

    #[test]
    fn exp_scale_composition_reads_doubled_coordinates() {
        let tag = SpaceTag::lp(1.0, catalog("inv-quadratic", &[2.0]).unwrap()).unwrap();
        let grid = Arc::new(grid_for(&tag.weight.domain, 3.0, 0.02).unwrap());
        let b = Bump::new(Cx::new(1.0, 0.0), 0.25, 1.0).unwrap();
        let f = b.to_grid(tag, Arc::clone(&grid));
        let flow = semiflow_catalog("exp-scale", &[2.0]).unwrap();
        let g = apply(&SemigroupOp::Composition { flow, t: Cx::new(2f64.ln(), 0.0) }, &f).unwrap();
        let mut max_err = 0.0f64;
        for (cell, v) in g.grid.cells.iter().zip(&g.values) {
            max_err = max_err.max((v - b.eval(cell.center * 2.0)).abs());
        }
        assert!(max_err < 0.02, "max defect {max_err}");
        // The image bump sits near (1/2, 0).
        let near = Cx::new(0.5, 0.0);
        let (v, _) = sample_at(&g, near).unwrap();
        assert!(v > 0.8, "value near the pulled-back center is {v}");
    }

    #[test]
    fn mars_logistic_with_reciprocal_weight_holds_at_stated_constants() {
        let rep = check_lemma_mars(
            &Semiflow::Logistic,
            &catalog("recip", &[]).unwrap(),
            MarsFamily::Lp,
            1.0,
            3.0,
            4000,
        )
        .unwrap();
        assert_eq!(rep.verdict, CheckVerdict::Supported, "{rep:?}");
        // Oracle: the ratio reduces to (x e^t + 1 − x)e^{−3t} ≤ 1.
        assert!(rep.max_ratio <= 1.0 + 1e-12);
    }

    #[test]
    fn mars_exp_scale_with_quadratic_weight_found_by_search() {
        let flow = semiflow_catalog("exp-scale", &[1.0]).unwrap();
        let w = catalog("inv-quadratic", &[1.0]).unwrap();
        let found = mars_grid_search(&flow, &w, MarsFamily::Lp, 2000).unwrap();
        let (m, omega) = found.expect("a pair must exist");
        assert!(omega <= 3.0, "ω={omega} exceeds dim+2");
        assert!(m <= 10.0);
    }

    #[test]
    fn mars_logistic_with_blowup_weight_refuted() {
        let rep = check_lemma_mars(
            &Semiflow::Logistic,
            &catalog("exp-recip", &[]).unwrap(),
            MarsFamily::Lp,
            1.0,
            3.0,
            2000,
        )
        .unwrap();
        assert_eq!(rep.verdict, CheckVerdict::Refuted);
        assert!(rep.witness.is_some());
    }

    #[test]
    fn conjugacy_identity_and_degenerate_maps() {
        let tag = line_tag();
        let grid = Arc::new(grid_for(&tag.weight.domain, 12.0, 0.01).unwrap());
        let x = Bump::new(Cx::new(4.0, 0.0), 1.0, 1.0).unwrap().to_grid(tag.clone(), Arc::clone(&grid));
        let make_t = |t: Cx| SemigroupOp::Translation { t };
        let id = |g: &GridFunction| -> Result<GridFunction> { Ok(g.clone()) };
        let rep = conjugacy_check(&make_t, &make_t, &id, &x, &[Cx::new(0.5, 0.0)]).unwrap();
        assert_eq!(rep.max_defect, 0.0);
        assert!(!rep.psi_degenerate);

        let zero = |g: &GridFunction| -> Result<GridFunction> {
            let mut z = g.clone();
            z.values.iter_mut().for_each(|v| *v = 0.0);
            Ok(z)
        };
        let rep = conjugacy_check(&make_t, &make_t, &zero, &x, &[Cx::new(0.5, 0.0)]).unwrap();
        assert_eq!(rep.max_defect, 0.0);
        assert!(rep.psi_degenerate);
    }

    #[test]
    fn translation_conjugates_to_logistic_along_logit() {
        // Ψf = f∘F with F the logit; then Ψ T(t) = T_φ(t) Ψ exactly, and the
        // grids only add interpolation error.
        let line_tag = SpaceTag::c0(
            catalog("const", &[1.0])
                .unwrap()
                .with_domain(Domain::Plane { dim: 1 }),
        );
        let line_grid = Arc::new(grid_for(&line_tag.weight.domain, 8.0, 1e-3).unwrap());
        let unit_tag =
            SpaceTag::c0(catalog("const", &[1.0]).unwrap().with_domain(Domain::Interval {
                lo: 0.0,
                hi: 1.0,
            }));
        let unit_grid = Arc::new(grid_for(&unit_tag.weight.domain, 1.0, 1e-3).unwrap());
        let x = Bump::new(Cx::new(0.0, 0.0), 1.0, 1.0).unwrap().to_grid(line_tag, Arc::clone(&line_grid));
        let logit = ConjMap::Logit;
        let psi = |g: &GridFunction| -> Result<GridFunction> {
            let mut out = GridFunction::zeros(unit_tag.clone(), Arc::clone(&unit_grid));
            for (i, cell) in unit_grid.cells.iter().enumerate() {
                let w = logit.eval(cell.center);
                out.values[i] = sample_at(g, w)?.0;
            }
            out.support_radius = 1.0;
            Ok(out)
        };
        let make_t = |t: Cx| SemigroupOp::Translation { t };
        let make_s = |t: Cx| SemigroupOp::Composition { flow: Semiflow::Logistic, t };
        let times = [Cx::new(0.1, 0.0), Cx::new(0.5, 0.0), Cx::new(1.0, 0.0)];
        let rep = conjugacy_check(&make_t, &make_s, &psi, &x, &times).unwrap();
        assert!(rep.max_defect < 1e-2, "defect {}", rep.max_defect);
        assert!(!rep.psi_degenerate);
    }

    #[test]
    fn op_json_round_trip() {
        let ops = [
            SemigroupOp::Translation { t: Cx::new(1.0, 0.5) },
            SemigroupOp::Composition {
                flow: semiflow_catalog("conjugated-sector-power", &[0.5, FRAC_PI_4]).unwrap(),
                t: Cx::new(2.0, 0.0),
            },
        ];
        for op in ops {
            let js = serde_json::to_string(&op).unwrap();
            let back: SemigroupOp = serde_json::from_str(&js).unwrap();
            assert_eq!(back, op);
        }
    }
}
