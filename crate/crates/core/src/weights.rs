//! Weight functions on sectors, intervals, and planar domains: the closed-form
//! catalog, zero-extension, and sampled admissibility checking.

use crate::error::{Error, Result};
use crate::geometry::Sector;
use crate::proxy::CheckVerdict;
use crate::Cx;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Where a weight lives. Evaluation itself never checks membership; the
/// zero-extension and the samplers do.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Domain {
    Sector { sector: Sector },
    /// Open interval (lo, hi); `hi` may be infinite (JSON null).
    Interval {
        lo: f64,
        #[serde(with = "maybe_unbounded")]
        hi: f64,
    },
    Plane { dim: usize },
    /// Complement of the closed disk of the given radius in the plane.
    ExteriorDisk { radius: f64 },
}

/// JSON has no literal for f64 infinity; map it to null and back.
mod maybe_unbounded {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_some(v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Sector { sector } => sector.dim(),
            Domain::Interval { .. } => 1,
            Domain::Plane { dim } => *dim,
            Domain::ExteriorDisk { .. } => 2,
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        if p.len() != self.dim() {
            return false;
        }
        match self {
            Domain::Sector { sector } => {
                let z = if sector.dim() == 1 {
                    Cx::new(p[0], 0.0)
                } else {
                    Cx::new(p[0], p[1])
                };
                sector.contains(z)
            }
            Domain::Interval { lo, hi } => *lo < p[0] && p[0] < *hi,
            Domain::Plane { .. } => true,
            Domain::ExteriorDisk { radius } => p[0] * p[0] + p[1] * p[1] > radius * radius,
        }
    }

    /// One interior point, biased toward the origin-side of the domain.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let u: f64 = rng.gen();
        match self {
            Domain::Sector { sector } => {
                let r = 50.0 * u * u;
                match sector.dim() {
                    1 => {
                        if sector.is_half_line() {
                            vec![r]
                        } else {
                            let s = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                            vec![s * r]
                        }
                    }
                    _ => {
                        let a = sector.half_angle();
                        let th = -a + 2.0 * a * rng.gen::<f64>();
                        vec![r * th.cos(), r * th.sin()]
                    }
                }
            }
            Domain::Interval { lo, hi } => {
                if hi.is_finite() {
                    vec![lo + (hi - lo) * (1e-6 + (1.0 - 2e-6) * u)]
                } else {
                    vec![lo + 1e-6 + 50.0 * u * u]
                }
            }
            Domain::Plane { dim } => (0..*dim).map(|_| -10.0 + 20.0 * rng.gen::<f64>()).collect(),
            Domain::ExteriorDisk { radius } => {
                let r = radius + 1e-6 + 10.0 * u * u;
                let th = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
                vec![r * th.cos(), r * th.sin()]
            }
        }
    }
}

/// Closed-form weight families. Names follow the catalog strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum WeightKind {
    /// On the quarter-plane sector: 1 where x+y ≥ √(x−y), else e^{x+y−√(x−y)}.
    SectorSqrt,
    /// e^{−x+|y|} on the right half-plane sector.
    ExpCone,
    /// Two-branch rational weight on the quarter-plane sector:
    /// ((x+y+1)/(x−y+1))^{2ζ} where x+y+1 ≥ √(x−y+1), else (x+y+1)^{−2ζ}.
    RationalZeta { zeta: f64 },
    /// (1+|t|)^{−s}.
    PolynomialS { s: f64 },
    /// e^{−(x+1)cos(ln(x+1))+1} on the half-line.
    Oscillating,
    /// 1/x on (0,1).
    Recip,
    /// e^{−x^{α₁}} on (1,∞).
    ExpAlpha1 { alpha1: f64 },
    /// 1/(1+|x|²).
    InvQuadratic,
    /// e^{−x}.
    Exp,
    /// Constant weight.
    Const { value: f64 },
    /// e^{−x²}; not admissible at any polynomial budget, kept as a foil.
    ExpSquare,
    /// e^{1/x} on (0,1); blows up at 0, kept as a foil.
    ExpRecip,
}

fn euclid(p: &[f64]) -> f64 {
    p.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightFn {
    pub kind: WeightKind,
    pub domain: Domain,
}

impl WeightFn {
    /// Raw formula value; the caller guarantees `p` is in the domain.
    pub fn eval(&self, p: &[f64]) -> f64 {
        match &self.kind {
            WeightKind::SectorSqrt => {
                let s = p[0] + p[1];
                let d = (p[0] - p[1]).max(0.0).sqrt();
                if s >= d {
                    1.0
                } else {
                    (s - d).exp()
                }
            }
            WeightKind::ExpCone => (-p[0] + p[1].abs()).exp(),
            WeightKind::RationalZeta { zeta } => {
                let num = p[0] + p[1] + 1.0;
                let den = p[0] - p[1] + 1.0;
                if num >= den.max(0.0).sqrt() {
                    (num / den).powf(2.0 * zeta)
                } else {
                    num.powf(-2.0 * zeta)
                }
            }
            WeightKind::PolynomialS { s } => (1.0 + euclid(p)).powf(-s),
            WeightKind::Oscillating => {
                let x1 = p[0] + 1.0;
                (-x1 * x1.ln().cos() + 1.0).exp()
            }
            WeightKind::Recip => 1.0 / p[0],
            WeightKind::ExpAlpha1 { alpha1 } => (-p[0].powf(*alpha1)).exp(),
            WeightKind::InvQuadratic => 1.0 / (1.0 + p.iter().map(|v| v * v).sum::<f64>()),
            WeightKind::Exp => (-p[0]).exp(),
            WeightKind::Const { value } => *value,
            WeightKind::ExpSquare => (-p[0] * p[0]).exp(),
            WeightKind::ExpRecip => (1.0 / p[0]).exp(),
        }
    }

    /// Adapter for complex sector points: 1-D domains read the real part.
    pub fn eval_c(&self, z: Cx) -> f64 {
        if self.domain.dim() == 1 {
            self.eval(&[z.re])
        } else {
            self.eval(&[z.re, z.im])
        }
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }
}

/// Zero-extension of a weight beyond its domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedWeight {
    pub base: WeightFn,
}

impl ExtendedWeight {
    pub fn new(base: WeightFn) -> Self {
        ExtendedWeight { base }
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        if self.base.domain.contains(p) {
            self.base.eval(p)
        } else {
            0.0
        }
    }

    pub fn eval_c(&self, z: Cx) -> f64 {
        if self.base.domain.dim() == 1 {
            self.eval(&[z.re])
        } else {
            self.eval(&[z.re, z.im])
        }
    }
}

/// Look up a catalog weight with its natural domain.
pub fn catalog(name: &str, params: &[f64]) -> Result<WeightFn> {
    let need = |i: usize| -> Result<f64> {
        params
            .get(i)
            .copied()
            .ok_or_else(|| Error::Argument(format!("weight {name} needs parameter {i}")))
    };
    let sector = |s: Sector| Domain::Sector { sector: s };
    let (kind, domain) = match name {
        "sector-sqrt" => (WeightKind::SectorSqrt, sector(Sector::angle(std::f64::consts::FRAC_PI_4)?)),
        "exp-cone" => (WeightKind::ExpCone, sector(Sector::angle(std::f64::consts::FRAC_PI_2)?)),
        "rational-zeta" => (
            WeightKind::RationalZeta { zeta: need(0)? },
            sector(Sector::angle(std::f64::consts::FRAC_PI_4)?),
        ),
        "polynomial-s" => (WeightKind::PolynomialS { s: need(0)? }, sector(Sector::half_line())),
        "oscillating" => (WeightKind::Oscillating, sector(Sector::half_line())),
        "recip" => (WeightKind::Recip, Domain::Interval { lo: 0.0, hi: 1.0 }),
        "exp-alpha1" => (
            WeightKind::ExpAlpha1 { alpha1: need(0)? },
            Domain::Interval { lo: 1.0, hi: f64::INFINITY },
        ),
        "inv-quadratic" => {
            let dim = params.first().copied().unwrap_or(1.0);
            if dim < 1.0 || dim.fract() != 0.0 {
                return Err(Error::Argument(format!("inv-quadratic dimension must be a positive integer, got {dim}")));
            }
            (WeightKind::InvQuadratic, Domain::Plane { dim: dim as usize })
        }
        "exp" => (WeightKind::Exp, sector(Sector::half_line())),
        "const" => {
            let value = params.first().copied().unwrap_or(1.0);
            if value <= 0.0 {
                return Err(Error::Argument("const weight must be positive".into()));
            }
            (WeightKind::Const { value }, sector(Sector::half_line()))
        }
        "exp-square" => (WeightKind::ExpSquare, sector(Sector::half_line())),
        "exp-recip" => (WeightKind::ExpRecip, Domain::Interval { lo: 0.0, hi: 1.0 }),
        other => return Err(Error::UnknownName(format!("weight {other}"))),
    };
    Ok(WeightFn { kind, domain })
}

/// Outcome of a sampled admissibility check of `ρ(t) ≤ M e^{ω|t′|} ρ(t+t′)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdmissReport {
    pub verdict: CheckVerdict,
    pub m_const: f64,
    pub omega: f64,
    /// Largest |t| on the sampled grid; the verdict says nothing beyond it.
    pub range: f64,
    pub pairs: usize,
    /// Largest ρ(t) / (e^{ω|t′|} ρ(t+t′)) seen, i.e. the M the grid demands.
    pub max_ratio: f64,
    /// A violating pair (t, t′) when refuted.
    pub witness: Option<(Cx, Cx)>,
}

const ADMISS_RANGE: f64 = 50.0;

/// Sector grid for the admissibility sweep: log-spaced radii (plus 0 for the
/// shift grid) across a small fan of directions.
fn sector_grid(sector: &Sector, n_radii: usize, include_zero: bool) -> Vec<Cx> {
    let mut radii = Vec::with_capacity(n_radii + 1);
    if include_zero {
        radii.push(0.0);
    }
    for i in 0..n_radii {
        let expo = -3.0 + (i as f64 / (n_radii - 1) as f64) * (ADMISS_RANGE.log10() + 3.0);
        radii.push(10f64.powf(expo));
    }
    let dirs: Vec<Cx> = if sector.dim() == 1 {
        if sector.is_half_line() {
            vec![Cx::new(1.0, 0.0)]
        } else {
            vec![Cx::new(1.0, 0.0), Cx::new(-1.0, 0.0)]
        }
    } else {
        let a = sector.half_angle();
        (0..5).map(|j| Cx::from_polar(1.0, -a + j as f64 * a / 2.0)).collect()
    };
    let mut out = Vec::with_capacity(radii.len() * dirs.len());
    for &r in &radii {
        for &d in &dirs {
            out.push(d * r);
            if r == 0.0 {
                break;
            }
        }
    }
    out
}

/// Sampled check of the translation-admissibility inequality at fixed (M, ω).
pub fn check_admissible(
    w: &WeightFn,
    m_const: f64,
    omega: f64,
    sample_budget: usize,
) -> Result<AdmissReport> {
    if m_const < 1.0 {
        return Err(Error::Argument("admissibility constant M must be ≥ 1".into()));
    }
    let sector = match &w.domain {
        Domain::Sector { sector } => *sector,
        _ => {
            return Err(Error::Argument(
                "admissibility is defined for sector-domain weights only".into(),
            ))
        }
    };
    let per_dir = if sector.dim() == 1 { 1.0 } else { 5.0 };
    let n_radii = (((sample_budget.max(1000) as f64).sqrt() / per_dir).ceil() as usize).max(8);
    let ts = sector_grid(&sector, n_radii, true);
    let shifts = sector_grid(&sector, n_radii, true);
    let mut max_ratio = 0.0f64;
    let mut witness = None;
    let mut pairs = 0usize;
    for &t in &ts {
        let rho_t = w.eval_c(t);
        if !rho_t.is_finite() {
            return Err(Error::Data(format!("weight not finite at {t}")));
        }
        for &tp in &shifts {
            pairs += 1;
            let rho_shift = w.eval_c(t + tp);
            if !rho_shift.is_finite() {
                return Err(Error::Data(format!("weight not finite at {}", t + tp)));
            }
            let ratio = rho_t / ((omega * tp.norm()).exp() * rho_shift);
            if ratio > max_ratio {
                max_ratio = ratio;
                if ratio > m_const * (1.0 + 1e-12) && witness.is_none() {
                    witness = Some((t, tp));
                }
            }
        }
    }
    // Witness is kept only if the final max violates; earlier provisional
    // maxima below M need no witness.
    let verdict = if max_ratio <= m_const * (1.0 + 1e-12) {
        CheckVerdict::Supported
    } else {
        CheckVerdict::Refuted
    };
    if verdict == CheckVerdict::Supported {
        witness = None;
    }
    Ok(AdmissReport {
        verdict,
        m_const,
        omega,
        range: ADMISS_RANGE,
        pairs,
        max_ratio,
        witness,
    })
}

/// Coarse search for a working (M, ω) over M ∈ {1,10,100}, ω ∈ 0..=8.
pub fn admissible_grid_search(w: &WeightFn, sample_budget: usize) -> Result<Option<(f64, f64)>> {
    for &m in &[1.0, 10.0, 100.0] {
        for omega in 0..=8 {
            let rep = check_admissible(w, m, omega as f64, sample_budget)?;
            if rep.verdict == CheckVerdict::Supported {
                return Ok(Some((m, omega as f64)));
            }
        }
    }
    Ok(None)
}
