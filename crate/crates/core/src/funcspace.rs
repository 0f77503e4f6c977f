//! Discretized elements of the weighted function spaces: grid functions, their
//! norms and metric, bump profiles, and a countable dense-candidate generator.

use crate::error::{Error, Result};
use crate::geometry::{self, Region, Sector};
use crate::weights::{Domain, WeightFn, WeightKind};
use crate::Cx;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum Family {
    /// Weighted Lebesgue space with exponent `p ≥ 1`.
    LpRho { p: f64 },
    /// Weighted sup-norm space of functions vanishing at infinity.
    C0Rho,
}

/// Which space a grid function belongs to: the family plus its weight (the
/// weight's domain is the function's domain).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTag {
    pub family: Family,
    pub weight: WeightFn,
}

impl SpaceTag {
    pub fn lp(p: f64, weight: WeightFn) -> Result<Self> {
        if p < 1.0 {
            return Err(Error::Argument(format!("Lp exponent must be ≥ 1, got {p}")));
        }
        Ok(SpaceTag { family: Family::LpRho { p }, weight })
    }

    pub fn c0(weight: WeightFn) -> Self {
        SpaceTag { family: Family::C0Rho, weight }
    }
}

/// Build the default quadrature grid for a domain, truncated at `radius`.
pub fn grid_for(domain: &Domain, radius: f64, resolution: f64) -> Result<Region> {
    match domain {
        Domain::Sector { sector } => geometry::truncate(*sector, radius, resolution),
        Domain::Interval { lo, hi } => {
            let hi_c = hi.min(lo + radius);
            if hi_c <= *lo {
                return Err(Error::Argument(format!("empty interval grid ({lo}, {hi_c})")));
            }
            let n = ((hi_c - lo) / resolution).ceil() as usize;
            let sector = if *lo >= 0.0 { Sector::half_line() } else { Sector::real_line() };
            Region::uniform_1d(sector, *lo, (hi_c - lo) / n as f64, n)
        }
        Domain::Plane { dim: 1 } => {
            let n = (2.0 * radius / resolution).ceil() as usize;
            Region::uniform_1d(Sector::real_line(), -radius, 2.0 * radius / n as f64, n)
        }
        Domain::Plane { dim: 2 } => geometry::truncate(Sector::full_plane(), radius, resolution),
        Domain::Plane { dim } => {
            Err(Error::Argument(format!("grids support dimension ≤ 2, got {dim}")))
        }
        Domain::ExteriorDisk { radius: r0 } => {
            if radius <= *r0 {
                return Err(Error::Argument(format!(
                    "truncation radius {radius} must exceed the excluded disk {r0}"
                )));
            }
            geometry::annulus(*r0, radius, resolution)
        }
    }
}

/// A function known by its values at the cell centers of a fixed grid.
#[derive(Debug, Clone)]
pub struct GridFunction {
    pub tag: SpaceTag,
    pub grid: Arc<Region>,
    pub values: Vec<f64>,
    /// Radius beyond which the function is (claimed) zero.
    pub support_radius: f64,
    /// Set when an operation discarded mass (support left the truncation).
    pub note: Option<String>,
}

impl GridFunction {
    pub fn zeros(tag: SpaceTag, grid: Arc<Region>) -> Self {
        let n = grid.cells.len();
        GridFunction { tag, grid, values: vec![0.0; n], support_radius: 0.0, note: None }
    }

    /// Sample a closed-form function at the cell centers.
    pub fn sample(tag: SpaceTag, grid: Arc<Region>, f: impl Fn(Cx) -> f64) -> Self {
        let values: Vec<f64> = grid.cells.iter().map(|c| f(c.center)).collect();
        let support_radius = grid
            .cells
            .iter()
            .zip(&values)
            .filter(|(_, v)| **v != 0.0)
            .map(|(c, _)| c.center.norm())
            .fold(0.0, f64::max);
        GridFunction { tag, grid, values, support_radius, note: None }
    }

    fn check_mate(&self, other: &GridFunction) -> Result<()> {
        if self.tag != other.tag {
            return Err(Error::Shape("space tags differ".into()));
        }
        if !Arc::ptr_eq(&self.grid, &other.grid) && self.grid.cells.len() != other.grid.cells.len()
        {
            return Err(Error::Shape(format!(
                "grids differ: {} vs {} cells",
                self.grid.cells.len(),
                other.grid.cells.len()
            )));
        }
        Ok(())
    }

    /// `self += c · other` cellwise.
    pub fn add_scaled(&mut self, other: &GridFunction, c: f64) -> Result<()> {
        self.check_mate(other)?;
        for (v, o) in self.values.iter_mut().zip(&other.values) {
            *v += c * o;
        }
        self.support_radius = self.support_radius.max(other.support_radius);
        Ok(())
    }

    pub fn scale(&mut self, c: f64) {
        for v in self.values.iter_mut() {
            *v *= c;
        }
    }

    /// Cellwise difference as a new function.
    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_mate(other)?;
        let mut out = self.clone();
        for (v, o) in out.values.iter_mut().zip(&other.values) {
            *v -= o;
        }
        out.support_radius = self.support_radius.max(other.support_radius);
        Ok(out)
    }

    /// The space norm of the grid values (midpoint quadrature for Lp).
    pub fn norm(&self) -> Result<f64> {
        if self.values.len() != self.grid.cells.len() {
            return Err(Error::Shape(format!(
                "{} values on a {}-cell grid",
                self.values.len(),
                self.grid.cells.len()
            )));
        }
        let w = &self.tag.weight;
        match self.tag.family {
            Family::LpRho { p } => {
                let mut acc = 0.0;
                for (cell, v) in self.grid.cells.iter().zip(&self.values) {
                    if *v != 0.0 {
                        acc += v.abs().powf(p) * w.eval_c(cell.center) * cell.weight;
                    }
                }
                Ok(acc.powf(1.0 / p))
            }
            Family::C0Rho => {
                let mut acc = 0.0f64;
                for (cell, v) in self.grid.cells.iter().zip(&self.values) {
                    acc = acc.max(v.abs() * w.eval_c(cell.center));
                }
                Ok(acc)
            }
        }
    }

    /// Translation-invariant metric `‖x−y‖/(1+‖x−y‖)`: the Fréchet sum for the
    /// single-seminorm family in closed form.
    pub fn metric(&self, other: &GridFunction) -> Result<f64> {
        let d = self.sub(other)?.norm()?;
        Ok(d / (1.0 + d))
    }

    /// Quadrature tolerance declared for bump-scale functions on this grid.
    pub fn quad_tolerance(&self) -> f64 {
        let step = match self.grid.layout {
            geometry::Layout::Uniform1D { step, .. } => step,
            geometry::Layout::Polar { dr, .. } => dr,
            geometry::Layout::Irregular => {
                self.grid.cells.iter().map(|c| c.weight).fold(0.0, f64::max)
            }
        };
        let vmax = self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        10.0 * step * vmax.max(1e-300)
    }

    /// CSV rows `re,im,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,value\n");
        for (cell, v) in self.grid.cells.iter().zip(&self.values) {
            out.push_str(&format!("{},{},{}\n", cell.center.re, cell.center.im, v));
        }
        out
    }
}

/// Fréchet combination `Σ 2^{-n} p_n/(1+p_n)` of a finite seminorm family.
pub fn frechet_metric(seminorms: &[f64]) -> f64 {
    seminorms
        .iter()
        .enumerate()
        .map(|(i, &p)| 0.5f64.powi(i as i32 + 1) * p / (1.0 + p))
        .sum()
}

/// Analytic tail integral `∫_{|t|>R} ρ` for weights with closed-form tails.
pub fn weight_tail_integral(w: &WeightFn, from: f64) -> Option<f64> {
    match (&w.kind, &w.domain) {
        (WeightKind::Exp, _) => Some((-from).exp()),
        (WeightKind::PolynomialS { s }, _) if *s > 1.0 => {
            Some((1.0 + from).powf(1.0 - s) / (s - 1.0))
        }
        (WeightKind::InvQuadratic, Domain::Plane { dim: 1 }) => {
            Some(2.0 * (std::f64::consts::FRAC_PI_2 - from.atan()))
        }
        _ => None,
    }
}

/// Compactly supported hat: `amplitude · (1 − (d/radius)²)²` for `d < radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Cx,
    pub radius: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn new(center: Cx, radius: f64, amplitude: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::Argument(format!("bump radius must be positive, got {radius}")));
        }
        Ok(Bump { center, radius, amplitude })
    }

    pub fn eval(&self, z: Cx) -> f64 {
        let u = (z - self.center).norm() / self.radius;
        if u >= 1.0 {
            0.0
        } else {
            let q = 1.0 - u * u;
            self.amplitude * q * q
        }
    }

    pub fn to_grid(&self, tag: SpaceTag, grid: Arc<Region>) -> GridFunction {
        let mut gf = GridFunction::sample(tag, grid, |z| self.eval(z));
        gf.support_radius = self.center.norm() + self.radius;
        gf
    }
}

fn triangular(d: u64) -> u64 {
    d * (d + 1) / 2
}

/// Inverse of the 0-based diagonal pairing `(i,j) ↦ T(i+j)+i`.
fn unpair(z: u64) -> (u64, u64) {
    let d = (((8.0 * z as f64 + 1.0).sqrt() - 1.0) / 2.0).floor() as u64;
    // Float rounding can land one diagonal off; fix up exactly.
    let d = if triangular(d + 1) <= z {
        d + 1
    } else if triangular(d) > z {
        d - 1
    } else {
        d
    };
    let i = z - triangular(d);
    (i, d - i)
}

const ATOM_AMPS: [f64; 8] = [1.0, 0.5, 0.875, 0.25, 0.75, 0.125, -1.0, -0.5];

fn dyadic(u: u64) -> (f64, u64) {
    let (num, e) = unpair(u);
    let den_exp = e % 5;
    (num as f64 * 0.5f64.powi(den_exp as i32), e / 5)
}

/// Atom `k` of the enumeration: one bump with dyadic parameters.
fn atom(domain: &Domain, k: u64) -> Bump {
    let (p, q) = unpair(k);
    let radius = 2.0 * 0.5f64.powi((q % 5) as i32);
    let amplitude = ATOM_AMPS[((q / 5) % 8) as usize];
    let center = match domain {
        Domain::Sector { sector } if sector.dim() == 2 => {
            let (pr, pa) = unpair(p);
            let (r, _) = dyadic(pr);
            let a = sector.half_angle();
            let theta = -a + a * (pa % 9) as f64 / 4.0;
            Cx::from_polar(r, theta)
        }
        Domain::Sector { sector } => {
            let (c, spill) = dyadic(p);
            let sign = if !sector.is_half_line() && spill % 2 == 1 { -1.0 } else { 1.0 };
            Cx::new(sign * c, 0.0)
        }
        Domain::Interval { lo, .. } => {
            let (c, _) = dyadic(p);
            Cx::new(lo + c, 0.0)
        }
        Domain::Plane { dim: 1 } => {
            let (c, spill) = dyadic(p);
            let sign = if spill % 2 == 1 { -1.0 } else { 1.0 };
            Cx::new(sign * c, 0.0)
        }
        Domain::Plane { .. } | Domain::ExteriorDisk { .. } => {
            let (pr, pa) = unpair(p);
            let (r, _) = dyadic(pr);
            let theta = std::f64::consts::PI * (pa % 8) as f64 / 4.0;
            Cx::from_polar(r, theta)
        }
    };
    Bump { center, radius, amplitude }
}

/// Deterministic enumeration of finite bump combinations, dense in practice:
/// even offsets are single dyadic atoms, odd offsets split into two earlier
/// indices and add them. Every call with the same `(tag, n)` reproduces the
/// same values.
pub fn dense_sequence(tag: &SpaceTag, grid: &Arc<Region>, n: u64) -> Result<GridFunction> {
    if n == 0 {
        return Err(Error::Argument("dense_sequence indices start at 1".into()));
    }
    let m = n - 1;
    if m % 2 == 0 {
        let b = atom(&tag.weight.domain, m / 2);
        Ok(b.to_grid(tag.clone(), Arc::clone(grid)))
    } else {
        let (i, j) = unpair((m - 1) / 2);
        let mut left = dense_sequence(tag, grid, i + 1)?;
        let right = dense_sequence(tag, grid, j + 1)?;
        left.add_scaled(&right, 1.0)?;
        Ok(left)
    }
}
