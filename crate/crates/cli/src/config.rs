//! Experiment configuration: the JSON schema the `check` subcommand consumes
//! and its resolution into core objects.

use std::sync::Arc;

use sectorlab::criteria::SeriesBudget;
use sectorlab::dynamics::{semiflow_catalog, MarsFamily, Semiflow};
use sectorlab::error::{Error, Result};
use sectorlab::funcspace::{grid_for, Bump, GridFunction, SpaceTag};
use sectorlab::geometry::{truncate, Region, Sector};
use sectorlab::growth::{GrowthMap, Schedule, ScheduleKind};
use sectorlab::weights::{catalog, Domain, WeightFn};
use sectorlab::Cx;
use serde::{Deserialize, Serialize};

fn one() -> f64 {
    1.0
}

fn default_seed() -> u64 {
    7
}

fn default_k_values() -> Vec<u64> {
    vec![2, 8]
}

fn default_tuple_cap() -> usize {
    64
}

fn default_epsilons() -> Vec<f64> {
    vec![0.1, 0.01, 0.001]
}

fn default_doublings() -> usize {
    16
}

fn default_eps() -> f64 {
    0.5
}

fn default_compacts() -> Vec<(f64, f64)> {
    vec![(0.0, 1.0)]
}

/// Top-level experiment description. Unknown fields are rejected so typos
/// surface as schema errors instead of silently falling back to defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub space: SpaceConfig,
    pub dynamics: DynamicsConfig,
    pub growth: GrowthConfig,
    #[serde(default)]
    pub probes: ProbesConfig,
    pub horizons: HorizonsConfig,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceFamily {
    Lp,
    C0,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub family: SpaceFamily,
    #[serde(default = "one")]
    pub p: f64,
    pub weight: WeightConfig,
    /// Index sector of the semigroup; defaults to the weight's own domain
    /// when that is a sector and to the half line otherwise.
    #[serde(default)]
    pub sector: Option<SectorConfig>,
    /// Truncation radius of the working grid.
    pub radius: f64,
    pub resolution: f64,
    /// Compact sets the window conditions integrate over, as real intervals.
    #[serde(default = "default_compacts")]
    pub compacts: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub name: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SectorConfig {
    HalfLine,
    RealLine,
    FullPlane,
    Angle { alpha: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DynamicsConfig {
    /// Translation semigroup along the ray `t0·e^{i·angle}`.
    Translation {
        #[serde(default = "one")]
        t0: f64,
        #[serde(default)]
        angle: f64,
    },
    /// Operator sequence at explicit schedule times.
    Schedule { schedule: ScheduleConfig },
    /// Composition semigroup of a catalog semiflow; `t0`/`angle` give the
    /// ray the criterion times run along.
    Semiflow {
        name: String,
        #[serde(default)]
        params: Vec<f64>,
        #[serde(default = "one")]
        t0: f64,
        #[serde(default)]
        angle: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScheduleConfig {
    Table {
        times: Vec<(f64, f64)>,
        separation: f64,
        growth: GrowthConfig,
    },
    RayMultiples {
        step: f64,
        #[serde(default)]
        angle: f64,
        separation: f64,
        growth: GrowthConfig,
    },
    BranchCurve {
        separation: f64,
        growth: GrowthConfig,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthConfig {
    pub variant: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

impl GrowthConfig {
    pub fn resolve(&self) -> Result<GrowthMap> {
        let need = |i: usize| -> Result<f64> {
            self.params.get(i).copied().ok_or_else(|| {
                Error::Argument(format!("growth {} needs parameter {i}", self.variant))
            })
        };
        Ok(match self.variant.as_str() {
            "polynomial" => GrowthMap::PolynomialQ { q: need(0)? },
            "exp-pi" => GrowthMap::ExpPi { zeta: need(0)? },
            "affine" => GrowthMap::Affine,
            "tabulated" => {
                if self.params.len() < 4 || self.params.len() % 2 != 0 {
                    return Err(Error::Argument(
                        "tabulated growth needs flat (t, value) pairs, at least two".into(),
                    ));
                }
                let samples: Vec<(f64, f64)> =
                    self.params.chunks(2).map(|c| (c[0], c[1])).collect();
                GrowthMap::tabulated(samples)?
            }
            other => return Err(Error::UnknownName(format!("growth variant {other}"))),
        })
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbesConfig {
    pub bumps: Vec<BumpConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpConfig {
    pub center: f64,
    #[serde(default)]
    pub imag: f64,
    #[serde(default = "one")]
    pub radius: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HorizonsConfig {
    #[serde(default = "default_k_values")]
    pub k_values: Vec<u64>,
    pub n_max: usize,
    /// Partial-sum checkpoints; empty means the standard quartering ladder.
    #[serde(default)]
    pub ladder: Vec<usize>,
    #[serde(default)]
    pub tail_n_max: Option<usize>,
    #[serde(default)]
    pub tail_ladder: Vec<usize>,
    #[serde(default = "default_tuple_cap")]
    pub tuple_cap: usize,
    /// Sup tolerances for the uniform-family checks.
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    /// Radius doublings for the ray-decay check.
    #[serde(default = "default_doublings")]
    pub doublings: usize,
    /// Ray angles for the ray-decay check; empty derives a fan from the
    /// sector.
    #[serde(default)]
    pub fan: Vec<f64>,
    /// Tube half-widths for the tube-mass check; empty means `[1]`.
    #[serde(default)]
    pub ms: Vec<f64>,
    /// Tube caps; empty means quarter, half, and full grid radius.
    #[serde(default)]
    pub caps: Vec<f64>,
    /// Tail budget for the subsequence check.
    #[serde(default = "default_eps")]
    pub eps: f64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.space.radius.is_finite() && self.space.radius > 0.0) {
            return Err(Error::Argument("space.radius must be positive and finite".into()));
        }
        if !(self.space.resolution.is_finite() && self.space.resolution > 0.0) {
            return Err(Error::Argument("space.resolution must be positive and finite".into()));
        }
        if self.horizons.n_max == 0 {
            return Err(Error::Argument("horizons.n_max must be positive".into()));
        }
        self.weight()?;
        self.growth()?;
        Ok(())
    }

    pub fn weight(&self) -> Result<WeightFn> {
        catalog(&self.space.weight.name, &self.space.weight.params)
    }

    pub fn sector(&self) -> Result<Sector> {
        if let Some(s) = self.space.sector {
            return Ok(match s {
                SectorConfig::HalfLine => Sector::half_line(),
                SectorConfig::RealLine => Sector::real_line(),
                SectorConfig::FullPlane => Sector::full_plane(),
                SectorConfig::Angle { alpha } => Sector::angle(alpha)?,
            });
        }
        Ok(match self.weight()?.domain {
            Domain::Sector { sector } => sector,
            _ => Sector::half_line(),
        })
    }

    pub fn growth(&self) -> Result<GrowthMap> {
        self.growth.resolve()
    }

    pub fn budget(&self) -> SeriesBudget {
        let mut b = SeriesBudget::with_horizon(self.horizons.n_max).with_seed(self.seed);
        if !self.horizons.ladder.is_empty() {
            b.ladder = self.horizons.ladder.clone();
        }
        b
    }

    pub fn tail_budget(&self) -> Option<SeriesBudget> {
        let n_max = self.horizons.tail_n_max?;
        let mut b = SeriesBudget::with_horizon(n_max).with_seed(self.seed);
        if !self.horizons.tail_ladder.is_empty() {
            b.ladder = self.horizons.tail_ladder.clone();
        }
        Some(b)
    }

    /// The criterion time ray: `t0·e^{i·angle}` for translation and semiflow
    /// dynamics, an error for schedule dynamics (use [`Self::schedule`]).
    pub fn ray_time(&self) -> Result<Cx> {
        match &self.dynamics {
            DynamicsConfig::Translation { t0, angle }
            | DynamicsConfig::Semiflow { t0, angle, .. } => Ok(Cx::from_polar(*t0, *angle)),
            DynamicsConfig::Schedule { .. } => {
                Err(Error::Argument("schedule dynamics carry no single time ray".into()))
            }
        }
    }

    pub fn ray_angle(&self) -> f64 {
        match &self.dynamics {
            DynamicsConfig::Translation { angle, .. }
            | DynamicsConfig::Semiflow { angle, .. } => *angle,
            DynamicsConfig::Schedule { .. } => 0.0,
        }
    }

    pub fn schedule(&self) -> Result<Option<Schedule>> {
        let DynamicsConfig::Schedule { schedule } = &self.dynamics else {
            return Ok(None);
        };
        Ok(Some(match schedule {
            ScheduleConfig::Table { times, separation, growth } => Schedule {
                kind: ScheduleKind::Table {
                    times: times.iter().map(|&(re, im)| Cx::new(re, im)).collect(),
                },
                separation: *separation,
                growth: growth.resolve()?,
            },
            ScheduleConfig::RayMultiples { step, angle, separation, growth } => Schedule {
                kind: ScheduleKind::RayMultiples { step: Cx::from_polar(*step, *angle) },
                separation: *separation,
                growth: growth.resolve()?,
            },
            ScheduleConfig::BranchCurve { separation, growth } => Schedule {
                kind: ScheduleKind::BranchCurve,
                separation: *separation,
                growth: growth.resolve()?,
            },
        }))
    }

    pub fn flow(&self) -> Result<Option<Semiflow>> {
        let DynamicsConfig::Semiflow { name, params, .. } = &self.dynamics else {
            return Ok(None);
        };
        Ok(Some(semiflow_catalog(name, params)?))
    }

    pub fn family(&self) -> MarsFamily {
        match self.space.family {
            SpaceFamily::Lp => MarsFamily::Lp,
            SpaceFamily::C0 => MarsFamily::C0,
        }
    }

    pub fn tag(&self) -> Result<SpaceTag> {
        let w = self.weight()?;
        Ok(match self.space.family {
            SpaceFamily::Lp => SpaceTag::lp(self.space.p, w)?,
            SpaceFamily::C0 => SpaceTag::c0(w),
        })
    }

    /// Working grid over the weight's domain, truncated at the configured
    /// radius.
    pub fn grid(&self) -> Result<Arc<Region>> {
        let domain = self.weight()?.domain;
        Ok(Arc::new(grid_for(&domain, self.space.radius, self.space.resolution)?))
    }

    /// The configured compacts as 1-D interval regions.
    pub fn regions_1d(&self) -> Result<Vec<Region>> {
        self.space
            .compacts
            .iter()
            .map(|&(lo, hi)| {
                Region::from_intervals_1d(&[(lo, hi)], self.space.resolution, self.space.radius)
            })
            .collect()
    }

    /// Compacts for a flow's state domain: intervals for one-dimensional
    /// states, a truncated sector patch for two-dimensional ones (radius =
    /// the largest compact endpoint).
    pub fn regions_for_flow(&self, flow: &Semiflow) -> Result<Vec<Region>> {
        if flow.dim() == 1 {
            return self.regions_1d();
        }
        let radius = self
            .space
            .compacts
            .iter()
            .map(|&(_, hi)| hi)
            .fold(0.0_f64, f64::max)
            .max(self.space.resolution * 4.0);
        let sector = match flow.state_domain()? {
            Domain::Sector { sector } => sector,
            _ => self.sector()?,
        };
        Ok(vec![truncate(sector, radius, self.space.resolution)?])
    }

    /// Probe vectors on the working grid; the standard three unit bumps at
    /// 2, 3, and 5 when the config lists none.
    pub fn probes(&self) -> Result<Vec<GridFunction>> {
        let tag = self.tag()?;
        let grid = self.grid()?;
        let bumps: Vec<BumpConfig> = if self.probes.bumps.is_empty() {
            [2.0, 3.0, 5.0]
                .iter()
                .map(|&c| BumpConfig { center: c, imag: 0.0, radius: 1.0, amplitude: 1.0 })
                .collect()
        } else {
            self.probes.bumps.clone()
        };
        bumps
            .iter()
            .map(|b| {
                Ok(Bump::new(Cx::new(b.center, b.imag), b.radius, b.amplitude)?
                    .to_grid(tag.clone(), grid.clone()))
            })
            .collect()
    }

    /// Ray fan for the decay check: configured angles, else a symmetric fan
    /// across the sector.
    pub fn fan(&self) -> Result<Vec<f64>> {
        if !self.horizons.fan.is_empty() {
            return Ok(self.horizons.fan.clone());
        }
        let a = self.sector()?.half_angle();
        if a == 0.0 {
            return Ok(vec![0.0]);
        }
        Ok(vec![-a, -a / 2.0, 0.0, a / 2.0, a])
    }

    /// Tube caps: configured, else quarter/half/full grid radius.
    pub fn caps(&self) -> Vec<f64> {
        if !self.horizons.caps.is_empty() {
            return self.horizons.caps.clone();
        }
        let r = self.space.radius;
        vec![r / 4.0, r / 2.0, r]
    }

    pub fn ms(&self) -> Vec<f64> {
        if self.horizons.ms.is_empty() {
            vec![1.0]
        } else {
            self.horizons.ms.clone()
        }
    }
}
