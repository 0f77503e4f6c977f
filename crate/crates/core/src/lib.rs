//! Numerical laboratory for orbit density of strongly continuous operator
//! semigroups acting on weighted function spaces over complex sectors.
//!
//! The crate provides:
//!
//! * [`geometry`]: sectors, rays, and finite cell regions with a measure.
//! * [`growth`]: monotone growth maps, integer schedules, and pairing tools.
//! * [`weights`]: admissible weight functions and their zero extensions.
//! * [`funcspace`]: weighted `L^p` / vanishing-sup spaces on truncated grids.
//! * [`dynamics`]: translation and composition semigroups plus semiflows.
//! * [`densities`]: lower density functionals for index sets and regions.
//! * [`criteria`]: numerical checkers for the frequent-orbit criteria.
//! * [`orbits`]: orbit sweeps, hit bookkeeping, and vector construction.
//! * [`report`]: serializable verdicts and evidence bundles.
//!
//! All checkers are diagnostics at a finite horizon, not proofs: verdicts are
//! `Supported`, `Refuted` (with a finite witness), or `Inconclusive`.

pub mod criteria;
pub mod densities;
pub mod dynamics;
pub mod error;
pub mod funcspace;
pub mod geometry;
pub mod growth;
pub mod orbits;
pub mod proxy;
pub mod report;
pub mod weights;

pub use error::{Error, Result};

/// Complex scalar used for points of sectors and for semigroup time steps.
pub type Cx = num_complex::Complex64;
