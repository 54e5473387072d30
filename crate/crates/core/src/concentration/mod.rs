//! Concentration function, separation function, observable diameter and the
//! soft-margin error.
//!
//! Every quantity comes in two flavours. The exact oracles enumerate subsets
//! and refuse spaces above a fixed size. The heuristics run at any size and
//! only ever report values realised by an explicit witness, so they are
//! certified lower bounds on the exact quantity.

mod alpha;
mod hamming;
mod margin;
mod obsdiam;
mod separation;

pub use alpha::{alpha_exact, alpha_exact_profile, alpha_lower, ALPHA_EXACT_LIMIT};
pub use hamming::{sep_hamming_analytic, sep_hamming_ball_witness, sep_hamming_profile, MAX_ANALYTIC_HAMMING_DIM};
pub use margin::margin_error;
pub use obsdiam::{feature_obs_diam, observable_diameter};
pub use separation::{sep_exact, sep_exact_profile, sep_lower, SEP_EXACT_LIMIT};

use crate::{Error, MMSpace, Result};
use serde::{Deserialize, Serialize};

/// How a profile value relates to the true quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    LowerBound,
    /// Closed form, exact.
    Analytic,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::LowerBound => "lower_bound",
            Mode::Analytic => "analytic",
        }
    }

    pub fn is_exact(self) -> bool {
        !matches!(self, Mode::LowerBound)
    }
}

/// Provenance of an ε grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    /// Every distinct realised distance, 0 included. An α profile on this
    /// grid determines α everywhere: it is a right-continuous step function
    /// that can only jump at realised distances.
    RealizedDistances,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationProfile {
    pub eps_grid: Vec<f64>,
    pub alpha: Vec<f64>,
    /// `α(0+)`, the limit from the right at 0. It falls below the convention
    /// value `α(0) = 1/2` when no subset has mass exactly 1/2.
    pub alpha_zero_plus: f64,
    pub mode: Mode,
    pub grid_kind: GridKind,
    pub diameter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationProfile {
    pub kappa_grid: Vec<f64>,
    pub sep: Vec<f64>,
    pub mode: Mode,
}

fn non_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0])
}

impl ConcentrationProfile {
    pub(crate) fn new(
        eps_grid: Vec<f64>,
        alpha: Vec<f64>,
        alpha_zero_plus: f64,
        mode: Mode,
        grid_kind: GridKind,
        diameter: f64,
    ) -> Result<Self> {
        if !non_increasing(&alpha) {
            return Err(Error::Invariant("concentration profile is not non-increasing".into()));
        }
        Ok(ConcentrationProfile {
            eps_grid,
            alpha,
            alpha_zero_plus,
            mode,
            grid_kind,
            diameter,
        })
    }

    /// Step evaluation: the value at the largest grid point `<= eps`, with
    /// `α(0+)` standing in below the first positive grid point.
    pub fn at(&self, eps: f64) -> f64 {
        if eps == 0.0 {
            return 0.5;
        }
        let k = self.eps_grid.partition_point(|&g| g <= eps);
        if k == 0 || self.eps_grid[k - 1] == 0.0 {
            self.alpha_zero_plus
        } else {
            self.alpha[k - 1]
        }
    }

    pub fn len(&self) -> usize {
        self.eps_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps_grid.is_empty()
    }
}

impl SeparationProfile {
    pub(crate) fn new(kappa_grid: Vec<f64>, sep: Vec<f64>, mode: Mode) -> Result<Self> {
        if !non_increasing(&sep) {
            return Err(Error::Invariant("separation profile is not non-increasing".into()));
        }
        Ok(SeparationProfile { kappa_grid, sep, mode })
    }

    pub fn len(&self) -> usize {
        self.kappa_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappa_grid.is_empty()
    }
}

/// Default number of κ grid points.
pub const DEFAULT_KAPPA_STEPS: usize = 50;

/// `{ i / (2m) : i = 1..m }`.
pub fn kappa_grid(m: usize) -> Vec<f64> {
    (1..=m).map(|i| i as f64 / (2 * m) as f64).collect()
}

/// The sorted distinct realised distances.
pub fn default_eps_grid(space: &MMSpace) -> Vec<f64> {
    space.distinct_distances()
}

/// `steps + 1` equally spaced points over `[0, hi]`.
pub fn uniform_grid(hi: f64, steps: usize) -> Vec<f64> {
    let steps = steps.max(1);
    (0..=steps).map(|i| hi * i as f64 / steps as f64).collect()
}

/// Half the smallest positive distance: a radius whose closed
/// neighbourhoods are the sets themselves. 1 when there is no positive
/// distance (every neighbourhood is then the whole space).
pub(crate) fn zero_plus_radius(space: &MMSpace) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..space.len() {
        for j in (i + 1)..space.len() {
            let d = space.dist(i, j);
            if d > 0.0 && d < best {
                best = d;
            }
        }
    }
    if best.is_finite() {
        best / 2.0
    } else {
        1.0
    }
}

pub(crate) fn check_eps_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::param("eps grid", "empty", "at least one value"));
    }
    if grid.iter().any(|e| !(e.is_finite() && *e >= 0.0)) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("eps grid", format!("{grid:?}"), "strictly ascending non-negative values"));
    }
    Ok(())
}

pub(crate) fn check_kappa_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::param("kappa grid", "empty", "at least one value"));
    }
    if grid.iter().any(|k| !(*k > 0.0 && *k <= 0.5)) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("kappa grid", format!("{grid:?}"), "strictly ascending values in (0, 1/2]"));
    }
    Ok(())
}
