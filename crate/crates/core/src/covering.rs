//! ε-nets, covering numbers and the sample-size bound built from them.

use crate::mmspace::io::write_csv;
use crate::{Error, MMSpace, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Farthest-point-first ordering.
///
/// `order[0]` minimises eccentricity; `order[k]` is a point farthest from
/// `order[..k]`, and `added_at[k]` is that distance (`+inf` for `k = 0`).
/// The first `k` points are then pairwise at least `added_at[k-1]` apart,
/// and every point lies within `cover_radius[k-1]` of them.
#[derive(Debug, Clone, PartialEq)]
pub struct FarthestFirst {
    pub order: Vec<usize>,
    pub added_at: Vec<f64>,
    /// `cover_radius[k]` = max distance to the first `k + 1` centres.
    pub cover_radius: Vec<f64>,
}

impl FarthestFirst {
    /// Runs the ordering until the covering radius drops below `stop` (use
    /// 0 for the full ordering).
    pub fn build(space: &MMSpace, stop: f64) -> Self {
        let n = space.len();
        let first = space.min_eccentricity_point();
        let mut nearest: Vec<f64> = (0..n).map(|x| space.dist(x, first)).collect();
        let mut order = vec![first];
        let mut added_at = vec![f64::INFINITY];
        let mut cover_radius = Vec::new();
        loop {
            let (far, r) = nearest
                .iter()
                .enumerate()
                .fold((0, -1.0), |best, (i, &d)| if d > best.1 { (i, d) } else { best });
            cover_radius.push(r);
            if r <= 0.0 || r < stop || order.len() == n {
                break;
            }
            order.push(far);
            added_at.push(r);
            for x in 0..n {
                nearest[x] = nearest[x].min(space.dist(x, far));
            }
        }
        FarthestFirst {
            order,
            added_at,
            cover_radius,
        }
    }

    /// Size of the shortest prefix whose open `u`-balls cover the space.
    pub fn net_size(&self, u: f64) -> usize {
        self.cover_radius.iter().position(|&r| r < u).map_or(self.order.len(), |k| k + 1)
    }

    /// Largest prefix whose points are pairwise `>= 2u` apart: no open
    /// `u`-ball holds two of them, so at least that many balls are needed.
    pub fn packing_size(&self, u: f64) -> usize {
        self.added_at.iter().take_while(|&&r| r >= 2.0 * u).count()
    }
}

/// Farthest-point-first net: every point is at distance `< u` from a net
/// point, and net points are pairwise `>= u` apart.
pub fn greedy_net(space: &MMSpace, u: f64) -> Result<Vec<usize>> {
    if !(u > 0.0) {
        return Err(Error::param("u", u, "a positive radius"));
    }
    let ff = FarthestFirst::build(space, u);
    let k = ff.net_size(u);
    Ok(ff.order[..k].to_vec())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringProfile {
    pub u_grid: Vec<f64>,
    /// Greedy net sizes: upper bounds on the covering number.
    pub n_upper: Vec<u64>,
    /// Packing sizes: lower bounds on the covering number.
    pub n_lower: Vec<u64>,
}

pub fn covering_profile(space: &MMSpace, u_grid: &[f64]) -> Result<CoveringProfile> {
    if u_grid.is_empty() || u_grid.iter().any(|&u| !(u > 0.0 && u.is_finite())) || u_grid.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::param("u grid", format!("{u_grid:?}"), "strictly ascending positive radii"));
    }
    let ff = FarthestFirst::build(space, u_grid[0]);
    Ok(CoveringProfile {
        u_grid: u_grid.to_vec(),
        n_upper: u_grid.iter().map(|&u| ff.net_size(u) as u64).collect(),
        n_lower: u_grid.iter().map(|&u| ff.packing_size(u) as u64).collect(),
    })
}

/// `count` log-spaced radii over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

pub fn write_profile(path: &Path, p: &CoveringProfile) -> Result<()> {
    let rows: Vec<Vec<String>> = (0..p.u_grid.len())
        .map(|k| {
            vec![
                crate::mmspace::io::fmt_f64(p.u_grid[k]),
                p.n_upper[k].to_string(),
                p.n_lower[k].to_string(),
            ]
        })
        .collect();
    write_csv(path, &["u", "n_upper", "n_lower"], &rows)
}

/// Quadrature nodes over the integration range.
pub const QUADRATURE_NODES: usize = 200;

/// The evaluated sample-size bound with its parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSizeBound {
    pub n: f64,
    pub n_ceil: u64,
    pub eps: f64,
    pub delta: f64,
    pub constant_c: f64,
    pub log_term: f64,
    pub integral_term: f64,
    pub lower_limit: f64,
    pub upper_limit: f64,
}

/// Covering number at radius `r` from the profile: the value at the largest
/// grid radius `<= r`, which over-counts (covering numbers shrink as the
/// radius grows).
fn covering_at(profile: &CoveringProfile, r: f64) -> Result<f64> {
    let k = profile.u_grid.partition_point(|&u| u <= r);
    if k == 0 {
        return Err(Error::CoverageGap {
            needed: r,
            available: profile.u_grid[0],
        });
    }
    Ok(profile.n_upper[k - 1] as f64)
}

/// `n >= (C / ε^4) max{ log(2/δ), ∫_(ε²/8)^4 sqrt(N(u/4) log(4/u + 1)) du }`,
/// with the integral by the trapezoid rule on log-spaced nodes.
pub fn sample_size_bound(eps: f64, delta: f64, profile: &CoveringProfile, constant_c: f64) -> Result<SampleSizeBound> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param("eps", eps, "a value in (0, 1)"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta", delta, "a value in (0, 1)"));
    }
    if !(constant_c > 0.0 && constant_c.is_finite()) {
        return Err(Error::param("C", constant_c, "a positive finite number"));
    }
    if profile.u_grid.is_empty() {
        return Err(Error::param("covering profile", "empty", "at least one radius"));
    }
    let (lo, hi) = (eps * eps / 8.0, 4.0);
    let nodes = log_grid(lo, hi, QUADRATURE_NODES);
    let f = |u: f64| -> Result<f64> { Ok((covering_at(profile, u / 4.0)? * (4.0 / u + 1.0).ln()).sqrt()) };
    let values = nodes.iter().map(|&u| f(u)).collect::<Result<Vec<f64>>>()?;
    let integral: f64 = nodes
        .windows(2)
        .zip(values.windows(2))
        .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / 2.0)
        .sum();
    let log_term = (2.0 / delta).ln();
    let n = constant_c / eps.powi(4) * log_term.max(integral);
    Ok(SampleSizeBound {
        n,
        n_ceil: if n >= u64::MAX as f64 { u64::MAX } else { n.ceil() as u64 },
        eps,
        delta,
        constant_c,
        log_term,
        integral_term: integral,
        lower_limit: lo,
        upper_limit: hi,
    })
}
