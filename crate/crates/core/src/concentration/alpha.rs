use super::{check_eps_grid, zero_plus_radius, ConcentrationProfile, GridKind, Mode};
use crate::features::Feature;
use crate::measure::at_least;
use crate::{Error, MMSpace, Result};
use rayon::prelude::*;

/// Largest space handled by subset enumeration.
pub const ALPHA_EXACT_LIMIT: usize = 22;

fn check_exact_size(space: &MMSpace) -> Result<()> {
    if space.len() > ALPHA_EXACT_LIMIT {
        return Err(Error::OracleTooLarge {
            what: "concentration function",
            n: space.len(),
            limit: ALPHA_EXACT_LIMIT,
            alternative: "alpha_lower",
        });
    }
    Ok(())
}

/// `mass[m]` = measure of the subset with bitmask `m`. Each entry is the sum
/// of its weights in descending index order, which witness code reproduces
/// so that both sides round identically.
fn mass_table(w: &[f64]) -> Vec<f64> {
    let n = w.len();
    let mut t = vec![0.0; 1 << n];
    for m in 1..(1usize << n) {
        t[m] = t[m & (m - 1)] + w[m.trailing_zeros() as usize];
    }
    t
}

fn alpha_from_table(space: &MMSpace, mass: &[f64], eps: f64) -> f64 {
    if eps == 0.0 {
        return 0.5;
    }
    let n = space.len();
    let full = (1usize << n) - 1;
    let balls: Vec<usize> = (0..n)
        .map(|i| (0..n).filter(|&j| space.dist(i, j) <= eps).fold(0, |m, j| m | (1 << j)))
        .collect();
    let mut nb = vec![0usize; 1 << n];
    let mut best = 0.0f64;
    for m in 1..=full {
        nb[m] = nb[m & (m - 1)] | balls[m.trailing_zeros() as usize];
        if at_least(mass[m], 0.5) {
            best = best.max(mass[full & !nb[m]]);
        }
    }
    best.min(0.5)
}

/// Exact `α(ε)` by enumerating every subset of measure at least 1/2, with
/// closed neighbourhoods `A_ε = {x : d(x, A) <= ε}`.
pub fn alpha_exact(space: &MMSpace, eps: f64) -> Result<f64> {
    check_exact_size(space)?;
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::param("eps", eps, "a finite non-negative number"));
    }
    Ok(alpha_from_table(space, &mass_table(space.weights()), eps))
}

fn grid_kind(space: &MMSpace, grid: &[f64]) -> GridKind {
    if grid == space.distinct_distances().as_slice() {
        GridKind::RealizedDistances
    } else {
        GridKind::Custom
    }
}

pub fn alpha_exact_profile(space: &MMSpace, eps_grid: &[f64]) -> Result<ConcentrationProfile> {
    check_exact_size(space)?;
    check_eps_grid(eps_grid)?;
    let mass = mass_table(space.weights());
    let alpha = eps_grid.par_iter().map(|&e| alpha_from_table(space, &mass, e)).collect();
    let zero_plus = alpha_from_table(space, &mass, zero_plus_radius(space));
    ConcentrationProfile::new(
        eps_grid.to_vec(),
        alpha,
        zero_plus,
        Mode::Exact,
        grid_kind(space, eps_grid),
        space.diameter(),
    )
}

/// Sum of weights of the selected points, descending index order.
fn mass_desc(w: &[f64], select: impl Fn(usize) -> bool) -> f64 {
    (0..w.len()).rev().filter(|&i| select(i)).fold(0.0, |acc, i| acc + w[i])
}

fn sublevel(f: &[f64], w: &[f64], upper: bool) -> Vec<bool> {
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| f[a].total_cmp(&f[b]));
    if upper {
        order.reverse();
    }
    let mut cum = 0.0;
    let mut cut = f[order[order.len() - 1]];
    for &i in &order {
        cum += w[i];
        if at_least(cum, 0.5) {
            cut = f[i];
            break;
        }
    }
    (0..f.len()).map(|i| if upper { f[i] >= cut } else { f[i] <= cut }).collect()
}

/// The first points in ascending `f` order (ties by index) until the mass
/// reaches 1/2. Unlike a sublevel set this can split a level of `f`.
fn prefix(f: &[f64], w: &[f64]) -> Vec<bool> {
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
    let mut set = vec![false; f.len()];
    let mut cum = 0.0;
    for &i in &order {
        set[i] = true;
        cum += w[i];
        if at_least(cum, 0.5) {
            break;
        }
    }
    set
}

fn balanced_ball(space: &MMSpace, c: usize) -> Vec<bool> {
    let n = space.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| space.dist(c, a).total_cmp(&space.dist(c, b)));
    let w = space.weights();
    let mut cum = 0.0;
    let mut radius = space.dist(c, order[n - 1]);
    for &i in &order {
        cum += w[i];
        if at_least(cum, 0.5) {
            radius = space.dist(c, i);
            break;
        }
    }
    (0..n).map(|i| space.dist(c, i) <= radius).collect()
}

fn witness_sets(space: &MMSpace, dictionary: &[Feature]) -> Vec<Vec<bool>> {
    let n = space.len();
    let w = space.weights();
    let mut sets = Vec::new();
    for f in dictionary {
        sets.push(sublevel(f.values(), w, false));
        sets.push(sublevel(f.values(), w, true));
        sets.push(prefix(f.values(), w));
    }
    let centres: Vec<usize> = if n <= 64 {
        (0..n).collect()
    } else {
        (0..16).map(|k| k * n / 16).collect()
    };
    for c in centres {
        sets.push(balanced_ball(space, c));
    }
    // only sets that are admissible under the same test as the oracle
    sets.retain(|a| at_least(mass_desc(w, |i| a[i]), 0.5));
    // a sublevel set and its prefix coincide when the median level is a single point
    sets.sort_unstable();
    sets.dedup();
    sets
}

/// Lower bound on `α` over `eps_grid`: each witness set `A` of measure at
/// least 1/2 certifies `α(ε) >= μ{x : d(x, A) > ε}`. Witnesses are the
/// sublevel and superlevel sets of the dictionary features at their
/// medians, the lightest half-mass prefixes in feature order, and
/// weight-balanced balls.
pub fn alpha_lower(space: &MMSpace, eps_grid: &[f64], dictionary: &[Feature]) -> Result<ConcentrationProfile> {
    check_eps_grid(eps_grid)?;
    for f in dictionary {
        if f.len() != space.len() {
            return Err(Error::LengthMismatch {
                what: "dictionary feature",
                expected: space.len(),
                found: f.len(),
            });
        }
    }
    let n = space.len();
    let w = space.weights();
    let sets = witness_sets(space, dictionary);
    let r0 = zero_plus_radius(space);
    let mut alpha = vec![0.0f64; eps_grid.len()];
    let mut zero_plus = 0.0f64;
    for a in &sets {
        let members: Vec<usize> = (0..n).filter(|&i| a[i]).collect();
        let d_a: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|x| {
                if a[x] {
                    0.0
                } else {
                    members.iter().map(|&m| space.dist(x, m)).fold(f64::INFINITY, f64::min)
                }
            })
            .collect();
        for (k, &eps) in eps_grid.iter().enumerate() {
            alpha[k] = alpha[k].max(mass_desc(w, |i| d_a[i] > eps));
        }
        zero_plus = zero_plus.max(mass_desc(w, |i| d_a[i] > r0));
    }
    for (k, &eps) in eps_grid.iter().enumerate() {
        alpha[k] = if eps == 0.0 { 0.5 } else { alpha[k].min(0.5) };
    }
    ConcentrationProfile::new(
        eps_grid.to_vec(),
        alpha,
        zero_plus.min(0.5),
        Mode::LowerBound,
        grid_kind(space, eps_grid),
        space.diameter(),
    )
}
