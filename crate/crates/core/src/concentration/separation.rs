use super::{check_kappa_grid, Mode, SeparationProfile};
use crate::measure::at_least;
use crate::{rng, Error, MMSpace, Result};
use rand::Rng as _;

/// Largest space handled by the exact biclique search.
pub const SEP_EXACT_LIMIT: usize = 22;

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::param("kappa", kappa, "a finite non-negative number"));
    }
    Ok(())
}

/// Subset masses by two lookups into 11-bit half tables.
struct MassLookup {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl MassLookup {
    const SPLIT: usize = 11;

    fn new(w: &[f64]) -> Self {
        let build = |part: &[f64]| {
            let mut t = vec![0.0; 1 << part.len()];
            for m in 1..t.len() {
                t[m] = t[m & (m - 1)] + part[m.trailing_zeros() as usize];
            }
            t
        };
        let k = w.len().min(Self::SPLIT);
        MassLookup {
            lo: build(&w[..k]),
            hi: build(&w[k..]),
        }
    }

    #[inline]
    fn of(&self, m: u32) -> f64 {
        self.lo[(m as usize) & ((1 << Self::SPLIT) - 1)] + self.hi[(m as usize) >> Self::SPLIT]
    }
}

/// Threshold-graph search: is there a complete bipartite pair `A x B` in the
/// graph `{x ~ y : d(x,y) >= delta}` whose sides each carry mass `>= kappa`?
struct Biclique<'a> {
    far: Vec<u32>,
    mass: &'a MassLookup,
    kappa: f64,
    n: usize,
}

impl Biclique<'_> {
    /// Extends `a` with points from index `next` on while `common`, the points adjacent
    /// to all of `a`, keeps mass `>= kappa`. The best `B` for a given `A` is
    /// `common` itself, so only `A` is branched on.
    fn search(&self, a: u32, common: u32, next: usize) -> bool {
        if a != 0 && at_least(self.mass.of(a), self.kappa) {
            return true;
        }
        // candidates: later points whose addition keeps `common` heavy enough
        let mut cand = 0u32;
        for x in next..self.n {
            if at_least(self.mass.of(common & self.far[x]), self.kappa) {
                cand |= 1 << x;
            }
        }
        if !at_least(self.mass.of(a | cand), self.kappa) {
            return false;
        }
        let mut rest = cand;
        while rest != 0 {
            let x = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if self.search(a | (1 << x), common & self.far[x], x + 1) {
                return true;
            }
        }
        false
    }

    fn feasible(space: &MMSpace, mass: &MassLookup, kappa: f64, delta: f64) -> bool {
        let n = space.len();
        let far: Vec<u32> = (0..n)
            .map(|i| (0..n).filter(|&j| space.dist(i, j) >= delta).fold(0, |m, j| m | (1 << j)))
            .collect();
        Biclique { far, mass, kappa, n }.search(0, (1u32 << n) - 1, 0)
    }
}

fn sep_with(space: &MMSpace, mass: &MassLookup, positive: &[f64], kappa: f64) -> f64 {
    if kappa == 0.0 {
        return space.diameter();
    }
    // feasibility is monotone in delta; find the largest feasible distance
    let (mut lo, mut hi) = (0usize, positive.len());
    if hi == 0 || !Biclique::feasible(space, mass, kappa, positive[0]) {
        return 0.0;
    }
    // invariant: positive[lo] feasible, positive[hi] infeasible (or past the end)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if Biclique::feasible(space, mass, kappa, positive[mid]) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    positive[lo]
}

fn check_exact_size(space: &MMSpace) -> Result<()> {
    if space.len() > SEP_EXACT_LIMIT {
        return Err(Error::OracleTooLarge {
            what: "separation distance",
            n: space.len(),
            limit: SEP_EXACT_LIMIT,
            alternative: "sep_lower",
        });
    }
    Ok(())
}

fn positive_distances(space: &MMSpace) -> Vec<f64> {
    space.distinct_distances().into_iter().filter(|&d| d > 0.0).collect()
}

/// Exact `sep_κ`: the largest `δ` such that two sets of mass `>= κ` lie at
/// distance `>= δ` from each other; 0 when no such pair exists. The answer
/// is always a realised distance, located by bisection over the sorted
/// distinct distances with a branch-and-bound biclique test at each step.
pub fn sep_exact(space: &MMSpace, kappa: f64) -> Result<f64> {
    check_exact_size(space)?;
    check_kappa(kappa)?;
    let mass = MassLookup::new(space.weights());
    Ok(sep_with(space, &mass, &positive_distances(space), kappa))
}

pub fn sep_exact_profile(space: &MMSpace, kappa_grid: &[f64]) -> Result<SeparationProfile> {
    check_exact_size(space)?;
    check_kappa_grid(kappa_grid)?;
    let mass = MassLookup::new(space.weights());
    let positive = positive_distances(space);
    let sep = kappa_grid.iter().map(|&k| sep_with(space, &mass, &positive, k)).collect();
    SeparationProfile::new(kappa_grid.to_vec(), sep, Mode::Exact)
}

/// One greedy run from the seed pair `(p, q)`. Records into `best[k]` the
/// cross distance at the moment both sides first reach `kappa_grid[k]`.
fn grow(space: &MMSpace, p: usize, q: usize, kappa_grid: &[f64], best: &mut [f64]) {
    let n = space.len();
    let w = space.weights();
    // 0 = unassigned, 1 = A, 2 = B
    let mut side = vec![0u8; n];
    side[p] = 1;
    side[q] = 2;
    let mut to_a: Vec<f64> = (0..n).map(|x| space.dist(x, p)).collect();
    let mut to_b: Vec<f64> = (0..n).map(|x| space.dist(x, q)).collect();
    let (mut ma, mut mb) = (w[p], w[q]);
    let mut cross = space.dist(p, q);
    let top = kappa_grid[kappa_grid.len() - 1];
    let mut record = |ma: f64, mb: f64, cross: f64| {
        let m = ma.min(mb);
        for (k, &kappa) in kappa_grid.iter().enumerate() {
            if at_least(m, kappa) {
                best[k] = best[k].max(cross);
            }
        }
    };
    record(ma, mb, cross);
    let mut unassigned = n - 2;
    while unassigned > 0 && !at_least(ma.min(mb), top) {
        let grow_a = ma <= mb;
        let other = if grow_a { &to_b } else { &to_a };
        let mut pick = None;
        let mut far = -1.0;
        for x in 0..n {
            if side[x] == 0 && other[x] > far {
                far = other[x];
                pick = Some(x);
            }
        }
        let Some(x) = pick else { break };
        unassigned -= 1;
        cross = cross.min(far);
        if grow_a {
            side[x] = 1;
            ma += w[x];
            for y in 0..n {
                to_a[y] = to_a[y].min(space.dist(y, x));
            }
        } else {
            side[x] = 2;
            mb += w[x];
            for y in 0..n {
                to_b[y] = to_b[y].min(space.dist(y, x));
            }
        }
        record(ma, mb, cross);
    }
}

/// Greedy lower bound on `sep_κ` over `kappa_grid`. Run 0 seeds with a
/// diametral pair; the other runs take a random point and its farthest
/// point. Each run grows the lighter side by the unassigned point farthest
/// from the other side. Values are cross distances of explicit disjoint sets.
pub fn sep_lower(space: &MMSpace, kappa_grid: &[f64], restarts: usize, seed: u64) -> Result<SeparationProfile> {
    check_kappa_grid(kappa_grid)?;
    let n = space.len();
    let mut best = vec![0.0f64; kappa_grid.len()];
    if n >= 2 {
        let mut r = rng::seeded(seed);
        for run in 0..restarts.max(1) {
            let (p, q) = if run == 0 {
                space.diametral_pair()
            } else {
                let p = r.random_range(0..n);
                let q = (0..n)
                    .max_by(|&a, &b| space.dist(p, a).total_cmp(&space.dist(p, b)).then(b.cmp(&a)))
                    .unwrap_or(p);
                (p, q)
            };
            if p == q {
                continue;
            }
            grow(space, p, q, kappa_grid, &mut best);
        }
    }
    SeparationProfile::new(kappa_grid.to_vec(), best, Mode::LowerBound)
}
