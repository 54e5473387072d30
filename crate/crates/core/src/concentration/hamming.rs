//! Separation function of the full Hamming cube `{0,1}^d` (normalised
//! Hamming distance, uniform measure) in closed form.
//!
//! Points are subsets of `{0..d-1}`. The simplicial order lists sets by size,
//! and sets of equal size lexicographically (`S < T` iff `min(S Δ T) ∈ S`).
//! By Harper's vertex-isoperimetric theorem an initial segment of this order
//! has the smallest `t`-neighbourhood among all sets of its size, and
//! neighbourhoods of initial segments are again initial segments. Two sets of
//! size `m` at distance `>= j` exist iff the complement of the
//! `(j-1)`-neighbourhood of the initial segment `I_m` still holds `m` points.
//! All counting is in exact integers.

use super::{check_kappa_grid, Mode, SeparationProfile};
use crate::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, Zero};

pub const MAX_ANALYTIC_HAMMING_DIM: usize = 10_000;

struct Cube {
    d: usize,
    /// `binom[i] = C(d, i)`
    binom: Vec<BigUint>,
    /// `ball[i] = sum_{j <= i} C(d, j)`
    ball: Vec<BigUint>,
}

impl Cube {
    fn new(d: usize) -> Self {
        let mut binom = Vec::with_capacity(d + 1);
        let mut c = BigUint::one();
        for i in 0..=d {
            binom.push(c.clone());
            c = c * (d - i) / (i + 1);
        }
        let mut ball = Vec::with_capacity(d + 1);
        let mut acc = BigUint::zero();
        for b in &binom {
            acc += b;
            ball.push(acc.clone());
        }
        Cube { d, binom, ball }
    }

    fn total(&self) -> &BigUint {
        &self.ball[self.d]
    }

    /// `C(d-1, k-1)`: the number of `k`-sets containing element 0.
    fn first_count(&self, k: usize) -> BigUint {
        &self.binom[k] * k / self.d
    }

    /// The `k`-set of 0-based lexicographic rank `rank`.
    fn unrank(&self, k: usize, mut rank: BigUint) -> Vec<bool> {
        let d = self.d;
        let mut set = vec![false; d];
        if k == 0 {
            return set;
        }
        let (mut a, mut b, mut k) = (d - 1, k - 1, k);
        // c = C(a, b) = number of completions that include the current element
        let mut c = self.first_count(k);
        for v in 0..d {
            if rank < c {
                set[v] = true;
                k -= 1;
                if k == 0 || a == 0 {
                    break;
                }
                c = c * b / a;
                b -= 1;
            } else {
                rank -= &c;
                if a == 0 {
                    break;
                }
                c = c * (a - b) / a;
            }
            a -= 1;
        }
        set
    }

    /// 0-based lexicographic rank of a `k`-set.
    fn rank(&self, set: &[bool]) -> BigUint {
        let d = self.d;
        let mut k = set.iter().filter(|&&x| x).count();
        let mut rank = BigUint::zero();
        if k == 0 {
            return rank;
        }
        let (mut a, mut b) = (d - 1, k - 1);
        let mut c = self.first_count(k);
        for &inside in set.iter().take(d) {
            if inside {
                k -= 1;
                if k == 0 || a == 0 {
                    break;
                }
                c = c * b / a;
                b -= 1;
            } else {
                rank += &c;
                if a == 0 {
                    break;
                }
                c = c * (a - b) / a;
            }
            a -= 1;
        }
        rank
    }
}

/// Size of the `t`-neighbourhood of the initial segment of size `m`.
struct Segment<'a> {
    cube: &'a Cube,
    m: BigUint,
    /// layer of the partially filled level
    r: usize,
    /// last set of the segment
    last: Vec<bool>,
}

impl<'a> Segment<'a> {
    fn new(cube: &'a Cube, m: BigUint) -> Self {
        let r = cube.ball.partition_point(|b| *b < m);
        let below = if r == 0 { BigUint::zero() } else { cube.ball[r - 1].clone() };
        let ell = &m - below;
        let last = cube.unrank(r, ell - 1u32);
        Segment { cube, m, r, last }
    }

    fn neighbourhood(&self, t: usize) -> BigUint {
        let d = self.cube.d;
        if t == 0 {
            return self.m.clone();
        }
        if self.r + t > d {
            return self.cube.total().clone();
        }
        // the t-th upper shadow of the partial layer is again an initial
        // segment, ending at `last` plus its t largest missing elements
        let mut y = self.last.clone();
        let mut added = 0;
        for v in (0..d).rev() {
            if added == t {
                break;
            }
            if !y[v] {
                y[v] = true;
                added += 1;
            }
        }
        &self.cube.ball[self.r + t - 1] + self.cube.rank(&y) + 1u32
    }
}

/// `ceil(kappa * 2^d)` computed exactly from the bits of `kappa`.
fn min_points(kappa: f64, d: usize) -> BigUint {
    let bits = kappa.to_bits();
    let exp_field = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, exp) = if exp_field == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_field - 1075)
    };
    let shift = exp + d as i64;
    let mant = BigUint::from(mant);
    if shift >= 0 {
        mant << shift as u64
    } else {
        let s = (-shift) as u64;
        let one = BigUint::one();
        (mant + (&one << s) - one) >> s
    }
}

fn check_args(d: usize, kappa: f64) -> Result<()> {
    if d == 0 || d > MAX_ANALYTIC_HAMMING_DIM {
        return Err(Error::param("d", d, "1 <= d <= 10000"));
    }
    if !(kappa > 0.0 && kappa <= 0.5) {
        return Err(Error::param("kappa", kappa, "a value in (0, 1/2]"));
    }
    Ok(())
}

fn sep_in(cube: &Cube, kappa: f64) -> f64 {
    let d = cube.d;
    let m = min_points(kappa, d);
    let seg = Segment::new(cube, m.clone());
    let room = cube.total() - &m;
    let feasible = |j: usize| seg.neighbourhood(j - 1) <= room;
    // j = 1 is always feasible for kappa <= 1/2
    let (mut lo, mut hi) = (1usize, d + 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo as f64 / d as f64
}

/// Exact `sep_κ({0,1}^d)`.
pub fn sep_hamming_analytic(d: usize, kappa: f64) -> Result<f64> {
    check_args(d, kappa)?;
    Ok(sep_in(&Cube::new(d), kappa))
}

pub fn sep_hamming_profile(d: usize, kappa_grid: &[f64]) -> Result<SeparationProfile> {
    check_kappa_grid(kappa_grid)?;
    check_args(d, kappa_grid[0])?;
    let cube = Cube::new(d);
    let sep = kappa_grid.iter().map(|&k| sep_in(&cube, k)).collect();
    SeparationProfile::new(kappa_grid.to_vec(), sep, Mode::Analytic)
}

/// The complementary-balls witness: Hamming balls of the least radius `k`
/// holding mass `>= κ` around two antipodal points are `(d - 2k)/d` apart.
/// A lower bound on `sep_κ` that is not tight in general.
pub fn sep_hamming_ball_witness(d: usize, kappa: f64) -> Result<f64> {
    check_args(d, kappa)?;
    let cube = Cube::new(d);
    let m = min_points(kappa, d);
    let k = cube.ball.partition_point(|b| *b < m);
    Ok(d.saturating_sub(2 * k) as f64 / d as f64)
}
