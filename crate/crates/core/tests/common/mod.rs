//! Brute-force oracles shared by the integration suites. Each one follows the
//! textbook definition directly and shares no code with the library.
#![allow(dead_code)]

use mmconc::MMSpace;

/// Slack on measure comparisons, the same as the library's.
pub const MASS_TOL: f64 = 1e-12;

fn mass(w: &[f64], members: impl Iterator<Item = usize>) -> f64 {
    members.map(|i| w[i]).sum()
}

fn bits(mask: usize, n: usize) -> impl Iterator<Item = usize> {
    (0..n).filter(move |i| mask >> i & 1 == 1)
}

/// `α(ε) = 1 - min { μ(A_ε) : μ(A) >= 1/2 }` straight from the definition,
/// with `α(0) = 1/2`.
pub fn naive_alpha(space: &MMSpace, eps: f64) -> f64 {
    if eps == 0.0 {
        return 0.5;
    }
    let n = space.len();
    let w = space.weights();
    let mut best: f64 = 0.0;
    for a in 1usize..(1 << n) {
        if mass(w, bits(a, n)) < 0.5 - MASS_TOL {
            continue;
        }
        let outside = mass(w, (0..n).filter(|&x| bits(a, n).all(|y| space.dist(x, y) > eps)));
        best = best.max(outside);
    }
    best.min(0.5)
}

/// `sep_κ` for every κ in `grid` by trying all `3^n` assignments of points
/// to A, B or neither.
pub fn naive_sep(space: &MMSpace, grid: &[f64]) -> Vec<f64> {
    let n = space.len();
    let w = space.weights();
    let mut best = vec![0.0f64; grid.len()];
    let total = 3usize.pow(n as u32);
    let mut label = vec![0u8; n];
    for code in 0..total {
        let mut c = code;
        for l in label.iter_mut() {
            *l = (c % 3) as u8;
            c /= 3;
        }
        let ma = mass(w, (0..n).filter(|&i| label[i] == 1));
        let mb = mass(w, (0..n).filter(|&i| label[i] == 2));
        if !(0..n).any(|i| label[i] == 1) || !(0..n).any(|i| label[i] == 2) {
            continue;
        }
        let mut cross = f64::INFINITY;
        for i in (0..n).filter(|&i| label[i] == 1) {
            for j in (0..n).filter(|&j| label[j] == 2) {
                cross = cross.min(space.dist(i, j));
            }
        }
        for (k, &kappa) in grid.iter().enumerate() {
            if ma >= kappa - MASS_TOL && mb >= kappa - MASS_TOL {
                best[k] = best[k].max(cross);
            }
        }
    }
    best
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting; `None` when singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..n {
                        a[r][c] -= f * a[col][c];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Minimum transport cost over all vertices of the transport polytope
/// between the supports of `mu` and `nu`: every choice of `m + k - 1` cells
/// whose marginal system has a unique non-negative solution.
pub fn vertex_emd(space: &MMSpace, mu: &[f64], nu: &[f64]) -> f64 {
    let rows: Vec<usize> = (0..mu.len()).filter(|&i| mu[i] > 0.0).collect();
    let cols: Vec<usize> = (0..nu.len()).filter(|&j| nu[j] > 0.0).collect();
    let (m, k) = (rows.len(), cols.len());
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
    let basis = m + k - 1;
    let mut best = f64::INFINITY;
    for set in 0usize..(1 << cells.len()) {
        if set.count_ones() as usize != basis {
            continue;
        }
        let chosen: Vec<(usize, usize)> = bits(set, cells.len()).map(|c| cells[c]).collect();
        // drop the last column constraint: it is implied by the others
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..m {
            a.push(chosen.iter().map(|&(r, _)| if r == i { 1.0 } else { 0.0 }).collect());
            b.push(mu[rows[i]]);
        }
        for j in 0..k - 1 {
            a.push(chosen.iter().map(|&(_, c)| if c == j { 1.0 } else { 0.0 }).collect());
            b.push(nu[cols[j]]);
        }
        let Some(x) = solve(a, b) else { continue };
        if x.iter().any(|&v| v < -1e-12) {
            continue;
        }
        let cost: f64 = chosen
            .iter()
            .zip(&x)
            .map(|(&(i, j), &f)| f * space.dist(rows[i], cols[j]))
            .sum();
        best = best.min(cost);
    }
    best
}

/// Least number of open `u`-balls centred at points that cover the space.
pub fn exact_cover(space: &MMSpace, u: f64) -> usize {
    let n = space.len();
    let full = (1usize << n) - 1;
    let ball: Vec<usize> = (0..n)
        .map(|c| (0..n).filter(|&x| space.dist(c, x) < u).fold(0, |m, x| m | 1 << x))
        .collect();
    (1usize..=full)
        .filter(|s| bits(*s, n).fold(0, |m, c| m | ball[c]) == full)
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap_or(n)
}

pub fn binom(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |c, i| c * (n - i) as u128 / (i + 1) as u128)
}

/// `m^2 / (2 σ^2)` of the Hamming distance on the full cube from its
/// binomial law, in exact integer arithmetic up to the final division.
/// Ordered pairs at distance `k/d` number `2^d C(d, k)`.
pub fn chavez_cube(d: u64, include_diagonal: bool) -> f64 {
    let start = if include_diagonal { 0 } else { 1 };
    let (mut c0, mut c1, mut c2) = (0u128, 0u128, 0u128);
    for k in start..=d {
        let c = binom(d, k);
        c0 += c;
        c1 += c * k as u128;
        c2 += c * (k * k) as u128;
    }
    // m = c1 / (d c0), E[D^2] = c2 / (d^2 c0): the d factors cancel in the ratio
    let num = c1 * c1;
    let var_num = c2 * c0 - c1 * c1;
    num as f64 / (2.0 * var_num as f64)
}

/// Harper's vertex-isoperimetric order on `{0,1}^d`: by weight, then with
/// `x` before `y` when the lowest coordinate where they differ is set in `x`.
fn simplicial_order(d: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..1usize << d).collect();
    v.sort_by(|&x, &y| {
        x.count_ones().cmp(&y.count_ones()).then_with(|| {
            let diff = x ^ y;
            if diff == 0 {
                std::cmp::Ordering::Equal
            } else if x >> diff.trailing_zeros() & 1 == 1 {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        })
    });
    v
}

/// `sep_κ({0,1}^d) · d` by breadth-first growth of the extremal initial
/// segment: the largest `t` for which the complement of the closed
/// `(t-1)`-neighbourhood of the `m` first points still holds `m` points.
pub fn harper_sep_steps(d: usize, m: usize) -> usize {
    let order = simplicial_order(d);
    let size = 1usize << d;
    let mut dist = vec![usize::MAX; size];
    let mut frontier: Vec<usize> = order[..m].to_vec();
    for &x in &frontier {
        dist[x] = 0;
    }
    let mut level = 0;
    let mut reached = m;
    let mut best = 0;
    // reached = |closed level-neighbourhood|
    while size - reached >= m && level < d {
        best = level + 1;
        let mut next = Vec::new();
        for &x in &frontier {
            for b in 0..d {
                let y = x ^ (1 << b);
                if dist[y] == usize::MAX {
                    dist[y] = level + 1;
                    next.push(y);
                }
            }
        }
        reached += next.len();
        frontier = next;
        level += 1;
    }
    best
}

/// Least number of cube points with mass `>= κ`, i.e. `ceil(κ 2^d)`.
pub fn min_points(kappa: f64, d: usize) -> usize {
    let size = (1u64 << d) as f64;
    (kappa * size - 1e-9).ceil().max(1.0) as usize
}
