//! Exact earth mover's distance between two measures on one finite metric.
//!
//! Solved with the transportation simplex: northwest-corner start, a spanning
//! tree of `m + k - 1` basic cells, potentials from the tree, Dantzig pricing
//! falling back to Bland's rule after an iteration budget. The result is
//! certified afterwards from complementary slackness.

use crate::mmspace::io::{fmt_f64, write_csv};
use crate::{Error, MMSpace, Result};
use serde::Serialize;
use std::collections::VecDeque;
use std::path::Path;

/// Tolerance on input weight sums.
pub const WEIGHT_TOL: f64 = 1e-9;
/// Tolerance of the optimality and feasibility certificate.
pub const CERT_TOL: f64 = 1e-9;

/// An optimal coupling stored as sparse `(i, j, mass)` triples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransportPlan {
    pub n: usize,
    pub entries: Vec<(usize, usize, f64)>,
    pub cost: f64,
    /// Largest absolute row and column marginal errors.
    pub marginal_residuals: [f64; 2],
    /// Smallest reduced cost at the certified optimum (non-negative up to
    /// rounding).
    pub min_reduced_cost: f64,
}

impl TransportPlan {
    pub fn coupling(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.n]; self.n];
        for &(i, j, x) in &self.entries {
            m[i][j] += x;
        }
        m
    }
}

fn check_measure(what: &'static str, w: &[f64], n: usize) -> Result<()> {
    if w.len() != n {
        return Err(Error::LengthMismatch {
            what,
            expected: n,
            found: w.len(),
        });
    }
    crate::measure::validate_weights(w, WEIGHT_TOL)
}

struct Simplex {
    m: usize,
    k: usize,
    cost: Vec<f64>,
    /// flow on every cell; only basic cells may be nonzero
    flow: Vec<f64>,
    basic: Vec<bool>,
    u: Vec<f64>,
    v: Vec<f64>,
}

impl Simplex {
    fn c(&self, i: usize, j: usize) -> f64 {
        self.cost[i * self.k + j]
    }

    fn northwest(m: usize, k: usize, cost: Vec<f64>, supply: &[f64], demand: &[f64]) -> Self {
        let mut s = supply.to_vec();
        let mut d = demand.to_vec();
        let mut flow = vec![0.0; m * k];
        let mut basic = vec![false; m * k];
        let (mut i, mut j) = (0, 0);
        loop {
            let q = s[i].min(d[j]);
            flow[i * k + j] = q;
            basic[i * k + j] = true;
            s[i] -= q;
            d[j] -= q;
            if i == m - 1 && j == k - 1 {
                break;
            }
            if i == m - 1 {
                j += 1;
            } else if j == k - 1 || s[i] <= d[j] {
                i += 1;
            } else {
                j += 1;
            }
        }
        Simplex {
            m,
            k,
            cost,
            flow,
            basic,
            u: vec![0.0; m],
            v: vec![0.0; k],
        }
    }

    /// Adjacency of the basis tree; rows are nodes `0..m`, columns `m..m+k`.
    fn tree(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.m + self.k];
        for i in 0..self.m {
            for j in 0..self.k {
                if self.basic[i * self.k + j] {
                    adj[i].push(self.m + j);
                    adj[self.m + j].push(i);
                }
            }
        }
        adj
    }

    fn potentials(&mut self, adj: &[Vec<usize>]) {
        let m = self.m;
        let mut seen = vec![false; m + self.k];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        self.u[0] = 0.0;
        while let Some(node) = queue.pop_front() {
            for &next in &adj[node] {
                if seen[next] {
                    continue;
                }
                seen[next] = true;
                if node < m {
                    let j = next - m;
                    self.v[j] = self.c(node, j) - self.u[node];
                } else {
                    let j = node - m;
                    self.u[next] = self.c(next, j) - self.v[j];
                }
                queue.push_back(next);
            }
        }
    }

    fn reduced(&self, i: usize, j: usize) -> f64 {
        self.c(i, j) - self.u[i] - self.v[j]
    }

    /// Tree path from row `p` to column `q`, as a node sequence.
    fn path(&self, adj: &[Vec<usize>], p: usize, q: usize) -> Vec<usize> {
        let target = self.m + q;
        let mut parent = vec![usize::MAX; self.m + self.k];
        parent[p] = p;
        let mut queue = VecDeque::from([p]);
        while let Some(node) = queue.pop_front() {
            if node == target {
                break;
            }
            for &next in &adj[node] {
                if parent[next] == usize::MAX {
                    parent[next] = node;
                    queue.push_back(next);
                }
            }
        }
        let mut path = vec![target];
        let mut node = target;
        while node != p {
            node = parent[node];
            path.push(node);
        }
        // path runs column q -> ... -> row p
        path
    }

    fn cell(&self, a: usize, b: usize) -> usize {
        let (row, col) = if a < self.m { (a, b - self.m) } else { (b, a - self.m) };
        row * self.k + col
    }

    fn solve(&mut self, scale: f64) -> Result<()> {
        let cells = self.m * self.k;
        let dantzig_budget = 50 * (self.m + self.k) + 1000;
        let hard_limit = dantzig_budget + 200 * cells + 10_000;
        let tol = 1e-12 * scale.max(1.0);
        for iter in 0.. {
            if iter > hard_limit {
                return Err(Error::Invariant("transportation simplex did not terminate".into()));
            }
            let adj = self.tree();
            self.potentials(&adj);
            let bland = iter >= dantzig_budget;
            let mut enter = None;
            let mut best = -tol;
            'price: for i in 0..self.m {
                for j in 0..self.k {
                    if self.basic[i * self.k + j] {
                        continue;
                    }
                    let r = self.reduced(i, j);
                    if r < best {
                        enter = Some((i, j));
                        if bland {
                            break 'price;
                        }
                        best = r;
                    }
                }
            }
            let Some((p, q)) = enter else { return Ok(()) };
            let path = self.path(&adj, p, q);
            // cycle cells: entering (+), then alternating along the path from q
            let mut minus = Vec::new();
            let mut plus = vec![p * self.k + q];
            for (idx, pair) in path.windows(2).enumerate() {
                let c = self.cell(pair[0], pair[1]);
                if idx % 2 == 0 {
                    minus.push(c);
                } else {
                    plus.push(c);
                }
            }
            let mut leave = minus[0];
            for &c in &minus[1..] {
                if self.flow[c] < self.flow[leave] || (bland && self.flow[c] == self.flow[leave] && c < leave) {
                    leave = c;
                }
            }
            let theta = self.flow[leave];
            for &c in &plus {
                self.flow[c] += theta;
            }
            for &c in &minus {
                self.flow[c] -= theta;
            }
            self.flow[leave] = 0.0;
            self.basic[leave] = false;
            self.basic[p * self.k + q] = true;
        }
        unreachable!()
    }
}

/// Optimal coupling of `mu` and `nu` with respect to the distances of
/// `space`. Zero-weight points are removed before solving and come back as
/// empty rows and columns.
pub fn emd(space: &MMSpace, mu: &[f64], nu: &[f64]) -> Result<TransportPlan> {
    let n = space.len();
    check_measure("mu", mu, n)?;
    check_measure("nu", nu, n)?;
    let sources: Vec<usize> = (0..n).filter(|&i| mu[i] > 0.0).collect();
    let sinks: Vec<usize> = (0..n).filter(|&j| nu[j] > 0.0).collect();
    let (m, k) = (sources.len(), sinks.len());
    let mut cost = Vec::with_capacity(m * k);
    let mut scale = 0.0f64;
    for &i in &sources {
        for &j in &sinks {
            let c = space.dist(i, j);
            scale = scale.max(c);
            cost.push(c);
        }
    }
    let supply: Vec<f64> = sources.iter().map(|&i| mu[i]).collect();
    let demand: Vec<f64> = sinks.iter().map(|&j| nu[j]).collect();
    let mut sx = Simplex::northwest(m, k, cost, &supply, &demand);
    sx.solve(scale)?;

    // certificate
    let adj = sx.tree();
    sx.potentials(&adj);
    let mut min_reduced = f64::INFINITY;
    for i in 0..m {
        for j in 0..k {
            min_reduced = min_reduced.min(sx.reduced(i, j));
        }
    }
    let mut row = vec![0.0; n];
    let mut col = vec![0.0; n];
    let mut entries = Vec::new();
    let mut total = 0.0;
    for a in 0..m {
        for b in 0..k {
            let x = sx.flow[a * k + b];
            if x < -CERT_TOL {
                return Err(Error::Invariant(format!("negative flow {x} in transport plan")));
            }
            if x > 0.0 {
                let (i, j) = (sources[a], sinks[b]);
                entries.push((i, j, x));
                row[i] += x;
                col[j] += x;
                total += x * sx.c(a, b);
            }
        }
    }
    let r0 = (0..n).map(|i| (row[i] - mu[i]).abs()).fold(0.0, f64::max);
    let r1 = (0..n).map(|j| (col[j] - nu[j]).abs()).fold(0.0, f64::max);
    if r0 > CERT_TOL || r1 > CERT_TOL {
        return Err(Error::Invariant(format!("transport marginals off by {r0}, {r1}")));
    }
    if min_reduced < -CERT_TOL * scale.max(1.0) {
        return Err(Error::Invariant(format!("transport plan not optimal: reduced cost {min_reduced}")));
    }
    Ok(TransportPlan {
        n,
        entries,
        cost: total,
        marginal_residuals: [r0, r1],
        min_reduced_cost: min_reduced,
    })
}

/// `sqrt(emd(mu, nu))`: an upper bound on the Gromov concentration distance
/// between `(X, d, mu)` and `(X, d, nu)`. No lower bound follows from it.
pub fn dconc_upper_via_emd(space: &MMSpace, mu: &[f64], nu: &[f64]) -> Result<f64> {
    Ok(emd(space, mu, nu)?.cost.max(0.0).sqrt())
}

pub fn write_plan(path: &Path, plan: &TransportPlan) -> Result<()> {
    let rows: Vec<Vec<String>> = plan
        .entries
        .iter()
        .map(|&(i, j, x)| vec![i.to_string(), j.to_string(), fmt_f64(x)])
        .collect();
    write_csv(path, &["i", "j", "mass"], &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line3() -> MMSpace {
        MMSpace::from_distance_matrix(
            &[vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]],
            None,
        )
        .unwrap()
    }

    #[test]
    fn identical_measures_cost_nothing() {
        let s = line3();
        let mu = [0.2, 0.3, 0.5];
        let p = emd(&s, &mu, &mu).unwrap();
        assert_eq!(p.cost, 0.0);
        let c = p.coupling();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(c[i][j], if i == j { mu[i] } else { 0.0 });
            }
        }
    }

    #[test]
    fn point_masses() {
        let s = line3();
        assert_eq!(emd(&s, &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]).unwrap().cost, 2.0);
    }

    #[test]
    fn split_mass() {
        let p = emd(&line3(), &[1.0, 0.0, 0.0], &[0.0, 0.5, 0.5]).unwrap();
        assert_eq!(p.cost, 1.5);
        assert!(p.marginal_residuals.iter().all(|&r| r <= CERT_TOL));
    }

    #[test]
    fn bound_on_two_points() {
        let s = MMSpace::from_distance_matrix(&[vec![0.0, 1.0], vec![1.0, 0.0]], None).unwrap();
        assert_eq!(dconc_upper_via_emd(&s, &[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(dconc_upper_via_emd(&s, &[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_measures() {
        let s = line3();
        assert!(matches!(
            emd(&s, &[1.0, 0.0], &[0.0, 0.0, 1.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            emd(&s, &[0.5, 0.0, 0.0], &[0.0, 0.0, 1.0]),
            Err(Error::WeightsNotNormalized { .. })
        ));
    }
}
