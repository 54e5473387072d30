//! Small random mm-spaces and measures for oracle comparisons and property
//! tests. Everything is a pure function of the seed.

use crate::mmspace::Metric;
use crate::rng::{self, Rng};
use crate::{MMSpace, Result};
use rand::Rng as _;

/// Which family a random instance is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    /// Points in the unit cube `[0, 1]^k`.
    Euclidean,
    /// Shortest paths of a connected graph with unit edge lengths.
    UnitGraph,
    /// Shortest paths of a connected graph with random edge lengths.
    WeightedGraph,
}

/// A probability vector. With `allow_zero`, about one entry in six is 0.
pub fn random_measure(rng: &mut Rng, n: usize, allow_zero: bool) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..n)
            .map(|_| {
                if allow_zero && rng.random_range(0..6) == 0 {
                    0.0
                } else {
                    // exponential draws give a flat Dirichlet
                    -(1.0 - rng.random::<f64>()).ln()
                }
            })
            .collect();
        let s: f64 = raw.iter().sum();
        if s > 0.0 {
            return raw.iter().map(|x| x / s).collect();
        }
    }
}

/// `n` points uniform in `[0, 1]^k`.
pub fn euclidean(rng: &mut Rng, n: usize, k: usize, weights: Option<Vec<f64>>) -> Result<MMSpace> {
    let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..k).map(|_| rng.random::<f64>()).collect()).collect();
    MMSpace::from_points(&pts, weights, Metric::Euclidean)
}

/// Shortest-path metric of a random connected graph: a random spanning tree
/// plus each other edge with probability `p`.
pub fn graph(rng: &mut Rng, n: usize, p: f64, unit: bool, weights: Option<Vec<f64>>) -> Result<MMSpace> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    let len = |rng: &mut Rng| if unit { 1.0 } else { rng.random_range(0.1..1.0) };
    for i in 1..n {
        let j = rng.random_range(0..i);
        let l = len(rng);
        d[i][j] = l;
        d[j][i] = l;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if d[i][j].is_infinite() && rng.random::<f64>() < p {
                let l = len(rng);
                d[i][j] = l;
                d[j][i] = l;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    MMSpace::from_distance_matrix(&d, weights)
}

/// A random instance with `n` points. Half the instances carry the uniform
/// measure (which has many exact half-mass sets), the rest a random one.
pub fn instance(seed: u64, n: usize, kind: InstanceKind) -> Result<MMSpace> {
    let mut rng = rng::seeded(seed);
    let weights = if rng.random::<bool>() {
        None
    } else {
        Some(random_measure(&mut rng, n, false))
    };
    match kind {
        InstanceKind::Euclidean => {
            let k = rng.random_range(1..=3);
            euclidean(&mut rng, n, k, weights)
        }
        InstanceKind::UnitGraph => graph(&mut rng, n, 0.3, true, weights),
        InstanceKind::WeightedGraph => graph(&mut rng, n, 0.3, false, weights),
    }
}

/// The `index`-th member of a mixed suite: sizes cycle through `1..=max_n`
/// and kinds rotate, so every size meets every family.
pub fn suite_instance(seed: u64, index: usize, max_n: usize) -> Result<MMSpace> {
    let kinds = [InstanceKind::Euclidean, InstanceKind::UnitGraph, InstanceKind::WeightedGraph];
    let n = 1 + index % max_n;
    let kind = kinds[(index / max_n) % kinds.len()];
    instance(rng::derive_seed(seed, index as u64), n, kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_valid_and_reproducible() {
        for i in 0..36 {
            let a = suite_instance(3, i, 12).unwrap();
            let b = suite_instance(3, i, 12).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.len(), 1 + i % 12);
            a.check_triangle().unwrap();
        }
    }

    #[test]
    fn measures_sum_to_one() {
        let mut rng = rng::seeded(1);
        for n in 1..20 {
            let w = random_measure(&mut rng, n, true);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(w.iter().all(|&x| x >= 0.0));
        }
    }
}
