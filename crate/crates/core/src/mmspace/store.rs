use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Metric used to turn coordinates into distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    /// Fraction of coordinates that differ.
    NormalizedHamming,
}

impl Metric {
    #[inline]
    pub fn eval(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Metric::NormalizedHamming => {
                if a.is_empty() {
                    return 0.0;
                }
                let diff = a.iter().zip(b).filter(|(x, y)| x != y).count();
                diff as f64 / a.len() as f64
            }
        }
    }
}

/// Row-major point coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Coords {
    pub(crate) data: Vec<f64>,
    pub(crate) dim: usize,
}

impl Coords {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Strict upper triangle of a symmetric matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Packed {
    n: usize,
    data: Vec<f64>,
}

impl Packed {
    #[inline]
    fn offset(n: usize, i: usize) -> usize {
        // start of row i in the packed upper triangle
        i * (2 * n - i - 1) / 2
    }

    pub(crate) fn from_fn<F>(n: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| ((i + 1)..n).map(|j| f(i, j)).collect())
            .collect();
        let mut data = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for row in rows {
            data.extend(row);
        }
        Packed { n, data }
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => 0.0,
            Less => self.data[Self::offset(self.n, i) + (j - i - 1)],
            Greater => self.data[Self::offset(self.n, j) + (i - j - 1)],
        }
    }

    pub(crate) fn values(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Packed {
            n: self.n,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Dense storage up to [`DENSE_LIMIT`] points, on-demand evaluation above.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum DistanceStore {
    Dense(Packed),
    Lazy {
        coords: Coords,
        metric: Metric,
        scale: f64,
    },
}

/// Largest point count stored as a dense matrix.
pub const DENSE_LIMIT: usize = 20_000;

impl DistanceStore {
    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            DistanceStore::Dense(p) => p.get(i, j),
            DistanceStore::Lazy {
                coords,
                metric,
                scale,
            } => {
                if i == j {
                    0.0
                } else {
                    scale * metric.eval(coords.point(i), coords.point(j))
                }
            }
        }
    }
}
