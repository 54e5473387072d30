//! Finite metric spaces carrying a probability measure.

mod generate;
pub mod io;
mod store;

pub use generate::{generate, Family, GeneratorSpec, MAX_GENERATED_POINTS, MAX_HAMMING_CUBE_DIM};
pub use store::{Coords, Metric, DENSE_LIMIT};

use crate::measure::{self, at_least, MASS_TOL, WEIGHT_SUM_TOL};
use crate::{Error, Result};
use rand::Rng as _;
use store::{DistanceStore, Packed};

/// Numerical slack for the metric axioms on user-supplied matrices.
pub const METRIC_TOL: f64 = 1e-9;

/// Largest point count whose pair distances are sorted outright for the
/// median; above it the median is found by bisection.
const SORTED_MEDIAN_LIMIT: usize = 6_000;

/// Up to this many points the triangle inequality is checked on every triple;
/// larger matrices are checked on a fixed pseudo-random sample of triples.
pub const EXHAUSTIVE_TRIANGLE_LIMIT: usize = 500;
const SAMPLED_TRIPLES: usize = 2_000_000;

/// A finite metric space `(X, d, mu)`.
///
/// Immutable once built; distances are symmetric with zero diagonal and the
/// weights form a probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MMSpace {
    n: usize,
    store: DistanceStore,
    weights: Vec<f64>,
    coords: Option<(Coords, Metric)>,
    label: Option<String>,
}

/// Both weighted medians of the pairwise-distance distribution. They differ
/// only when the cumulative mass sits exactly at 1/2 on a plateau.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MedianPair {
    pub lower: f64,
    pub upper: f64,
}

impl MMSpace {
    /// Builds a space from point coordinates (`coords[i]` is point `i`).
    pub fn from_points(coords: &[Vec<f64>], weights: Option<Vec<f64>>, metric: Metric) -> Result<Self> {
        let n = coords.len();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        let dim = coords[0].len();
        let mut data = Vec::with_capacity(n * dim);
        for (row, p) in coords.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::RaggedRow {
                    row,
                    expected: dim,
                    found: p.len(),
                });
            }
            if let Some(col) = p.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteCoordinate { row, col });
            }
            data.extend_from_slice(p);
        }
        Self::from_coords(Coords { data, dim }, weights, metric)
    }

    pub(crate) fn from_coords(coords: Coords, weights: Option<Vec<f64>>, metric: Metric) -> Result<Self> {
        let n = coords.len();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        let weights = Self::check_weights(n, weights)?;
        let store = if n <= DENSE_LIMIT {
            DistanceStore::Dense(Packed::from_fn(n, |i, j| metric.eval(coords.point(i), coords.point(j))))
        } else {
            DistanceStore::Lazy {
                coords: coords.clone(),
                metric,
                scale: 1.0,
            }
        };
        Ok(MMSpace {
            n,
            store,
            weights,
            coords: Some((coords, metric)),
            label: None,
        })
    }

    /// Builds a space from an explicit distance matrix after checking the
    /// metric axioms. Failures name the offending indices.
    pub fn from_distance_matrix(dist: &[Vec<f64>], weights: Option<Vec<f64>>) -> Result<Self> {
        let n = dist.len();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        for (row, r) in dist.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare {
                    row,
                    expected: n,
                    found: r.len(),
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let v = dist[i][j];
                if !v.is_finite() {
                    return Err(Error::NonFiniteDistance { i, j });
                }
                if v < 0.0 {
                    return Err(Error::NegativeDistance { i, j, value: v });
                }
            }
            if dist[i][i].abs() > METRIC_TOL {
                return Err(Error::NonzeroDiagonal { i, value: dist[i][i] });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if (dist[i][j] - dist[j][i]).abs() > METRIC_TOL {
                    return Err(Error::Asymmetric {
                        i,
                        j,
                        dij: dist[i][j],
                        dji: dist[j][i],
                    });
                }
            }
        }
        let weights = Self::check_weights(n, weights)?;
        let packed = Packed::from_fn(n, |i, j| dist[i][j]);
        let space = MMSpace {
            n,
            store: DistanceStore::Dense(packed),
            weights,
            coords: None,
            label: None,
        };
        space.check_triangle()?;
        Ok(space)
    }

    fn check_weights(n: usize, weights: Option<Vec<f64>>) -> Result<Vec<f64>> {
        match weights {
            None => Ok(measure::uniform(n)),
            Some(w) => {
                if w.len() != n {
                    return Err(Error::LengthMismatch {
                        what: "weights",
                        expected: n,
                        found: w.len(),
                    });
                }
                measure::validate_weights(&w, WEIGHT_SUM_TOL)?;
                Ok(w)
            }
        }
    }

    fn triangle_at(&self, i: usize, j: usize, k: usize) -> Result<()> {
        let dik = self.dist(i, k);
        let via = self.dist(i, j) + self.dist(j, k);
        if dik > via + METRIC_TOL {
            return Err(Error::TriangleViolation { i, j, k, dik, via });
        }
        Ok(())
    }

    /// Exhaustive for small spaces, sampled above [`EXHAUSTIVE_TRIANGLE_LIMIT`].
    pub fn check_triangle(&self) -> Result<()> {
        let n = self.n;
        if n <= EXHAUSTIVE_TRIANGLE_LIMIT {
            for i in 0..n {
                for k in (i + 1)..n {
                    for j in 0..n {
                        if j != i && j != k {
                            self.triangle_at(i, j, k)?;
                        }
                    }
                }
            }
        } else {
            let mut rng = crate::rng::seeded(0x7269_616e_676c_65);
            for _ in 0..SAMPLED_TRIPLES {
                let i = rng.random_range(0..n);
                let j = rng.random_range(0..n);
                let k = rng.random_range(0..n);
                self.triangle_at(i, j, k)?;
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.store.get(i, j)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Coordinates and metric, when the space was built from points.
    pub fn coords(&self) -> Option<(&Coords, Metric)> {
        self.coords.as_ref().map(|(c, m)| (c, *m))
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.store, DistanceStore::Dense(_))
    }

    /// Copies row `i` of the distance matrix into `out`.
    pub fn row_into(&self, i: usize, out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..self.n).map(|j| self.dist(i, j)));
    }

    /// Same points and distances under a different probability vector.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        let weights = Self::check_weights(self.n, Some(weights))?;
        Ok(MMSpace {
            weights,
            ..self.clone()
        })
    }

    /// All distances multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::param("factor", factor, "a positive finite number"));
        }
        let store = match &self.store {
            DistanceStore::Dense(p) => DistanceStore::Dense(p.map(|v| v * factor)),
            DistanceStore::Lazy { coords, metric, scale } => DistanceStore::Lazy {
                coords: coords.clone(),
                metric: *metric,
                scale: scale * factor,
            },
        };
        Ok(MMSpace {
            n: self.n,
            store,
            weights: self.weights.clone(),
            // coordinates no longer reproduce the distances
            coords: None,
            label: self.label.clone(),
        })
    }

    /// Restriction to `indices` with the restricted measure renormalised.
    pub fn subspace(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptySpace);
        }
        if let Some(&index) = indices.iter().find(|&&i| i >= self.n) {
            return Err(Error::IndexOutOfRange { index, n: self.n });
        }
        let total: f64 = indices.iter().map(|&i| self.weights[i]).sum();
        if total <= 0.0 {
            return Err(Error::WeightsNotNormalized { sum: total });
        }
        let weights: Vec<f64> = indices.iter().map(|&i| self.weights[i] / total).collect();
        let m = indices.len();
        let store = DistanceStore::Dense(Packed::from_fn(m, |a, b| self.dist(indices[a], indices[b])));
        let coords = self.coords.as_ref().map(|(c, metric)| {
            let mut data = Vec::with_capacity(m * c.dim);
            for &i in indices {
                data.extend_from_slice(c.point(i));
            }
            (Coords { data, dim: c.dim }, *metric)
        });
        Ok(MMSpace {
            n: m,
            store,
            weights,
            coords,
            label: self.label.clone(),
        })
    }

    /// Maximum pairwise distance; 0 for a singleton.
    pub fn diameter(&self) -> f64 {
        match &self.store {
            DistanceStore::Dense(p) => p.values().iter().copied().fold(0.0, f64::max),
            DistanceStore::Lazy { .. } => {
                let mut best = 0.0f64;
                for i in 0..self.n {
                    for j in (i + 1)..self.n {
                        best = best.max(self.dist(i, j));
                    }
                }
                best
            }
        }
    }

    /// A pair realising the diameter (the lexicographically first one).
    pub fn diametral_pair(&self) -> (usize, usize) {
        let mut best = (0, 0, -1.0);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let d = self.dist(i, j);
                if d > best.2 {
                    best = (i, j, d);
                }
            }
        }
        (best.0, best.1)
    }

    /// Mass of ordered pairs (diagonal included) at distance `<= v` under the
    /// product measure.
    pub fn pair_cdf(&self, v: f64) -> f64 {
        let w = &self.weights;
        let mut off = 0.0;
        for i in 0..self.n {
            let mut row = 0.0;
            for j in (i + 1)..self.n {
                if self.dist(i, j) <= v {
                    row += w[j];
                }
            }
            off += w[i] * row;
        }
        let diag: f64 = if v >= 0.0 { w.iter().map(|x| x * x).sum() } else { 0.0 };
        diag + 2.0 * off
    }

    /// Weighted medians of the pairwise-distance distribution under the
    /// product measure, diagonal included.
    pub fn char_size_medians(&self) -> MedianPair {
        if self.n <= SORTED_MEDIAN_LIMIT {
            return self.sorted_pair_medians();
        }
        let diam = self.diameter();
        let lower = measure::smallest_float_where(diam, |v| at_least(self.pair_cdf(v), 0.5));
        let upper = measure::smallest_float_where(diam, |v| self.pair_cdf(v) > 0.5 + MASS_TOL);
        MedianPair { lower, upper }
    }

    /// One pass over the pairs sorted by distance, with the cumulative mass
    /// taken at the end of each run of equal distances.
    fn sorted_pair_medians(&self) -> MedianPair {
        use rayon::prelude::*;
        let w = &self.weights;
        let mut pairs: Vec<(f64, f64)> = (0..self.n)
            .into_par_iter()
            .flat_map_iter(|i| ((i + 1)..self.n).map(move |j| (i, j)))
            .map(|(i, j)| (self.dist(i, j), 2.0 * w[i] * w[j]))
            .collect();
        pairs.par_sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let mut cum: f64 = w.iter().map(|x| x * x).sum();
        let (mut lower, mut upper) = (None, None);
        let mut check = |v: f64, cum: f64| {
            if lower.is_none() && at_least(cum, 0.5) {
                lower = Some(v);
            }
            if upper.is_none() && cum > 0.5 + MASS_TOL {
                upper = Some(v);
            }
        };
        check(0.0, cum);
        let mut k = 0;
        while k < pairs.len() {
            let v = pairs[k].0;
            while k < pairs.len() && pairs[k].0 == v {
                cum += pairs[k].1;
                k += 1;
            }
            check(v, cum);
        }
        let diam = self.diameter();
        MedianPair {
            lower: lower.unwrap_or(diam),
            upper: upper.unwrap_or(diam),
        }
    }

    /// Characteristic size: the lower weighted median pairwise distance.
    pub fn char_size(&self) -> f64 {
        self.char_size_medians().lower
    }

    /// Index of a point minimising eccentricity (max distance to others).
    pub fn min_eccentricity_point(&self) -> usize {
        let mut best = (0usize, f64::INFINITY);
        for i in 0..self.n {
            let ecc = (0..self.n).map(|j| self.dist(i, j)).fold(0.0, f64::max);
            if ecc < best.1 {
                best = (i, ecc);
            }
        }
        best.0
    }

    /// Sorted distinct realised distances, 0 included.
    pub fn distinct_distances(&self) -> Vec<f64> {
        let mut v: Vec<f64> = match &self.store {
            DistanceStore::Dense(p) => p.values().to_vec(),
            DistanceStore::Lazy { .. } => {
                let mut v = Vec::new();
                for i in 0..self.n {
                    for j in (i + 1)..self.n {
                        v.push(self.dist(i, j));
                    }
                }
                v
            }
        };
        v.push(0.0);
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Full distance matrix (for export and small-space oracles).
    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.dist(i, j)).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_point() -> MMSpace {
        MMSpace::from_distance_matrix(&[vec![0.0, 1.0], vec![1.0, 0.0]], None).unwrap()
    }

    #[test]
    fn singleton_from_points() {
        let s = MMSpace::from_points(&[vec![0.0, 0.0]], None, Metric::Euclidean).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.dist(0, 0), 0.0);
        assert_eq!(s.weights(), &[1.0]);
        assert_eq!(s.diameter(), 0.0);
        assert_eq!(s.char_size(), 0.0);
    }

    #[test]
    fn unit_segment() {
        let s = MMSpace::from_points(&[vec![0.0], vec![1.0]], None, Metric::Euclidean).unwrap();
        assert_eq!(s.dist(0, 1), 1.0);
        assert_eq!(s.dist(1, 0), 1.0);
    }

    #[test]
    fn hamming_bit_strings() {
        let pts = vec![vec![0.0, 0.0, 0.0], vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0]];
        let s = MMSpace::from_points(&pts, None, Metric::NormalizedHamming).unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(s.dist(i, j), 2.0 / 3.0);
        }
    }

    #[test]
    fn rejects_bad_points() {
        let err = MMSpace::from_points(&[vec![0.0], vec![f64::NAN]], None, Metric::Euclidean).unwrap_err();
        assert!(matches!(err, Error::NonFiniteCoordinate { row: 1, col: 0 }));
        let err = MMSpace::from_points(&[vec![0.0], vec![1.0]], Some(vec![1.5, -0.5]), Metric::Euclidean).unwrap_err();
        assert!(matches!(err, Error::NegativeWeight { index: 1, .. }));
        assert!(matches!(
            MMSpace::from_points(&[], None, Metric::Euclidean),
            Err(Error::EmptySpace)
        ));
    }

    #[test]
    fn matrix_validation() {
        assert_eq!(two_point().len(), 2);
        let err = MMSpace::from_distance_matrix(&[vec![0.0, 1.0], vec![2.0, 0.0]], None).unwrap_err();
        assert!(matches!(err, Error::Asymmetric { i: 0, j: 1, .. }), "{err}");
        let m = vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 1.0], vec![3.0, 1.0, 0.0]];
        let err = MMSpace::from_distance_matrix(&m, None).unwrap_err();
        assert!(matches!(err, Error::TriangleViolation { i: 0, j: 1, k: 2, .. }), "{err}");
        let err = MMSpace::from_distance_matrix(&[vec![0.0, 1.0]], None).unwrap_err();
        assert!(matches!(err, Error::NotSquare { .. }));
        let err = MMSpace::from_distance_matrix(&[vec![0.5]], None).unwrap_err();
        assert!(matches!(err, Error::NonzeroDiagonal { i: 0, .. }));
    }

    #[test]
    fn sorted_and_bisected_medians_agree() {
        for i in 0..40 {
            let s = crate::random::suite_instance(17, i, 20).unwrap();
            let diam = s.diameter();
            let lower = measure::smallest_float_where(diam, |v| at_least(s.pair_cdf(v), 0.5));
            let upper = measure::smallest_float_where(diam, |v| s.pair_cdf(v) > 0.5 + MASS_TOL);
            assert_eq!(s.sorted_pair_medians(), MedianPair { lower, upper }, "instance {i}");
        }
    }

    #[test]
    fn two_point_char_size_medians() {
        let m = two_point().char_size_medians();
        assert_eq!(m.lower, 0.0);
        assert_eq!(m.upper, 1.0);
    }

    #[test]
    fn subspace_renormalises() {
        let s = MMSpace::from_points(&[vec![0.0], vec![1.0], vec![3.0]], Some(vec![0.5, 0.25, 0.25]), Metric::Euclidean)
            .unwrap();
        let sub = s.subspace(&[1, 2]).unwrap();
        assert_eq!(sub.weights(), &[0.5, 0.5]);
        assert_eq!(sub.dist(0, 1), 2.0);
    }

    #[test]
    fn scaling_multiplies_distances() {
        let s = two_point().scaled(4.0).unwrap();
        assert_eq!(s.dist(0, 1), 4.0);
        assert_eq!(s.diameter(), 4.0);
    }

    #[test]
    fn distinct_distances_include_zero() {
        assert_eq!(two_point().distinct_distances(), vec![0.0, 1.0]);
    }
}
