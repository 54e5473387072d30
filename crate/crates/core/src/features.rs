//! Lipschitz features and finite feature dictionaries.

use crate::measure::lower_median;
use crate::mmspace::io::{fmt_f64, write_csv};
use crate::{rng, Error, MMSpace, Result};
use rand::Rng as _;
use rayon::prelude::*;
use std::path::Path;

/// Slack on the certificate `L <= 1`.
pub const LIPSCHITZ_TOL: f64 = 1e-12;

/// Real values on the points of a space, with their exact Lipschitz constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Feature {
    values: Vec<f64>,
    lipschitz: f64,
    /// Pair attaining `lipschitz`, if any pair has a nonzero ratio.
    argmax: Option<(usize, usize)>,
    sup_norm: f64,
}

/// Outcome of [`check_lipschitz`].
#[derive(Debug, Clone, PartialEq)]
pub enum LipschitzCheck {
    Certified(Feature),
    Violation { ratio: f64, pair: (usize, usize) },
}

fn exact_lipschitz(space: &MMSpace, values: &[f64]) -> (f64, Option<(usize, usize)>) {
    let n = space.len();
    let best = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = (0.0f64, None);
            for j in (i + 1)..n {
                let df = (values[i] - values[j]).abs();
                if df == 0.0 {
                    continue;
                }
                let d = space.dist(i, j);
                let r = if d > 0.0 { df / d } else { f64::INFINITY };
                if r > best.0 {
                    best = (r, Some((i, j)));
                }
            }
            best
        })
        // ties resolved towards the lexicographically first pair
        .reduce(
            || (0.0, None),
            |a, b| match (a.1, b.1) {
                (_, None) => a,
                (None, _) => b,
                (Some(pa), Some(pb)) => {
                    if b.0 > a.0 || (b.0 == a.0 && pb < pa) {
                        b
                    } else {
                        a
                    }
                }
            },
        );
    best
}

impl Feature {
    /// Computes the exact Lipschitz constant over all pairs at distance > 0
    /// (pairs at distance 0 with different values give `+inf`).
    pub fn new(space: &MMSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LengthMismatch {
                what: "feature values",
                expected: space.len(),
                found: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param("feature value", format!("index {index}"), "finite"));
        }
        let (lipschitz, argmax) = exact_lipschitz(space, &values);
        let sup_norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(Feature {
            values,
            lipschitz,
            argmax,
            sup_norm,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn argmax_pair(&self) -> Option<(usize, usize)> {
        self.argmax
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn is_one_lipschitz(&self) -> bool {
        self.lipschitz <= 1.0 + LIPSCHITZ_TOL
    }

    /// `f + c`. The Lipschitz constant is unchanged.
    pub fn shifted(&self, c: f64) -> Feature {
        let values: Vec<f64> = self.values.iter().map(|v| v + c).collect();
        let sup_norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Feature {
            values,
            sup_norm,
            ..self.clone()
        }
    }

    /// Shifted so its lower weighted median sits at `at`.
    pub fn median_centred(&self, weights: &[f64], at: f64) -> Feature {
        self.shifted(at - lower_median(&self.values, weights))
    }
}

/// Certifies `values` as 1-Lipschitz or names the worst pair.
pub fn check_lipschitz(space: &MMSpace, values: Vec<f64>) -> Result<LipschitzCheck> {
    let f = Feature::new(space, values)?;
    if f.is_one_lipschitz() {
        Ok(LipschitzCheck::Certified(f))
    } else {
        Ok(LipschitzCheck::Violation {
            ratio: f.lipschitz,
            pair: f.argmax.unwrap_or((0, 0)),
        })
    }
}

/// `x -> min_{a in anchors} d(x, a)`.
pub fn distance_feature(space: &MMSpace, anchors: &[usize]) -> Result<Feature> {
    if anchors.is_empty() {
        return Err(Error::EmptyAnchorSet);
    }
    if let Some(&index) = anchors.iter().find(|&&a| a >= space.len()) {
        return Err(Error::IndexOutOfRange { index, n: space.len() });
    }
    let values = (0..space.len())
        .into_par_iter()
        .map(|i| anchors.iter().map(|&a| space.dist(i, a)).fold(f64::INFINITY, f64::min))
        .collect();
    Feature::new(space, values)
}

/// Families of 1-Lipschitz features standing in for all of `Lip_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DictionaryKind {
    /// One distance feature per point.
    AnchorsAll,
    /// `k` distance features at uniformly drawn points.
    AnchorsRandom { k: usize, seed: u64 },
    /// `k` features `(d(x,p) - d(x,q)) / 2` over random pairs `p != q`.
    HalfspaceDifferences { k: usize, seed: u64 },
}

pub fn dictionary(space: &MMSpace, kind: DictionaryKind) -> Result<Vec<Feature>> {
    let n = space.len();
    match kind {
        DictionaryKind::AnchorsAll => (0..n).map(|a| distance_feature(space, &[a])).collect(),
        DictionaryKind::AnchorsRandom { k, seed } => {
            if k == 0 {
                return Err(Error::param("k", k, "at least 1"));
            }
            let mut r = rng::seeded(seed);
            let anchors: Vec<usize> = (0..k).map(|_| r.random_range(0..n)).collect();
            anchors.iter().map(|&a| distance_feature(space, &[a])).collect()
        }
        DictionaryKind::HalfspaceDifferences { k, seed } => {
            if k == 0 {
                return Err(Error::param("k", k, "at least 1"));
            }
            let mut r = rng::seeded(seed);
            (0..k)
                .map(|_| {
                    let p = r.random_range(0..n);
                    let q = if n > 1 {
                        // uniform over points other than p
                        let q = r.random_range(0..n - 1);
                        if q >= p {
                            q + 1
                        } else {
                            q
                        }
                    } else {
                        p
                    };
                    halfspace_feature(space, p, q)
                })
                .collect()
        }
    }
}

pub fn halfspace_feature(space: &MMSpace, p: usize, q: usize) -> Result<Feature> {
    for index in [p, q] {
        if index >= space.len() {
            return Err(Error::IndexOutOfRange { index, n: space.len() });
        }
    }
    let values = (0..space.len()).map(|x| (space.dist(x, p) - space.dist(x, q)) / 2.0).collect();
    Feature::new(space, values)
}

/// One row per point: `point, f0, f1, ...`.
pub fn write_features(path: &Path, features: &[Feature]) -> Result<()> {
    let names: Vec<String> = std::iter::once("point".to_string())
        .chain((0..features.len()).map(|k| format!("f{k}")))
        .collect();
    let header: Vec<&str> = names.iter().map(String::as_str).collect();
    let n = features.first().map_or(0, Feature::len);
    let rows: Vec<Vec<String>> = (0..n)
        .map(|i| {
            std::iter::once(i.to_string())
                .chain(features.iter().map(|f| fmt_f64(f.values[i])))
                .collect()
        })
        .collect();
    write_csv(path, &header, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mmspace::{generate, Family, GeneratorSpec, Metric};

    fn two_point() -> MMSpace {
        MMSpace::from_distance_matrix(&[vec![0.0, 1.0], vec![1.0, 0.0]], None).unwrap()
    }

    fn cube(d: u32) -> MMSpace {
        generate(&GeneratorSpec::new(Family::HammingCube { d }, 0)).unwrap()
    }

    #[test]
    fn all_anchors_give_zero_feature() {
        let s = cube(3);
        let all: Vec<usize> = (0..8).collect();
        let f = distance_feature(&s, &all).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
        assert_eq!(f.lipschitz(), 0.0);
    }

    #[test]
    fn two_point_anchor() {
        let f = distance_feature(&two_point(), &[0]).unwrap();
        assert_eq!(f.values(), &[0.0, 1.0]);
        assert_eq!(f.lipschitz(), 1.0);
        assert!(matches!(distance_feature(&two_point(), &[]), Err(Error::EmptyAnchorSet)));
    }

    #[test]
    fn cube_anchor_is_hamming_weight() {
        let f = distance_feature(&cube(3), &[0]).unwrap();
        for k in 0..8usize {
            assert_eq!(f.values()[k], k.count_ones() as f64 / 3.0);
        }
        // rounding in 1 - 1/3 leaves the ratio one ulp above 1
        assert!(f.is_one_lipschitz());
        assert!((f.lipschitz() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lipschitz_checks() {
        let s = two_point();
        match check_lipschitz(&s, vec![3.0, 3.0]).unwrap() {
            LipschitzCheck::Certified(f) => assert_eq!(f.lipschitz(), 0.0),
            v => panic!("{v:?}"),
        }
        assert_eq!(
            check_lipschitz(&s, vec![0.0, 2.0]).unwrap(),
            LipschitzCheck::Violation {
                ratio: 2.0,
                pair: (0, 1)
            }
        );
    }

    #[test]
    fn sphere_projection_is_one_lipschitz() {
        let s = generate(&GeneratorSpec::new(Family::Sphere { dim: 5, n: 300 }, 2)).unwrap();
        let (c, _) = s.coords().unwrap();
        let values = (0..s.len()).map(|i| c.point(i)[0]).collect();
        let f = Feature::new(&s, values).unwrap();
        assert!(f.is_one_lipschitz(), "{}", f.lipschitz());
    }

    #[test]
    fn dictionaries() {
        let s = two_point();
        assert_eq!(dictionary(&s, DictionaryKind::AnchorsAll).unwrap().len(), 2);
        let h = halfspace_feature(&s, 0, 1).unwrap();
        assert_eq!(h.values(), &[-0.5, 0.5]);
        assert_eq!(h.lipschitz(), 1.0);

        let s = MMSpace::from_points(
            &(0..20).map(|i| vec![(i * i % 7) as f64, i as f64]).collect::<Vec<_>>(),
            None,
            Metric::Euclidean,
        )
        .unwrap();
        let kind = DictionaryKind::AnchorsRandom { k: 5, seed: 9 };
        assert_eq!(dictionary(&s, kind).unwrap(), dictionary(&s, kind).unwrap());
        for kind in [kind, DictionaryKind::HalfspaceDifferences { k: 8, seed: 1 }] {
            for f in dictionary(&s, kind).unwrap() {
                assert!(f.is_one_lipschitz());
            }
        }
        assert!(dictionary(&s, DictionaryKind::AnchorsRandom { k: 0, seed: 0 }).is_err());
    }

    #[test]
    fn centring_preserves_lipschitz_and_bounds_sup_norm() {
        let s = cube(4);
        for f in dictionary(&s, DictionaryKind::AnchorsAll).unwrap() {
            let c = f.median_centred(s.weights(), 0.0);
            assert_eq!(c.lipschitz(), f.lipschitz());
            assert!(c.sup_norm() <= s.diameter());
        }
    }
}
