use crate::features::Feature;
use crate::measure::smallest_float_where;
use crate::{Error, MMSpace, Result};
use rayon::prelude::*;

/// `P[|f(x) - f(y)| > u]` under the product measure over ordered pairs,
/// from values sorted ascending.
fn tail(sorted: &[(f64, f64)], u: f64) -> f64 {
    // for each i, mass of j with v_j - v_i > u; the boundary moves right with i
    let n = sorted.len();
    let mut suffix = vec![0.0; n + 1];
    for k in (0..n).rev() {
        suffix[k] = suffix[k + 1] + sorted[k].1;
    }
    let mut p = 0;
    let mut total = 0.0;
    for i in 0..n {
        if p < i {
            p = i;
        }
        while p < n && sorted[p].0 - sorted[i].0 <= u {
            p += 1;
        }
        total += sorted[i].1 * suffix[p];
    }
    2.0 * total
}

/// Least `D` with `P[|f(x) - f(y)| >= D] < κ` for a single feature. The
/// infimum is the smallest `u` with `P[|f(x) - f(y)| > u] < κ`, which is a
/// realised difference.
pub fn feature_obs_diam(weights: &[f64], feature: &Feature, kappa: f64) -> f64 {
    let mut sorted: Vec<(f64, f64)> = feature.values().iter().copied().zip(weights.iter().copied()).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let spread = sorted.last().map_or(0.0, |l| l.0) - sorted.first().map_or(0.0, |f| f.0);
    smallest_float_where(spread, |u| tail(&sorted, u) < kappa)
}

/// Largest single-feature observable diameter over the dictionary: a lower
/// bound on the observable diameter taken over all 1-Lipschitz features.
pub fn observable_diameter(space: &MMSpace, kappa: f64, dictionary: &[Feature]) -> Result<f64> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::param("kappa", kappa, "a value in (0, 1)"));
    }
    for f in dictionary {
        if f.len() != space.len() {
            return Err(Error::LengthMismatch {
                what: "dictionary feature",
                expected: space.len(),
                found: f.len(),
            });
        }
        if !f.is_one_lipschitz() {
            return Err(Error::UncertifiedFeature { lipschitz: f.lipschitz() });
        }
    }
    Ok(dictionary
        .par_iter()
        .map(|f| feature_obs_diam(space.weights(), f, kappa))
        .reduce(|| 0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> MMSpace {
        MMSpace::from_distance_matrix(&[vec![0.0, 1.0], vec![1.0, 0.0]], None).unwrap()
    }

    #[test]
    fn two_point_identity_feature() {
        let s = two_point();
        let f = Feature::new(&s, vec![0.0, 1.0]).unwrap();
        assert_eq!(observable_diameter(&s, 0.3, &[f.clone()]).unwrap(), 1.0);
        // P[differ] = 1/2 < 0.6 already at u = 0
        assert_eq!(observable_diameter(&s, 0.6, &[f]).unwrap(), 0.0);
    }

    #[test]
    fn singleton_is_zero() {
        let s = MMSpace::from_distance_matrix(&[vec![0.0]], None).unwrap();
        let f = Feature::new(&s, vec![3.0]).unwrap();
        for k in [0.01, 0.5, 0.99] {
            assert_eq!(observable_diameter(&s, k, &[f.clone()]).unwrap(), 0.0);
        }
    }

    #[test]
    fn tail_matches_brute_force() {
        let v = [0.3, -1.0, 0.3, 2.5, 0.9];
        let w = [0.1, 0.2, 0.3, 0.15, 0.25];
        let mut sorted: Vec<(f64, f64)> = v.iter().copied().zip(w.iter().copied()).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        for u in [0.0, 0.5, 0.6, 1.3, 3.4, 4.0] {
            let mut brute = 0.0;
            for i in 0..5 {
                for j in 0..5 {
                    if (v[i] - v[j]).abs() > u {
                        brute += w[i] * w[j];
                    }
                }
            }
            assert!((tail(&sorted, u) - brute).abs() < 1e-15, "u={u}");
        }
    }

    #[test]
    fn rejects_uncertified_features() {
        let s = two_point();
        let f = Feature::new(&s, vec![0.0, 2.0]).unwrap();
        assert!(matches!(
            observable_diameter(&s, 0.3, &[f]),
            Err(Error::UncertifiedFeature { .. })
        ));
    }
}
