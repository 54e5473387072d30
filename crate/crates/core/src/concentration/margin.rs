use crate::features::Feature;
use crate::{Error, MMSpace, Result};

/// Soft-margin error `μ{x : |f(x) - 1/2| < γ}`. The labels enter the margin
/// notation but not its value, so they are only checked for length.
pub fn margin_error(space: &MMSpace, labels: &[bool], feature: &Feature, gamma: f64) -> Result<f64> {
    if labels.len() != space.len() {
        return Err(Error::LengthMismatch {
            what: "labels",
            expected: space.len(),
            found: labels.len(),
        });
    }
    if feature.len() != space.len() {
        return Err(Error::LengthMismatch {
            what: "feature values",
            expected: space.len(),
            found: feature.len(),
        });
    }
    if !feature.is_one_lipschitz() {
        return Err(Error::UncertifiedFeature {
            lipschitz: feature.lipschitz(),
        });
    }
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::param("gamma", gamma, "a finite non-negative number"));
    }
    Ok(feature
        .values()
        .iter()
        .zip(space.weights())
        .filter(|(v, _)| (*v - 0.5).abs() < gamma)
        .map(|(_, w)| w)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> MMSpace {
        MMSpace::from_distance_matrix(&[vec![0.0, 1.0], vec![1.0, 0.0]], None).unwrap()
    }

    #[test]
    fn constant_half_has_full_error() {
        let s = two_point();
        let f = Feature::new(&s, vec![0.5, 0.5]).unwrap();
        assert_eq!(margin_error(&s, &[true, false], &f, 0.1).unwrap(), 1.0);
        assert_eq!(margin_error(&s, &[true, false], &f, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn uncertified_feature_is_rejected() {
        let s = two_point();
        let f = Feature::new(&s, vec![0.0, 2.0]).unwrap();
        assert!(matches!(
            margin_error(&s, &[true, true], &f, 0.1),
            Err(Error::UncertifiedFeature { .. })
        ));
    }
}
