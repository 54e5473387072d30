//! Small helpers for finite probability measures.

/// Slack allowed when comparing a set's measure against a threshold.
///
/// Measures are sums of floats, so a set whose exact mass equals the
/// threshold may land a few ulps below it.
pub const MASS_TOL: f64 = 1e-12;

/// Tolerance on `sum(weights) == 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[inline]
pub fn at_least(mass: f64, threshold: f64) -> bool {
    mass >= threshold - MASS_TOL
}

pub fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

pub fn validate_weights(weights: &[f64], tol: f64) -> crate::Result<()> {
    for (index, &w) in weights.iter().enumerate() {
        if !w.is_finite() {
            return Err(crate::Error::NonFiniteWeight { index });
        }
        if w < 0.0 {
            return Err(crate::Error::NegativeWeight { index, value: w });
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(crate::Error::WeightsNotNormalized { sum });
    }
    Ok(())
}

/// Lower weighted median: the smallest value whose cumulative mass reaches 1/2.
pub fn lower_median(values: &[f64], weights: &[f64]) -> f64 {
    debug_assert_eq!(values.len(), weights.len());
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut cum = 0.0;
    for &i in &order {
        cum += weights[i];
        if at_least(cum, 0.5) {
            return values[i];
        }
    }
    order.last().map(|&i| values[i]).unwrap_or(0.0)
}

/// Smallest non-negative float `v` in `[0, hi]` for which `pred(v)` holds,
/// assuming `pred` is monotone and `pred(hi)` is true.
///
/// Bisects over the IEEE bit pattern, so the answer is exact: when `pred`
/// only changes value at a finite set of points the result is one of them.
pub fn smallest_float_where(hi: f64, pred: impl Fn(f64) -> bool) -> f64 {
    debug_assert!(hi >= 0.0);
    if pred(0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0u64, hi.to_bits());
    // invariant: !pred(lo), pred(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(f64::from_bits(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    f64::from_bits(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_median_of_two_equal_masses() {
        assert_eq!(lower_median(&[0.0, 1.0], &[0.5, 0.5]), 0.0);
        assert_eq!(lower_median(&[3.0, 1.0, 2.0], &uniform(3)), 2.0);
    }

    #[test]
    fn bisection_finds_exact_breakpoint() {
        let x = 0.1 + 0.2;
        assert_eq!(smallest_float_where(10.0, |v| v >= x), x);
        assert_eq!(smallest_float_where(10.0, |_| true), 0.0);
    }

    #[test]
    fn weight_validation() {
        assert!(validate_weights(&[0.5, 0.5], WEIGHT_SUM_TOL).is_ok());
        assert!(matches!(
            validate_weights(&[1.5, -0.5], WEIGHT_SUM_TOL),
            Err(crate::Error::NegativeWeight { index: 1, .. })
        ));
        assert!(matches!(
            validate_weights(&[0.5, 0.4], WEIGHT_SUM_TOL),
            Err(crate::Error::WeightsNotNormalized { .. })
        ));
    }
}
