//! Dimension functionals and the bracket on the Gromov distance to a point.

use crate::concentration::{ConcentrationProfile, GridKind, Mode, SeparationProfile};
use crate::{Error, MMSpace, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A dimension value. `+∞` is explicit, never a sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dim {
    Finite(f64),
    Infinite,
}

impl Dim {
    /// `1 / (2 I)^2`, infinite when the integral vanishes.
    fn from_integral(i: f64) -> Dim {
        if i > 0.0 {
            Dim::Finite(1.0 / (4.0 * i * i))
        } else {
            Dim::Infinite
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Dim::Finite(v) => v,
            Dim::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Dim::Infinite)
    }
}

impl std::fmt::Display for Dim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dim::Finite(v) => write!(f, "{v}"),
            Dim::Infinite => f.write_str("infinity"),
        }
    }
}

impl Serialize for Dim {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Dim::Finite(v) => s.serialize_f64(*v),
            Dim::Infinite => s.serialize_str("infinity"),
        }
    }
}

impl<'de> Deserialize<'de> for Dim {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Dim::Finite(v)),
            Raw::Text(t) if t == "infinity" => Ok(Dim::Infinite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("expected a number or \"infinity\", got {t:?}"))),
        }
    }
}

/// Upper end of the ε integral for the concentration dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AlphaRange {
    /// `[0, diameter]`, defined for spaces of any size.
    #[default]
    Diameter,
    /// `[0, 1]`, meaningful for spaces of diameter at most 1.
    Unit,
}

/// `∫ α(ε) dε` over the chosen range, divided by `length_unit`.
///
/// α is integrated as the right-continuous step function its grid defines:
/// on `[g_k, g_(k+1))` it takes the value at `g_k`, below the first positive
/// grid point it takes `α(0+)`, and past the last grid point the last value.
/// On a realised-distance grid this is the exact integral.
pub fn alpha_integral(profile: &ConcentrationProfile, range: AlphaRange, length_unit: f64) -> Result<f64> {
    if profile.is_empty() {
        return Err(Error::param("concentration profile", "empty", "at least one grid point"));
    }
    if !(length_unit.is_finite() && length_unit > 0.0) {
        return Err(Error::param("length_unit", length_unit, "a positive finite number"));
    }
    let upper = match range {
        AlphaRange::Diameter => profile.diameter,
        AlphaRange::Unit => length_unit,
    };
    let g = &profile.eps_grid;
    let mut total = 0.0;
    // breakpoints with the value holding to their right
    let mut steps: Vec<(f64, f64)> = Vec::with_capacity(g.len() + 1);
    steps.push((0.0, profile.alpha_zero_plus));
    for (k, &e) in g.iter().enumerate() {
        if e > 0.0 {
            steps.push((e, profile.alpha[k]));
        }
    }
    for (k, &(start, value)) in steps.iter().enumerate() {
        if start >= upper {
            break;
        }
        let end = steps.get(k + 1).map_or(upper, |s| s.0.min(upper));
        total += value * (end - start);
    }
    Ok(total / length_unit)
}

/// `1 / (2 ∫ α)^2`; `+∞` when the integral is 0.
pub fn dim_concentration(profile: &ConcentrationProfile, range: AlphaRange, length_unit: f64) -> Result<Dim> {
    Ok(Dim::from_integral(alpha_integral(profile, range, length_unit)?))
}

/// `∫_0^(1/2) sep_κ dκ`, divided by `length_unit`. On `(κ_(k-1), κ_k]` the
/// integrand is `sep(κ_k)` (with `κ_0 = 0`), the smallest value there since
/// sep is non-increasing; the tail past the last grid point counts as 0. The
/// result is therefore a lower bound on the integral of the step data.
pub fn sep_integral(profile: &SeparationProfile, length_unit: f64) -> Result<f64> {
    if profile.is_empty() {
        return Err(Error::param("separation profile", "empty", "at least one grid point"));
    }
    if !(length_unit.is_finite() && length_unit > 0.0) {
        return Err(Error::param("length_unit", length_unit, "a positive finite number"));
    }
    let mut total = 0.0;
    let mut prev = 0.0;
    for (k, &kappa) in profile.kappa_grid.iter().enumerate() {
        total += profile.sep[k] * (kappa - prev);
        prev = kappa;
    }
    Ok(total / length_unit)
}

/// `1 / (2 ∫_0^(1/2) sep_κ dκ)^2`; `+∞` when the integral is 0.
pub fn dim_separation(profile: &SeparationProfile, length_unit: f64) -> Result<Dim> {
    Ok(Dim::from_integral(sep_integral(profile, length_unit)?))
}

/// Whether the diagonal pairs `(x, x)` enter the distance distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Diagonal {
    #[default]
    Included,
    /// Off-diagonal pairs only, renormalised to mass 1.
    Excluded,
}

/// Mean and variance of the distance under the product measure.
pub fn distance_moments(space: &MMSpace, diagonal: Diagonal) -> (f64, f64) {
    let n = space.len();
    let w = space.weights();
    let diag_mass: f64 = w.iter().map(|x| x * x).sum();
    let mass = match diagonal {
        Diagonal::Included => 1.0,
        Diagonal::Excluded => 1.0 - diag_mass,
    };
    if mass <= 0.0 {
        return (0.0, 0.0);
    }
    let mut sum = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in (i + 1)..n {
            row += w[j] * space.dist(i, j);
        }
        sum += w[i] * row;
    }
    let mean = 2.0 * sum / mass;
    // second pass around the mean
    let mut sq = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in (i + 1)..n {
            let dev = space.dist(i, j) - mean;
            row += w[j] * dev * dev;
        }
        sq += w[i] * row;
    }
    let mut var = 2.0 * sq;
    if diagonal == Diagonal::Included {
        var += diag_mass * mean * mean;
    }
    (mean, var / mass)
}

/// Relative variance below which the distance distribution counts as a
/// point mass.
const VARIANCE_FLOOR: f64 = 1e-15;

/// `m^2 / (2 σ^2)` of the distance distribution; `+∞` for a point mass.
pub fn dim_chavez(space: &MMSpace, diagonal: Diagonal) -> Dim {
    let (m, var) = distance_moments(space, diagonal);
    if var <= VARIANCE_FLOOR * m * m || var == 0.0 {
        Dim::Infinite
    } else {
        Dim::Finite(m * m / (2.0 * var))
    }
}

/// Interval certified to contain the Gromov distance to a one-point space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    /// Set when the profile is only a lower bound: `lo` stays certified but
    /// `hi` falls back to the diameter.
    pub one_sided: bool,
}

impl Bracket {
    pub fn midpoint(&self) -> f64 {
        (self.lo + self.hi) / 2.0
    }
}

/// Bracket from the two implications
/// `α(ε) > ε/2 ⇒ d > ε/2` and `α(ε) <= ε/2 ⇒ d <= ε`.
///
/// On a realised-distance grid α is known everywhere, so both ends are taken
/// over all real ε. On a custom grid only the grid points are used.
pub fn dconc_to_point_bracket(profile: &ConcentrationProfile) -> Result<Bracket> {
    if profile.is_empty() {
        return Err(Error::param("concentration profile", "empty", "at least one grid point"));
    }
    let diam = profile.diameter;
    let one_sided = !profile.mode.is_exact();
    if diam == 0.0 {
        return Ok(Bracket {
            lo: 0.0,
            hi: 0.0,
            one_sided,
        });
    }
    let g = &profile.eps_grid;
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    match profile.grid_kind {
        GridKind::RealizedDistances => {
            // value on [start, end): zero_plus on (0, g_1), then α(g_k)
            let mut pieces: Vec<(f64, f64)> = vec![(0.0, profile.alpha_zero_plus)];
            for (k, &e) in g.iter().enumerate() {
                if e > 0.0 {
                    pieces.push((e, profile.alpha[k]));
                }
            }
            for (k, &(start, a)) in pieces.iter().enumerate() {
                let end = pieces.get(k + 1).map_or(f64::INFINITY, |p| p.0);
                // sup of ε/2 over ε in [start, end) with ε < 2a
                if 2.0 * a > start {
                    lo = lo.max(end.min(2.0 * a) / 2.0);
                }
                // least ε in [start, end) with ε >= 2a
                let least = start.max(2.0 * a);
                if least < end && least > 0.0 {
                    hi = hi.min(least);
                }
            }
        }
        GridKind::Custom => {
            for (k, &e) in g.iter().enumerate() {
                let a = if e == 0.0 { 0.5 } else { profile.alpha[k] };
                if a > e / 2.0 {
                    lo = lo.max(e.min(2.0 * a) / 2.0);
                } else if hi.is_infinite() {
                    hi = e;
                }
            }
        }
    }
    if one_sided || hi.is_infinite() {
        hi = diam;
    }
    Ok(Bracket {
        lo: lo.min(hi),
        hi,
        one_sided,
    })
}

/// Everything the `dims` command reports, with the inputs' provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub dim_concentration: Dim,
    pub dim_separation: Dim,
    pub dim_chavez: Dim,
    pub dconc_to_point: Bracket,
    pub alpha_mode: Mode,
    pub sep_mode: Mode,
    pub alpha_range: AlphaRange,
    pub diagonal: Diagonal,
    pub eps_grid: Vec<f64>,
    pub kappa_grid: Vec<f64>,
}

pub fn report(
    space: &MMSpace,
    alpha: &ConcentrationProfile,
    sep: &SeparationProfile,
    range: AlphaRange,
    diagonal: Diagonal,
) -> Result<DimensionReport> {
    Ok(DimensionReport {
        dim_concentration: dim_concentration(alpha, range, 1.0)?,
        dim_separation: dim_separation(sep, 1.0)?,
        dim_chavez: dim_chavez(space, diagonal),
        dconc_to_point: dconc_to_point_bracket(alpha)?,
        alpha_mode: alpha.mode,
        sep_mode: sep.mode,
        alpha_range: range,
        diagonal,
        eps_grid: alpha.eps_grid.clone(),
        kappa_grid: sep.kappa_grid.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concentration::{alpha_exact_profile, kappa_grid, sep_exact_profile};

    fn two_point() -> MMSpace {
        MMSpace::from_distance_matrix(&[vec![0.0, 1.0], vec![1.0, 0.0]], None).unwrap()
    }

    fn singleton() -> MMSpace {
        MMSpace::from_distance_matrix(&[vec![0.0]], None).unwrap()
    }

    #[test]
    fn two_point_dimensions() {
        let s = two_point();
        let a = alpha_exact_profile(&s, &s.distinct_distances()).unwrap();
        assert_eq!(alpha_integral(&a, AlphaRange::Diameter, 1.0).unwrap(), 0.5);
        assert_eq!(dim_concentration(&a, AlphaRange::Diameter, 1.0).unwrap(), Dim::Finite(1.0));
        let sp = sep_exact_profile(&s, &kappa_grid(50)).unwrap();
        assert!(sp.sep.iter().all(|&v| v == 1.0));
        let j = sep_integral(&sp, 1.0).unwrap();
        assert!((j - 0.5).abs() < 1e-15);
        assert!((dim_separation(&sp, 1.0).unwrap().value() - 1.0).abs() < 1e-12);
        assert_eq!(dim_chavez(&s, Diagonal::Included), Dim::Finite(0.5));
        let b = dconc_to_point_bracket(&a).unwrap();
        assert_eq!((b.lo, b.hi), (0.5, 1.0));
        assert!(!b.one_sided);
    }

    #[test]
    fn singleton_is_infinite_everywhere() {
        let s = singleton();
        let a = alpha_exact_profile(&s, &s.distinct_distances()).unwrap();
        for range in [AlphaRange::Diameter, AlphaRange::Unit] {
            assert_eq!(dim_concentration(&a, range, 1.0).unwrap(), Dim::Infinite);
        }
        let sp = sep_exact_profile(&s, &kappa_grid(10)).unwrap();
        assert_eq!(dim_separation(&sp, 1.0).unwrap(), Dim::Infinite);
        assert_eq!(dim_chavez(&s, Diagonal::Included), Dim::Infinite);
        assert_eq!(dim_chavez(&s, Diagonal::Excluded), Dim::Infinite);
        let b = dconc_to_point_bracket(&a).unwrap();
        assert_eq!((b.lo, b.hi), (0.0, 0.0));
    }

    #[test]
    fn dim_serialises_infinity_explicitly() {
        assert_eq!(serde_json::to_string(&Dim::Infinite).unwrap(), "\"infinity\"");
        assert_eq!(serde_json::to_string(&Dim::Finite(1.5)).unwrap(), "1.5");
        let back: Dim = serde_json::from_str("\"infinity\"").unwrap();
        assert_eq!(back, Dim::Infinite);
        let back: Dim = serde_json::from_str("2.0").unwrap();
        assert_eq!(back, Dim::Finite(2.0));
    }

    #[test]
    fn chavez_is_scale_free() {
        let s = MMSpace::from_points(
            &[vec![0.0], vec![1.0], vec![3.0], vec![7.0]],
            None,
            crate::mmspace::Metric::Euclidean,
        )
        .unwrap();
        let a = dim_chavez(&s, Diagonal::Included).value();
        let b = dim_chavez(&s.scaled(0.25).unwrap(), Diagonal::Included).value();
        assert_eq!(a, b);
    }

    #[test]
    fn lower_bound_profile_gives_one_sided_bracket() {
        let s = two_point();
        let a = crate::concentration::alpha_lower(&s, &s.distinct_distances(), &[]).unwrap();
        let b = dconc_to_point_bracket(&a).unwrap();
        assert!(b.one_sided);
        assert_eq!((b.lo, b.hi), (0.5, 1.0));
    }
}
