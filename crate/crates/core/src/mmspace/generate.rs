use super::{Coords, MMSpace, Metric};
use crate::{rng, Error, Result};
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

pub const MAX_GENERATED_POINTS: usize = 1_000_000;
pub const MAX_HAMMING_CUBE_DIM: u32 = 20;

/// Reference families of mm-spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `n` uniform points on the unit sphere `S^dim` in `R^(dim+1)`.
    Sphere { dim: usize, n: usize },
    /// All `2^d` bit strings, normalised Hamming metric, uniform measure.
    HammingCube { d: u32 },
    /// `n` i.i.d. uniform bit strings of length `d`.
    HammingSample { d: usize, n: usize },
    /// `n` i.i.d. draws from `N(0, sigma^2 I_d)`.
    GaussianCloud { d: usize, sigma: f64, n: usize },
    /// `n` points drawn from `base` (by its measure), placed in the first
    /// coordinates of `R^ambient_d` and perturbed by `N(0, sigma^2 I)`.
    NoisyEmbedding {
        base: Box<GeneratorSpec>,
        ambient_d: usize,
        sigma: f64,
        n: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub family: Family,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        GeneratorSpec { family, seed }
    }

    pub fn label(&self) -> String {
        match &self.family {
            Family::Sphere { dim, n } => format!("sphere(dim={dim}, n={n})"),
            Family::HammingCube { d } => format!("hamming_cube(d={d})"),
            Family::HammingSample { d, n } => format!("hamming_sample(d={d}, n={n})"),
            Family::GaussianCloud { d, sigma, n } => format!("gaussian_cloud(d={d}, sigma={sigma}, n={n})"),
            Family::NoisyEmbedding {
                base,
                ambient_d,
                sigma,
                n,
            } => format!("noisy_embedding(base={}, ambient_d={ambient_d}, sigma={sigma}, n={n})", base.label()),
        }
    }
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    if n > MAX_GENERATED_POINTS {
        return Err(Error::ResourceLimit {
            what: "generated points",
            requested: n as u64,
            limit: MAX_GENERATED_POINTS as u64,
        });
    }
    Ok(())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::param("sigma", sigma, "a finite non-negative number"));
    }
    Ok(())
}

fn normal(rng: &mut rng::Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Deterministic in `spec`: equal specs give bit-identical spaces.
pub fn generate(spec: &GeneratorSpec) -> Result<MMSpace> {
    let mut rng = rng::seeded(spec.seed);
    let space = match &spec.family {
        Family::Sphere { dim, n } => {
            check_count(*n)?;
            let ambient = dim + 1;
            let mut data = Vec::with_capacity(n * ambient);
            let mut v = vec![0.0; ambient];
            for _ in 0..*n {
                loop {
                    v.iter_mut().for_each(|x| *x = normal(&mut rng));
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if norm > 0.0 {
                        data.extend(v.iter().map(|x| x / norm));
                        break;
                    }
                }
            }
            MMSpace::from_coords(Coords { data, dim: ambient }, None, Metric::Euclidean)?
        }
        Family::HammingCube { d } => {
            if *d == 0 || *d > MAX_HAMMING_CUBE_DIM {
                return Err(Error::ResourceLimit {
                    what: "hamming cube dimension",
                    requested: *d as u64,
                    limit: MAX_HAMMING_CUBE_DIM as u64,
                });
            }
            let n = 1usize << d;
            let d = *d as usize;
            let mut data = Vec::with_capacity(n * d);
            for k in 0..n {
                data.extend((0..d).map(|b| ((k >> b) & 1) as f64));
            }
            MMSpace::from_coords(Coords { data, dim: d }, None, Metric::NormalizedHamming)?
        }
        Family::HammingSample { d, n } => {
            check_count(*n)?;
            if *d == 0 {
                return Err(Error::param("d", d, "at least 1"));
            }
            let data = (0..n * d).map(|_| if rng.random::<bool>() { 1.0 } else { 0.0 }).collect();
            MMSpace::from_coords(Coords { data, dim: *d }, None, Metric::NormalizedHamming)?
        }
        Family::GaussianCloud { d, sigma, n } => {
            check_count(*n)?;
            check_sigma(*sigma)?;
            if *d == 0 {
                return Err(Error::param("d", d, "at least 1"));
            }
            let data = (0..n * d).map(|_| sigma * normal(&mut rng)).collect();
            MMSpace::from_coords(Coords { data, dim: *d }, None, Metric::Euclidean)?
        }
        Family::NoisyEmbedding {
            base,
            ambient_d,
            sigma,
            n,
        } => {
            check_count(*n)?;
            check_sigma(*sigma)?;
            let base_space = generate(base)?;
            let (coords, _) = base_space
                .coords()
                .ok_or_else(|| Error::param("base", base.label(), "a family with coordinates"))?;
            if coords.dim() > *ambient_d {
                return Err(Error::param("ambient_d", ambient_d, "at least the base dimension"));
            }
            let cumulative: Vec<f64> = base_space
                .weights()
                .iter()
                .scan(0.0, |acc, w| {
                    *acc += w;
                    Some(*acc)
                })
                .collect();
            let mut data = Vec::with_capacity(n * ambient_d);
            for _ in 0..*n {
                let u: f64 = rng.random::<f64>() * cumulative[cumulative.len() - 1];
                let idx = cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1);
                let p = coords.point(idx);
                for k in 0..*ambient_d {
                    let base_coord = p.get(k).copied().unwrap_or(0.0);
                    data.push(base_coord + sigma * normal(&mut rng));
                }
            }
            MMSpace::from_coords(Coords { data, dim: *ambient_d }, None, Metric::Euclidean)?
        }
    };
    Ok(space.with_label(spec.label()))
}
