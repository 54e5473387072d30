//! Reproducible experiments. Each run writes one CSV per curve plus a
//! `manifest.json` that records the full spec, the RNG and the crate version.

use crate::concentration::{
    alpha_lower, kappa_grid, sep_hamming_ball_witness, sep_hamming_profile, sep_lower, uniform_grid, Mode,
    SeparationProfile,
};
use crate::covering::greedy_net;
use crate::dimension::{dconc_to_point_bracket, dim_concentration, dim_separation, AlphaRange, Dim};
use crate::features::{dictionary, DictionaryKind};
use crate::measure::at_least;
use crate::mmspace::io::{fmt_f64, write_csv, write_json};
use crate::mmspace::{generate, Family, GeneratorSpec};
use crate::{rng, Error, MMSpace, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Default cap on points per generated space.
pub const EXPERIMENT_MAX_POINTS: usize = 100_000;

pub const EXPERIMENT_NAMES: [&str; 5] = [
    "sphere_separation",
    "sphere_alpha_line",
    "hamming_dimension",
    "noise_instability",
    "sampling_convergence",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ExperimentSpec {
    /// Greedy separation profiles of sampled spheres.
    SphereSeparation {
        dims: Vec<usize>,
        n: usize,
        kappa_steps: usize,
        restarts: usize,
        seed: u64,
    },
    /// Concentration profiles of sampled spheres against the line `ε/2`.
    SphereAlphaLine {
        dims: Vec<usize>,
        n: usize,
        eps_steps: usize,
        features: usize,
        seed: u64,
    },
    /// Separation dimension of full Hamming cubes from the exact profile.
    HammingDimension { dims: Vec<usize>, kappa_steps: usize },
    /// A one-point space corrupted by Gaussian noise.
    NoiseInstability {
        d: usize,
        n: usize,
        sigma2: f64,
        seeds: Vec<u64>,
        separation: f64,
        kappa_steps: usize,
        restarts: usize,
    },
    /// Separation dimension of random subsamples of a Hamming cube against
    /// the exact value for the full cube.
    SamplingConvergence {
        cube_dim: u32,
        sizes: Vec<usize>,
        seeds: Vec<u64>,
        kappa_steps: usize,
        restarts: usize,
    },
}

impl ExperimentSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentSpec::SphereSeparation { .. } => "sphere_separation",
            ExperimentSpec::SphereAlphaLine { .. } => "sphere_alpha_line",
            ExperimentSpec::HammingDimension { .. } => "hamming_dimension",
            ExperimentSpec::NoiseInstability { .. } => "noise_instability",
            ExperimentSpec::SamplingConvergence { .. } => "sampling_convergence",
        }
    }

    /// The default parameters of a named experiment.
    pub fn default_for(name: &str) -> Result<Self> {
        Ok(match name {
            "sphere_separation" => ExperimentSpec::SphereSeparation {
                dims: vec![3, 10, 30, 100],
                n: 3000,
                kappa_steps: 50,
                restarts: 4,
                seed: 1,
            },
            "sphere_alpha_line" => ExperimentSpec::SphereAlphaLine {
                dims: vec![3, 10, 30, 100],
                n: 2000,
                eps_steps: 100,
                features: 16,
                seed: 1,
            },
            "hamming_dimension" => ExperimentSpec::HammingDimension {
                dims: (11..=25).step_by(2).collect(),
                kappa_steps: 50,
            },
            "noise_instability" => ExperimentSpec::NoiseInstability {
                d: 50,
                n: 10_000,
                sigma2: 1.0 / 50.0,
                seeds: (1..=5).collect(),
                separation: 1.0,
                // i / 80 hits 0.475 at i = 38
                kappa_steps: 40,
                restarts: 2,
            },
            "sampling_convergence" => ExperimentSpec::SamplingConvergence {
                cube_dim: 8,
                sizes: vec![50, 100, 150, 200, 256],
                seeds: (0..20).collect(),
                kappa_steps: 50,
                restarts: 8,
            },
            other => return Err(Error::UnknownExperiment(other.to_string())),
        })
    }

    /// Replaces every seed with ones derived from `seed`.
    pub fn reseeded(mut self, seed: u64) -> Self {
        match &mut self {
            ExperimentSpec::SphereSeparation { seed: s, .. } | ExperimentSpec::SphereAlphaLine { seed: s, .. } => {
                *s = seed
            }
            ExperimentSpec::HammingDimension { .. } => {}
            ExperimentSpec::NoiseInstability { seeds, .. } | ExperimentSpec::SamplingConvergence { seeds, .. } => {
                for (k, s) in seeds.iter_mut().enumerate() {
                    *s = rng::derive_seed(seed, k as u64);
                }
            }
        }
        self
    }

    fn validate(&self) -> Result<()> {
        let check_n = |n: usize| -> Result<()> {
            if n > EXPERIMENT_MAX_POINTS {
                return Err(Error::ResourceLimit {
                    what: "points per space",
                    requested: n as u64,
                    limit: EXPERIMENT_MAX_POINTS as u64,
                });
            }
            if n == 0 {
                return Err(Error::param("n", n, "at least 1"));
            }
            Ok(())
        };
        let check_steps = |s: usize| -> Result<()> {
            if s == 0 {
                return Err(Error::param("steps", s, "at least 1"));
            }
            Ok(())
        };
        match self {
            ExperimentSpec::SphereSeparation { n, kappa_steps, .. } => {
                check_n(*n)?;
                check_steps(*kappa_steps)
            }
            ExperimentSpec::SphereAlphaLine { n, eps_steps, .. } => {
                check_n(*n)?;
                check_steps(*eps_steps)
            }
            ExperimentSpec::HammingDimension { kappa_steps, .. } => check_steps(*kappa_steps),
            ExperimentSpec::NoiseInstability {
                n,
                sigma2,
                separation,
                kappa_steps,
                ..
            } => {
                check_n(*n)?;
                if !(*sigma2 > 0.0 && sigma2.is_finite()) {
                    return Err(Error::param("sigma2", sigma2, "a positive variance"));
                }
                if !(*separation > 0.0) {
                    return Err(Error::param("separation", separation, "a positive distance"));
                }
                check_steps(*kappa_steps)
            }
            ExperimentSpec::SamplingConvergence {
                cube_dim,
                sizes,
                kappa_steps,
                ..
            } => {
                let full = 1usize << (*cube_dim).min(20);
                for &s in sizes {
                    check_n(s)?;
                    if s > full {
                        return Err(Error::param("sizes", s, "sample sizes at most the cube size"));
                    }
                }
                check_steps(*kappa_steps)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub file: String,
    pub columns: Vec<String>,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    pub crate_name: String,
    pub crate_version: String,
    pub rng_algorithm: String,
    pub spec: ExperimentSpec,
    pub outputs: Vec<OutputFile>,
    pub summary: serde_json::Value,
}

struct Writer {
    dir: PathBuf,
    outputs: Vec<OutputFile>,
}

impl Writer {
    fn table(&mut self, file: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
        write_csv(&self.dir.join(file), header, &rows)?;
        self.outputs.push(OutputFile {
            file: file.to_string(),
            columns: header.iter().map(|s| s.to_string()).collect(),
            rows: rows.len(),
        });
        Ok(())
    }
}

fn dim_cell(d: Dim) -> String {
    match d {
        Dim::Finite(v) => fmt_f64(v),
        Dim::Infinite => "inf".into(),
    }
}

fn profile_rows(p: &SeparationProfile) -> Vec<Vec<String>> {
    p.kappa_grid
        .iter()
        .zip(&p.sep)
        .map(|(&k, &s)| vec![fmt_f64(k), fmt_f64(s)])
        .collect()
}

/// Runs the experiment and writes its outputs under `out_dir`.
pub fn run(spec: &ExperimentSpec, out_dir: &Path) -> Result<Manifest> {
    spec.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|source| Error::Output {
        path: out_dir.display().to_string(),
        source,
    })?;
    let mut w = Writer {
        dir: out_dir.to_path_buf(),
        outputs: Vec::new(),
    };
    let summary = match spec {
        ExperimentSpec::SphereSeparation {
            dims,
            n,
            kappa_steps,
            restarts,
            seed,
        } => sphere_separation(&mut w, dims, *n, *kappa_steps, *restarts, *seed)?,
        ExperimentSpec::SphereAlphaLine {
            dims,
            n,
            eps_steps,
            features,
            seed,
        } => sphere_alpha_line(&mut w, dims, *n, *eps_steps, *features, *seed)?,
        ExperimentSpec::HammingDimension { dims, kappa_steps } => hamming_dimension(&mut w, dims, *kappa_steps)?,
        ExperimentSpec::NoiseInstability {
            d,
            n,
            sigma2,
            seeds,
            separation,
            kappa_steps,
            restarts,
        } => {
            let cells = seeds
                .par_iter()
                .map(|&s| noise_cell(*d, *n, *sigma2, s, *separation, *kappa_steps, *restarts))
                .collect::<Result<Vec<_>>>()?;
            noise_outputs(&mut w, &cells)?
        }
        ExperimentSpec::SamplingConvergence {
            cube_dim,
            sizes,
            seeds,
            kappa_steps,
            restarts,
        } => sampling_convergence(&mut w, *cube_dim, sizes, seeds, *kappa_steps, *restarts)?,
    };
    let manifest = Manifest {
        experiment: spec.name().to_string(),
        crate_name: env!("CARGO_PKG_NAME").to_string(),
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        rng_algorithm: rng::RNG_ALGORITHM.to_string(),
        spec: spec.clone(),
        outputs: w.outputs,
        summary,
    };
    write_json(&out_dir.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

fn sphere(dim: usize, n: usize, seed: u64) -> Result<MMSpace> {
    generate(&GeneratorSpec::new(
        Family::Sphere { dim, n },
        rng::derive_seed(seed, dim as u64),
    ))
}

fn sphere_separation(
    w: &mut Writer,
    dims: &[usize],
    n: usize,
    steps: usize,
    restarts: usize,
    seed: u64,
) -> Result<serde_json::Value> {
    let grid = kappa_grid(steps);
    let profiles = dims
        .par_iter()
        .map(|&dim| sep_lower(&sphere(dim, n, seed)?, &grid, restarts, rng::derive_seed(seed, 1000 + dim as u64)))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (&dim, p) in dims.iter().zip(&profiles) {
        w.table(&format!("sep_sphere_{dim}.csv"), &["kappa", "sep"], profile_rows(p))?;
        rows.push(vec![dim.to_string(), dim_cell(dim_separation(p, 1.0)?)]);
    }
    w.table("sphere_separation_summary.csv", &["dim", "dim_separation"], rows.clone())?;
    Ok(serde_json::json!({
        "mode": Mode::LowerBound.as_str(),
        "dim_separation": rows.iter().map(|r| (r[0].clone(), r[1].clone())).collect::<std::collections::BTreeMap<_, _>>(),
    }))
}

fn sphere_alpha_line(
    w: &mut Writer,
    dims: &[usize],
    n: usize,
    steps: usize,
    features: usize,
    seed: u64,
) -> Result<serde_json::Value> {
    let grid = uniform_grid(2.0, steps);
    let profiles = dims
        .par_iter()
        .map(|&dim| {
            let s = sphere(dim, n, seed)?;
            let dict = dictionary(
                &s,
                DictionaryKind::HalfspaceDifferences {
                    k: features.max(1),
                    seed: rng::derive_seed(seed, 2000 + dim as u64),
                },
            )?;
            alpha_lower(&s, &grid, &dict)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (&dim, p) in dims.iter().zip(&profiles) {
        let curve = p
            .eps_grid
            .iter()
            .zip(&p.alpha)
            .map(|(&e, &a)| vec![fmt_f64(e), fmt_f64(a), fmt_f64(e / 2.0)])
            .collect();
        w.table(&format!("alpha_sphere_{dim}.csv"), &["eps", "alpha", "half_eps"], curve)?;
        let b = dconc_to_point_bracket(p)?;
        rows.push(vec![
            dim.to_string(),
            fmt_f64(b.lo),
            fmt_f64(b.hi),
            fmt_f64(b.midpoint()),
            dim_cell(dim_concentration(p, AlphaRange::Diameter, 1.0)?),
        ]);
    }
    w.table(
        "sphere_alpha_line_summary.csv",
        &["dim", "bracket_lo", "bracket_hi", "bracket_mid", "dim_concentration"],
        rows,
    )?;
    Ok(serde_json::json!({ "mode": Mode::LowerBound.as_str(), "bracket_one_sided": true }))
}

fn hamming_dimension(w: &mut Writer, dims: &[usize], steps: usize) -> Result<serde_json::Value> {
    let grid = kappa_grid(steps);
    let cells = dims
        .par_iter()
        .map(|&d| -> Result<(Dim, Dim)> {
            let exact = dim_separation(&sep_hamming_profile(d, &grid)?, 1.0)?;
            let ball: Vec<f64> = grid
                .iter()
                .map(|&k| sep_hamming_ball_witness(d, k))
                .collect::<Result<_>>()?;
            let ball = dim_separation(&SeparationProfile::new(grid.clone(), ball, Mode::LowerBound)?, 1.0)?;
            Ok((exact, ball))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<String>> = dims
        .iter()
        .zip(&cells)
        .map(|(&d, &(e, b))| vec![d.to_string(), dim_cell(e), dim_cell(b), fmt_f64(e.value() / d as f64)])
        .collect();
    w.table(
        "hamming_dimension.csv",
        &["d", "dim_separation", "dim_separation_ball_witness", "dim_separation_over_d"],
        rows,
    )?;
    let monotone = cells.windows(2).all(|p| p[1].0.value() > p[0].0.value());
    Ok(serde_json::json!({ "mode": Mode::Analytic.as_str(), "strictly_increasing": monotone }))
}

/// One seed of the noise experiment.
pub struct NoiseCell {
    pub seed: u64,
    /// Mass of the greedy separated subset.
    pub separated_fraction: f64,
    pub profile: SeparationProfile,
    /// `sep` at κ = 0.475 when the grid contains it.
    pub sep_at: Option<f64>,
    pub dim: Dim,
}

/// A maximal `separation`-separated subset from the farthest-first net,
/// split in net order into two halves whose cross distances are all at
/// least `separation`; each half certifies `sep_κ` for κ up to its mass.
pub fn noise_cell(
    d: usize,
    n: usize,
    sigma2: f64,
    seed: u64,
    separation: f64,
    steps: usize,
    restarts: usize,
) -> Result<NoiseCell> {
    let space = generate(&GeneratorSpec::new(
        Family::GaussianCloud {
            d,
            sigma: sigma2.sqrt(),
            n,
        },
        seed,
    ))?;
    let grid = kappa_grid(steps);
    let mut profile = sep_lower(&space, &grid, restarts, rng::derive_seed(seed, 1))?;
    let net = greedy_net(&space, separation)?;
    let wts = space.weights();
    let separated_fraction: f64 = net.iter().map(|&i| wts[i]).sum();
    if net.len() >= 2 {
        let (a, b) = net.split_at(net.len() / 2);
        let ma: f64 = a.iter().map(|&i| wts[i]).sum();
        let mb: f64 = b.iter().map(|&i| wts[i]).sum();
        let cross = a
            .par_iter()
            .map(|&x| b.iter().map(|&y| space.dist(x, y)).fold(f64::INFINITY, f64::min))
            .reduce(|| f64::INFINITY, f64::min);
        for (k, &kappa) in grid.iter().enumerate() {
            if at_least(ma.min(mb), kappa) {
                profile.sep[k] = profile.sep[k].max(cross);
            }
        }
    }
    // the pointwise max of two non-increasing profiles is non-increasing
    let profile = SeparationProfile::new(grid.clone(), profile.sep, Mode::LowerBound)?;
    let sep_at = grid.iter().position(|&k| (k - 0.475).abs() < 1e-12).map(|k| profile.sep[k]);
    Ok(NoiseCell {
        seed,
        separated_fraction,
        dim: dim_separation(&profile, 1.0)?,
        profile,
        sep_at,
    })
}

fn noise_outputs(w: &mut Writer, cells: &[NoiseCell]) -> Result<serde_json::Value> {
    let mut rows = Vec::new();
    for c in cells {
        w.table(&format!("noise_sep_seed_{}.csv", c.seed), &["kappa", "sep"], profile_rows(&c.profile))?;
        rows.push(vec![
            c.seed.to_string(),
            fmt_f64(c.separated_fraction),
            c.sep_at.map_or("".into(), fmt_f64),
            dim_cell(c.dim),
        ]);
    }
    w.table(
        "noise_instability.csv",
        &["seed", "separated_fraction", "sep_0_475", "dim_separation"],
        rows,
    )?;
    let covering = cells.iter().filter(|c| c.separated_fraction >= 0.95).count();
    Ok(serde_json::json!({
        "mode": Mode::LowerBound.as_str(),
        "seeds_with_95_percent_separated": covering,
        "seeds": cells.len(),
    }))
}

/// `n` distinct points of the cube, uniformly without replacement.
pub fn cube_subsample(cube: &MMSpace, n: usize, seed: u64) -> Result<MMSpace> {
    use rand::seq::index::sample;
    let mut r = rng::seeded(seed);
    let mut idx = sample(&mut r, cube.len(), n.min(cube.len())).into_vec();
    idx.sort_unstable();
    cube.subspace(&idx)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        (v[m / 2 - 1] + v[m / 2]) / 2.0
    }
}

/// Median absolute error per sample size, the reference dimension, and the
/// per-seed rows.
pub struct ConvergenceTable {
    pub reference: f64,
    pub median_abs_error: Vec<f64>,
    pub cells: Vec<(usize, u64, f64, f64)>,
}

pub fn convergence_table(
    cube_dim: u32,
    sizes: &[usize],
    seeds: &[u64],
    steps: usize,
    restarts: usize,
) -> Result<ConvergenceTable> {
    let grid = kappa_grid(steps);
    let reference = dim_separation(&sep_hamming_profile(cube_dim as usize, &grid)?, 1.0)?.value();
    let cube = generate(&GeneratorSpec::new(Family::HammingCube { d: cube_dim }, 0))?;
    let keys: Vec<(usize, u64)> = sizes.iter().flat_map(|&n| seeds.iter().map(move |&s| (n, s))).collect();
    let cells = keys
        .par_iter()
        .map(|&(n, s)| -> Result<(usize, u64, f64, f64)> {
            let sub = cube_subsample(&cube, n, s)?;
            let p = sep_lower(&sub, &grid, restarts, rng::derive_seed(s, n as u64))?;
            let dim = dim_separation(&p, 1.0)?.value();
            Ok((n, s, dim, (dim - reference).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    let median_abs_error = sizes
        .iter()
        .map(|&n| {
            let mut e: Vec<f64> = cells.iter().filter(|c| c.0 == n).map(|c| c.3).collect();
            median(&mut e)
        })
        .collect();
    Ok(ConvergenceTable {
        reference,
        median_abs_error,
        cells,
    })
}

fn sampling_convergence(
    w: &mut Writer,
    cube_dim: u32,
    sizes: &[usize],
    seeds: &[u64],
    steps: usize,
    restarts: usize,
) -> Result<serde_json::Value> {
    let t = convergence_table(cube_dim, sizes, seeds, steps, restarts)?;
    let rows = t
        .cells
        .iter()
        .map(|&(n, s, dim, err)| vec![n.to_string(), s.to_string(), fmt_f64(dim), fmt_f64(err)])
        .collect();
    w.table("sampling_convergence.csv", &["n", "seed", "dim_separation", "abs_error"], rows)?;
    let med = sizes
        .iter()
        .zip(&t.median_abs_error)
        .map(|(&n, &e)| vec![n.to_string(), fmt_f64(e)])
        .collect();
    w.table("sampling_convergence_median.csv", &["n", "median_abs_error"], med)?;
    let decreasing = t.median_abs_error.windows(2).all(|p| p[1] < p[0]);
    Ok(serde_json::json!({
        "mode": Mode::LowerBound.as_str(),
        "reference_dim_separation": t.reference,
        "reference_mode": Mode::Analytic.as_str(),
        "median_strictly_decreasing": decreasing,
    }))
}
