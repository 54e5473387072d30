//! Command-line front end. Results go to stdout as JSON; with `--out DIR`
//! the same results are also written as CSV/JSON files. The mode of every
//! estimate (exact, lower_bound, analytic) is echoed on stderr.

use crate::concentration::{
    self, alpha_exact_profile, alpha_lower, kappa_grid, observable_diameter, sep_exact_profile, sep_hamming_profile,
    sep_lower, ConcentrationProfile, Mode, SeparationProfile, ALPHA_EXACT_LIMIT, DEFAULT_KAPPA_STEPS,
    SEP_EXACT_LIMIT,
};
use crate::covering::{self, covering_profile, greedy_net, log_grid, sample_size_bound, CoveringProfile};
use crate::dimension::{self, AlphaRange, Diagonal};
use crate::experiment::{self, ExperimentSpec};
use crate::features::{dictionary, DictionaryKind, Feature};
use crate::mmspace::io::{self, fmt_f64, parse_table, write_csv, write_json};
use crate::mmspace::{generate, Family, GeneratorSpec, Metric};
use crate::transport::{dconc_upper_via_emd, emd, write_plan};
use crate::{Error, MMSpace, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "mmconc", version, about = "Concentration invariants and intrinsic dimension of finite mm-spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// One point per row.
    Points,
    /// An n×n distance matrix.
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Euclidean,
    Hamming,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Exact when the space is small enough, heuristic otherwise.
    Auto,
    Exact,
    Heuristic,
    /// Closed form; only for a generated Hamming cube.
    Analytic,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// CSV file with points or a distance matrix.
    #[arg(long, conflicts_with = "generate")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "points")]
    pub format: Format,
    #[arg(long, value_enum, default_value = "euclidean")]
    pub metric: MetricArg,
    /// Generator spec as JSON, or `@file.json`.
    #[arg(long)]
    pub generate: Option<String>,
    /// Seed: overrides the generator seed and drives the heuristics.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a reference space and write it as CSV.
    Gen {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Concentration function profile.
    Alpha {
        #[command(flatten)]
        input: InputArgs,
        /// Comma separated ε values.
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        /// `realized` or `uniform:STEPS` (over [0, diameter]).
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        /// `anchors`, `random:K` or `halfspace:K`.
        #[arg(long)]
        dictionary: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Separation profile.
    Sep {
        #[command(flatten)]
        input: InputArgs,
        /// Comma separated κ values in (0, 1/2].
        #[arg(long, value_delimiter = ',')]
        kappa: Option<Vec<f64>>,
        /// Number of κ grid points, `{ i / 2m }`.
        #[arg(long, default_value_t = DEFAULT_KAPPA_STEPS)]
        grid: usize,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Observable diameter over a feature dictionary.
    Obsdiam {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        kappa: Vec<f64>,
        #[arg(long)]
        dictionary: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Concentration, separation and distance-distribution dimensions.
    Dims {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, value_delimiter = ',')]
        kappa: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_KAPPA_STEPS)]
        kappa_steps: usize,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long)]
        dictionary: Option<String>,
        /// Integrate α over [0, 1] instead of [0, diameter].
        #[arg(long)]
        unit_range: bool,
        /// Leave the diagonal pairs out of the distance distribution.
        #[arg(long)]
        exclude_diagonal: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Earth mover's distance between two measures on the input metric.
    Emd {
        #[command(flatten)]
        input: InputArgs,
        /// CSV of weights (one per row); defaults to the input measure.
        #[arg(long)]
        mu: Option<PathBuf>,
        #[arg(long)]
        nu: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Greedy ε-nets and the covering profile.
    Net {
        #[command(flatten)]
        input: InputArgs,
        /// Comma separated radii.
        #[arg(long, value_delimiter = ',')]
        radius: Option<Vec<f64>>,
        /// `log:LO:HI:COUNT`.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample size sufficient to approximate the space in d_conc.
    Bound {
        #[command(flatten)]
        input: InputArgs,
        /// Covering profile CSV (u, n_upper[, n_lower]) instead of a space.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long = "constant-C", default_value_t = 1.0)]
        constant_c: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named experiment.
    Experiment {
        /// One of sphere_separation, sphere_alpha_line, hamming_dimension,
        /// noise_instability, sampling_convergence.
        name: String,
        /// JSON spec overriding the defaults.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses the arguments, runs, and returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(value) => {
            println!("{}", serde_json::to_string_pretty(&value).unwrap_or_default());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.kind().exit_code()
        }
    }
}

struct Loaded {
    space: MMSpace,
    source: serde_json::Value,
    spec: Option<GeneratorSpec>,
}

fn read_text(arg: &str) -> Result<String> {
    match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|source| Error::Input {
            path: path.to_string(),
            source,
        }),
        None => Ok(arg.to_string()),
    }
}

fn generator_spec(text: &str, seed: u64) -> Result<GeneratorSpec> {
    let mut value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line() as u64,
        message: format!("generator spec: {e}"),
    })?;
    if let Some(obj) = value.as_object_mut() {
        obj.insert("seed".into(), json!(seed));
    }
    serde_json::from_value(value).map_err(|e| Error::Parse {
        line: 1,
        message: format!("generator spec: {e}"),
    })
}

fn load(input: &InputArgs) -> Result<Loaded> {
    if let Some(g) = &input.generate {
        let spec = generator_spec(&read_text(g)?, input.seed)?;
        let space = generate(&spec)?;
        return Ok(Loaded {
            source: json!({ "generator": spec }),
            space,
            spec: Some(spec),
        });
    }
    let Some(path) = &input.input else {
        return Err(Error::param("input", "none", "--input FILE or --generate SPEC"));
    };
    let space = match input.format {
        Format::Points => {
            let metric = match input.metric {
                MetricArg::Euclidean => Metric::Euclidean,
                MetricArg::Hamming => Metric::NormalizedHamming,
            };
            io::load_points(path, metric)?
        }
        Format::Matrix => io::load_matrix(path)?,
    };
    Ok(Loaded {
        source: json!({ "file": path.display().to_string() }),
        space,
        spec: None,
    })
}

/// The generator spec and cube dimension when `mode` is analytic and the
/// input is a generated Hamming cube.
fn analytic_cube(input: &InputArgs, mode: ModeArg) -> Result<Option<(GeneratorSpec, usize)>> {
    if mode != ModeArg::Analytic {
        return Ok(None);
    }
    if let Some(g) = &input.generate {
        let spec = generator_spec(&read_text(g)?, input.seed)?;
        if let Family::HammingCube { d } = spec.family {
            return Ok(Some((spec, d as usize)));
        }
    }
    Err(Error::param("mode", "analytic", "a --generate hamming_cube input"))
}

fn out_dir(out: &Option<PathBuf>) -> Result<Option<&Path>> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|source| Error::Output {
                path: dir.display().to_string(),
                source,
            })?;
            Ok(Some(dir.as_path()))
        }
        None => Ok(None),
    }
}

fn echo_mode(what: &str, mode: Mode) {
    eprintln!("{what} mode: {}", mode.as_str());
}

fn parse_dictionary(space: &MMSpace, arg: &Option<String>, seed: u64) -> Result<Vec<Feature>> {
    let bad = || Error::param("dictionary", arg.clone().unwrap_or_default(), "anchors, random:K or halfspace:K");
    let Some(text) = arg else {
        if space.len() <= 64 {
            return dictionary(space, DictionaryKind::AnchorsAll);
        }
        let mut d = dictionary(space, DictionaryKind::AnchorsRandom { k: 32, seed })?;
        d.extend(dictionary(space, DictionaryKind::HalfspaceDifferences { k: 32, seed })?);
        return Ok(d);
    };
    let kind = match text.split_once(':') {
        None if text == "anchors" => DictionaryKind::AnchorsAll,
        Some(("random", k)) => DictionaryKind::AnchorsRandom {
            k: k.parse().map_err(|_| bad())?,
            seed,
        },
        Some(("halfspace", k)) => DictionaryKind::HalfspaceDifferences {
            k: k.parse().map_err(|_| bad())?,
            seed,
        },
        _ => return Err(bad()),
    };
    dictionary(space, kind)
}

fn eps_grid(space: &MMSpace, eps: &Option<Vec<f64>>, grid: &Option<String>) -> Result<Vec<f64>> {
    if let Some(e) = eps {
        return Ok(e.clone());
    }
    match grid.as_deref() {
        Some("realized") => Ok(concentration::default_eps_grid(space)),
        Some(g) => {
            let steps = g
                .strip_prefix("uniform:")
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| Error::param("grid", g, "realized or uniform:STEPS"))?;
            Ok(concentration::uniform_grid(space.diameter(), steps))
        }
        None if space.len() <= 200 => Ok(concentration::default_eps_grid(space)),
        None => Ok(concentration::uniform_grid(space.diameter(), 200)),
    }
}

fn want_exact(mode: ModeArg, n: usize, limit: usize) -> bool {
    match mode {
        ModeArg::Exact => true,
        ModeArg::Auto => n <= limit,
        _ => false,
    }
}

fn alpha_profile(
    l: &Loaded,
    eps: &Option<Vec<f64>>,
    grid: &Option<String>,
    mode: ModeArg,
    dict: &Option<String>,
    seed: u64,
) -> Result<ConcentrationProfile> {
    let s = &l.space;
    let g = eps_grid(s, eps, grid)?;
    match mode {
        ModeArg::Analytic => Err(Error::param("mode", "analytic", "exact, heuristic or auto for α")),
        m if want_exact(m, s.len(), ALPHA_EXACT_LIMIT) => alpha_exact_profile(s, &g),
        _ => alpha_lower(s, &g, &parse_dictionary(s, dict, seed)?),
    }
}

fn sep_profile(l: &Loaded, kappa: &Option<Vec<f64>>, steps: usize, mode: ModeArg, restarts: usize, seed: u64) -> Result<SeparationProfile> {
    let s = &l.space;
    let g = match kappa {
        Some(k) => k.clone(),
        None => kappa_grid(steps),
    };
    match mode {
        ModeArg::Analytic => match l.spec.as_ref().map(|s| &s.family) {
            Some(Family::HammingCube { d }) => sep_hamming_profile(*d as usize, &g),
            _ => Err(Error::param("mode", "analytic", "a --generate hamming_cube input")),
        },
        m if want_exact(m, s.len(), SEP_EXACT_LIMIT) => sep_exact_profile(s, &g),
        _ => sep_lower(s, &g, restarts, seed),
    }
}

fn pairs(a: &[f64], b: &[f64]) -> Vec<Vec<String>> {
    a.iter().zip(b).map(|(&x, &y)| vec![fmt_f64(x), fmt_f64(y)]).collect()
}

fn read_weights(path: &Path) -> Result<Vec<f64>> {
    let f = std::fs::File::open(path).map_err(|source| Error::Input {
        path: path.display().to_string(),
        source,
    })?;
    let t = parse_table(f)?;
    if let Some(w) = t.weights {
        return Ok(w);
    }
    t.rows
        .iter()
        .enumerate()
        .map(|(i, r)| match r.as_slice() {
            [v] => Ok(*v),
            _ => Err(Error::Parse {
                line: i as u64 + 1,
                message: "expected one weight per row".into(),
            }),
        })
        .collect()
}

fn load_covering(path: &Path) -> Result<CoveringProfile> {
    let f = std::fs::File::open(path).map_err(|source| Error::Input {
        path: path.display().to_string(),
        source,
    })?;
    let t = parse_table(f)?;
    let mut p = CoveringProfile {
        u_grid: Vec::new(),
        n_upper: Vec::new(),
        n_lower: Vec::new(),
    };
    for (i, r) in t.rows.iter().enumerate() {
        if r.len() < 2 || r[1] < 0.0 || r[1].fract() != 0.0 {
            return Err(Error::Parse {
                line: i as u64 + 1,
                message: "expected u, n_upper[, n_lower] with integer counts".into(),
            });
        }
        p.u_grid.push(r[0]);
        p.n_upper.push(r[1] as u64);
        p.n_lower.push(r.get(2).copied().unwrap_or(1.0) as u64);
    }
    if p.u_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("profile", path.display(), "strictly ascending radii"));
    }
    Ok(p)
}

fn execute(cmd: Command) -> Result<serde_json::Value> {
    match cmd {
        Command::Gen { input, out } => {
            if input.generate.is_none() {
                return Err(Error::param("generate", "none", "a generator spec"));
            }
            let l = load(&input)?;
            let out = Some(out);
            let dir = out_dir(&out)?.expect("out is set");
            io::write_space(&dir.join("space.csv"), &l.space)?;
            write_json(&dir.join("spec.json"), &l.spec)?;
            Ok(json!({
                "source": l.source,
                "n": l.space.len(),
                "diameter": l.space.diameter(),
                "char_size": l.space.char_size_medians(),
                "files": ["space.csv", "spec.json"],
            }))
        }
        Command::Alpha {
            input,
            eps,
            grid,
            mode,
            dictionary,
            out,
        } => {
            let l = load(&input)?;
            let p = alpha_profile(&l, &eps, &grid, mode, &dictionary, input.seed)?;
            echo_mode("alpha", p.mode);
            let value = json!({ "source": l.source, "seed": input.seed, "profile": p });
            if let Some(dir) = out_dir(&out)? {
                write_csv(&dir.join("alpha.csv"), &["eps", "alpha"], &pairs(&p.eps_grid, &p.alpha))?;
                write_json(&dir.join("alpha.json"), &value)?;
            }
            Ok(value)
        }
        Command::Sep {
            input,
            kappa,
            grid,
            mode,
            restarts,
            out,
        } => {
            // the closed form needs only the cube dimension, so large cubes are never built
            let (source, p) = match analytic_cube(&input, mode)? {
                Some((spec, d)) => {
                    let g = kappa.clone().unwrap_or_else(|| kappa_grid(grid));
                    (json!({ "generator": spec }), sep_hamming_profile(d, &g)?)
                }
                None => {
                    let l = load(&input)?;
                    let p = sep_profile(&l, &kappa, grid, mode, restarts, input.seed)?;
                    (l.source, p)
                }
            };
            echo_mode("sep", p.mode);
            let value = json!({ "source": source, "seed": input.seed, "restarts": restarts, "profile": p });
            if let Some(dir) = out_dir(&out)? {
                write_csv(&dir.join("sep.csv"), &["kappa", "sep"], &pairs(&p.kappa_grid, &p.sep))?;
                write_json(&dir.join("sep.json"), &value)?;
            }
            Ok(value)
        }
        Command::Obsdiam {
            input,
            kappa,
            dictionary,
            out,
        } => {
            let l = load(&input)?;
            let dict = parse_dictionary(&l.space, &dictionary, input.seed)?;
            let values = kappa
                .iter()
                .map(|&k| observable_diameter(&l.space, k, &dict))
                .collect::<Result<Vec<f64>>>()?;
            echo_mode("obsdiam", Mode::LowerBound);
            let value = json!({
                "source": l.source,
                "seed": input.seed,
                "mode": Mode::LowerBound,
                "dictionary_size": dict.len(),
                "kappa": kappa,
                "obs_diam": values,
            });
            if let Some(dir) = out_dir(&out)? {
                write_csv(&dir.join("obsdiam.csv"), &["kappa", "obs_diam"], &pairs(&kappa, &values))?;
                write_json(&dir.join("obsdiam.json"), &value)?;
            }
            Ok(value)
        }
        Command::Dims {
            input,
            eps,
            grid,
            kappa,
            kappa_steps,
            mode,
            restarts,
            dictionary,
            unit_range,
            exclude_diagonal,
            out,
        } => {
            let l = load(&input)?;
            let alpha_mode = if mode == ModeArg::Analytic { ModeArg::Auto } else { mode };
            let a = alpha_profile(&l, &eps, &grid, alpha_mode, &dictionary, input.seed)?;
            let s = sep_profile(&l, &kappa, kappa_steps, mode, restarts, input.seed)?;
            echo_mode("alpha", a.mode);
            echo_mode("sep", s.mode);
            let range = if unit_range { AlphaRange::Unit } else { AlphaRange::Diameter };
            let diagonal = if exclude_diagonal {
                Diagonal::Excluded
            } else {
                Diagonal::Included
            };
            let r = dimension::report(&l.space, &a, &s, range, diagonal)?;
            let value = json!({ "source": l.source, "seed": input.seed, "report": r });
            if let Some(dir) = out_dir(&out)? {
                write_json(&dir.join("dims.json"), &value)?;
            }
            Ok(value)
        }
        Command::Emd {
            input,
            mu,
            nu,
            out,
        } => {
            let l = load(&input)?;
            let mu = match &mu {
                Some(p) => read_weights(p)?,
                None => l.space.weights().to_vec(),
            };
            let nu = match &nu {
                Some(p) => read_weights(p)?,
                None => l.space.weights().to_vec(),
            };
            let plan = emd(&l.space, &mu, &nu)?;
            let upper = dconc_upper_via_emd(&l.space, &mu, &nu)?;
            echo_mode("emd", Mode::Exact);
            let value = json!({
                "source": l.source,
                "mode": Mode::Exact,
                "cost": plan.cost,
                "dconc_upper": upper,
                "marginal_residuals": plan.marginal_residuals,
                "min_reduced_cost": plan.min_reduced_cost,
                "support": plan.entries.len(),
            });
            if let Some(dir) = out_dir(&out)? {
                write_plan(&dir.join("plan.csv"), &plan)?;
                write_json(&dir.join("emd.json"), &value)?;
            }
            Ok(value)
        }
        Command::Net {
            input,
            radius,
            grid,
            out,
        } => {
            let l = load(&input)?;
            let radii = match (&radius, &grid) {
                (Some(r), _) => r.clone(),
                (None, Some(g)) => parse_log_grid(g)?,
                (None, None) => {
                    let d = l.space.diameter();
                    if d > 0.0 {
                        log_grid(d / 1000.0, d, 40)
                    } else {
                        vec![1.0]
                    }
                }
            };
            let mut sorted = radii.clone();
            sorted.sort_by(f64::total_cmp);
            sorted.dedup();
            let profile = covering_profile(&l.space, &sorted)?;
            let nets = radii
                .iter()
                .take(if radius.is_some() { radii.len() } else { 0 })
                .map(|&u| greedy_net(&l.space, u))
                .collect::<Result<Vec<_>>>()?;
            let value = json!({ "source": l.source, "profile": profile, "nets": nets });
            if let Some(dir) = out_dir(&out)? {
                covering::write_profile(&dir.join("covering.csv"), &profile)?;
                write_json(&dir.join("net.json"), &value)?;
            }
            Ok(value)
        }
        Command::Bound {
            input,
            profile,
            eps,
            delta,
            constant_c,
            out,
        } => {
            let (p, source) = match &profile {
                Some(path) => (load_covering(path)?, json!({ "profile": path.display().to_string() })),
                None => {
                    let l = load(&input)?;
                    if !(eps > 0.0) {
                        return Err(Error::param("eps", eps, "a value in (0, 1)"));
                    }
                    let hi = l.space.diameter().max(1.0);
                    (covering_profile(&l.space, &log_grid(eps * eps / 32.0, hi, 120))?, l.source)
                }
            };
            let b = sample_size_bound(eps, delta, &p, constant_c)?;
            eprintln!("note: C is an unspecified absolute constant; the bound is linear in C (here C = {constant_c})");
            let value = json!({ "source": source, "bound": b });
            if let Some(dir) = out_dir(&out)? {
                write_json(&dir.join("bound.json"), &value)?;
            }
            Ok(value)
        }
        Command::Experiment { name, spec, seed, out } => {
            let mut s = match &spec {
                Some(path) => {
                    let text = read_text(&format!("@{}", path.display()))?;
                    let s: ExperimentSpec = serde_json::from_str(&text).map_err(|e| Error::Parse {
                        line: e.line() as u64,
                        message: format!("experiment spec: {e}"),
                    })?;
                    if s.name() != name {
                        return Err(Error::param("spec", s.name(), "a spec for the named experiment"));
                    }
                    s
                }
                None => ExperimentSpec::default_for(&name)?,
            };
            if let Some(seed) = seed {
                s = s.reseeded(seed);
            }
            let m = experiment::run(&s, &out)?;
            Ok(serde_json::to_value(&m).map_err(|e| Error::Invariant(e.to_string()))?)
        }
    }
}

fn parse_log_grid(g: &str) -> Result<Vec<f64>> {
    let bad = || Error::param("grid", g, "log:LO:HI:COUNT");
    let parts: Vec<&str> = g.strip_prefix("log:").ok_or_else(bad)?.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        return Err(bad());
    };
    let (lo, hi): (f64, f64) = (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?);
    let count: usize = count.parse().map_err(|_| bad())?;
    if !(lo > 0.0 && hi > lo) {
        return Err(bad());
    }
    Ok(log_grid(lo, hi, count))
}
