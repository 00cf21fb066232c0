//! Experiment configuration: presets, `key = value` files and overrides.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ipsga_core::finite::MAX_ORDER;

use crate::error::{CliError, Result};

/// How the per-genome mean fitnesses are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum FValues {
    /// One value per genome, genome index order.
    Explicit(Vec<f64>),
    /// Drawn uniformly from `[lo, hi]` with the experiment seed.
    Random { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Option<u8>,
    pub order: u32,
    pub population: u64,
    pub runs: usize,
    pub generations: usize,
    pub sigma: f64,
    pub fvalues: FValues,
    pub seed: u64,
    pub out: PathBuf,
}

pub const DEFAULT_SIGMA: f64 = 0.8;
pub const DEFAULT_FRANGE: (f64, f64) = (2.0, 3.0);

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            preset: None,
            order: 3,
            population: 2000,
            runs: 1,
            generations: 30,
            sigma: DEFAULT_SIGMA,
            fvalues: FValues::Random {
                lo: DEFAULT_FRANGE.0,
                hi: DEFAULT_FRANGE.1,
            },
            seed: 0,
            out: PathBuf::from("results"),
        }
    }
}

/// Experiments 1 to 12.
pub fn preset(id: u8) -> Result<ExperimentConfig> {
    let (order, population, runs, generations) = match id {
        1 => (3, 2000, 1, 30),
        2 => (3, 2000, 40, 30),
        3 => (3, 20_000, 40, 30),
        4 => (3, 100_000, 40, 30),
        5 => (3, 400_000, 1, 30),
        6 => (4, 200_000, 10, 30),
        7..=12 => (3, 1000, 10, 300),
        _ => {
            return Err(CliError::usage(format!(
                "unknown preset {id}; expected 1..=12"
            )))
        }
    };
    Ok(ExperimentConfig {
        preset: Some(id),
        order,
        population,
        runs,
        generations,
        ..ExperimentConfig::default()
    })
}

/// Whether the rescue report is produced.
pub fn is_rescue_preset(id: Option<u8>) -> bool {
    matches!(id, Some(7..=12))
}

/// Optional values from one configuration layer (a file or the command line).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub preset: Option<u8>,
    pub order: Option<u32>,
    pub population: Option<u64>,
    pub runs: Option<usize>,
    pub generations: Option<usize>,
    pub sigma: Option<f64>,
    pub fvalues: Option<FValues>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    /// Parses `key = value` lines. Blank lines and `#` comments are skipped.
    /// Keys are the long flag names: preset, o, n, r, generations, sigma,
    /// fvalues, frange, seed, out. A `version` key is accepted and ignored.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut o = Overrides::default();
        let mut seen = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| CliError::usage(format!("line {}: {msg}", n + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key.to_string()) {
                return Err(at(format!("duplicate key `{key}`")));
            }
            seen.push(key.to_string());
            o.set(key, value, base_dir).map_err(|e| at(e.to_string()))?;
        }
        if seen.iter().any(|k| k == "fvalues") && seen.iter().any(|k| k == "frange") {
            return Err(CliError::usage(
                "`fvalues` and `frange` are mutually exclusive",
            ));
        }
        Ok(o)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Overrides::parse(&text, path.parent()).map_err(|e| match e {
            CliError::Usage(msg) => CliError::usage(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str, base_dir: Option<&Path>) -> Result<()> {
        match key {
            "preset" => self.preset = Some(parse_num(key, value)?),
            "o" => self.order = Some(parse_num(key, value)?),
            "n" => self.population = Some(parse_num(key, value)?),
            "r" => self.runs = Some(parse_num(key, value)?),
            "generations" => self.generations = Some(parse_num(key, value)?),
            "sigma" => self.sigma = Some(parse_num(key, value)?),
            "seed" => self.seed = Some(parse_num(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "frange" => {
                let bounds = parse_list(key, value)?;
                let [lo, hi] = bounds[..] else {
                    return Err(CliError::usage(format!(
                        "frange needs `lo,hi`, got `{value}`"
                    )));
                };
                self.fvalues = Some(FValues::Random { lo, hi });
            }
            "fvalues" => self.fvalues = Some(FValues::Explicit(parse_fvalues(value, base_dir)?)),
            "version" => {}
            _ => return Err(CliError::usage(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Layers `self` over `base`.
    pub fn apply(&self, base: &mut ExperimentConfig) {
        if let Some(v) = self.preset {
            base.preset = Some(v);
        }
        if let Some(v) = self.order {
            base.order = v;
        }
        if let Some(v) = self.population {
            base.population = v;
        }
        if let Some(v) = self.runs {
            base.runs = v;
        }
        if let Some(v) = self.generations {
            base.generations = v;
        }
        if let Some(v) = self.sigma {
            base.sigma = v;
        }
        if let Some(v) = &self.fvalues {
            base.fvalues = v.clone();
        }
        if let Some(v) = self.seed {
            base.seed = v;
        }
        if let Some(v) = &self.out {
            base.out = v.clone();
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| CliError::usage(format!("invalid value `{value}` for `{key}`")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|v| parse_num(key, v.trim())).collect()
}

/// A comma-separated list, or the path of an `fvalues.csv` file.
fn parse_fvalues(value: &str, base_dir: Option<&Path>) -> Result<Vec<f64>> {
    if let Ok(list) = parse_list("fvalues", value) {
        return Ok(list);
    }
    let path = Path::new(value);
    let path = match base_dir {
        Some(dir) if path.is_relative() && !path.exists() => dir.join(path),
        _ => path.to_path_buf(),
    };
    crate::output::read_fvalues(&path)
}

/// Preset (file preset, then command-line preset) or defaults, then the file,
/// then the command line.
pub fn resolve(file: Option<&Overrides>, cli: &Overrides) -> Result<ExperimentConfig> {
    let preset_id = cli.preset.or(file.and_then(|f| f.preset));
    let mut config = match preset_id {
        Some(id) => preset(id)?,
        None => ExperimentConfig::default(),
    };
    if let Some(f) = file {
        f.apply(&mut config);
    }
    cli.apply(&mut config);
    config.preset = preset_id;
    config.validate()?;
    Ok(config)
}

fn format_list(values: &[f64]) -> String {
    values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl ExperimentConfig {
    pub fn genomes(&self) -> usize {
        1 << self.order
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::usage(msg));
        if self.order == 0 || self.order > MAX_ORDER {
            return bad(format!("o must be in 1..={MAX_ORDER}, got {}", self.order));
        }
        if self.population == 0 {
            return bad("n must be at least 1".into());
        }
        if self.runs == 0 {
            return bad("r must be at least 1".into());
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return bad(format!(
                "sigma must be a nonnegative number, got {}",
                self.sigma
            ));
        }
        match &self.fvalues {
            FValues::Random { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && *lo >= 0.0 && lo <= hi) {
                    return bad(format!("frange needs 0 <= lo <= hi, got {lo},{hi}"));
                }
            }
            FValues::Explicit(v) => {
                if v.len() != self.genomes() {
                    return bad(format!(
                        "fvalues has {} entries but o={} needs {}",
                        v.len(),
                        self.order,
                        self.genomes()
                    ));
                }
                if v.iter().any(|f| !(f.is_finite() && *f >= 0.0)) {
                    return bad("fvalues must be nonnegative numbers".into());
                }
            }
        }
        Ok(())
    }

    /// The configuration in the file format [`Overrides::parse`] reads.
    pub fn to_manifest(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# ipsga run manifest");
        let _ = writeln!(s, "version = {}", env!("CARGO_PKG_VERSION"));
        if let Some(id) = self.preset {
            let _ = writeln!(s, "preset = {id}");
        }
        let _ = writeln!(s, "o = {}", self.order);
        let _ = writeln!(s, "n = {}", self.population);
        let _ = writeln!(s, "r = {}", self.runs);
        let _ = writeln!(s, "generations = {}", self.generations);
        let _ = writeln!(s, "sigma = {}", self.sigma);
        match &self.fvalues {
            FValues::Random { lo, hi } => {
                let _ = writeln!(s, "frange = {lo},{hi}");
            }
            FValues::Explicit(v) => {
                let _ = writeln!(s, "fvalues = {}", format_list(v));
            }
        }
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "out = {}", self.out.display());
        s
    }
}
