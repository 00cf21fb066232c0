//! Running one experiment or a convergence sweep.

use std::path::Path;

use ipsga_core::{
    aggregate_runs, projected_uniform_crossover, replicate_rng, rescue_check, run_replicates,
    trajectory, Distribution, EvolutionMachine, FitnessFunction, RescueReport, RunStatistics,
    StochasticFitness, Trajectory,
};
use rand::Rng;

use crate::config::{is_rescue_preset, ExperimentConfig, FValues};
use crate::error::{CliError, Result};
use crate::output;

/// Stream of the master seed reserved for drawing f-values; replicate runs
/// use streams 0, 1, ...
pub const FVALUE_STREAM: u64 = u64::MAX;

pub const MANIFEST: &str = "manifest.txt";

/// The configured f-values, drawing them if a range was given.
pub fn resolve_fvalues(config: &ExperimentConfig) -> Vec<f64> {
    match &config.fvalues {
        FValues::Explicit(v) => v.clone(),
        FValues::Random { lo, hi } => {
            let mut rng = replicate_rng(config.seed, FVALUE_STREAM);
            (0..config.genomes())
                .map(|_| rng.random_range(*lo..=*hi))
                .collect()
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub fvalues: Vec<f64>,
    pub ipsga2: Trajectory,
    pub sfsga: RunStatistics,
    pub rescue: Option<RescueReport>,
}

impl ExperimentResult {
    /// Largest |SFSGA mean − IPSGA2| over all generations and genomes.
    pub fn max_deviation(&self) -> f64 {
        self.per_generation_deviation()
            .into_iter()
            .fold(0.0, f64::max)
    }

    /// Largest |SFSGA mean − IPSGA2| over genomes, per generation.
    pub fn per_generation_deviation(&self) -> Vec<f64> {
        self.sfsga
            .mean
            .iter()
            .zip(&self.ipsga2.generations)
            .map(|(m, p)| {
                m.iter()
                    .zip(p.as_slice())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .collect()
    }
}

/// The order-o infinite-population machine: means as fitness, uniform
/// crossover, uniform start.
pub fn ipsga2(order: u32, fvalues: &[f64], generations: usize) -> Result<Trajectory> {
    let machine = EvolutionMachine::new(
        projected_uniform_crossover(order)?,
        FitnessFunction::new(fvalues.to_vec())?,
    )?;
    Ok(trajectory(
        &machine,
        &Distribution::uniform(1 << order)?,
        generations,
    )?)
}

/// Runs IPSGA2 and the r SFSGA replicates without touching the disk.
pub fn compute(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let fvalues = resolve_fvalues(config);
    let ipsga2 = ipsga2(config.order, &fvalues, config.generations)?;
    let sf = StochasticFitness::new(fvalues.clone(), config.sigma)?;
    let runs = run_replicates(
        config.order,
        config.population,
        &sf,
        config.generations,
        config.seed,
        config.runs,
    )?;
    let sfsga = aggregate_runs(&runs)?;
    let rescue = if is_rescue_preset(config.preset) {
        Some(rescue_check(&sfsga, &fvalues)?)
    } else {
        None
    };
    Ok(ExperimentResult {
        fvalues,
        ipsga2,
        sfsga,
        rescue,
    })
}

/// Writes every output file of a finished experiment into `config.out`.
pub fn write(config: &ExperimentConfig, result: &ExperimentResult) -> Result<()> {
    let dir = &config.out;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let ipsga2: Vec<&[f64]> = result
        .ipsga2
        .generations
        .iter()
        .map(Distribution::as_slice)
        .collect();
    output::write_frequencies(&dir.join("ipsga2.csv"), config.order, &ipsga2)?;
    output::write_frequencies(
        &dir.join("sfsga_mean.csv"),
        config.order,
        &result.sfsga.mean,
    )?;
    output::write_frequencies(&dir.join("sfsga_std.csv"), config.order, &result.sfsga.std)?;
    output::write_fvalues(&dir.join("fvalues.csv"), config.order, &result.fvalues)?;
    if let Some(report) = &result.rescue {
        output::write_rescue(&dir.join("rescue_report.csv"), config.order, report)?;
    }
    let manifest = dir.join(MANIFEST);
    std::fs::write(&manifest, config.to_manifest()).map_err(|e| CliError::io(manifest, e))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let result = compute(config)?;
    write(config, &result)?;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    Population(Vec<u64>),
    Sigma(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub parameter: &'static str,
    pub value: String,
    pub max_deviation: f64,
}

/// One experiment per setting, everything else (f-values and seed included)
/// held fixed. Writes `convergence.csv` into `base.out`.
pub fn run_convergence_sweep(base: &ExperimentConfig, axis: &SweepAxis) -> Result<Vec<SweepRow>> {
    let settings: Vec<(ExperimentConfig, &'static str, String)> = match axis {
        SweepAxis::Population(list) => list
            .iter()
            .map(|&n| {
                (
                    ExperimentConfig {
                        population: n,
                        ..base.clone()
                    },
                    "n",
                    n.to_string(),
                )
            })
            .collect(),
        SweepAxis::Sigma(list) => list
            .iter()
            .map(|&s| {
                (
                    ExperimentConfig {
                        sigma: s,
                        ..base.clone()
                    },
                    "sigma",
                    s.to_string(),
                )
            })
            .collect(),
    };
    if settings.is_empty() {
        return Err(CliError::usage("sweep list is empty"));
    }
    let mut rows = Vec::with_capacity(settings.len());
    for (config, parameter, value) in settings {
        let result = compute(&config)?;
        rows.push(SweepRow {
            parameter,
            value,
            max_deviation: result.max_deviation(),
        });
    }
    let dir = &base.out;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    output::write_sweep(&dir.join("convergence.csv"), &rows)?;
    Ok(rows)
}

/// Reads a manifest written by [`write`].
pub fn read_manifest(path: &Path) -> Result<ExperimentConfig> {
    let file = crate::config::Overrides::from_file(path)?;
    crate::config::resolve(Some(&file), &Default::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::preset;

    #[test]
    fn fvalues_come_from_their_own_stream() {
        let config = ExperimentConfig {
            seed: 5,
            ..preset(7).unwrap()
        };
        let f = resolve_fvalues(&config);
        assert_eq!(f.len(), 8);
        assert!(f.iter().all(|v| (2.0..=3.0).contains(v)));
        assert_eq!(f, resolve_fvalues(&config));
        let other = ExperimentConfig {
            seed: 6,
            ..config.clone()
        };
        assert_ne!(f, resolve_fvalues(&other));
        let longer = ExperimentConfig {
            runs: 3,
            population: 10,
            ..config
        };
        assert_eq!(f, resolve_fvalues(&longer));
    }

    #[test]
    fn explicit_fvalues_reproduce_random_ones() {
        let random = ExperimentConfig {
            population: 300,
            runs: 3,
            generations: 5,
            seed: 11,
            ..ExperimentConfig::default()
        };
        let a = compute(&random).unwrap();
        let explicit = ExperimentConfig {
            fvalues: FValues::Explicit(a.fvalues.clone()),
            ..random
        };
        let b = compute(&explicit).unwrap();
        assert_eq!(a.sfsga, b.sfsga);
        assert_eq!(a.ipsga2.generations, b.ipsga2.generations);
    }

    #[test]
    fn zero_fitness_is_degenerate() {
        let config = ExperimentConfig {
            order: 1,
            sigma: 0.0,
            fvalues: FValues::Explicit(vec![0.0, 0.0]),
            ..ExperimentConfig::default()
        };
        let err = compute(&config).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("generation 0"), "{err}");
    }

    #[test]
    fn deviation_is_zero_against_itself() {
        let config = ExperimentConfig {
            generations: 3,
            population: 100,
            ..ExperimentConfig::default()
        };
        let mut r = compute(&config).unwrap();
        r.sfsga.mean = r
            .ipsga2
            .generations
            .iter()
            .map(|p| p.as_slice().to_vec())
            .collect();
        assert_eq!(r.max_deviation(), 0.0);
        assert_eq!(r.per_generation_deviation().len(), 4);
    }
}
