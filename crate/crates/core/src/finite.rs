//! Finite-population SGA over 𝔅_o with a stochastic fitness function.
//!
//! Every generation each individual gets a fresh fitness sample, parents are
//! drawn with replacement in proportion to those samples, and each of the N
//! children is the uniform crossover of two independently drawn parents.
//! There is no mutation and no elitism.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::par;

/// Largest genome length the finite SGA accepts.
pub const MAX_ORDER: u32 = 16;

fn check_order(order: u32) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::Argument(format!(
            "order must be in 1..={MAX_ORDER}, got {order}"
        )));
    }
    Ok(())
}

/// Generator for replicate `run` of a batch seeded with `master`.
///
/// Each replicate reads its own ChaCha8 stream of the master seed, so runs
/// are independent of each other and of how they are scheduled.
pub fn replicate_rng(master: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(run);
    rng
}

/// Genome counts of a population over 𝔅_o.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Population {
    order: u32,
    counts: Vec<u64>,
}

impl Population {
    pub fn new(order: u32, counts: Vec<u64>) -> Result<Self> {
        check_order(order)?;
        if counts.len() != 1 << order {
            return Err(Error::dim("population counts", 1 << order, counts.len()));
        }
        if counts.iter().sum::<u64>() == 0 {
            return Err(Error::Argument("population is empty".into()));
        }
        Ok(Population { order, counts })
    }

    /// `size` genomes drawn independently and uniformly from 𝔅_o.
    pub fn uniform_random<R: Rng + ?Sized>(order: u32, size: u64, rng: &mut R) -> Result<Self> {
        check_order(order)?;
        if size == 0 {
            return Err(Error::Argument("population size must be at least 1".into()));
        }
        let mut counts = vec![0u64; 1 << order];
        let genomes = 1usize << order;
        for _ in 0..size {
            counts[rng.random_range(0..genomes)] += 1;
        }
        Ok(Population { order, counts })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn size(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.size() as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }
}

/// Fitness of genome g is a draw from 𝒩(f_g, σ²), clamped at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticFitness {
    means: Vec<f64>,
    sigma: f64,
}

impl StochasticFitness {
    pub fn new(means: Vec<f64>, sigma: f64) -> Result<Self> {
        if means.is_empty() || means.iter().any(|m| !m.is_finite()) {
            return Err(Error::Argument(
                "f-values must be finite and nonempty".into(),
            ));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::Argument(format!(
                "standard deviation {sigma} is invalid"
            )));
        }
        Ok(StochasticFitness { means, sigma })
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// One fresh fitness sample for genome `g`. With σ = 0 no randomness is
/// consumed.
pub fn sample_fitness<R: Rng + ?Sized>(sf: &StochasticFitness, g: usize, rng: &mut R) -> f64 {
    let mean = sf.means[g];
    if sf.sigma == 0.0 {
        return mean.max(0.0);
    }
    let z: f64 = rng.sample(StandardNormal);
    (mean + sf.sigma * z).max(0.0)
}

/// One generation: fitness evaluation, proportional selection and uniform
/// crossover.
///
/// Picking an individual with probability proportional to its sample and
/// reading its genome is the same as picking genome g with probability
/// proportional to the summed samples of its copies, which is what is drawn.
pub fn next_generation<R: Rng + ?Sized>(
    pop: &Population,
    sf: &StochasticFitness,
    rng: &mut R,
) -> Result<Population> {
    if sf.means.len() != pop.counts.len() {
        return Err(Error::dim(
            "stochastic fitness",
            pop.counts.len(),
            sf.means.len(),
        ));
    }
    let mut cumulative = Vec::with_capacity(pop.counts.len());
    let mut total = 0.0;
    for (g, &count) in pop.counts.iter().enumerate() {
        for _ in 0..count {
            total += sample_fitness(sf, g, rng);
        }
        cumulative.push(total);
    }
    if total <= 0.0 {
        return Err(Error::DegenerateSelection { generation: None });
    }

    let draw = |rng: &mut R| {
        let u = rng.random::<f64>() * total;
        cumulative
            .partition_point(|&c| c <= u)
            .min(cumulative.len() - 1)
    };
    let full = (1u64 << pop.order) - 1;
    let mut counts = vec![0u64; pop.counts.len()];
    for _ in 0..pop.size() {
        let first = draw(rng);
        let second = draw(rng);
        let mask = (rng.random::<u64>() & full) as usize;
        counts[(first & !mask) | (second & mask)] += 1;
    }
    Ok(Population {
        order: pop.order,
        counts,
    })
}

/// Genome frequencies of one run, one row per generation.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable {
    pub order: u32,
    pub population: u64,
    pub counts: Vec<Vec<u64>>,
}

impl FrequencyTable {
    pub fn generations(&self) -> usize {
        self.counts.len()
    }

    pub fn frequencies(&self, generation: usize) -> Vec<f64> {
        let n = self.population as f64;
        self.counts[generation]
            .iter()
            .map(|&c| c as f64 / n)
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.generations())
            .map(|g| self.frequencies(g))
            .collect()
    }
}

/// One SFSGA run of `generations` generations after a uniformly drawn
/// initial population.
pub fn run_sfsga<R: Rng + ?Sized>(
    order: u32,
    size: u64,
    sf: &StochasticFitness,
    generations: usize,
    rng: &mut R,
) -> Result<FrequencyTable> {
    if sf.means.len() != 1 << order {
        return Err(Error::dim("stochastic fitness", 1 << order, sf.means.len()));
    }
    let mut pop = Population::uniform_random(order, size, rng)?;
    let mut counts = Vec::with_capacity(generations + 1);
    counts.push(pop.counts.clone());
    for g in 0..generations {
        pop = next_generation(&pop, sf, rng).map_err(|e| e.at_generation(g))?;
        counts.push(pop.counts.clone());
    }
    Ok(FrequencyTable {
        order,
        population: size,
        counts,
    })
}

/// `runs` replicate runs, replicate i using [`replicate_rng`]`(master, i)`.
/// Replicates run concurrently; the output is in run order.
pub fn run_replicates(
    order: u32,
    size: u64,
    sf: &StochasticFitness,
    generations: usize,
    master_seed: u64,
    runs: usize,
) -> Result<Vec<FrequencyTable>> {
    if runs == 0 {
        return Err(Error::Argument("at least one run is required".into()));
    }
    par::map_indices(runs, |run| {
        let mut rng = replicate_rng(master_seed, run as u64);
        run_sfsga(order, size, sf, generations, &mut rng)
    })
    .into_iter()
    .collect()
}

/// Per generation, per genome mean and sample standard deviation over runs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunStatistics {
    pub runs: usize,
    pub mean: Vec<Vec<f64>>,
    pub std: Vec<Vec<f64>>,
}

impl RunStatistics {
    pub fn generations(&self) -> usize {
        self.mean.len()
    }

    pub fn final_mean(&self) -> &[f64] {
        self.mean.last().expect("statistics hold generation 0")
    }
}

/// Mean and (r − 1)-denominator standard deviation of every cell.
pub fn aggregate_runs(tables: &[FrequencyTable]) -> Result<RunStatistics> {
    let first = tables
        .first()
        .ok_or_else(|| Error::Argument("no runs to aggregate".into()))?;
    let rows = first.generations();
    let cols = first.counts.first().map_or(0, Vec::len);
    for t in tables {
        if t.generations() != rows {
            return Err(Error::dim("run length", rows, t.generations()));
        }
        if let Some(bad) = t.counts.iter().find(|r| r.len() != cols) {
            return Err(Error::dim("genome count", cols, bad.len()));
        }
    }
    let r = tables.len();
    let freqs: Vec<Vec<Vec<f64>>> = tables.iter().map(FrequencyTable::rows).collect();
    let mut mean = vec![vec![0.0; cols]; rows];
    let mut std = vec![vec![0.0; cols]; rows];
    for g in 0..rows {
        for x in 0..cols {
            let m = freqs.iter().map(|f| f[g][x]).sum::<f64>() / r as f64;
            mean[g][x] = m;
            if r > 1 {
                let ss: f64 = freqs.iter().map(|f| (f[g][x] - m).powi(2)).sum();
                std[g][x] = (ss / (r - 1) as f64).sqrt();
            }
        }
    }
    Ok(RunStatistics { runs: r, mean, std })
}

/// Which genome dominates at the end of a run batch, and how its f-value
/// compares with the others.
#[derive(Debug, Clone, PartialEq)]
pub struct RescueReport {
    /// Highest final mean frequency, lowest index on ties.
    pub winner: usize,
    pub winner_frequency: f64,
    pub winner_fvalue: f64,
    pub mean_fvalue: f64,
    /// `winner_fvalue > mean_fvalue`.
    pub above_average: bool,
    /// Winner has the largest f-value (ties count).
    pub is_global_max: bool,
    /// Every f-value is equal, so "above average" cannot hold.
    pub degenerate_tie: bool,
}

pub fn rescue_check(stats: &RunStatistics, fvalues: &[f64]) -> Result<RescueReport> {
    let last = stats
        .mean
        .last()
        .ok_or_else(|| Error::Argument("statistics have no generations".into()))?;
    if last.len() != fvalues.len() {
        return Err(Error::dim("f-values", last.len(), fvalues.len()));
    }
    let mut winner = 0;
    for (g, &f) in last.iter().enumerate() {
        if f > last[winner] {
            winner = g;
        }
    }
    let mean_fvalue = fvalues.iter().sum::<f64>() / fvalues.len() as f64;
    let max_fvalue = fvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let winner_fvalue = fvalues[winner];
    Ok(RescueReport {
        winner,
        winner_frequency: last[winner],
        winner_fvalue,
        mean_fvalue,
        above_average: winner_fvalue > mean_fvalue,
        is_global_max: winner_fvalue == max_fvalue,
        degenerate_tie: fvalues.iter().all(|&f| f == fvalues[0]),
    })
}
