//! Evolution machines and exact infinite-population trajectories.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::bitstring::schema_projection;
use crate::distribution::{
    expectation, manhattan, project, select, theme_conditional, Distribution, FitnessFunction,
    ThemeMap,
};
use crate::error::{Error, Result};
use crate::par;
use crate::transmission::{apply_variation, theme_transmission, Transmission};

/// Largest genome set iterated exactly (𝔅₁₆).
pub const MAX_EXACT_SIZE: usize = 1 << 16;

/// Drift `|Σ − 1|` above which a generation is renormalized.
pub const RENORMALIZE_THRESHOLD: f64 = 1e-12;

/// A genome set with a transmission function and a fitness function; its
/// epoch operator is variation after fitness-proportional selection.
#[derive(Debug, Clone)]
pub struct EvolutionMachine {
    transmission: Transmission,
    fitness: FitnessFunction,
}

impl EvolutionMachine {
    pub fn new(transmission: Transmission, fitness: FitnessFunction) -> Result<Self> {
        if transmission.size() != fitness.len() {
            return Err(Error::dim(
                "evolution machine",
                transmission.size(),
                fitness.len(),
            ));
        }
        if fitness.len() > MAX_EXACT_SIZE {
            return Err(Error::Capacity(format!(
                "exact iteration is limited to {MAX_EXACT_SIZE} genomes (got {}); \
                 use the finite-population SGA for larger genome sets",
                fitness.len()
            )));
        }
        Ok(EvolutionMachine {
            transmission,
            fitness,
        })
    }

    pub fn size(&self) -> usize {
        self.fitness.len()
    }

    pub fn transmission(&self) -> &Transmission {
        &self.transmission
    }

    pub fn fitness(&self) -> &FitnessFunction {
        &self.fitness
    }
}

/// Distributions for generations `0..=t`, with the renormalization applied
/// after each epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub generations: Vec<Distribution>,
    /// `corrections[i]` is the drift removed from generation `i + 1`.
    pub corrections: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.generations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generations.is_empty()
    }

    pub fn last(&self) -> &Distribution {
        self.generations
            .last()
            .expect("a trajectory holds generation 0")
    }

    pub fn max_correction(&self) -> f64 {
        self.corrections.iter().copied().fold(0.0, f64::max)
    }
}

/// `𝒢_E p = V_T(S_f p)`.
pub fn epoch(machine: &EvolutionMachine, p: &Distribution) -> Result<Distribution> {
    let selected = select(&machine.fitness, p)?;
    apply_variation(&machine.transmission, &selected)
}

/// Iterates the epoch operator `t` times from `p0`.
pub fn trajectory(machine: &EvolutionMachine, p0: &Distribution, t: usize) -> Result<Trajectory> {
    if p0.len() != machine.size() {
        return Err(Error::dim("trajectory start", machine.size(), p0.len()));
    }
    let mut generations = Vec::with_capacity(t + 1);
    let mut corrections = Vec::with_capacity(t);
    generations.push(p0.clone());
    for g in 0..t {
        let next = epoch(machine, &generations[g]).map_err(|e| e.at_generation(g))?;
        let (next, correction) = next.renormalized(RENORMALIZE_THRESHOLD);
        if correction > 0.0 {
            log::debug!(
                "generation {}: renormalized away drift {correction:e}",
                g + 1
            );
        }
        corrections.push(correction);
        generations.push(next);
    }
    Ok(Trajectory {
        generations,
        corrections,
    })
}

/// The machine over the theme set with transmission `T^→β` and fitness
/// `theme_fitness`.
///
/// Structural bitstring operators under schema maps are projected in closed
/// form; anything else is certified and extracted exhaustively.
pub fn quotient_machine(
    machine: &EvolutionMachine,
    beta: &ThemeMap,
    theme_fitness: &FitnessFunction,
) -> Result<EvolutionMachine> {
    if beta.domain_size() != machine.size() {
        return Err(Error::dim(
            "quotient machine",
            machine.size(),
            beta.domain_size(),
        ));
    }
    if theme_fitness.len() != beta.codomain_size() {
        return Err(Error::dim(
            "theme fitness",
            beta.codomain_size(),
            theme_fitness.len(),
        ));
    }
    let transmission = if beta.is_identity() {
        machine.transmission.clone()
    } else {
        match schema_projection(&machine.transmission, beta) {
            Some(projected) => projected?,
            None => theme_transmission(&machine.transmission, beta)?,
        }
    };
    EvolutionMachine::new(transmission, theme_fitness.clone())
}

/// `max_k |E_f(C_β(p,k)) − f*(k)|` over themes with positive mass.
pub fn thematic_mean_divergence(
    f: &FitnessFunction,
    theme_fitness: &FitnessFunction,
    beta: &ThemeMap,
    p: &Distribution,
) -> Result<f64> {
    if theme_fitness.len() != beta.codomain_size() {
        return Err(Error::dim(
            "theme fitness",
            beta.codomain_size(),
            theme_fitness.len(),
        ));
    }
    let mut worst: f64 = 0.0;
    for k in 0..beta.codomain_size() {
        let conditional = theme_conditional(beta, p, k)?;
        if conditional.is_zero() {
            continue;
        }
        let mean = expectation(f, &conditional)?;
        worst = worst.max((mean - theme_fitness.get(k)).abs());
    }
    Ok(worst)
}

/// Largest manhattan distance between a theme conditional of `p` and the
/// uniform distribution on the same theme class.
pub fn departure_monitor(beta: &ThemeMap, p: &Distribution) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..beta.codomain_size() {
        let conditional = theme_conditional(beta, p, k)?;
        if conditional.is_zero() {
            continue;
        }
        let class = beta.class(k);
        let u = 1.0 / class.len() as f64;
        let distance: f64 = class.iter().map(|&x| (conditional.get(x) - u).abs()).sum();
        worst = worst.max(distance);
    }
    Ok(worst)
}

/// Fidelity of a coarse-graining over `tau` generations.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseGrainReport {
    /// `d(Ξ_β 𝒢_E^t p, 𝒢_{E*}^t Ξ_β p)` for `t = 0..=tau`.
    pub distances: Vec<f64>,
    /// Thematic mean divergence over the uniform distribution and every
    /// distribution on the fine trajectory.
    pub delta: f64,
    /// [`departure_monitor`] of each fine generation.
    pub departure: Vec<f64>,
}

impl CoarseGrainReport {
    pub fn final_distance(&self) -> f64 {
        *self
            .distances
            .last()
            .expect("generation 0 is always reported")
    }

    pub fn max_distance(&self) -> f64 {
        self.distances.iter().copied().fold(0.0, f64::max)
    }
}

/// Runs the fine machine from `p0` and the quotient machine from its
/// projection, and compares them generation by generation.
pub fn coarse_graining_error(
    fine: &EvolutionMachine,
    coarse: &EvolutionMachine,
    beta: &ThemeMap,
    p0: &Distribution,
    tau: usize,
) -> Result<CoarseGrainReport> {
    if tau == 0 {
        return Err(Error::Argument(
            "coarse-graining needs at least one generation".into(),
        ));
    }
    if beta.domain_size() != fine.size() {
        return Err(Error::dim("fine machine", beta.domain_size(), fine.size()));
    }
    if beta.codomain_size() != coarse.size() {
        return Err(Error::dim(
            "quotient machine",
            beta.codomain_size(),
            coarse.size(),
        ));
    }
    let fine_path = trajectory(fine, p0, tau)?;
    let coarse_path = trajectory(coarse, &project(beta, p0)?, tau)?;

    let mut distances = Vec::with_capacity(tau + 1);
    let mut departure = Vec::with_capacity(tau + 1);
    let mut delta = thematic_mean_divergence(
        fine.fitness(),
        coarse.fitness(),
        beta,
        &Distribution::uniform(fine.size())?,
    )?;
    for (p, q) in fine_path.generations.iter().zip(&coarse_path.generations) {
        let projected = project(beta, p)?;
        distances.push(manhattan(projected.as_slice(), q.as_slice())?);
        departure.push(departure_monitor(beta, p)?);
        delta = delta.max(thematic_mean_divergence(
            fine.fitness(),
            coarse.fitness(),
            beta,
            p,
        )?);
    }
    // Generation 0 agrees by construction; store an exact zero.
    distances[0] = 0.0;
    Ok(CoarseGrainReport {
        distances,
        delta,
        departure,
    })
}

/// Runs [`coarse_graining_error`] for several fine/quotient pairs
/// concurrently. Results are returned in input order.
pub fn coarse_graining_sweep(
    pairs: &[(EvolutionMachine, EvolutionMachine)],
    beta: &ThemeMap,
    p0: &Distribution,
    tau: usize,
) -> Result<Vec<CoarseGrainReport>> {
    par::map_indices(pairs.len(), |i| {
        coarse_graining_error(&pairs[i].0, &pairs[i].1, beta, p0, tau)
    })
    .into_iter()
    .collect()
}

/// Per-genome fitness drawn around a theme fitness: `f(x) = f*(β(x)) + s·z_x`
/// with standard normal `z_x`, clamped at zero. Drawing the normals in genome
/// order from the same generator makes fitness functions for different `s`
/// share their noise pattern.
pub fn schematic_fitness<R: Rng + ?Sized>(
    beta: &ThemeMap,
    theme_fitness: &FitnessFunction,
    noise_sd: f64,
    rng: &mut R,
) -> Result<FitnessFunction> {
    if theme_fitness.len() != beta.codomain_size() {
        return Err(Error::dim(
            "theme fitness",
            beta.codomain_size(),
            theme_fitness.len(),
        ));
    }
    if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
        return Err(Error::Argument(format!(
            "noise standard deviation {noise_sd} is invalid"
        )));
    }
    FitnessFunction::new(
        beta.assignment()
            .iter()
            .map(|&k| {
                let z: f64 = rng.sample(StandardNormal);
                (theme_fitness.get(k) + noise_sd * z).max(0.0)
            })
            .collect(),
    )
}
