//! Exact infinite-population simple GA dynamics over finite genome sets,
//! coarse-grained through theme maps, plus a finite-population SGA with a
//! stochastic fitness function.
//!
//! The layers, bottom-up:
//!
//! * [`distribution`]: distributions over dense index sets and the
//!   expectation, selection, projection and theme-conditional operators.
//! * [`transmission`]: m-parent transmission functions, the variation
//!   operator, composition, weighted sums, cartesian products of theme maps
//!   and exhaustive ambivalence certification.
//! * [`bitstring`]: bitstring genome sets, schema maps, canonical mutation
//!   and mask-based crossover with their closed-form schema projections.
//! * [`machine`]: evolution machines, exact trajectories, quotient machines
//!   and coarse-graining fidelity reports.
//! * [`finite`]: the finite-population SGA with per-individual fitness
//!   sampling and replicate aggregation.
//!
//! Data-parallel inner loops run on rayon when the `parallel` feature is on
//! (the default) and sequentially otherwise. Both paths reduce in a fixed
//! chunk order, so results are bit-identical either way.

pub mod bitstring;
pub mod distribution;
pub mod error;
pub mod finite;
pub mod machine;
pub mod par;
pub mod transmission;

pub use bitstring::{
    canonical_mutation, crossover_from_mask_distribution, mask_crossover, n_point_crossover,
    projected_mutation, projected_uniform_crossover, schema_map, schema_projection,
    uniform_crossover, BitstringSet, Mask, SchemaMap,
};
pub use distribution::{
    expectation, manhattan, project, select, theme_conditional, Distribution, FitnessFunction,
    IndexedSet, ThemeMap,
};
pub use error::{AmbivalenceViolation, Error, Result};
pub use finite::{
    aggregate_runs, next_generation, replicate_rng, rescue_check, run_replicates, run_sfsga,
    sample_fitness, FrequencyTable, Population, RescueReport, RunStatistics, StochasticFitness,
};
pub use machine::{
    coarse_graining_error, coarse_graining_sweep, departure_monitor, epoch, quotient_machine,
    schematic_fitness, thematic_mean_divergence, trajectory, CoarseGrainReport, EvolutionMachine,
    Trajectory,
};
pub use transmission::{
    apply_variation, are_independent, cartesian_product, compose, is_ambivalent,
    theme_transmission, theme_transmission_with_tol, weighted_sum, ThemeTransmission, Transmission,
};
