//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use ipsga_cli::compute;
use ipsga_cli::config::{preset, ExperimentConfig};
use ipsga_core::{
    apply_variation, canonical_mutation, coarse_graining_error, compose, epoch, n_point_crossover,
    next_generation, project, projected_mutation, projected_uniform_crossover, quotient_machine,
    replicate_rng, schema_map, schematic_fitness, theme_transmission, uniform_crossover,
    Distribution, EvolutionMachine, FitnessFunction, Population, StochasticFitness, ThemeMap,
    Transmission,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, Duration, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn schema_maps(length: u32, max_order: u32) -> Vec<(Vec<u32>, ThemeMap)> {
    (1u32..(1 << length))
        .filter(|bits| bits.count_ones() <= max_order)
        .map(|bits| {
            let loci: Vec<u32> = (1..=length).filter(|l| bits >> (l - 1) & 1 == 1).collect();
            let map = schema_map(length, &loci).unwrap().theme_map().clone();
            (loci, map)
        })
        .collect()
}

fn random_distribution(size: usize, rng: &mut ChaCha8Rng) -> Distribution {
    Distribution::from_weights((0..size).map(|_| rng.random::<f64>()).collect()).unwrap()
}

fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn row_error(a: &Transmission, b: &Transmission) -> f64 {
    let tuples = a.size().pow(a.arity() as u32);
    let mut parents = vec![0; a.arity()];
    let mut worst: f64 = 0.0;
    for t in 0..tuples {
        let mut rest = t;
        for slot in parents.iter_mut().rev() {
            *slot = rest % a.size();
            rest /= a.size();
        }
        worst = worst.max(max_abs(
            &a.row(&parents).unwrap(),
            &b.row(&parents).unwrap(),
        ));
    }
    worst
}

fn variation_commutation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for length in 1..=6u32 {
        let m = canonical_mutation(length, 0.01).unwrap();
        let c = uniform_crossover(length).unwrap();
        let mut ops = vec![
            canonical_mutation(length, 0.0).unwrap(),
            m.clone(),
            canonical_mutation(length, 0.5).unwrap(),
            c.clone(),
            compose(&m, &c).unwrap(),
            compose(&c, &m).unwrap(),
        ];
        for points in 1..=2 {
            if points < length {
                ops.push(n_point_crossover(length, points).unwrap());
            }
        }
        // brute-force tables: variation by direct summation over parent tuples
        let dense: Vec<Transmission> = ops
            .iter()
            .map(|t| t.materialize(1 << 24).unwrap())
            .collect();
        for (_, beta) in schema_maps(length, 3) {
            for (t, d) in ops.iter().zip(&dense) {
                let theme = theme_transmission(d, &beta).unwrap();
                for _ in 0..50 {
                    let p = random_distribution(1 << length, &mut rng);
                    let fast = project(&beta, &apply_variation(t, &p).unwrap()).unwrap();
                    let direct = project(&beta, &apply_variation(d, &p).unwrap()).unwrap();
                    let coarse = apply_variation(&theme, &project(&beta, &p).unwrap()).unwrap();
                    worst = worst
                        .max(max_abs(fast.as_slice(), coarse.as_slice()))
                        .max(max_abs(direct.as_slice(), coarse.as_slice()));
                    cases += 1;
                }
            }
        }
    }
    Outcome {
        pass: worst <= 1e-9,
        detail: format!("{cases} cases, max error {worst:.3e} (tol 1e-9)"),
    }
}

fn exact_coarsenability() -> Outcome {
    let length = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let t = compose(
        &canonical_mutation(length, 0.01).unwrap(),
        &uniform_crossover(length).unwrap(),
    )
    .unwrap();
    let mut worst: f64 = 0.0;
    let maps: Vec<_> = schema_maps(length, 2)
        .into_iter()
        .filter(|(l, _)| l.len() == 2)
        .collect();
    for (_, beta) in &maps {
        let fstar =
            FitnessFunction::new((0..4).map(|_| rng.random_range(2.0..3.0)).collect()).unwrap();
        let f = FitnessFunction::pullback(beta, &fstar).unwrap();
        let fine = EvolutionMachine::new(t.clone(), f).unwrap();
        let coarse = EvolutionMachine::new(theme_transmission(&t, beta).unwrap(), fstar).unwrap();
        let p0 = random_distribution(1 << length, &mut rng);
        let report = coarse_graining_error(&fine, &coarse, beta, &p0, 30).unwrap();
        worst = worst.max(report.max_distance());
    }
    Outcome {
        pass: worst <= 1e-8,
        detail: format!(
            "{} schema maps, 30 generations, max distance {worst:.3e} (tol 1e-8)",
            maps.len()
        ),
    }
}

fn closed_form_projections() -> Outcome {
    let length = 6;
    let mut worst: f64 = 0.0;
    let maps = schema_maps(length, 3);
    for (loci, beta) in &maps {
        let order = loci.len() as u32;
        for rate in [0.0, 0.01, 0.25, 0.5, 1.0] {
            let exact =
                theme_transmission(&canonical_mutation(length, rate).unwrap(), beta).unwrap();
            worst = worst.max(row_error(&exact, &projected_mutation(rate, order).unwrap()));
        }
        let exact = theme_transmission(&uniform_crossover(length).unwrap(), beta).unwrap();
        worst = worst.max(row_error(
            &exact,
            &projected_uniform_crossover(order).unwrap(),
        ));
    }
    Outcome {
        pass: worst <= 1e-12,
        detail: format!(
            "{} schema maps, max error {worst:.3e} (tol 1e-12)",
            maps.len()
        ),
    }
}

fn limitwise_fidelity() -> Outcome {
    let length = 12;
    let beta = schema_map(length, &[2, 7, 11]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let fstar = FitnessFunction::new((0..8).map(|_| rng.random_range(2.0..3.0)).collect()).unwrap();
    let p0 = Distribution::uniform(1 << length).unwrap();
    let t = uniform_crossover(length).unwrap();
    let mut finals = Vec::new();
    for s in [0.5, 0.1, 0.01] {
        let mut noise = ChaCha8Rng::seed_from_u64(40);
        let f = schematic_fitness(beta.theme_map(), &fstar, s, &mut noise).unwrap();
        let fine = EvolutionMachine::new(t.clone(), f).unwrap();
        let coarse = quotient_machine(&fine, beta.theme_map(), &fstar).unwrap();
        let report = coarse_graining_error(&fine, &coarse, beta.theme_map(), &p0, 10).unwrap();
        finals.push(report.final_distance());
    }
    let monotone = finals.windows(2).all(|w| w[1] <= w[0]);
    Outcome {
        pass: monotone && finals[2] <= 0.01,
        detail: format!(
            "generation-10 distance at s=0.5,0.1,0.01: {:.3e}, {:.3e}, {:.3e} (non-increasing, last <= 0.01)",
            finals[0], finals[1], finals[2]
        ),
    }
}

fn population_sweep() -> Outcome {
    let base = ExperimentConfig {
        runs: 40,
        seed: 42,
        ..preset(5).unwrap()
    };
    let mut deviations = Vec::new();
    for n in [2000, 20_000, 100_000, 400_000] {
        let config = ExperimentConfig {
            population: n,
            ..base.clone()
        };
        deviations.push(compute(&config).unwrap().max_deviation());
    }
    let exp5 = ExperimentConfig {
        seed: 42,
        ..preset(5).unwrap()
    };
    let single = compute(&exp5).unwrap().max_deviation();
    let monotone = deviations.windows(2).all(|w| w[1] < w[0]);
    Outcome {
        pass: monotone && single <= 0.02,
        detail: format!(
            "r=40 deviations at N=2000,20000,100000,400000: {} (strictly decreasing); N=400000 r=1: {single:.4} (<= 0.02)",
            deviations.iter().map(|d| format!("{d:.4}")).collect::<Vec<_>>().join(", ")
        ),
    }
}

fn rescue() -> Outcome {
    let mut above = 0;
    let mut not_max = 0;
    for seed in 0..10 {
        let config = ExperimentConfig {
            seed,
            ..preset(7).unwrap()
        };
        let report = compute(&config).unwrap().rescue.expect("preset 7 reports");
        above += usize::from(report.above_average);
        not_max += usize::from(!report.is_global_max);
    }
    Outcome {
        pass: above >= 9 && not_max >= 1,
        detail: format!(
            "above-average winners {above}/10 (>= 9), non-global-max winners {not_max} (>= 1)"
        ),
    }
}

fn same_files(a: &Path, b: &Path) -> Result<usize, String> {
    let mut names: Vec<_> = std::fs::read_dir(a)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.file_name()))
        .filter(|n| n.to_string_lossy().ends_with(".csv"))
        .collect();
    names.sort();
    for name in &names {
        let x = std::fs::read(a.join(name)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.join(name)).map_err(|e| e.to_string())?;
        if x != y {
            return Err(format!("{} differs", name.to_string_lossy()));
        }
    }
    Ok(names.len())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_ipsga");
    let mut notes = Vec::new();
    let mut pass = true;
    for (id, extra) in [
        ("1", vec![]),
        ("7", vec!["--generations", "60"]),
        ("6", vec!["--n", "20000"]),
    ] {
        let first = dir.path().join(format!("p{id}a"));
        let second = dir.path().join(format!("p{id}b"));
        let status = Command::new(bin)
            .args(["run", "--preset", id, "--seed", "42", "--out"])
            .arg(&first)
            .args(&extra)
            .output()
            .unwrap()
            .status;
        let rerun = Command::new(bin)
            .args(["run", "--config"])
            .arg(first.join("manifest.txt"))
            .arg("--out")
            .arg(&second)
            .output()
            .unwrap()
            .status;
        match (
            status.success() && rerun.success(),
            same_files(&first, &second),
        ) {
            (true, Ok(n)) => notes.push(format!("preset {id}: {n} CSVs identical")),
            (ok, result) => {
                pass = false;
                notes.push(format!("preset {id}: exit ok={ok}, {result:?}"));
            }
        }
    }
    Outcome {
        pass,
        detail: notes.join("; "),
    }
}

fn one_step_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let means: Vec<f64> = (0..8).map(|_| rng.random_range(2.0..3.0)).collect();
    let sf = StochasticFitness::new(means.clone(), 0.0).unwrap();
    let machine = EvolutionMachine::new(
        projected_uniform_crossover(3).unwrap(),
        FitnessFunction::new(means).unwrap(),
    )
    .unwrap();
    let pop = Population::uniform_random(3, 100_000, &mut rng).unwrap();
    let expected = epoch(&machine, &Distribution::new(pop.frequencies()).unwrap()).unwrap();
    let mut average = vec![0.0; 8];
    for seed in 0..20 {
        let mut step_rng = replicate_rng(seed, 0);
        let next = next_generation(&pop, &sf, &mut step_rng).unwrap();
        for (a, f) in average.iter_mut().zip(next.frequencies()) {
            *a += f / 20.0;
        }
    }
    let worst = max_abs(&average, expected.as_slice());
    Outcome {
        pass: worst <= 0.01,
        detail: format!("max |mean one-step - epoch| = {worst:.2e} (tol 0.01)"),
    }
}

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "1 variation commutation",
            Duration::from_secs(120),
            variation_commutation,
        ),
        (
            "2 exact coarsenability",
            Duration::from_secs(60),
            exact_coarsenability,
        ),
        (
            "3 closed-form projections",
            Duration::from_secs(60),
            closed_form_projections,
        ),
        (
            "4 limitwise fidelity",
            Duration::from_secs(600),
            limitwise_fidelity,
        ),
        (
            "5 population sweep",
            Duration::from_secs(900),
            population_sweep,
        ),
        ("6 rescue", Duration::from_secs(600), rescue),
        ("7 determinism", Duration::from_secs(600), determinism),
        (
            "8 one-step oracle",
            Duration::from_secs(600),
            one_step_oracle,
        ),
    ];
    let mut failed = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let pass = outcome.pass && elapsed <= budget;
        failed += usize::from(!pass);
        println!(
            "{} criterion {name}: {} [{:.1}s of {}s]",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
