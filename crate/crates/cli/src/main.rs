use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use ipsga_cli::config::Overrides;
use ipsga_cli::{resolve, run_convergence_sweep, run_experiment, CliError, SweepAxis};

#[derive(Parser)]
#[command(
    name = "ipsga",
    version,
    about = "Infinite- vs finite-population SGA experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV files
    Run(ConfigArgs),
    /// Run the experiment once per population size or noise level
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// Comma-separated population sizes
        #[arg(
            long,
            value_delimiter = ',',
            conflicts_with = "sigma_list",
            required_unless_present = "sigma_list"
        )]
        n_list: Vec<u64>,
        /// Comma-separated fitness standard deviations
        #[arg(long, value_delimiter = ',')]
        sigma_list: Vec<f64>,
    },
    /// Print the resolved configuration in manifest format
    Show(ConfigArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment preset, 1 to 12
    #[arg(long)]
    preset: Option<u8>,
    /// `key = value` configuration file (a manifest works too)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Genome length
    #[arg(long = "o")]
    order: Option<u32>,
    /// Population size
    #[arg(long = "n")]
    population: Option<u64>,
    /// Number of replicate runs
    #[arg(long = "r")]
    runs: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    /// Standard deviation of the fitness noise
    #[arg(long)]
    sigma: Option<f64>,
    /// Comma-separated f-values in genome order, or an fvalues.csv path
    #[arg(long, conflicts_with = "frange")]
    fvalues: Option<String>,
    /// Range `lo,hi` for random f-values
    #[arg(long)]
    frange: Option<String>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ipsga_cli::ExperimentConfig, CliError> {
        let file = self
            .config
            .as_deref()
            .map(Overrides::from_file)
            .transpose()?;
        let mut cli = Overrides {
            preset: self.preset,
            order: self.order,
            population: self.population,
            runs: self.runs,
            generations: self.generations,
            sigma: self.sigma,
            seed: self.seed,
            out: self.out.clone(),
            fvalues: None,
        };
        if let Some(v) = &self.fvalues {
            cli.set("fvalues", v, None)?;
        }
        if let Some(v) = &self.frange {
            cli.set("frange", v, None)?;
        }
        resolve(file.as_ref(), &cli)
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run(args) => {
            let config = args.resolve()?;
            let result = run_experiment(&config)?;
            println!("wrote {}", config.out.display());
            println!("max |sfsga_mean - ipsga2| = {}", result.max_deviation());
            if let Some(r) = &result.rescue {
                println!(
                    "winner {} f={} mean f={} above_average={} global_max={}",
                    r.winner, r.winner_fvalue, r.mean_fvalue, r.above_average, r.is_global_max
                );
            }
        }
        Command::Sweep {
            config,
            n_list,
            sigma_list,
        } => {
            let base = config.resolve()?;
            let axis = if n_list.is_empty() {
                SweepAxis::Sigma(sigma_list)
            } else {
                SweepAxis::Population(n_list)
            };
            for row in run_convergence_sweep(&base, &axis)? {
                println!(
                    "{}={} max_deviation={}",
                    row.parameter, row.value, row.max_deviation
                );
            }
        }
        Command::Show(args) => print!("{}", args.resolve()?.to_manifest()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
