use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pareto_manifold::experiments::{run, ExperimentConfig, Failure};
use pareto_manifold::Error;

#[derive(Parser)]
#[command(name = "pml", version, about = "Pareto Manifold Learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train on the toy problem from every init pair and compare with the oracle front.
    ToySweep(Flags),
    /// Run single-model baselines on the toy problem.
    ToyBaseline(Flags),
    /// Train a two-member MLP ensemble on the synthetic dataset.
    MlpPml(Flags),
    /// Multi-forward window and regularization strength grid.
    AblationGrid(Flags),
    /// Evaluate a saved ensemble on a simplex grid.
    SubspaceEval(Flags),
    /// Hypervolume of a front CSV.
    Hypervolume(Flags),
}

#[derive(Args)]
struct Flags {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
}

impl Command {
    fn parts(self) -> (&'static str, Flags) {
        match self {
            Command::ToySweep(f) => ("toy-sweep", f),
            Command::ToyBaseline(f) => ("toy-baseline", f),
            Command::MlpPml(f) => ("mlp-pml", f),
            Command::AblationGrid(f) => ("ablation-grid", f),
            Command::SubspaceEval(f) => ("subspace-eval", f),
            Command::Hypervolume(f) => ("hypervolume", f),
        }
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let (name, flags) = cli.command.parts();
    let mut config = ExperimentConfig::load(&flags.config).map_err(Failure::Config)?;
    if config.experiment.name() != name {
        return Err(Failure::Config(Error::InvalidParameter(format!(
            "{} holds a {} config, not {name}",
            flags.config.display(),
            config.experiment.name()
        ))));
    }
    if let Some(seed) = flags.seed {
        config.seed = seed;
    }
    if let Some(out) = flags.out {
        config.out = Some(out);
    }
    let report = run(config, flags.jobs)?;
    for line in &report.lines {
        println!("{line}");
    }
    eprintln!("wrote {}", report.dir.display());
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pml: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
