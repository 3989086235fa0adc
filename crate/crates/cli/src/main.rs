use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracwos_cli::{commands, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "fracwos", version, about = "Walk-on-spheres solver for the fractional Poisson equation")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides `walk.seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    #[arg(long)]
    config: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the solution at the configured points.
    Solve(ConfigArg),
    /// Error against the exact solution over a ladder of path counts.
    Convergence(ConfigArg),
    /// Mean number of jumps per walk at each point and order.
    Steps(ConfigArg),
    /// Solution values on a grid, including exterior data.
    Field(ConfigArg),
    /// Print kernel constants and the step bound.
    Constants {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
}

fn load(arg: &ConfigArg, seed: Option<u64>) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::from_path(&arg.config)?;
    if let Some(s) = seed {
        cfg.walk.seed = s;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let written = match &cli.command {
        Command::Solve(c) => commands::solve(&load(c, cli.seed)?)?,
        Command::Convergence(c) => commands::convergence(&load(c, cli.seed)?)?,
        Command::Steps(c) => commands::steps(&load(c, cli.seed)?)?,
        Command::Field(c) => commands::field(&load(c, cli.seed)?)?,
        Command::Constants { n, alpha, epsilon, radius } => {
            let v = commands::constants(*n, *alpha, *epsilon, *radius)?;
            println!("{}", serde_json::to_string_pretty(&v).expect("JSON values always serialize"));
            Vec::new()
        }
    };
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fracwos: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
