use std::fs;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use falsify_cli::config::ExperimentConfig;
use falsify_cli::scenarios::{self, Action, Overrides, RunError};

/// Exact falsifiability measures and theorem sweeps on finite instances.
#[derive(Parser)]
#[command(name = "falsify", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the measures for one configured instance.
    Measure(RunArgs),
    /// Run a theorem-verification sweep.
    Verify(RunArgs),
    /// Solve the exact n-round prediction game.
    Game(RunArgs),
    /// Tabulate the induction chain over a string corpus.
    Sol(RunArgs),
    /// Print the execution plan for a config without running it.
    Describe(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the TOML experiment configuration.
    config: PathBuf,
    /// Override the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the run's CSV table to this file.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Raise a sweep ceiling; refused without --unsafe.
    #[arg(long = "ceiling-override", value_name = "LIMIT")]
    ceiling_override: Option<usize>,
    /// Acknowledge that overridden ceilings can make runs very slow.
    #[arg(long = "unsafe")]
    unsafe_ok: bool,
}

const EXIT_USAGE: i32 = 2;

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Measure(args) => run_action(Action::Measure, &args),
        Command::Verify(args) => run_action(Action::Verify, &args),
        Command::Game(args) => run_action(Action::Game, &args),
        Command::Sol(args) => run_action(Action::Sol, &args),
        Command::Describe(args) => describe(&args),
    };
    std::process::exit(code);
}

fn load(args: &RunArgs) -> Result<(ExperimentConfig, Overrides), String> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| format!("cannot read {}: {e}", args.config.display()))?;
    let mut config = ExperimentConfig::parse(&text).map_err(|e| e.to_string())?;
    if let Some(seed) = args.seed {
        config.seed = Some(seed);
    }
    if args.ceiling_override.is_some() && !args.unsafe_ok {
        return Err("--ceiling-override is refused without --unsafe".to_string());
    }
    Ok((
        config,
        Overrides {
            ceiling: args.ceiling_override,
        },
    ))
}

fn run_action(action: Action, args: &RunArgs) -> i32 {
    let (config, overrides) = match load(args) {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let started = Instant::now();
    match scenarios::run(action, &config, &overrides) {
        Ok(report) => {
            let timestamp = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            let rendered = report.render(started.elapsed().as_millis(), timestamp);
            print!("{rendered}");
            if let Some(path) = &args.out {
                if let Err(e) = fs::write(path, &rendered) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return EXIT_USAGE;
                }
            }
            if let Some(path) = &args.csv {
                let Some(table) = &report.csv else {
                    eprintln!("error: this run produces no CSV table");
                    return EXIT_USAGE;
                };
                if let Err(e) = fs::write(path, table.render()) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return EXIT_USAGE;
                }
            }
            report.exit_code()
        }
        Err(RunError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(RunError::Core(e)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn describe(args: &RunArgs) -> i32 {
    let (config, overrides) = match load(args) {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    match scenarios::describe(&config, &overrides) {
        Ok(plan) => {
            print!("{plan}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
