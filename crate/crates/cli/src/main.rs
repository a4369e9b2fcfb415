use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sensefuse_cli::config::{load_config, parse_config, EpsilonRange, TABLE1_CFG};
use sensefuse_cli::{cmd_oracle, cmd_solve, cmd_sweep, cmd_validate, CliError, Settings};

/// Joint weight and threshold design for cooperative wideband sensing.
#[derive(Parser)]
#[command(name = "sensefuse", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the joint design and the single-radio baselines at one budget.
    Solve(Common),
    /// Sweep the interference budget and tabulate every variant.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Budgets as lo:hi:steps (inclusive, evenly spaced).
        #[arg(long, value_parser = parse_range)]
        epsilon_range: Option<EpsilonRange>,
    },
    /// Compare analytic and simulated detection rates of the joint design.
    Validate(Common),
    /// Grid-search a tiny instance and compare with the solver.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Grid points per variable.
        #[arg(long, default_value_t = 2000)]
        resolution: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Plot,
}

#[derive(Args)]
struct Common {
    /// Configuration file; defaults to the bundled eight-band instance.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Interference budget (overrides the configuration).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Monte Carlo frames per hypothesis.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; results go to standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `plot` also writes a matplotlib script next to the CSV.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Use the literal constant forms of the convex constraints.
    #[arg(long)]
    paper_compat: bool,
}

fn parse_range(text: &str) -> Result<EpsilonRange, String> {
    text.parse()
}

fn settings(c: &Common) -> Result<Settings, CliError> {
    let mut config = match &c.config {
        Some(path) => load_config(path)?,
        None => parse_config(TABLE1_CFG)?,
    };
    if let Some(e) = c.epsilon {
        if !(e.is_finite() && e > 0.0) {
            return Err(CliError::Config(vec![format!(
                "--epsilon must be positive, got {e}"
            )]));
        }
        config.run.epsilon = e;
    }
    if let Some(t) = c.trials {
        if t == 0 {
            return Err(CliError::Config(vec!["--trials must be at least 1".into()]));
        }
        config.run.trials = t;
    }
    if let Some(s) = c.seed {
        config.run.seed = s;
    }
    config.run.paper_compat |= c.paper_compat;
    Ok(Settings {
        config,
        out: c.out.clone(),
        plot: matches!(c.format, Format::Plot),
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Solve(c) => cmd_solve(&settings(&c)?, &mut stdout),
        Command::Sweep {
            common,
            epsilon_range,
        } => cmd_sweep(&settings(&common)?, epsilon_range, &mut stdout),
        Command::Validate(c) => cmd_validate(&settings(&c)?, &mut stdout),
        Command::Oracle { common, resolution } => {
            cmd_oracle(&settings(&common)?, resolution, &mut stdout)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
