use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pmurel_cli::commands;
use pmurel_cli::config::{InteractionModel, RunConfig};
use pmurel_cli::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "pmurel", version, about = "PMU reliability and availability toolkit")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// JSON run configuration; built-in defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed for the simulation (overrides `simulation.seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Validate the configuration and exit without writing anything.
    #[arg(long, global = true)]
    dry_run: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Alpha-cut bands of availability, unavailability and the two rates.
    Fuzzy,
    /// Hardware, software, interaction and composite reliability curves.
    Curve {
        #[arg(long, value_enum)]
        interaction: Option<InteractionModel>,
    },
    /// Transient state probabilities of the unified Markov model.
    Markov {
        /// Transition rate, e.g. `UP->HD3=8.92e-4`. Replaces the configured rates.
        #[arg(long = "rate", value_name = "NAME=VALUE")]
        rates: Vec<String>,
    },
    /// Monte Carlo simulation of the two-state failure/repair process.
    Simulate {
        #[arg(long)]
        replications: Option<usize>,
        #[arg(long)]
        mission_time: Option<f64>,
        #[arg(long)]
        intervals: Option<usize>,
    },
    /// Least-squares fit of the interaction rates to an exposure table.
    Fit {
        #[arg(long)]
        g: Option<f64>,
        /// Comma-separated list of G values.
        #[arg(long, value_delimiter = ',')]
        g_grid: Option<Vec<f64>>,
        /// `interval,X_i,T_i` file; defaults to `<out>/exposure.csv`.
        #[arg(long)]
        exposure: Option<PathBuf>,
    },
    /// fuzzy, simulate, fit, curve and markov in sequence, plus `report.txt`.
    Pipeline,
}

fn parse_rate(arg: &str) -> Result<(String, f64), CliError> {
    let (name, value) = arg
        .rsplit_once('=')
        .ok_or_else(|| CliError::Config(format!("--rate `{arg}`: expected NAME=VALUE")))?;
    let value = value
        .trim()
        .parse()
        .map_err(|e| CliError::Config(format!("--rate `{arg}`: {e}")))?;
    Ok((name.trim().to_string(), value))
}

fn apply_overrides(cfg: &mut RunConfig, global: &Global, command: &Command) -> Result<(), CliError> {
    if let Some(out) = &global.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = global.seed {
        cfg.simulation.seed = seed;
    }
    match command {
        Command::Curve { interaction: Some(m) } => cfg.curve.interaction = *m,
        Command::Markov { rates } if !rates.is_empty() => {
            cfg.markov.rates = rates.iter().map(|r| parse_rate(r)).collect::<Result<_, _>>()?;
        }
        Command::Simulate {
            replications,
            mission_time,
            intervals,
        } => {
            if let Some(n) = replications {
                cfg.simulation.replications = *n;
            }
            if let Some(t) = mission_time {
                cfg.simulation.mission_time = *t;
            }
            if let Some(k) = intervals {
                cfg.simulation.intervals = *k;
            }
        }
        Command::Fit { g, g_grid, exposure } => {
            if let Some(g) = g {
                cfg.fit.g = *g;
            }
            if let Some(grid) = g_grid {
                cfg.fit.g_grid = Some(grid.clone());
            }
            if let Some(path) = exposure {
                cfg.fit.exposure = Some(path.clone());
            }
        }
        _ => {}
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    apply_overrides(&mut cfg, &cli.global, &cli.command)?;
    cfg.validate()?;
    let out: &Path = &cfg.output_dir;
    let exposure = cfg
        .fit
        .exposure
        .clone()
        .unwrap_or_else(|| out.join("exposure.csv"));

    if cli.global.dry_run {
        if matches!(cli.command, Command::Fit { .. }) && !exposure.is_file() {
            return Err(CliError::io(&exposure, "file not found"));
        }
        println!("configuration ok");
        return Ok(());
    }

    match &cli.command {
        Command::Fuzzy => {
            let r = commands::cmd_fuzzy(&cfg, out)?;
            println!(
                "failure rate {:.6}, repair rate {:.6}, availability {:.6}",
                r.failure_rate, r.repair_rate, r.availability
            );
        }
        Command::Curve { .. } => {
            let rows = commands::cmd_curve(&cfg, out)?;
            println!("{} curve points written", rows.len());
        }
        Command::Markov { .. } => {
            let n = commands::cmd_markov(&cfg, out)?;
            println!("{n} time points written");
        }
        Command::Simulate { .. } => {
            let s = commands::cmd_simulate(&cfg, out)?;
            println!(
                "availability {:.6} +/- {:.6}, mean failures {:.4} +/- {:.4}",
                s.availability, s.availability_std_error, s.mean_failures, s.failures_std_error
            );
        }
        Command::Fit { .. } => {
            for f in commands::cmd_fit(&cfg, out, &exposure)? {
                println!(
                    "G={} lambda1={:e} lambda2={:e} sse={:e}",
                    f.g, f.lambda1, f.lambda2, f.sse
                );
            }
        }
        Command::Pipeline => print!("{}", commands::cmd_pipeline(&cfg, out)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
