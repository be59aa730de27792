use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use graphtori::commands::{self, Output};
use graphtori::config::{check_grid, check_xi, parse_indices, parse_sweep_kind};
use graphtori::format::Table;
use graphtori::{load_config, verify, RunConfig};

#[derive(Parser)]
#[command(name = "graphtori", version, about = "Numerical lab for graphical 3-tori")]
struct Cli {
    /// Run configuration (`key = value` lines)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the machine-readable table here instead of stdout
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Grid resolution N, overriding the config
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Threshold parameter ξ, overriding the config
    #[arg(long, global = true)]
    xi: Option<f64>,
    /// Suppress the human-readable summary
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice quantities of the flat torus
    Torus {
        #[command(subcommand)]
        action: TorusAction,
    },
    /// Curvature, excess and volume of the graph
    Field {
        #[command(subcommand)]
        action: FieldAction,
    },
    /// Per-height level-set profile
    Levelset {
        #[command(subcommand)]
        action: LevelsetAction,
    },
    /// Threshold height, comparison equation, volume and fill bounds
    Stability {
        #[command(subcommand)]
        action: StabilityAction,
    },
    /// Run a field family over a range of indices
    Sweep {
        /// `radial_well` or `collapsing`
        #[arg(long)]
        family: Option<String>,
        /// Indices as `a..b` or a comma list
        #[arg(long)]
        indices: Option<String>,
        /// Directory for two-column plot files
        #[arg(long)]
        plot_dir: Option<PathBuf>,
    },
    /// Run every invariant check; exit status 1 on any failure
    Verify,
}

#[derive(Subcommand)]
enum TorusAction {
    Info,
}

#[derive(Subcommand)]
enum FieldAction {
    Analyze,
}

#[derive(Subcommand)]
enum LevelsetAction {
    Profile,
}

#[derive(Subcommand)]
enum StabilityAction {
    Report,
}

fn build_config(cli: &Cli) -> Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.grid {
        config.grid = check_grid(n)?;
    }
    if let Some(xi) = cli.xi {
        config.xi = check_xi(xi)?;
    }
    if let Command::Sweep { family, indices, plot_dir } = &cli.command {
        if let Some(f) = family {
            config.sweep.kind = parse_sweep_kind(f)?;
        }
        if let Some(s) = indices {
            config.sweep.indices = parse_indices(s)?;
        }
        if plot_dir.is_some() {
            config.plot_dir = plot_dir.clone();
        }
    }
    Ok(config)
}

fn emit(cli: &Cli, summary: &[String], table: &Table) -> Result<()> {
    match &cli.csv {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            table.write_csv(file)?;
        }
        None => table.write_csv(io::stdout().lock())?,
    }
    if !cli.quiet {
        let mut err = io::stderr().lock();
        for line in summary {
            writeln!(err, "{line}")?;
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    let config = build_config(cli)?;
    let output = match &cli.command {
        Command::Torus { action: TorusAction::Info } => commands::torus_info(&config)?,
        Command::Field { action: FieldAction::Analyze } => commands::field_analyze(&config)?,
        Command::Levelset { action: LevelsetAction::Profile } => commands::levelset_profile(&config)?,
        Command::Stability { action: StabilityAction::Report } => commands::stability_report(&config)?,
        Command::Sweep { .. } => commands::sweep(&config)?,
        Command::Verify => {
            let report = verify(&config)?;
            emit(cli, &report.summary(), &report.table())?;
            return Ok(report.passes());
        }
    };
    let Output { summary, table } = output;
    emit(cli, &summary, &table)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
