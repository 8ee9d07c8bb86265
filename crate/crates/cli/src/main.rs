use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use phononflux::config::{self, RawConfig};
use phononflux::{presets, write_tables, CliError, ScenarioConfig};

#[derive(Parser)]
#[command(name = "phononflux", version, about = "Steady-state heat flow in oscillator arrays sharing a cavity mode")]
struct Cli {
    /// Output path prefix; tables go to <prefix>_<table>.csv
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON scenario file
    Run { config: PathBuf },
    /// Run a built-in scenario
    Preset {
        #[command(subcommand)]
        preset: Preset,
    },
    /// Cross-check closed forms against the numerical solvers
    Selfcheck,
}

#[derive(Subcommand)]
enum Preset {
    /// Heat-flow maps over (Λ/γ, γ̄/γ) for two oscillators
    Fig2 {
        #[arg(long, default_value_t = 10, value_parser = parse_ratio)]
        ratio: u32,
    },
    /// Flow profile and size scaling of transmissive arrays
    Fig3,
}

fn parse_ratio(s: &str) -> Result<u32, String> {
    match s.parse::<u32>() {
        Ok(r) if presets::FIG2_RATIOS.contains(&r) => Ok(r),
        _ => Err(format!("ratio must be one of {:?}", presets::FIG2_RATIOS)),
    }
}

fn load(cli: &Cli) -> Result<(ScenarioConfig, &'static str), CliError> {
    let (raw, default_prefix): (RawConfig, &str) = match &cli.command {
        Command::Run { config } => {
            let text = fs::read(config).map_err(|source| CliError::Io {
                context: format!("reading {}", config.display()),
                source,
            })?;
            return Ok((config::parse_config(&text)?, "phononflux"));
        }
        Command::Preset { preset: Preset::Fig2 { ratio } } => {
            (presets::fig2(*ratio), if *ratio == 2 { "fig2_ratio2" } else { "fig2_ratio10" })
        }
        Command::Preset { preset: Preset::Fig3 } => (presets::fig3(), "fig3"),
        Command::Selfcheck => (presets::selfcheck(), "selfcheck"),
    };
    Ok((config::validate(raw)?, default_prefix))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads == Some(0) {
        eprintln!("error: --threads must be >= 1");
        return ExitCode::from(1);
    }
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(cli: &Cli) -> Result<u8, CliError> {
    let (cfg, default_prefix) = load(cli)?;
    let output = phononflux::run_with_threads(&cfg, cli.threads)?;

    if cfg.task == config::Task::Selfcheck {
        for t in &output.tables {
            for row in &t.rows {
                let criterion = row[0] as u8;
                let status = if row[1] == 1.0 { "PASS" } else { "FAIL" };
                let detail = t.meta.get(&format!("criterion_{criterion}")).and_then(|v| v.as_str()).unwrap_or("");
                println!("{status} criterion {criterion}: {detail}");
            }
        }
    }

    let prefix = cli
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(default_prefix));
    for path in write_tables(&output.tables, &prefix)? {
        eprintln!("wrote {}", path.display());
    }

    if output.failures.is_empty() {
        Ok(0)
    } else {
        eprintln!("self-check failed: {}", output.failures.join(", "));
        Ok(3)
    }
}
