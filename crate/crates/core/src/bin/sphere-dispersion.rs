use clap::{Parser, Subcommand};
use sphere_dispersion::cli::{cmd_arcs, cmd_kernel, cmd_scan, cmd_space_info, RunConfig, KEYS};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "sphere-dispersion", version, about = "Mollified Schrödinger kernels on products of odd spheres")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Settings {
    /// key=value config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides as `key=value` or `--key value`
    #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample K_N(t, ·) and write per-factor CSVs with a JSON header
    Kernel(Settings),
    /// Run a scaling scan selected by mode=decay|corner|kappa|strichartz|threshold
    Scan(Settings),
    /// List major arcs around the Farey fractions of order Q
    Arcs(Settings),
    /// Print dimensions, thresholds, period and low eigenvalues
    SpaceInfo(Settings),
}

fn load(s: &Settings) -> sphere_dispersion::Result<RunConfig> {
    let mut cfg = match &s.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    cfg.apply_overrides(&s.overrides)?;
    Ok(cfg)
}

fn run(cli: Cli) -> sphere_dispersion::Result<bool> {
    match cli.command {
        Command::Kernel(s) => {
            for p in cmd_kernel(&load(&s)?)? {
                println!("{}", p.display());
            }
            Ok(true)
        }
        Command::Scan(s) => {
            let outcome = cmd_scan(&load(&s)?)?;
            for p in &outcome.paths {
                println!("{}", p.display());
            }
            println!("verdict: {}", if outcome.passed { "pass" } else { "fail" });
            Ok(outcome.passed)
        }
        Command::Arcs(s) => {
            let (report, path) = cmd_arcs(&load(&s)?)?;
            println!("{} arcs -> {}", report.arcs.len(), path.display());
            Ok(true)
        }
        Command::SpaceInfo(s) => {
            let (info, _) = cmd_space_info(&load(&s)?)?;
            println!("{}", serde_json::to_string_pretty(&info)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, sphere_dispersion::Error::Config { .. }) {
                eprintln!("known keys: {}", KEYS.join(", "));
            }
            ExitCode::from(2)
        }
    }
}
