//! `plasmon-design`: sweeps and figure datasets for emitter / plasmon /
//! fiber single-photon sources.
//!
//! Worker threads follow `RAYON_NUM_THREADS`.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use plasmon_core::design::{
    cmd_dispersion, cmd_efficiency, cmd_error_curves, cmd_fiber, cmd_rates, cmd_reproduce, Figure, Report,
    RunConfig,
};

#[derive(Parser, Debug)]
#[command(name = "plasmon-design", version, about = "Design datasets for plasmonic single-photon sources")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML run configuration
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// output directory (overrides the config)
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// also write a single JSON document with every curve
    #[arg(long, global = true)]
    json: bool,
    /// count only one plasmon direction as collectable
    #[arg(long, global = true)]
    single_sided: bool,
    /// seeds per axis of the tip (d, v) search grid
    #[arg(long, global = true, value_name = "N")]
    seed_grid: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Plasmon dispersion over the k0R grid
    Dispersion,
    /// Decay channels of a radial dipole at one point
    Rates {
        #[arg(long)]
        k0r: f64,
        #[arg(long)]
        k0d: f64,
    },
    /// Non-plasmon error for wire and tip
    ErrorCurves,
    /// Single-photon efficiency P(R) for wire and tip
    Efficiency,
    /// HE11 index of the out-coupling fiber over the k0a grid
    Fiber,
    /// Figure dataset: fig2a, fig2b or fig3b
    Reproduce {
        #[arg(value_parser = parse_figure)]
        figure: Figure,
    },
}

fn parse_figure(s: &str) -> Result<Figure, String> {
    s.parse().map_err(|e: plasmon_core::Error| e.to_string())
}

fn resolve_config(c: &Common) -> anyhow::Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => RunConfig::default(),
    };
    if let Some(dir) = &c.out {
        cfg.output.dir = dir.clone();
    }
    if c.json {
        cfg.output.json = true;
    }
    if c.single_sided {
        cfg.output.single_sided = true;
    }
    if let Some(n) = c.seed_grid {
        cfg.solver.seed_grid = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    let cfg = resolve_config(&cli.common)?;
    let report = match &cli.command {
        Command::Dispersion => cmd_dispersion(&cfg)?,
        Command::Rates { k0r, k0d } => cmd_rates(&cfg, *k0r, *k0d)?,
        Command::ErrorCurves => cmd_error_curves(&cfg)?,
        Command::Efficiency => cmd_efficiency(&cfg)?,
        Command::Fiber => cmd_fiber(&cfg)?,
        Command::Reproduce { figure } => cmd_reproduce(&cfg, *figure)?,
    };
    let files = report.write(&cfg.output.dir, cfg.output.csv, cfg.output.json)?;
    for f in files {
        println!("{}", f.display());
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) if report.row_errors() == 0 => ExitCode::SUCCESS,
        Ok(report) => {
            eprintln!("{}", report.error_summary());
            ExitCode::from(3)
        }
        Err(e) => {
            let summary = serde_json::json!({ "error": format!("{e:#}") });
            eprintln!("{summary}");
            ExitCode::from(2)
        }
    }
}
