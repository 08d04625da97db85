use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

mod commands;
mod config;
mod output;

use output::{json_text, num, write_atomic, Report};

#[derive(Parser)]
#[command(name = "semidirect", version, about = "Experiments on the metric Lie groups R^2 x|_A R")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Trace, H0, unimodularity, C1 and frames at sample points.
    GroupInfo(Common),
    /// Integrate a unit-speed geodesic and write it as CSV.
    Geodesic(Common),
    /// Mesh generation.
    Mesh {
        #[command(subcommand)]
        command: MeshCommand,
    },
    /// Minimize Area + 2 H0 Volume over an annulus in the slab.
    Minimize(Common),
    /// Fuzz the subharmonicity lemma on jets, or check it on a mesh.
    VerifyLemma(Common),
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Structured annulus between two horizontal circles.
    MakeAnnulus(Common),
}

fn run(cmd: Command) -> Result<(&'static str, Report, PathBuf)> {
    let (name, common) = match &cmd {
        Command::GroupInfo(c) => ("group-info", c),
        Command::Geodesic(c) => ("geodesic", c),
        Command::Mesh { command: MeshCommand::MakeAnnulus(c) } => ("mesh make-annulus", c),
        Command::Minimize(c) => ("minimize", c),
        Command::VerifyLemma(c) => ("verify-lemma", c),
    };
    let out = common.out.clone();
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let path = common.config.as_path();
    let report = match &cmd {
        Command::GroupInfo(_) => {
            let mut cfg: config::GroupInfoConfig = config::load(path)?;
            cfg.seed = common.seed.or(cfg.seed);
            commands::group_info(&cfg, &out)?
        }
        Command::Geodesic(_) => {
            let mut cfg: config::GeodesicConfig = config::load(path)?;
            cfg.seed = common.seed.or(cfg.seed);
            commands::geodesic(&cfg, &out)?
        }
        Command::Mesh { .. } => {
            let mut cfg: config::MeshConfig = config::load(path)?;
            cfg.seed = common.seed.or(cfg.seed);
            commands::make_annulus(&cfg, &out)?
        }
        Command::Minimize(_) => {
            let mut cfg: config::MinimizeConfig = config::load(path)?;
            cfg.seed = common.seed.unwrap_or(cfg.seed);
            commands::run_minimize(&cfg, &out)?
        }
        Command::VerifyLemma(_) => {
            let mut cfg: config::VerifyLemmaConfig = config::load(path)?;
            cfg.seed = common.seed.unwrap_or(cfg.seed);
            let dir = path.parent().unwrap_or(Path::new("."));
            commands::verify_lemma(&cfg, dir, &out)?
        }
    };
    Ok((name, report, out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (name, report, out) = match run(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    for (c, asserted) in report.checks() {
        let status = match (c.passed, asserted) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "NOTE",
        };
        println!("{status} {}: {} (tolerance {})", c.name, output::num(c.value), output::num(c.tolerance));
    }
    // wall-clock time lives in a sidecar so the report stays byte-stable
    let timing = json!({"command": name, "wall_clock_seconds": num(start.elapsed().as_secs_f64())});
    if let Err(e) = json_text(&timing).and_then(|t| write_atomic(&out, "timing.json", t.as_bytes())) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
