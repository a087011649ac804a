//! `spindle`: command-line drivers for spindle convexity and ball-polyhedra.
//!
//! Exit codes: 0 when every asserted property holds, 1 when one fails (the
//! report names it), 2 on input errors.

mod commands;
mod report;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, ValueEnum};
use serde_json::json;
use spindle_core::scene::Scene;
use spindle_core::Tolerance;

use commands::{CmdError, Options};
use report::{write_atomic, Assertion, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    Hull2d,
    Bp3Structure,
    EulerCheck,
    Standardness,
    Dowker,
    Extremal,
    Maehara,
    Titeica,
    KneserPoulsen,
    Illuminate,
    Separate,
    Kirchberger,
    EsSearch,
}

#[derive(Debug, Parser)]
#[command(name = "spindle", version, about = "Spindle convexity and ball-polyhedra experiments")]
struct Cli {
    /// Subcommand to run.
    #[arg(value_enum)]
    command: Command,
    /// JSON scene file.
    scene: Option<PathBuf>,
    /// Seed for randomized experiments.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Geometric predicate tolerance (eps_geom).
    #[arg(long)]
    eps: Option<f64>,
    /// Write an SVG figure (planar scenes).
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Number of random trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Dimension (maehara).
    #[arg(long)]
    dim: Option<usize>,
    /// Radius of the reference circle (dowker, extremal).
    #[arg(long)]
    r: Option<f64>,
    /// Single value or inclusive range `a..b`.
    #[arg(long)]
    n: Option<String>,
    /// Family and quantity, e.g. `inscribed-perimeter`, or `all`.
    #[arg(long)]
    setting: Option<String>,
}

fn command_name(c: Command) -> String {
    c.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn load_scene(path: &PathBuf) -> Result<Scene> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Scene::from_json(&text).with_context(|| format!("invalid scene {}", path.display()))
}

fn options(cli: &Cli) -> Result<Options> {
    let tol = match cli.eps {
        Some(e) => Tolerance::with_geom(e)?,
        None => Tolerance::default(),
    };
    let n = cli.n.as_deref().map(commands::parse_range).transpose().context("--n")?;
    Ok(Options {
        seed: cli.seed,
        tol,
        trials: cli.trials,
        dim: cli.dim,
        r: cli.r,
        n,
        setting: cli.setting.clone(),
    })
}

fn run(cli: &Cli) -> std::result::Result<ExitCode, CmdError> {
    let scene = cli.scene.as_ref().map(load_scene).transpose()?;
    let o = options(cli)?;
    let s = scene.as_ref();
    let outcome = match cli.command {
        Command::Hull2d => commands::hull2d(s, &o),
        Command::Bp3Structure => commands::bp3_structure(s, &o),
        Command::EulerCheck => commands::euler_check(s, &o),
        Command::Standardness => commands::standardness(s, &o),
        Command::Dowker => commands::dowker(&o),
        Command::Extremal => commands::extremal(&o),
        Command::Maehara => commands::maehara(&o),
        Command::Titeica => commands::titeica(s, &o),
        Command::KneserPoulsen => commands::kneser_poulsen(s, &o),
        Command::Illuminate => commands::illuminate(s, &o),
        Command::Separate => commands::separate(s, &o),
        Command::Kirchberger => commands::kirchberger(s, &o),
        Command::EsSearch => commands::es(s, &o),
    };
    let outcome = match outcome {
        Ok(out) => out,
        Err(CmdError::Alarm(msg)) => commands::Outcome {
            results: json!(null),
            assertions: vec![Assertion::new("no implementation alarm", false, msg)],
            figure: None,
        },
        Err(e) => return Err(e),
    };
    if cli.svg.is_some() && outcome.figure.is_none() {
        return Err(CmdError::Input(anyhow::anyhow!(
            "{} does not draw a figure for this input",
            command_name(cli.command)
        )));
    }
    let report = Report {
        command: command_name(cli.command),
        inputs: json!({
            "scene": scene,
            "flags": {
                "seed": o.seed, "eps": o.tol.eps_geom, "trials": o.trials, "dim": o.dim,
                "r": o.r, "n": o.n.map(|(a, b)| [a, b]), "setting": o.setting,
            },
        }),
        results: outcome.results,
        assertions: outcome.assertions,
    };
    match &cli.report {
        Some(path) => write_atomic(path, &report.to_json())?,
        None => println!("{}", report.to_json()),
    }
    if let (Some(path), Some(fig)) = (&cli.svg, &outcome.figure) {
        write_atomic(path, &fig.render())?;
    }
    for a in report.assertions.iter().filter(|a| !a.holds) {
        eprintln!("violated: {} ({})", a.name, a.details);
    }
    Ok(if report.all_hold() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(CmdError::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(CmdError::Alarm(msg)) => {
            eprintln!("alarm: {msg}");
            ExitCode::from(1)
        }
    }
}
