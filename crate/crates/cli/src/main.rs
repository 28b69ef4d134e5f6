//! `satake`: JSON front end for satake-core.

mod building;
mod cache;
mod commands;
mod config;
mod json;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::RunConfig;

/// Bad input from the user: exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser, Debug)]
#[command(name = "satake", version, about = "Wonderful compactifications, compactified apartments and lattice buildings")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct GlobalArgs {
    /// JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Directory for cached BFS layers.
    #[arg(long, global = true, env = "SATAKE_CACHE_DIR", value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Base of the multiplicative coordinates (default 2).
    #[arg(long, global = true)]
    pub q: Option<String>,
    #[arg(long, global = true)]
    pub p: Option<i64>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub radius: Option<usize>,
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Run BFS frontiers sequentially.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Root data, lambda_tau table, opposition and star-orbits.
    Roots {
        /// Root system such as A2, B3, D4, G2.
        spec: Option<String>,
        /// Galois generator: swap, triality, neg or a JSON file holding an integer matrix.
        #[arg(long)]
        star: Vec<String>,
    },
    /// Boundary orbits of the wonderful compactification and rational orbits for a Tits index.
    Wonderful {
        spec: Option<String>,
        #[arg(long)]
        star: Vec<String>,
        /// Anisotropic nodes, comma separated, or `all`.
        #[arg(long)]
        anisotropic: Option<String>,
        /// JSON Tits index file: {"root_system", "star", "anisotropic"}.
        #[arg(long, value_name = "FILE")]
        tits_index: Option<PathBuf>,
    },
    /// Fixed-point pipeline in a compactified apartment.
    Apartment {
        /// Pipeline input file.
        input: PathBuf,
    },
    /// Big-cell seminorm evaluations and separation witnesses.
    Theta {
        /// Polynomials and points in one file, or polynomials only when --points is given.
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        points: Option<PathBuf>,
    },
    /// Lattice model of the SL_n building over Q_p(sqrt p).
    Building {
        #[command(subcommand)]
        verb: BuildingVerb,
    },
}

#[derive(Subcommand, Debug)]
pub enum BuildingVerb {
    /// Galois-fixed vertices outside the image of the base building.
    Barbs {
        /// Cap on the distance search from a barb to the image.
        #[arg(long)]
        distance_cap: Option<usize>,
    },
    /// Flow of a vertex under a diagonal cocharacter.
    Flow {
        /// Start at the barb class with columns (w^-1 e1 + e3, e2, w e3) and lambda (1,-2,1).
        #[arg(long)]
        example17: bool,
        /// Diagonal exponents summing to zero, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Start vertex as rows separated by `;`, entries like `1/2+w`.
        #[arg(long)]
        start: Option<String>,
    },
    /// Graph distance and elementary divisors between two vertices.
    Distance {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Give up the BFS beyond this distance (default --radius or 6).
        #[arg(long)]
        cap: Option<usize>,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() || cause.downcast_ref::<serde_json::Error>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<satake_core::Error>() {
            return match e {
                satake_core::Error::Precision(_) => 1,
                _ => 2,
            };
        }
    }
    1
}

fn run(cli: Cli) -> Result<()> {
    let cfg = RunConfig::resolve(&cli.global)?;
    let report = match &cli.command {
        Command::Roots { spec, star } => commands::roots(&cfg, spec.as_deref(), star)?,
        Command::Wonderful { spec, star, anisotropic, tits_index } => {
            commands::wonderful(&cfg, spec.as_deref(), star, anisotropic.as_deref(), tits_index.as_deref())?
        }
        Command::Apartment { input } => commands::apartment(&cfg, input)?,
        Command::Theta { input, points } => commands::theta(&cfg, input, points.as_deref())?,
        Command::Building { verb } => building::run(&cfg, verb)?,
    };
    let mut text = serde_json::to_string_pretty(&report).context("serializing report")?;
    text.push('\n');
    match &cfg.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
