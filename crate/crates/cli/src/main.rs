#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod settings;

use config::ConfigFile;

#[derive(Parser, Debug)]
#[command(
    name = "hardy",
    version,
    about = "Numerical checks of refined Hardy inequalities on convex domains"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

/// Flags shared by every subcommand. Values given here override the config file.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// key = value file with optional [section] headers named after subcommands
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// report file; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// json | csv
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// worker threads; 0 picks the number of cores
    #[arg(long, global = true)]
    pub jobs: Option<String>,
    /// ball:<R> | box:<a>[x<b>...] | poly:<file>, several separated by ';'
    #[arg(long, global = true)]
    pub domain: Option<String>,
    /// dimensions, e.g. 2..5 (inclusive) or 2,3
    #[arg(long = "N", global = true)]
    pub n: Option<String>,
    /// comma-separated exponents
    #[arg(long, global = true)]
    pub p: Option<String>,
    /// comma-separated tower depths or a range
    #[arg(long, global = true)]
    pub k: Option<String>,
    /// comma-separated multiples of the threshold D0
    #[arg(long = "bigD-mult", global = true)]
    pub big_d_mult: Option<String>,
    /// resolution; its meaning depends on the subcommand
    #[arg(long, global = true)]
    pub grid: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Table of a_N, k_p, K_p, a(p,k), mu_2 and D0
    Constants,
    /// Grid checks of the auxiliary functions and their Taylor expansions
    LemmaCheck {
        /// half-width b of the one-dimensional interval; defaults to diam/2
        #[arg(long)]
        b: Option<String>,
    },
    /// Refined inequality over the domain x N x p x k x D matrix
    Verify {
        /// hi | l | t: run a classical inequality instead
        #[arg(long)]
        which: Option<String>,
        /// level-set | pointwise
        #[arg(long)]
        quad: Option<String>,
    },
    /// Mean-distance lemma, b-mean bound, volume identity and min-ratio identity
    GeometryCheck {
        /// interior points per domain
        #[arg(long)]
        points: Option<String>,
        /// mc | grid
        #[arg(long)]
        sphere: Option<String>,
    },
    /// Radial eigenvalue estimates and the u_eps family in three dimensions
    BestConstant,
    /// Quotients of the boundary-concentrating family against the critical weight
    ProbeSharpness {
        /// comma-separated exponents on the last tower factor
        #[arg(long)]
        gamma: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match &cli.common.config {
        Some(path) => match ConfigFile::read(path) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("error: config: {e}");
                return ExitCode::from(2);
            }
        },
        None => ConfigFile::default(),
    };
    let unknown = file.unknown_keys(commands::KNOWN_KEYS);
    if !unknown.is_empty() {
        eprintln!("error: config: unknown keys {}", unknown.join(", "));
        return ExitCode::from(2);
    }
    let result = match &cli.cmd {
        Cmd::Constants => commands::Ctx::new("constants", file, cli.common.clone()).and_then(|c| c.constants()),
        Cmd::LemmaCheck { b } => {
            commands::Ctx::new("lemma-check", file, cli.common.clone()).and_then(|c| c.lemma_check(b.clone()))
        }
        Cmd::Verify { which, quad } => {
            commands::Ctx::new("verify", file, cli.common.clone()).and_then(|c| c.verify(which.clone(), quad.clone()))
        }
        Cmd::GeometryCheck { points, sphere } => commands::Ctx::new("geometry-check", file, cli.common.clone())
            .and_then(|c| c.geometry_check(points.clone(), sphere.clone())),
        Cmd::BestConstant => {
            commands::Ctx::new("best-constant", file, cli.common.clone()).and_then(|c| c.best_constant())
        }
        Cmd::ProbeSharpness { gamma } => commands::Ctx::new("probe-sharpness", file, cli.common.clone())
            .and_then(|c| c.probe_sharpness(gamma.clone())),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
