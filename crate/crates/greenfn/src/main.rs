//! Thin command-line wrapper; all logic lives in the library's `cli`
//! module.

use clap::{Args, Parser, Subcommand};
use greenfn::cli::{self, Command};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "greenfn",
    about = "Green's functions of two-point boundary value problems: \
             build kernels, verify linking identities, sweep the parameter line",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Integrator tolerance (overrides the config).
    #[arg(long)]
    tol: Option<f64>,
    /// Worker threads for grid and parameter loops.
    #[arg(long)]
    threads: Option<usize>,
    /// Emit SVG plots.
    #[arg(long)]
    svg: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the kernel and report solvability, jump and boundary checks,
    /// sign classification, and the envelope witness.
    Build(Common),
    /// Check all eight linking and cross identities over a grid.
    Verify(Common),
    /// Classify kernel signs over a parameter bracket and refine the
    /// constant-sign window endpoints.
    Sweep(Common),
    /// Roots of the characteristic determinant in a bracket.
    Eig(Common),
    /// Build and print the derivative-annihilating operator.
    HOp(Common),
}

fn main() {
    let cli = Cli::parse();
    let (cmd, common) = match cli.command {
        Cmd::Build(c) => (Command::Build, c),
        Cmd::Verify(c) => (Command::Verify, c),
        Cmd::Sweep(c) => (Command::Sweep, c),
        Cmd::Eig(c) => (Command::Eig, c),
        Cmd::HOp(c) => (Command::HOp, c),
    };
    let args = cli::CommonArgs {
        config: common.config,
        out: common.out,
        tol: common.tol,
        threads: common.threads,
        svg: common.svg,
    };
    std::process::exit(cli::run(cmd, &args));
}
