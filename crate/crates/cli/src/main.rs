//! `magiclattice` command-line driver.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use magiclattice::lattice::{LatticeName, DEFAULT_NODE_BUDGET};
use magiclattice::pipeline::{
    cmd_census, cmd_entangle, cmd_orbits, cmd_project_e8, cmd_shells, diff_against_expected,
    render_checks, render_points, reproduce, OutputFormat, PipelineConfig, ShellStore,
};

#[derive(Parser)]
#[command(
    name = "magiclattice",
    version,
    about = "Lattice shells, stabiliser Renyi entropy and entanglement census"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate (or load) shells and check their sizes.
    Shells(Common),
    /// Classify every state of each shell by its Xi_2 value.
    Census(Common),
    /// Qutrit Clifford orbits and the E6 stabiliser correspondence.
    Orbits(Common),
    /// Concurrence profiles (BW16) or two-qubit concurrences (E8).
    Entangle(Common),
    /// Project the first two E8 shells to the plane.
    ProjectE8(Common),
    /// Run every check and diff against the embedded reference tables.
    Reproduce(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Lattice {
    #[value(name = "E8")]
    E8,
    #[value(name = "BW16", alias = "bw16")]
    Bw16,
    #[value(name = "E6")]
    E6,
}

impl From<Lattice> for LatticeName {
    fn from(l: Lattice) -> Self {
        match l {
            Lattice::E8 => LatticeName::E8,
            Lattice::Bw16 => LatticeName::BW16,
            Lattice::E6 => LatticeName::E6,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, ignore_case = true, default_value = "E8")]
    lattice: Lattice,
    /// Comma-separated squared norms; defaults depend on the lattice.
    #[arg(long, value_delimiter = ',')]
    norms: Vec<u64>,
    /// Shell cache directory (overridden by MAGICLATTICE_CACHE).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
    /// Allow the BW16 norm-8 shell.
    #[arg(long)]
    include_heavy: bool,
}

impl Common {
    fn config(&self) -> PipelineConfig {
        PipelineConfig {
            lattice: self.lattice.into(),
            norms: self.norms.clone(),
            cache_dir: self.cache_dir.clone(),
            format: match self.format {
                Format::Csv => OutputFormat::Csv,
                Format::Json => OutputFormat::Json,
            },
            threads: self.threads,
            node_budget: self.node_budget,
            include_heavy: self.include_heavy,
        }
    }
}

/// Runs a command, prints its output and returns whether every check passed.
fn run(command: &Command) -> Result<bool> {
    let common = match command {
        Command::Shells(c)
        | Command::Census(c)
        | Command::Orbits(c)
        | Command::Entangle(c)
        | Command::ProjectE8(c)
        | Command::Reproduce(c) => c,
    };
    let config = common.config();
    if let Some(n) = config.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("building thread pool")?;
    }
    let mut store = ShellStore::new(&config);
    let fmt = config.format;
    let ok = match command {
        Command::Shells(_) => {
            let summaries = cmd_shells(&config, &mut store)?;
            for s in &summaries {
                println!("{}", s.render());
            }
            summaries.iter().all(|s| s.theta.ok)
        }
        Command::Census(_) => {
            let report = cmd_census(&config, &mut store)?;
            print!("{}", report.render(fmt));
            let diff = diff_against_expected(&report);
            for d in &diff {
                eprintln!("mismatch: {d}");
            }
            diff.is_empty() && report.conserved()
        }
        Command::Orbits(_) => {
            let report = cmd_orbits(&mut store)?;
            print!("{}", report.render(fmt));
            report.ok()
        }
        Command::Entangle(_) => {
            let report = cmd_entangle(&config, &mut store)?;
            print!("{}", report.render(fmt));
            true
        }
        Command::ProjectE8(_) => {
            let points = cmd_project_e8(&mut store)?;
            print!("{}", render_points(&points, fmt));
            true
        }
        Command::Reproduce(_) => {
            let checks = reproduce(&config, &mut store)?;
            print!("{}", render_checks(&checks));
            let failed = checks.iter().filter(|c| !c.ok).count();
            println!("{} checks, {failed} failed", checks.len());
            failed == 0
        }
    };
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
