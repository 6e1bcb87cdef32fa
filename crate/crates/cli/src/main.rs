mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use commands::{CliError, Run};
use config::RunConfig;
use output::Outputs;

/// Spectral, Green-function and evolution checks for the radial
/// energy-critical wave blowup profile in similarity coordinates.
#[derive(Parser)]
#[command(name = "cli", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Unstable spectrum of the free and linearized operators, three ways.
    Spectrum(Common),
    /// Resolvent residuals and high-frequency kernel decay.
    GreenCheck(Common),
    /// Laplace-inversion semigroup against time stepping.
    LaplaceCompare(Common),
    /// Evolve data in similarity coordinates.
    Evolve(Common),
    /// Space-time norms of the linearized flow on the stable subspace.
    Strichartz(Common),
    /// Fit the blowup time that removes the unstable mode.
    FitBlowup(Common),
}

#[derive(Args)]
struct Common {
    /// Flat key=value config file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Extra overrides, repeatable: --set key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        for kv in &self.set {
            cfg.apply_text(kv)?;
        }
        if let Some(v) = self.jobs {
            cfg.jobs = v;
        }
        if let Some(v) = &self.out {
            cfg.out_dir = v.clone();
        }
        if let Some(v) = self.d {
            cfg.d = v;
        }
        if self.n.is_some() {
            cfg.n = self.n;
        }
        if let Some(v) = self.tau_max {
            cfg.tau_max = v;
        }
        if let Some(v) = self.amplitude {
            cfg.amplitude = v;
        }
        if let Some(v) = self.delta {
            cfg.delta = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

type Handler = fn(&RunConfig, &mut Outputs) -> Result<Run, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common, handler): (&str, &Common, Handler) = match &cli.command {
        Command::Spectrum(c) => ("spectrum", c, commands::spectrum),
        Command::GreenCheck(c) => ("green-check", c, commands::green_check),
        Command::LaplaceCompare(c) => ("laplace-compare", c, commands::laplace_compare),
        Command::Evolve(c) => ("evolve", c, commands::evolve),
        Command::Strichartz(c) => ("strichartz", c, commands::strichartz),
        Command::FitBlowup(c) => ("fit-blowup", c, commands::fit_blowup),
    };
    let cfg = match common.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let mut out = match Outputs::create(&cfg.out_dir) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: cannot create {}: {e}", cfg.out_dir.display());
            return ExitCode::from(74);
        }
    };
    let start = Instant::now();
    let (code, grid_n) = match handler(&cfg, &mut out) {
        Ok(run) => (run.verdict.exit_code(), run.grid_n),
        Err(e) => {
            eprintln!("error: {e}");
            (e.exit_code(), cfg.n.unwrap_or(0))
        }
    };
    if let Err(e) = out.manifest(name, &cfg, grid_n, start.elapsed(), code) {
        eprintln!("error: cannot write manifest: {e}");
        return ExitCode::from(74);
    }
    if code != 0 {
        eprintln!("{name}: exit {code}");
    }
    ExitCode::from(code as u8)
}
