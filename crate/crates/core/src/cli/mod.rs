//! Command-line runs: a versioned JSON config in, a directory of artifacts
//! plus a manifest out.
//!
//! Exit codes: 0 when every certificate holds, 1 when one fails (a
//! `witness.json` says which), 2 for config, input, precondition and usage
//! errors.

mod bundle;
mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::{env, fs, io};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use bundle::{export, Artifact, ArtifactRecord, CertificateLine, Format, InputRecord, Manifest, MANIFEST, WITNESS};
pub use commands::SEPARATION_R_MIN;
pub use config::{Command, RunConfig, Tolerances, CONFIG_VERSION};

/// Relative output directories are resolved under this directory.
pub const OUTPUT_ROOT_ENV: &str = "OMEGA_OUTPUT_ROOT";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },
    #[error("input {field}: {message}")]
    Input { field: String, message: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.manifest.passed
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

/// Where a run writes: an absolute `output` as is, anything else under the
/// output root (the environment variable, else the working directory).
pub fn output_dir(cfg: &RunConfig) -> PathBuf {
    let root = env::var_os(OUTPUT_ROOT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
    match &cfg.output {
        Some(p) if p.is_absolute() => p.clone(),
        Some(p) => root.join(p),
        None => root.join("omega-out").join(cfg.subcommand.slug()),
    }
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    cfg.validate()?;
    let out = commands::run_command(cfg)?;
    let mut artifacts = out.artifacts;
    if !out.witness.is_empty() {
        artifacts.push(Artifact::json(WITNESS.trim_end_matches(".json"), &out.witness));
    }
    let manifest = bundle::manifest(cfg, out.inputs, out.settings, out.certificates, &artifacts);
    let dir = output_dir(cfg);
    let files = bundle::write_bundle(&dir, &artifacts, &manifest)?;
    Ok(RunOutcome { dir, manifest, files })
}

pub fn run_file(path: &Path, output: Option<PathBuf>) -> Result<RunOutcome, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input { field: "config".into(), message: format!("{}: {e}", path.display()) })?;
    let mut cfg = RunConfig::from_json(&text)?;
    if output.is_some() {
        cfg.output = output;
    }
    run(&cfg)
}

#[derive(Debug, Parser)]
#[command(name = "omega", version, about = "Finite-resolution constructions on omega-Cantor and omega-Sierpinski boundaries")]
pub struct Cli {
    #[command(subcommand)]
    command: Top,
}

#[derive(Debug, Subcommand)]
enum Top {
    /// Run a JSON config.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    #[command(subcommand)]
    Cantor(CantorCmd),
    #[command(subcommand)]
    Raag(RaagCmd),
    #[command(subcommand)]
    Kleinian(KleinianCmd),
    #[command(subcommand)]
    Sierpinski(SierpinskiCmd),
    #[command(subcommand, name = "bass-serre")]
    BassSerre(BassSerreCmd),
    /// Copy a bundle's artifacts of one format.
    Export {
        bundle: PathBuf,
        #[arg(long, value_parser = ["svg", "csv", "json", "dot"])]
        format: String,
        /// Defaults to `<bundle>/export/<format>`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    pixels: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum CantorCmd {
    /// Correspondences between two entwined chains.
    Homeo {
        #[arg(long)]
        chain: Option<String>,
        #[arg(long)]
        chain2: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Entwinement and the nested clopen system of a sub presentation.
    Check {
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Subcommand)]
enum RaagCmd {
    Classify {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Subcommand)]
enum KleinianCmd {
    Shadows {
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        r_min: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Subcommand)]
enum SierpinskiCmd {
    Build {
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        r_min: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    Entwine {
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        lambda2: Option<f64>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        r_min: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Subcommand)]
enum BassSerreCmd {
    Probe {
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long = "d-bound")]
        d_bounds: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
}

fn with_common(mut cfg: RunConfig, c: Common) -> RunConfig {
    cfg.output = c.out;
    cfg.seed = c.seed;
    if let Some(eps) = c.eps {
        cfg.tolerances.eps = eps;
    }
    if let Some(p) = c.pixels {
        cfg.pixels = p;
    }
    cfg
}

fn config_from(top: Top) -> Option<RunConfig> {
    let cfg = match top {
        Top::Cantor(CantorCmd::Homeo { chain, chain2, depth, common }) => {
            with_common(RunConfig { chain, chain2, depth, ..RunConfig::new(Command::CantorHomeo) }, common)
        }
        Top::Cantor(CantorCmd::Check { presentation, depth, common }) => {
            with_common(RunConfig { presentation: Some(presentation), depth, ..RunConfig::new(Command::CantorCheck) }, common)
        }
        Top::Raag(RaagCmd::Classify { graph, common }) => with_common(RunConfig { graph: Some(graph), ..RunConfig::new(Command::RaagClassify) }, common),
        Top::Kleinian(KleinianCmd::Shadows { preset, lambda, r_min, common }) => {
            with_common(RunConfig { preset, lambda, r_min, ..RunConfig::new(Command::KleinianShadows) }, common)
        }
        Top::Sierpinski(SierpinskiCmd::Build { preset, lambda, depth, r_min, common }) => {
            with_common(RunConfig { preset, lambda, depth, r_min, ..RunConfig::new(Command::SierpinskiBuild) }, common)
        }
        Top::Sierpinski(SierpinskiCmd::Entwine { preset, lambda, lambda2, depth, r_min, common }) => {
            with_common(RunConfig { preset, lambda, lambda2, depth, r_min, ..RunConfig::new(Command::SierpinskiEntwine) }, common)
        }
        Top::BassSerre(BassSerreCmd::Probe { preset, radius, d_bounds, common }) => {
            let d_bounds = (!d_bounds.is_empty()).then_some(d_bounds);
            with_common(RunConfig { preset, radius, d_bounds, ..RunConfig::new(Command::BassSerreProbe) }, common)
        }
        Top::Run { .. } | Top::Export { .. } => return None,
    };
    Some(cfg)
}

fn report(outcome: &RunOutcome) {
    for c in &outcome.manifest.certificates {
        println!("{} {}", if c.holds { "PASS" } else { "FAIL" }, c.name);
    }
    println!("bundle: {}", outcome.dir.display());
    if !outcome.passed() {
        println!("witness: {}", outcome.dir.join(WITNESS).display());
    }
}

/// Runs the parsed command line and returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    let result = match cli.command {
        Top::Run { config, out } => run_file(&config, out).map(|o| {
            report(&o);
            o.exit_code()
        }),
        Top::Export { bundle, format, out } => {
            let out = out.unwrap_or_else(|| bundle.join("export").join(&format));
            export(&bundle, &format, &out).map(|files| {
                for f in files {
                    println!("{}", f.display());
                }
                0
            })
        }
        top => run(&config_from(top).expect("run command")).map(|o| {
            report(&o);
            o.exit_code()
        }),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    })
}
