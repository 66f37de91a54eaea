//! Command-line front end. Every command prints (or writes) a JSON report or
//! a CSV table. Exit status: 0 pass, 1 mathematical failure, 2 bad request.

mod commands;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use serde::{de::DeserializeOwned, Serialize};
use serde_json::Value;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "sphtomo", version, about = "Spherical transforms, intersection bodies and Busemann-Petty counterexamples")]
struct Cli {
    /// Worker threads (default: all cores). Reports are byte-identical at 1.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON object whose keys override the command's flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide membership of a body in I_λ^n.
    Classify(commands::ClassifyArgs),
    /// Build a body: IB_λ(L), a section, or one of the standard families.
    Construct(commands::ConstructArgs),
    /// Section volumes on random subspaces.
    Section(commands::SectionArgs),
    /// Run identity suites.
    Verify(commands::VerifyArgs),
    /// γ scans, asymptotic tables and h sign maps for (q,ℓ)-balls.
    Qlscan(commands::QlscanArgs),
    /// Forge or re-check a Busemann-Petty counterexample.
    Gbp {
        #[command(subcommand)]
        action: GbpAction,
    },
}

#[derive(Subcommand, Debug)]
enum GbpAction {
    Forge(commands::GbpForgeArgs),
    Verify(commands::GbpVerifyArgs),
}

/// Failure classes, mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    /// A verdict mismatch or violated identity (exit 1).
    Math(String),
    /// Malformed request (exit 2).
    Config(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<sphtomo::Error>() {
            Some(err) if !err.is_configuration() => Failure::Math(format!("{e:#}")),
            _ => Failure::Config(e),
        }
    }
}

impl From<sphtomo::Error> for Failure {
    fn from(e: sphtomo::Error) -> Self {
        Failure::from(anyhow::Error::new(e))
    }
}

/// Overlays `overrides` (a JSON object) on the serialized arguments.
pub fn merge_config<T: Serialize + DeserializeOwned>(args: T, overrides: Option<&Value>) -> Result<T> {
    let Some(o) = overrides else { return Ok(args) };
    let obj = o.as_object().ok_or_else(|| anyhow!("configuration must be a JSON object"))?;
    let mut v = serde_json::to_value(&args)?;
    let target = v.as_object_mut().ok_or_else(|| anyhow!("arguments are not an object"))?;
    for (k, val) in obj {
        if !target.contains_key(k) {
            return Err(anyhow!("unknown configuration key `{k}`"));
        }
        target.insert(k.clone(), val.clone());
    }
    serde_json::from_value(v).context("configuration does not match the command's options")
}

/// Where output goes.
pub struct Sink {
    pub path: Option<PathBuf>,
}

impl Sink {
    pub fn write(&self, text: &str) -> Result<()> {
        match &self.path {
            Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    pub fn json<T: Serialize>(&self, v: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(v)?;
        s.push('\n');
        self.write(&s)
    }
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Failure::Config(anyhow!("--threads must be positive")));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| Failure::Config(e.into()))?;
    }
    let config: Option<Value> = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Some(serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?)
        }
        None => None,
    };
    let sink = Sink { path: cli.out.clone() };
    let cfg = config.as_ref();
    match cli.command {
        Command::Classify(a) => commands::classify(merge_config(a, cfg)?, &sink),
        Command::Construct(a) => commands::construct(merge_config(a, cfg)?, &sink),
        Command::Section(a) => commands::section(merge_config(a, cfg)?, &sink),
        Command::Verify(a) => commands::verify(merge_config(a, cfg)?, &sink),
        Command::Qlscan(a) => commands::qlscan(merge_config(a, cfg)?, &sink),
        Command::Gbp { action: GbpAction::Forge(a) } => commands::gbp_forge(merge_config(a, cfg)?, &sink),
        Command::Gbp { action: GbpAction::Verify(a) } => commands::gbp_verify(merge_config(a, cfg)?, &sink),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Math(m)) => {
            eprintln!("failure: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
