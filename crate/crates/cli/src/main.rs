mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use morass_core::generic::DenseSetSpec;

use config::{Bounds, VariantArg};

#[derive(Debug, Parser)]
#[command(name = "morass", version, about = "Finite morasses, thinned forcings and lemma suites")]
pub struct Cli {
    /// Enumeration bounds, e.g. `theta=3,phi=4,kappa=2,alphabet=3`.
    #[arg(long, global = true, default_value_t = Bounds::default())]
    pub bounds: Bounds,
    /// Forcing variant; lemma suites run both when omitted.
    #[arg(long, global = true, value_enum)]
    pub variant: Option<VariantArg>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Directory of fixture spec files.
    #[arg(long, global = true, env = "MORASS_FIXTURE_DIR")]
    pub fixtures: Option<PathBuf>,
    #[command(subcommand)]
    pub group: Group,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Group {
    /// Build and validate morasses.
    #[command(subcommand)]
    Morass(MorassCmd),
    /// Enumerate thinned forcings.
    #[command(subcommand)]
    Forcing(ForcingCmd),
    /// Run lemma suites.
    #[command(subcommand)]
    Lemmas(LemmasCmd),
    /// Finite generic filters.
    #[command(subcommand)]
    Generic(GenericCmd),
}

#[derive(Debug, Subcommand)]
pub enum MorassCmd {
    /// Check the axioms of spec files (default: every file in the fixture directory).
    Check { files: Vec<PathBuf> },
    /// Write every generated morass within the bounds as a spec file.
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        dir: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Gap1,
    Gap2,
}

#[derive(Debug, Subcommand)]
pub enum ForcingCmd {
    /// List P levels (gap-1) or Q levels and the final poset (gap-2).
    Enumerate { files: Vec<PathBuf> },
}

#[derive(Debug, Subcommand)]
pub enum LemmasCmd {
    /// Run suites on the given files, or on generated fixtures plus the fixture directory.
    Run {
        #[arg(long, default_value = "all")]
        suite: String,
        files: Vec<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenericCmd {
    /// Build a filter meeting the listed dense sets and read off the generic objects.
    Extract {
        #[arg(long)]
        file: PathBuf,
        /// e.g. `add-column(1)`, `separate(0,1,0)`, `grow-difference(2,0,1)`, `adf-total(1,0)`.
        #[arg(long = "dense")]
        dense: Vec<DenseSetSpec>,
    },
}

/// Process exit codes.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const FAIL: u8 = 1;
    pub const ERROR: u8 = 2;
    pub const UNREALIZABLE: u8 = 3;
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(exit::ERROR)
        }
    }
}
