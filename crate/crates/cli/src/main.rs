mod commands;
mod error;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

/// Default seed; every random draw derives from it unless overridden.
pub const DEFAULT_SEED: u64 = 20240611;

#[derive(Parser, Debug)]
#[command(name = "distvote", version, about = "Distributed obnoxious voting: mechanisms and distortion")]
pub struct Cli {
    /// Output format for reports written to stdout or --out.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Seed for every randomized step.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build an instance from a generator family.
    Generate(GenerateArgs),
    /// Run a mechanism on an instance file.
    Run(RunArgs),
    /// Measure the distortion of a mechanism's winner.
    Distort(DistortArgs),
    /// Reproduce the table of tight bounds.
    Table(TableArgs),
    /// Check an instance file against the schema and the metric axioms.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// equidistant, ordinal-general, line-full-info, line-ordinal,
    /// random-euclidean or random-line.
    #[arg(long)]
    pub family: Option<String>,
    /// Line families: chain-step, base-case or final.
    #[arg(long)]
    pub kind: Option<String>,
    /// Generator parameter file (`{"family": ..., "params": {...}}`).
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub lambda: Option<usize>,
    #[arg(long)]
    pub ell: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Agents per unit of group mass for quantized line families.
    #[arg(long)]
    pub q: Option<usize>,
    /// Instance file to write; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the paired rankings file (ordinal families).
    #[arg(long)]
    pub profile_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MechanismName {
    Mwo,
    Mwd,
    Veto,
    MwoLine,
    MwdLine,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub mechanism: MechanismName,
    /// `index`, `precedence:2,0,1`, or `recorded` (the file's rule).
    #[arg(long, default_value = "recorded")]
    pub tie_rule: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Lp,
    Discrete,
}

#[derive(Args, Debug)]
pub struct DistortArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub mechanism: MechanismName,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Exit with code 5 when the distortion exceeds this bound.
    #[arg(long)]
    pub assert_bound: Option<f64>,
    #[arg(long, default_value = "recorded")]
    pub tie_rule: String,
    /// Distance values searched in discrete mode, comma separated.
    #[arg(long, default_value = "0,0.5,1,1.5,2", allow_hyphen_values = true)]
    pub grid: String,
    /// Largest number of candidate matrices in discrete mode.
    #[arg(long, default_value_t = 1e8)]
    pub cap: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    /// Random instances per upper-bound row.
    #[arg(long)]
    pub trials: Option<usize>,
    /// JSON file overriding the table parameters.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Lower-bound parameter q for the ordinal line row.
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    pub instance: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => commands::generate(&cli, a),
        Command::Run(a) => commands::run(&cli, a),
        Command::Distort(a) => commands::distort(&cli, a),
        Command::Table(a) => table::table(&cli, a),
        Command::Validate(a) => commands::validate(&cli, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
