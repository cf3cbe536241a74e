use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "postsel", version, about = "Postselected verifier simulations and experiment reports")]
pub struct Cli {
    /// Root seed from which every random sub-stream is derived.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase", tag = "command")]
pub enum Command {
    /// Split the uncomputed state into the input and its orthogonal branch.
    Decompose(InputArgs),
    /// Run the gap-amplification gadget once.
    Gadget(GadgetArgs),
    /// Run the gadget over a list of rotations and emit a table.
    Sweep(SweepArgs),
    /// Optimise over product witnesses.
    Optimize(OptimizeArgs),
    /// Accept, reject or report indeterminate for a two-witness verifier.
    Decide(DecideArgs),
    /// Majority detection over a truth table.
    Pp(PpArgs),
    /// Eigenvector-witness indicator protocol.
    Mn(MnArgs),
    /// Run the acceptance battery.
    Suite(SuiteArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct InputArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    /// State file for the witness register (or for all qubits).
    #[arg(long, conflicts_with = "basis")]
    pub witness: Option<PathBuf>,
    /// Computational basis state of the witness register.
    #[arg(long)]
    pub basis: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Variant {
    #[value(name = "1")]
    #[serde(rename = "1")]
    One,
    #[value(name = "3")]
    #[serde(rename = "3")]
    Three,
}

#[derive(Debug, Args, Serialize)]
pub struct GadgetArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "1")]
    pub variant: Variant,
    #[arg(long, conflicts_with = "r")]
    pub rotation: Option<f64>,
    /// Rotation 2^(-10 r); variant 1 only.
    #[arg(long)]
    pub r: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "1")]
    pub variant: Variant,
    /// Comma-separated rotation values.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub rotations: Vec<f64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Seesaw,
    Random,
}

#[derive(Debug, Args, Serialize)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long, value_enum, default_value = "seesaw")]
    pub method: Method,
    #[arg(long, default_value_t = 500)]
    pub iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DecideArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long)]
    pub c: f64,
    #[arg(long)]
    pub s: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub gap_floor: f64,
    #[arg(long, default_value_t = 500)]
    pub iters: usize,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PpArgs {
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct MnArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    /// Witness state; defaults to the top eigenvector of the acceptance operator.
    #[arg(long)]
    pub witness: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SuiteArgs {
    /// Directory that receives `suite.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Command {
    /// Where the report goes; `None` means stdout.
    pub fn report_path(&self) -> Option<PathBuf> {
        match self {
            Command::Decompose(a) => a.out.clone(),
            Command::Gadget(a) => a.input.out.clone(),
            Command::Sweep(a) => a.input.out.clone(),
            Command::Optimize(a) => a.out.clone(),
            Command::Decide(a) => a.out.clone(),
            Command::Pp(a) => a.out.clone(),
            Command::Mn(a) => a.out.clone(),
            Command::Suite(a) => a.out.as_ref().map(|d| d.join("suite.json")),
        }
    }
}
