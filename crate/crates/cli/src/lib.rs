//! Command-line front end: loads circuits, states and tables, dispatches to
//! the simulation library and writes JSON or CSV reports.

pub mod args;
pub mod output;

use std::ffi::OsString;
use std::path::Path;
use std::time::Instant;

use clap::Parser;
use postsel::gadget::{self, GadgetParams, GadgetVariant};
use postsel::legacy::{self, TruthTable};
use postsel::statevec::{parse_circuit, parse_state};
use postsel::suite;
use postsel::witness::{self, DecisionThresholds, RegisterSplit, SeesawSettings};
use postsel::{acceptance_operator, Circuit, Complex64, Statevector};
use serde::Serialize;
use thiserror::Error;

use args::{Cli, Command, Format, Method, Variant};
use output::{Report, Timing, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<postsel::Error> for CliError {
    fn from(e: postsel::Error) -> Self {
        use postsel::Error as E;
        match e {
            E::Parse { .. } => CliError::Parse(e.to_string()),
            E::NullPostselection { .. } | E::Resource(_) | E::UndefinedPrediction(_) => CliError::Numeric(e.to_string()),
            E::Input(_) | E::PromiseViolation(_) => CliError::Config(e.to_string()),
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn with_path(path: &Path, e: postsel::Error) -> CliError {
    match CliError::from(e) {
        CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn load_circuit(path: &Path) -> Result<Circuit, CliError> {
    parse_circuit(&read_file(path)?).map_err(|e| with_path(path, e))
}

fn load_state(path: &Path) -> Result<Statevector, CliError> {
    parse_state(&read_file(path)?).map_err(|e| with_path(path, e))
}

fn load_table(path: &Path) -> Result<TruthTable, CliError> {
    TruthTable::parse(&read_file(path)?).map_err(|e| with_path(path, e))
}

/// A witness-register state is padded with `|0^m>`; a full-width state is
/// used as given.
fn full_input(circuit: &Circuit, state: Statevector) -> Result<Statevector, CliError> {
    let layout = circuit.layout();
    if state.n_qubits() == circuit.n_qubits() {
        Ok(state)
    } else if state.n_qubits() == layout.witness_qubits() {
        if layout.ancilla == 0 {
            return Ok(state);
        }
        Ok(state.tensor(&Statevector::zero(layout.ancilla)?)?)
    } else {
        Err(CliError::Config(format!(
            "state has {} qubits; expected {} (witness) or {} (all)",
            state.n_qubits(),
            layout.witness_qubits(),
            circuit.n_qubits()
        )))
    }
}

fn load_input(circuit: &Circuit, a: &args::InputArgs) -> Result<Statevector, CliError> {
    let w = circuit.layout().witness_qubits();
    let state = match (&a.witness, a.basis) {
        (Some(p), _) => load_state(p)?,
        (None, Some(k)) => {
            if w == 0 {
                return Err(CliError::Config("--basis needs a nonempty witness register".into()));
            }
            Statevector::basis(w, k)?
        }
        (None, None) => return Err(CliError::Config("give --witness or --basis".into())),
    };
    full_input(circuit, state)
}

fn gadget_params(variant: Variant, rotation: Option<f64>, r: Option<u32>) -> Result<GadgetParams, CliError> {
    let params = match (variant, rotation, r) {
        (Variant::One, Some(t), None) => GadgetParams::protocol1(t)?,
        (Variant::One, None, Some(r)) => GadgetParams::protocol1_from_r(r)?,
        (Variant::One, None, None) => GadgetParams::default(),
        (Variant::Three, Some(t), None) => GadgetParams::protocol3(t)?,
        (Variant::Three, _, _) => return Err(CliError::Config("variant 3 needs --rotation".into())),
        _ => return Err(CliError::Config("give either --rotation or --r".into())),
    };
    Ok(params)
}

fn check_output_dir(path: &Path) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => return Ok(()),
    };
    if dir.is_dir() {
        Ok(())
    } else {
        Err(CliError::Config(format!("output directory {} does not exist", dir.display())))
    }
}

#[derive(Serialize)]
struct StateJson {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl From<&Statevector> for StateJson {
    fn from(s: &Statevector) -> Self {
        Self {
            n_qubits: s.n_qubits(),
            amplitudes: s.amplitudes().to_vec(),
        }
    }
}

#[derive(Serialize)]
struct DecomposeJson {
    p_x: f64,
    completeness_error: f64,
    perp_overlap: f64,
    residual_f1: f64,
    residual_f0: f64,
    perp_state: Option<StateJson>,
}

#[derive(Serialize)]
struct WitnessJson {
    method: Method,
    value: f64,
    iterations: usize,
    entangled_value: f64,
    psi1: Vec<Complex64>,
    psi2: Vec<Complex64>,
}

#[derive(Serialize)]
struct MnJson {
    eigenvalue: Option<f64>,
    #[serde(flatten)]
    outcome: legacy::MnOutcome,
}

enum Payload {
    Json(serde_json::Value),
    Table(Vec<gadget::GadgetOutcome>, Format),
}

fn json<T: Serialize>(value: T) -> Result<Payload, CliError> {
    serde_json::to_value(value)
        .map(Payload::Json)
        .map_err(|e| CliError::Numeric(format!("serialising results: {e}")))
}

/// Loads every input, runs the command and writes its report.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let out_path = cli.command.report_path();
    if let Command::Suite(args::SuiteArgs { out: Some(dir) }) = &cli.command {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
    }
    if let Some(p) = &out_path {
        check_output_dir(p)?;
    }
    if let Command::Sweep(a) = &cli.command {
        if a.format == Format::Csv && a.input.out.is_none() {
            return Err(CliError::Config("csv output needs --out".into()));
        }
    }

    let start = Instant::now();
    let payload = dispatch(cli)?;
    let wall_seconds = start.elapsed().as_secs_f64();

    let text = match payload {
        Payload::Table(outcomes, Format::Csv) => output::outcomes_csv(&outcomes),
        Payload::Table(outcomes, Format::Json) => report_json(cli, outcomes, wall_seconds)?,
        Payload::Json(value) => report_json(cli, value, wall_seconds)?,
    };
    match out_path {
        Some(p) => {
            output::write_atomic(&p, &text)?;
            eprintln!("wrote {}", p.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn report_json<R: Serialize>(cli: &Cli, results: R, wall_seconds: f64) -> Result<String, CliError> {
    output::to_json(&Report {
        schema_version: SCHEMA_VERSION,
        config: &cli.command,
        results,
        timing: Timing { wall_seconds },
        seed: cli.seed,
    })
}

fn dispatch(cli: &Cli) -> Result<Payload, CliError> {
    let seed = cli.seed;
    match &cli.command {
        Command::Decompose(a) => {
            let circuit = load_circuit(&a.circuit)?;
            let input = load_input(&circuit, a)?;
            let d = gadget::decompose(&circuit, &input)?;
            json(DecomposeJson {
                p_x: d.p_x,
                completeness_error: d.completeness_error,
                perp_overlap: d.perp_overlap,
                residual_f1: d.residual_f1,
                residual_f0: d.residual_f0,
                perp_state: d.perp_state.as_ref().map(StateJson::from),
            })
        }
        Command::Gadget(a) => {
            let circuit = load_circuit(&a.input.circuit)?;
            let input = load_input(&circuit, &a.input)?;
            let params = gadget_params(a.variant, a.rotation, a.r)?;
            json(gadget::run_gadget(&circuit, &input, &params)?)
        }
        Command::Sweep(a) => {
            let circuit = load_circuit(&a.input.circuit)?;
            let input = load_input(&circuit, &a.input)?;
            let variant = match a.variant {
                Variant::One => GadgetVariant::Protocol1,
                Variant::Three => GadgetVariant::Protocol3,
            };
            let params = a
                .rotations
                .iter()
                .map(|&t| GadgetParams::new(variant, t))
                .collect::<postsel::Result<Vec<_>>>()?;
            Ok(Payload::Table(gadget::sweep(&circuit, &input, &params)?, a.format))
        }
        Command::Optimize(a) => {
            let circuit = load_circuit(&a.circuit)?;
            let split = RegisterSplit::from_layout(circuit.layout());
            let op = acceptance_operator(&circuit)?;
            let (entangled_value, _) = witness::entangled_optimum(&op)?;
            let w = match a.method {
                Method::Seesaw => {
                    let settings = SeesawSettings {
                        max_iters: a.iters,
                        tol: a.tol,
                        restarts: a.restarts,
                        seed,
                    };
                    witness::seesaw_optimize(&op, split, None, &settings)?
                }
                Method::Random => witness::random_product_search(&op, split, a.samples, seed)?,
            };
            json(WitnessJson {
                method: a.method,
                value: w.value,
                iterations: w.iterations(),
                entangled_value,
                psi1: w.psi1.amplitudes().to_vec(),
                psi2: w.psi2.amplitudes().to_vec(),
            })
        }
        Command::Decide(a) => {
            let circuit = load_circuit(&a.circuit)?;
            let thresholds = DecisionThresholds::new(a.c, a.s, a.gap_floor)?;
            let settings = SeesawSettings {
                max_iters: a.iters,
                restarts: a.restarts,
                seed,
                ..SeesawSettings::default()
            };
            json(witness::decide(&circuit, &thresholds, &settings)?)
        }
        Command::Pp(a) => {
            let table = load_table(&a.table)?;
            json(legacy::run_aaronson_pp(&table, legacy::default_exponents(table.n_bits()))?)
        }
        Command::Mn(a) => {
            let circuit = load_circuit(&a.circuit)?;
            let (eigenvalue, w) = match &a.witness {
                Some(p) => (None, load_state(p)?),
                None => {
                    let (l, w) = legacy::mn_witness(&circuit)?;
                    (Some(l), w)
                }
            };
            json(MnJson {
                eigenvalue,
                outcome: legacy::run_mn_protocol(&circuit, &w)?,
            })
        }
        Command::Suite(_) => {
            let report = suite::run_suite(seed)?;
            for c in &report.criteria {
                eprintln!("{}", c.summary_line());
            }
            json(report)
        }
    }
}
