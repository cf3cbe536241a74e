use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use postsel::gadget::GadgetOutcome;
use serde::Serialize;
use tempfile::NamedTempFile;

use crate::CliError;

pub const SCHEMA_VERSION: &str = "1";

pub const CSV_COLUMNS: [&str; 9] = [
    "variant",
    "rotation",
    "p_x",
    "p_post",
    "p_accept",
    "predicted_p_accept",
    "predicted_p_post",
    "discrepancy",
    "l_bound_exponent",
];

#[derive(Debug, Serialize)]
pub struct Timing {
    pub wall_seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct Report<'a, C: Serialize, R: Serialize> {
    pub schema_version: &'static str,
    pub config: &'a C,
    pub results: R,
    pub timing: Timing,
    pub seed: u64,
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Numeric(format!("serialising report: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Writes `contents` through a temporary file in the target directory so
/// that readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let unwritable = |e: std::io::Error| CliError::Config(format!("cannot write {}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(dir).map_err(unwritable)?;
    tmp.write_all(contents.as_bytes()).map_err(unwritable)?;
    tmp.as_file().sync_all().map_err(unwritable)?;
    tmp.persist(path).map_err(|e| unwritable(e.error))?;
    Ok(())
}

fn csv_number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn outcomes_csv(outcomes: &[GadgetOutcome]) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for o in outcomes {
        let nums = [
            o.rotation,
            o.p_x,
            o.p_post,
            o.p_accept,
            o.predicted_p_accept,
            o.predicted_p_post,
            o.discrepancy,
            o.l_bound_exponent,
        ];
        out.push_str(o.variant.as_str());
        for x in nums {
            let _ = write!(out, ",{}", csv_number(x));
        }
        out.push('\n');
    }
    out
}

/// Writes gadget outcomes as a CSV table or a JSON array.
pub fn emit_table(outcomes: &[GadgetOutcome], format: crate::args::Format, path: &Path) -> Result<(), CliError> {
    if outcomes.is_empty() {
        return Err(CliError::Config("no outcomes to write".into()));
    }
    let text = match format {
        crate::args::Format::Csv => outcomes_csv(outcomes),
        crate::args::Format::Json => to_json(&outcomes)?,
    };
    write_atomic(path, &text)
}
