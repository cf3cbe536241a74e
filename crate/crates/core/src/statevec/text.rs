//! Line-oriented circuit and state file formats.
//!
//! Circuit files:
//!
//! ```text
//! # comment
//! registers witness1=1 witness2=1 ancilla=1
//! out 2
//! CX 0 2
//! RY(1.5707963267948966) 1
//! ```
//!
//! State files carry a header `amplitudes <k>` followed by `2^k` lines of
//! `<re> <im>`.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::circuit::{Circuit, RegisterLayout};
use super::gate::{Gate, GateKind};
use super::state::Statevector;
use crate::error::{Error, Result};

/// Tolerance on the norm of a parsed state before it is renormalised.
pub const STATE_FILE_NORM_TOLERANCE: f64 = 1e-9;

struct Line<'a> {
    number: usize,
    /// byte offset of `text` within the raw line, for column reporting
    indent: usize,
    text: &'a str,
}

fn content_lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim_start();
        let indent = body.len() - trimmed.len();
        let trimmed = trimmed.trim_end();
        (!trimmed.is_empty()).then_some(Line {
            number: i + 1,
            indent,
            text: trimmed,
        })
    })
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens<'a>(line: &'a Line<'a>) -> Vec<(usize, &'a str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.text.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((line.indent + s + 1, &line.text[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((line.indent + s + 1, &line.text[s..]));
    }
    out
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let lines: Vec<Line<'_>> = content_lines(text).collect();
    let Some(first) = lines.first() else {
        return Err(Error::parse(1, 1, "missing registers directive"));
    };
    let layout = parse_registers(first)?;
    let mut circuit = Circuit::new(layout).map_err(|e| Error::parse(first.number, 1, e.to_string()))?;
    let n = layout.n_qubits();
    let mut seen_out = false;

    for line in &lines[1..] {
        let toks = tokens(line);
        let (col, head) = toks[0];
        if head.eq_ignore_ascii_case("registers") {
            return Err(Error::parse(line.number, col, "duplicate registers directive"));
        }
        if head.eq_ignore_ascii_case("out") {
            if seen_out {
                return Err(Error::parse(line.number, col, "duplicate out directive"));
            }
            seen_out = true;
            if toks.len() != 2 {
                return Err(Error::parse(line.number, col, "expected `out <index>`"));
            }
            let q = parse_index(line.number, toks[1], n)?;
            circuit.set_output(q).expect("index checked");
            continue;
        }
        let (gate, targets) = parse_gate_line(line, &toks, n)?;
        circuit
            .push(gate, &targets)
            .map_err(|e| Error::parse(line.number, col, e.to_string()))?;
    }
    Ok(circuit)
}

fn parse_registers(line: &Line<'_>) -> Result<RegisterLayout> {
    let toks = tokens(line);
    let (col, head) = toks[0];
    if !head.eq_ignore_ascii_case("registers") {
        return Err(Error::parse(line.number, col, "missing registers directive"));
    }
    let mut counts: [Option<usize>; 3] = [None; 3];
    for &(col, tok) in &toks[1..] {
        let Some((key, value)) = tok.split_once('=') else {
            return Err(Error::parse(line.number, col, format!("expected key=value, got `{tok}`")));
        };
        let slot = match key {
            "witness1" => 0,
            "witness2" => 1,
            "ancilla" => 2,
            _ => return Err(Error::parse(line.number, col, format!("unknown register `{key}`"))),
        };
        if counts[slot].is_some() {
            return Err(Error::parse(line.number, col, format!("register `{key}` given twice")));
        }
        let v = value.parse::<usize>().map_err(|_| {
            Error::parse(line.number, col + key.len() + 1, format!("bad register size `{value}`"))
        })?;
        counts[slot] = Some(v);
    }
    match counts {
        [Some(w1), Some(w2), Some(m)] => {
            if w1 + w2 + m == 0 {
                return Err(Error::parse(line.number, col, "circuit has no qubits"));
            }
            Ok(RegisterLayout::new(w1, w2, m))
        }
        _ => Err(Error::parse(
            line.number,
            col,
            "registers directive needs witness1, witness2 and ancilla",
        )),
    }
}

fn parse_index(line: usize, (col, tok): (usize, &str), n: usize) -> Result<usize> {
    let q = tok
        .parse::<usize>()
        .map_err(|_| Error::parse(line, col, format!("bad qubit index `{tok}`")))?;
    if q >= n {
        return Err(Error::parse(line, col, format!("qubit {q} out of declared range 0..{n}")));
    }
    Ok(q)
}

fn parse_gate_line(line: &Line<'_>, toks: &[(usize, &str)], n: usize) -> Result<(Gate, Vec<usize>)> {
    // angles may contain spaces after commas; rejoin up to the closing paren
    let mut head = String::from(toks[0].1);
    let mut rest = 1;
    if head.contains('(') {
        while !head.contains(')') && rest < toks.len() {
            head.push_str(toks[rest].1);
            rest += 1;
        }
    }
    let col = toks[0].0;
    let (name, args) = match head.split_once('(') {
        Some((name, tail)) => {
            let Some(inner) = tail.strip_suffix(')') else {
                return Err(Error::parse(line.number, col, format!("malformed angle list in `{head}`")));
            };
            (name, Some(inner))
        }
        None => (head.as_str(), None),
    };
    let kind = GateKind::from_name(name)
        .ok_or_else(|| Error::parse(line.number, col, format!("unknown gate `{name}`")))?;
    let params: Vec<f64> = match args {
        None => Vec::new(),
        Some(list) => list
            .split(',')
            .map(|a| {
                let a = a.trim();
                match a.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(Error::parse(
                        line.number,
                        col + name.len() + 1,
                        format!("malformed angle `{a}`"),
                    )),
                }
            })
            .collect::<Result<_>>()?,
    };
    if params.len() != kind.param_count() {
        return Err(Error::parse(
            line.number,
            col,
            format!("{kind} takes {} angle(s), got {}", kind.param_count(), params.len()),
        ));
    }
    let gate = Gate::new(kind, &params).map_err(|e| Error::parse(line.number, col, e.to_string()))?;
    let targets = toks[rest..]
        .iter()
        .map(|&t| parse_index(line.number, t, n))
        .collect::<Result<Vec<_>>>()?;
    if targets.len() != kind.arity() {
        return Err(Error::parse(
            line.number,
            col,
            format!("{kind} acts on {} qubit(s), got {}", kind.arity(), targets.len()),
        ));
    }
    Ok((gate, targets))
}

pub fn parse_state(text: &str) -> Result<Statevector> {
    let mut lines = content_lines(text);
    let Some(header) = lines.next() else {
        return Err(Error::parse(1, 1, "missing `amplitudes <k>` header"));
    };
    let toks = tokens(&header);
    if toks.len() != 2 || !toks[0].1.eq_ignore_ascii_case("amplitudes") {
        return Err(Error::parse(header.number, 1, "expected `amplitudes <k>` header"));
    }
    let k = toks[1]
        .1
        .parse::<usize>()
        .ok()
        .filter(|&k| (1..=crate::MAX_QUBITS).contains(&k))
        .ok_or_else(|| Error::parse(header.number, toks[1].0, "bad qubit count"))?;
    let dim = 1usize << k;
    let mut amps = Vec::with_capacity(dim);
    let mut last = header.number;
    for line in lines {
        last = line.number;
        let toks = tokens(&line);
        if toks.len() != 2 {
            return Err(Error::parse(line.number, 1, "expected `<re> <im>`"));
        }
        let num = |(col, s): (usize, &str)| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(line.number, col, format!("malformed number `{s}`")))
        };
        if amps.len() == dim {
            return Err(Error::parse(line.number, 1, format!("more than {dim} amplitudes")));
        }
        amps.push(Complex64::new(num(toks[0])?, num(toks[1])?));
    }
    if amps.len() != dim {
        return Err(Error::parse(
            last,
            1,
            format!("expected {dim} amplitudes, found {}", amps.len()),
        ));
    }
    let norm = super::state::l2_norm(&amps);
    if (norm - 1.0).abs() > STATE_FILE_NORM_TOLERANCE {
        return Err(Error::parse(last, 1, format!("state is not normalised (norm {norm})")));
    }
    Statevector::normalized(amps)
}

/// Serialises a state with 17 significant digits per component.
pub fn state_to_text(state: &Statevector) -> String {
    let mut out = format!("amplitudes {}\n", state.n_qubits());
    for a in state.amplitudes() {
        let _ = writeln!(out, "{:.16e} {:.16e}", a.re, a.im);
    }
    out
}
