//! Two earlier postselection protocols: majority detection over a classical
//! truth table, and the eigenvector-witness indicator protocol.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::{
    acceptance_operator, inverse_circuit, project_named, run_in_place, Circuit, Gate, Projector, Statevector,
};

pub const MAX_TABLE_BITS: usize = 12;

/// Majority-accept iff the best `|+>` fidelity over the comparator sweep
/// exceeds this. Calibrated as the smallest such maximum over every
/// majority-accept table with at most three bits, minus `1e-6`.
pub const PP_FIDELITY_THRESHOLD: f64 = 0.971_404_520_791_031_8 - 1e-6;

/// Work-register width used to model the garbage of the table lookup.
const MAX_WORK_QUBITS: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthTable {
    n_bits: usize,
    outputs: Vec<bool>,
}

impl TruthTable {
    pub fn new(n_bits: usize, outputs: Vec<bool>) -> Result<Self> {
        if n_bits == 0 || n_bits > MAX_TABLE_BITS {
            return Err(Error::input(format!("table width {n_bits} outside 1..={MAX_TABLE_BITS}")));
        }
        if outputs.len() != 1 << n_bits {
            return Err(Error::input(format!(
                "a {n_bits}-bit table needs {} entries, got {}",
                1 << n_bits,
                outputs.len()
            )));
        }
        Ok(Self { n_bits, outputs })
    }

    /// Entry `r` is bit `r` of `bits`.
    pub fn from_bits(n_bits: usize, bits: u64) -> Result<Self> {
        if n_bits > 6 {
            return Err(Error::input("from_bits supports at most 6 table bits"));
        }
        Self::new(n_bits, (0..1usize << n_bits).map(|r| bits >> r & 1 == 1).collect())
    }

    /// Parses `bits <n>` followed by `2^n` lines holding `0` or `1`.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, 1, "missing `bits <n>` header"))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("bits") {
            return Err(Error::parse(hl, 1, "expected `bits <n>`"));
        }
        let n_bits: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::parse(hl, 6, "expected a bit count"))?;
        if parts.next().is_some() {
            return Err(Error::parse(hl, 1, "trailing tokens after bit count"));
        }
        if n_bits == 0 || n_bits > MAX_TABLE_BITS {
            return Err(Error::parse(hl, 6, format!("bit count must be in 1..={MAX_TABLE_BITS}")));
        }
        let mut outputs = Vec::with_capacity(1 << n_bits);
        let mut last = hl;
        for (ln, l) in lines {
            last = ln;
            let bit = match l {
                "0" => false,
                "1" => true,
                _ => return Err(Error::parse(ln, 1, format!("expected 0 or 1, found `{l}`"))),
            };
            if outputs.len() == 1 << n_bits {
                return Err(Error::parse(ln, 1, "more entries than the header declares"));
            }
            outputs.push(bit);
        }
        if outputs.len() != 1 << n_bits {
            return Err(Error::parse(
                last,
                1,
                format!("expected {} entries, found {}", 1 << n_bits, outputs.len()),
            ));
        }
        Self::new(n_bits, outputs)
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn outputs(&self) -> &[bool] {
        &self.outputs
    }

    pub fn count_accepting(&self) -> usize {
        self.outputs.iter().filter(|&&b| b).count()
    }

    pub fn is_majority_accept(&self) -> bool {
        2 * self.count_accepting() > self.outputs.len()
    }

    /// Table on one more input bit (the new least significant bit) that
    /// copies `self` when it is 0 and the parity of the lowest original bit
    /// when it is 1. Both counts grow by `2^(n-1)`, so the majority is kept
    /// and neither count is zero.
    fn padded(&self) -> Vec<bool> {
        (0..2 * self.outputs.len())
            .map(|a| if a & 1 == 0 { self.outputs[a >> 1] } else { (a >> 1) & 1 == 1 })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlRatio {
    alpha: f64,
    beta: f64,
}

impl ControlRatio {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha >= 0.0 && beta >= 0.0) || (alpha * alpha + beta * beta - 1.0).abs() > 1e-12 {
            return Err(Error::input(format!(
                "control amplitudes ({alpha}, {beta}) must be nonnegative with unit norm"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// `beta / alpha = 2^exponent`.
    pub fn from_exponent(exponent: i32) -> Self {
        let ratio = (exponent as f64).exp2();
        let alpha = 1.0 / (1.0 + ratio * ratio).sqrt();
        Self {
            alpha,
            beta: ratio * alpha,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Controlled-Hadamard comparison of the target amplitudes `(a, b)`.
///
/// The control starts in `alpha|0> + beta|1>`; after a Hadamard on the
/// target conditioned on the control and postselecting the target on `|1>`,
/// the control is proportional to `alpha b|0> + beta (a - b)/sqrt(2)|1>`.
pub fn comparator_gadget(target: &Statevector, control: ControlRatio) -> Result<(f64, Statevector)> {
    if target.n_qubits() != 1 {
        return Err(Error::input("comparator target must be a single qubit"));
    }
    let t = target.amplitudes();
    if t.iter().any(|z| z.im.abs() > 1e-12 || z.re < -1e-12) {
        return Err(Error::input("comparator target needs nonnegative real amplitudes"));
    }
    let c = Statevector::from_amplitudes(vec![Complex64::new(control.alpha, 0.0), Complex64::new(control.beta, 0.0)])?;
    // control is qubit 0, target qubit 1
    let mut state = c.tensor(target)?;
    let ch = Circuit::new(crate::statevec::RegisterLayout::new(2, 0, 0))?
        .with(Gate::ry(-FRAC_PI_4), &[1])?
        .with(Gate::cz(), &[0, 1])?
        .with(Gate::ry(FRAC_PI_4), &[1])?;
    run_in_place(&mut state, &ch);
    let (p, post) = project_named(&state, &Projector::one(1), "comparator_gadget")?;
    let amps = post.amplitudes();
    Ok((p, Statevector::normalized(vec![amps[0b01], amps[0b11]])?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MajorityDecision {
    MajorityAccept,
    MajorityReject,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub exponent: i32,
    pub post_prob: f64,
    pub plus_fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PpOutcome {
    pub decision: MajorityDecision,
    /// Normalised `(accepting, rejecting)` amplitudes after postselection.
    pub amplitudes: [f64; 2],
    pub table_postselection: f64,
    pub max_fidelity: f64,
    pub sweep: Vec<SweepPoint>,
}

/// Default comparator exponents for an `n`-bit table.
pub fn default_exponents(n_bits: usize) -> std::ops::RangeInclusive<i32> {
    let k = n_bits as i32 + 2;
    -k..=k
}

/// Majority detection by postselection.
///
/// Prepares the uniform superposition over table inputs, XORs the table
/// value into an answer qubit through a work register that is uncomputed
/// afterwards, applies Hadamards to the input register and postselects it on
/// all zeros. The answer qubit is then proportional to
/// `#accepting|0> + #rejecting|1>` (after an `X`), and the comparator sweep
/// finds a ratio with `|+>` fidelity near 1 only when the first amplitude is
/// larger.
pub fn run_aaronson_pp(table: &TruthTable, exponents: std::ops::RangeInclusive<i32>) -> Result<PpOutcome> {
    let acc = table.count_accepting();
    if 2 * acc == table.outputs.len() {
        return Err(Error::PromiseViolation(format!(
            "table is tied at {acc} accepting of {}",
            table.outputs.len()
        )));
    }
    if exponents.is_empty() {
        return Err(Error::input("empty comparator sweep"));
    }
    let (table_postselection, target) = table_circuit_output(table)?;
    let a = target.amplitudes();
    let amplitudes = [a[0].re, a[1].re];

    let sweep: Vec<SweepPoint> = exponents
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|exponent| {
            let (post_prob, control) = comparator_gadget(&target, ControlRatio::from_exponent(exponent))?;
            let c = control.amplitudes();
            let plus_fidelity = ((c[0] + c[1]) * FRAC_1_SQRT_2).norm_sqr();
            Ok(SweepPoint {
                exponent,
                post_prob,
                plus_fidelity,
            })
        })
        .collect::<Result<_>>()?;
    let max_fidelity = sweep.iter().map(|p| p.plus_fidelity).fold(f64::NEG_INFINITY, f64::max);
    let decision = if max_fidelity > PP_FIDELITY_THRESHOLD {
        MajorityDecision::MajorityAccept
    } else {
        MajorityDecision::MajorityReject
    };
    Ok(PpOutcome {
        decision,
        amplitudes,
        table_postselection,
        max_fidelity,
        sweep,
    })
}

/// Runs the table-lookup stage and returns the postselection probability
/// and the answer qubit after relabelling.
fn table_circuit_output(table: &TruthTable) -> Result<(f64, Statevector)> {
    let f = table.padded();
    let r_bits = table.n_bits + 1;
    let work = r_bits.min(MAX_WORK_QUBITS);
    let answer = r_bits;
    let work0 = r_bits + 1;
    let n = r_bits + 1 + work;

    let layout = crate::statevec::RegisterLayout::new(n, 0, 0);
    let mut fan_out = Circuit::new(layout)?;
    for i in 0..work {
        fan_out.push(Gate::cx(), &[i, work0 + i])?;
    }
    let mut hadamards = Circuit::new(layout)?;
    for q in 0..r_bits {
        hadamards.push(Gate::h(), &[q])?;
    }

    let mut state = Statevector::zero(n)?;
    run_in_place(&mut state, &hadamards);
    run_in_place(&mut state, &fan_out);
    xor_lookup(&mut state, &f, r_bits, work, answer);
    run_in_place(&mut state, &inverse_circuit(&fan_out));
    run_in_place(&mut state, &hadamards);

    let r_qubits: Vec<usize> = (0..r_bits).collect();
    let (p, post) = project_named(&state, &Projector::basis_subspace(&r_qubits, [0])?, "run_aaronson_pp")?;
    let shift = n - 1 - answer;
    let mut amps = [Complex64::new(0.0, 0.0); 2];
    for (i, a) in post.amplitudes().iter().enumerate() {
        if a.norm_sqr() > 0.0 {
            amps[(i >> shift) & 1] += *a;
        }
    }
    // X on the answer qubit: accepting count first
    let relabelled = vec![amps[1], amps[0]];
    Ok((p, Statevector::normalized(relabelled)?))
}

/// Reversible `answer ^= f(address)`, reading the leading address bits from
/// the work register and the rest from the input register.
fn xor_lookup(state: &mut Statevector, f: &[bool], r_bits: usize, work: usize, answer: usize) {
    let n = state.n_qubits();
    let answer_mask = 1usize << (n - 1 - answer);
    let work_shift = n - 1 - (r_bits + work);
    let tail_bits = r_bits - work;
    let tail_shift = n - r_bits;
    let amps = state.amplitudes_mut();
    for i in 0..amps.len() {
        if i & answer_mask != 0 {
            continue;
        }
        let head = (i >> work_shift) & ((1 << work) - 1);
        let tail = (i >> tail_shift) & ((1 << tail_bits) - 1);
        if f[(head << tail_bits) | tail] {
            amps.swap(i, i | answer_mask);
        }
    }
}

/// Smallest maximum sweep fidelity over every majority-accept table with at
/// most `max_bits` input bits.
pub fn calibrate_threshold(max_bits: usize) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for n in 1..=max_bits {
        for bits in 0..1u64 << (1 << n) {
            let t = TruthTable::from_bits(n, bits)?;
            if t.is_majority_accept() {
                worst = worst.min(run_aaronson_pp(&t, default_exponents(n))?.max_fidelity);
            }
        }
    }
    Ok(worst)
}

/// Top eigenpair of the acceptance operator on the full witness register.
pub fn mn_witness(circuit: &Circuit) -> Result<(f64, Statevector)> {
    let (value, v) = acceptance_operator(circuit)?.top_eigenpair();
    Ok((value, Statevector::normalized(v)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MnOutcome {
    /// Reduced density matrix of the indicator qubit, row major.
    pub indicator: [[Complex64; 2]; 2],
    pub purity: f64,
    pub p_post: f64,
    /// `<1|rho|1>`.
    pub one_probability: f64,
    /// `sqrt(rho11) / (sqrt(rho00) + sqrt(rho11))`; equals the eigenvalue for
    /// an eigenvector witness.
    pub amplitude_share: f64,
}

/// Runs the verifier, copies its output into a fresh indicator qubit,
/// uncomputes, and postselects the ancillas on `|0^m>`.
pub fn run_mn_protocol(circuit: &Circuit, witness: &Statevector) -> Result<MnOutcome> {
    let layout = circuit.layout();
    let w = layout.witness_qubits();
    if w == 0 || witness.n_qubits() != w {
        return Err(Error::input(format!(
            "witness has {} qubits but the circuit's witness register has {w}",
            witness.n_qubits()
        )));
    }
    let n = circuit.n_qubits();
    let mut ext = circuit.widened(1)?;
    ext.push(Gate::cx(), &[circuit.output_qubit(), n])?;
    ext.append_mapped(&inverse_circuit(circuit), |q| q)?;

    let mut state = witness.tensor(&Statevector::zero(layout.ancilla + 1)?)?;
    run_in_place(&mut state, &ext);
    let (p_post, state) = if layout.ancilla > 0 {
        let anc: Vec<usize> = layout.ancilla_range().collect();
        project_named(&state, &Projector::basis_subspace(&anc, [0])?, "run_mn_protocol")?
    } else {
        (1.0, state)
    };

    let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
    for pair in state.amplitudes().chunks_exact(2) {
        for a in 0..2 {
            for b in 0..2 {
                rho[a][b] += pair[a] * pair[b].conj();
            }
        }
    }
    let purity = (0..2)
        .flat_map(|a| (0..2).map(move |b| (a, b)))
        .map(|(a, b)| (rho[a][b] * rho[b][a]).re)
        .sum();
    let (s0, s1) = (rho[0][0].re.max(0.0).sqrt(), rho[1][1].re.max(0.0).sqrt());
    Ok(MnOutcome {
        indicator: rho,
        purity,
        p_post,
        one_probability: rho[1][1].re,
        amplitude_share: s1 / (s0 + s1),
    })
}
