use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unitarity tolerance on `max |U^†U - I|`.
pub const UNITARY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Rx,
    Ry,
    Rz,
    U,
    Cx,
    Cz,
    Swap,
    Ccx,
}

impl GateKind {
    pub const ALL: [GateKind; 16] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::U,
        GateKind::Cx,
        GateKind::Cz,
        GateKind::Swap,
        GateKind::Ccx,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::T => "T",
            GateKind::Tdg => "TDG",
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::U => "U",
            GateKind::Cx => "CX",
            GateKind::Cz => "CZ",
            GateKind::Swap => "SWAP",
            GateKind::Ccx => "CCX",
        }
    }

    /// Case-insensitive lookup by mnemonic.
    pub fn from_name(name: &str) -> Option<GateKind> {
        let upper = name.to_ascii_uppercase();
        GateKind::ALL.into_iter().find(|k| k.name() == upper)
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cx | GateKind::Cz | GateKind::Swap => 2,
            GateKind::Ccx => 3,
            _ => 1,
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz => 1,
            GateKind::U => 3,
            _ => 0,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A named gate with its (row-major) unitary. For multi-qubit gates the first
/// target is the most significant bit of the local index, so `CX [c, t]`
/// flips `t` when `c` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    kind: GateKind,
    params: Vec<f64>,
    matrix: Vec<Complex64>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Gate {
    pub fn new(kind: GateKind, params: &[f64]) -> Result<Self> {
        if params.len() != kind.param_count() {
            return Err(Error::input(format!(
                "{kind} takes {} angle(s), got {}",
                kind.param_count(),
                params.len()
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::input(format!("{kind} angle is not finite")));
        }
        let matrix = build_matrix(kind, params);
        Ok(Self {
            kind,
            params: params.to_vec(),
            matrix,
        })
    }

    pub fn h() -> Self {
        Self::fixed(GateKind::H)
    }
    pub fn x() -> Self {
        Self::fixed(GateKind::X)
    }
    pub fn z() -> Self {
        Self::fixed(GateKind::Z)
    }
    pub fn cx() -> Self {
        Self::fixed(GateKind::Cx)
    }
    pub fn cz() -> Self {
        Self::fixed(GateKind::Cz)
    }
    pub fn ccx() -> Self {
        Self::fixed(GateKind::Ccx)
    }
    pub fn rx(theta: f64) -> Self {
        Self::new(GateKind::Rx, &[theta]).expect("finite angle")
    }
    pub fn ry(theta: f64) -> Self {
        Self::new(GateKind::Ry, &[theta]).expect("finite angle")
    }
    pub fn rz(theta: f64) -> Self {
        Self::new(GateKind::Rz, &[theta]).expect("finite angle")
    }

    fn fixed(kind: GateKind) -> Self {
        Self::new(kind, &[]).expect("parameter-free gate")
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn arity(&self) -> usize {
        self.kind.arity()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        1 << self.arity()
    }

    /// The conjugate-transpose gate, expressed again inside the gate set.
    pub fn inverse(&self) -> Gate {
        let p = &self.params;
        let (kind, params): (GateKind, Vec<f64>) = match self.kind {
            GateKind::S => (GateKind::Sdg, vec![]),
            GateKind::Sdg => (GateKind::S, vec![]),
            GateKind::T => (GateKind::Tdg, vec![]),
            GateKind::Tdg => (GateKind::T, vec![]),
            GateKind::Rx | GateKind::Ry | GateKind::Rz => (self.kind, vec![-p[0]]),
            GateKind::U => (GateKind::U, vec![-p[0], -p[2], -p[1]]),
            k => (k, vec![]),
        };
        Gate::new(kind, &params).expect("inverse of a valid gate")
    }

    /// `max |U^†U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim();
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut acc = c(0.0, 0.0);
                for k in 0..d {
                    acc += m[k * d + i].conj() * m[k * d + j];
                }
                if i == j {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }
}

fn build_matrix(kind: GateKind, p: &[f64]) -> Vec<Complex64> {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    let r = FRAC_1_SQRT_2;
    match kind {
        GateKind::H => vec![c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0)],
        GateKind::X => vec![o, l, l, o],
        GateKind::Y => vec![o, c(0.0, -1.0), c(0.0, 1.0), o],
        GateKind::Z => vec![l, o, o, -l],
        GateKind::S => vec![l, o, o, c(0.0, 1.0)],
        GateKind::Sdg => vec![l, o, o, c(0.0, -1.0)],
        GateKind::T => vec![l, o, o, c(r, r)],
        GateKind::Tdg => vec![l, o, o, c(r, -r)],
        GateKind::Rx => {
            let (s, co) = (p[0] / 2.0).sin_cos();
            vec![c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)]
        }
        GateKind::Ry => {
            let (s, co) = (p[0] / 2.0).sin_cos();
            vec![c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)]
        }
        GateKind::Rz => {
            let h = p[0] / 2.0;
            vec![Complex64::from_polar(1.0, -h), o, o, Complex64::from_polar(1.0, h)]
        }
        GateKind::U => {
            let (theta, phi, lambda) = (p[0], p[1], p[2]);
            let (s, co) = (theta / 2.0).sin_cos();
            vec![
                c(co, 0.0),
                -Complex64::from_polar(s, lambda),
                Complex64::from_polar(s, phi),
                Complex64::from_polar(co, phi + lambda),
            ]
        }
        GateKind::Cx => permutation(4, |i| match i {
            2 => 3,
            3 => 2,
            i => i,
        }),
        GateKind::Cz => {
            let mut m = permutation(4, |i| i);
            m[15] = -l;
            m
        }
        GateKind::Swap => permutation(4, |i| match i {
            1 => 2,
            2 => 1,
            i => i,
        }),
        GateKind::Ccx => permutation(8, |i| match i {
            6 => 7,
            7 => 6,
            i => i,
        }),
    }
}

/// Matrix sending basis column `j` to row `f(j)`.
fn permutation(d: usize, f: impl Fn(usize) -> usize) -> Vec<Complex64> {
    let mut m = vec![c(0.0, 0.0); d * d];
    for j in 0..d {
        m[f(j) * d + j] = c(1.0, 0.0);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_gates() -> Vec<Gate> {
        GateKind::ALL
            .iter()
            .map(|&k| {
                let params: Vec<f64> = [0.37, -1.2, 2.9][..k.param_count()].to_vec();
                Gate::new(k, &params).unwrap()
            })
            .collect()
    }

    #[test]
    fn every_gate_is_unitary() {
        for g in all_gates() {
            assert!(g.unitarity_defect() < UNITARY_TOLERANCE, "{}", g.name());
        }
    }

    #[test]
    fn inverse_is_conjugate_transpose() {
        for g in all_gates() {
            let inv = g.inverse();
            let d = g.dim();
            for i in 0..d {
                for j in 0..d {
                    let expect = g.matrix()[j * d + i].conj();
                    assert!((inv.matrix()[i * d + j] - expect).norm() < 1e-12, "{}", g.name());
                }
            }
        }
    }

    #[test]
    fn ry_inverse_matches_negated_angle() {
        let theta = 0.913;
        let inv = Gate::ry(theta).inverse();
        let neg = Gate::ry(-theta);
        for (a, b) in inv.matrix().iter().zip(neg.matrix()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn names_round_trip_case_insensitively() {
        for k in GateKind::ALL {
            assert_eq!(GateKind::from_name(&k.name().to_lowercase()), Some(k));
        }
        assert_eq!(GateKind::from_name("CH"), None);
    }

    #[test]
    fn wrong_parameter_count_rejected() {
        assert!(Gate::new(GateKind::Ry, &[]).is_err());
        assert!(Gate::new(GateKind::H, &[1.0]).is_err());
        assert!(Gate::new(GateKind::Rz, &[f64::NAN]).is_err());
    }
}
