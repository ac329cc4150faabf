//! Stationary square-well evolution as diagonal phase unitaries, and the
//! controlled-NOT realized on a 2-qubit subspace coded into well levels.
//!
//! Free evolution for time `t` multiplies level `n` by `exp(-i n(n+2) t)`
//! (natural units, unit energy scale). At `t = pi` the phases reduce to
//! `(-1)^n` because `n(n+2) = n` mod 2, and that parity gate acts as a CNOT
//! on a 2-qubit basis coded into levels {0, 2, 4, 1}: the CNOT eigenvectors
//! map to single levels, so the diagonal phase pattern (+1, +1, +1, -1)
//! reproduces the gate exactly on the coded subspace.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::fock::ModeState;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GateError {
    #[error("dimension must be at least {min}, got {dim}")]
    DimensionTooSmall { dim: usize, min: usize },
}

/// Fock levels carrying the coded 2-qubit subspace, in coded-basis order.
pub const CODED_LEVELS: [usize; 4] = [0, 2, 4, 1];

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Diagonal unitary `diag(exp(-i theta_n))` on the truncated mode space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalUnitary {
    dim: usize,
    phases: Vec<f64>,
}

impl DiagonalUnitary {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Entry `exp(-i theta_n)`.
    pub fn entry(&self, n: usize) -> Complex64 {
        Complex64::new(0.0, -self.phases[n]).exp()
    }

    pub fn apply(&self, state: &ModeState) -> ModeState {
        assert_eq!(self.dim, state.dim(), "dimension mismatch");
        let amps = state
            .amps()
            .iter()
            .enumerate()
            .map(|(n, a)| self.entry(n) * a)
            .collect();
        ModeState::new(amps).expect("dimension preserved")
    }

    /// Group composition: phases add.
    pub fn compose(&self, other: &DiagonalUnitary) -> DiagonalUnitary {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        DiagonalUnitary {
            dim: self.dim,
            phases: self
                .phases
                .iter()
                .zip(&other.phases)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// Free square-well propagator: `theta_n = n(n+2) t`.
pub fn isw_propagator(t: f64, d: usize) -> Result<DiagonalUnitary, GateError> {
    if d < 2 {
        return Err(GateError::DimensionTooSmall { dim: d, min: 2 });
    }
    let phases = (0..d)
        .map(|n| {
            let n = n as f64;
            n * (n + 2.0) * t
        })
        .collect();
    Ok(DiagonalUnitary { dim: d, phases })
}

/// The propagator at `t = pi`: entries `(-1)^n`. Needs the coded levels
/// {0, 1, 2, 4}, hence `d >= 5`.
pub fn cnot_inf(d: usize) -> Result<DiagonalUnitary, GateError> {
    if d < 5 {
        return Err(GateError::DimensionTooSmall { dim: d, min: 5 });
    }
    isw_propagator(std::f64::consts::PI, d)
}

/// Coordinates of a 2-qubit state in the CNOT eigenbasis
/// `{|00>, |01>, (|10>+|11>)/sqrt2, (|11>-|10>)/sqrt2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedTwoQubit {
    pub amps: [Complex64; 4],
}

impl CodedTwoQubit {
    pub fn new(amps: [Complex64; 4]) -> Self {
        CodedTwoQubit { amps }
    }

    /// From computational-basis coordinates `(|00>, |01>, |10>, |11>)`.
    pub fn from_computational(c: &[Complex64; 4]) -> Self {
        CodedTwoQubit {
            amps: [
                c[0],
                c[1],
                (c[2] + c[3]) * SQRT_HALF,
                (c[3] - c[2]) * SQRT_HALF,
            ],
        }
    }

    /// Back to computational-basis coordinates.
    pub fn to_computational(&self) -> [Complex64; 4] {
        [
            self.amps[0],
            self.amps[1],
            (self.amps[2] - self.amps[3]) * SQRT_HALF,
            (self.amps[2] + self.amps[3]) * SQRT_HALF,
        ]
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Isometry from the rotated 2-qubit basis onto well levels: the CNOT
/// eigenvectors go to single levels, `(r1, r2, r3, r4) -> (|0>, |2>, |4>, |1>)`,
/// so computational `|10>` and `|11>` land on `(|4> -+ |1>)/sqrt2`.
pub fn encode_2qubit(q: &CodedTwoQubit, d: usize) -> Result<ModeState, GateError> {
    if d < 5 {
        return Err(GateError::DimensionTooSmall { dim: d, min: 5 });
    }
    let mut amps = vec![Complex64::ZERO; d];
    for (coord, &level) in q.amps.iter().zip(CODED_LEVELS.iter()) {
        amps[level] = *coord;
    }
    Ok(ModeState::new(amps).expect("d >= 5"))
}

/// Project a mode state onto the coded subspace. Returns the rotated-basis
/// coordinates and the leakage (probability mass outside the subspace).
pub fn decode_2qubit(state: &ModeState) -> (CodedTwoQubit, f64) {
    let amp_at = |level: usize| {
        if level < state.dim() {
            state.amps()[level]
        } else {
            Complex64::ZERO
        }
    };
    let amps = CODED_LEVELS.map(amp_at);
    let coded = CodedTwoQubit { amps };
    let leakage = (state.norm_sq() - coded.norm_sq()).max(0.0);
    (coded, leakage)
}

/// `decode . cnot_inf . encode` on rotated-basis coordinates.
pub fn apply_coded_cnot(q: &CodedTwoQubit, d: usize) -> Result<(CodedTwoQubit, f64), GateError> {
    let gate = cnot_inf(d)?;
    let encoded = encode_2qubit(q, d)?;
    Ok(decode_2qubit(&gate.apply(&encoded)))
}

/// Reference truth table `|x, y> -> |x, x xor y>` on computational
/// coordinates.
pub fn cnot_reference(c: &[Complex64; 4]) -> [Complex64; 4] {
    [c[0], c[1], c[3], c[2]]
}
