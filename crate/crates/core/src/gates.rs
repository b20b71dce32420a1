//! Laser-pulse gate set on the `{H, V}` subspace.
//!
//! All matrices are real with entries in `{0, ±1, ±1/√2}` and act as
//! identity on the vacuum level. The CNOT fires when the control holds a
//! `V` excitation and is the identity whenever either site is empty.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::LazyLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::state::{
    digit, embed_qubit, unitarity_deviation, Pauli, SiteLevel, SiteMatrix, StateVector, TOLERANCE,
};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// The single-site pulses, built once and checked unitary on first use.
pub struct GateSet {
    /// `H -> (H - V)/√2`, `V -> (H + V)/√2`.
    pub hadamard: SiteMatrix,
    /// `H <-> V`.
    pub x_swap: SiteMatrix,
    /// Sign flip on `V`.
    pub z_flip: SiteMatrix,
}

impl GateSet {
    fn build() -> Self {
        let s = FRAC_1_SQRT_2;
        let set = GateSet {
            hadamard: embed_qubit([[re(s), re(s)], [re(-s), re(s)]]),
            x_swap: Pauli::X.matrix(),
            z_flip: Pauli::Z.matrix(),
        };
        for (name, m) in set.named() {
            let dev = unitarity_deviation(m);
            assert!(dev <= TOLERANCE, "gate {name} not unitary: {dev:e}");
        }
        set
    }

    pub fn named(&self) -> [(&'static str, &SiteMatrix); 3] {
        [
            ("hadamard", &self.hadamard),
            ("x_swap", &self.x_swap),
            ("z_flip", &self.z_flip),
        ]
    }
}

pub static GATES: LazyLock<GateSet> = LazyLock::new(GateSet::build);

pub fn hadamard(state: &mut StateVector, site: usize) -> Result<()> {
    state.apply_site_matrix(site, &GATES.hadamard, false)
}

pub fn x_swap(state: &mut StateVector, site: usize) -> Result<()> {
    state.apply_site_matrix(site, &GATES.x_swap, false)
}

/// Phase kick: `V -> -V`, `H` and vacuum fixed.
pub fn z_flip(state: &mut StateVector, site: usize) -> Result<()> {
    state.apply_site_matrix(site, &GATES.z_flip, false)
}

/// Flips the target between `H` and `V` on every branch where the control
/// is `V`. Branches with vacuum on either site are untouched.
pub fn cnot(state: &mut StateVector, control: usize, target: usize) -> Result<()> {
    state.check_site(control)?;
    state.check_site(target)?;
    if control == target {
        return Err(SimError::SameSite(control));
    }
    let t_stride = 3usize.pow(target as u32 - 1);
    let amps = state.amplitudes_mut();
    for i in 0..amps.len() {
        if digit(i, control) == SiteLevel::V.index() && digit(i, target) == SiteLevel::H.index() {
            amps.swap(i, i + t_stride);
        }
    }
    Ok(())
}

/// One protocol instruction. Sites are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateStep {
    /// Reset the whole register to one `V` excitation per site.
    Prepare,
    Hadamard(usize),
    X(usize),
    Cnot { control: usize, target: usize },
}

impl GateStep {
    /// CNOT step; rejects `control == target`.
    pub fn cnot(control: usize, target: usize) -> Result<Self> {
        if control == target {
            return Err(SimError::SameSite(control));
        }
        Ok(GateStep::Cnot { control, target })
    }

    pub fn sites(&self) -> Vec<usize> {
        match *self {
            GateStep::Prepare => Vec::new(),
            GateStep::Hadamard(s) | GateStep::X(s) => vec![s],
            GateStep::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn is_cnot(&self) -> bool {
        matches!(self, GateStep::Cnot { .. })
    }
}

impl fmt::Display for GateStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateStep::Prepare => write!(f, "PREPARE"),
            GateStep::Hadamard(s) => write!(f, "H({s})"),
            GateStep::X(s) => write!(f, "X({s})"),
            GateStep::Cnot { control, target } => write!(f, "CNOT({control},{target})"),
        }
    }
}

/// Dispatches `step` to the matching gate.
pub fn apply_step(state: &mut StateVector, step: &GateStep) -> Result<()> {
    match *step {
        GateStep::Prepare => {
            *state = StateVector::basis(&vec![SiteLevel::V; state.n_sites()])?;
            Ok(())
        }
        GateStep::Hadamard(site) => hadamard(state, site),
        GateStep::X(site) => x_swap(state, site),
        GateStep::Cnot { control, target } => cnot(state, control, target),
    }
}

/// Dense `9 x 9` matrix of a two-site operation on a two-site register,
/// built column by column from basis inputs. `m[row][col]`.
pub fn two_site_matrix<F>(mut op: F) -> Result<Vec<Vec<Complex64>>>
where
    F: FnMut(&mut StateVector) -> Result<()>,
{
    let mut m = vec![vec![Complex64::new(0.0, 0.0); 9]; 9];
    for col in 0..9 {
        let mut s = StateVector::basis(&crate::state::decode(col, 2))?;
        op(&mut s)?;
        for (row, a) in m.iter_mut().zip(s.amplitudes()) {
            row[col] = *a;
        }
    }
    Ok(m)
}

/// Largest entry of `|m^dagger m - I|` for a square dense matrix.
pub fn dense_unitarity_deviation(m: &[Vec<Complex64>]) -> f64 {
    let n = m.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let acc: Complex64 = (0..n).map(|k| m[k][i].conj() * m[k][j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((acc - target).norm());
        }
    }
    worst
}
