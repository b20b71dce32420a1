//! Linear-chain cluster construction.
//!
//! Every ensemble starts with one `v` excitation. The first pair-block acts
//! on ensembles 1 and 2:
//!
//! ```text
//! H(1); CNOT(1,2); X(1); H(2)
//! ```
//!
//! and leaves site 2 in the `(h + v)` form a fresh site reaches after its
//! first Hadamard, with site 1's `h` branch carrying a `Z` on site 2.
//! Each later block `(k, k+1)` therefore starts at the CNOT:
//!
//! ```text
//! CNOT(k,k+1); X(k+1); H(k+1)
//! ```
//!
//! The swap goes on the target because site `k` is already correlated with
//! site `k - 1`; on the first block both choices give the same state.
//! The chain output is compared against [`reference_cluster`], which writes
//! down the amplitudes directly from the product form
//! `2^{-N/2} (h_1 Z_2 + v_1)(h_2 Z_3 + v_2) ... (h_N + v_N)`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Range;

use num_complex::Complex64;

use crate::error::{Result, SimError};
use crate::gates::{apply_step, GateStep};
use crate::state::{decode, dimension, Pauli, PauliString, SiteLevel, StateVector};

/// Ordered gate sequence for an `n`-site chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolPlan {
    n_sites: usize,
    steps: Vec<GateStep>,
    blocks: Vec<Range<usize>>,
}

impl ProtocolPlan {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// All steps, starting with [`GateStep::Prepare`].
    pub fn steps(&self) -> &[GateStep] {
        &self.steps
    }

    /// Gate steps after the initial preparation.
    pub fn gate_steps(&self) -> &[GateStep] {
        &self.steps[1..]
    }

    /// Step ranges (into [`Self::steps`]) of each pair-block, in order.
    /// Block `k` (0-based) touches sites `k + 1` and `k + 2`.
    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    pub fn block_steps(&self, block: usize) -> &[GateStep] {
        &self.steps[self.blocks[block].clone()]
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(SimError::TooFewSites(n));
    }
    Ok(())
}

pub fn build_plan(n: usize) -> Result<ProtocolPlan> {
    check_n(n)?;
    let mut steps = vec![GateStep::Prepare];
    let mut blocks = Vec::with_capacity(n - 1);
    for k in 1..n {
        let start = steps.len();
        if k == 1 {
            steps.extend([
                GateStep::Hadamard(1),
                GateStep::cnot(1, 2)?,
                GateStep::X(1),
                GateStep::Hadamard(2),
            ]);
        } else {
            steps.extend([
                GateStep::cnot(k, k + 1)?,
                GateStep::X(k + 1),
                GateStep::Hadamard(k + 1),
            ]);
        }
        blocks.push(start..steps.len());
    }
    Ok(ProtocolPlan {
        n_sites: n,
        steps,
        blocks,
    })
}

/// The initial register: one `v` excitation on every site.
pub fn initial_state(n: usize) -> Result<StateVector> {
    StateVector::basis(&vec![SiteLevel::V; n])
}

/// Runs `plan` from the initial state, routing every step through `exec`.
pub fn run_plan_with<F>(plan: &ProtocolPlan, mut exec: F) -> Result<StateVector>
where
    F: FnMut(&mut StateVector, &GateStep) -> Result<()>,
{
    let mut state = initial_state(plan.n_sites)?;
    for step in plan.steps() {
        exec(&mut state, step)?;
    }
    Ok(state)
}

/// Builds and runs the `n`-site chain with the ideal gate set.
pub fn run_protocol(n: usize) -> Result<StateVector> {
    let plan = build_plan(n)?;
    let state = run_plan_with(&plan, apply_step)?;
    assert_eq!(
        state.vac_population(),
        0.0,
        "ideal protocol populated the vacuum level"
    );
    Ok(state)
}

/// Magnitude `2^{-n/2}`, accumulated one `1/√2` factor at a time.
pub fn cluster_amplitude_magnitude(n: usize) -> f64 {
    (0..n).fold(1.0, |acc, _| acc * FRAC_1_SQRT_2)
}

/// Sign of the closed-form cluster amplitude on a `{H, V}` configuration:
/// each `H` on site `i` contributes the `Z` eigenvalue of site `i + 1`.
pub fn cluster_sign(levels: &[SiteLevel]) -> f64 {
    levels
        .windows(2)
        .filter(|w| w[0] == SiteLevel::H)
        .map(|w| w[1].z_sign())
        .product()
}

/// Closed-form chain cluster state, built without gates.
pub fn reference_cluster(n: usize) -> Result<StateVector> {
    check_n(n)?;
    let mag = cluster_amplitude_magnitude(n);
    let amps = (0..dimension(n))
        .map(|i| {
            let levels = decode(i, n);
            if levels.contains(&SiteLevel::Vac) {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(cluster_sign(&levels) * mag, 0.0)
            }
        })
        .collect();
    StateVector::from_amplitudes(n, amps)
}

/// `Z_{a-1} X_a Z_{a+1}` with the out-of-range factors dropped.
pub fn cluster_stabilizer(n: usize, site: usize) -> PauliString {
    let mut ops = vec![(site, Pauli::X)];
    if site > 1 {
        ops.push((site - 1, Pauli::Z));
    }
    if site < n {
        ops.push((site + 1, Pauli::Z));
    }
    PauliString::with_ops(n, &ops)
}

/// Eigenvalue of [`cluster_stabilizer`] on the chain output: `+1` on the
/// first site, `-1` on every later one. The chain state differs from the
/// CZ-on-`|+>` cluster by a `Z` on sites `2..=n`, which flips the `X` of
/// those stabilizers.
pub fn stabilizer_sign(site: usize) -> i8 {
    if site == 1 {
        1
    } else {
        -1
    }
}

/// Expectations of every boundary-trimmed stabilizer on `state`.
pub fn stabilizer_expectations(state: &StateVector) -> Result<Vec<f64>> {
    let n = state.n_sites();
    (1..=n)
        .map(|a| state.expectation(&cluster_stabilizer(n, a)))
        .collect()
}
