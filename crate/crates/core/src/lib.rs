//! Cluster-state generation on dual-rail atomic ensembles.
//!
//! Each ensemble stores one collective excitation in one of two modes,
//! `h` or `v`, or is empty. [`protocol::run_protocol`] builds the linear
//! cluster state by pairwise pulses and a heralded CNOT,
//! [`protocol::reference_cluster`] writes the same state down in closed
//! form, [`verify`] checks entanglement properties and [`noise`] runs
//! seeded Monte Carlo trajectories with loss, dephasing and gate failure.

pub mod error;
pub mod gates;
pub mod noise;
pub mod protocol;
pub mod state;
pub mod verify;

pub use error::{Result, SimError};
pub use gates::{apply_step, cnot, hadamard, x_swap, z_flip, GateStep, GATES};
pub use noise::{
    erase_channel, run_experiment, run_trajectory, trial_rng, NoiseParams, RetryPolicy,
    TrialReport, Trajectory,
};
pub use protocol::{
    build_plan, cluster_stabilizer, reference_cluster, run_protocol, stabilizer_sign,
    ProtocolPlan,
};
pub use state::{
    basis_state, expectation, inner_product, Pauli, PauliString, SiteLevel, SiteMatrix,
    StateVector,
};
pub use verify::{
    bell_extraction, bell_extraction_check, entanglement_entropy, fidelity, measure_pauli, Basis,
    MeasurementRecord,
};
