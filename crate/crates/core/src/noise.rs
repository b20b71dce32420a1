//! Monte Carlo trajectories of the chain protocol under noise.
//!
//! Three knobs per trajectory:
//!
//! * heralded CNOT success with probability `p_cnot` per attempt, with
//!   either a retry of the failed gate or a restart of the whole register;
//! * a `Z` kick with probability `p_dephase` on each of the two sites of a
//!   pair-block, right after that block;
//! * loss of each excitation with probability `p_erase` once the chain is
//!   complete, which empties the site into the vacuum level.
//!
//! None of the random decisions depend on the quantum state, so a
//! trajectory is sampled in two phases: the random stream fixes a
//! [`TrajectoryEvents`] record, and the state is then obtained by replaying
//! the plan with those events. [`run_experiment`] evaluates each distinct
//! event record once.
//!
//! Trial `t` of an experiment with seed `s` draws from
//! `ChaCha20Rng::seed_from_u64(s)` switched to stream `t`. Reports are a
//! pure function of `(n, params, trials, seed)`, whatever the thread count.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::gates::{apply_step, z_flip};
use crate::protocol::{build_plan, reference_cluster, stabilizer_expectations, ProtocolPlan};
use crate::state::{SiteLevel, StateVector};
use crate::verify::fidelity;

/// What happens after a failed heralded CNOT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetryPolicy {
    /// Failure leaves the register intact; repeat only the gate.
    RetryGate,
    /// Failure destroys the register; re-prepare and replay from step one.
    RestartAll,
}

impl RetryPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            RetryPolicy::RetryGate => "retry_gate",
            RetryPolicy::RestartAll => "restart_all",
        }
    }
}

impl std::str::FromStr for RetryPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "retry_gate" | "retry" => Ok(RetryPolicy::RetryGate),
            "restart_all" | "restart" => Ok(RetryPolicy::RestartAll),
            other => Err(format!("unknown policy {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub p_erase: f64,
    pub p_dephase: f64,
    pub p_cnot: f64,
    pub policy: RetryPolicy,
}

impl NoiseParams {
    pub fn new(p_erase: f64, p_dephase: f64, p_cnot: f64, policy: RetryPolicy) -> Result<Self> {
        let p = Self {
            p_erase,
            p_dephase,
            p_cnot,
            policy,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn noiseless() -> Self {
        Self {
            p_erase: 0.0,
            p_dephase: 0.0,
            p_cnot: 1.0,
            policy: RetryPolicy::RetryGate,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(SimError::InvalidNoise { name, value: v })
            }
        };
        unit("p_erase", self.p_erase)?;
        unit("p_dephase", self.p_dephase)?;
        if !(self.p_cnot > 0.0 && self.p_cnot <= 1.0) {
            return Err(SimError::InvalidNoise {
                name: "p_cnot",
                value: self.p_cnot,
            });
        }
        Ok(())
    }
}

/// Random decisions of one trajectory. Kicks and erasures refer to the
/// final, completed pass; kicks from abandoned passes are wiped by the
/// restart.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TrajectoryEvents {
    /// `(block, site)` pairs, block 0-based, site 1-based.
    pub kicks: Vec<(u32, u32)>,
    /// Erased sites, 1-based, ascending.
    pub erased: Vec<u32>,
    /// CNOT attempts across all passes.
    pub attempts: u64,
    /// Passes through the plan; always 1 under [`RetryPolicy::RetryGate`].
    pub passes: u64,
}

impl TrajectoryEvents {
    fn outcome_key(&self) -> OutcomeKey {
        (self.kicks.clone(), self.erased.clone())
    }
}

/// Draws the random decisions for one run of `plan`.
pub fn sample_events<R: Rng + ?Sized>(
    plan: &ProtocolPlan,
    params: &NoiseParams,
    rng: &mut R,
) -> TrajectoryEvents {
    let mut ev = TrajectoryEvents {
        passes: 1,
        ..Default::default()
    };
    'pass: loop {
        ev.kicks.clear();
        for (b, range) in plan.blocks().iter().enumerate() {
            for step in &plan.steps()[range.clone()] {
                if !step.is_cnot() {
                    continue;
                }
                loop {
                    ev.attempts += 1;
                    if rng.random::<f64>() < params.p_cnot {
                        break;
                    }
                    if params.policy == RetryPolicy::RestartAll {
                        ev.passes += 1;
                        continue 'pass;
                    }
                }
            }
            for site in [b + 1, b + 2] {
                if rng.random::<f64>() < params.p_dephase {
                    ev.kicks.push((b as u32, site as u32));
                }
            }
        }
        break;
    }
    for site in 1..=plan.n_sites() {
        if rng.random::<f64>() < params.p_erase {
            ev.erased.push(site as u32);
        }
    }
    ev
}

/// Empties `site` into the vacuum level when `lost`.
///
/// Branches already holding vacuum at `site` are kept and renormalized.
/// When the site carries no vacuum weight the excitation is lowered,
/// `|vac><h| + |vac><v|`, without recording which rail was lost; if the two
/// rails cancel, the `h` rail is lowered alone (then `v`).
pub fn erase_channel(state: &mut StateVector, site: usize, lost: bool) -> Result<()> {
    state.check_site(site)?;
    if !lost {
        return Ok(());
    }
    if state.vac_population_at(site)? > 0.0 {
        state.project_site(site, |l| l == SiteLevel::Vac)?;
        state.normalize();
        return Ok(());
    }
    let stride = 3usize.pow(site as u32 - 1);
    let lower = |from: &[SiteLevel], s: &StateVector| {
        let mut out = s.clone();
        let amps = out.amplitudes_mut();
        for base in (0..amps.len()).step_by(3 * stride) {
            for off in 0..stride {
                let i0 = base + off;
                let mut acc = num_complex::Complex64::new(0.0, 0.0);
                for l in from {
                    acc += amps[i0 + l.index() * stride];
                }
                amps[i0] = acc;
                amps[i0 + stride] = num_complex::Complex64::new(0.0, 0.0);
                amps[i0 + 2 * stride] = num_complex::Complex64::new(0.0, 0.0);
            }
        }
        out
    };
    for rails in [&[SiteLevel::H, SiteLevel::V][..], &[SiteLevel::H], &[SiteLevel::V]] {
        let mut out = lower(rails, state);
        if out.normalize() > crate::state::TOLERANCE {
            *state = out;
            return Ok(());
        }
    }
    unreachable!("a normalized state has weight on some level");
}

/// Replays `plan` with the kicks and erasures recorded in `events`.
pub fn replay(plan: &ProtocolPlan, events: &TrajectoryEvents) -> Result<StateVector> {
    let mut state = crate::protocol::initial_state(plan.n_sites())?;
    apply_step(&mut state, &plan.steps()[0])?;
    for (b, range) in plan.blocks().iter().enumerate() {
        for step in &plan.steps()[range.clone()] {
            apply_step(&mut state, step)?;
        }
        for &(kb, site) in &events.kicks {
            if kb as usize == b {
                z_flip(&mut state, site as usize)?;
            }
        }
    }
    for &site in &events.erased {
        erase_channel(&mut state, site as usize, true)?;
    }
    Ok(state)
}

/// Final state and bookkeeping of one noisy trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub state: StateVector,
    pub attempts: u64,
    pub passes: u64,
    pub events: TrajectoryEvents,
}

pub fn run_trajectory<R: Rng + ?Sized>(
    n: usize,
    params: &NoiseParams,
    rng: &mut R,
) -> Result<Trajectory> {
    params.validate()?;
    let plan = build_plan(n)?;
    let events = sample_events(&plan, params, rng);
    let state = replay(&plan, &events)?;
    Ok(Trajectory {
        state,
        attempts: events.attempts,
        passes: events.passes,
        events,
    })
}

/// Random stream of trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub n_sites: usize,
    pub params: NoiseParams,
    pub trials: u64,
    pub seed: u64,
    pub mean_fidelity: f64,
    pub stderr_fidelity: f64,
    /// CNOT attempts per completed run, across restarts.
    pub mean_attempts: f64,
    pub stderr_attempts: f64,
    /// Passes through the plan per completed run.
    pub mean_passes: f64,
    pub stderr_passes: f64,
    /// Mean of each site's boundary-trimmed `Z X Z` expectation.
    pub stabilizer_means: Vec<f64>,
}

/// Mean and standard error of integer samples, with exact integer sums.
fn count_stats(values: impl Iterator<Item = u64>, trials: u64) -> (f64, f64) {
    let (mut s1, mut s2) = (0u128, 0u128);
    for v in values {
        s1 += v as u128;
        s2 += (v as u128) * (v as u128);
    }
    let t = trials as u128;
    let mean = s1 as f64 / trials as f64;
    if trials < 2 {
        return (mean, 0.0);
    }
    let num = t * s2 - s1 * s1;
    let var = num as f64 / (trials as f64 * (trials - 1) as f64);
    (mean, (var / trials as f64).sqrt())
}

/// Phase kicks and erasures; trials sharing one end in the same state.
type OutcomeKey = (Vec<(u32, u32)>, Vec<u32>);

pub fn run_experiment(
    n: usize,
    params: &NoiseParams,
    trials: u64,
    seed: u64,
) -> Result<TrialReport> {
    params.validate()?;
    if trials == 0 {
        return Err(SimError::NoTrials);
    }
    let plan = build_plan(n)?;
    let reference = reference_cluster(n)?;

    let events: Vec<TrajectoryEvents> = (0..trials)
        .into_par_iter()
        .map(|t| sample_events(&plan, params, &mut trial_rng(seed, t)))
        .collect();

    let mut groups: BTreeMap<OutcomeKey, u64> = BTreeMap::new();
    for ev in &events {
        *groups.entry(ev.outcome_key()).or_default() += 1;
    }
    let keys: Vec<_> = groups.into_iter().collect();
    let evaluated: Vec<(f64, Vec<f64>)> = keys
        .par_iter()
        .map(|((kicks, erased), _)| {
            let ev = TrajectoryEvents {
                kicks: kicks.clone(),
                erased: erased.clone(),
                ..Default::default()
            };
            let state = replay(&plan, &ev)?;
            Ok((fidelity(&reference, &state)?, stabilizer_expectations(&state)?))
        })
        .collect::<Result<_>>()?;

    let t = trials as f64;
    let mut mean_fidelity = 0.0;
    let mut stabilizer_means = vec![0.0; n];
    for ((_, count), (f, stab)) in keys.iter().zip(&evaluated) {
        let w = *count as f64 / t;
        mean_fidelity += w * f;
        for (acc, s) in stabilizer_means.iter_mut().zip(stab) {
            *acc += w * s;
        }
    }
    let stderr_fidelity = if trials < 2 {
        0.0
    } else {
        let ss: f64 = keys
            .iter()
            .zip(&evaluated)
            .map(|((_, c), (f, _))| *c as f64 * (f - mean_fidelity).powi(2))
            .sum();
        (ss / (t - 1.0) / t).sqrt()
    };
    let (mean_attempts, stderr_attempts) = count_stats(events.iter().map(|e| e.attempts), trials);
    let (mean_passes, stderr_passes) = count_stats(events.iter().map(|e| e.passes), trials);

    Ok(TrialReport {
        n_sites: n,
        params: *params,
        trials,
        seed,
        mean_fidelity: mean_fidelity.clamp(0.0, 1.0),
        stderr_fidelity,
        mean_attempts,
        stderr_attempts,
        mean_passes,
        stderr_passes,
        stabilizer_means,
    })
}
