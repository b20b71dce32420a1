//! Noise sweeps over the Cartesian product of the configured grid.

use cluster_sim_core::{run_experiment, NoiseParams, RetryPolicy, TrialReport};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::format::{round12, sig12};
use crate::CliError;

pub const CSV_HEADER: &str =
    "n,p_erase,p_dephase,p_cnot,policy,trials,seed,mean_fidelity,stderr_fidelity,mean_attempts";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub report: TrialReport,
}

/// Grid points in output order: policy, then `p_erase` outermost down to
/// `p_cnot` innermost.
pub fn grid_points(config: &RunConfig) -> Vec<NoiseParams> {
    let mut out = Vec::with_capacity(config.grid.len() * config.policies.len());
    for &policy in &config.policies {
        for &p_erase in &config.grid.p_erase {
            for &p_dephase in &config.grid.p_dephase {
                for &p_cnot in &config.grid.p_cnot {
                    out.push(NoiseParams {
                        p_erase,
                        p_dephase,
                        p_cnot,
                        policy,
                    });
                }
            }
        }
    }
    out
}

/// One [`TrialReport`] per grid point, all drawn from the configured seed.
pub fn run_sweep(config: &RunConfig) -> Result<Vec<SweepRow>, CliError> {
    grid_points(config)
        .iter()
        .map(|p| {
            let report = run_experiment(config.n_sites, p, config.trials, config.seed)?;
            Ok(SweepRow { report })
        })
        .collect()
}

#[derive(Serialize)]
struct JsonRow {
    n: usize,
    p_erase: f64,
    p_dephase: f64,
    p_cnot: f64,
    policy: RetryPolicy,
    trials: u64,
    seed: u64,
    mean_fidelity: f64,
    stderr_fidelity: f64,
    mean_attempts: f64,
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for SweepRow { report: r } in rows {
        let fields = [
            r.n_sites.to_string(),
            sig12(r.params.p_erase),
            sig12(r.params.p_dephase),
            sig12(r.params.p_cnot),
            r.params.policy.as_str().to_string(),
            r.trials.to_string(),
            r.seed.to_string(),
            sig12(r.mean_fidelity),
            sig12(r.stderr_fidelity),
            sig12(r.mean_attempts),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn render_json(rows: &[SweepRow]) -> String {
    let json: Vec<JsonRow> = rows
        .iter()
        .map(|SweepRow { report: r }| JsonRow {
            n: r.n_sites,
            p_erase: round12(r.params.p_erase),
            p_dephase: round12(r.params.p_dephase),
            p_cnot: round12(r.params.p_cnot),
            policy: r.params.policy,
            trials: r.trials,
            seed: r.seed,
            mean_fidelity: round12(r.mean_fidelity),
            stderr_fidelity: round12(r.stderr_fidelity),
            mean_attempts: round12(r.mean_attempts),
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&json).expect("serializable rows");
    s.push('\n');
    s
}

pub fn render(rows: &[SweepRow], format: Format) -> String {
    match format {
        Format::Csv => render_csv(rows),
        Format::Json => render_json(rows),
    }
}
