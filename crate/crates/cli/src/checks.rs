//! The `verify` suite: one row per check on the `n`-site chain.

use cluster_sim_core::protocol::{
    build_plan, cluster_amplitude_magnitude, reference_cluster, run_plan_with,
    stabilizer_expectations, stabilizer_sign,
};
use cluster_sim_core::state::{decode, SiteLevel, TOLERANCE};
use cluster_sim_core::verify::{bell_extraction, fidelity};
use cluster_sim_core::{apply_step, GateStep, StateVector};
use serde::Serialize;

use crate::config::{Fault, Format};
use crate::format::{round12, sig12};
use crate::CliError;

pub const VERIFY_HEADER: &str = "check,detail,deviation,status";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

impl CheckStatus {
    fn from_bool(ok: bool) -> Self {
        if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skip => "SKIP",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub check: String,
    pub detail: String,
    pub deviation: f64,
    pub status: CheckStatus,
}

impl CheckRow {
    fn new(check: &str, detail: String, deviation: f64, ok: bool) -> Self {
        Self {
            check: check.into(),
            detail,
            deviation,
            status: CheckStatus::from_bool(ok),
        }
    }
}

fn chain_state(n: usize, fault: Option<Fault>) -> Result<StateVector, CliError> {
    let plan = build_plan(n)?;
    let state = run_plan_with(&plan, |s, step| match (fault, step) {
        (Some(Fault::DropSwap), GateStep::X(_)) => Ok(()),
        _ => apply_step(s, step),
    })?;
    Ok(state)
}

/// Runs every check for an `n`-site chain. `fault` swaps in a broken gate.
pub fn run_checks(n: usize, fault: Option<Fault>) -> Result<Vec<CheckRow>, CliError> {
    let state = chain_state(n, fault)?;
    let reference = reference_cluster(n)?;
    let mut rows = Vec::new();

    let amp_dev = state
        .amplitudes()
        .iter()
        .zip(reference.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    rows.push(CheckRow::new(
        "oracle_equivalence",
        "max amplitude deviation < 1e-12".into(),
        amp_dev,
        amp_dev < TOLERANCE,
    ));

    let f_dev = 1.0 - fidelity(&state, &reference)?;
    rows.push(CheckRow::new(
        "oracle_fidelity",
        "1 - fidelity < 1e-12".into(),
        f_dev,
        f_dev < TOLERANCE,
    ));

    let stab = stabilizer_expectations(&state)?;
    let mag_dev = stab.iter().map(|e| (e.abs() - 1.0).abs()).fold(0.0, f64::max);
    rows.push(CheckRow::new(
        "stabilizer_magnitudes",
        format!("{n} Z-X-Z strings |<K>| = 1"),
        mag_dev,
        mag_dev < TOLERANCE,
    ));
    let sign_dev = stab
        .iter()
        .enumerate()
        .map(|(a, e)| (e - stabilizer_sign(a + 1) as f64).abs())
        .fold(0.0, f64::max);
    rows.push(CheckRow::new(
        "stabilizer_signs",
        "site 1 +1 and sites 2..n -1".into(),
        sign_dev,
        sign_dev < TOLERANCE,
    ));

    let mag = cluster_amplitude_magnitude(n);
    let mut uni_dev: f64 = 0.0;
    for (i, a) in state.amplitudes().iter().enumerate() {
        let dev = if decode(i, n).contains(&SiteLevel::Vac) {
            a.norm()
        } else {
            (a.norm() - mag).abs()
        };
        uni_dev = uni_dev.max(dev);
    }
    rows.push(CheckRow::new(
        "amplitude_uniformity",
        format!("2^{n} amplitudes of magnitude 2^(-{n}/2)"),
        uni_dev,
        uni_dev < TOLERANCE,
    ));

    let vac = state.vac_population();
    rows.push(CheckRow::new(
        "vac_population",
        "vacuum weight exactly 0".into(),
        vac,
        vac == 0.0,
    ));

    if n >= 3 {
        let bell = bell_extraction(&state)?;
        let dev = (1.0 - bell.min_entropy()).max(0.0);
        rows.push(CheckRow::new(
            "bell_extraction",
            format!("{} branches", bell.branches.len()),
            dev,
            bell.passed() && bell.branches.len() == 1 << (n - 2),
        ));
    } else {
        rows.push(CheckRow {
            check: "bell_extraction".into(),
            detail: "needs n >= 3".into(),
            deviation: 0.0,
            status: CheckStatus::Skip,
        });
    }
    Ok(rows)
}

pub fn render(rows: &[CheckRow], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from(VERIFY_HEADER);
            out.push('\n');
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    r.check,
                    r.detail,
                    sig12(r.deviation),
                    r.status.as_str()
                ));
            }
            out
        }
        Format::Json => {
            let rounded: Vec<CheckRow> = rows
                .iter()
                .map(|r| CheckRow {
                    deviation: round12(r.deviation),
                    ..r.clone()
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&rounded).expect("serializable rows");
            s.push('\n');
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row<'a>(rows: &'a [CheckRow], name: &str) -> &'a CheckRow {
        rows.iter().find(|r| r.check == name).unwrap()
    }

    #[test]
    fn two_site_suite_passes() {
        let rows = run_checks(2, None).unwrap();
        let oracle = row(&rows, "oracle_equivalence");
        assert_eq!(oracle.status, CheckStatus::Pass);
        assert!(oracle.deviation < 1e-12);
        assert_eq!(row(&rows, "bell_extraction").status, CheckStatus::Skip);
        assert!(rows.iter().all(|r| r.status != CheckStatus::Fail));
    }

    #[test]
    fn five_site_bell_row() {
        let rows = run_checks(5, None).unwrap();
        let bell = row(&rows, "bell_extraction");
        assert_eq!(bell.detail, "8 branches");
        assert_eq!(bell.status, CheckStatus::Pass);
        assert!(rows.iter().all(|r| r.status == CheckStatus::Pass));
    }

    #[test]
    fn fault_hook_fails_suite() {
        let rows = run_checks(2, Some(Fault::DropSwap)).unwrap();
        assert_eq!(row(&rows, "oracle_equivalence").status, CheckStatus::Fail);
    }

    #[test]
    fn csv_rendering() {
        let rows = run_checks(2, None).unwrap();
        let csv = render(&rows, Format::Csv);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(VERIFY_HEADER));
        assert!(csv.contains("oracle_equivalence,max amplitude deviation < 1e-12,0.0,PASS\n"));
        let json: serde_json::Value = serde_json::from_str(&render(&rows, Format::Json)).unwrap();
        assert_eq!(json[0]["status"], "PASS");
    }
}
