//! Acceptance gate. Each test prints a single `criterion N ... PASS|FAIL`
//! line before asserting; run with `--nocapture` to see the summary.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use cluster_sim_cli::{parse_config, run_sweep, sweep};
use cluster_sim_core::gates::{dense_unitarity_deviation, two_site_matrix};
use cluster_sim_core::state::{matmul, max_entry_diff, unitarity_deviation};
use cluster_sim_core::{
    basis_state, bell_extraction, bell_extraction_check, cluster_stabilizer, cnot, fidelity,
    hadamard, reference_cluster, run_experiment, run_protocol, NoiseParams, Pauli, RetryPolicy,
    SiteLevel, GATES,
};

const TOL: f64 = 1e-12;

fn report(id: u32, name: &str, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!("criterion {id} {name}: {status} ({detail})");
    assert!(ok, "criterion {id} {name} failed: {detail}");
}

#[test]
fn criterion_1_oracle_equivalence() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 2..=10 {
        let f = fidelity(&run_protocol(n).unwrap(), &reference_cluster(n).unwrap()).unwrap();
        worst = worst.max((f - 1.0).abs());
    }
    let elapsed = start.elapsed();
    report(
        1,
        "oracle_equivalence",
        worst < TOL && elapsed < Duration::from_secs(5),
        &format!("n=2..10, max |1-F| = {worst:e}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_2_two_site_amplitudes() {
    use SiteLevel::{H, V};
    let s = run_protocol(2).unwrap();
    let want = [([H, H], 0.5), ([H, V], -0.5), ([V, H], 0.5), ([V, V], 0.5)];
    let worst = want
        .iter()
        .map(|(levels, a)| (s.amplitude(levels).unwrap() - a).norm())
        .fold(0.0, f64::max);
    report(2, "two_site_amplitudes", worst < TOL, &format!("max deviation {worst:e}"));
}

#[test]
fn criterion_3_cnot_bell_pair() {
    use SiteLevel::{H, V};
    let mut s = basis_state(&[V, V]).unwrap();
    hadamard(&mut s, 1).unwrap();
    let plus = s.clone();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let input_dev = (plus.amplitude(&[H, V]).unwrap().re - r).abs()
        + (plus.amplitude(&[V, V]).unwrap().re - r).abs();
    cnot(&mut s, 1, 2).unwrap();
    let mut worst: f64 = input_dev;
    for a in [H, V] {
        for b in [H, V] {
            let want = if a != b { r } else { 0.0 };
            worst = worst.max((s.amplitude(&[a, b]).unwrap() - want).norm());
        }
    }
    report(3, "cnot_bell_pair", worst < TOL, &format!("max deviation {worst:e}"));
}

fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/stabilizer_signs.csv")
}

#[test]
fn criterion_4_stabilizers() {
    let mut worst: f64 = 0.0;
    let mut table = String::from("n,site,sign\n");
    for n in 2..=8 {
        let s = run_protocol(n).unwrap();
        for site in 1..=n {
            let e = s.expectation(&cluster_stabilizer(n, site)).unwrap();
            worst = worst.max((e.abs() - 1.0).abs());
            table.push_str(&format!("{n},{site},{:+}\n", e.round() as i32));
        }
    }
    let fixture = std::fs::read_to_string(fixture_path()).unwrap();
    report(
        4,
        "stabilizers",
        worst < TOL && table == fixture,
        &format!("max ||<K>|-1| = {worst:e}, sign table matches fixture: {}", table == fixture),
    );
}

#[test]
fn criterion_5_bell_extraction() {
    let mut ok = true;
    let mut min_entropy = f64::INFINITY;
    for n in 3..=6 {
        ok &= bell_extraction_check(n).unwrap();
        let b = bell_extraction(&run_protocol(n).unwrap()).unwrap();
        ok &= b.branches.len() == 1 << (n - 2);
        min_entropy = min_entropy.min(b.min_entropy());
    }
    ok &= min_entropy >= 1.0 - 1e-9;
    report(5, "bell_extraction", ok, &format!("n=3..6, min entropy {min_entropy:.12}"));
}

#[test]
fn criterion_6_erasure_law() {
    let mut ok = true;
    let mut worst_z: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    for n in [2, 3, 4] {
        for p in [0.05, 0.1, 0.2] {
            let params = NoiseParams::new(p, 0.0, 1.0, RetryPolicy::RetryGate).unwrap();
            let start = Instant::now();
            let r = run_experiment(n, &params, 100_000, 42).unwrap();
            slowest = slowest.max(start.elapsed());
            let expected = (1.0 - p).powi(n as i32);
            let z = (r.mean_fidelity - expected).abs() / r.stderr_fidelity;
            worst_z = worst_z.max(z);
            ok &= z <= 4.0;
        }
    }
    ok &= slowest < Duration::from_secs(60);
    report(
        6,
        "erasure_law",
        ok,
        &format!("9 points x 1e5 trials, worst |z| = {worst_z:.3}, slowest {slowest:.2?}"),
    );
}

#[test]
fn criterion_7_retry_policies() {
    let (n, p) = (4, 0.5);
    let retry = NoiseParams::new(0.0, 0.0, p, RetryPolicy::RetryGate).unwrap();
    let r = run_experiment(n, &retry, 100_000, 42).unwrap();
    let want_attempts = (n - 1) as f64 / p;
    let z_retry = (r.mean_attempts - want_attempts).abs() / r.stderr_attempts;

    let restart = NoiseParams::new(0.0, 0.0, p, RetryPolicy::RestartAll).unwrap();
    let r2 = run_experiment(n, &restart, 100_000, 42).unwrap();
    let want_passes = p.powi(-(n as i32 - 1));
    let z_restart = (r2.mean_passes - want_passes).abs() / r2.stderr_passes;

    report(
        7,
        "retry_policies",
        z_retry <= 4.0 && z_restart <= 4.0,
        &format!(
            "retry_gate attempts {:.4} vs {want_attempts} (|z| {z_retry:.3}); \
             restart_all passes {:.4} vs {want_passes} (|z| {z_restart:.3})",
            r.mean_attempts, r2.mean_passes
        ),
    );
}

const SWEEP_ARGS: [&str; 14] = [
    "--mode", "sweep", "--n", "4", "--p-erase", "0,0.1", "--p-dephase", "0,0.05",
    "--p-cnot", "1,0.6", "--trials", "2000", "--seed", "7",
];

fn csv_in_pool(threads: usize) -> String {
    let mut args = vec!["cluster-sim"];
    args.extend_from_slice(&SWEEP_ARGS);
    let config = parse_config(args, None).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| sweep::render_csv(&run_sweep(&config).unwrap()))
}

fn csv_from_binary(dir: &std::path::Path, tag: &str) -> Vec<u8> {
    let out = dir.join(format!("{tag}.csv"));
    let status = Command::new(env!("CARGO_BIN_EXE_cluster-sim"))
        .args(SWEEP_ARGS)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    std::fs::read(out).unwrap()
}

#[test]
fn criterion_8_determinism() {
    let one = csv_in_pool(1);
    let four = csv_in_pool(4);
    let dir = tempfile::tempdir().unwrap();
    let a = csv_from_binary(dir.path(), "a");
    let b = csv_from_binary(dir.path(), "b");
    let threads_equal = one == four;
    let runs_equal = a == b && a == one.as_bytes();
    report(
        8,
        "determinism",
        threads_equal && runs_equal,
        &format!("1 vs 4 threads identical: {threads_equal}, two runs identical: {runs_equal}"),
    );
}

#[test]
fn criterion_9_gate_algebra() {
    let identity = Pauli::I.matrix();
    let h = &GATES.hadamard;
    let x = &GATES.x_swap;
    let z = &GATES.z_flip;

    let unitary = GATES.named().iter().all(|(_, m)| unitarity_deviation(m) < TOL);
    let cnot_m = two_site_matrix(|s| cnot(s, 1, 2)).unwrap();
    let cnot_unitary = dense_unitarity_deviation(&cnot_m) < TOL;
    let cnot2 = two_site_matrix(|s| {
        cnot(s, 1, 2)?;
        cnot(s, 1, 2)
    })
    .unwrap();
    let cnot_sq = cnot2.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, a)| (a.re - if i == j { 1.0 } else { 0.0 }).abs() < TOL && a.im.abs() < TOL)
    });
    let x_sq = max_entry_diff(&matmul(x, x), &identity) < TOL;
    let h_sq = max_entry_diff(&matmul(h, h), &identity) < TOL;
    let hxh = max_entry_diff(&matmul(h, &matmul(x, h)), z) < TOL;

    report(
        9,
        "gate_algebra",
        unitary && cnot_unitary && cnot_sq && x_sq && h_sq && hxh,
        &format!(
            "unitary {}, CNOT^2=I {cnot_sq}, X^2=I {x_sq}, H^2=I {h_sq}, HXH=Z {hxh}",
            unitary && cnot_unitary
        ),
    );
}
