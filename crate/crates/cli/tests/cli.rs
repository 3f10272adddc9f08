//! End-to-end checks of the binary: exit codes, artifact shapes, and
//! the agreement between the JSON and CSV emissions.

// Frozen reference energies keep their full printed precision.
#![allow(clippy::excessive_precision)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rmdirac"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawning the binary")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

fn csv_column(csv: &str, index: usize) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|line| {
            line.split(',')
                .nth(index)
                .expect("column present")
                .parse()
                .expect("numeric field")
        })
        .collect()
}

/// Strict sign changes above a small fraction of the peak, mirroring
/// the node rule of the library.
fn interior_sign_changes(values: &[f64]) -> usize {
    let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let floor = 1e-8 * peak;
    let mut flips = 0;
    let mut last = 0i8;
    for &v in values {
        if v.abs() <= floor {
            continue;
        }
        let sign = if v > 0.0 { 1 } else { -1 };
        if last != 0 && sign != last {
            flips += 1;
        }
        last = sign;
    }
    flips
}

const TENSOR_FREE_ROOTS: [f64; 3] = [5.6747902696623882, 6.5973117198749591, 6.9914292326438705];

#[test]
fn spectrum_writes_matching_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "spectrum",
        "--config",
        config("tc2.json").to_str().unwrap(),
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let json = std::fs::read_to_string(dir.path().join("spectrum.json")).unwrap();
    let states: serde_json::Value = serde_json::from_str(&json).unwrap();
    let states = states.as_array().unwrap();
    assert_eq!(states.len(), 3);
    for (state, expected) in states.iter().zip(TENSOR_FREE_ROOTS) {
        let energy = state["energy"].as_f64().unwrap();
        assert!(
            (energy / expected - 1.0).abs() < 1e-9,
            "energy {energy} vs {expected}"
        );
    }

    // The CSV's 17-significant-digit fields reparse to the exact bits
    // that went into the JSON.
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("n_r,energy,nodes,residual"));
    let csv_energies = csv_column(&csv, 1);
    assert_eq!(csv_energies.len(), 3);
    for (from_csv, state) in csv_energies.iter().zip(states) {
        let from_json = state["energy"].as_f64().unwrap();
        assert_eq!(from_csv.to_bits(), from_json.to_bits());
    }
}

#[test]
fn spectrum_exits_two_when_nothing_binds() {
    let dir = tempfile::tempdir().unwrap();
    // A cutoff far outside the well keeps the window nonempty but moves
    // the quantization point to z ~ 0, where the residual never
    // crosses zero. Explicit coefficients sidestep the fit's own
    // range precondition.
    let far = serde_json::json!({
        "mass": 5.0, "depth": 2.0, "b_shape": 4.0, "range": 1.0,
        "tensor": 0.0, "kappa": -1,
        "limit": { "spin": { "c_s": 0.0 } },
        "r_inner": 200.0,
        "centrifugal": { "coefficients": {
            "d0": 7.3247627073220309,
            "d1": 606.00640514006432,
            "d2": 1990.6980834253911
        } }
    });
    let config_path = dir.path().join("far.json");
    std::fs::write(&config_path, far.to_string()).unwrap();

    let out = run(&[
        "spectrum",
        "--config",
        config_path.to_str().unwrap(),
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr(&out));

    let json = std::fs::read_to_string(dir.path().join("spectrum.json")).unwrap();
    assert_eq!(json.trim(), "[]");
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(csv, "n_r,energy,nodes,residual\n");
}

#[test]
fn malformed_config_exits_one_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("broken.json");
    std::fs::write(&config_path, "{not json").unwrap();
    let out = run(&["spectrum", "--config", config_path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("parsing config"));

    let missing = dir.path().join("missing.json");
    std::fs::write(
        &missing,
        r#"{"depth": 2.0, "b_shape": 4.0, "range": 1.0, "tensor": 0.0,
            "kappa": -1, "limit": {"spin": {"c_s": 0.0}}, "r_inner": 0.05,
            "centrifugal": {"fit": {"r_max": 30.0}}}"#,
    )
    .unwrap();
    let out = run(&["spectrum", "--config", missing.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("mass"), "stderr: {}", stderr(&out));
}

#[test]
fn ground_state_wavefunction_has_no_interior_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "wavefunction",
        "--config",
        config("tc2.json").to_str().unwrap(),
        "--state",
        "0",
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let csv = std::fs::read_to_string(dir.path().join("wavefunction.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("r,F,G"));
    assert_eq!(csv.lines().count(), 2002);
    let radii = csv_column(&csv, 0);
    assert_eq!(radii[0], 0.05);
    let f = csv_column(&csv, 1);
    assert_eq!(interior_sign_changes(&f), 0);
}

#[test]
fn wavefunction_rejects_an_unknown_state() {
    let out = run(&[
        "wavefunction",
        "--config",
        config("tc2.json").to_str().unwrap(),
        "--state",
        "9",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("unknown state"));
}

#[test]
fn wavefunction_rejects_a_grid_below_the_cutoff() {
    let out = run(&[
        "wavefunction",
        "--config",
        config("tc2.json").to_str().unwrap(),
        "--energy",
        "6.0",
        "--grid",
        "0.01",
        "20",
        "101",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("inner cutoff"));
}

#[test]
fn wavefunction_needs_exactly_one_selector() {
    let neither = run(&[
        "wavefunction",
        "--config",
        config("tc2.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&neither), 1);
    assert!(stderr(&neither).contains("exactly one"));

    let both = run(&[
        "wavefunction",
        "--config",
        config("tc2.json").to_str().unwrap(),
        "--state",
        "0",
        "--energy",
        "6.0",
    ]);
    assert_eq!(code(&both), 1);
}

#[test]
fn verify_passes_the_coupling_free_well() {
    let out = run(&["verify", "--config", config("tc2.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("exact|dE|"), "stdout: {text}");
    assert!(text.contains("overall: PASS"));
}

#[test]
fn nu_check_prints_the_exact_reference_value() {
    let out = run(&["nu-check", "--a10", "2", "--a11", "3", "--kmax", "3"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let sixteens = text
        .lines()
        .filter(|line| line.trim_end().ends_with(" 16"))
        .count();
    assert_eq!(sixteens, 4, "stdout: {text}");
    assert!(text.contains("never vanishes"));
}

#[test]
fn limit_swap_keeps_the_constant_and_flips_the_store() {
    // The same fitted quadratic is stored with opposite curvature signs
    // in the two limits, so swapping the limit on one config must
    // negate d2 exactly.
    let pseudo = run(&[
        "fit-centrifugal",
        "--config",
        config("tc3.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&pseudo), 0);
    let spin = run(&[
        "fit-centrifugal",
        "--config",
        config("tc3.json").to_str().unwrap(),
        "--limit",
        "spin",
    ]);
    assert_eq!(code(&spin), 0);

    let pseudo: serde_json::Value = serde_json::from_str(&stdout(&pseudo)).unwrap();
    let spin: serde_json::Value = serde_json::from_str(&stdout(&spin)).unwrap();
    let d2_pseudo = pseudo["d2"].as_f64().unwrap();
    let d2_spin = spin["d2"].as_f64().unwrap();
    assert_eq!(d2_spin.to_bits(), (-d2_pseudo).to_bits());
    assert_eq!(pseudo["d0"].as_f64().unwrap(), spin["d0"].as_f64().unwrap());
}
