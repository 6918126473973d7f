use std::path::PathBuf;
use std::process::{Command, Output};

use blockenc::linalg::{normalized, phase_aligned_distance, CMatrix, DenseJson, C64};
use blockenc::solvers::random_conditioned;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn scratch(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("blockenc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p.to_string_lossy().into_owned()
}

fn exec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockenc")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Value {
    let out = exec(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    v
}

fn failure(args: &[&str]) -> Value {
    let out = exec(args);
    assert!(!out.status.success());
    assert!(out.stdout.is_empty());
    let text = String::from_utf8(out.stderr).unwrap();
    assert_eq!(text.trim().lines().count(), 1, "{text}");
    let v: Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(v["schema"], 1);
    v["error"].clone()
}

fn magnitudes(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|z| C64::new(z[0].as_f64().unwrap(), z[1].as_f64().unwrap()).norm())
        .collect()
}

fn complex(v: &Value) -> Vec<C64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|z| C64::new(z[0].as_f64().unwrap(), z[1].as_f64().unwrap()))
        .collect()
}

fn close(got: &[f64], want: &[f64], tol: f64) -> bool {
    got.len() == want.len() && got.iter().zip(want).all(|(a, b)| (a - b).abs() <= tol)
}

#[test]
fn verify_pauli_z() {
    let v = ok(&["verify", "--matrix", &data("pauli_z.json")]);
    assert!(v["max_block_error"].as_f64().unwrap() <= 1e-12);
    assert_eq!(v["alpha"], 1.0);
}

#[test]
fn verify_dense_matrix() {
    let v = ok(&["verify", "--matrix", &data("poly_matrix.json")]);
    assert!(v["max_block_error"].as_f64().unwrap() <= 1e-9);
    assert!(v["ancilla_qubits"].as_u64().unwrap() > 0);
}

#[test]
fn verify_shifted_identity() {
    for k in ["-3", "-1", "0", "2"] {
        let v = ok(&["verify", "--diag-k", k, "--n", "3"]);
        assert!(v["max_block_error"].as_f64().unwrap() <= 1e-12, "k = {k}");
    }
}

#[test]
fn three_by_three_is_rejected() {
    let m = DenseJson::from_matrix(&CMatrix::identity(3, 3));
    let path = scratch("three.json", &serde_json::to_string(&m).unwrap());
    let err = failure(&["verify", "--matrix", &path]);
    assert_eq!(err["kind"], "not_power_of_two");
    assert!(err["message"].as_str().unwrap().contains("3x3"));
}

#[test]
fn malformed_and_missing_inputs() {
    let path = scratch("garbage.json", "{not json");
    assert_eq!(failure(&["verify", "--matrix", &path])["kind"], "malformed_input");
    assert_eq!(failure(&["verify", "--matrix", "/no/such/file.json"])["kind"], "malformed_input");
    assert_eq!(failure(&["verify"])["kind"], "invalid_argument");
    assert_eq!(failure(&["frobnicate"])["kind"], "usage");
    assert_eq!(failure(&["lanczos", "--L", "5"])["kind"], "invalid_argument");
}

#[test]
fn solve_with_phases() {
    let v = ok(&["solve", "--matrix", &data("poly_matrix.json"), "--rhs", &data("rhs.json"), "--eps", "0.01"]);
    let want = [0.03398, 0.56257, 0.52725, 0.63589];
    assert!(close(&magnitudes(&v["amplitudes"]), &want, 2e-2));
    assert_eq!(v["method"], "qet");
    assert!(v["degree"].as_u64().unwrap() % 2 == 1);
    assert!(v["success_probability"].as_f64().unwrap() > 0.0);
    assert!(v["resources"]["depth"].as_u64().unwrap() > 0);
}

#[test]
fn solve_with_chebyshev_ladder() {
    let v = ok(&[
        "solve",
        "--matrix",
        &data("cks_matrix.json"),
        "--rhs",
        &data("rhs.json"),
        "--eps",
        "0.01",
        "--method",
        "cks",
    ]);
    let want = [0.02737, 0.55866, 0.52853, 0.63859];
    assert!(close(&magnitudes(&v["amplitudes"]), &want, 2e-2));
    assert_eq!(v["method"], "cks");
}

#[test]
fn solve_z_system() {
    let b = DenseJson::from_vector(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
    let rhs = scratch("z_rhs.json", &serde_json::to_string(&b).unwrap());
    let v = ok(&["solve", "--matrix", &data("pauli_z.json"), "--rhs", &rhs, "--kappa", "1"]);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let want = [C64::new(s, 0.0), C64::new(-s, 0.0)];
    assert!(phase_aligned_distance(&complex(&v["amplitudes"]), &want) <= 1e-2);
}

#[test]
fn solve_matches_dense_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let a = random_conditioned(&mut rng, 4, 2.0);
    let b = [0.3, -0.2, 0.5, 0.7].map(|x| C64::new(x, 0.0));
    let mpath = scratch("rand_a.json", &serde_json::to_string(&DenseJson::from_matrix(&a)).unwrap());
    let bpath = scratch("rand_b.json", &serde_json::to_string(&DenseJson::from_vector(&b)).unwrap());
    let v = ok(&["solve", "--matrix", &mpath, "--rhs", &bpath, "--eps", "0.01"]);
    let x = a.try_inverse().unwrap() * CMatrix::from_column_slice(4, 1, &b);
    let want = normalized(x.as_slice());
    assert!(phase_aligned_distance(&complex(&v["amplitudes"]), &want) <= 3e-2);
}

#[test]
fn simulate_zero_time_is_identity() {
    let v = ok(&["simulate", "--time", "0", "--order", "4"]);
    let amps = complex(&v["amplitudes"]);
    assert!((amps[0].norm() - 1.0).abs() <= 1e-8);
    assert!(amps[1..].iter().all(|z| z.norm() <= 1e-8));
}

#[test]
fn simulate_ising_matches_dense() {
    let v = ok(&["simulate", "--L", "4", "--time", "0.5", "--order", "8"]);
    assert!(v["dense_distance"].as_f64().unwrap() <= 1e-3);
    assert_eq!(v["amplitudes"].as_array().unwrap().len(), 16);
}

#[test]
fn simulate_tails_shrink_super_exponentially() {
    let tails: Vec<f64> = (4..=12)
        .map(|n| {
            let v = ok(&["simulate", "--L", "2", "--time", "0.5", "--order", &n.to_string()]);
            v["tail_bound"].as_f64().unwrap()
        })
        .collect();
    let ratios: Vec<f64> = tails.windows(2).map(|w| w[1] / w[0]).collect();
    assert!(ratios.iter().all(|&r| r < 1.0), "{tails:?}");
    assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
}

#[test]
fn laplace_resources_favor_the_shift_lcu() {
    let v = ok(&["resources", "--example", "laplace", "--n", "8"]);
    assert!(v["depth_ratio"].as_f64().unwrap() >= 10.0);
    assert!(v["cx_ratio"].as_f64().unwrap() >= 10.0);
    let small = ok(&["resources", "--example", "laplace", "--n", "2"]);
    assert!(small["custom"]["depth"].as_u64().unwrap() > 0);
    let keys = ["x", "y", "z", "h", "s", "s_dg", "t", "t_dg", "rx", "ry", "rz", "p", "gphase", "cx", "measure"];
    for side in ["generic", "custom"] {
        let counts = v[side]["gate_counts"].as_object().unwrap();
        for k in keys {
            assert!(counts.contains_key(k), "{side} lacks {k}");
        }
    }
}

#[test]
fn generic_resources_are_seeded() {
    let a = exec(&["resources", "--example", "generic", "--n", "3", "--seed", "9"]);
    let b = exec(&["resources", "--example", "generic", "--n", "3", "--seed", "9"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn lanczos_heisenberg_ring() {
    let v = ok(&["lanczos", "--L", "6", "--D", "6"]);
    let e = v["energy"].as_f64().unwrap();
    assert!((e - -2.3680339887).abs() <= 5e-3, "energy {e}");
    assert!((v["exact_energy"].as_f64().unwrap() - -2.3680339887).abs() <= 1e-9);
    assert_eq!(v["S"].as_array().unwrap().len(), 6);
    assert_eq!(v["H"].as_array().unwrap().len(), 6);
}

#[test]
fn outputs_are_byte_identical() {
    let args = ["lanczos", "--L", "4", "--D", "3", "--shots", "500", "--seed", "11"];
    let a = exec(&args);
    let b = exec(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn pretty_prints_a_table() {
    let out = exec(&["--pretty", "verify", "--matrix", &data("pauli_z.json")]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("max_block_error")));
    assert!(serde_json::from_str::<Value>(&text).is_err());
}
