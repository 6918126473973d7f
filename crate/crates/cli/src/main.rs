//! `blockenc`: JSON reports for block-encoding checks, linear solves,
//! Hamiltonian simulation, resource comparisons and Krylov ground energies.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blockenc::encoding::{from_array, from_eye, from_operator, laplacian_lcu, laplacian_matrix};
use blockenc::linalg::{hermitian_function, max_abs_diff, matrix_from_json, random_hermitian, vector_from_json};
use blockenc::linalg::{CMatrix, C64};
use blockenc::pauli::{cycle_edges, heisenberg, ising_chain};
use blockenc::sim::{apply_to_state, extract_block};
use blockenc::solvers::{exact_ground_energy, lanczos, solve, Method};
use blockenc::state_prep::singlet_prep;
use blockenc::{BlockEncoding, Error, ResourceReport};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "blockenc", version, about = "Block-encoding toolkit with JSON output")]
struct Cli {
    /// print an indented key/value table instead of JSON
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Block-encode a matrix (or a shifted identity) and check the block.
    Verify {
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// encode the k-th diagonal of ones instead of a matrix file
        #[arg(long = "diag-k", allow_hyphen_values = true)]
        diag_k: Option<i64>,
        /// system qubits for --diag-k
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Solve A x = b and report the normalized solution state.
    Solve {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        /// condition bound for A/α; derived from the spectrum when absent
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long, value_enum, default_value_t = MethodArg::Qet)]
        method: MethodArg,
    },
    /// Evolve |0…0⟩ under a Hamiltonian for physical time t.
    Simulate {
        /// Hermitian matrix file; the transverse-field Ising chain is used when absent
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long = "L", default_value_t = 4)]
        l: usize,
        #[arg(long, default_value_t = 0.5)]
        time: f64,
        #[arg(long, default_value_t = 8)]
        order: usize,
    },
    /// Gate counts and depth for an example operator.
    Resources {
        #[arg(long, value_enum, default_value_t = Example::Laplace)]
        example: Example,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Krylov ground energy of the Heisenberg ring.
    Lanczos {
        #[arg(long = "L", default_value_t = 6)]
        l: usize,
        #[arg(long = "D", default_value_t = 6)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Hadamard-test samples per moment; 0 computes moments exactly
        #[arg(long, default_value_t = 0)]
        shots: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Qet,
    Cks,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Example {
    /// generic Pauli encoding versus the three-term shift LCU
    Laplace,
    /// generic Pauli encoding of a seeded random Hermitian matrix
    Generic,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            return fail("usage", first);
        }
    };
    match run(cli.command) {
        Ok(mut report) => {
            report["schema"] = json!(SCHEMA);
            let mut out = String::new();
            if cli.pretty {
                pretty(&report, "", &mut out);
            } else {
                out = serde_json::to_string(&report).expect("reports hold finite numbers");
                out.push('\n');
            }
            // a closed reader (e.g. `| head`) is not an error of the command
            let _ = std::io::stdout().lock().write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => fail(kind(&e), &e.to_string()),
    }
}

fn fail(kind: &str, message: &str) -> ExitCode {
    let err = json!({"schema": SCHEMA, "error": {"kind": kind, "message": message}});
    eprintln!("{err}");
    ExitCode::FAILURE
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::NotPowerOfTwo { .. } => "not_power_of_two",
        Error::DimensionMismatch { .. } | Error::ShapeMismatch { .. } => "dimension_mismatch",
        Error::QubitBudget { .. } => "qubit_budget",
        Error::NotHermitian(_) => "not_hermitian",
        Error::Format(_) => "malformed_input",
        Error::Completion(_) => "completion",
        Error::DegenerateKrylov(_) | Error::Degenerate(_) => "degenerate",
        Error::InvalidArgument(_) => "invalid_argument",
        _ => "internal",
    }
}

fn read(path: &Path) -> blockenc::Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn complex(v: &[C64]) -> Value {
    json!(v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
}

fn report(r: &ResourceReport) -> Value {
    serde_json::to_value(r).expect("resource reports serialize")
}

fn run(command: Command) -> blockenc::Result<Value> {
    match command {
        Command::Verify { matrix, diag_k, n } => verify(matrix.as_deref(), diag_k, n),
        Command::Solve {
            matrix,
            rhs,
            eps,
            kappa,
            method,
        } => {
            let a = matrix_from_json(&read(&matrix)?)?;
            let b = vector_from_json(&read(&rhs)?)?;
            let method = match method {
                MethodArg::Qet => Method::Qet,
                MethodArg::Cks => Method::Cks,
            };
            let sol = solve(&a, &b, eps, kappa, method)?;
            Ok(json!({
                "command": "solve",
                "method": method,
                "amplitudes": complex(&sol.amplitudes),
                "success_probability": sol.success_probability,
                "kappa": sol.kappa,
                "degree": sol.degree,
                "resources": report(&sol.encoding.resources()?),
            }))
        }
        Command::Simulate { matrix, l, time, order } => {
            let (enc, dense) = match matrix {
                Some(p) => {
                    let a = matrix_from_json(&read(&p)?)?;
                    (from_array(&a)?, a)
                }
                None => {
                    let h = ising_chain(l, 0.25, 0.5)?;
                    (from_operator(&h)?, h.to_dense(l)?)
                }
            };
            simulate(&enc, &dense, time, order)
        }
        Command::Resources { example, n, seed } => resources(example, n, seed),
        Command::Lanczos { l, d, seed, shots } => {
            if l < 2 || l % 2 == 1 {
                return Err(Error::InvalidArgument(format!("ring length {l} must be even and at least 2")));
            }
            let h = heisenberg(&cycle_edges(l))?;
            let matching: Vec<(usize, usize)> = (0..l / 2).map(|i| (2 * i, 2 * i + 1)).collect();
            let prep = singlet_prep(l, &matching)?;
            let shots = (shots > 0).then_some((shots, seed));
            let r = lanczos(&h, d, &prep, shots)?;
            let mut v = serde_json::to_value(&r).expect("Krylov results serialize");
            v["command"] = json!("lanczos");
            v["exact_energy"] = json!(exact_ground_energy(&h, l)?);
            v["shots"] = json!(shots.map_or(0, |s| s.0));
            Ok(v)
        }
    }
}

fn verify(matrix: Option<&Path>, diag_k: Option<i64>, n: usize) -> blockenc::Result<Value> {
    let (enc, dense): (BlockEncoding, CMatrix) = match (matrix, diag_k) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidArgument("give either --matrix or --diag-k, not both".into()));
        }
        (None, None) => return Err(Error::InvalidArgument("one of --matrix or --diag-k is required".into())),
        (Some(p), None) => {
            let a = matrix_from_json(&read(p)?)?;
            (from_array(&a)?, a)
        }
        (None, Some(k)) => {
            let enc = from_eye(k, n)?;
            let dim = 1usize << n;
            let ones = CMatrix::from_fn(dim, dim, |r, c| {
                if c as i64 - r as i64 == k {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            (enc, ones)
        }
    };
    let block = extract_block(&enc)? * C64::new(enc.alpha(), 0.0);
    Ok(json!({
        "command": "verify",
        "alpha": enc.alpha(),
        "epsilon": enc.epsilon(),
        "ancilla_qubits": enc.num_ancillas(),
        "system_qubits": enc.num_system_qubits(),
        "hermitian": enc.is_hermitian(),
        "max_block_error": max_abs_diff(&dense, &block),
    }))
}

fn simulate(enc: &BlockEncoding, dense: &CMatrix, time: f64, order: usize) -> blockenc::Result<Value> {
    let s = blockenc::gqsp::sim(enc, time, order)?;
    let mut zero = vec![C64::new(0.0, 0.0); enc.dim()];
    zero[0] = C64::new(1.0, 0.0);
    let out = apply_to_state(&s, &zero)?;
    let amps = out.state.into_amplitudes();
    let exact = hermitian_function(dense, |x| C64::new(0.0, -time * x).exp());
    let want: Vec<C64> = exact.column(0).iter().copied().collect();
    Ok(json!({
        "command": "simulate",
        "time": time,
        "order": order,
        "amplitudes": complex(&amps),
        "success_probability": out.success_probability,
        "tail_bound": s.epsilon(),
        "dense_distance": blockenc::linalg::phase_aligned_distance(&amps, &want),
        "resources": report(&s.resources()?),
    }))
}

fn resources(example: Example, n: usize, seed: u64) -> blockenc::Result<Value> {
    if n == 0 || n > 10 {
        return Err(Error::InvalidArgument(format!("--n {n} outside 1..=10")));
    }
    match example {
        Example::Laplace => {
            let generic = from_array(&laplacian_matrix(n))?.resources()?;
            let custom = laplacian_lcu(n)?.resources()?;
            let ratio = |a: usize, b: usize| a as f64 / b.max(1) as f64;
            Ok(json!({
                "command": "resources",
                "example": "laplace",
                "n": n,
                "generic": report(&generic),
                "custom": report(&custom),
                "depth_ratio": ratio(generic.depth, custom.depth),
                "cx_ratio": ratio(generic.count("cx"), custom.count("cx")),
            }))
        }
        Example::Generic => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let enc = from_array(&random_hermitian(&mut rng, 1 << n))?;
            Ok(json!({
                "command": "resources",
                "example": "generic",
                "n": n,
                "seed": seed,
                "alpha": enc.alpha(),
                "generic": report(&enc.resources()?),
            }))
        }
    }
}

/// Flattens `v` into `path: value` lines; arrays of scalars stay inline.
fn pretty(v: &Value, path: &str, out: &mut String) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                pretty(x, &join(k), out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object()) => {
            for (i, x) in a.iter().enumerate() {
                pretty(x, &join(&i.to_string()), out);
            }
        }
        _ => out.push_str(&format!("{path:<28} {v}\n")),
    }
}
