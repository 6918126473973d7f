#![allow(dead_code)]

use blockenc::circuit::{Circuit, Gate, Role};
use blockenc::linalg::{real_matrix, CMatrix, C64};
use blockenc::pauli::{Pauli, PauliSum, PauliString};
use rand::Rng;

pub fn poly_matrix() -> CMatrix {
    real_matrix(&[
        &[0.73, 0.14, -0.15, -0.04],
        &[0.14, 0.68, -0.05, -0.01],
        &[-0.15, -0.05, 0.77, -0.03],
        &[-0.04, -0.01, -0.03, 0.59],
    ])
}

pub fn cks_matrix() -> CMatrix {
    real_matrix(&[
        &[0.73, 0.15, -0.15, -0.04],
        &[0.15, 0.69, -0.05, -0.01],
        &[-0.15, -0.05, 0.77, -0.03],
        &[-0.04, -0.01, -0.03, 0.59],
    ])
}

pub fn rhs() -> Vec<C64> {
    real_vec(&[0.0, 1.0, 1.0, 1.0])
}

pub fn real_vec(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| C64::new(x, 0.0)).collect()
}

pub fn magnitudes(v: &[C64]) -> Vec<f64> {
    v.iter().map(|z| z.norm()).collect()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn scaled_block(e: &blockenc::BlockEncoding) -> CMatrix {
    blockenc::sim::extract_block(e).unwrap() * C64::new(e.alpha(), 0.0)
}

pub fn mat_vec(m: &CMatrix, v: &[C64]) -> Vec<C64> {
    (m * nalgebra::DVector::from_column_slice(v)).iter().copied().collect()
}

pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    blockenc::linalg::normalized(&v)
}

/// Random Pauli sum on `n` qubits with `terms` strings.
pub fn random_pauli_sum<R: Rng>(rng: &mut R, n: usize, terms: usize) -> PauliSum {
    let mut op = PauliSum::new();
    for _ in 0..terms {
        let mut s = PauliString::new();
        for q in 0..n {
            match rng.random_range(0..4) {
                1 => s.insert(q, Pauli::X),
                2 => s.insert(q, Pauli::Y),
                3 => s.insert(q, Pauli::Z),
                _ => None,
            };
        }
        op.add_term(rng.random_range(-1.0..1.0), s).unwrap();
    }
    op
}

/// Random gate sequence on `n` system qubits.
pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, len: usize) -> Circuit {
    let mut c = Circuit::with_register("system", n, Role::System).unwrap();
    for _ in 0..len {
        let q = rng.random_range(0..n);
        let a = rng.random_range(-3.0..3.0);
        let g = match rng.random_range(0..8) {
            0 => Gate::h(q),
            1 => Gate::x(q),
            2 => Gate::s(q),
            3 => Gate::t(q),
            4 => Gate::rx(q, a),
            5 => Gate::ry(q, a),
            6 => Gate::rz(q, a),
            _ if n > 1 => {
                let t = (q + rng.random_range(1..n)) % n;
                Gate::cx(q, t)
            }
            _ => Gate::phase(q, a),
        };
        c.append(g).unwrap();
    }
    c
}

/// Dense matrix with ones on the k-th diagonal.
pub fn shifted_identity(dim: usize, k: i64) -> CMatrix {
    CMatrix::from_fn(dim, dim, |r, c| {
        if c as i64 - r as i64 == k {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}
