mod common;

use blockenc::circuit::Circuit;
use blockenc::encoding::{from_array, from_eye, from_lcu, from_operator, from_projector, Ket};
use blockenc::linalg::{is_hermitian, max_abs_diff, random_hermitian, CMatrix, C64};
use blockenc::sim::{extract_block, unitary};
use blockenc::state_prep::prepare;
use blockenc::BlockEncoding;
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn hermitian_instance(seed: u64, n: usize) -> (CMatrix, BlockEncoding) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_hermitian(&mut rng, 1 << n);
    let e = from_array(&a).unwrap();
    (a, e)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn from_array_is_sound(seed in any::<u64>(), n in 1usize..4) {
        let (a, e) = hermitian_instance(seed, n);
        prop_assert!(max_abs_diff(&a, &scaled_block(&e)) <= e.epsilon() + 1e-9);
    }

    #[test]
    fn hermitian_input_compiles_to_hermitian_unitary(seed in any::<u64>(), n in 1usize..3) {
        let (_, e) = hermitian_instance(seed, n);
        prop_assert!(e.is_hermitian());
        let u = unitary(&e.circuit().unwrap()).unwrap();
        prop_assert!(u.nrows() <= 1 << 10);
        prop_assert!(max_abs_diff(&u, &u.adjoint()) <= 1e-10);
    }

    #[test]
    fn from_operator_is_sound(seed in any::<u64>(), n in 1usize..4, terms in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let op = random_pauli_sum(&mut rng, n, terms);
        prop_assume!(op.one_norm() > 0.0);
        let e = from_operator(&op).unwrap();
        let dense = op.to_dense(e.num_system_qubits()).unwrap();
        prop_assert!(max_abs_diff(&dense, &scaled_block(&e)) <= 1e-9);
        prop_assert!(is_hermitian(&dense, 1e-12));
    }

    #[test]
    fn lcu_alpha_is_the_input_order_sum(seed in any::<u64>(), k in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<f64> = (0..k).map(|_| rng.random_range(0.01..3.0)).collect();
        let circuits: Vec<Circuit> = (0..k).map(|_| random_circuit(&mut rng, 2, 6)).collect();
        let e = from_lcu(&coeffs, &circuits, false).unwrap();
        let mut sum = 0.0;
        for c in &coeffs {
            sum += c;
        }
        prop_assert_eq!(e.alpha().to_bits(), sum.to_bits());
        let mut oracle = CMatrix::zeros(4, 4);
        for (c, u) in coeffs.iter().zip(&circuits) {
            oracle += unitary(u).unwrap() * C64::new(*c, 0.0);
        }
        prop_assert!(max_abs_diff(&oracle, &scaled_block(&e)) <= 1e-9);
    }

    #[test]
    fn projector_is_idempotent(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps: Vec<f64> = (0..1 << n).map(|_| rng.random_range(0.1..1.0)).collect();
        let ket = Ket::Prepared(prepare(&amps).unwrap());
        for kernel in [false, true] {
            let b = extract_block(&from_projector(&ket, &ket, None, kernel).unwrap()).unwrap();
            prop_assert!(max_abs_diff(&(&b * &b), &b) <= 1e-9);
        }
        let i = rng.random_range(0..1usize << n);
        let b = extract_block(&from_projector(&Ket::Basis(i), &Ket::Basis(i), Some(n), false).unwrap()).unwrap();
        prop_assert!(max_abs_diff(&(&b * &b), &b) <= 1e-9);
    }
}

#[test]
fn eye_diagonals_match_dense() {
    for n in 1..=4usize {
        let dim = 1 << n;
        for k in -(dim as i64 - 1)..dim as i64 {
            let e = from_eye(k, n).unwrap();
            assert!(max_abs_diff(&shifted_identity(dim, k), &scaled_block(&e)) <= 1e-12, "n={n} k={k}");
        }
    }
}

#[test]
fn eye_rejects_out_of_range() {
    assert!(from_eye(4, 2).is_err());
    assert!(from_eye(-4, 2).is_err());
}

#[test]
fn non_power_of_two_is_rejected() {
    let a = CMatrix::identity(3, 3);
    assert!(matches!(from_array(&a), Err(blockenc::Error::NotPowerOfTwo { .. })));
}

#[test]
fn laplace_lcu_matches_tridiagonal() {
    let n = 3;
    let dim = 1 << n;
    let e = blockenc::encoding::laplacian_lcu(n).unwrap();
    assert_eq!(e.alpha(), 4.0);
    let want = CMatrix::from_fn(dim, dim, |r, c| {
        let d = (r + dim - c) % dim;
        C64::new(
            match d {
                0 => -2.0,
                1 => 1.0,
                x if x == dim - 1 => 1.0,
                _ => 0.0,
            },
            0.0,
        )
    });
    assert!(max_abs_diff(&want, &scaled_block(&e)) <= 1e-12);
    assert_eq!(blockenc::encoding::laplacian_matrix(n), want);
}
