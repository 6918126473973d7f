//! Linear-systems solving through a unary Chebyshev LCU, and Krylov
//! ground-state estimation from Chebyshev moments.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx;
use crate::circuit::Circuit;
use crate::encoding::{from_array, BlockEncoding};
use crate::error::{invalid, Error, Result};
use crate::gqsp;
use crate::linalg::{hermitian_eigenvalues, normalized, CMatrix, C64};
use crate::pauli::PauliSum;
use crate::qubitization::{chebyshev, unary_chebyshev_lcu};
use crate::sim::{self, hadamard_test, Part};

/// Regularization floor for overlap-matrix eigenvalues.
pub const KRYLOV_FLOOR: f64 = 1e-8;

/// Approximate A⁻¹ for A/α with spectrum in [−1, −1/κ] ∪ [1/κ, 1], built as
/// an LCU of walk powers selected by a unary register. α·block ≈ A⁻¹.
pub fn cks(enc: &BlockEncoding, eps: f64, kappa: f64) -> Result<BlockEncoding> {
    let (b, j0) = approx::inverse_degrees(eps, kappa);
    let coeffs = approx::inverse_coefficients(b, j0);
    let lcu = unary_chebyshev_lcu(enc, &coeffs)?;
    let a = enc.alpha();
    Ok(lcu.with_params(lcu.alpha() / a, eps / a, false))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// eigenvalue transform with signal-processing phases
    Qet,
    /// unary Chebyshev LCU
    Cks,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qet" => Ok(Method::Qet),
            "cks" => Ok(Method::Cks),
            other => Err(invalid(format!("unknown method '{other}', expected qet or cks"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    /// normalized post-selected solution state
    pub amplitudes: Vec<C64>,
    pub success_probability: f64,
    /// condition bound the inverse series was built for
    pub kappa: f64,
    /// degree of the odd inverse series
    pub degree: usize,
    pub encoding: BlockEncoding,
}

/// Solves A x = b for Hermitian A and returns x/∥x∥. When `kappa` is None
/// it is set to α/min|λ|, which places the spectrum of A/α inside the
/// inversion domain.
pub fn solve(a: &CMatrix, b: &[C64], eps: f64, kappa: Option<f64>, method: Method) -> Result<Solution> {
    let enc = from_array(a)?;
    if !enc.is_hermitian() {
        return Err(Error::NotHermitian("linear solve"));
    }
    let kappa = match kappa {
        Some(k) => k,
        None => enc.alpha() / min_abs_eigenvalue(a)?,
    };
    let inverse = match method {
        Method::Qet => gqsp::inv(&enc, eps, kappa)?,
        Method::Cks => cks(&enc, eps, kappa)?,
    };
    let res = sim::apply_to_state(&inverse, &normalized(b))?;
    let (_, j0) = approx::inverse_degrees(eps, kappa);
    Ok(Solution {
        amplitudes: res.state.into_amplitudes(),
        success_probability: res.success_probability,
        kappa,
        degree: 2 * j0 + 1,
        encoding: inverse,
    })
}

fn min_abs_eigenvalue(a: &CMatrix) -> Result<f64> {
    let lo = hermitian_eigenvalues(a).iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
    if lo == 0.0 {
        return Err(invalid("matrix is singular"));
    }
    Ok(lo)
}

/// Ratio of extreme eigenvalue magnitudes of a Hermitian matrix.
pub fn condition_number(a: &CMatrix) -> Result<f64> {
    let hi = hermitian_eigenvalues(a).iter().map(|x| x.abs()).fold(0.0, f64::max);
    Ok(hi / min_abs_eigenvalue(a)?)
}

/// E_m = ⟨ψ₀|T_m(A/α)|ψ₀⟩ for m = 0..=m_max. With `shots`, each moment is
/// estimated from that many Hadamard-test samples using a per-moment stream
/// of the given seed.
pub fn chebyshev_moments(
    enc: &BlockEncoding,
    prep: &Circuit,
    m_max: usize,
    shots: Option<(usize, u64)>,
) -> Result<Vec<f64>> {
    if !enc.is_hermitian() {
        return Err(Error::NotHermitian("Chebyshev moments"));
    }
    (0..=m_max)
        .into_par_iter()
        .map(|m| {
            let t = chebyshev(enc, m)?;
            let raw = match shots {
                None => hadamard_test::<ChaCha8Rng>(&t, prep, Part::Real, None)?,
                Some((n, seed)) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(m as u64);
                    hadamard_test(&t, prep, Part::Real, Some((n, &mut rng)))?
                }
            };
            Ok(raw / enc.alpha())
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KrylovResult {
    /// overlaps ⟨T_j ψ₀|T_k ψ₀⟩
    #[serde(rename = "S")]
    pub s: Vec<Vec<f64>>,
    /// projected normalized Hamiltonian ⟨T_j ψ₀|(H/α)|T_k ψ₀⟩
    #[serde(rename = "H")]
    pub h: Vec<Vec<f64>>,
    pub energy: f64,
    pub retained: usize,
}

/// Krylov matrices of dimension `d` from moments E_0..E_{2d−1}.
pub fn krylov_matrices(moments: &[f64], d: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if d == 0 || moments.len() < 2 * d {
        return Err(invalid(format!("dimension {d} needs {} moments, got {}", 2 * d, moments.len())));
    }
    let e = |m: i64| moments[m.unsigned_abs() as usize];
    let s = DMatrix::from_fn(d, d, |j, k| {
        let (j, k) = (j as i64, k as i64);
        0.5 * (e(j + k) + e(j - k))
    });
    let h = DMatrix::from_fn(d, d, |j, k| {
        let (j, k) = (j as i64, k as i64);
        0.25 * (e(j + k + 1) + e(j + k - 1) + e(j - k + 1) + e(j - k - 1))
    });
    Ok((s, h))
}

/// Lowest generalized eigenvalue of (h, s) after projecting out the
/// overlap eigenvectors with eigenvalue at or below `floor`.
pub fn regularized_ground(s: &DMatrix<f64>, h: &DMatrix<f64>, floor: f64) -> Result<(f64, usize)> {
    let eig = SymmetricEigen::new(s.clone());
    let keep: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&i| eig.eigenvalues[i] > floor).collect();
    if keep.is_empty() {
        let top = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return Err(Error::DegenerateKrylov(top));
    }
    let basis = DMatrix::from_fn(s.nrows(), keep.len(), |r, c| {
        let i = keep[c];
        eig.eigenvectors[(r, i)] / eig.eigenvalues[i].sqrt()
    });
    let reduced = basis.transpose() * h * &basis;
    let reduced = (&reduced + reduced.transpose()) * 0.5;
    let low = SymmetricEigen::new(reduced).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((low, keep.len()))
}

/// Overlap eigenvalue floor: [`KRYLOV_FLOOR`] for exact moments, otherwise
/// the size of the sampling error in a d×d overlap matrix, d/√shots.
pub fn overlap_floor(d: usize, shots: Option<(usize, u64)>) -> f64 {
    match shots {
        None => KRYLOV_FLOOR,
        Some((n, _)) => KRYLOV_FLOOR.max(d as f64 / (n.max(1) as f64).sqrt()),
    }
}

/// Ground-energy estimate of `h` in the dimension-`d` Krylov space of
/// Chebyshev states T_k(H/α)|ψ₀⟩, with ψ₀ prepared by `prep`.
pub fn lanczos(h: &PauliSum, d: usize, prep: &Circuit, shots: Option<(usize, u64)>) -> Result<KrylovResult> {
    if d == 0 {
        return Err(invalid("Krylov dimension must be at least 1"));
    }
    let n = prep.num_qubits();
    let enc = crate::encoding::from_operator_sized(h, n)?;
    let moments = chebyshev_moments(&enc, prep, 2 * d - 1, shots)?;
    let (s, hp) = krylov_matrices(&moments, d)?;
    let (low, retained) = regularized_ground(&s, &hp, overlap_floor(d, shots))?;
    let rows = |m: &DMatrix<f64>| (0..d).map(|r| m.row(r).iter().copied().collect()).collect();
    Ok(KrylovResult {
        s: rows(&s),
        h: rows(&hp),
        energy: enc.alpha() * low,
        retained,
    })
}

/// Lowest eigenvalue of the dense matrix of `h` on `n` qubits.
pub fn exact_ground_energy(h: &PauliSum, n: usize) -> Result<f64> {
    Ok(hermitian_eigenvalues(&h.to_dense(n)?)[0])
}

/// Random well-conditioned Hermitian test system: eigenvalues drawn with
/// magnitudes in [1/κ, 1] and random signs, in a random unitary basis.
pub fn random_conditioned<R: Rng + ?Sized>(rng: &mut R, dim: usize, kappa: f64) -> CMatrix {
    let q = crate::linalg::random_hermitian(rng, dim).symmetric_eigen().eigenvectors;
    let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |i, _| {
        let t = if dim == 1 { 1.0 } else { i as f64 / (dim - 1) as f64 };
        let mag = 1.0 / kappa + t * (1.0 - 1.0 / kappa);
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        C64::new(sign * mag, 0.0)
    }));
    &q * diag * q.adjoint()
}
