//! Dense complex matrices and their JSON interchange format.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// `{"dim": N, "data": [[re, im], ...]}`. Matrices are N×N row-major;
/// vectors carry N entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseJson {
    pub dim: usize,
    pub data: Vec<[f64; 2]>,
}

impl DenseJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let n = m.nrows();
        let mut data = Vec::with_capacity(n * m.ncols());
        for r in 0..n {
            for c in 0..m.ncols() {
                let z = m[(r, c)];
                data.push([z.re, z.im]);
            }
        }
        DenseJson { dim: n, data }
    }

    pub fn from_vector(v: &[C64]) -> Self {
        DenseJson {
            dim: v.len(),
            data: v.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.dim;
        if n == 0 || self.data.len() % n != 0 {
            return Err(Error::Format(format!(
                "matrix with dim {} cannot hold {} entries",
                n,
                self.data.len()
            )));
        }
        let cols = self.data.len() / n;
        Ok(CMatrix::from_fn(n, cols, |r, c| {
            let [re, im] = self.data[r * cols + c];
            C64::new(re, im)
        }))
    }

    pub fn to_vector(&self) -> Result<Vec<C64>> {
        if self.data.len() != self.dim {
            return Err(Error::Format(format!(
                "vector with dim {} has {} entries",
                self.dim,
                self.data.len()
            )));
        }
        Ok(self.data.iter().map(|&[re, im]| C64::new(re, im)).collect())
    }
}

pub fn matrix_from_json(text: &str) -> Result<CMatrix> {
    let d: DenseJson = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    d.to_matrix()
}

pub fn vector_from_json(text: &str) -> Result<Vec<C64>> {
    let d: DenseJson = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    d.to_vector()
}

pub fn real_matrix(rows: &[&[f64]]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(n, m, |r, c| C64::new(rows[r][c], 0.0))
}

/// Number of qubits `n` with `2^n == dim`, if `dim` is a power of two.
pub fn log2_exact(dim: usize) -> Option<usize> {
    dim.is_power_of_two().then(|| dim.trailing_zeros() as usize)
}

/// Validates a square 2^n × 2^n matrix with n ≥ 1 and returns n.
pub fn qubits_of_square(m: &CMatrix) -> Result<usize> {
    let (rows, cols) = m.shape();
    match log2_exact(rows) {
        Some(n) if rows == cols && n >= 1 => Ok(n),
        _ => Err(Error::NotPowerOfTwo { rows, cols }),
    }
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

/// Applies a scalar function to a Hermitian matrix through its
/// eigendecomposition.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let eig = m.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&x| f(x)),
    ));
    v * d * v.adjoint()
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Random Hermitian matrix with entries drawn uniformly from the unit box.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for r in 0..dim {
        m[(r, r)] = C64::new(rng.random_range(-1.0..1.0), 0.0);
        for c in r + 1..dim {
            let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            m[(r, c)] = z;
            m[(c, r)] = z.conj();
        }
    }
    m
}

pub fn normalized(v: &[C64]) -> Vec<C64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|z| z / n).collect()
}

/// Spectral (2-)norm via singular values.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// ∥a − e^{iφ} b∥₂ minimized over the global phase φ.
pub fn phase_aligned_distance(a: &[C64], b: &[C64]) -> f64 {
    let overlap: C64 = b.iter().zip(a).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - phase * y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_matrix() {
        let m = real_matrix(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let j = serde_json::to_string(&DenseJson::from_matrix(&m)).unwrap();
        assert_eq!(j, r#"{"dim":2,"data":[[1.0,0.0],[2.0,0.0],[3.0,0.0],[4.0,0.0]]}"#);
        assert_eq!(matrix_from_json(&j).unwrap(), m);
    }

    #[test]
    fn square_power_of_two_check() {
        assert_eq!(qubits_of_square(&CMatrix::identity(8, 8)).unwrap(), 3);
        assert!(qubits_of_square(&CMatrix::identity(3, 3)).is_err());
        assert!(qubits_of_square(&CMatrix::identity(1, 1)).is_err());
        assert!(qubits_of_square(&CMatrix::zeros(2, 4)).is_err());
    }

    #[test]
    fn functional_calculus_square() {
        let m = real_matrix(&[&[0.5, 0.2], &[0.2, -0.1]]);
        let sq = hermitian_function(&m, |x| C64::new(x * x, 0.0));
        assert!(max_abs_diff(&sq, &(&m * &m)) < 1e-12);
    }
}
