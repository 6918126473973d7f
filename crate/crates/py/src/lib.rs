//! Python module `pyblockenc`: block-encodings, their algebra and
//! polynomial transforms, plus the linear-solve and Krylov drivers.

use blockenc::approx::{Basis, ChebSeries};
use blockenc::encoding;
use blockenc::linalg::{CMatrix, C64};
use blockenc::pauli::{Pauli, PauliSum, PauliString};
use blockenc::solvers::{self, Method};
use blockenc::{gqsp, qubitization, sim, BlockEncoding, Error};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: Error) -> PyErr {
    match e {
        Error::QubitBudget { .. } | Error::Completion(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_matrix(rows: Vec<Vec<C64>>) -> PyResult<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(PyValueError::new_err("matrix rows differ in length"));
    }
    Ok(CMatrix::from_fn(n, m, |r, c| rows[r][c]))
}

fn from_matrix(m: &CMatrix) -> Vec<Vec<C64>> {
    (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect()
}

fn pauli(letter: &str) -> PyResult<Pauli> {
    match letter {
        "X" | "x" => Ok(Pauli::X),
        "Y" | "y" => Ok(Pauli::Y),
        "Z" | "z" => Ok(Pauli::Z),
        other => Err(PyValueError::new_err(format!("unknown Pauli letter '{other}'"))),
    }
}

/// A block-encoding: a circuit U whose ancilla-zero block is A/α.
#[pyclass(name = "BlockEncoding", module = "pyblockenc", frozen, skip_from_py_object)]
pub struct PyBlockEncoding {
    inner: BlockEncoding,
}

impl From<BlockEncoding> for PyBlockEncoding {
    fn from(inner: BlockEncoding) -> Self {
        PyBlockEncoding { inner }
    }
}

#[pymethods]
impl PyBlockEncoding {
    /// Pauli-basis encoding of a dense 2^n × 2^n matrix.
    #[staticmethod]
    fn from_array(matrix: Vec<Vec<C64>>) -> PyResult<Self> {
        Ok(encoding::from_array(&to_matrix(matrix)?).map_err(err)?.into())
    }

    /// Encoding of Σ c·P from `[(c, [(qubit, "X"), ...]), ...]`.
    #[staticmethod]
    #[pyo3(signature = (terms, num_qubits=None))]
    fn from_operator(terms: Vec<(f64, Vec<(usize, String)>)>, num_qubits: Option<usize>) -> PyResult<Self> {
        let mut op = PauliSum::new();
        for (c, letters) in terms {
            let mut s = PauliString::new();
            for (q, l) in letters {
                s.insert(q, pauli(&l)?);
            }
            op.add_term(c, s).map_err(err)?;
        }
        let n = num_qubits.unwrap_or(op.num_qubits());
        Ok(encoding::from_operator_sized(&op, n).map_err(err)?.into())
    }

    /// Ones on the k-th diagonal of a 2^n × 2^n matrix.
    #[staticmethod]
    fn from_eye(k: i64, n: usize) -> PyResult<Self> {
        Ok(encoding::from_eye(k, n).map_err(err)?.into())
    }

    #[staticmethod]
    fn identity(n: usize) -> PyResult<Self> {
        Ok(encoding::identity(n).map_err(err)?.into())
    }

    /// Periodic second-difference operator on 2^n points as a shift LCU.
    #[staticmethod]
    fn laplacian(n: usize) -> PyResult<Self> {
        Ok(encoding::laplacian_lcu(n).map_err(err)?.into())
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon()
    }

    #[getter]
    fn num_ancillas(&self) -> usize {
        self.inner.num_ancillas()
    }

    #[getter]
    fn num_system_qubits(&self) -> usize {
        self.inner.num_system_qubits()
    }

    #[getter]
    fn is_hermitian(&self) -> bool {
        self.inner.is_hermitian()
    }

    /// The encoded block A/α, read off the simulated circuit.
    fn block(&self) -> PyResult<Vec<Vec<C64>>> {
        Ok(from_matrix(&sim::extract_block(&self.inner).map_err(err)?))
    }

    /// Decomposed gate counts, depth and qubit count.
    fn resources<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = self.inner.resources().map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("gate_counts", r.gate_counts)?;
        d.set_item("depth", r.depth)?;
        d.set_item("qubits", r.qubits)?;
        Ok(d)
    }

    /// Applies the block to a system state and post-selects the ancillas;
    /// returns (normalized state, success probability).
    fn apply(&self, state: Vec<C64>) -> PyResult<(Vec<C64>, f64)> {
        let r = sim::apply_to_state(&self.inner, &state).map_err(err)?;
        Ok((r.state.into_amplitudes(), r.success_probability))
    }

    fn __add__(&self, other: &PyBlockEncoding) -> PyResult<Self> {
        Ok(self.inner.add(&other.inner).map_err(err)?.into())
    }

    fn __sub__(&self, other: &PyBlockEncoding) -> PyResult<Self> {
        Ok(self.inner.sub(&other.inner).map_err(err)?.into())
    }

    fn __matmul__(&self, other: &PyBlockEncoding) -> PyResult<Self> {
        Ok(self.inner.matmul(&other.inner).map_err(err)?.into())
    }

    fn __mul__(&self, c: f64) -> PyResult<Self> {
        Ok(self.inner.scale(c).map_err(err)?.into())
    }

    fn __rmul__(&self, c: f64) -> PyResult<Self> {
        self.__mul__(c)
    }

    fn __neg__(&self) -> Self {
        self.inner.neg().into()
    }

    fn kron(&self, other: &PyBlockEncoding) -> Self {
        self.inner.kron(&other.inner).into()
    }

    /// T_k(A/α) as the k-th power of the walk operator.
    fn chebyshev(&self, k: usize) -> PyResult<Self> {
        Ok(qubitization::chebyshev(&self.inner, k).map_err(err)?.into())
    }

    /// p(A) for real coefficients in the given basis.
    #[pyo3(signature = (coeffs, kind="monomial"))]
    fn poly(&self, coeffs: Vec<f64>, kind: &str) -> PyResult<Self> {
        let basis = match kind {
            "monomial" => Basis::Monomial,
            "chebyshev" => Basis::Chebyshev,
            other => return Err(PyValueError::new_err(format!("unknown basis '{other}'"))),
        };
        let series = ChebSeries::real(basis, &coeffs).map_err(err)?;
        Ok(gqsp::poly(&self.inner, &series).map_err(err)?.into())
    }

    /// Approximate inverse for A/α with spectrum in [−1, −1/κ] ∪ [1/κ, 1].
    fn inv(&self, eps: f64, kappa: f64) -> PyResult<Self> {
        Ok(gqsp::inv(&self.inner, eps, kappa).map_err(err)?.into())
    }

    /// e^{−itA} truncated at Chebyshev order n.
    fn sim(&self, t: f64, n: usize) -> PyResult<Self> {
        Ok(gqsp::sim(&self.inner, t, n).map_err(err)?.into())
    }

    /// Inverse through the unary Chebyshev ladder instead of phases.
    fn cks(&self, eps: f64, kappa: f64) -> PyResult<Self> {
        Ok(solvers::cks(&self.inner, eps, kappa).map_err(err)?.into())
    }

    fn __repr__(&self) -> String {
        format!(
            "BlockEncoding(alpha={}, system_qubits={}, ancillas={}, hermitian={})",
            self.inner.alpha(),
            self.inner.num_system_qubits(),
            self.inner.num_ancillas(),
            if self.inner.is_hermitian() { "True" } else { "False" }
        )
    }
}

/// Normalized solution of A x = b; returns a dict with amplitudes,
/// success_probability, kappa and degree.
#[pyfunction]
#[pyo3(signature = (matrix, rhs, eps=0.01, kappa=None, method="qet"))]
fn solve<'py>(
    py: Python<'py>,
    matrix: Vec<Vec<C64>>,
    rhs: Vec<C64>,
    eps: f64,
    kappa: Option<f64>,
    method: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let method: Method = method.parse().map_err(err)?;
    let sol = solvers::solve(&to_matrix(matrix)?, &rhs, eps, kappa, method).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("amplitudes", sol.amplitudes)?;
    d.set_item("success_probability", sol.success_probability)?;
    d.set_item("kappa", sol.kappa)?;
    d.set_item("degree", sol.degree)?;
    Ok(d)
}

/// Krylov ground energy of the Heisenberg ring of length `l` from a
/// singlet product state; `shots = 0` uses exact moments.
#[pyfunction]
#[pyo3(signature = (l, d, shots=0, seed=0))]
fn lanczos<'py>(py: Python<'py>, l: usize, d: usize, shots: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    if l < 2 || l % 2 == 1 {
        return Err(PyValueError::new_err(format!("ring length {l} must be even and at least 2")));
    }
    let h = blockenc::pauli::heisenberg(&blockenc::pauli::cycle_edges(l)).map_err(err)?;
    let matching: Vec<(usize, usize)> = (0..l / 2).map(|i| (2 * i, 2 * i + 1)).collect();
    let prep = blockenc::state_prep::singlet_prep(l, &matching).map_err(err)?;
    let r = solvers::lanczos(&h, d, &prep, (shots > 0).then_some((shots, seed))).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("energy", r.energy)?;
    out.set_item("exact_energy", solvers::exact_ground_energy(&h, l).map_err(err)?)?;
    out.set_item("retained", r.retained)?;
    out.set_item("S", r.s)?;
    out.set_item("H", r.h)?;
    Ok(out)
}

/// Signal-processing phases (thetas, phis, lambda, shift) for a complex
/// Chebyshev series bounded by 1 on [−1, 1].
#[pyfunction]
fn find_phases(coeffs: Vec<C64>) -> PyResult<(Vec<f64>, Vec<f64>, f64, usize)> {
    let series = ChebSeries::new(Basis::Chebyshev, coeffs).map_err(err)?;
    let p = gqsp::find_phases(&series).map_err(err)?;
    Ok((p.thetas, p.phis, p.lambda, p.shift))
}

/// Chebyshev coefficients of e^{−itx} up to order n and the tail bound.
#[pyfunction]
fn jacobi_anger(t: f64, n: usize) -> (Vec<C64>, f64) {
    let (s, tail) = blockenc::approx::jacobi_anger(t, n);
    (s.coeffs().to_vec(), tail)
}

#[pymodule]
pub fn pyblockenc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyBlockEncoding>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(lanczos, m)?)?;
    m.add_function(wrap_pyfunction!(find_phases, m)?)?;
    m.add_function(wrap_pyfunction!(jacobi_anger, m)?)?;
    Ok(())
}
