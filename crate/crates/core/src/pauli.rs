//! Pauli strings, Pauli sums, and the Pauli decomposition of dense matrices.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::{Gate, Qubit};
use crate::error::{invalid, Error, Result};
use crate::linalg::{qubits_of_square, CMatrix, C64, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn gate(self, q: Qubit) -> Gate {
        match self {
            Pauli::X => Gate::x(q),
            Pauli::Y => Gate::y(q),
            Pauli::Z => Gate::z(q),
        }
    }

    pub fn matrix(self) -> [[C64; 2]; 2] {
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -i], [i, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }
}

pub type PauliString = BTreeMap<Qubit, Pauli>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coeff: f64,
    pub paulis: PauliString,
}

/// Real linear combination of Pauli strings, kept with one term per string
/// in string order.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PauliSum {
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a sum, merging repeated strings.
    pub fn from_terms<I: IntoIterator<Item = (f64, PauliString)>>(terms: I) -> Result<Self> {
        let mut s = PauliSum::new();
        for (c, p) in terms {
            s.add_term(c, p)?;
        }
        Ok(s)
    }

    pub fn add_term(&mut self, coeff: f64, paulis: PauliString) -> Result<()> {
        if !coeff.is_finite() {
            return Err(invalid("non-finite Pauli coefficient"));
        }
        match self.terms.binary_search_by(|t| t.paulis.cmp(&paulis)) {
            Ok(i) => self.terms[i].coeff += coeff,
            Err(i) => self.terms.insert(i, PauliTerm { coeff, paulis }),
        }
        Ok(())
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// One more than the highest qubit index referenced (at least 1).
    pub fn num_qubits(&self) -> usize {
        self.terms
            .iter()
            .filter_map(|t| t.paulis.keys().next_back())
            .max()
            .map_or(1, |&q| q + 1)
    }

    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).sum()
    }

    /// Dense matrix on `n` qubits; qubit q is bit q of the basis index.
    pub fn to_dense(&self, n: usize) -> Result<CMatrix> {
        if n < self.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits(),
                actual: n,
            });
        }
        let dim = 1usize << n;
        let mut m = CMatrix::zeros(dim, dim);
        for t in &self.terms {
            for col in 0..dim {
                let mut row = col;
                let mut amp = C64::new(t.coeff, 0.0);
                for (&q, p) in &t.paulis {
                    let bit = (col >> q) & 1;
                    let mat = p.matrix();
                    let out = 1 - bit;
                    let diag = mat[bit][bit];
                    if diag != ZERO {
                        amp *= diag;
                    } else {
                        amp *= mat[out][bit];
                        row ^= 1 << q;
                    }
                }
                m[(row, col)] += amp;
            }
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("Pauli sums always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            terms: Vec<PauliTerm>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        PauliSum::from_terms(raw.terms.into_iter().map(|t| (t.coeff, t.paulis)))
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", t.coeff)?;
            for (q, p) in &t.paulis {
                write!(f, "*{p:?}({q})")?;
            }
        }
        Ok(())
    }
}

/// Single-term string helper: `string(&[(0, Pauli::Z), (1, Pauli::Z)])`.
pub fn string(letters: &[(Qubit, Pauli)]) -> PauliString {
    letters.iter().copied().collect()
}

/// Coefficient of the Pauli string with X-mask `x` and Z-mask `z`, where
/// the string is i^{|x∧z|} X^x Z^z so that overlapping bits read as Y.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliCoefficient {
    pub x: usize,
    pub z: usize,
    pub coeff: C64,
}

impl PauliCoefficient {
    pub fn letters(&self, n: usize) -> Vec<(Qubit, Pauli)> {
        (0..n)
            .filter_map(|q| match ((self.x >> q) & 1, (self.z >> q) & 1) {
                (1, 0) => Some((q, Pauli::X)),
                (0, 1) => Some((q, Pauli::Z)),
                (1, 1) => Some((q, Pauli::Y)),
                _ => None,
            })
            .collect()
    }
}

/// Expands a 2^n × 2^n matrix in the Pauli basis. Terms with magnitude at
/// most 1e-14 of the largest are dropped.
pub fn decompose(a: &CMatrix) -> Result<Vec<PauliCoefficient>> {
    let n = qubits_of_square(a)?;
    let dim = 1usize << n;
    let mut out = Vec::new();
    let mut v = vec![ZERO; dim];
    for x in 0..dim {
        for (j, slot) in v.iter_mut().enumerate() {
            *slot = a[(j ^ x, j)];
        }
        walsh_hadamard(&mut v);
        for (z, &w) in v.iter().enumerate() {
            let ny = (x & z).count_ones() % 4;
            // (−i)^ny
            let ph = [ONE, C64::new(0.0, -1.0), -ONE, C64::new(0.0, 1.0)][ny as usize];
            out.push(PauliCoefficient {
                x,
                z,
                coeff: ph * w / dim as f64,
            });
        }
    }
    let max = out.iter().map(|c| c.coeff.norm()).fold(0.0, f64::max);
    out.retain(|c| c.coeff.norm() > 1e-14 * max);
    Ok(out)
}

/// In-place unnormalized Walsh–Hadamard transform.
fn walsh_hadamard(v: &mut [C64]) {
    let mut h = 1;
    while h < v.len() {
        for chunk in v.chunks_mut(2 * h) {
            let (lo, hi) = chunk.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Transverse-field Ising chain −J Σ Z_i Z_{i+1} + B Σ X_i on an open chain.
pub fn ising_chain(l: usize, j: f64, b: f64) -> Result<PauliSum> {
    let mut h = PauliSum::new();
    for i in 0..l.saturating_sub(1) {
        h.add_term(-j, string(&[(i, Pauli::Z), (i + 1, Pauli::Z)]))?;
    }
    for i in 0..l {
        h.add_term(b, string(&[(i, Pauli::X)]))?;
    }
    Ok(h)
}

/// Heisenberg model ¼ Σ_{(i,j)} (X_iX_j + Y_iY_j + ½ Z_iZ_j) over `edges`.
pub fn heisenberg(edges: &[(Qubit, Qubit)]) -> Result<PauliSum> {
    let mut h = PauliSum::new();
    for &(a, b) in edges {
        h.add_term(0.25, string(&[(a, Pauli::X), (b, Pauli::X)]))?;
        h.add_term(0.25, string(&[(a, Pauli::Y), (b, Pauli::Y)]))?;
        h.add_term(0.125, string(&[(a, Pauli::Z), (b, Pauli::Z)]))?;
    }
    Ok(h)
}

pub fn cycle_edges(l: usize) -> Vec<(Qubit, Qubit)> {
    (0..l).map(|i| (i, (i + 1) % l)).collect()
}
