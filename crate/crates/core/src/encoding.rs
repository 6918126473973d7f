//! The block-encoding abstraction and its constructors.
//!
//! An encoding is a circuit factory: given the operand (system) qubits and a
//! set of fresh ancillas it emits a unitary U with
//! (⟨0|_a ⊗ I) U (|0⟩_a ⊗ I) = A/α.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::circuit::{control_gates, Circuit, Gate, GateKind, Qubit, ResourceReport, Role};
use crate::error::{invalid, Error, Result};
use crate::linalg::{is_hermitian, CMatrix, C64};
use crate::pauli::{self, PauliSum};
use crate::state_prep::{self, AmplitudeSpec};

/// Emits the encoding's gates given the flat system qubits (operand 0
/// first, each operand little-endian) and the flat ancilla qubits (templates
/// in order).
pub type Program = Arc<dyn Fn(&[Qubit], &[Qubit], &mut Vec<Gate>) + Send + Sync>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AncillaTemplate {
    pub name: String,
    pub size: usize,
}

impl AncillaTemplate {
    pub fn new(name: &str, size: usize) -> Self {
        AncillaTemplate {
            name: name.to_string(),
            size,
        }
    }
}

#[derive(Clone)]
pub struct BlockEncoding {
    alpha: f64,
    epsilon: f64,
    ancillas: Vec<AncillaTemplate>,
    operands: Vec<usize>,
    hermitian: bool,
    program: Program,
}

impl fmt::Debug for BlockEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlockEncoding")
            .field("alpha", &self.alpha)
            .field("epsilon", &self.epsilon)
            .field("ancillas", &self.ancillas)
            .field("operands", &self.operands)
            .field("hermitian", &self.hermitian)
            .finish_non_exhaustive()
    }
}

impl BlockEncoding {
    /// Wraps caller-supplied parts. The block is not checked.
    pub fn custom(
        alpha: f64,
        ancillas: Vec<AncillaTemplate>,
        operands: Vec<usize>,
        hermitian: bool,
        epsilon: f64,
        program: Program,
    ) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        if !(epsilon >= 0.0) {
            return Err(invalid(format!("epsilon must be nonnegative, got {epsilon}")));
        }
        if operands.is_empty() || operands.contains(&0) {
            return Err(invalid("operands must be nonempty registers"));
        }
        if ancillas.iter().any(|t| t.size == 0) {
            return Err(invalid("ancilla templates must be nonempty"));
        }
        Ok(BlockEncoding {
            alpha,
            epsilon,
            ancillas,
            operands,
            hermitian,
            program,
        })
    }

    /// Wraps a fixed circuit: its system registers are the operands (in
    /// declaration order) and its ancilla registers the ancilla templates.
    pub fn from_circuit(alpha: f64, circuit: &Circuit, hermitian: bool, epsilon: f64) -> Result<Self> {
        if !circuit.is_measure_free() {
            return Err(Error::ContainsMeasure("block-encoding"));
        }
        let mut operands = Vec::new();
        let mut ancillas = Vec::new();
        // position of each circuit qubit in (flat system ++ flat ancilla)
        let mut sys_pos = Vec::new();
        let mut anc_pos = Vec::new();
        let mut start = 0;
        for r in circuit.registers() {
            match r.role {
                Role::System => {
                    operands.push(r.size);
                    sys_pos.extend(start..start + r.size);
                }
                Role::Ancilla => {
                    ancillas.push(AncillaTemplate::new(&r.name, r.size));
                    anc_pos.extend(start..start + r.size);
                }
            }
            start += r.size;
        }
        let mut slot = vec![(false, 0usize); start];
        for (i, &q) in sys_pos.iter().enumerate() {
            slot[q] = (true, i);
        }
        for (i, &q) in anc_pos.iter().enumerate() {
            slot[q] = (false, i);
        }
        let gates = circuit.gates().to_vec();
        let program: Program = Arc::new(move |sys, anc, out| {
            let map = |q: Qubit| match slot[q] {
                (true, i) => sys[i],
                (false, i) => anc[i],
            };
            out.extend(gates.iter().map(|g| g.remapped(map)));
        });
        Self::custom(alpha, ancillas, operands, hermitian, epsilon, program)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn ancilla_templates(&self) -> &[AncillaTemplate] {
        &self.ancillas
    }

    pub fn num_ancillas(&self) -> usize {
        self.ancillas.iter().map(|t| t.size).sum()
    }

    pub fn operand_shape(&self) -> &[usize] {
        &self.operands
    }

    pub fn num_system_qubits(&self) -> usize {
        self.operands.iter().sum()
    }

    pub fn dim(&self) -> usize {
        1 << self.num_system_qubits()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub(crate) fn with_params(&self, alpha: f64, epsilon: f64, hermitian: bool) -> Self {
        BlockEncoding {
            alpha,
            epsilon,
            hermitian,
            ..self.clone()
        }
    }

    /// Emits the unitary on explicit qubits.
    pub fn emit(&self, sys: &[Qubit], anc: &[Qubit], out: &mut Vec<Gate>) {
        debug_assert_eq!(sys.len(), self.num_system_qubits());
        debug_assert_eq!(anc.len(), self.num_ancillas());
        (self.program)(sys, anc, out)
    }

    /// Gate list of U on the standard layout of [`BlockEncoding::circuit`].
    pub fn gates(&self) -> Vec<Gate> {
        let (sys, anc) = self.standard_layout();
        let mut out = Vec::new();
        self.emit(&sys, &anc, &mut out);
        out
    }

    fn standard_layout(&self) -> (Vec<Qubit>, Vec<Qubit>) {
        let n_sys = self.num_system_qubits();
        let mut sys = Vec::with_capacity(n_sys);
        let mut hi = n_sys;
        for &size in &self.operands {
            sys.extend(hi - size..hi);
            hi -= size;
        }
        (sys, (n_sys..n_sys + self.num_ancillas()).collect())
    }

    /// The compiled unitary on a fresh circuit. Operand registers are laid
    /// out last-to-first so that the system index reads operand 0 as the most
    /// significant digit, and they occupy the low qubits; ancillas follow.
    pub fn circuit(&self) -> Result<Circuit> {
        let mut c = Circuit::new();
        let k = self.operands.len();
        for (i, &size) in self.operands.iter().enumerate().rev() {
            let name = if k == 1 { "system".to_string() } else { format!("system{i}") };
            c.add_register(&name, size, Role::System)?;
        }
        add_ancilla_registers(&mut c, &self.ancillas)?;
        c.extend(self.gates())?;
        Ok(c)
    }

    /// Appends U to `circuit` acting on `operands`, allocating fresh ancilla
    /// registers. Returns the ancilla qubits, which the caller post-selects.
    pub fn apply(&self, circuit: &mut Circuit, operands: &[Vec<Qubit>]) -> Result<Vec<Qubit>> {
        let sizes: Vec<usize> = operands.iter().map(Vec::len).collect();
        if sizes != self.operands {
            return Err(Error::ShapeMismatch {
                left: sizes,
                right: self.operands.clone(),
            });
        }
        let sys: Vec<Qubit> = operands.concat();
        let anc = add_ancilla_registers(circuit, &self.ancillas)?;
        let mut gates = Vec::new();
        self.emit(&sys, &anc, &mut gates);
        circuit.extend(gates)?;
        Ok(anc)
    }

    pub fn resources(&self) -> Result<ResourceReport> {
        Ok(self.circuit()?.resources())
    }

    /// ⟨ψ|Â|ψ⟩ for the state prepared by `prep` (real part).
    pub fn expectation_value(&self, prep: &Circuit) -> Result<f64> {
        crate::sim::expectation_value(self, prep)
    }
}

fn add_ancilla_registers(c: &mut Circuit, templates: &[AncillaTemplate]) -> Result<Vec<Qubit>> {
    let mut anc = Vec::new();
    for t in templates {
        let mut name = t.name.clone();
        let mut i = 1;
        while c.register_range(&name).is_some() {
            name = format!("{}_{i}", t.name);
            i += 1;
        }
        anc.extend(c.add_register(&name, t.size, Role::Ancilla)?);
    }
    Ok(anc)
}

/// Term unitaries of an LCU, written on system positions 0..n (position i is
/// the i-th flat system qubit).
#[derive(Clone, Debug, PartialEq)]
pub struct LcuTerm {
    pub weight: f64,
    pub gates: Vec<Gate>,
}

/// PREP, index-controlled SELECT, PREP† over positive weights. Every term
/// gate carries the full index pattern as controls; no work qubit is used,
/// so SELECT is exactly Σ|k⟩⟨k| ⊗ T_k on the whole space.
pub(crate) fn lcu(
    terms: Vec<LcuTerm>,
    operands: Vec<usize>,
    hermitian: bool,
    name: &str,
) -> Result<BlockEncoding> {
    if terms.is_empty() {
        return Err(invalid("LCU needs at least one term"));
    }
    let weights: Vec<f64> = terms.iter().map(|t| t.weight).collect();
    let amps = state_prep::pair_amplitudes(&weights)?;
    let alpha = weights.iter().sum();
    let m = state_prep::index_qubits(terms.len());
    let n_sys: usize = operands.iter().sum();
    for t in &terms {
        for g in &t.gates {
            if let Some(q) = g.qubits().find(|&q| q >= n_sys) {
                return Err(Error::UndeclaredQubit(q));
            }
            if g.kind == GateKind::Measure {
                return Err(Error::ContainsMeasure("LCU term"));
            }
        }
    }
    let mut ancillas = Vec::new();
    if m > 0 {
        ancillas.push(AncillaTemplate::new(name, m));
    }
    let spec = if m > 0 { Some(AmplitudeSpec::new(&amps)?) } else { None };
    let program: Program = Arc::new(move |sys, anc, out| {
        let idx = &anc[..m];
        let prep = match &spec {
            Some(s) => state_prep::prepare_gates(s, idx).expect("index register sized from the term count"),
            None => Vec::new(),
        };
        out.extend(prep.iter().cloned());
        for (k, t) in terms.iter().enumerate() {
            let local: Vec<Gate> = t.gates.iter().map(|g| g.remapped(|q| sys[q])).collect();
            if m == 0 {
                out.extend(local);
                continue;
            }
            let pol: Vec<bool> = (0..m).map(|b| (k >> b) & 1 == 1).collect();
            control_gates(&local, idx, &pol, out);
        }
        out.extend(crate::circuit::adjoint_gates(&prep).expect("state preparation is measure-free"));
    });
    BlockEncoding::custom(alpha, ancillas, operands, hermitian, 0.0, program)
}

/// LCU from positive weights and term circuits. Each circuit's qubits are
/// the flat system positions; all circuits must declare the same register
/// sizes, which become the operand shape. `self_inverse` asserts every term
/// is its own inverse, which makes the compiled unitary Hermitian.
pub fn from_lcu(coeffs: &[f64], unitaries: &[Circuit], self_inverse: bool) -> Result<BlockEncoding> {
    if coeffs.is_empty() || coeffs.len() != unitaries.len() {
        return Err(invalid(format!(
            "{} coefficients for {} unitaries",
            coeffs.len(),
            unitaries.len()
        )));
    }
    let shape: Vec<usize> = unitaries[0].registers().iter().map(|r| r.size).collect();
    if shape.is_empty() {
        return Err(invalid("term circuits must declare their operand registers"));
    }
    let mut terms = Vec::with_capacity(coeffs.len());
    for (&w, u) in coeffs.iter().zip(unitaries) {
        let s: Vec<usize> = u.registers().iter().map(|r| r.size).collect();
        if s != shape {
            return Err(Error::ShapeMismatch { left: shape, right: s });
        }
        terms.push(LcuTerm {
            weight: w,
            gates: u.gates().to_vec(),
        });
    }
    lcu(terms, shape, self_inverse, "lcu")
}

fn pauli_gates(letters: &[(Qubit, pauli::Pauli)], phase: f64) -> Vec<Gate> {
    let mut g: Vec<Gate> = letters.iter().map(|&(q, p)| p.gate(q)).collect();
    if phase != 0.0 {
        g.push(Gate::gphase(letters.first().map_or(0, |l| l.0), phase));
    }
    g
}

/// Pauli-basis LCU of a dense 2^n × 2^n matrix. Coefficient phases are
/// folded into the selected strings; α = Σ|c_P|.
pub fn from_array(a: &CMatrix) -> Result<BlockEncoding> {
    let n = crate::linalg::qubits_of_square(a)?;
    let coeffs = pauli::decompose(a)?;
    if coeffs.is_empty() {
        return Err(invalid("cannot block-encode the zero matrix"));
    }
    let terms = coeffs
        .iter()
        .map(|c| LcuTerm {
            weight: c.coeff.norm(),
            gates: pauli_gates(&c.letters(n), c.coeff.arg()),
        })
        .collect();
    lcu(terms, vec![n], is_hermitian(a, 1e-12), "pauli")
}

/// LCU of a Pauli sum on its natural number of qubits.
pub fn from_operator(op: &PauliSum) -> Result<BlockEncoding> {
    from_operator_sized(op, op.num_qubits())
}

/// LCU of a Pauli sum acting on `n` system qubits.
pub fn from_operator_sized(op: &PauliSum, n: usize) -> Result<BlockEncoding> {
    if n < op.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: op.num_qubits(),
            actual: n,
        });
    }
    let terms: Vec<LcuTerm> = op
        .terms()
        .iter()
        .filter(|t| t.coeff != 0.0)
        .map(|t| {
            let letters: Vec<_> = t.paulis.iter().map(|(&q, &p)| (q, p)).collect();
            let phase = if t.coeff < 0.0 { std::f64::consts::PI } else { 0.0 };
            LcuTerm {
                weight: t.coeff.abs(),
                gates: pauli_gates(&letters, phase),
            }
        })
        .collect();
    if terms.is_empty() {
        return Err(invalid("empty operator"));
    }
    lcu(terms, vec![n], true, "pauli")
}

/// Gates adding the constant `k` modulo 2^len to the register `qubits`
/// (little-endian).
pub fn add_constant_gates(qubits: &[Qubit], k: u64) -> Vec<Gate> {
    let n = qubits.len();
    let mut out = Vec::new();
    for b in 0..n {
        if (k >> b) & 1 == 0 {
            continue;
        }
        // increment of qubits[b..]: carry ripples from the top down
        for i in (b + 1..n).rev() {
            out.push(Gate::x(qubits[i]).controlled_by(&qubits[b..i], &vec![true; i - b]));
        }
        out.push(Gate::x(qubits[b]));
    }
    out
}

/// Cyclic shift |j⟩ ↦ |j + step mod 2^n⟩ as a circuit on `n` qubits.
pub fn cyclic_shift(n: usize, step: i64) -> Result<Circuit> {
    let mut c = Circuit::with_register("system", n, Role::System)?;
    let q: Vec<Qubit> = (0..n).collect();
    let mut gates = add_constant_gates(&q, step.unsigned_abs());
    if step < 0 {
        gates.reverse();
    }
    c.extend(gates)?;
    Ok(c)
}

/// Periodic second-difference matrix on 2^n points: −2 on the diagonal and
/// 1 on the two cyclic off-diagonals.
pub fn laplacian_matrix(n: usize) -> CMatrix {
    let dim = 1usize << n;
    CMatrix::from_fn(dim, dim, |r, c| {
        let d = (r + dim - c) % dim;
        if d == 0 {
            C64::new(-2.0, 0.0)
        } else if d == 1 || d == dim - 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Three-term LCU of [`laplacian_matrix`]: 2·(−I) + S + S⁻¹ with cyclic
/// shifts S, so α = 4.
pub fn laplacian_lcu(n: usize) -> Result<BlockEncoding> {
    let mut minus_id = Circuit::with_register("system", n, Role::System)?;
    minus_id.append(Gate::gphase(0, std::f64::consts::PI))?;
    let terms = [minus_id, cyclic_shift(n, 1)?, cyclic_shift(n, -1)?];
    from_lcu(&[2.0, 1.0, 1.0], &terms, false)
}

/// Ones on the k-th diagonal (k > 0 above the main diagonal). The system
/// register and a flag act as one (n+1)-bit register on which |j⟩ ↦ |j−k⟩;
/// entries that would wrap set the flag and leave the block.
pub fn from_eye(k: i64, n: usize) -> Result<BlockEncoding> {
    if n == 0 || n >= 63 {
        return Err(invalid(format!("unsupported register size {n}")));
    }
    if k.unsigned_abs() >= 1u64 << n {
        return Err(invalid(format!("diagonal index {k} out of range for {n} qubits")));
    }
    if k == 0 {
        return BlockEncoding::custom(1.0, vec![], vec![n], true, 0.0, Arc::new(|_, _, _| {}));
    }
    let program: Program = Arc::new(move |sys, anc, out| {
        let mut reg = sys.to_vec();
        reg.push(anc[0]);
        // subtracting k is the reversed (inverse) addition of k
        let mut g = add_constant_gates(&reg, k.unsigned_abs());
        if k > 0 {
            g.reverse();
        }
        out.extend(g);
    });
    BlockEncoding::custom(1.0, vec![AncillaTemplate::new("eye_flag", 1)], vec![n], false, 0.0, program)
}

/// A state on the projector's system register.
#[derive(Clone, Debug)]
pub enum Ket {
    Basis(usize),
    Prepared(Circuit),
}

impl Ket {
    fn gates(&self, n: usize) -> Result<Vec<Gate>> {
        match self {
            Ket::Basis(i) => {
                if *i >= 1usize << n {
                    return Err(invalid(format!("basis index {i} out of range for {n} qubits")));
                }
                Ok((0..n).filter(|q| (i >> q) & 1 == 1).map(Gate::x).collect())
            }
            Ket::Prepared(c) => {
                if c.num_qubits() != n {
                    return Err(Error::ShapeMismatch {
                        left: vec![c.num_qubits()],
                        right: vec![n],
                    });
                }
                if !c.is_measure_free() {
                    return Err(Error::ContainsMeasure("projector state"));
                }
                Ok(c.gates().to_vec())
            }
        }
    }

    fn width(&self) -> Option<usize> {
        match self {
            Ket::Basis(_) => None,
            Ket::Prepared(c) => Some(c.num_qubits()),
        }
    }
}

/// |φ⟩⟨ψ| with φ = `left`, ψ = `right`; `kernel` gives U_φ(I − |0⟩⟨0|)U_ψ†,
/// which is I − |φ⟩⟨φ| when the two sides agree. `n` is required when both
/// sides are basis indices.
pub fn from_projector(left: &Ket, right: &Ket, n: Option<usize>, kernel: bool) -> Result<BlockEncoding> {
    let n = match (left.width(), right.width(), n) {
        (Some(a), Some(b), _) if a != b => {
            return Err(Error::ShapeMismatch {
                left: vec![a],
                right: vec![b],
            })
        }
        (Some(a), _, _) | (None, Some(a), _) => a,
        (None, None, Some(n)) => n,
        (None, None, None) => return Err(invalid("register size needed for basis projectors")),
    };
    if n == 0 {
        return Err(invalid("projector needs at least one qubit"));
    }
    let lg = left.gates(n)?;
    let rg = right.gates(n)?;
    let hermitian = lg == rg;
    let r_inv = crate::circuit::adjoint_gates(&rg)?;
    let program: Program = Arc::new(move |sys, anc, out| {
        let f = anc[0];
        out.extend(r_inv.iter().map(|g| g.remapped(|q| sys[q])));
        out.push(Gate::x(f).controlled_by(sys, &vec![false; sys.len()]));
        if !kernel {
            out.push(Gate::x(f));
        }
        out.extend(lg.iter().map(|g| g.remapped(|q| sys[q])));
    });
    BlockEncoding::custom(1.0, vec![AncillaTemplate::new("proj_flag", 1)], vec![n], hermitian, 0.0, program)
}

/// The identity on `n` qubits.
pub fn identity(n: usize) -> Result<BlockEncoding> {
    from_eye(0, n)
}
