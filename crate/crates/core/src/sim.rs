//! Statevector simulation and the verification utilities built on it.
//!
//! Basis index bit `q` is the state of qubit `q`. In circuits produced by
//! [`BlockEncoding::circuit`] the system qubits occupy the low bits, so the
//! system amplitude of index `j` with all ancillas at zero sits at index `j`.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate, GateKind, Qubit, Role};
use crate::encoding::BlockEncoding;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ONE, ZERO};

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 22;

/// Below this many amplitudes gates are applied on the calling thread.
const PAR_THRESHOLD: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
    num_qubits: usize,
}

impl StateVector {
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_budget(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: index + 1,
            });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(StateVector { amps, num_qubits })
    }

    /// Wraps raw amplitudes; the length must be a power of two. No
    /// normalization is applied.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let num_qubits = crate::linalg::log2_exact(amps.len()).ok_or(Error::DimensionMismatch {
            expected: amps.len().next_power_of_two(),
            actual: amps.len(),
        })?;
        check_budget(num_qubits)?;
        Ok(StateVector { amps, num_qubits })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Probability that `qubit` reads 0.
    pub fn prob_zero(&self, qubit: Qubit) -> f64 {
        let bit = 1usize << qubit;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Applies a measure-free gate in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate()?;
        if let Some(q) = gate.qubits().find(|&q| q >= self.num_qubits) {
            return Err(Error::UndeclaredQubit(q));
        }
        if gate.kind == GateKind::Measure {
            return Err(Error::ContainsMeasure("run"));
        }
        apply_gate(&mut self.amps, gate);
        Ok(())
    }

    /// Draws `shots` basis-state samples.
    pub fn sample_counts<R: Rng + ?Sized>(&self, shots: usize, rng: &mut R) -> BTreeMap<usize, usize> {
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = rng.random::<f64>() * acc;
            let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            *counts.entry(idx).or_insert(0) += 1;
        }
        counts
    }
}

fn check_budget(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        Err(Error::QubitBudget {
            requested: n,
            budget: MAX_QUBITS,
        })
    } else {
        Ok(())
    }
}

/// 2×2 matrix of an uncontrolled single-qubit kind, row-major.
fn gate_matrix(kind: GateKind, angle: Option<f64>) -> [C64; 4] {
    use std::f64::consts::FRAC_1_SQRT_2;
    let th = angle.unwrap_or(0.0);
    let (c, s) = ((th / 2.0).cos(), (th / 2.0).sin());
    let r = |x: f64| C64::new(x, 0.0);
    let i = C64::new(0.0, 1.0);
    match kind {
        GateKind::X | GateKind::CX | GateKind::MCX => [ZERO, ONE, ONE, ZERO],
        GateKind::Y => [ZERO, -i, i, ZERO],
        GateKind::Z => [ONE, ZERO, ZERO, -ONE],
        GateKind::H => [
            r(FRAC_1_SQRT_2),
            r(FRAC_1_SQRT_2),
            r(FRAC_1_SQRT_2),
            r(-FRAC_1_SQRT_2),
        ],
        GateKind::S => [ONE, ZERO, ZERO, i],
        GateKind::Sdg => [ONE, ZERO, ZERO, -i],
        GateKind::T => [ONE, ZERO, ZERO, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
        GateKind::Tdg => [ONE, ZERO, ZERO, C64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)],
        GateKind::RX => [r(c), -i * s, -i * s, r(c)],
        GateKind::RY => [r(c), r(-s), r(s), r(c)],
        GateKind::RZ => [
            C64::from_polar(1.0, -th / 2.0),
            ZERO,
            ZERO,
            C64::from_polar(1.0, th / 2.0),
        ],
        GateKind::Phase => [ONE, ZERO, ZERO, C64::from_polar(1.0, th)],
        GateKind::GlobalPhase => {
            let p = C64::from_polar(1.0, th);
            [p, ZERO, ZERO, p]
        }
        GateKind::Measure => unreachable!("measurements are rejected before application"),
    }
}

/// Raw view of the amplitude buffer shared across workers that touch
/// disjoint index pairs.
struct SharedAmps(*mut C64);
unsafe impl Sync for SharedAmps {}
unsafe impl Send for SharedAmps {}

impl SharedAmps {
    fn at(&self, i: usize) -> *mut C64 {
        // SAFETY: callers pass indices inside the buffer.
        unsafe { self.0.add(i) }
    }
}

/// Spreads the low bits of `k` over the set bits of `mask`.
fn deposit(mut k: usize, mask: usize) -> usize {
    let mut out = 0;
    let mut m = mask;
    while m != 0 {
        let low = m & m.wrapping_neg();
        if k & 1 == 1 {
            out |= low;
        }
        k >>= 1;
        m &= m - 1;
    }
    out
}

/// Visits every pair (i, i | 2^t) whose control bits match `cval` under
/// `cmask`, with bit t of i clear. Only matching pairs are enumerated.
fn for_each_pair<F>(amps: &mut [C64], t: usize, cmask: usize, cval: usize, f: F)
where
    F: Fn(&mut C64, &mut C64) + Sync,
{
    let bit = 1usize << t;
    let free = (amps.len() - 1) & !cmask & !bit;
    let count = 1usize << free.count_ones();
    let ptr = SharedAmps(amps.as_mut_ptr());
    let visit = |first: usize, len: usize| {
        let mut x = deposit(first, free);
        for _ in 0..len {
            let i = x | cval;
            // SAFETY: i and i | bit lie in the buffer, and distinct x give
            // distinct pairs, so no two visits alias.
            unsafe { f(&mut *ptr.at(i), &mut *ptr.at(i | bit)) };
            x = (x | !free).wrapping_add(1) & free;
        }
    };
    const SPAN: usize = 1 << 12;
    if 2 * count < PAR_THRESHOLD {
        visit(0, count);
    } else {
        (0..count / SPAN).into_par_iter().for_each(|c| visit(c * SPAN, SPAN));
    }
}

fn apply_gate(amps: &mut [C64], g: &Gate) {
    let mut cmask = 0usize;
    let mut cval = 0usize;
    for (&q, &p) in g.controls.iter().zip(&g.polarity) {
        cmask |= 1 << q;
        if p {
            cval |= 1 << q;
        }
    }
    let t = g.target();
    if g.kind == GateKind::GlobalPhase {
        let p = C64::from_polar(1.0, g.angle.unwrap_or(0.0));
        for_each_pair(amps, t, cmask, cval, |a, b| {
            *a *= p;
            *b *= p;
        });
        return;
    }
    let [m00, m01, m10, m11] = gate_matrix(g.kind, g.angle);
    if matches!(g.kind, GateKind::X | GateKind::CX | GateKind::MCX) {
        for_each_pair(amps, t, cmask, cval, std::mem::swap);
    } else if m01 == ZERO && m10 == ZERO {
        if m00 == ONE && m11.im == 0.0 {
            let r = m11.re;
            for_each_pair(amps, t, cmask, cval, |_, b| *b = C64::new(r * b.re, r * b.im));
        } else if m00 == ONE {
            for_each_pair(amps, t, cmask, cval, |_, b| *b *= m11);
        } else {
            for_each_pair(amps, t, cmask, cval, |a, b| {
                *a *= m00;
                *b *= m11;
            });
        }
    } else if [m00, m01, m10, m11].iter().all(|m| m.im == 0.0) {
        let [r00, r01, r10, r11] = [m00.re, m01.re, m10.re, m11.re];
        for_each_pair(amps, t, cmask, cval, |a, b| {
            let (x, y) = (*a, *b);
            *a = C64::new(r00 * x.re + r01 * y.re, r00 * x.im + r01 * y.im);
            *b = C64::new(r10 * x.re + r11 * y.re, r10 * x.im + r11 * y.im);
        });
    } else {
        for_each_pair(amps, t, cmask, cval, |a, b| {
            let (x, y) = (*a, *b);
            *a = m00 * x + m01 * y;
            *b = m10 * x + m11 * y;
        });
    }
}

/// Applies a measure-free circuit to `initial`.
pub fn run(circuit: &Circuit, initial: &StateVector) -> Result<StateVector> {
    if !circuit.is_measure_free() {
        return Err(Error::ContainsMeasure("run"));
    }
    let n = circuit.num_qubits();
    check_budget(n)?;
    if initial.num_qubits != n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            actual: initial.amps.len(),
        });
    }
    let mut out = initial.clone();
    for g in circuit.gates() {
        apply_gate(&mut out.amps, g);
    }
    Ok(out)
}

/// Full unitary of a small circuit, column by column.
pub fn unitary(circuit: &Circuit) -> Result<CMatrix> {
    let n = circuit.num_qubits();
    check_budget(n)?;
    let dim = 1usize << n;
    let cols: Vec<Vec<C64>> = (0..dim)
        .into_par_iter()
        .map(|j| run(circuit, &StateVector::basis(n, j)?).map(StateVector::into_amplitudes))
        .collect::<Result<_>>()?;
    Ok(CMatrix::from_fn(dim, dim, |r, c| cols[c][r]))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PostSelectResult {
    pub state: StateVector,
    pub success_probability: f64,
}

/// Projects `ancillas` onto |0⟩ and renormalizes. The surviving qubits keep
/// their relative order.
pub fn postselect_zero(state: &StateVector, ancillas: &[Qubit]) -> Result<PostSelectResult> {
    let n = state.num_qubits;
    let mut amask = 0usize;
    for &q in ancillas {
        if q >= n {
            return Err(Error::UndeclaredQubit(q));
        }
        amask |= 1 << q;
    }
    let keep: Vec<Qubit> = (0..n).filter(|q| amask & (1 << q) == 0).collect();
    let mut out = vec![ZERO; 1 << keep.len()];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut idx = 0usize;
        for (b, &q) in keep.iter().enumerate() {
            if k & (1 << b) != 0 {
                idx |= 1 << q;
            }
        }
        *slot = state.amps[idx];
    }
    let p: f64 = out.iter().map(|a| a.norm_sqr()).sum();
    if p <= 0.0 {
        return Err(Error::Degenerate(p));
    }
    let s = p.sqrt();
    out.iter_mut().for_each(|a| *a /= s);
    Ok(PostSelectResult {
        state: StateVector {
            amps: out,
            num_qubits: keep.len(),
        },
        success_probability: p,
    })
}

/// The top-left block (⟨0|_a ⊗ I) U (|0⟩_a ⊗ I) of the compiled encoding,
/// one column per system basis state.
pub fn extract_block(enc: &BlockEncoding) -> Result<CMatrix> {
    let circuit = enc.circuit()?;
    let n = circuit.num_qubits();
    check_budget(n)?;
    let dim = enc.dim();
    let cols: Vec<Vec<C64>> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let out = run(&circuit, &StateVector::basis(n, j)?)?;
            Ok(out.amps[..dim].to_vec())
        })
        .collect::<Result<_>>()?;
    Ok(CMatrix::from_fn(dim, dim, |r, c| cols[c][r]))
}

/// Prepares the system with `prep`, applies the encoding and projects the
/// ancillas, which is what a repeat-until-success loop delivers on its
/// successful attempt.
pub fn apply_rus_emulated(enc: &BlockEncoding, prep: &Circuit) -> Result<PostSelectResult> {
    let state = run_prepared(enc, prep)?;
    let n_sys = enc.num_system_qubits();
    let anc: Vec<Qubit> = (n_sys..state.num_qubits).collect();
    let res = postselect_zero(&state, &anc)?;
    if res.success_probability < 1e-12 {
        return Err(Error::Degenerate(res.success_probability));
    }
    Ok(res)
}

/// Same as [`apply_rus_emulated`] for an explicit system state.
pub fn apply_to_state(enc: &BlockEncoding, system: &[C64]) -> Result<PostSelectResult> {
    if system.len() != enc.dim() {
        return Err(Error::DimensionMismatch {
            expected: enc.dim(),
            actual: system.len(),
        });
    }
    let circuit = enc.circuit()?;
    let n = circuit.num_qubits();
    check_budget(n)?;
    let mut amps = vec![ZERO; 1 << n];
    amps[..system.len()].copy_from_slice(system);
    let out = run(&circuit, &StateVector { amps, num_qubits: n })?;
    let anc: Vec<Qubit> = (enc.num_system_qubits()..n).collect();
    postselect_zero(&out, &anc)
}

/// Number of attempts until the first success of a loop that succeeds with
/// probability `p` per attempt.
pub fn sample_rus_attempts<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Result<u64> {
    if !(p >= 1e-12 && p <= 1.0) {
        return Err(Error::Degenerate(p));
    }
    let mut n = 1;
    while rng.random::<f64>() >= p {
        n += 1;
    }
    Ok(n)
}

fn run_prepared(enc: &BlockEncoding, prep: &Circuit) -> Result<StateVector> {
    let n_sys = enc.num_system_qubits();
    if prep.num_qubits() != n_sys {
        return Err(Error::ShapeMismatch {
            left: vec![prep.num_qubits()],
            right: enc.operand_shape().to_vec(),
        });
    }
    if !prep.is_measure_free() {
        return Err(Error::ContainsMeasure("state preparation"));
    }
    let u = enc.circuit()?;
    check_budget(u.num_qubits())?;
    let mut full = Circuit::new();
    for r in u.registers() {
        full.add_register(&r.name, r.size, r.role)?;
    }
    full.extend(prep.gates().iter().cloned())?;
    full.extend(u.gates().iter().cloned())?;
    run(&full, &StateVector::zero(full.num_qubits())?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Real,
    Imag,
}

/// α·Re or α·Im of ⟨0,ψ|U|0,ψ⟩ via the Hadamard test, with ψ prepared by
/// `prep`. `shots = None` evaluates the test probability exactly.
pub fn hadamard_test<R: Rng + ?Sized>(
    enc: &BlockEncoding,
    prep: &Circuit,
    part: Part,
    shots: Option<(usize, &mut R)>,
) -> Result<f64> {
    let n_sys = enc.num_system_qubits();
    if prep.num_qubits() != n_sys {
        return Err(Error::ShapeMismatch {
            left: vec![prep.num_qubits()],
            right: enc.operand_shape().to_vec(),
        });
    }
    let u = enc.circuit()?;
    let mut c = Circuit::new();
    for r in u.registers() {
        c.add_register(&r.name, r.size, r.role)?;
    }
    let h = c.add_register("hadamard", 1, Role::Ancilla)?[0];
    check_budget(c.num_qubits())?;
    c.extend(prep.gates().iter().cloned())?;
    c.append(Gate::h(h))?;
    let mut controlled = Vec::with_capacity(u.gates().len());
    crate::circuit::control_gates(u.gates(), &[h], &[true], &mut controlled);
    c.extend(controlled)?;
    if part == Part::Imag {
        c.append(Gate::sdg(h))?;
    }
    c.append(Gate::h(h))?;
    let out = run(&c, &StateVector::zero(c.num_qubits())?)?;
    let p0 = out.prob_zero(h);
    let p0 = match shots {
        None => p0,
        Some((0, _)) => return Err(crate::error::invalid("shot count must be positive")),
        Some((n, rng)) => {
            let hits = (0..n).filter(|_| rng.random::<f64>() < p0).count();
            hits as f64 / n as f64
        }
    };
    Ok(enc.alpha() * (2.0 * p0 - 1.0))
}

/// Exact ⟨ψ|Â|ψ⟩ real part through the Hadamard test.
pub fn expectation_value(enc: &BlockEncoding, prep: &Circuit) -> Result<f64> {
    hadamard_test::<rand_chacha::ChaCha8Rng>(enc, prep, Part::Real, None)
}
