//! Circuits preparing real-amplitude states from |0…0⟩.
//!
//! Amplitudes are split top-down: the most significant qubit is rotated
//! first, and each lower qubit is rotated by a Y-multiplexor conditioned on
//! all qubits above it. The last level uses signed angles so negative
//! amplitudes come out without extra phase gates.

use std::f64::consts::PI;

use crate::circuit::{Circuit, Gate, Qubit, Role};
use crate::error::{invalid, Error, Result};

/// Rotations below this magnitude are dropped from synthesized circuits.
const ANGLE_CUTOFF: f64 = 1e-15;

/// A real amplitude vector of length 2^n. Normalization happens on
/// construction, so zero vectors are rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeSpec {
    amplitudes: Vec<f64>,
}

impl AmplitudeSpec {
    pub fn new(amplitudes: &[f64]) -> Result<Self> {
        if crate::linalg::log2_exact(amplitudes.len()).is_none() {
            return Err(invalid(format!(
                "amplitude count {} is not a power of two",
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(invalid("non-finite amplitude"));
        }
        let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(invalid("cannot prepare the zero vector"));
        }
        Ok(AmplitudeSpec {
            amplitudes: amplitudes.iter().map(|a| a / norm).collect(),
        })
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn num_qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }
}

/// Gates preparing `spec` on `qubits` (qubit `qubits[i]` carries bit `i` of
/// the amplitude index).
pub fn prepare_gates(spec: &AmplitudeSpec, qubits: &[Qubit]) -> Result<Vec<Gate>> {
    let n = spec.num_qubits();
    if qubits.len() != n {
        return Err(Error::DimensionMismatch {
            expected: 1 << qubits.len(),
            actual: spec.amplitudes.len(),
        });
    }
    let a = &spec.amplitudes;
    let mut out = Vec::new();
    // level for target qubit t: blocks of 2^(t+1) amplitudes share the bits
    // above t; within a block the lower half has bit t clear
    for t in (0..n).rev() {
        let block = 1usize << (t + 1);
        let half = block / 2;
        let angles: Vec<f64> = a
            .chunks(block)
            .map(|c| {
                let (lo, hi) = c.split_at(half);
                if t == 0 {
                    2.0 * hi[0].atan2(lo[0])
                } else {
                    let l = lo.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let h = hi.iter().map(|x| x * x).sum::<f64>().sqrt();
                    2.0 * h.atan2(l)
                }
            })
            .collect();
        let controls: Vec<Qubit> = qubits[t + 1..].to_vec();
        multiplexed_ry(&angles, &controls, qubits[t], &mut out);
    }
    Ok(out)
}

/// Applies RY(angles[v]) to `target` when the controls read `v` (bit i of
/// `v` is `controls[i]`), using the Gray-code CX pattern.
pub fn multiplexed_ry(angles: &[f64], controls: &[Qubit], target: Qubit, out: &mut Vec<Gate>) {
    let k = controls.len();
    debug_assert_eq!(angles.len(), 1 << k);
    if angles.iter().all(|a| a.abs() < ANGLE_CUTOFF) {
        return;
    }
    if k == 0 {
        out.push(Gate::ry(target, angles[0]));
        return;
    }
    let size = 1usize << k;
    let scale = 1.0 / size as f64;
    for i in 0..size {
        let g = i ^ (i >> 1);
        let theta: f64 = angles
            .iter()
            .enumerate()
            .map(|(v, &al)| if (v & g).count_ones() % 2 == 0 { al } else { -al })
            .sum::<f64>()
            * scale;
        if theta.abs() >= ANGLE_CUTOFF {
            out.push(Gate::ry(target, theta));
        }
        let flip = if i + 1 < size {
            (i + 1).trailing_zeros() as usize
        } else {
            k - 1
        };
        out.push(Gate::cx(controls[flip], target));
    }
}

/// Circuit over a fresh register preparing the normalized `amplitudes`.
pub fn prepare(amplitudes: &[f64]) -> Result<Circuit> {
    let spec = AmplitudeSpec::new(amplitudes)?;
    let n = spec.num_qubits();
    if n == 0 {
        return Ok(Circuit::new());
    }
    let mut c = Circuit::new();
    let q = c.add_register("state", n, Role::System)?;
    c.extend(prepare_gates(&spec, &q)?)?;
    Ok(c)
}

/// Amplitudes √(c_k/Σc) padded with zeros to the next power of two.
pub fn pair_amplitudes(coeffs: &[f64]) -> Result<Vec<f64>> {
    if coeffs.is_empty() {
        return Err(invalid("empty coefficient list"));
    }
    if let Some(c) = coeffs.iter().find(|c| !(**c > 0.0) || !c.is_finite()) {
        return Err(invalid(format!("coefficient {c} is not positive")));
    }
    let alpha: f64 = coeffs.iter().sum();
    let mut amps: Vec<f64> = coeffs.iter().map(|c| (c / alpha).sqrt()).collect();
    amps.resize(coeffs.len().next_power_of_two(), 0.0);
    Ok(amps)
}

/// Qubits needed to index `k` terms.
pub fn index_qubits(k: usize) -> usize {
    k.next_power_of_two().trailing_zeros() as usize
}

/// The PREP oracle for positive LCU weights on `qubits`.
pub fn prep_pair_gates(coeffs: &[f64], qubits: &[Qubit]) -> Result<Vec<Gate>> {
    let amps = pair_amplitudes(coeffs)?;
    if qubits.is_empty() {
        return Ok(Vec::new());
    }
    prepare_gates(&AmplitudeSpec::new(&amps)?, qubits)
}

/// Circuit preparing Σ_k √(c_k/α)|k⟩; a single term yields an empty circuit.
pub fn prep_pair(coeffs: &[f64]) -> Result<Circuit> {
    let amps = pair_amplitudes(coeffs)?;
    prepare(&amps)
}

/// Gates preparing Σ_k a_k|1^k 0^(d−k)⟩ on `qubits` (d = qubits.len(),
/// `amps.len() == d + 1`, signs allowed). Qubit j is rotated only when
/// qubit j−1 is set, so no other basis strings receive amplitude.
pub fn unary_prep_gates(amps: &[f64], qubits: &[Qubit]) -> Result<Vec<Gate>> {
    let d = qubits.len();
    if amps.len() != d + 1 {
        return Err(Error::DimensionMismatch {
            expected: d + 1,
            actual: amps.len(),
        });
    }
    // tail[k] = ∥a_k..a_d∥
    let mut tail = vec![0.0; d + 2];
    for k in (0..=d).rev() {
        tail[k] = (tail[k + 1] * tail[k + 1] + amps[k] * amps[k]).sqrt();
    }
    if tail[0] == 0.0 {
        return Err(invalid("cannot prepare the zero vector"));
    }
    let mut out = Vec::with_capacity(d);
    for j in 0..d {
        let rest = if j + 1 == d { amps[d] } else { tail[j + 1] };
        let theta = 2.0 * rest.atan2(amps[j]);
        if theta.abs() < ANGLE_CUTOFF {
            continue;
        }
        let g = Gate::ry(qubits[j], theta);
        out.push(if j == 0 {
            g
        } else {
            g.controlled_by(&[qubits[j - 1]], &[true])
        });
    }
    Ok(out)
}

/// Singlets (|01⟩ − |10⟩)/√2 on each matched pair, |0⟩ elsewhere.
pub fn singlet_prep(num_qubits: usize, matching: &[(Qubit, Qubit)]) -> Result<Circuit> {
    let mut used = vec![false; num_qubits];
    for &(a, b) in matching {
        for q in [a, b] {
            if q >= num_qubits {
                return Err(Error::UndeclaredQubit(q));
            }
            if std::mem::replace(&mut used[q], true) {
                return Err(invalid(format!("qubit {q} appears in two pairs")));
            }
        }
    }
    let mut c = Circuit::with_register("state", num_qubits, Role::System)?;
    for &(a, b) in matching {
        c.append(Gate::x(b))?;
        c.append(Gate::ry(a, PI / 2.0))?;
        c.append(Gate::cx(a, b))?;
        c.append(Gate::z(a))?;
    }
    Ok(c)
}
