//! Walk operators W = R·U and the Chebyshev polynomials they generate.

use std::sync::Arc;

use crate::circuit::{adjoint_gates, control_gates, Gate, Qubit};
use crate::encoding::{AncillaTemplate, BlockEncoding, Program};
use crate::error::{invalid, Error, Result};
use crate::state_prep;

/// Reflection 2|0⟩⟨0| − I on `anc`. Empty for no ancillas, where the
/// reflection is the identity.
pub fn zero_reflection(anc: &[Qubit], out: &mut Vec<Gate>) {
    let Some((&last, rest)) = anc.split_last() else {
        return;
    };
    out.push(Gate::x(last));
    out.push(Gate::z(last).controlled_by(rest, &vec![false; rest.len()]));
    out.push(Gate::x(last));
    out.push(Gate::gphase(last, std::f64::consts::PI));
}

/// The qubitized walk W = R·U of a Hermitian encoding, itself an encoding of
/// the same block on the same ancillas.
pub fn walk(enc: &BlockEncoding) -> Result<BlockEncoding> {
    if !enc.is_hermitian() {
        return Err(Error::NotHermitian("qubitization"));
    }
    let base = enc.clone();
    let program: Program = Arc::new(move |sys, anc, out| {
        base.emit(sys, anc, out);
        zero_reflection(anc, out);
    });
    BlockEncoding::custom(
        enc.alpha(),
        enc.ancilla_templates().to_vec(),
        enc.operand_shape().to_vec(),
        false,
        enc.epsilon(),
        program,
    )
}

/// Emits W^k (k may be negative for powers of W†).
pub fn emit_walk_power(walk: &BlockEncoding, k: i64, sys: &[Qubit], anc: &[Qubit], out: &mut Vec<Gate>) {
    if k == 0 {
        return;
    }
    let mut w = Vec::new();
    walk.emit(sys, anc, &mut w);
    if k < 0 {
        w = adjoint_gates(&w).expect("walk operators are measure-free");
    }
    for _ in 0..k.unsigned_abs() {
        out.extend(w.iter().cloned());
    }
}

/// Encoding of T_k(A/α) as W^k, reporting the base α.
pub fn chebyshev(enc: &BlockEncoding, k: usize) -> Result<BlockEncoding> {
    let w = walk(enc)?;
    if k == 1 {
        return Ok(w);
    }
    let program: Program = Arc::new(move |sys, anc, out| emit_walk_power(&w, k as i64, sys, anc, out));
    BlockEncoding::custom(
        enc.alpha(),
        enc.ancilla_templates().to_vec(),
        enc.operand_shape().to_vec(),
        k == 0,
        enc.epsilon(),
        program,
    )
}

/// How the unary rungs map onto walk powers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Ladder {
    /// every rung applies W; rung count d
    Full,
    /// only even degrees: every rung applies W²
    Even,
    /// only odd degrees: W once, then rungs of W²
    Odd,
}

/// Block Σ c_k T_k(A/α) / ∥c∥₁ from real Chebyshev coefficients via a
/// unary-indexed LCU of walk powers; α is reported as ∥c∥₁. Series with a
/// single parity use rungs of W², halving the unary register.
pub fn unary_chebyshev_lcu(enc: &BlockEncoding, coeffs: &[f64]) -> Result<BlockEncoding> {
    if !enc.is_hermitian() {
        return Err(Error::NotHermitian("Chebyshev LCU"));
    }
    let mut c = coeffs.to_vec();
    while c.len() > 1 && *c.last().unwrap() == 0.0 {
        c.pop();
    }
    if c.iter().any(|x| !x.is_finite()) {
        return Err(invalid("non-finite Chebyshev coefficient"));
    }
    let norm: f64 = c.iter().map(|x| x.abs()).sum();
    if norm == 0.0 {
        return Err(invalid("zero series"));
    }
    let d = c.len() - 1;
    if d == 0 {
        return crate::encoding::identity(enc.num_system_qubits())?
            .scale(c[0])
            .map(|e| reshape(e, enc));
    }
    let ladder = if d >= 2 && c.iter().step_by(2).all(|&x| x == 0.0) {
        Ladder::Odd
    } else if d >= 2 && c.iter().skip(1).step_by(2).all(|&x| x == 0.0) {
        Ladder::Even
    } else {
        Ladder::Full
    };
    // weights per unary string 1^k
    let weights: Vec<f64> = match ladder {
        Ladder::Full => c.clone(),
        Ladder::Even => c.iter().step_by(2).copied().collect(),
        Ladder::Odd => c.iter().skip(1).step_by(2).copied().collect(),
    };
    let rungs = weights.len() - 1;
    let abs_amps: Vec<f64> = weights.iter().map(|w| (w.abs() / norm).sqrt()).collect();
    let signed_amps: Vec<f64> = weights
        .iter()
        .zip(&abs_amps)
        .map(|(w, a)| if *w < 0.0 { -a } else { *a })
        .collect();
    let w = walk(enc)?;
    let m = enc.num_ancillas();
    let mut templates = enc.ancilla_templates().to_vec();
    if rungs > 0 {
        templates.push(AncillaTemplate::new("unary", rungs));
    }
    let program: Program = Arc::new(move |sys, anc, out| {
        let (walk_anc, unary) = anc.split_at(m);
        let prep = state_prep::unary_prep_gates(&abs_amps, unary).expect("unary register sized from the series");
        let unprep = state_prep::unary_prep_gates(&signed_amps, unary).expect("unary register sized from the series");
        out.extend(prep);
        if ladder == Ladder::Odd {
            emit_walk_power(&w, 1, sys, walk_anc, out);
        }
        let step = if ladder == Ladder::Full { 1 } else { 2 };
        let mut rung = Vec::new();
        emit_walk_power(&w, step, sys, walk_anc, &mut rung);
        for &u in unary {
            control_gates(&rung, &[u], &[true], out);
        }
        out.extend(adjoint_gates(&unprep).expect("state preparation is measure-free"));
    });
    BlockEncoding::custom(norm, templates, enc.operand_shape().to_vec(), false, 0.0, program)
}

/// Carries the operand shape of `like` over to an identity-based encoding.
fn reshape(e: BlockEncoding, like: &BlockEncoding) -> BlockEncoding {
    let inner = e.clone();
    BlockEncoding::custom(
        e.alpha(),
        e.ancilla_templates().to_vec(),
        like.operand_shape().to_vec(),
        e.is_hermitian(),
        e.epsilon(),
        Arc::new(move |sys, anc, out| inner.emit(sys, anc, out)),
    )
    .expect("identity encodings are valid")
}
