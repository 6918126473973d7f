//! Arithmetic on block-encodings: sums, scalar multiples, products and
//! tensor products.

use std::sync::Arc;

use crate::circuit::{control_gates, Gate};
use crate::encoding::{AncillaTemplate, BlockEncoding, Program};
use crate::error::{invalid, Error, Result};

fn same_shape(a: &BlockEncoding, b: &BlockEncoding) -> Result<()> {
    if a.operand_shape() != b.operand_shape() {
        return Err(Error::ShapeMismatch {
            left: a.operand_shape().to_vec(),
            right: b.operand_shape().to_vec(),
        });
    }
    Ok(())
}

impl BlockEncoding {
    /// A + B. A flag qubit in state √α_A|0⟩ + √α_B|1⟩ selects the branch;
    /// both branches share one ancilla register sized for the larger.
    pub fn add(&self, other: &BlockEncoding) -> Result<BlockEncoding> {
        same_shape(self, other)?;
        let (a, b) = (self.clone(), other.clone());
        let (ma, mb) = (a.num_ancillas(), b.num_ancillas());
        let shared = ma.max(mb);
        let theta = 2.0 * b.alpha().sqrt().atan2(a.alpha().sqrt());
        let mut templates = vec![AncillaTemplate::new("add_flag", 1)];
        if shared > 0 {
            templates.push(AncillaTemplate::new("add_shared", shared));
        }
        let alpha = a.alpha() + b.alpha();
        let epsilon = a.epsilon() + b.epsilon();
        let hermitian = a.is_hermitian() && b.is_hermitian();
        let operands = a.operand_shape().to_vec();
        let program: Program = Arc::new(move |sys, anc, out| {
            let flag = anc[0];
            let pool = &anc[1..];
            out.push(Gate::ry(flag, theta));
            let mut g = Vec::new();
            a.emit(sys, &pool[..ma], &mut g);
            control_gates(&g, &[flag], &[false], out);
            g.clear();
            b.emit(sys, &pool[..mb], &mut g);
            control_gates(&g, &[flag], &[true], out);
            out.push(Gate::ry(flag, -theta));
        });
        BlockEncoding::custom(alpha, templates, operands, hermitian, epsilon, program)
    }

    pub fn sub(&self, other: &BlockEncoding) -> Result<BlockEncoding> {
        self.add(&other.neg())
    }

    /// c·A: α scales by |c|, a negative c adds a global phase of π.
    pub fn scale(&self, c: f64) -> Result<BlockEncoding> {
        if c == 0.0 || !c.is_finite() {
            return Err(invalid(format!("cannot scale by {c}")));
        }
        let alpha = self.alpha() * c.abs();
        let epsilon = self.epsilon() * c.abs();
        if c > 0.0 {
            return Ok(self.with_params(alpha, epsilon, self.is_hermitian()));
        }
        let inner = self.clone();
        let program: Program = Arc::new(move |sys, anc, out| {
            inner.emit(sys, anc, out);
            out.push(Gate::gphase(sys[0], std::f64::consts::PI));
        });
        BlockEncoding::custom(
            alpha,
            self.ancilla_templates().to_vec(),
            self.operand_shape().to_vec(),
            self.is_hermitian(),
            epsilon,
            program,
        )
    }

    pub fn neg(&self) -> BlockEncoding {
        self.scale(-1.0).expect("−1 is a valid scale")
    }

    /// A·B: B's circuit then A's, on disjoint ancillas.
    pub fn matmul(&self, other: &BlockEncoding) -> Result<BlockEncoding> {
        same_shape(self, other)?;
        let (a, b) = (self.clone(), other.clone());
        let ma = a.num_ancillas();
        let mut templates = a.ancilla_templates().to_vec();
        templates.extend(b.ancilla_templates().iter().cloned());
        let alpha = a.alpha() * b.alpha();
        let epsilon = b.alpha() * a.epsilon() + a.alpha() * b.epsilon();
        let operands = a.operand_shape().to_vec();
        let program: Program = Arc::new(move |sys, anc, out| {
            b.emit(sys, &anc[ma..], out);
            a.emit(sys, &anc[..ma], out);
        });
        BlockEncoding::custom(alpha, templates, operands, false, epsilon, program)
    }

    /// A ⊗ B on the concatenated operands.
    pub fn kron(&self, other: &BlockEncoding) -> BlockEncoding {
        let (a, b) = (self.clone(), other.clone());
        let ma = a.num_ancillas();
        let na = a.num_system_qubits();
        let mut templates = a.ancilla_templates().to_vec();
        templates.extend(b.ancilla_templates().iter().cloned());
        let mut operands = a.operand_shape().to_vec();
        operands.extend_from_slice(b.operand_shape());
        let alpha = a.alpha() * b.alpha();
        let epsilon = b.alpha() * a.epsilon() + a.alpha() * b.epsilon();
        let hermitian = a.is_hermitian() && b.is_hermitian();
        let program: Program = Arc::new(move |sys, anc, out| {
            a.emit(&sys[..na], &anc[..ma], out);
            b.emit(&sys[na..], &anc[ma..], out);
        });
        BlockEncoding::custom(alpha, templates, operands, hermitian, epsilon, program)
            .expect("parts of valid encodings form a valid encoding")
    }
}
