use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{decompose_gate, decomposition_ancillas, Gate, GateKind};

/// Gate counts by base-gate name, DAG depth, and peak qubit allocation, all
/// measured on the decomposed circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub gate_counts: BTreeMap<String, usize>,
    pub depth: usize,
    pub qubits: usize,
}

/// Gate names that can survive decomposition.
pub const BASE_GATES: [GateKind; 15] = [
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::H,
    GateKind::S,
    GateKind::Sdg,
    GateKind::T,
    GateKind::Tdg,
    GateKind::RX,
    GateKind::RY,
    GateKind::RZ,
    GateKind::Phase,
    GateKind::GlobalPhase,
    GateKind::CX,
    GateKind::Measure,
];

impl ResourceReport {
    /// Decomposes `gates` on the fly (without materializing the expanded
    /// circuit) and tallies the result.
    pub fn of_gates(num_qubits: usize, gates: &[Gate]) -> ResourceReport {
        let extra = decomposition_ancillas(gates);
        let total = num_qubits + extra;
        let pool: Vec<usize> = (num_qubits..total).collect();
        let mut counts = [0usize; 16];
        let mut layer = vec![0usize; total];
        let mut depth = 0;
        for g in gates {
            decompose_gate(g, &pool, &mut |d| {
                counts[d.kind as usize] += 1;
                let t = d.qubits().map(|q| layer[q]).max().unwrap_or(0) + 1;
                for q in d.qubits() {
                    layer[q] = t;
                }
                depth = depth.max(t);
            });
        }
        let gate_counts = BASE_GATES
            .iter()
            .map(|k| (k.name().to_string(), counts[*k as usize]))
            .collect();
        ResourceReport {
            gate_counts,
            depth,
            qubits: total,
        }
    }

    pub fn total_gates(&self) -> usize {
        self.gate_counts.values().sum()
    }

    pub fn count(&self, name: &str) -> usize {
        self.gate_counts.get(name).copied().unwrap_or(0)
    }
}
