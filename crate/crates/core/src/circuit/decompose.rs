use std::f64::consts::FRAC_PI_4;

use super::{Gate, GateKind, Qubit};

/// Clean ancillas needed to decompose the widest gate in `gates`.
pub fn decomposition_ancillas(gates: &[Gate]) -> usize {
    gates
        .iter()
        .map(|g| {
            let k = g.controls.len();
            match g.kind {
                GateKind::X | GateKind::CX | GateKind::MCX => k.saturating_sub(2),
                // becomes a phase on one control, conditioned on the rest
                GateKind::GlobalPhase => k.saturating_sub(2),
                GateKind::Measure => 0,
                _ => {
                    if k >= 2 {
                        k - 1
                    } else {
                        0
                    }
                }
            }
        })
        .max()
        .unwrap_or(0)
}

/// Expands one gate over the base set, borrowing qubits from `pool` as clean
/// ancillas. Every borrowed ancilla is returned to |0⟩.
pub fn decompose_gate(g: &Gate, pool: &[Qubit], emit: &mut dyn FnMut(Gate)) {
    let flips: Vec<Qubit> = g
        .controls
        .iter()
        .zip(&g.polarity)
        .filter(|(_, &p)| !p)
        .map(|(&q, _)| q)
        .collect();
    for &q in &flips {
        emit(Gate::x(q));
    }
    positive(g.kind, g.target(), &g.controls, g.angle, pool, emit);
    for &q in &flips {
        emit(Gate::x(q));
    }
}

fn positive(
    kind: GateKind,
    target: Qubit,
    controls: &[Qubit],
    angle: Option<f64>,
    pool: &[Qubit],
    emit: &mut dyn FnMut(Gate),
) {
    let k = controls.len();
    match kind {
        GateKind::GlobalPhase if k > 0 => {
            let (&anchor, rest) = controls.split_last().unwrap();
            positive(GateKind::Phase, anchor, rest, angle, pool, emit);
        }
        GateKind::X | GateKind::CX | GateKind::MCX => match k {
            0 => emit(Gate::x(target)),
            1 => emit(Gate::cx(controls[0], target)),
            2 => toffoli(controls[0], controls[1], target, emit),
            _ => {
                let anc = &pool[..k - 2];
                let ladder = and_ladder(&controls[..k - 1], anc);
                for &(a, b, t) in &ladder {
                    toffoli(a, b, t, emit);
                }
                toffoli(anc[k - 3], controls[k - 1], target, emit);
                for &(a, b, t) in ladder.iter().rev() {
                    toffoli(a, b, t, emit);
                }
            }
        },
        _ if k == 0 => emit(Gate {
            kind,
            targets: vec![target],
            controls: vec![],
            polarity: vec![],
            angle,
        }),
        _ if k == 1 => single_controlled(kind, angle, controls[0], target, emit),
        _ => {
            let anc = &pool[..k - 1];
            let ladder = and_ladder(controls, anc);
            for &(a, b, t) in &ladder {
                toffoli(a, b, t, emit);
            }
            single_controlled(kind, angle, anc[k - 2], target, emit);
            for &(a, b, t) in ladder.iter().rev() {
                toffoli(a, b, t, emit);
            }
        }
    }
}

/// Toffolis computing the AND of `controls` (len ≥ 2) into `anc[len-2]`.
fn and_ladder(controls: &[Qubit], anc: &[Qubit]) -> Vec<(Qubit, Qubit, Qubit)> {
    let mut out = vec![(controls[0], controls[1], anc[0])];
    for i in 2..controls.len() {
        out.push((anc[i - 2], controls[i], anc[i - 1]));
    }
    out
}

fn toffoli(c1: Qubit, c2: Qubit, t: Qubit, emit: &mut dyn FnMut(Gate)) {
    emit(Gate::h(t));
    emit(Gate::cx(c2, t));
    emit(Gate::tdg(t));
    emit(Gate::cx(c1, t));
    emit(Gate::t(t));
    emit(Gate::cx(c2, t));
    emit(Gate::tdg(t));
    emit(Gate::cx(c1, t));
    emit(Gate::t(c2));
    emit(Gate::t(t));
    emit(Gate::h(t));
    emit(Gate::cx(c1, c2));
    emit(Gate::t(c1));
    emit(Gate::tdg(c2));
    emit(Gate::cx(c1, c2));
}

fn controlled_phase(phi: f64, c: Qubit, t: Qubit, emit: &mut dyn FnMut(Gate)) {
    emit(Gate::phase(c, phi / 2.0));
    emit(Gate::cx(c, t));
    emit(Gate::phase(t, -phi / 2.0));
    emit(Gate::cx(c, t));
    emit(Gate::phase(t, phi / 2.0));
}

fn controlled_z(c: Qubit, t: Qubit, emit: &mut dyn FnMut(Gate)) {
    emit(Gate::h(t));
    emit(Gate::cx(c, t));
    emit(Gate::h(t));
}

fn single_controlled(kind: GateKind, angle: Option<f64>, c: Qubit, t: Qubit, emit: &mut dyn FnMut(Gate)) {
    let theta = angle.unwrap_or(0.0);
    match kind {
        GateKind::X | GateKind::CX | GateKind::MCX => emit(Gate::cx(c, t)),
        GateKind::Y => {
            emit(Gate::sdg(t));
            emit(Gate::cx(c, t));
            emit(Gate::s(t));
        }
        GateKind::Z => controlled_z(c, t, emit),
        GateKind::H => {
            emit(Gate::ry(t, -FRAC_PI_4));
            controlled_z(c, t, emit);
            emit(Gate::ry(t, FRAC_PI_4));
        }
        GateKind::S => controlled_phase(std::f64::consts::FRAC_PI_2, c, t, emit),
        GateKind::Sdg => controlled_phase(-std::f64::consts::FRAC_PI_2, c, t, emit),
        GateKind::T => controlled_phase(FRAC_PI_4, c, t, emit),
        GateKind::Tdg => controlled_phase(-FRAC_PI_4, c, t, emit),
        GateKind::Phase => controlled_phase(theta, c, t, emit),
        GateKind::GlobalPhase => emit(Gate::phase(c, theta)),
        GateKind::RZ => {
            emit(Gate::rz(t, theta / 2.0));
            emit(Gate::cx(c, t));
            emit(Gate::rz(t, -theta / 2.0));
            emit(Gate::cx(c, t));
        }
        GateKind::RY => {
            emit(Gate::ry(t, theta / 2.0));
            emit(Gate::cx(c, t));
            emit(Gate::ry(t, -theta / 2.0));
            emit(Gate::cx(c, t));
        }
        GateKind::RX => {
            emit(Gate::h(t));
            emit(Gate::rz(t, theta / 2.0));
            emit(Gate::cx(c, t));
            emit(Gate::rz(t, -theta / 2.0));
            emit(Gate::cx(c, t));
            emit(Gate::h(t));
        }
        GateKind::Measure => unreachable!("measurements carry no controls"),
    }
}
