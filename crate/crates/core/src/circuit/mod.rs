//! Gate-level intermediate representation.
//!
//! A [`Circuit`] is an ordered list of [`Gate`]s over qubits grouped into named
//! registers. Qubits are addressed by a flat index: registers are laid out in
//! declaration order, and qubit `q` corresponds to bit `q` of a basis-state
//! index (little-endian).

mod decompose;
mod resources;

use std::collections::HashSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use decompose::{decompose_gate, decomposition_ancillas};
pub use resources::ResourceReport;

pub type Qubit = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    Ancilla,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub size: usize,
    pub role: Role,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    #[serde(rename = "x")]
    X,
    #[serde(rename = "y")]
    Y,
    #[serde(rename = "z")]
    Z,
    #[serde(rename = "h")]
    H,
    #[serde(rename = "s")]
    S,
    #[serde(rename = "s_dg")]
    Sdg,
    #[serde(rename = "t")]
    T,
    #[serde(rename = "t_dg")]
    Tdg,
    #[serde(rename = "rx")]
    RX,
    #[serde(rename = "ry")]
    RY,
    #[serde(rename = "rz")]
    RZ,
    #[serde(rename = "p")]
    Phase,
    #[serde(rename = "gphase")]
    GlobalPhase,
    #[serde(rename = "cx")]
    CX,
    #[serde(rename = "mcx")]
    MCX,
    #[serde(rename = "measure")]
    Measure,
}

impl GateKind {
    pub const ALL: [GateKind; 16] = [
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
        GateKind::MCX,
        GateKind::Measure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "s_dg",
            GateKind::T => "t",
            GateKind::Tdg => "t_dg",
            GateKind::RX => "rx",
            GateKind::RY => "ry",
            GateKind::RZ => "rz",
            GateKind::Phase => "p",
            GateKind::GlobalPhase => "gphase",
            GateKind::CX => "cx",
            GateKind::MCX => "mcx",
            GateKind::Measure => "measure",
        }
    }

    /// Rotation and phase kinds carry an angle; all others must not.
    pub fn has_angle(self) -> bool {
        matches!(
            self,
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::Phase | GateKind::GlobalPhase
        )
    }

    fn is_x_family(self) -> bool {
        matches!(self, GateKind::X | GateKind::CX | GateKind::MCX)
    }
}

/// A single gate: one target qubit, optional controls with per-control
/// polarity (`true` fires on |1⟩, `false` on |0⟩), and an angle for
/// rotation/phase kinds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<Qubit>,
    #[serde(default)]
    pub controls: Vec<Qubit>,
    #[serde(default)]
    pub polarity: Vec<bool>,
    #[serde(default)]
    pub angle: Option<f64>,
}

impl Gate {
    fn single(kind: GateKind, q: Qubit) -> Self {
        Gate {
            kind,
            targets: vec![q],
            controls: Vec::new(),
            polarity: Vec::new(),
            angle: None,
        }
    }

    fn rotation(kind: GateKind, q: Qubit, angle: f64) -> Self {
        Gate {
            angle: Some(angle),
            ..Gate::single(kind, q)
        }
    }

    pub fn x(q: Qubit) -> Self {
        Gate::single(GateKind::X, q)
    }
    pub fn y(q: Qubit) -> Self {
        Gate::single(GateKind::Y, q)
    }
    pub fn z(q: Qubit) -> Self {
        Gate::single(GateKind::Z, q)
    }
    pub fn h(q: Qubit) -> Self {
        Gate::single(GateKind::H, q)
    }
    pub fn s(q: Qubit) -> Self {
        Gate::single(GateKind::S, q)
    }
    pub fn sdg(q: Qubit) -> Self {
        Gate::single(GateKind::Sdg, q)
    }
    pub fn t(q: Qubit) -> Self {
        Gate::single(GateKind::T, q)
    }
    pub fn tdg(q: Qubit) -> Self {
        Gate::single(GateKind::Tdg, q)
    }
    pub fn rx(q: Qubit, theta: f64) -> Self {
        Gate::rotation(GateKind::RX, q, theta)
    }
    pub fn ry(q: Qubit, theta: f64) -> Self {
        Gate::rotation(GateKind::RY, q, theta)
    }
    pub fn rz(q: Qubit, theta: f64) -> Self {
        Gate::rotation(GateKind::RZ, q, theta)
    }
    pub fn phase(q: Qubit, phi: f64) -> Self {
        Gate::rotation(GateKind::Phase, q, phi)
    }
    /// Global phase e^{iφ}. The qubit is nominal; it only anchors the gate
    /// for depth accounting and becomes the phase target once controlled.
    pub fn gphase(q: Qubit, phi: f64) -> Self {
        Gate::rotation(GateKind::GlobalPhase, q, phi)
    }
    pub fn measure(q: Qubit) -> Self {
        Gate::single(GateKind::Measure, q)
    }
    pub fn cx(control: Qubit, target: Qubit) -> Self {
        Gate {
            kind: GateKind::CX,
            targets: vec![target],
            controls: vec![control],
            polarity: vec![true],
            angle: None,
        }
    }
    pub fn mcx(controls: &[Qubit], target: Qubit) -> Self {
        Gate::x(target).controlled_by(controls, &vec![true; controls.len()])
    }

    /// Adds controls to this gate. X-family gates are renamed to CX/MCX to
    /// match the total control count; GlobalPhase keeps its kind here (see
    /// [`control_gates`] for the phase-kickback rewrite).
    pub fn controlled_by(mut self, controls: &[Qubit], polarity: &[bool]) -> Self {
        self.controls.extend_from_slice(controls);
        self.polarity.extend_from_slice(polarity);
        if self.kind.is_x_family() {
            self.kind = match self.controls.len() {
                0 => GateKind::X,
                1 => GateKind::CX,
                _ => GateKind::MCX,
            };
        }
        self
    }

    pub fn target(&self) -> Qubit {
        self.targets[0]
    }

    pub fn qubits(&self) -> impl Iterator<Item = Qubit> + '_ {
        self.targets.iter().chain(self.controls.iter()).copied()
    }

    pub fn validate(&self) -> Result<()> {
        if self.targets.len() != 1 {
            return Err(Error::InvalidGate(format!(
                "{} needs exactly one target, got {}",
                self.kind.name(),
                self.targets.len()
            )));
        }
        if self.controls.len() != self.polarity.len() {
            return Err(Error::InvalidGate("controls and polarity lengths differ".into()));
        }
        if self.kind.has_angle() != self.angle.is_some() {
            return Err(Error::InvalidGate(format!(
                "angle presence does not match gate kind {}",
                self.kind.name()
            )));
        }
        if let Some(a) = self.angle {
            if !a.is_finite() {
                return Err(Error::InvalidGate("non-finite angle".into()));
            }
        }
        let n_ctrl = self.controls.len();
        let ok = match self.kind {
            GateKind::X => n_ctrl == 0,
            GateKind::CX => n_ctrl == 1,
            GateKind::MCX => n_ctrl >= 1,
            GateKind::Measure => n_ctrl == 0,
            _ => true,
        };
        if !ok {
            return Err(Error::InvalidGate(format!(
                "{} cannot carry {} controls",
                self.kind.name(),
                n_ctrl
            )));
        }
        let mut seen = HashSet::new();
        for q in self.qubits() {
            if !seen.insert(q) {
                return Err(Error::InvalidGate(format!("qubit {q} used twice in one gate")));
            }
        }
        Ok(())
    }

    /// The inverse gate; measurements have none.
    pub fn inverse(&self) -> Result<Gate> {
        let mut g = self.clone();
        g.kind = match self.kind {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::Measure => return Err(Error::ContainsMeasure("adjoint")),
            k => k,
        };
        g.angle = self.angle.map(|a| -a);
        Ok(g)
    }

    /// Relabels every qubit through `map`.
    pub fn remapped(&self, map: impl Fn(Qubit) -> Qubit) -> Gate {
        let mut g = self.clone();
        g.targets.iter_mut().for_each(|q| *q = map(*q));
        g.controls.iter_mut().for_each(|q| *q = map(*q));
        g
    }
}

/// Inverse of a gate sequence: reversed order, each gate inverted.
pub fn adjoint_gates(gates: &[Gate]) -> Result<Vec<Gate>> {
    gates.iter().rev().map(Gate::inverse).collect()
}

/// Adds `controls` to every gate. A global phase becomes a phase gate on the
/// controls, since e^{iφ} conditioned on the controls is a relative phase.
pub fn control_gates(gates: &[Gate], controls: &[Qubit], polarity: &[bool], out: &mut Vec<Gate>) {
    for g in gates {
        if g.kind != GateKind::GlobalPhase {
            out.push(g.clone().controlled_by(controls, polarity));
            continue;
        }
        let mut all_c = g.controls.clone();
        let mut all_p = g.polarity.clone();
        all_c.extend_from_slice(controls);
        all_p.extend_from_slice(polarity);
        let Some(anchor) = all_c.pop() else {
            out.push(g.clone());
            continue;
        };
        let pol = all_p.pop().unwrap_or(true);
        let phi = g.angle.unwrap_or(0.0);
        let ph = Gate::phase(anchor, phi).controlled_by(&all_c, &all_p);
        if pol {
            out.push(ph);
        } else {
            out.push(Gate::x(anchor));
            out.push(ph);
            out.push(Gate::x(anchor));
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    registers: Vec<Register>,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    /// A circuit with a single register.
    pub fn with_register(name: &str, size: usize, role: Role) -> Result<Self> {
        let mut c = Circuit::new();
        c.add_register(name, size, role)?;
        Ok(c)
    }

    /// Declares a register and returns its qubit indices.
    pub fn add_register(&mut self, name: &str, size: usize, role: Role) -> Result<Vec<Qubit>> {
        if size == 0 {
            return Err(Error::InvalidRegister(format!("register '{name}' has size 0")));
        }
        if self.registers.iter().any(|r| r.name == name) {
            return Err(Error::InvalidRegister(format!("duplicate register name '{name}'")));
        }
        let start = self.num_qubits();
        self.registers.push(Register {
            name: name.to_string(),
            size,
            role,
        });
        Ok((start..start + size).collect())
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn into_gates(self) -> Vec<Gate> {
        self.gates
    }

    pub fn num_qubits(&self) -> usize {
        self.registers.iter().map(|r| r.size).sum()
    }

    pub fn register_range(&self, name: &str) -> Option<Range<Qubit>> {
        let mut start = 0;
        for r in &self.registers {
            if r.name == name {
                return Some(start..start + r.size);
            }
            start += r.size;
        }
        None
    }

    /// Qubits belonging to registers with the given role, in index order.
    pub fn qubits_with_role(&self, role: Role) -> Vec<Qubit> {
        let mut out = Vec::new();
        let mut start = 0;
        for r in &self.registers {
            if r.role == role {
                out.extend(start..start + r.size);
            }
            start += r.size;
        }
        out
    }

    pub fn append(&mut self, gate: Gate) -> Result<()> {
        gate.validate()?;
        let n = self.num_qubits();
        if let Some(q) = gate.qubits().find(|&q| q >= n) {
            return Err(Error::UndeclaredQubit(q));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend<I: IntoIterator<Item = Gate>>(&mut self, gates: I) -> Result<()> {
        for g in gates {
            self.append(g)?;
        }
        Ok(())
    }

    pub fn is_measure_free(&self) -> bool {
        self.gates.iter().all(|g| g.kind != GateKind::Measure)
    }

    /// Reversed circuit with every gate inverted.
    pub fn adjoint(&self) -> Result<Circuit> {
        Ok(Circuit {
            registers: self.registers.clone(),
            gates: adjoint_gates(&self.gates)?,
        })
    }

    /// Conditions every gate on `controls`, which must be declared qubits
    /// that no gate of this circuit touches.
    pub fn controlled(&self, controls: &[Qubit], polarity: &[bool]) -> Result<Circuit> {
        if controls.len() != polarity.len() {
            return Err(Error::InvalidGate("controls and polarity lengths differ".into()));
        }
        if !self.is_measure_free() {
            return Err(Error::ContainsMeasure("controlled"));
        }
        let n = self.num_qubits();
        let used: HashSet<Qubit> = self.gates.iter().flat_map(|g| g.qubits()).collect();
        let mut seen = HashSet::new();
        for &c in controls {
            if c >= n {
                return Err(Error::UndeclaredQubit(c));
            }
            if used.contains(&c) || !seen.insert(c) {
                return Err(Error::ControlOverlap(c));
            }
        }
        let mut gates = Vec::with_capacity(self.gates.len());
        control_gates(&self.gates, controls, polarity, &mut gates);
        Ok(Circuit {
            registers: self.registers.clone(),
            gates,
        })
    }

    /// Rewrites the circuit over the base gate set. Multi-controlled gates
    /// borrow clean ancillas from an extra register named `decomp`.
    pub fn decompose(&self) -> Circuit {
        let n = self.num_qubits();
        let extra = decomposition_ancillas(&self.gates);
        let mut registers = self.registers.clone();
        if extra > 0 {
            let mut name = "decomp".to_string();
            while registers.iter().any(|r| r.name == name) {
                name.push('_');
            }
            registers.push(Register {
                name,
                size: extra,
                role: Role::Ancilla,
            });
        }
        let pool: Vec<Qubit> = (n..n + extra).collect();
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            decompose_gate(g, &pool, &mut |d| gates.push(d));
        }
        Circuit { registers, gates }
    }

    pub fn resources(&self) -> ResourceReport {
        ResourceReport::of_gates(self.num_qubits(), &self.gates)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuit serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Circuit> {
        let raw: Circuit = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let mut c = Circuit::new();
        for r in &raw.registers {
            c.add_register(&r.name, r.size, r.role)?;
        }
        c.extend(raw.gates)?;
        Ok(c)
    }
}
