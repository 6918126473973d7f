//! Block-encodings of linear operators as composable values compiled to
//! gate-level circuits, with a statevector simulator to verify them.

pub mod algebra;
pub mod approx;
pub mod circuit;
pub mod encoding;
pub mod error;
pub mod gqsp;
pub mod linalg;
pub mod pauli;
pub mod qubitization;
pub mod sim;
pub mod solvers;
pub mod state_prep;

pub use circuit::{Circuit, Gate, GateKind, Qubit, Register, ResourceReport, Role};
pub use encoding::{AncillaTemplate, BlockEncoding, Ket};
pub use error::{Error, Result};
pub use pauli::{Pauli, PauliSum};
pub use sim::{PostSelectResult, StateVector};
