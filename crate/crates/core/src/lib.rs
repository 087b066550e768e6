//! Toolchain for mixed-dimensional (qudit) quantum circuits.
//!
//! * [`qasm`]: DITQASM 2.0 parser and canonical printer.
//! * [`sim`]: dense state-vector and decision-diagram simulators.
//! * [`noise`]: stochastic shift/clock error injection over shots.
//! * [`compiler`]: two-level-rotation compilation passes and state preparation.
//! * [`device`]: declarative device descriptions.
//!
//! Basis ordering is shared by every component: the first qudit of the
//! first-declared register is the most significant digit.

pub mod circuit;
pub mod compiler;
pub mod device;
pub mod error;
pub mod gate;
pub mod math;
pub mod noise;
pub mod qasm;
pub mod radix;
pub mod sim;

pub use circuit::{circuit_stats, circuit_unitary, Circuit, CircuitStats, ClassicRegister, Instruction, QuantumRegister};
pub use error::{Error, Result};
pub use gate::{controlled_matrix, gate_matrix, ControlSpec, GateKind, GateSpec};
pub use math::{Matrix, C64};
pub use radix::{index_to_digits, radix_index};
