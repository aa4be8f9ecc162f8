//! Synthesis of arbitrary `n`-qubit unitaries into controlled single-qubit
//! gates.
//!
//! A unitary is diagonalized by Givens rotations between Gray-code-adjacent
//! basis states, so each rotation is a single-qubit gate on the one bit in
//! which the two states differ. Most of its `n - 1` controls can then be
//! dropped without disturbing entries that are already zero; the remaining
//! control counts follow a closed-form rule whose totals are tracked by
//! [`analytics`].
//!
//! ```
//! use qgd::{decompose, haar_random_unitary, distance_up_to_phase, DecomposeOptions};
//!
//! let u = haar_random_unitary(3, 11).unwrap();
//! let result = decompose(&u, &DecomposeOptions::default()).unwrap();
//! assert_eq!(result.circuit.gates.len(), 28);
//! let rebuilt = result.circuit.simulate().unwrap();
//! assert!(distance_up_to_phase(&rebuilt, &u).unwrap() < 1e-9);
//! ```
//!
//! Conventions: qubit 1 is the least significant bit of a basis index; gate
//! lists are first-applied first; Gray positions are one-based while raw
//! matrix rows and columns are zero-based.

pub mod analytics;
pub mod circuit;
pub mod cli;
pub mod error;
pub mod expand;
pub mod graycode;
pub mod matrix;
pub mod synth;

pub use analytics::{bound_check, cnot_report, g, g0, GateCountProfile};
pub use circuit::{export_qasm, Circuit, Gate, QasmOptions};
pub use error::{Error, Result};
pub use expand::{expand_circuit, expand_gate, CostModel};
pub use graycode::{changed_bit, gamma_of, gray_code, BasisMap, GrayCodeTable};
pub use matrix::{
    distance_up_to_phase, givens_of, haar_random_unitary, phase_normalize, ComplexMatrix,
    GlobalPhase, Mat2, UnitaryMatrix,
};
pub use synth::{
    control_count_table, decompose, minimal_controls, safety_check, schedule, Control, ControlSpec,
    DecomposeOptions, DecompositionResult,
};
