//! Gate-level circuit representation, dense simulation and serialization.
//!
//! Gate lists are ordered first-applied first: a circuit `[g1, g2, ..., gM]`
//! with phase `t` denotes the operator `e^{it} * GM * ... * G2 * G1`.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    apply_controlled_u2_unchecked, wrap_angle, ComplexMatrix, GlobalPhase, Mat2, UnitaryMatrix,
};
use crate::synth::{Control, ControlSpec};

/// Tolerance for the unitarity and determinant of 2x2 payloads.
pub const PAYLOAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    SingleQubit {
        target: usize,
        matrix: Mat2,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    /// A special-unitary payload on `spec.target` under the polarized controls of `spec`.
    ControlledU2 {
        spec: ControlSpec,
        matrix: Mat2,
    },
}

impl Gate {
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            Gate::SingleQubit { target, matrix } => {
                ControlSpec::uncontrolled(*target).validate(n)?;
                if !matrix.is_unitary(PAYLOAD_TOL) {
                    return Err(Error::InvalidGate(format!(
                        "single-qubit payload on qubit {target} is not unitary"
                    )));
                }
            }
            Gate::Cnot { control, target } => {
                ControlSpec::new(
                    *target,
                    vec![Control {
                        qubit: *control,
                        value: true,
                    }],
                )
                .validate(n)?;
            }
            Gate::ControlledU2 { spec, matrix } => {
                spec.validate(n)?;
                if !matrix.is_special_unitary(PAYLOAD_TOL) {
                    let det = matrix.det();
                    return Err(Error::NotSpecialUnitary {
                        det_re: det.re,
                        det_im: det.im,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Gate {
        match self {
            Gate::SingleQubit { target, matrix } => Gate::SingleQubit {
                target: *target,
                matrix: matrix.adjoint(),
            },
            Gate::Cnot { .. } => self.clone(),
            Gate::ControlledU2 { spec, matrix } => Gate::ControlledU2 {
                spec: spec.clone(),
                matrix: matrix.adjoint(),
            },
        }
    }

    /// Left-multiplies `a` by this gate's full operator.
    pub fn apply(&self, a: &mut ComplexMatrix) {
        match self {
            Gate::SingleQubit { target, matrix } => {
                apply_controlled_u2_unchecked(a, &ControlSpec::uncontrolled(*target), matrix)
            }
            Gate::Cnot { control, target } => apply_controlled_u2_unchecked(
                a,
                &ControlSpec::new(
                    *target,
                    vec![Control {
                        qubit: *control,
                        value: true,
                    }],
                ),
                &Mat2::X,
            ),
            Gate::ControlledU2 { spec, matrix } => apply_controlled_u2_unchecked(a, spec, matrix),
        }
    }

    pub fn is_elementary(&self) -> bool {
        !matches!(self, Gate::ControlledU2 { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n: usize,
    pub gates: Vec<Gate>,
    pub global_phase: GlobalPhase,
}

impl Circuit {
    pub fn new(n: usize, gates: Vec<Gate>, global_phase: GlobalPhase) -> Result<Self> {
        for g in &gates {
            g.validate(n)?;
        }
        Ok(Self {
            n,
            gates,
            global_phase,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            gates: Vec::new(),
            global_phase: GlobalPhase::default(),
        }
    }

    /// `other` applied after `self`; phases add.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut gates = self.gates.clone();
        gates.extend(other.gates.iter().cloned());
        Ok(Circuit {
            n: self.n,
            gates,
            global_phase: GlobalPhase::new(self.global_phase.angle() + other.global_phase.angle()),
        })
    }

    pub fn adjoint(&self) -> Circuit {
        Circuit {
            n: self.n,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
            global_phase: GlobalPhase::new(-self.global_phase.angle()),
        }
    }

    pub fn cnot_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Cnot { .. }))
            .count()
    }

    pub fn single_qubit_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::SingleQubit { .. }))
            .count()
    }

    pub fn is_elementary(&self) -> bool {
        self.gates.iter().all(Gate::is_elementary)
    }

    /// The full `2^n x 2^n` operator, including the global phase.
    pub fn simulate(&self) -> Result<UnitaryMatrix> {
        let mut a = ComplexMatrix::identity(self.n)?;
        for g in &self.gates {
            g.validate(self.n)?;
            g.apply(&mut a);
        }
        a.scale(self.global_phase.factor());
        Ok(UnitaryMatrix::new_unchecked(a))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CircuitDoc::from(self)).expect("circuit documents serialize")
    }

    pub fn from_json(text: &str) -> Result<Circuit> {
        let doc: CircuitDoc =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        doc.into_circuit()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Circuit> {
        Circuit::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

type ComplexPair = [f64; 2];
type MatrixDoc = [[ComplexPair; 2]; 2];

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDoc {
    n: usize,
    global_phase: f64,
    gates: Vec<GateDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum GateDoc {
    SingleQubit {
        target: usize,
        matrix: MatrixDoc,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    ControlledU2 {
        target: usize,
        controls: Vec<ControlDoc>,
        matrix: MatrixDoc,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ControlDoc {
    qubit: usize,
    value: u8,
}

fn matrix_doc(m: &Mat2) -> MatrixDoc {
    m.0.map(|row| row.map(|z| [z.re, z.im]))
}

fn matrix_from_doc(d: &MatrixDoc) -> Mat2 {
    Mat2(d.map(|row| row.map(|[re, im]| Complex64::new(re, im))))
}

impl From<&Circuit> for CircuitDoc {
    fn from(c: &Circuit) -> Self {
        let gates = c
            .gates
            .iter()
            .map(|g| match g {
                Gate::SingleQubit { target, matrix } => GateDoc::SingleQubit {
                    target: *target,
                    matrix: matrix_doc(matrix),
                },
                Gate::Cnot { control, target } => GateDoc::Cnot {
                    control: *control,
                    target: *target,
                },
                Gate::ControlledU2 { spec, matrix } => GateDoc::ControlledU2 {
                    target: spec.target,
                    controls: spec
                        .controls
                        .iter()
                        .map(|c| ControlDoc {
                            qubit: c.qubit,
                            value: u8::from(c.value),
                        })
                        .collect(),
                    matrix: matrix_doc(matrix),
                },
            })
            .collect();
        CircuitDoc {
            n: c.n,
            global_phase: c.global_phase.angle(),
            gates,
        }
    }
}

impl CircuitDoc {
    fn into_circuit(self) -> Result<Circuit> {
        if self.n == 0 || self.n > crate::matrix::MAX_QUBITS {
            return Err(Error::Schema(format!(
                "n: {} outside 1..={}",
                self.n,
                crate::matrix::MAX_QUBITS
            )));
        }
        if !self.global_phase.is_finite() {
            return Err(Error::Schema("global_phase: not finite".into()));
        }
        let mut gates = Vec::with_capacity(self.gates.len());
        for (index, doc) in self.gates.into_iter().enumerate() {
            let gate = match doc {
                GateDoc::SingleQubit { target, matrix } => Gate::SingleQubit {
                    target,
                    matrix: matrix_from_doc(&matrix),
                },
                GateDoc::Cnot { control, target } => Gate::Cnot { control, target },
                GateDoc::ControlledU2 {
                    target,
                    controls,
                    matrix,
                } => {
                    let mut parsed = Vec::with_capacity(controls.len());
                    for (ci, c) in controls.iter().enumerate() {
                        let value = match c.value {
                            0 => false,
                            1 => true,
                            v => return Err(Error::Schema(format!(
                                "gates[{index}].controls[{ci}].value: expected 0 or 1, found {v}"
                            ))),
                        };
                        parsed.push(Control {
                            qubit: c.qubit,
                            value,
                        });
                    }
                    Gate::ControlledU2 {
                        spec: ControlSpec {
                            target,
                            controls: parsed,
                        },
                        matrix: matrix_from_doc(&matrix),
                    }
                }
            };
            gate.validate(self.n)
                .map_err(|e| Error::Schema(format!("gates[{index}]: {e}")))?;
            gates.push(gate);
        }
        Ok(Circuit {
            n: self.n,
            gates,
            global_phase: GlobalPhase::new(self.global_phase),
        })
    }
}

/// Parameters of `M = e^{i phase} * U3(theta, phi, lambda)` where
/// `U3 = [[cos t/2, -e^{i l} sin t/2], [e^{i p} sin t/2, e^{i(p+l)} cos t/2]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct U3Angles {
    pub theta: f64,
    pub phi: f64,
    pub lambda: f64,
    pub phase: f64,
}

impl U3Angles {
    pub fn of(m: &Mat2) -> U3Angles {
        let [[a, b], [c, d]] = m.0;
        let theta = 2.0 * c.norm().atan2(a.norm());
        let (phase, phi, lambda);
        if a.norm() > 1e-12 && c.norm() > 1e-12 {
            phase = a.arg();
            phi = c.arg() - phase;
            lambda = (-b).arg() - phase;
        } else if c.norm() <= 1e-12 {
            phase = a.arg();
            phi = 0.0;
            lambda = d.arg() - phase;
        } else {
            phase = c.arg();
            phi = 0.0;
            lambda = (-b).arg() - phase;
        }
        U3Angles {
            theta,
            phi: wrap_angle(phi),
            lambda: wrap_angle(lambda),
            phase,
        }
    }

    pub fn matrix(&self) -> Mat2 {
        let (s, c) = (self.theta / 2.0).sin_cos();
        let e = |x: f64| Complex64::from_polar(1.0, x);
        Mat2::new(
            c.into(),
            -e(self.lambda) * s,
            e(self.phi) * s,
            e(self.phi + self.lambda) * c,
        )
        .scale(e(self.phase))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct QasmOptions {
    /// Emit `u3(0,0,0)` for identity single-qubit gates instead of dropping them.
    pub emit_identities: bool,
}

/// Writes an elementary circuit as OpenQASM 2.0 (`u3` and `cx` only).
///
/// Qubit `q` maps to `q[q-1]`. Phases factored out of each `u3` are added to
/// the circuit phase, which is recorded in a `// global_phase` comment.
pub fn export_qasm(circuit: &Circuit, options: QasmOptions) -> Result<String> {
    let mut body = String::new();
    let mut phase = circuit.global_phase.angle();
    for (index, gate) in circuit.gates.iter().enumerate() {
        match gate {
            Gate::SingleQubit { target, matrix } => {
                if !options.emit_identities && matrix.is_identity(PAYLOAD_TOL) {
                    continue;
                }
                let u3 = U3Angles::of(matrix);
                phase += u3.phase;
                let _ = writeln!(
                    body,
                    "u3({},{},{}) q[{}];",
                    u3.theta,
                    u3.phi,
                    u3.lambda,
                    target - 1
                );
            }
            Gate::Cnot { control, target } => {
                let _ = writeln!(body, "cx q[{}],q[{}];", control - 1, target - 1);
            }
            Gate::ControlledU2 { spec, .. } => {
                return Err(Error::UnsupportedGate {
                    index,
                    reason: format!(
                        "controlled gate on qubit {} with {} controls must be expanded first",
                        spec.target,
                        spec.len()
                    ),
                })
            }
        }
    }
    Ok(format!(
        "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n// global_phase {}\nqreg q[{}];\n{body}",
        wrap_angle(phase),
        circuit.n
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::haar_random_unitary;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn empty_circuit_is_identity() {
        let u = Circuit::empty(2).simulate().unwrap();
        assert_eq!(u.matrix().distance_from_identity(), 0.0);
    }

    #[test]
    fn cnot_swaps_rows_three_and_four() {
        let circuit = Circuit::new(
            2,
            vec![Gate::Cnot {
                control: 2,
                target: 1,
            }],
            GlobalPhase::default(),
        )
        .unwrap();
        let u = circuit.simulate().unwrap();
        let expect = [
            [1., 0., 0., 0.],
            [0., 1., 0., 0.],
            [0., 0., 0., 1.],
            [0., 0., 1., 0.],
        ];
        for r in 0..4 {
            for col in 0..4 {
                assert_eq!(u[(r, col)], c(expect[r][col], 0.0));
            }
        }
    }

    #[test]
    fn global_phase_applied_once() {
        let circuit = Circuit {
            n: 1,
            gates: vec![],
            global_phase: GlobalPhase::new(0.5),
        };
        let u = circuit.simulate().unwrap();
        assert!((u[(0, 0)] - Complex64::from_polar(1.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn invalid_gates_are_rejected() {
        let bad = [
            Gate::Cnot {
                control: 1,
                target: 1,
            },
            Gate::SingleQubit {
                target: 3,
                matrix: Mat2::IDENTITY,
            },
            Gate::ControlledU2 {
                spec: ControlSpec::uncontrolled(1),
                matrix: Mat2::X,
            },
        ];
        for g in bad {
            assert!(Circuit::new(2, vec![g], GlobalPhase::default()).is_err());
        }
    }

    #[test]
    fn empty_document() {
        let text = Circuit::empty(3).to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["n"], 3);
        assert_eq!(v["global_phase"], 0.0);
        assert_eq!(v["gates"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn negative_control_round_trips() {
        let gate = Gate::ControlledU2 {
            spec: ControlSpec::new(
                2,
                vec![
                    Control {
                        qubit: 1,
                        value: false,
                    },
                    Control {
                        qubit: 3,
                        value: true,
                    },
                ],
            ),
            matrix: Mat2::ry(0.123456789) * Mat2::rz(-2.5),
        };
        let circuit = Circuit::new(3, vec![gate], GlobalPhase::new(-0.1)).unwrap();
        let back = Circuit::from_json(&circuit.to_json()).unwrap();
        assert_eq!(back, circuit);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let err = Circuit::from_json(
            r#"{"n":2,"global_phase":0,"gates":[{"kind":"cnot","control":2,"target":5}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("gates[0]"), "{err}");

        let err = Circuit::from_json(r#"{"n":2,"global_phase":0,"gates":[{"kind":"swap"}]}"#)
            .unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");

        let err = Circuit::from_json(
            r#"{"n":2,"global_phase":0,"gates":[{"kind":"controlled_u2","target":1,
                "controls":[{"qubit":2,"value":7}],
                "matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("controls[0].value"), "{err}");
    }

    #[test]
    fn u3_angles_reconstruct() {
        let u = haar_random_unitary(1, 4).unwrap();
        let m = Mat2::new(u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
        assert!(U3Angles::of(&m).matrix().distance(&m) < 1e-14);
        for m in [
            Mat2::IDENTITY,
            Mat2::X,
            Mat2::rz(0.3),
            Mat2::X.scale(c(0.0, 1.0)),
        ] {
            assert!(U3Angles::of(&m).matrix().distance(&m) < 1e-14, "{m:?}");
        }
    }

    #[test]
    fn qasm_single_cnot() {
        let circuit = Circuit::new(
            2,
            vec![Gate::Cnot {
                control: 2,
                target: 1,
            }],
            GlobalPhase::default(),
        )
        .unwrap();
        let text = export_qasm(&circuit, QasmOptions::default()).unwrap();
        let ops: Vec<&str> = text
            .lines()
            .filter(|l| l.starts_with("cx") || l.starts_with("u3"))
            .collect();
        assert_eq!(ops, vec!["cx q[1],q[0];"]);
        assert!(text.contains("qreg q[2];"));
    }

    #[test]
    fn qasm_identity_flag() {
        let circuit = Circuit::new(
            1,
            vec![Gate::SingleQubit {
                target: 1,
                matrix: Mat2::IDENTITY,
            }],
            GlobalPhase::default(),
        )
        .unwrap();
        let dropped = export_qasm(&circuit, QasmOptions::default()).unwrap();
        assert!(!dropped.contains("u3"));
        let kept = export_qasm(
            &circuit,
            QasmOptions {
                emit_identities: true,
            },
        )
        .unwrap();
        assert!(kept.contains("u3(0,0,0) q[0];"));
    }

    #[test]
    fn qasm_rejects_controlled_gates() {
        let circuit = Circuit::new(
            2,
            vec![Gate::ControlledU2 {
                spec: ControlSpec::uncontrolled(1),
                matrix: Mat2::ry(1.0),
            }],
            GlobalPhase::default(),
        )
        .unwrap();
        assert!(matches!(
            export_qasm(&circuit, QasmOptions::default()),
            Err(Error::UnsupportedGate { index: 0, .. })
        ));
    }
}
