//! Expansion of controlled single-qubit gates into single-qubit gates and CNOTs.
//!
//! One control uses the `A X B X C` construction on the Euler angles of the
//! payload. More controls use the square-root recursion
//! `C^k(V) = C^{k-1}(S) . C^{k-1}X . C(S^dagger) . C^{k-1}X . C(S)` with
//! `S^2 = V`, where every factor is expanded again. The recursion is exact but
//! its CNOT count grows exponentially in `k`; [`CostModel::Linear`] describes
//! linear-size constructions analytically without emitting them.

use std::str::FromStr;

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::matrix::Mat2;

const SU2_TOL: f64 = 1e-10;

/// `V = Rz(alpha) Ry(theta) Rz(beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub alpha: f64,
    pub theta: f64,
    pub beta: f64,
}

impl EulerAngles {
    /// Euler angles of a special-unitary matrix, `theta` in `[0, pi]`.
    ///
    /// At `theta` in `{0, pi}` the split between `alpha` and `beta` is not
    /// unique; `beta` is then set to zero.
    pub fn of(v: &Mat2) -> Result<EulerAngles> {
        require_su2(v)?;
        let a = v.0[0][0];
        let c = v.0[1][0];
        let theta = 2.0 * c.norm().atan2(a.norm());
        let (alpha, beta) = if c.norm() <= 1e-14 {
            (-2.0 * a.arg(), 0.0)
        } else if a.norm() <= 1e-14 {
            (2.0 * c.arg(), 0.0)
        } else {
            let sum = -2.0 * a.arg();
            let diff = 2.0 * c.arg();
            ((sum + diff) / 2.0, (sum - diff) / 2.0)
        };
        Ok(EulerAngles { alpha, theta, beta })
    }

    pub fn matrix(&self) -> Mat2 {
        Mat2::rz(self.alpha) * Mat2::ry(self.theta) * Mat2::rz(self.beta)
    }
}

fn require_su2(v: &Mat2) -> Result<()> {
    if !v.is_special_unitary(SU2_TOL) {
        let det = v.det();
        return Err(Error::NotSpecialUnitary {
            det_re: det.re,
            det_im: det.im,
        });
    }
    Ok(())
}

/// Factors `V` into `(A, B, C)` with `A X B X C = V` and `A B C = I`.
pub fn abc_decompose(v: &Mat2) -> Result<(Mat2, Mat2, Mat2)> {
    let e = EulerAngles::of(v)?;
    let a = Mat2::rz(e.alpha) * Mat2::ry(e.theta / 2.0);
    let b = Mat2::ry(-e.theta / 2.0) * Mat2::rz(-(e.alpha + e.beta) / 2.0);
    let c = Mat2::rz((e.beta - e.alpha) / 2.0);
    Ok((a, b, c))
}

/// Principal square root of a special-unitary matrix.
///
/// Writing `V = cos(phi) I - i sin(phi) n.sigma` with `phi` in `[0, pi]`, the
/// root is `cos(phi/2) I - i sin(phi/2) n.sigma`. At `V = -I` the axis is `z`.
pub fn sqrt_su2(v: &Mat2) -> Mat2 {
    let [[a, b], _] = v.0;
    let cos_phi = v.trace().re / 2.0;
    let phi = cos_phi.clamp(-1.0, 1.0).acos();
    // sin(phi) * (nx, ny, nz)
    let axis = [-b.im, -b.re, -a.im];
    let len = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [nx, ny, nz] = if len > 0.0 && phi > 0.0 {
        axis.map(|x| x / len)
    } else {
        [0.0, 0.0, 1.0]
    };
    let (s, c) = (phi / 2.0).sin_cos();
    let i = Complex64::i();
    Mat2::new(
        c - i * s * nz,
        -i * s * Complex64::new(nx, -ny),
        -i * s * Complex64::new(nx, ny),
        c + i * s * nz,
    )
}

/// Square root of a general 2x2 unitary, `sqrt(e^{id} V) = e^{id/2} sqrt(V)`.
fn sqrt_u2(w: &Mat2) -> Mat2 {
    let delta = w.det().arg() / 2.0;
    let phase = Complex64::from_polar(1.0, delta);
    sqrt_su2(&w.scale(phase.conj())).scale(Complex64::from_polar(1.0, delta / 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Payload {
    /// Special unitary: the one-control form needs no phase correction.
    Special(Mat2),
    /// Arbitrary unitary: the one-control form adds a phase gate on the control.
    General(Mat2),
    /// Pauli X: one control is a plain CNOT.
    X,
}

impl Payload {
    fn matrix(&self) -> Mat2 {
        match *self {
            Payload::Special(m) | Payload::General(m) => m,
            Payload::X => Mat2::X,
        }
    }

    fn sqrt(&self) -> Payload {
        match *self {
            Payload::Special(m) => Payload::Special(sqrt_su2(&m)),
            Payload::General(m) => Payload::General(sqrt_u2(&m)),
            Payload::X => Payload::General(sqrt_u2(&Mat2::X)),
        }
    }

    fn adjoint(&self) -> Payload {
        match *self {
            Payload::Special(m) => Payload::Special(m.adjoint()),
            Payload::General(m) => Payload::General(m.adjoint()),
            Payload::X => Payload::X,
        }
    }
}

/// Expands one gate into single-qubit gates and CNOTs.
///
/// Elementary gates are returned unchanged. A negative control on qubit `q` is
/// turned positive by an X on `q` before and after the expansion.
pub fn expand_gate(gate: &Gate) -> Result<Vec<Gate>> {
    let (spec, matrix) = match gate {
        Gate::ControlledU2 { spec, matrix } => (spec, matrix),
        other => return Ok(vec![other.clone()]),
    };
    require_su2(matrix)?;
    let flips: Vec<Gate> = spec
        .controls
        .iter()
        .filter(|c| !c.value)
        .map(|c| Gate::SingleQubit {
            target: c.qubit,
            matrix: Mat2::X,
        })
        .collect();
    let controls: Vec<usize> = spec.controls.iter().map(|c| c.qubit).collect();

    let mut out = flips.clone();
    emit_controlled(&controls, spec.target, Payload::Special(*matrix), &mut out)?;
    out.extend(flips);
    Ok(out)
}

fn emit_controlled(
    controls: &[usize],
    target: usize,
    payload: Payload,
    out: &mut Vec<Gate>,
) -> Result<()> {
    match controls {
        [] => out.push(Gate::SingleQubit {
            target,
            matrix: payload.matrix(),
        }),
        [control] => match payload {
            Payload::X => out.push(Gate::Cnot {
                control: *control,
                target,
            }),
            Payload::Special(v) => emit_abc(*control, target, &v, out)?,
            Payload::General(w) => {
                let delta = w.det().arg() / 2.0;
                let v = w.scale(Complex64::from_polar(1.0, -delta));
                emit_abc(*control, target, &v, out)?;
                out.push(Gate::SingleQubit {
                    target: *control,
                    matrix: Mat2::new(
                        1.0.into(),
                        0.0.into(),
                        0.0.into(),
                        Complex64::from_polar(1.0, delta),
                    ),
                });
            }
        },
        [rest @ .., last] => {
            let root = payload.sqrt();
            emit_controlled(&[*last], target, root, out)?;
            emit_controlled(rest, *last, Payload::X, out)?;
            emit_controlled(&[*last], target, root.adjoint(), out)?;
            emit_controlled(rest, *last, Payload::X, out)?;
            emit_controlled(rest, target, root, out)?;
        }
    }
    Ok(())
}

fn emit_abc(control: usize, target: usize, v: &Mat2, out: &mut Vec<Gate>) -> Result<()> {
    let (a, b, c) = abc_decompose(v)?;
    out.extend([
        Gate::SingleQubit { target, matrix: c },
        Gate::Cnot { control, target },
        Gate::SingleQubit { target, matrix: b },
        Gate::Cnot { control, target },
        Gate::SingleQubit { target, matrix: a },
    ]);
    Ok(())
}

/// Expands every gate, preserving order and the global phase.
pub fn expand_circuit(circuit: &Circuit) -> Result<Circuit> {
    let mut gates = Vec::new();
    for g in &circuit.gates {
        gates.extend(expand_gate(g)?);
    }
    Circuit::new(circuit.n, gates, circuit.global_phase)
}

/// CNOT cost of a `k`-controlled special-unitary gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostModel {
    /// Whatever [`expand_gate`] produces for positive controls.
    Emitted,
    /// 0 for `k = 0`, 2 for `k = 1`, `a k + b` beyond.
    Linear { a: u64, b: u64 },
}

impl FromStr for CostModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "emitted" {
            return Ok(CostModel::Emitted);
        }
        let params = s
            .strip_prefix("linear:")
            .ok_or_else(|| format!("unknown cost model {s:?} (expected emitted or linear:a,b)"))?;
        let (a, b) = params
            .split_once(',')
            .ok_or_else(|| format!("linear model needs two coefficients, got {params:?}"))?;
        let parse = |x: &str| {
            x.trim()
                .parse::<u64>()
                .map_err(|e| format!("bad coefficient {x:?}: {e}"))
        };
        Ok(CostModel::Linear {
            a: parse(a)?,
            b: parse(b)?,
        })
    }
}

impl std::fmt::Display for CostModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CostModel::Emitted => f.write_str("emitted"),
            CostModel::Linear { a, b } => write!(f, "linear:{a},{b}"),
        }
    }
}

/// Per-`k` gate counts of the emitted recursion: `(cnot, single)` for a
/// special payload, a general payload and an X payload.
fn emitted_costs(k: usize) -> [(u64, u64); 3] {
    let mut special = (0u64, 1u64);
    let mut general = (0u64, 1u64);
    let mut x = (0u64, 1u64);
    for level in 1..=k {
        if level == 1 {
            (special, general, x) = ((2, 3), (2, 4), (1, 0));
        } else {
            // C(S) + 2 C^{k-1}X + C(S^dagger) + C^{k-1}(S); roots of X are general.
            special = (4 + 2 * x.0 + special.0, 6 + 2 * x.1 + special.1);
            general = (4 + 2 * x.0 + general.0, 8 + 2 * x.1 + general.1);
            x = general;
        }
    }
    [special, general, x]
}

pub fn cnot_cost(k: usize, model: CostModel) -> u64 {
    match (k, model) {
        (0, _) => 0,
        (1, _) => 2,
        (_, CostModel::Emitted) => emitted_costs(k)[0].0,
        (_, CostModel::Linear { a, b }) => a * k as u64 + b,
    }
}

/// Single-qubit gate count of a positively controlled special-unitary gate.
///
/// The linear model assumes one single-qubit layer between consecutive CNOTs.
pub fn single_qubit_cost(k: usize, model: CostModel) -> u64 {
    match model {
        CostModel::Emitted => emitted_costs(k)[0].1,
        CostModel::Linear { .. } => cnot_cost(k, model) + 1,
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::matrix::{haar_random_unitary, GlobalPhase};
    use crate::synth::{Control, ControlSpec};

    fn random_su2(seed: u64) -> Mat2 {
        let u = haar_random_unitary(1, seed).unwrap();
        let m = Mat2::new(u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
        m.scale(Complex64::from_polar(1.0, -m.det().arg() / 2.0))
    }

    fn controlled_gate(target: usize, controls: &[(usize, bool)], m: Mat2) -> Gate {
        Gate::ControlledU2 {
            spec: ControlSpec::new(
                target,
                controls
                    .iter()
                    .map(|&(qubit, value)| Control { qubit, value })
                    .collect(),
            ),
            matrix: m,
        }
    }

    fn equivalent(n: usize, gate: &Gate) -> f64 {
        let lhs = Circuit::new(n, vec![gate.clone()], GlobalPhase::default())
            .unwrap()
            .simulate()
            .unwrap();
        let rhs = Circuit::new(n, expand_gate(gate).unwrap(), GlobalPhase::default())
            .unwrap()
            .simulate()
            .unwrap();
        lhs.matrix().distance(rhs.matrix()).unwrap()
    }

    #[test]
    fn euler_round_trip() {
        for seed in 0..20 {
            let v = random_su2(seed);
            assert!(EulerAngles::of(&v).unwrap().matrix().distance(&v) < 1e-12);
        }
        for v in [
            Mat2::IDENTITY,
            Mat2::ry(PI),
            Mat2::rz(1.0),
            Mat2::IDENTITY.scale((-1.0).into()),
        ] {
            assert!(
                EulerAngles::of(&v).unwrap().matrix().distance(&v) < 1e-12,
                "{v:?}"
            );
        }
        assert!(EulerAngles::of(&Mat2::X).is_err());
    }

    #[test]
    fn abc_of_identity() {
        let (a, b, c) = abc_decompose(&Mat2::IDENTITY).unwrap();
        for m in [a, b, c] {
            assert!(m.is_identity(1e-15));
        }
    }

    #[test]
    fn abc_of_ry() {
        let (a, b, c) = abc_decompose(&Mat2::ry(0.8)).unwrap();
        assert!(a.distance(&Mat2::ry(0.4)) < 1e-15);
        assert!(b.distance(&Mat2::ry(-0.4)) < 1e-15);
        assert!(c.is_identity(1e-15));
    }

    #[test]
    fn abc_identities_hold() {
        for seed in 0..50 {
            let v = random_su2(seed);
            let (a, b, c) = abc_decompose(&v).unwrap();
            assert!((a * Mat2::X * b * Mat2::X * c).distance(&v) < 1e-10);
            assert!((a * b * c).is_identity(1e-10));
        }
    }

    #[test]
    fn sqrt_examples() {
        assert!(sqrt_su2(&Mat2::IDENTITY).is_identity(1e-15));
        assert!(sqrt_su2(&Mat2::rz(0.9)).distance(&Mat2::rz(0.45)) < 1e-15);
        let minus_one = Mat2::IDENTITY.scale((-1.0).into());
        let s = sqrt_su2(&minus_one);
        assert!(s.distance(&Mat2::rz(PI)) < 1e-15);
        assert!((s * s).distance(&minus_one) < 1e-15);
    }

    #[test]
    fn sqrt_is_principal_root() {
        for seed in 0..50 {
            let v = random_su2(seed);
            let s = sqrt_su2(&v);
            assert!((s * s).distance(&v) < 1e-10);
            assert!((s.det() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            assert!(s.trace().re >= 0.0);
        }
    }

    #[test]
    fn uncontrolled_gate_expands_to_itself() {
        let v = random_su2(3);
        let out = expand_gate(&controlled_gate(1, &[], v)).unwrap();
        assert_eq!(
            out,
            vec![Gate::SingleQubit {
                target: 1,
                matrix: v
            }]
        );
    }

    #[test]
    fn one_control_uses_two_cnots() {
        let g = controlled_gate(1, &[(2, true)], random_su2(5));
        let out = expand_gate(&g).unwrap();
        let cnots = out
            .iter()
            .filter(|g| matches!(g, Gate::Cnot { .. }))
            .count();
        assert_eq!((cnots, out.len() - cnots), (2, 3));
        assert!(equivalent(2, &g) < 1e-10);
    }

    #[test]
    fn two_controls_use_eight_cnots() {
        let g = controlled_gate(2, &[(1, true), (3, true)], random_su2(6));
        let out = expand_gate(&g).unwrap();
        assert_eq!(
            out.iter()
                .filter(|g| matches!(g, Gate::Cnot { .. }))
                .count(),
            8
        );
        assert!(equivalent(3, &g) < 1e-9);
    }

    #[test]
    fn expansions_match_for_random_polarities() {
        let mut seed = 100;
        for k in 0..=4usize {
            for pattern in 0..(1usize << k) {
                seed += 1;
                let controls: Vec<(usize, bool)> =
                    (0..k).map(|c| (c + 2, pattern >> c & 1 == 1)).collect();
                let g = controlled_gate(1, &controls, random_su2(seed));
                let d = equivalent(k + 1, &g);
                assert!(d < 1e-9, "k={k} pattern={pattern:b}: {d}");
            }
        }
    }

    #[test]
    fn negative_controls_add_two_x_gates_each() {
        let v = random_su2(9);
        let positive = expand_gate(&controlled_gate(3, &[(1, true), (2, true)], v)).unwrap();
        let negative = expand_gate(&controlled_gate(3, &[(1, false), (2, false)], v)).unwrap();
        assert_eq!(negative.len(), positive.len() + 4);
        assert_eq!(&negative[2..negative.len() - 2], positive.as_slice());
    }

    #[test]
    fn emitted_cost_matches_expansion() {
        let v = random_su2(12);
        for k in 0..=6usize {
            let controls: Vec<(usize, bool)> = (0..k).map(|c| (c + 2, true)).collect();
            let out = expand_gate(&controlled_gate(1, &controls, v)).unwrap();
            let cnots = out
                .iter()
                .filter(|g| matches!(g, Gate::Cnot { .. }))
                .count() as u64;
            assert_eq!(cnot_cost(k, CostModel::Emitted), cnots, "k={k}");
            assert_eq!(
                single_qubit_cost(k, CostModel::Emitted),
                out.len() as u64 - cnots,
                "k={k}"
            );
        }
    }

    #[test]
    fn linear_cost_model() {
        assert!("linear:16,-1".parse::<CostModel>().is_err());
        let m = CostModel::Linear { a: 16, b: 0 };
        assert_eq!(cnot_cost(0, m), 0);
        assert_eq!(cnot_cost(1, m), 2);
        let m: CostModel = "linear:6,4".parse().unwrap();
        assert_eq!(m, CostModel::Linear { a: 6, b: 4 });
        assert_eq!(cnot_cost(3, m), 22);
        assert_eq!(m.to_string(), "linear:6,4");
        assert!("quadratic".parse::<CostModel>().is_err());
    }

    #[test]
    fn non_special_payload_is_rejected() {
        assert!(expand_gate(&controlled_gate(1, &[(2, true)], Mat2::X)).is_err());
    }
}
