//! Gray-ordered Givens diagonalization with reduced control sets.
//!
//! The input unitary is first scaled to unit determinant. Columns are then
//! cleared in Gray order (positions `1..N-1`), each from the bottom row up,
//! with a rotation between Gray-adjacent rows `j` and `j - 1`. Because the two
//! rows differ in exactly one bit, every rotation is a single-qubit gate on
//! that bit, controlled by (at most) all other qubits. Most of those controls
//! are unnecessary; [`minimal_controls`] gives the reduced set and
//! [`safety_check`] confirms structurally that dropping the rest never mixes
//! an already-zero entry with a live one.

use std::collections::BTreeSet;

use crate::analytics::GateCountProfile;
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::graycode::{changed_bit_unchecked, gray, BasisMap};
use crate::matrix::{
    apply_controlled_u2_unchecked, givens_of, phase_normalize, pivot_phase_rotation, ComplexMatrix,
    GlobalPhase, Mat2, UnitaryMatrix,
};

/// A single control condition: `qubit` must hold `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Control {
    pub qubit: usize,
    pub value: bool,
}

/// Target qubit plus the (polarized) control set of a controlled gate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ControlSpec {
    pub target: usize,
    pub controls: Vec<Control>,
}

impl ControlSpec {
    /// Builds a spec with controls sorted by qubit.
    pub fn new(target: usize, mut controls: Vec<Control>) -> Self {
        controls.sort();
        Self { target, controls }
    }

    pub fn uncontrolled(target: usize) -> Self {
        Self::new(target, Vec::new())
    }

    pub fn len(&self) -> usize {
        self.controls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.controls.is_empty()
    }

    pub fn controls_qubit(&self, qubit: usize) -> bool {
        self.controls.iter().any(|c| c.qubit == qubit)
    }

    /// Bit mask of the control qubits and the required values under that mask.
    pub fn masks(&self) -> (usize, usize) {
        self.controls.iter().fold((0, 0), |(mask, value), c| {
            let bit = 1 << (c.qubit - 1);
            (mask | bit, if c.value { value | bit } else { value })
        })
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.target == 0 || self.target > n {
            return Err(Error::InvalidGate(format!(
                "target qubit {} outside 1..={n}",
                self.target
            )));
        }
        let mut seen = BTreeSet::new();
        for c in &self.controls {
            if c.qubit == 0 || c.qubit > n {
                return Err(Error::InvalidGate(format!(
                    "control qubit {} outside 1..={n}",
                    c.qubit
                )));
            }
            if c.qubit == self.target {
                return Err(Error::InvalidGate(format!(
                    "qubit {} is both target and control",
                    c.qubit
                )));
            }
            if !seen.insert(c.qubit) {
                return Err(Error::InvalidGate(format!(
                    "qubit {} is controlled twice",
                    c.qubit
                )));
            }
        }
        Ok(())
    }
}

/// One scheduled rotation realized as a controlled single-qubit gate.
///
/// `gamma` is expressed in the target qubit's `|0>, |1>` basis and is special
/// unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlledRotationGate {
    pub n: usize,
    pub controls: ControlSpec,
    pub gamma: Mat2,
    /// Gray position of the column being cleared.
    pub column: usize,
    /// Gray position of the row being zeroed.
    pub row: usize,
    pub identity: bool,
}

impl ControlledRotationGate {
    pub fn control_count(&self) -> usize {
        self.controls.len()
    }

    /// Number of controls dropped relative to the fully controlled gate.
    pub fn removed(&self) -> usize {
        self.n - 1 - self.control_count()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            gamma: self.gamma.adjoint(),
            ..self.clone()
        }
    }
}

/// The rotation order: columns `i = 1..N-1` ascending, rows `j = N..i+1` descending.
pub fn schedule(n: usize) -> Vec<(usize, usize)> {
    let dim = 1usize << n;
    (1..dim)
        .flat_map(|i| (i + 1..=dim).rev().map(move |j| (i, j)))
        .collect()
}

/// Reduced control set for the rotation zeroing position `(j, i)`.
///
/// Within the current `2^L` block (initially the whole register):
/// - bottom-left quarter: control the qubits below the changed bit `m` at the
///   values they take in `code(j)`, plus the block's top qubit when the column
///   has reached the first completed row that a bit-`m` pair could touch
///   (`i - 1 >= 2^(m-1)`);
/// - top-left block: recurse into the first half with no extra control;
/// - bottom-right block: control the block's top qubit and recurse into the
///   second half, whose local code sequence is the reflected one.
pub fn minimal_controls(n: usize, i: usize, j: usize) -> Result<ControlSpec> {
    check_pair(n, i, j)?;
    Ok(minimal_controls_unchecked(n, i, j))
}

pub(crate) fn minimal_controls_unchecked(n: usize, i: usize, j: usize) -> ControlSpec {
    let code_j = gray(j - 1);
    let m = changed_bit_unchecked(j);
    let bit_of = |q: usize| code_j >> (q - 1) & 1 == 1;
    let mut controls = Vec::new();

    let (mut level, mut li, mut lj) = (n, i, j);
    while level > 1 {
        let half = 1usize << (level - 1);
        if lj > half && li <= half {
            controls.extend((1..m).map(|q| Control {
                qubit: q,
                value: bit_of(q),
            }));
            if li > 1 << (m - 1) {
                controls.push(Control {
                    qubit: level,
                    value: bit_of(level),
                });
            }
            break;
        } else if lj <= half {
            level -= 1;
        } else {
            controls.push(Control {
                qubit: level,
                value: bit_of(level),
            });
            li -= half;
            lj -= half;
            level -= 1;
        }
    }
    ControlSpec::new(m, controls)
}

/// Every qubit except the changed bit, at its value in `code(j)`.
pub fn full_controls(n: usize, j: usize) -> ControlSpec {
    let code_j = gray(j - 1);
    let m = changed_bit_unchecked(j);
    ControlSpec::new(
        m,
        (1..=n)
            .filter(|&q| q != m)
            .map(|q| Control {
                qubit: q,
                value: code_j >> (q - 1) & 1 == 1,
            })
            .collect(),
    )
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    if n == 0 || n > crate::graycode::MAX_GRAY_BITS {
        return Err(Error::OutOfRange {
            what: "qubit count",
            value: n,
            min: 1,
            max: crate::graycode::MAX_GRAY_BITS,
        });
    }
    let dim = 1usize << n;
    if i == 0 || i >= dim {
        return Err(Error::OutOfRange {
            what: "column position",
            value: i,
            min: 1,
            max: dim - 1,
        });
    }
    if j <= i || j > dim {
        return Err(Error::OutOfRange {
            what: "row position",
            value: j,
            min: i + 1,
            max: dim,
        });
    }
    Ok(())
}

/// Entries that are zero and must stay zero, indexed by binary-basis row and column.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroPattern {
    map: BasisMap,
    mask: Vec<bool>,
}

impl ZeroPattern {
    pub fn new(n: usize) -> Result<Self> {
        let map = BasisMap::new(n)?;
        let dim = 1usize << n;
        Ok(Self {
            map,
            mask: vec![false; dim * dim],
        })
    }

    pub fn qubits(&self) -> usize {
        self.map.bits()
    }

    fn dim(&self) -> usize {
        1 << self.map.bits()
    }

    pub fn basis_map(&self) -> &BasisMap {
        &self.map
    }

    /// Zero-based row and column.
    pub fn is_masked(&self, row: usize, col: usize) -> bool {
        self.mask[row * self.dim() + col]
    }

    pub fn mask_row(&self, row: usize) -> &[bool] {
        let dim = self.dim();
        &self.mask[row * dim..(row + 1) * dim]
    }

    /// Marks a single annihilated entry, by Gray positions.
    pub fn mark_position(&mut self, row: usize, col: usize) {
        let (r, c) = (self.map.row(row), self.map.row(col));
        let dim = self.dim();
        self.mask[r * dim + c] = true;
    }

    /// Records that the column at Gray position `col` is finished: its pivot
    /// row is forced to zero everywhere off the diagonal.
    pub fn complete_column(&mut self, col: usize) {
        let r = self.map.row(col);
        let dim = self.dim();
        for c in 0..dim {
            if c != r {
                self.mask[r * dim + c] = true;
            }
        }
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

/// A row pair that a gate would mix although exactly one of them is masked in `column`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    /// Gray positions of the mixed rows, ascending.
    pub positions: (usize, usize),
    /// Zero-based binary-basis rows, in the same order as `positions`.
    pub rows: (usize, usize),
    /// Gray position of the offending column.
    pub column: usize,
}

/// Checks that `spec` only mixes rows whose zero masks agree in every column.
pub fn safety_check(
    zero: &ZeroPattern,
    spec: &ControlSpec,
) -> std::result::Result<(), Vec<Violation>> {
    let map = zero.basis_map();
    let target_bit = 1usize << (spec.target - 1);
    let (mask, value) = spec.masks();
    let mut violations = Vec::new();
    for r0 in 0..zero.dim() {
        if r0 & target_bit != 0 || r0 & mask != value {
            continue;
        }
        let r1 = r0 | target_bit;
        let (m0, m1) = (zero.mask_row(r0), zero.mask_row(r1));
        if m0 == m1 {
            continue;
        }
        let (p0, p1) = (map.position(r0 + 1), map.position(r1 + 1));
        let (positions, rows) = if p0 < p1 {
            ((p0, p1), (r0, r1))
        } else {
            ((p1, p0), (r1, r0))
        };
        for c in (0..zero.dim()).filter(|&c| m0[c] != m1[c]) {
            violations.push(Violation {
                positions,
                rows,
                column: map.position(c + 1),
            });
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        violations.sort_by_key(|v| (v.column, v.positions));
        Err(violations)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecomposeOptions {
    /// Drop superfluous controls; otherwise every gate is fully controlled.
    pub minimize: bool,
    /// Residual tolerance per basis state; the accepted bound is `tol * 2^n`.
    pub tolerance: f64,
    /// Track the largest magnitude ever written into a masked entry.
    pub audit: bool,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            minimize: true,
            tolerance: 1e-9,
            audit: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DecompositionResult {
    /// Gates reproducing the input (up to `global_phase`), first applied first.
    pub circuit: Circuit,
    /// Control-count histogram of the emitted gates.
    pub profile: GateCountProfile,
    pub global_phase: GlobalPhase,
    /// Controls re-added after a failed safety check.
    pub escalations: usize,
    /// `||G_M ... G_1 U' - I||_F` after diagonalization.
    pub residual: f64,
    /// Scheduled rotations that degenerated to the identity and were not emitted.
    pub identity_rotations: usize,
    /// The diagonalizing gates in application order, including identities.
    pub rotations: Vec<ControlledRotationGate>,
    /// Largest magnitude observed in a masked entry (only with `audit`).
    pub max_masked_leak: f64,
}

/// Decomposes `u` into controlled single-qubit gates.
///
/// The returned circuit lists the adjoints of the diagonalizing gates in
/// reverse order, so simulating it and multiplying by `global_phase` gives `u`.
pub fn decompose(u: &UnitaryMatrix, options: &DecomposeOptions) -> Result<DecompositionResult> {
    let n = u.qubits();
    let (normalized, global_phase) = phase_normalize(u);
    let mut a = normalized.into_inner();
    let mut zero = ZeroPattern::new(n)?;
    let map = zero.basis_map().clone();

    let mut rotations = Vec::with_capacity((1 << (n - 1)) * ((1 << n) - 1));
    let mut escalations = 0;
    let mut identity_rotations = 0;
    let mut max_masked_leak = 0.0f64;

    for (i, j) in schedule(n) {
        let (col, row, pivot) = (map.row(i), map.row(j), map.row(j - 1));
        let mut rot = givens_of(&a, col, row, pivot)?;
        if rot.identity && j == i + 1 {
            rot = pivot_phase_rotation(&a, col, row, pivot);
        }
        let m = changed_bit_unchecked(j);
        let pivot_bit_set = gray(j - 2) >> (m - 1) & 1 == 1;
        let gamma = if pivot_bit_set {
            rot.gamma.swapped()
        } else {
            rot.gamma
        };

        let mut spec = if options.minimize {
            minimal_controls_unchecked(n, i, j)
        } else {
            full_controls(n, j)
        };
        while safety_check(&zero, &spec).is_err() {
            escalate(&mut spec, n, j);
            escalations += 1;
        }

        let gate = ControlledRotationGate {
            n,
            controls: spec,
            gamma,
            column: i,
            row: j,
            identity: rot.identity,
        };
        if gate.identity {
            identity_rotations += 1;
        } else {
            apply_controlled_u2_unchecked(&mut a, &gate.controls, &gate.gamma);
        }
        zero.mark_position(j, i);
        if j == i + 1 {
            zero.complete_column(i);
        }
        if options.audit {
            max_masked_leak = max_masked_leak.max(masked_leak(&a, &zero, &gate.controls));
        }
        rotations.push(gate);
    }

    let residual = a.distance_from_identity();
    let tolerance = options.tolerance * (1u64 << n) as f64;
    if residual.is_nan() || residual > tolerance {
        return Err(Error::Residual {
            residual,
            tolerance,
        });
    }

    let gates: Vec<Gate> = rotations
        .iter()
        .rev()
        .filter(|g| !g.identity)
        .map(|g| Gate::ControlledU2 {
            spec: g.controls.clone(),
            matrix: g.gamma.adjoint(),
        })
        .collect();
    let profile = GateCountProfile::from_control_counts(
        n,
        rotations
            .iter()
            .filter(|g| !g.identity)
            .map(|g| g.control_count()),
    );
    Ok(DecompositionResult {
        circuit: Circuit::new(n, gates, global_phase)?,
        profile,
        global_phase,
        escalations,
        residual,
        identity_rotations,
        rotations,
        max_masked_leak,
    })
}

/// Re-adds the highest-numbered dropped control at its value in `code(j)`.
fn escalate(spec: &mut ControlSpec, n: usize, j: usize) {
    let code_j = gray(j - 1);
    let qubit = (1..=n)
        .rev()
        .find(|&q| q != spec.target && !spec.controls_qubit(q))
        .expect("a fully controlled two-level rotation is always safe");
    spec.controls.push(Control {
        qubit,
        value: code_j >> (qubit - 1) & 1 == 1,
    });
    spec.controls.sort();
}

/// Largest entry in a masked position among the rows `spec` could have touched.
fn masked_leak(a: &ComplexMatrix, zero: &ZeroPattern, spec: &ControlSpec) -> f64 {
    let (mask, value) = spec.masks();
    let mut worst = 0.0f64;
    for r in 0..a.dim() {
        if r & mask != value {
            continue;
        }
        for (c, &masked) in zero.mask_row(r).iter().enumerate() {
            if masked {
                worst = worst.max(a[(r, c)].norm());
            }
        }
    }
    worst
}

/// Control counts assigned to every scheduled rotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlCountTable {
    pub n: usize,
    /// `(i, j, k)` in schedule order.
    pub entries: Vec<(usize, usize, usize)>,
}

impl ControlCountTable {
    pub fn get(&self, i: usize, j: usize) -> Option<usize> {
        self.entries
            .iter()
            .find(|&&(ei, ej, _)| ei == i && ej == j)
            .map(|&(_, _, k)| k)
    }

    pub fn distribution(&self) -> GateCountProfile {
        GateCountProfile::from_control_counts(self.n, self.entries.iter().map(|&(_, _, k)| k))
    }

    /// Lower-triangular grid in Gray positions, `.` on and above the diagonal.
    pub fn render(&self) -> String {
        let dim = 1usize << self.n;
        let mut grid = vec![vec![".".to_string(); dim]; dim];
        for &(i, j, k) in &self.entries {
            grid[j - 1][i - 1] = k.to_string();
        }
        let width = (self.n.saturating_sub(1)).to_string().len() + 1;
        grid.iter()
            .map(|row| {
                row.iter()
                    .map(|cell| format!("{cell:>width$}"))
                    .collect::<String>()
            })
            .collect::<Vec<_>>()
            .join("\n")
            + "\n"
    }
}

pub fn control_count_table(n: usize) -> Result<ControlCountTable> {
    check_pair(n, 1, 2)?;
    let entries = schedule(n)
        .into_iter()
        .map(|(i, j)| (i, j, minimal_controls_unchecked(n, i, j).len()))
        .collect();
    Ok(ControlCountTable { n, entries })
}

/// Control-count histogram of the reduced schedule without materializing it.
pub fn control_count_distribution(n: usize) -> Result<GateCountProfile> {
    check_pair(n, 1, 2)?;
    let dim = 1usize << n;
    let counts = (1..dim)
        .flat_map(|i| (i + 1..=dim).map(move |j| minimal_controls_unchecked(n, i, j).len()));
    Ok(GateCountProfile::from_control_counts(n, counts))
}
