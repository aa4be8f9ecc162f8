//! Dense complex linear algebra for the synthesis pipeline.
//!
//! Matrices are stored row-major and indexed from zero; row `r` corresponds to
//! the computational basis state whose binary value is `r`, with qubit 1 as the
//! least significant bit. Gates act on a matrix by left multiplication, which
//! only ever touches rows.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::ops::{Index, IndexMut, Mul};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::synth::{ControlSpec, ControlledRotationGate};

/// Largest register for which dense `2^n x 2^n` matrices are materialized.
pub const MAX_QUBITS: usize = 10;

/// Tolerance on `||U^dagger U - I||_F` accepted by constructors and loaders.
pub const UNITARITY_TOL: f64 = 1e-8;

/// Absolute magnitude below which an element counts as already zero.
pub const TAU_ZERO: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A 2x2 complex matrix, `m[row][col]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);
    pub const X: Mat2 = Mat2([[ZERO, ONE], [ONE, ZERO]]);

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    /// `Rz(a) = diag(e^{-ia/2}, e^{ia/2})`.
    pub fn rz(angle: f64) -> Self {
        Mat2([
            [Complex64::from_polar(1.0, -angle / 2.0), ZERO],
            [ZERO, Complex64::from_polar(1.0, angle / 2.0)],
        ])
    }

    /// `Ry(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]`.
    pub fn ry(angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        Mat2([
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ])
    }

    pub fn scale(&self, z: Complex64) -> Self {
        let m = self.0;
        Mat2([[m[0][0] * z, m[0][1] * z], [m[1][0] * z, m[1][1] * z]])
    }

    pub fn adjoint(&self) -> Self {
        let m = self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn det(&self) -> Complex64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &Mat2) -> f64 {
        let mut acc = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                acc += (self.0[r][c] - other.0[r][c]).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `||M^dagger M - I||_F`.
    pub fn unitarity_error(&self) -> f64 {
        (self.adjoint() * *self).distance(&Mat2::IDENTITY)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    pub fn is_special_unitary(&self, tol: f64) -> bool {
        self.is_unitary(tol) && (self.det() - ONE).norm() <= tol
    }

    /// Conjugation by Pauli X, i.e. the same operator with its basis states swapped.
    pub fn swapped(&self) -> Self {
        let m = self.0;
        Mat2([[m[1][1], m[1][0]], [m[0][1], m[0][0]]])
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.distance(&Mat2::IDENTITY) <= tol
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (self.0, rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Mat2(out)
    }
}

/// A dense square complex matrix of dimension `2^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        check_capacity(n)?;
        let dim = 1 << n;
        Ok(Self {
            n,
            data: vec![ZERO; dim * dim],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for r in 0..m.dim() {
            m[(r, r)] = ONE;
        }
        Ok(m)
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be `4^n`.
    pub fn from_row_major(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        check_capacity(n)?;
        let dim = 1usize << n;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: entries.len(),
                right: dim * dim,
            });
        }
        Ok(Self { n, data: entries })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        let dim = self.dim();
        &self.data[r * dim..(r + 1) * dim]
    }

    /// Mutable access to two distinct rows at once.
    pub fn row_pair_mut(&mut self, a: usize, b: usize) -> (&mut [Complex64], &mut [Complex64]) {
        assert_ne!(a, b, "row pair must be distinct");
        let dim = self.dim();
        if a < b {
            let (lo, hi) = self.data.split_at_mut(b * dim);
            (&mut lo[a * dim..(a + 1) * dim], &mut hi[..dim])
        } else {
            let (lo, hi) = self.data.split_at_mut(a * dim);
            (&mut hi[..dim], &mut lo[b * dim..(b + 1) * dim])
        }
    }

    /// Mixes rows `(r0, r1)` as `[r0; r1] <- u * [r0; r1]`.
    pub fn mix_rows(&mut self, r0: usize, r1: usize, u: &Mat2) {
        let [[a, b], [c, d]] = u.0;
        let (x, y) = self.row_pair_mut(r0, r1);
        for (p, q) in x.iter_mut().zip(y.iter_mut()) {
            let (s, t) = (*p, *q);
            *p = a * s + b * t;
            *q = c * s + d * t;
        }
    }

    pub fn adjoint(&self) -> Self {
        let dim = self.dim();
        let mut out = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                out[c * dim + r] = self.data[r * dim + c].conj();
            }
        }
        Self {
            n: self.n,
            data: out,
        }
    }

    pub fn scale(&mut self, z: Complex64) {
        for v in &mut self.data {
            *v *= z;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `||self - other||_F`.
    pub fn distance(&self, other: &ComplexMatrix) -> Result<f64> {
        self.check_same_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// `||self - I||_F`.
    pub fn distance_from_identity(&self) -> f64 {
        let dim = self.dim();
        let mut acc = 0.0;
        for r in 0..dim {
            for c in 0..dim {
                let target = if r == c { ONE } else { ZERO };
                acc += (self[(r, c)] - target).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_dim(rhs)?;
        let dim = self.dim();
        let mut out = vec![ZERO; dim * dim];
        for r in 0..dim {
            let out_row = &mut out[r * dim..(r + 1) * dim];
            for (k, a) in self.row(r).iter().enumerate() {
                if *a == ZERO {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(Self {
            n: self.n,
            data: out,
        })
    }

    /// `||M^dagger M - I||_F`.
    pub fn unitarity_error(&self) -> f64 {
        let dim = self.dim();
        let mut acc = 0.0;
        for a in 0..dim {
            for b in a..dim {
                let mut dot = ZERO;
                for r in 0..dim {
                    dot += self[(r, a)].conj() * self[(r, b)];
                }
                let target = if a == b { ONE } else { ZERO };
                let d = (dot - target).norm_sqr();
                acc += if a == b { d } else { 2.0 * d };
            }
        }
        acc.sqrt()
    }

    pub fn determinant(&self) -> Complex64 {
        let dim = self.dim();
        DMatrix::from_row_slice(dim, dim, &self.data).determinant()
    }

    fn check_same_dim(&self, other: &ComplexMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim() + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        let dim = self.dim();
        &mut self.data[r * dim + c]
    }
}

fn check_capacity(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange {
            what: "qubit count",
            value: 0,
            min: 1,
            max: MAX_QUBITS,
        });
    }
    if n > MAX_QUBITS {
        return Err(Error::Capacity { n, max: MAX_QUBITS });
    }
    Ok(())
}

/// A `2^n x 2^n` matrix known to be unitary to within [`UNITARITY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let deviation = m.unitarity_error();
        if deviation.is_nan() || deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self(m))
    }

    pub fn from_row_major(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        Self::new(ComplexMatrix::from_row_major(n, entries)?)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Ok(Self(ComplexMatrix::identity(n)?))
    }

    /// Wraps a matrix produced by a chain of exactly unitary operations.
    pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn qubits(&self) -> usize {
        self.0.qubits()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Multiplies by the scalar phase `e^{i angle}`.
    pub fn with_phase(&self, angle: f64) -> Self {
        let mut m = self.0.clone();
        m.scale(Complex64::from_polar(1.0, angle));
        Self(m)
    }

    pub fn matmul(&self, rhs: &UnitaryMatrix) -> Result<UnitaryMatrix> {
        Ok(Self(self.0.matmul(&rhs.0)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        parse_matrix(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, format_matrix(self))?;
        Ok(())
    }
}

impl Index<(usize, usize)> for UnitaryMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

/// A scalar phase `e^{i angle}`, kept in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GlobalPhase {
    angle: f64,
}

impl GlobalPhase {
    pub fn new(angle: f64) -> Self {
        Self {
            angle: wrap_angle(angle),
        }
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn factor(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(angle: f64) -> f64 {
    if angle > -PI && angle <= PI {
        return angle;
    }
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Scales `u` by `e^{-i arg(det u) / N}` so the result has determinant one.
///
/// Returns the normalized matrix and the removed phase `arg(det u) / N`, so
/// that `u = e^{i angle} * normalized`.
pub fn phase_normalize(u: &UnitaryMatrix) -> (UnitaryMatrix, GlobalPhase) {
    let det = u.matrix().determinant();
    let angle = wrap_angle(det.arg()) / u.dim() as f64;
    let phase = GlobalPhase::new(angle);
    (u.with_phase(-phase.angle()), phase)
}

/// A two-level rotation that zeroes `a[row][column]` against `a[pivot_row][column]`.
///
/// `gamma` is written in `(pivot_row, row)` order: applying it maps
/// `[pivot; row] <- gamma * [pivot; row]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GivensRotation {
    pub column: usize,
    pub row: usize,
    pub pivot_row: usize,
    pub gamma: Mat2,
    /// Set when the target element was already below [`TAU_ZERO`].
    pub identity: bool,
}

impl GivensRotation {
    /// Applies the two-level rotation in place.
    pub fn apply(&self, a: &mut ComplexMatrix) {
        a.mix_rows(self.pivot_row, self.row, &self.gamma);
    }
}

/// Builds the rotation that nullifies `a[row][column]` using `a[pivot_row][column]`.
///
/// Indices are zero-based. When the element to be nullified is already below
/// [`TAU_ZERO`] the rotation is the identity and `identity` is set.
pub fn givens_of(
    a: &ComplexMatrix,
    column: usize,
    row: usize,
    pivot_row: usize,
) -> Result<GivensRotation> {
    let dim = a.dim();
    for (what, value) in [("column", column), ("row", row), ("pivot row", pivot_row)] {
        if value >= dim {
            return Err(Error::OutOfRange {
                what,
                value,
                min: 0,
                max: dim - 1,
            });
        }
    }
    if row == pivot_row {
        return Err(Error::InvalidGate(format!(
            "givens rotation needs two distinct rows, got {row} twice"
        )));
    }
    let target = a[(row, column)];
    let pivot = a[(pivot_row, column)];
    if target.norm() <= TAU_ZERO {
        return Ok(GivensRotation {
            column,
            row,
            pivot_row,
            gamma: Mat2::IDENTITY,
            identity: true,
        });
    }
    let norm = target.norm().hypot(pivot.norm());
    let gamma = Mat2::new(pivot.conj(), target.conj(), -target, pivot).scale((1.0 / norm).into());
    Ok(GivensRotation {
        column,
        row,
        pivot_row,
        gamma,
        identity: false,
    })
}

/// The diagonal rotation `diag(p*, p) / |p|` that makes `a[pivot_row][column]`
/// real and positive. This is the rotation formula evaluated with a zero
/// target element; it is used when the final rotation of a column degenerates.
pub fn pivot_phase_rotation(
    a: &ComplexMatrix,
    column: usize,
    row: usize,
    pivot_row: usize,
) -> GivensRotation {
    let pivot = a[(pivot_row, column)];
    let gamma = if pivot.norm() <= TAU_ZERO {
        Mat2::IDENTITY
    } else {
        let p = pivot / pivot.norm();
        Mat2::new(p.conj(), ZERO, ZERO, p)
    };
    GivensRotation {
        column,
        row,
        pivot_row,
        gamma,
        identity: gamma == Mat2::IDENTITY,
    }
}

/// Applies a single-qubit operator `u` on `spec.target`, conditioned on every
/// control in `spec`, to the rows of `a` (left multiplication).
///
/// For each basis state `r` with the target bit clear and all control
/// conditions met, the row pair `(r, r | target_bit)` is mixed by `u` with row
/// `r` playing the role of `|0>`.
pub fn apply_controlled_u2(a: &mut ComplexMatrix, spec: &ControlSpec, u: &Mat2) -> Result<()> {
    spec.validate(a.qubits())?;
    apply_controlled_u2_unchecked(a, spec, u);
    Ok(())
}

/// Returns `gate * a`, where `gate` acts with its rotation on every row pair
/// satisfying its remaining control conditions.
pub fn apply_controlled_rotation(
    a: &ComplexMatrix,
    gate: &ControlledRotationGate,
) -> Result<ComplexMatrix> {
    if gate.n != a.qubits() {
        return Err(Error::DimensionMismatch {
            left: 1 << gate.n,
            right: a.dim(),
        });
    }
    let mut out = a.clone();
    apply_controlled_u2(&mut out, &gate.controls, &gate.gamma)?;
    Ok(out)
}

pub(crate) fn apply_controlled_u2_unchecked(a: &mut ComplexMatrix, spec: &ControlSpec, u: &Mat2) {
    let target_bit = 1usize << (spec.target - 1);
    let (mask, value) = spec.masks();
    for r in 0..a.dim() {
        if r & target_bit == 0 && r & mask == value {
            a.mix_rows(r, r | target_bit, u);
        }
    }
}

/// `min over phi of ||a - e^{i phi} b||_F`.
///
/// Equal to `sqrt(2N - 2|tr(a^dagger b)|)` for unitaries; evaluated at the
/// optimal phase so that the result does not lose half its digits to the
/// square root of a cancellation.
pub fn distance_up_to_phase(a: &UnitaryMatrix, b: &UnitaryMatrix) -> Result<f64> {
    let (a, b) = (a.matrix(), b.matrix());
    a.check_same_dim(b)?;
    let overlap: Complex64 = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| y.conj() * x)
        .sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - phase * y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Samples a Haar-distributed unitary on `n` qubits.
///
/// Entries of a `2^n x 2^n` matrix are drawn row-major from a ChaCha8 stream
/// seeded with `seed`, real part first, each `N(0, 1/2)`. The matrix is QR
/// factorized and `Q` is multiplied by the phases of `diag(R)` so that the
/// triangular factor has a positive real diagonal.
pub fn haar_random_unitary(n: usize, seed: u64) -> Result<UnitaryMatrix> {
    check_capacity(n)?;
    let dim = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let entries: Vec<Complex64> = (0..dim * dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re * scale, im * scale)
        })
        .collect();
    let g = DMatrix::from_row_slice(dim, dim, &entries);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..dim {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for v in q.column_mut(c).iter_mut() {
            *v *= phase;
        }
    }
    let mut data = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        for c in 0..dim {
            data.push(q[(r, c)]);
        }
    }
    UnitaryMatrix::from_row_major(n, data)
}

/// Renders a matrix in the line-oriented text format read by [`parse_matrix`].
pub fn format_matrix(u: &UnitaryMatrix) -> String {
    let m = u.matrix();
    let mut out = format!("n {}\n", m.qubits());
    for r in 0..m.dim() {
        let row: Vec<String> = m
            .row(r)
            .iter()
            .map(|z| format!("{:.16e},{:.16e}", z.re, z.im))
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Parses the matrix text format: a `n <qubits>` header, then `2^n` rows of
/// `2^n` whitespace-separated `re,im` entries. Lines starting with `#` and
/// blank lines are ignored. The result must be unitary.
pub fn parse_matrix(text: &str) -> Result<UnitaryMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing `n <qubits>` header".into(),
    })?;
    let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["n", value] => value.parse::<usize>().map_err(|e| Error::Parse {
            line: header_line,
            message: format!("bad qubit count {value:?}: {e}"),
        })?,
        _ => {
            return Err(Error::Parse {
                line: header_line,
                message: format!("expected `n <qubits>`, found {header:?}"),
            })
        }
    };
    check_capacity(n)?;
    let dim = 1usize << n;

    let mut entries = Vec::with_capacity(dim * dim);
    let mut rows = 0;
    for (line_no, line) in lines {
        if rows == dim {
            return Err(Error::Parse {
                line: line_no,
                message: format!("more than {dim} rows"),
            });
        }
        let before = entries.len();
        for token in line.split_whitespace() {
            entries.push(parse_entry(token).map_err(|message| Error::Parse {
                line: line_no,
                message,
            })?);
        }
        if entries.len() - before != dim {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {dim} entries, found {}", entries.len() - before),
            });
        }
        rows += 1;
    }
    if rows != dim {
        return Err(Error::Parse {
            line: text.lines().count(),
            message: format!("expected {dim} rows, found {rows}"),
        });
    }
    UnitaryMatrix::from_row_major(n, entries)
}

fn parse_entry(token: &str) -> std::result::Result<Complex64, String> {
    let (re, im) = token
        .split_once(',')
        .ok_or_else(|| format!("entry {token:?} is not of the form re,im"))?;
    let re = re
        .parse::<f64>()
        .map_err(|e| format!("bad real part in {token:?}: {e}"))?;
    let im = im
        .parse::<f64>()
        .map_err(|e| format!("bad imaginary part in {token:?}: {e}"))?;
    if !re.is_finite() || !im.is_finite() {
        return Err(format!("non-finite entry {token:?}"));
    }
    Ok(Complex64::new(re, im))
}
