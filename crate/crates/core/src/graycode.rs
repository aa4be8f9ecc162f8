//! Reflected binary Gray code and the position-to-basis map.
//!
//! Positions `p` run over `1..=2^n` in Gray order; the code at position `p`
//! is `(p - 1) ^ ((p - 1) >> 1)`. The binary-basis index of position `p` is
//! `gamma(p) = code(p) + 1`. All positions and indices here are one-based.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Widest code table we are willing to materialize.
pub const MAX_GRAY_BITS: usize = 30;

/// Gray code of the zero-based index `i`.
#[inline]
pub fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

/// Inverse of [`gray`].
#[inline]
pub fn gray_inverse(mut code: usize) -> usize {
    let mut shift = code >> 1;
    while shift != 0 {
        code ^= shift;
        shift >>= 1;
    }
    code
}

/// The sequence `c_1, ..., c_{2^n}` of `n`-bit reflected Gray codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayCodeTable {
    n: usize,
    codes: Vec<usize>,
}

impl GrayCodeTable {
    pub fn bits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Code at one-based position `p`.
    pub fn code(&self, p: usize) -> usize {
        self.codes[p - 1]
    }

    pub fn codes(&self) -> &[usize] {
        &self.codes
    }

    /// Renders the table with one row per bit (bit `n` on top) and one column
    /// per position, `#` for 1 and `.` for 0, followed by the gamma row.
    pub fn render(&self) -> String {
        let width = self.codes.len().to_string().len().max(2);
        let mut out = String::new();
        let _ = write!(out, "{:>6} ", "pos");
        for p in 1..=self.len() {
            let _ = write!(out, "{p:>width$}");
        }
        out.push('\n');
        for bit in (1..=self.n).rev() {
            let _ = write!(out, "{:>6} ", format!("b{bit}"));
            for &code in &self.codes {
                let mark = if code >> (bit - 1) & 1 == 1 { "#" } else { "." };
                let _ = write!(out, "{mark:>width$}");
            }
            out.push('\n');
        }
        let _ = write!(out, "{:>6} ", "gamma");
        for &code in &self.codes {
            let _ = write!(out, "{:>width$}", code + 1);
        }
        out.push('\n');
        out
    }
}

/// Builds the `n`-bit table.
pub fn gray_code(n: usize) -> Result<GrayCodeTable> {
    check_bits(n)?;
    Ok(GrayCodeTable {
        n,
        codes: (0..1usize << n).map(gray).collect(),
    })
}

/// Bijection from Gray positions to binary-basis indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisMap {
    n: usize,
    gamma: Vec<usize>,
    position: Vec<usize>,
}

impl BasisMap {
    pub fn new(n: usize) -> Result<Self> {
        let table = gray_code(n)?;
        let gamma: Vec<usize> = table.codes.iter().map(|c| c + 1).collect();
        let mut position = vec![0; gamma.len()];
        for (p, &g) in gamma.iter().enumerate() {
            position[g - 1] = p + 1;
        }
        Ok(Self { n, gamma, position })
    }

    pub fn bits(&self) -> usize {
        self.n
    }

    /// `gamma(p)` for a one-based position.
    pub fn gamma(&self, p: usize) -> usize {
        self.gamma[p - 1]
    }

    /// Zero-based matrix row for a one-based position.
    pub fn row(&self, p: usize) -> usize {
        self.gamma[p - 1] - 1
    }

    /// Position holding the one-based basis index `b`.
    pub fn position(&self, b: usize) -> usize {
        self.position[b - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.gamma
    }
}

/// `gamma(i) = code(i) + 1`.
pub fn gamma_of(i: usize, n: usize) -> Result<usize> {
    check_bits(n)?;
    check_position("position", i, 1, n)?;
    Ok(gray(i - 1) + 1)
}

/// The one-based bit in which the codes at positions `j - 1` and `j` differ.
pub fn changed_bit(j: usize, n: usize) -> Result<usize> {
    check_bits(n)?;
    check_position("position", j, 2, n)?;
    Ok(changed_bit_unchecked(j))
}

#[inline]
pub(crate) fn changed_bit_unchecked(j: usize) -> usize {
    (j - 1).trailing_zeros() as usize + 1
}

fn check_bits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_GRAY_BITS {
        return Err(Error::OutOfRange {
            what: "bit count",
            value: n,
            min: 1,
            max: MAX_GRAY_BITS,
        });
    }
    Ok(())
}

fn check_position(what: &'static str, p: usize, min: usize, n: usize) -> Result<()> {
    let max = 1usize << n;
    if p < min || p > max {
        return Err(Error::OutOfRange {
            what,
            value: p,
            min,
            max,
        });
    }
    Ok(())
}
