//! Lookup-table functions on m bits: permutation testing, inversion,
//! univariate-polynomial tables over F_{q^2}, algebraic degree, and the
//! S-box interchange file format.

use crate::field::{Fq2, Tower};
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;
use thiserror::Error;

pub const MAX_M: u32 = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SboxError {
    #[error("bit width {0} outside supported range 1..=20")]
    UnsupportedWidth(u32),
    #[error("table has {got} entries, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("entry {value:#x} at index {index} out of range for m={m}")]
    EntryOutOfRange { m: u32, index: usize, value: u32 },
    #[error("not a permutation: inputs {x1:#x} and {x2:#x} both map to {y:#x}")]
    NotAPermutation { x1: u32, x2: u32, y: u32 },
    #[error("polynomial term {index} repeats exponent {exponent}")]
    RepeatedExponent { index: usize, exponent: u64 },
    #[error("polynomial term {index} has a zero coefficient")]
    ZeroCoefficient { index: usize },
    #[error("exponent {exponent} exceeds q^2 - 1 = {max}")]
    ExponentOutOfRange { exponent: u64, max: u64 },
    #[error("malformed S-box file: {0}")]
    Parse(String),
    #[error("I/O error: {0}")]
    Io(String),
}

/// A function on m bits as a full lookup table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sbox {
    m: u32,
    table: Vec<u32>,
}

impl Sbox {
    pub fn new(m: u32, table: Vec<u32>) -> Result<Self, SboxError> {
        if m == 0 || m > MAX_M {
            return Err(SboxError::UnsupportedWidth(m));
        }
        let expected = 1usize << m;
        if table.len() != expected {
            return Err(SboxError::WrongLength {
                expected,
                got: table.len(),
            });
        }
        if let Some((index, &value)) = table.iter().enumerate().find(|(_, &v)| v >> m != 0) {
            return Err(SboxError::EntryOutOfRange { m, index, value });
        }
        Ok(Sbox { m, table })
    }

    /// Builds the table by evaluating `f` on every input.
    pub fn from_fn(m: u32, mut f: impl FnMut(u32) -> u32) -> Self {
        let table = (0..1u32 << m).map(&mut f).collect();
        Sbox::new(m, table).expect("generator produced an out-of-range value")
    }

    pub fn identity(m: u32) -> Self {
        Sbox::from_fn(m, |x| x)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.table[x as usize]
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.table.len()];
        for &y in &self.table {
            if seen[y as usize] {
                return false;
            }
            seen[y as usize] = true;
        }
        true
    }

    /// Inverse table; fails with a colliding pair when not a bijection.
    pub fn invert(&self) -> Result<Sbox, SboxError> {
        let mut inv = vec![u32::MAX; self.table.len()];
        for (x, &y) in self.table.iter().enumerate() {
            if inv[y as usize] != u32::MAX {
                return Err(SboxError::NotAPermutation {
                    x1: inv[y as usize],
                    x2: x as u32,
                    y,
                });
            }
            inv[y as usize] = x as u32;
        }
        Ok(Sbox {
            m: self.m,
            table: inv,
        })
    }

    /// Algebraic normal form of one output bit, as the 0/1 coefficient table
    /// indexed by monomial mask. The binary Moebius transform is an involution.
    pub fn component_anf(&self, bit: u32) -> Vec<u8> {
        let mut anf: Vec<u8> = self.table.iter().map(|&y| (y >> bit & 1) as u8).collect();
        moebius_transform(&mut anf);
        anf
    }

    /// Max ANF degree over all output bits; the zero function has degree 0.
    pub fn algebraic_degree(&self) -> u32 {
        let mut deg = 0;
        for bit in 0..self.m {
            let anf = self.component_anf(bit);
            for (mask, &c) in anf.iter().enumerate() {
                if c != 0 {
                    deg = deg.max(mask.count_ones());
                }
            }
        }
        deg
    }

    /// Writes the interchange format: `m=<int>` then 2^m hex entries.
    pub fn to_writer(&self, w: &mut impl Write) -> Result<(), SboxError> {
        let io = |e: std::io::Error| SboxError::Io(e.to_string());
        let digits = (self.m as usize).div_ceil(4);
        writeln!(w, "m={}", self.m).map_err(io)?;
        let mut buf = String::new();
        for &y in &self.table {
            buf.clear();
            let _ = writeln!(buf, "{y:0digits$x}");
            w.write_all(buf.as_bytes()).map_err(io)?;
        }
        Ok(())
    }

    /// Parses the interchange format; `#` starts a comment.
    pub fn from_reader(r: impl BufRead) -> Result<Sbox, SboxError> {
        let mut m: Option<u32> = None;
        let mut table: Vec<u32> = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| SboxError::Io(e.to_string()))?;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match m {
                None => {
                    let rest = line.strip_prefix("m=").ok_or_else(|| {
                        SboxError::Parse(format!(
                            "line {}: expected header `m=<int>`, got `{line}`",
                            lineno + 1
                        ))
                    })?;
                    let width: u32 = rest.trim().parse().map_err(|_| {
                        SboxError::Parse(format!("line {}: bad bit width `{rest}`", lineno + 1))
                    })?;
                    if width == 0 || width > MAX_M {
                        return Err(SboxError::UnsupportedWidth(width));
                    }
                    m = Some(width);
                    table.reserve(1 << width);
                }
                Some(_) => {
                    let v = u32::from_str_radix(line, 16).map_err(|_| {
                        SboxError::Parse(format!("line {}: bad hex value `{line}`", lineno + 1))
                    })?;
                    table.push(v);
                }
            }
        }
        let m = m.ok_or_else(|| SboxError::Parse("missing `m=<int>` header".into()))?;
        Sbox::new(m, table)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), SboxError> {
        let f = std::fs::File::create(path).map_err(|e| SboxError::Io(e.to_string()))?;
        let mut w = std::io::BufWriter::new(f);
        self.to_writer(&mut w)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Sbox, SboxError> {
        let f = std::fs::File::open(path).map_err(|e| SboxError::Io(e.to_string()))?;
        Sbox::from_reader(std::io::BufReader::new(f))
    }
}

/// In-place binary Moebius transform (truth table <-> ANF coefficients).
pub fn moebius_transform(bits: &mut [u8]) {
    debug_assert!(bits.len().is_power_of_two());
    let n = bits.len();
    let mut h = 1;
    while h < n {
        let mut s = 0;
        while s < n {
            for j in s..s + h {
                bits[j + h] ^= bits[j];
            }
            s += 2 * h;
        }
        h *= 2;
    }
}

/// A univariate polynomial over F_{q^2} in sparse term form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnivariatePoly {
    terms: Vec<(Fq2, u64)>,
}

impl UnivariatePoly {
    /// Terms are (coefficient, exponent); exponents must be distinct and
    /// coefficients nonzero.
    pub fn new(terms: Vec<(Fq2, u64)>) -> Result<Self, SboxError> {
        for (index, &(c, e)) in terms.iter().enumerate() {
            if c.is_zero() {
                return Err(SboxError::ZeroCoefficient { index });
            }
            if terms[..index].iter().any(|&(_, e2)| e2 == e) {
                return Err(SboxError::RepeatedExponent { index, exponent: e });
            }
        }
        Ok(UnivariatePoly { terms })
    }

    /// Single power monomial z^e.
    pub fn monomial(coeff: Fq2, exponent: u64) -> Result<Self, SboxError> {
        Self::new(vec![(coeff, exponent)])
    }

    pub fn terms(&self) -> &[(Fq2, u64)] {
        &self.terms
    }

    pub fn eval(&self, tower: &Tower, z: Fq2) -> Fq2 {
        let mut acc = Fq2::ZERO;
        for &(c, e) in &self.terms {
            acc = tower.add(acc, tower.mul(c, tower.pow(z, e)));
        }
        acc
    }
}

/// Tabulates p over F_{q^2}; indexes pack (u, v) as u * 2^n + v.
pub fn sbox_from_univariate(p: &UnivariatePoly, tower: &Tower) -> Result<Sbox, SboxError> {
    let max = tower.q2() - 1;
    for &(_, e) in p.terms() {
        if e > max {
            return Err(SboxError::ExponentOutOfRange { exponent: e, max });
        }
    }
    Ok(Sbox::from_fn(tower.m(), |t| {
        tower.idx(p.eval(tower, tower.from_idx(t)))
    }))
}
