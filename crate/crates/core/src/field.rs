//! Arithmetic and linear algebra over the prime field F_b.
//!
//! Everything downstream — net generation, dual-net enumeration, quality
//! certification — reduces to matrix/vector work over a small prime field,
//! so this module keeps the primitives exact and deterministic: elimination
//! pivots on the first nonzero entry with ties broken by lowest row index,
//! which fixes the kernel basis (and hence every enumeration order) once
//! and for all.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GfError {
    #[error("modulus {0} is not prime")]
    NotPrime(u32),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("dimension mismatch: matrix is {rows}x{cols}, operand has length {got}")]
    DimensionMismatch { rows: usize, cols: usize, got: usize },
}

fn is_prime(b: u32) -> bool {
    if b < 2 {
        return false;
    }
    let mut k = 2u32;
    while k * k <= b {
        if b % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// A prime modulus, validated at construction. Elements of F_b are plain
/// `u32` values in `[0, b)`; the field carries the arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeField {
    modulus: u32,
}

impl PrimeField {
    pub fn new(modulus: u32) -> Result<Self, GfError> {
        if !is_prime(modulus) {
            return Err(GfError::NotPrime(modulus));
        }
        Ok(Self { modulus })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.modulus
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        (a + self.modulus - b % self.modulus) % self.modulus
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.modulus as u64) as u32
    }

    pub fn neg(&self, a: u32) -> u32 {
        (self.modulus - a % self.modulus) % self.modulus
    }

    /// Multiplicative inverse by exhaustive search. The modulus is tiny by
    /// construction so there is no point reaching for Fermat or extended gcd.
    pub fn inv(&self, a: u32) -> Result<u32, GfError> {
        let a = a % self.modulus;
        if a == 0 {
            return Err(GfError::ZeroInverse);
        }
        for x in 1..self.modulus {
            if self.mul(a, x) == 1 {
                return Ok(x);
            }
        }
        unreachable!("nonzero element of a prime field has an inverse")
    }
}

/// A single field element tagged with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldElem {
    pub value: u32,
    pub field: PrimeField,
}

impl FieldElem {
    pub fn new(value: u32, modulus: u32) -> Result<Self, GfError> {
        let field = PrimeField::new(modulus)?;
        Ok(Self { value: value % modulus, field })
    }
}

/// a * x = 1 (mod b) for nonzero a.
pub fn field_inverse(a: FieldElem) -> Result<FieldElem, GfError> {
    Ok(FieldElem { value: a.field.inv(a.value)?, field: a.field })
}

/// A dense row-major matrix over F_b.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FieldMatrix {
    pub fn zero(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, size: usize) -> Self {
        let mut m = Self::zero(field, size, size);
        for i in 0..size {
            m.set(i, i, 1);
        }
        m
    }

    /// Anti-diagonal identity: row a has a 1 in column (cols - 1 - a).
    pub fn anti_identity(field: PrimeField, size: usize) -> Self {
        let mut m = Self::zero(field, size, size);
        for i in 0..size {
            m.set(i, size - 1 - i, 1);
        }
        m
    }

    pub fn from_rows(field: PrimeField, rows: Vec<Vec<u32>>) -> Result<Self, GfError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in &rows {
            if r.len() != ncols {
                return Err(GfError::DimensionMismatch { rows: nrows, cols: ncols, got: r.len() });
            }
            for &v in r {
                data.push(v % field.modulus());
            }
        }
        Ok(Self { field, rows: nrows, cols: ncols, data })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.field.modulus();
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// M v, or M^T v with the transpose flag.
    pub fn mat_vec(&self, v: &[u32], transpose: bool) -> Result<Vec<u32>, GfError> {
        let f = self.field;
        if transpose {
            if v.len() != self.rows {
                return Err(GfError::DimensionMismatch { rows: self.rows, cols: self.cols, got: v.len() });
            }
            let mut out = vec![0u32; self.cols];
            for (r, &vr) in v.iter().enumerate() {
                if vr == 0 {
                    continue;
                }
                for c in 0..self.cols {
                    out[c] = f.add(out[c], f.mul(self.get(r, c), vr));
                }
            }
            Ok(out)
        } else {
            if v.len() != self.cols {
                return Err(GfError::DimensionMismatch { rows: self.rows, cols: self.cols, got: v.len() });
            }
            let mut out = vec![0u32; self.rows];
            for r in 0..self.rows {
                let mut acc = 0u32;
                for c in 0..self.cols {
                    acc = f.add(acc, f.mul(self.get(r, c), v[c]));
                }
                out[r] = acc;
            }
            Ok(out)
        }
    }

    pub fn rank(&self) -> usize {
        let (_, rank, _) = self.row_echelon();
        rank
    }

    /// Reduced row echelon form together with the rank and pivot columns.
    fn row_echelon(&self) -> (FieldMatrix, usize, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pr = 0usize;
        for pc in 0..m.cols {
            if pr == m.rows {
                break;
            }
            let Some(sel) = (pr..m.rows).find(|&r| m.get(r, pc) != 0) else {
                continue;
            };
            if sel != pr {
                for c in 0..m.cols {
                    let (a, b) = (m.get(pr, c), m.get(sel, c));
                    m.set(pr, c, b);
                    m.set(sel, c, a);
                }
            }
            let inv = f.inv(m.get(pr, pc)).expect("pivot is nonzero");
            for c in 0..m.cols {
                m.set(pr, c, f.mul(m.get(pr, c), inv));
            }
            for r in 0..m.rows {
                if r != pr && m.get(r, pc) != 0 {
                    let factor = m.get(r, pc);
                    for c in 0..m.cols {
                        let v = f.sub(m.get(r, c), f.mul(factor, m.get(pr, c)));
                        m.set(r, c, v);
                    }
                }
            }
            pivots.push(pc);
            pr += 1;
        }
        (m, pr, pivots)
    }

    /// A basis of {v : Mv = 0}, one vector per free column. Each basis
    /// vector is re-verified to lie in the kernel before it is returned.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        let f = self.field;
        let (rref, _, pivots) = self.row_echelon();
        let mut basis = Vec::new();
        let mut pivot_of_col = vec![None; self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            pivot_of_col[pc] = Some(i);
        }
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(rref.get(i, free));
            }
            debug_assert!(self
                .mat_vec(&v, false)
                .map(|w| w.iter().all(|&x| x == 0))
                .unwrap_or(false));
            basis.push(v);
        }
        basis
    }

    /// Rank of an ad-hoc list of row vectors; used by the quality module's
    /// row-selection tests.
    pub fn rank_of_rows(field: PrimeField, rows: &[&[u32]]) -> usize {
        if rows.is_empty() {
            return 0;
        }
        let owned: Vec<Vec<u32>> = rows.iter().map(|r| r.to_vec()).collect();
        FieldMatrix::from_rows(field, owned).expect("uniform row length").rank()
    }
}
