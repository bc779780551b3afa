//! Dense linear algebra over F₂ with bit-packed rows.
//!
//! Row reduction always picks the leftmost available pivot, so kernel bases
//! and quotient representatives are reproducible.

use std::fmt;

use crate::error::DescentError;

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Vector {
    len: usize,
    words: Vec<u64>,
}

impl F2Vector {
    pub fn zeros(len: usize) -> Self {
        F2Vector { len, words: vec![0; len.div_ceil(WORD)] }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b & 1 == 1);
        }
        v
    }

    /// Parses a string of `0`/`1` characters, e.g. `"0110"`.
    pub fn parse(s: &str) -> Self {
        let bits: Vec<u8> = s.bytes().map(|c| (c == b'1') as u8).collect();
        Self::from_bits(&bits)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if bit {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &F2Vector) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &F2Vector) -> F2Vector {
        let mut r = self.clone();
        r.xor_assign(other);
        r
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn dot(&self, other: &F2Vector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch");
        let ones: u32 = self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum();
        ones % 2 == 1
    }

    pub fn leading_index(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * WORD + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    pub fn concat(parts: &[F2Vector]) -> F2Vector {
        let total = parts.iter().map(|p| p.len).sum();
        let mut out = F2Vector::zeros(total);
        let mut at = 0;
        for p in parts {
            for i in p.ones() {
                out.set(at + i, true);
            }
            at += p.len;
        }
        out
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Vector({self})")
    }
}

impl fmt::Display for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F2Matrix {
    ncols: usize,
    rows: Vec<F2Vector>,
}

impl F2Matrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        F2Matrix { ncols, rows: vec![F2Vector::zeros(ncols); nrows] }
    }

    pub fn identity(n: usize) -> Self {
        F2Matrix { ncols: n, rows: (0..n).map(|i| F2Vector::unit(n, i)).collect() }
    }

    pub fn from_rows(ncols: usize, rows: Vec<F2Vector>) -> Result<Self, DescentError> {
        if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
            return Err(DescentError::DimensionMismatch { expected: ncols, found: bad.len() });
        }
        Ok(F2Matrix { ncols, rows })
    }

    /// Builds a matrix from `0`/`1` strings, one per row.
    pub fn parse(rows: &[&str]) -> Self {
        let rows: Vec<F2Vector> = rows.iter().map(|r| F2Vector::parse(r)).collect();
        let ncols = rows.first().map_or(0, |r| r.len());
        F2Matrix::from_rows(ncols, rows).expect("ragged matrix literal")
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[F2Vector] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        self.rows[r].set(c, bit)
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.ncols, self.nrows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                t.rows[c].set(r, true);
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &F2Vector) -> F2Vector {
        assert_eq!(v.len(), self.ncols, "length mismatch");
        let mut out = F2Vector::zeros(self.nrows());
        for (r, row) in self.rows.iter().enumerate() {
            out.set(r, row.dot(v));
        }
        out
    }

    /// Row vector times matrix: the XOR of the rows selected by `v`.
    pub fn vec_mul(&self, v: &F2Vector) -> F2Vector {
        assert_eq!(v.len(), self.nrows(), "length mismatch");
        let mut out = F2Vector::zeros(self.ncols);
        for r in v.ones() {
            out.xor_assign(&self.rows[r]);
        }
        out
    }

    /// Reduced row echelon form and its pivot columns, in increasing order.
    pub fn rref(&self) -> (F2Matrix, Vec<usize>) {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.ncols {
            let Some(found) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(next, found);
            let pivot_row = rows[next].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != next && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            next += 1;
            if next == rows.len() {
                break;
            }
        }
        rows.truncate(next);
        (F2Matrix { ncols: self.ncols, rows }, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{v : m·v = 0}`, one vector per free column of the reduced form.
    pub fn kernel(&self) -> Vec<F2Vector> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.ncols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.ncols).filter(|&c| !is_pivot[c]) {
            let mut v = F2Vector::unit(self.ncols, free);
            for (row, &p) in r.rows.iter().zip(&pivots) {
                if row.get(free) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Basis of `{c : c·m = 0}`, i.e. linear relations among the rows.
    pub fn left_kernel(&self) -> Vec<F2Vector> {
        self.transpose().kernel()
    }
}

/// Reduction modulo a fixed subspace. The representative of a coset has a
/// zero in every pivot column of the subspace's reduced echelon basis.
#[derive(Clone, Debug)]
pub struct Quotient {
    len: usize,
    reduced: Vec<F2Vector>,
    pivots: Vec<usize>,
}

impl Quotient {
    pub fn new(len: usize, subspace_basis: &[F2Vector]) -> Result<Self, DescentError> {
        let m = F2Matrix::from_rows(len, subspace_basis.to_vec())?;
        let (r, pivots) = m.rref();
        if pivots.len() != subspace_basis.len() {
            return Err(DescentError::DependentSubspace);
        }
        Ok(Quotient { len, reduced: r.rows, pivots })
    }

    pub fn dim(&self) -> usize {
        self.len - self.pivots.len()
    }

    pub fn representative(&self, v: &F2Vector) -> Result<F2Vector, DescentError> {
        if v.len() != self.len {
            return Err(DescentError::DimensionMismatch { expected: self.len, found: v.len() });
        }
        let mut out = v.clone();
        for (row, &p) in self.reduced.iter().zip(&self.pivots) {
            if out.get(p) {
                out.xor_assign(row);
            }
        }
        Ok(out)
    }

    /// Coordinates in the complement spanned by the non-pivot unit vectors.
    pub fn project(&self, v: &F2Vector) -> Result<F2Vector, DescentError> {
        let rep = self.representative(v)?;
        let free: Vec<usize> = (0..self.len).filter(|c| !self.pivots.contains(c)).collect();
        let mut out = F2Vector::zeros(free.len());
        for (k, &c) in free.iter().enumerate() {
            out.set(k, rep.get(c));
        }
        Ok(out)
    }
}

pub fn kernel(m: &F2Matrix) -> Vec<F2Vector> {
    m.kernel()
}

pub fn rank(m: &F2Matrix) -> usize {
    m.rank()
}

/// Coset representative of `v` modulo the span of `subspace_basis`.
pub fn quotient_coordinates(v: &F2Vector, subspace_basis: &[F2Vector]) -> Result<F2Vector, DescentError> {
    Quotient::new(v.len(), subspace_basis)?.representative(v)
}
