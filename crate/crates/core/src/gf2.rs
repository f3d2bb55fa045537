//! Dense linear algebra over GF(2).
//!
//! Rows are packed into `u64` words so that adding one row to another is a
//! word-parallel XOR. Every operation is exact; there are no tolerances.

use std::fmt;

use thiserror::Error;

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },
    #[error("index {index} out of range for {len} rows")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("source and destination row are both {0}")]
    SameRow(usize),
    #[error("matrix is singular")]
    Singular,
    #[error("malformed hex row {0:?}")]
    BadHex(String),
}

/// A vector in GF(2)^n.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Vector {
    len: usize,
    words: Vec<u64>,
}

impl Gf2Vector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// The standard basis vector with a single 1 at `index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b & 1 == 1);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "coordinate {i} out of range {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "coordinate {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn toggle(&mut self, i: usize) {
        assert!(i < self.len, "coordinate {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &Gf2Vector) {
        assert_eq!(self.len, other.len, "vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Indices of the nonzero coordinates, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

impl std::ops::Add for &Gf2Vector {
    type Output = Gf2Vector;

    fn add(self, rhs: &Gf2Vector) -> Gf2Vector {
        let mut out = self.clone();
        out.xor_assign(rhs);
        out
    }
}

impl fmt::Debug for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..self.len {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.get(i) as u8)?;
        }
        write!(f, ")")
    }
}

/// A dense `rows x cols` matrix over GF(2), stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from 0/1 rows. All rows must have the same length.
    ///
    /// With no rows the column count is zero; use [`Gf2Matrix::from_vectors`]
    /// to keep a column count for an empty row set.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, Gf2Error> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Gf2Error::DimensionMismatch {
                    left: format!("row 0 has {cols} columns"),
                    right: format!("row {i} has {} columns", row.len()),
                });
            }
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b & 1 == 1);
            }
        }
        Ok(m)
    }

    /// Stacks vectors as the rows of a matrix with `cols` columns.
    pub fn from_vectors(cols: usize, vectors: &[Gf2Vector]) -> Self {
        let mut m = Self::zeros(vectors.len(), cols);
        for (i, v) in vectors.iter().enumerate() {
            assert_eq!(v.len(), cols, "vector length mismatch");
            m.row_words_mut(i).copy_from_slice(v.words());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(
            r < self.rows && c < self.cols,
            "entry ({r},{c}) out of range"
        );
        self.words[r * self.stride + c / WORD] >> (c % WORD) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(
            r < self.rows && c < self.cols,
            "entry ({r},{c}) out of range"
        );
        let mask = 1u64 << (c % WORD);
        let w = &mut self.words[r * self.stride + c / WORD];
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn toggle(&mut self, r: usize, c: usize) {
        let v = self.get(r, c);
        self.set(r, c, !v);
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.words[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.words[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> Gf2Vector {
        Gf2Vector {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    pub fn column(&self, c: usize) -> Gf2Vector {
        let mut v = Gf2Vector::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn set_row(&mut self, r: usize, v: &Gf2Vector) {
        assert_eq!(v.len(), self.cols, "row length mismatch");
        self.row_words_mut(r).copy_from_slice(v.words());
    }

    pub fn set_column(&mut self, c: usize, v: &Gf2Vector) {
        assert_eq!(v.len(), self.rows, "column length mismatch");
        for r in 0..self.rows {
            self.set(r, c, v.get(r));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r).to_bits()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.words.split_at_mut(dst * s);
            (&lo[src * s..(src + 1) * s], &mut hi[..s])
        } else {
            let (lo, hi) = self.words.split_at_mut(src * s);
            (&hi[..s], &mut lo[dst * s..(dst + 1) * s])
        };
        for (d, x) in b.iter_mut().zip(a) {
            *d ^= x;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.stride {
            self.words.swap(a * self.stride + k, b * self.stride + k);
        }
    }

    /// Elementary row operation: row `dst` becomes `dst + src`.
    pub fn add_row(&self, src: usize, dst: usize) -> Result<Self, Gf2Error> {
        let mut m = self.clone();
        m.add_row_in_place(src, dst)?;
        Ok(m)
    }

    pub fn add_row_in_place(&mut self, src: usize, dst: usize) -> Result<(), Gf2Error> {
        for index in [src, dst] {
            if index >= self.rows {
                return Err(Gf2Error::IndexOutOfRange {
                    index,
                    len: self.rows,
                });
            }
        }
        if src == dst {
            return Err(Gf2Error::SameRow(src));
        }
        self.xor_row_into(src, dst);
        Ok(())
    }

    pub fn mat_mul(&self, rhs: &Gf2Matrix) -> Result<Self, Gf2Error> {
        if self.cols != rhs.rows {
            return Err(Gf2Error::DimensionMismatch {
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("{}x{}", rhs.rows, rhs.cols),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) {
                    let src = rhs.row_words(k);
                    let dst = &mut out.words[i * out.stride..(i + 1) * out.stride];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d ^= s;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &Gf2Vector) -> Result<Gf2Vector, Gf2Error> {
        if x.len() != self.cols {
            return Err(Gf2Error::DimensionMismatch {
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("vector of length {}", x.len()),
            });
        }
        let mut out = Gf2Vector::zeros(self.rows);
        for r in 0..self.rows {
            let parity = self
                .row_words(r)
                .iter()
                .zip(x.words())
                .map(|(a, b)| (a & b).count_ones())
                .sum::<u32>();
            out.set(r, parity % 2 == 1);
        }
        Ok(out)
    }

    /// Reduces in place to reduced row echelon form; returns the pivot
    /// columns in order. Pivots are chosen as the first row (at or below the
    /// current one) with a 1 in the column, scanning columns left to right.
    fn reduce(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(p, r);
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_row_into(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Canonical reduced row echelon form (same shape as `self`).
    pub fn rref(&self) -> Self {
        let mut m = self.clone();
        m.reduce();
        m
    }

    pub fn rank(&self) -> usize {
        if self.cols <= WORD && self.stride == 1 {
            let mut rows = self.words.clone();
            return rank_of_words(&mut rows);
        }
        let mut m = self.clone();
        m.reduce().len()
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// Basis of the right nullspace `{x : Mx = 0}`, one vector per free
    /// column in ascending column order.
    pub fn kernel_basis(&self) -> Vec<Gf2Vector> {
        let mut m = self.clone();
        let pivots = m.reduce();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut x = Gf2Vector::unit(self.cols, f);
                for (i, &p) in pivots.iter().enumerate() {
                    if m.get(i, f) {
                        x.set(p, true);
                    }
                }
                x
            })
            .collect()
    }

    pub fn inverse(&self) -> Result<Self, Gf2Error> {
        if !self.is_square() {
            return Err(Gf2Error::DimensionMismatch {
                left: format!("{}x{}", self.rows, self.cols),
                right: "square".to_string(),
            });
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                if self.get(r, c) {
                    aug.set(r, c, true);
                }
            }
            aug.set(r, n + r, true);
        }
        let pivots = aug.reduce();
        if n > 0 && (pivots.len() < n || pivots[n - 1] != n - 1) {
            return Err(Gf2Error::Singular);
        }
        let mut inv = Self::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                if aug.get(r, n + c) {
                    inv.set(r, c, true);
                }
            }
        }
        Ok(inv)
    }

    /// Nonzero rows of the reduced row echelon form: a canonical basis of the
    /// row space.
    pub fn row_space_basis(&self) -> Vec<Gf2Vector> {
        let m = self.rref();
        (0..m.rows)
            .map(|r| m.row(r))
            .filter(|v| !v.is_zero())
            .collect()
    }

    /// Whether the two matrices have the same row space.
    pub fn spans_equal(&self, other: &Gf2Matrix) -> Result<bool, Gf2Error> {
        if self.cols != other.cols {
            return Err(Gf2Error::DimensionMismatch {
                left: format!("{} columns", self.cols),
                right: format!("{} columns", other.cols),
            });
        }
        Ok(self.row_space_basis() == other.row_space_basis())
    }

    /// One hex string per row. Column `j` is bit `j` of the row read as a
    /// little-endian integer; each row is printed with `ceil(cols / 4)`
    /// digits, most significant first.
    pub fn to_hex_rows(&self) -> Vec<String> {
        let digits = self.cols.div_ceil(4).max(1);
        (0..self.rows)
            .map(|r| {
                (0..digits)
                    .rev()
                    .map(|d| {
                        let nibble = (0..4)
                            .map(|b| 4 * d + b)
                            .filter(|&c| c < self.cols && self.get(r, c))
                            .fold(0u32, |acc, c| acc | 1 << (c % 4));
                        char::from_digit(nibble, 16).unwrap()
                    })
                    .collect()
            })
            .collect()
    }

    pub fn from_hex_rows<S: AsRef<str>>(cols: usize, rows: &[S]) -> Result<Self, Gf2Error> {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, text) in rows.iter().enumerate() {
            let text = text.as_ref();
            let bad = || Gf2Error::BadHex(text.to_string());
            for (d, ch) in text.chars().rev().enumerate() {
                let nibble = ch.to_digit(16).ok_or_else(bad)?;
                for b in 0..4 {
                    if nibble >> b & 1 == 1 {
                        let c = 4 * d + b;
                        if c >= cols {
                            return Err(bad());
                        }
                        m.set(r, c, true);
                    }
                }
            }
        }
        Ok(m)
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ",")?;
            }
            write!(f, "{:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

/// Rank of a matrix with at most 64 columns given as one word per row.
/// The rows are destroyed.
pub fn rank_of_words(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        let pivot = rows[i];
        if pivot == 0 {
            continue;
        }
        rank += 1;
        let low = pivot & pivot.wrapping_neg();
        for row in rows[i + 1..].iter_mut() {
            if *row & low != 0 {
                *row ^= pivot;
            }
        }
    }
    rank
}
