use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{parity, BinaryVector, MAX_BITS};
use crate::error::{Error, Result};

/// Dense GF(2) matrix stored as packed rows.
///
/// Entry `(i, j)` is bit `j` of row `i`, using the same left-indexed
/// packing as [`BinaryVector`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: Vec<u64>,
    cols: usize,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        if cols > MAX_BITS {
            return Err(Error::VectorTooLong(cols));
        }
        Ok(Self {
            rows: vec![0; rows],
            cols,
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim, dim)?;
        for i in 0..dim {
            m.rows[i] = 1u64 << (dim - 1 - i);
        }
        Ok(m)
    }

    /// The symplectic form `P = [[0, I], [I, 0]]` of size `2n`.
    pub fn symplectic_form(n: usize) -> Result<Self> {
        let mut m = Self::zeros(2 * n, 2 * n)?;
        for i in 0..2 * n {
            m.rows[i] = 1u64 << (2 * n - 1 - ((i + n) % (2 * n)));
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[BinaryVector]) -> Result<Self> {
        let cols = rows.first().map_or(0, BinaryVector::len);
        for r in rows {
            r.ensure_len(cols)?;
        }
        Ok(Self {
            rows: rows.iter().map(BinaryVector::word).collect(),
            cols,
        })
    }

    pub fn from_columns(columns: &[BinaryVector]) -> Result<Self> {
        Ok(Self::from_rows(columns)?.transpose())
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows.len() == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(j < self.cols);
        (self.rows[i] >> (self.cols - 1 - j)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(j < self.cols);
        let mask = 1u64 << (self.cols - 1 - j);
        if value {
            self.rows[i] |= mask;
        } else {
            self.rows[i] &= !mask;
        }
    }

    pub fn row(&self, i: usize) -> BinaryVector {
        BinaryVector::from_word_unchecked(self.rows[i], self.cols)
    }

    pub fn rows(&self) -> impl Iterator<Item = BinaryVector> + '_ {
        (0..self.nrows()).map(|i| self.row(i))
    }

    pub fn column(&self, j: usize) -> BinaryVector {
        let n = self.nrows();
        let word = (0..n).fold(0u64, |acc, i| (acc << 1) | self.get(i, j) as u64);
        BinaryVector::from_word_unchecked(word, n)
    }

    pub fn columns(&self) -> impl Iterator<Item = BinaryVector> + '_ {
        (0..self.cols).map(|j| self.column(j))
    }

    pub fn transpose(&self) -> Self {
        let rows = (0..self.cols).map(|j| self.column(j).word()).collect();
        Self {
            rows,
            cols: self.nrows(),
        }
    }

    pub fn mul_vec(&self, x: &BinaryVector) -> Result<BinaryVector> {
        x.ensure_len(self.cols)?;
        Ok(self.mul_word(x.word()))
    }

    /// Matrix-vector product on a packed word of the right width.
    #[inline]
    pub(crate) fn mul_word(&self, x: u64) -> BinaryVector {
        let n = self.nrows();
        let word = self
            .rows
            .iter()
            .fold(0u64, |acc, &r| (acc << 1) | parity(r & x) as u64);
        BinaryVector::from_word_unchecked(word, n)
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.nrows() {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                found: rhs.nrows(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|&r| {
                (0..self.cols)
                    .filter(|&j| (r >> (self.cols - 1 - j)) & 1 == 1)
                    .fold(0u64, |acc, j| acc ^ rhs.rows[j])
            })
            .collect();
        Ok(Self {
            rows,
            cols: rhs.cols,
        })
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for bit in (0..self.cols).rev() {
            let mask = 1u64 << bit;
            let Some(p) = (rank..rows.len()).find(|&i| rows[i] & mask != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && *r & mask != 0 {
                    *r ^= pivot;
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && self
                .rows
                .iter()
                .enumerate()
                .all(|(i, &r)| r == 1u64 << (self.cols - 1 - i))
    }

    /// Row-list of bit strings, the text form used by protocol files.
    pub fn to_row_strings(&self) -> Vec<String> {
        self.rows().map(|r| r.to_string()).collect()
    }

    pub fn from_row_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|s| s.as_ref().parse())
            .collect::<Result<Vec<BinaryVector>>>()?;
        Self::from_rows(&rows)
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_row_strings()).finish()
    }
}

impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl Serialize for BinaryMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_row_strings().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BinaryMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<String>::deserialize(deserializer)?;
        Self::from_row_strings(&rows).map_err(serde::de::Error::custom)
    }
}
