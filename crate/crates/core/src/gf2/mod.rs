//! Linear algebra over GF(2) with the symplectic form `P = [[0, I], [I, 0]]`.
//!
//! Vectors and matrix rows are packed into a single `u64`. Bit `i` of a
//! length-`len` vector (counting from the left, as written in a label such
//! as `010011`) lives at machine position `len - 1 - i`, so the packed word
//! *is* the integer value of the label string. Bell-diagonal states use
//! that integer directly as their array index.
//!
//! For a length-`2n` label the first `n` bits are the phase (`Z`) part and
//! the last `n` bits the parity (`X`) part.

mod matrix;
mod subspace;
mod symplectic;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use matrix::BinaryMatrix;
pub use subspace::{coset_sum, Coset, Subspace};
pub(crate) use subspace::gray_walk;
pub use symplectic::{
    complete_to_symplectic, complete_to_symplectic_with_order, is_symplectic, solve_commutation,
    solve_min, symplectic_inverse, sympl_inner,
};

pub(crate) const MAX_BITS: usize = 64;

#[inline]
pub(crate) fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

#[inline]
pub(crate) fn parity(word: u64) -> bool {
    word.count_ones() & 1 == 1
}

/// Element of `Z_2^len`, packed.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryVector {
    bits: u64,
    len: usize,
}

impl BinaryVector {
    pub fn zeros(len: usize) -> Result<Self> {
        Self::from_word(0, len)
    }

    /// Wraps a packed word. Bits above `len` must be clear.
    pub fn from_word(bits: u64, len: usize) -> Result<Self> {
        if len > MAX_BITS {
            return Err(Error::VectorTooLong(len));
        }
        if bits & !low_mask(len) != 0 {
            return Err(Error::Malformed(format!(
                "word {bits:#x} has bits beyond length {len}"
            )));
        }
        Ok(Self { bits, len })
    }

    pub(crate) fn from_word_unchecked(bits: u64, len: usize) -> Self {
        debug_assert!(len <= MAX_BITS && bits & !low_mask(len) == 0);
        Self { bits, len }
    }

    /// Unit vector with a one at (left-indexed) position `i`.
    pub fn unit(len: usize, i: usize) -> Result<Self> {
        if i >= len {
            return Err(Error::LengthMismatch {
                expected: len,
                found: i + 1,
            });
        }
        Self::from_word(1u64 << (len - 1 - i), len)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let len = bits.len();
        if len > MAX_BITS {
            return Err(Error::VectorTooLong(len));
        }
        let word = bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        Ok(Self { bits: word, len })
    }

    /// Concatenates phase and parity halves of a label.
    pub fn from_halves(phase: u64, parity: u64, n: usize) -> Result<Self> {
        if phase & !low_mask(n) != 0 || parity & !low_mask(n) != 0 {
            return Err(Error::Malformed("half wider than n bits".into()));
        }
        if 2 * n > MAX_BITS {
            return Err(Error::VectorTooLong(2 * n));
        }
        Ok(Self::from_word_unchecked((phase << n) | parity, 2 * n))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed word; equals the integer value of the bit string.
    #[inline]
    pub fn word(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.bits >> (self.len - 1 - i)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (self.len - 1 - i);
        if value {
            self.bits |= mask;
        } else {
            self.bits &= !mask;
        }
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// Phase (`Z`) half of a length-`2n` label, as an `n`-bit word.
    pub fn phase_word(&self) -> u64 {
        let n = self.len / 2;
        self.bits >> n
    }

    /// Parity (`X`) half of a length-`2n` label, as an `n`-bit word.
    pub fn parity_word(&self) -> u64 {
        self.bits & low_mask(self.len / 2)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.ensure_len(other.len)?;
        Ok(Self::from_word_unchecked(self.bits ^ other.bits, self.len))
    }

    /// Standard (non-symplectic) dot product.
    pub fn dot(&self, other: &Self) -> Result<bool> {
        self.ensure_len(other.len)?;
        Ok(parity(self.bits & other.bits))
    }

    /// Applies `P`: swaps the phase and parity halves.
    pub fn swap_halves(&self) -> Self {
        let n = self.len / 2;
        Self::from_word_unchecked((self.parity_word() << n) | self.phase_word(), self.len)
    }

    pub(crate) fn ensure_len(&self, expected: usize) -> Result<()> {
        if self.len != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: self.len,
            });
        }
        Ok(())
    }
}

impl std::ops::Add for BinaryVector {
    type Output = BinaryVector;

    /// Panics on length mismatch; use [`BinaryVector::checked_add`] for
    /// untrusted input.
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.len, rhs.len, "adding vectors of different length");
        Self::from_word_unchecked(self.bits ^ rhs.bits, self.len)
    }
}

impl fmt::Display for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryVector({self})")
    }
}

impl FromStr for BinaryVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidBitString(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }
}

impl Serialize for BinaryVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BinaryVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_is_label_integer() {
        let v: BinaryVector = "010011".parse().unwrap();
        assert_eq!(v.word(), 0b010011);
        assert_eq!(v.phase_word(), 0b010);
        assert_eq!(v.parity_word(), 0b011);
        assert_eq!(v.to_string(), "010011");
        assert!(v.get(1) && !v.get(0) && v.get(5));
    }

    #[test]
    fn halves_and_swap() {
        let v = BinaryVector::from_halves(0b10, 0b01, 2).unwrap();
        assert_eq!(v.to_string(), "1001");
        assert_eq!(v.swap_halves().to_string(), "0110");
    }

    #[test]
    fn rejects_bad_strings() {
        assert!("01a".parse::<BinaryVector>().is_err());
        assert!(BinaryVector::from_word(0b100, 2).is_err());
        assert!(BinaryVector::zeros(65).is_err());
        let a = BinaryVector::zeros(2).unwrap();
        let b = BinaryVector::zeros(3).unwrap();
        assert!(a.checked_add(&b).is_err());
    }

    #[test]
    fn empty_vector_round_trips() {
        let v: BinaryVector = "".parse().unwrap();
        assert!(v.is_empty());
        assert_eq!(v.to_string(), "");
        assert_eq!(serde_json::to_string(&v).unwrap(), "\"\"");
    }

    #[test]
    fn unit_vectors() {
        assert_eq!(BinaryVector::unit(4, 0).unwrap().to_string(), "1000");
        assert_eq!(BinaryVector::unit(4, 3).unwrap().to_string(), "0001");
        assert!(BinaryVector::unit(4, 4).is_err());
    }
}
