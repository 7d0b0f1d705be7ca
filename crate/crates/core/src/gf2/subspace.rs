use std::fmt;

use super::{low_mask, BinaryVector};
use crate::bell::BellDiagonal;
use crate::error::{Error, Result};
use crate::scalar::Probability;

/// Linear subspace of `Z_2^len`.
///
/// The basis is kept in reduced row-echelon form with pivots at the most
/// significant (leftmost) bits, sorted by decreasing pivot. Two subspaces
/// are equal iff their canonical bases are equal, and reducing a vector
/// against the basis yields the smallest element of its coset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    len: usize,
    basis: Vec<u64>,
}

#[inline]
fn leading_bit(word: u64) -> u32 {
    63 - word.leading_zeros()
}

impl Subspace {
    pub fn zero(len: usize) -> Result<Self> {
        BinaryVector::zeros(len)?;
        Ok(Self {
            len,
            basis: Vec::new(),
        })
    }

    pub fn full(len: usize) -> Result<Self> {
        let units = (0..len)
            .map(|i| BinaryVector::unit(len, i))
            .collect::<Result<Vec<_>>>()?;
        Self::span(len, &units)
    }

    /// Span of arbitrary (possibly dependent) vectors.
    pub fn span(len: usize, vectors: &[BinaryVector]) -> Result<Self> {
        let mut s = Self::zero(len)?;
        for v in vectors {
            v.ensure_len(len)?;
            s.insert(v.word());
        }
        Ok(s)
    }

    /// Span of vectors required to be linearly independent.
    pub fn independent_span(len: usize, vectors: &[BinaryVector]) -> Result<Self> {
        let s = Self::span(len, vectors)?;
        if s.dim() != vectors.len() {
            return Err(Error::DependentGenerators);
        }
        Ok(s)
    }

    /// Adds a vector to the span; returns whether the dimension grew.
    pub(crate) fn insert(&mut self, word: u64) -> bool {
        let v = self.reduce_word(word);
        if v == 0 {
            return false;
        }
        let lead = 1u64 << leading_bit(v);
        for b in self.basis.iter_mut() {
            if *b & lead != 0 {
                *b ^= v;
            }
        }
        let pos = self.basis.partition_point(|&b| b > v);
        self.basis.insert(pos, v);
        true
    }

    #[inline]
    pub(crate) fn reduce_word(&self, mut word: u64) -> u64 {
        for &b in &self.basis {
            if word & (1u64 << leading_bit(b)) != 0 {
                word ^= b;
            }
        }
        word
    }

    /// Smallest element of the coset `v + self`.
    pub fn reduce(&self, v: &BinaryVector) -> Result<BinaryVector> {
        v.ensure_len(self.len)?;
        Ok(BinaryVector::from_word_unchecked(self.reduce_word(v.word()), self.len))
    }

    pub fn contains(&self, v: &BinaryVector) -> Result<bool> {
        Ok(self.reduce(v)?.is_zero())
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.len == other.len && self.basis.iter().all(|&b| other.reduce_word(b) == 0)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_len(&self) -> usize {
        self.len
    }

    pub fn basis(&self) -> Vec<BinaryVector> {
        self.basis
            .iter()
            .map(|&b| BinaryVector::from_word_unchecked(b, self.len))
            .collect()
    }

    fn pivot_mask(&self) -> u64 {
        self.basis.iter().fold(0, |acc, &b| acc | (1u64 << leading_bit(b)))
    }

    /// Symplectic complement `{v : v^T P s = 0 for all s}`; needs even length.
    pub fn orthogonal_complement(&self) -> Result<Subspace> {
        if !self.len.is_multiple_of(2) {
            return Err(Error::Malformed(format!(
                "symplectic complement needs even length, got {}",
                self.len
            )));
        }
        // v^T P s = v . (P s), so the complement is the kernel of the rows P s.
        let constraints = Subspace::span(
            self.len,
            &self.basis().iter().map(BinaryVector::swap_halves).collect::<Vec<_>>(),
        )?;
        let pivots = constraints.pivot_mask();
        let mut kernel = Subspace::zero(self.len)?;
        for bit in (0..self.len).filter(|&b| pivots & (1u64 << b) == 0) {
            let mut v = 1u64 << bit;
            for &row in &constraints.basis {
                if row & (1u64 << bit) != 0 {
                    v |= 1u64 << leading_bit(row);
                }
            }
            kernel.insert(v);
        }
        Ok(kernel)
    }

    /// True when the symplectic form vanishes on the subspace.
    pub fn is_isotropic(&self) -> bool {
        self.len.is_multiple_of(2)
            && self.basis.iter().all(|&a| {
                self.basis.iter().all(|&b| {
                    let va = BinaryVector::from_word_unchecked(a, self.len);
                    let vb = BinaryVector::from_word_unchecked(b, self.len);
                    !super::sympl_inner(&va, &vb).expect("same length")
                })
            })
    }

    /// All `2^dim` elements, in Gray-code order starting from zero.
    pub fn elements(&self) -> impl Iterator<Item = BinaryVector> + '_ {
        let len = self.len;
        gray_walk(0, &self.basis).map(move |w| BinaryVector::from_word_unchecked(w, len))
    }

    /// Basis of a complement of `self` inside `outer` (which must contain it).
    pub fn complement_in(&self, outer: &Subspace) -> Result<Vec<BinaryVector>> {
        if !self.is_subspace_of(outer) {
            return Err(Error::Malformed("subspace not contained in outer space".into()));
        }
        let mut acc = self.clone();
        Ok(outer
            .basis
            .iter()
            .filter(|&&b| acc.insert(b))
            .map(|&b| BinaryVector::from_word_unchecked(b, self.len))
            .collect())
    }

    /// Canonical representatives of every coset of `self` in the ambient
    /// space, in increasing order.
    pub fn coset_representatives(&self) -> Vec<BinaryVector> {
        let pivots = self.pivot_mask();
        let free: Vec<u32> = (0..self.len as u32)
            .filter(|&b| pivots & (1u64 << b) == 0)
            .collect();
        (0u64..(1u64 << free.len()))
            .map(|k| {
                let w = free
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (k >> i) & 1 == 1)
                    .fold(0u64, |acc, (_, &b)| acc | (1u64 << b));
                BinaryVector::from_word_unchecked(w, self.len)
            })
            .collect()
    }
}

/// Walks `start + span(basis)` in Gray-code order.
pub(crate) fn gray_walk(start: u64, basis: &[u64]) -> impl Iterator<Item = u64> + '_ {
    let count = 1u64 << basis.len();
    let mut current = start;
    (0..count).map(move |k| {
        if k > 0 {
            current ^= basis[k.trailing_zeros() as usize];
        }
        current
    })
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subspace")
            .field("len", &self.len)
            .field("basis", &self.basis())
            .finish()
    }
}

/// Affine set `offset + subspace`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Coset {
    subspace: Subspace,
    offset: BinaryVector,
}

impl Coset {
    /// The stored offset is the canonical (smallest) representative.
    pub fn new(subspace: Subspace, offset: BinaryVector) -> Result<Self> {
        let offset = subspace.reduce(&offset)?;
        Ok(Self { subspace, offset })
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn representative(&self) -> BinaryVector {
        self.offset
    }

    pub fn contains(&self, v: &BinaryVector) -> Result<bool> {
        self.subspace.contains(&v.checked_add(&self.offset)?)
    }

    pub fn size(&self) -> u64 {
        1u64 << self.subspace.dim()
    }

    pub fn elements(&self) -> impl Iterator<Item = BinaryVector> + '_ {
        let len = self.subspace.len;
        gray_walk(self.offset.word(), &self.subspace.basis)
            .map(move |w| BinaryVector::from_word_unchecked(w, len))
    }

    pub(crate) fn words(&self) -> impl Iterator<Item = u64> + '_ {
        gray_walk(self.offset.word(), &self.subspace.basis)
    }
}

/// Total weight of `state` over the elements of `coset`.
pub fn coset_sum<T: Probability>(state: &BellDiagonal<T>, coset: &Coset) -> Result<T> {
    let len = 2 * state.num_pairs();
    if coset.subspace.len != len {
        return Err(Error::LengthMismatch {
            expected: len,
            found: coset.subspace.len,
        });
    }
    let probs = state.probs();
    debug_assert!(coset.offset.word() <= low_mask(len));
    Ok(coset
        .words()
        .fold(T::zero(), |acc, w| acc + probs[w as usize].clone()))
}
