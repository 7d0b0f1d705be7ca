//! Brute-force reference computations on raw label words.
//!
//! Everything here enumerates all `4^n` labels directly and uses only bit
//! operations, independent of the coset machinery under test.

#![allow(dead_code)]

use distill_core::{BinaryMatrix, BinaryVector};

pub fn mask(bits: usize) -> u64 {
    (1u64 << bits) - 1
}

/// `a^T P b` on `2n`-bit words.
pub fn sympl(a: u64, b: u64, n: usize) -> bool {
    let m = mask(n);
    let v = ((a >> n) & b & m) ^ (a & m & (b >> n));
    v.count_ones() % 2 == 1
}

/// `A x + b`, row by row.
pub fn affine(a: &BinaryMatrix, b: u64, x: u64) -> u64 {
    let len = a.nrows();
    let mut out = 0u64;
    for i in 0..len {
        let bit = (a.row(i).word() & x).count_ones() as u64 & 1;
        out = (out << 1) | bit;
    }
    out ^ b
}

/// Joint weights `w[t][y]` after relabeling by `x -> A x + b` and measuring
/// the parities of the last `n - m` pairs. Not normalized per branch.
pub fn parity_joint(probs: &[f64], n: usize, m: usize, a: &BinaryMatrix, b: u64) -> Vec<Vec<f64>> {
    let k = n - m;
    let mut joint = vec![vec![0.0; 1 << (2 * m)]; 1 << k];
    for (x, &p) in probs.iter().enumerate() {
        let xp = affine(a, b, x as u64);
        let phase = xp >> n;
        let parity = xp & mask(n);
        let t = parity & mask(k);
        let y = ((phase >> k) << m) | (parity >> k);
        joint[t as usize][y as usize] += p;
    }
    joint
}

/// Syndrome word of `x`; generator 0 is the most significant bit.
pub fn syndrome(gens: &[u64], x: u64, n: usize) -> u64 {
    gens.iter().fold(0, |acc, &g| (acc << 1) | sympl(g, x, n) as u64)
}

pub fn syndrome_distribution(probs: &[f64], gens: &[u64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; 1 << gens.len()];
    for (x, &p) in probs.iter().enumerate() {
        out[syndrome(gens, x as u64, n) as usize] += p;
    }
    out
}

/// All `2^k` elements of `span(gens)`.
pub fn span_elements(gens: &[u64]) -> Vec<u64> {
    (0..1u64 << gens.len())
        .map(|c| {
            gens.iter()
                .enumerate()
                .filter(|(i, _)| (c >> (gens.len() - 1 - i)) & 1 == 1)
                .fold(0, |acc, (_, &g)| acc ^ g)
        })
        .collect()
}

/// Precomputed syndromes and code-group membership for all `4^n` labels.
pub struct CodeTable {
    pub syndromes: Vec<u64>,
    pub in_code: Vec<bool>,
}

impl CodeTable {
    pub fn new(gens: &[u64], n: usize) -> Self {
        let size = 1usize << (2 * n);
        let mut in_code = vec![false; size];
        for c in span_elements(gens) {
            in_code[c as usize] = true;
        }
        Self {
            syndromes: (0..size as u64).map(|x| syndrome(gens, x, n)).collect(),
            in_code,
        }
    }

    /// Weight of syndrome-`s` errors `x` that recovery `e` maps into the
    /// code group, i.e. with `x + e` in `span(gens)`.
    pub fn recovery_weight(&self, probs: &[f64], s: u64, e: u64) -> f64 {
        probs
            .iter()
            .enumerate()
            .filter(|&(x, _)| self.syndromes[x] == s && self.in_code[x ^ e as usize])
            .map(|(_, p)| p)
            .sum()
    }
}

pub fn words(vs: &[BinaryVector]) -> Vec<u64> {
    vs.iter().map(BinaryVector::word).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
