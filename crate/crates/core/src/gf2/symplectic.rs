use super::{low_mask, parity, BinaryMatrix, BinaryVector, Subspace};
use crate::error::{Error, Result};

/// Symplectic inner product `a^T P b`; zero iff `sigma_a` and `sigma_b`
/// commute.
pub fn sympl_inner(a: &BinaryVector, b: &BinaryVector) -> Result<bool> {
    b.ensure_len(a.len())?;
    if !a.len().is_multiple_of(2) {
        return Err(Error::Malformed(format!(
            "symplectic inner product needs even length, got {}",
            a.len()
        )));
    }
    Ok(sympl_word(a.word(), b.word(), a.len() / 2))
}

#[inline]
pub(crate) fn sympl_word(a: u64, b: u64, n: usize) -> bool {
    let mask = low_mask(n);
    parity(((a >> n) & b & mask) ^ (a & mask & (b >> n)))
}

fn check_square_even(a: &BinaryMatrix) -> Result<usize> {
    if !a.is_square() || !a.nrows().is_multiple_of(2) {
        return Err(Error::NotSquareEven {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows() / 2)
}

/// `A^T P A == P`.
pub fn is_symplectic(a: &BinaryMatrix) -> Result<bool> {
    let n = check_square_even(a)?;
    // Columns must form a symplectic basis: <c_i, c_j> = 1 iff |i - j| = n.
    let cols: Vec<u64> = a.columns().map(|c| c.word()).collect();
    Ok((0..2 * n).all(|i| {
        (i..2 * n).all(|j| sympl_word(cols[i], cols[j], n) == (j == i + n))
    }))
}

/// `P A^T P`, the inverse of a symplectic matrix.
pub fn symplectic_inverse(a: &BinaryMatrix) -> Result<BinaryMatrix> {
    if !is_symplectic(a)? {
        return Err(Error::NotSymplectic);
    }
    let p = BinaryMatrix::symplectic_form(a.nrows() / 2)?;
    p.mul(&a.transpose())?.mul(&p)
}

/// Lexicographically smallest `x` with `rows[i] . x = rhs[i]` for all `i`.
///
/// Gaussian elimination with pivots taken from the least significant
/// column upwards; free variables are then the most significant ones and
/// are set to zero.
pub fn solve_min(rows: &[BinaryVector], rhs: &BinaryVector, ncols: usize) -> Result<BinaryVector> {
    rhs.ensure_len(rows.len())?;
    for r in rows {
        r.ensure_len(ncols)?;
    }
    let mut system: Vec<(u64, bool)> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| (r.word(), rhs.get(i)))
        .collect();
    let mut pivots: Vec<(u32, usize)> = Vec::new();
    let mut next = 0;
    for bit in 0..ncols as u32 {
        let mask = 1u64 << bit;
        let Some(p) = (next..system.len()).find(|&i| system[i].0 & mask != 0) else {
            continue;
        };
        system.swap(next, p);
        let pivot = system[next];
        for (i, row) in system.iter_mut().enumerate() {
            if i != next && row.0 & mask != 0 {
                row.0 ^= pivot.0;
                row.1 ^= pivot.1;
            }
        }
        pivots.push((bit, next));
        next += 1;
    }
    if system[next..].iter().any(|&(_, b)| b) {
        return Err(Error::Inconsistent);
    }
    let word = pivots
        .iter()
        .filter(|&&(_, row)| system[row].1)
        .fold(0u64, |acc, &(bit, _)| acc | (1u64 << bit));
    BinaryVector::from_word(word, ncols)
}

/// Smallest `v` with `v^T P g_i = s_i` for every generator.
pub fn solve_commutation(gens: &[BinaryVector], s: &BinaryVector) -> Result<BinaryVector> {
    s.ensure_len(gens.len())?;
    let len = match gens.first() {
        Some(g) => g.len(),
        None => return Err(Error::Empty("generator list")),
    };
    let rows: Vec<BinaryVector> = gens.iter().map(BinaryVector::swap_halves).collect();
    solve_min(&rows, s, len)
}

fn validate_isotropic_generators(gens: &[BinaryVector], n: usize, m: usize) -> Result<()> {
    if m > n || gens.len() != n - m {
        return Err(Error::InvalidPairCounts { n, m });
    }
    for g in gens {
        g.ensure_len(2 * n)?;
    }
    Subspace::independent_span(2 * n, gens)?;
    for (i, a) in gens.iter().enumerate() {
        for (j, b) in gens.iter().enumerate().skip(i + 1) {
            if sympl_inner(a, b)? {
                return Err(Error::NonCommutingGenerators(i, j));
            }
        }
    }
    Ok(())
}

/// Completes commuting generators to a symplectic matrix `B` whose
/// columns `m..n` are the generators, trying unit vectors in order.
pub fn complete_to_symplectic(gens: &[BinaryVector], n: usize, m: usize) -> Result<BinaryMatrix> {
    let order = (0..2 * n)
        .map(|i| BinaryVector::unit(2 * n, i))
        .collect::<Result<Vec<_>>>()?;
    complete_to_symplectic_with_order(gens, n, m, &order)
}

/// Symplectic Gram-Schmidt with a caller-chosen candidate sequence.
///
/// Column layout of the result (0-based): `m + i` holds `g_i`, `n + m + i`
/// its partner `h_i` with `<h_i, g_j> = delta_ij`; the first `m` hyperbolic
/// pairs fill columns `j` and `n + j`. Distinct candidate orders give
/// distinct completions of the same generators.
pub fn complete_to_symplectic_with_order(
    gens: &[BinaryVector],
    n: usize,
    m: usize,
    candidates: &[BinaryVector],
) -> Result<BinaryMatrix> {
    validate_isotropic_generators(gens, n, m)?;
    let len = 2 * n;
    let k = n - m;

    let partner_rows: Vec<BinaryVector> = gens.iter().map(BinaryVector::swap_halves).collect();
    let mut partners = (0..k)
        .map(|i| {
            let e = BinaryVector::unit(k, i)?;
            solve_min(&partner_rows, &e, len).map(|h| h.word())
        })
        .collect::<Result<Vec<u64>>>()?;
    for j in 0..k {
        for i in 0..j {
            if sympl_word(partners[j], partners[i], n) {
                partners[j] ^= gens[i].word();
            }
        }
    }

    let mut pairs: Vec<(u64, u64)> = gens
        .iter()
        .map(|g| g.word())
        .zip(partners.iter().copied())
        .collect();
    let project = |x: u64, pairs: &[(u64, u64)]| {
        pairs.iter().fold(x, |acc, &(e, f)| {
            let mut acc = acc;
            if sympl_word(x, f, n) {
                acc ^= e;
            }
            if sympl_word(x, e, n) {
                acc ^= f;
            }
            acc
        })
    };
    let mut kept: Vec<(u64, u64)> = Vec::with_capacity(m);
    while kept.len() < m {
        let e = candidates
            .iter()
            .map(|c| project(c.word(), &pairs))
            .find(|&w| w != 0)
            .ok_or_else(|| Error::Malformed("candidate vectors do not span the space".into()))?;
        let f = candidates
            .iter()
            .map(|c| project(c.word(), &pairs))
            .find(|&w| sympl_word(w, e, n))
            .ok_or_else(|| Error::Malformed("candidate vectors do not span the space".into()))?;
        pairs.push((e, f));
        kept.push((e, f));
    }

    let mut columns = vec![0u64; len];
    for (j, &(e, f)) in kept.iter().enumerate() {
        columns[j] = e;
        columns[n + j] = f;
    }
    for (i, (g, h)) in gens.iter().zip(&partners).enumerate() {
        columns[m + i] = g.word();
        columns[n + m + i] = *h;
    }
    let columns: Vec<BinaryVector> = columns
        .into_iter()
        .map(|w| BinaryVector::from_word_unchecked(w, len))
        .collect();
    let b = BinaryMatrix::from_columns(&columns)?;
    debug_assert!(is_symplectic(&b)?);
    Ok(b)
}
