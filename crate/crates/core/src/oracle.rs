//! Dense complex-matrix simulation of small Bell-diagonal systems.
//!
//! Used only as an independent check of the label-level engines. Qubit
//! order is Alice's qubits `1..n` followed by Bob's qubits `1..n`, qubit 1
//! most significant; Bell pair `i` spans Alice-`i` and Bob-`i`. Global
//! phases are never compared: checks go through projectors, expectation
//! values and probabilities.

use num_complex::Complex64;

use crate::bell::BellDiagonal;
use crate::error::{Error, Result};
use crate::gf2::BinaryVector;

pub const MAX_ORACLE_PAIRS: usize = 4;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim));
        Self {
            dim,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * rhs.data[k * d + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        let d = self.dim * rhs.dim;
        let mut out = Self::zeros(d);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.get(i, j);
                for k in 0..rhs.dim {
                    for l in 0..rhs.dim {
                        out.data[(i * rhs.dim + k) * d + j * rhs.dim + l] = a * rhs.get(k, l);
                    }
                }
            }
        }
        out
    }

    /// Element-wise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(Complex64::conj).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j];
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn single_qubit_pauli(phase: bool, parity: bool) -> CMatrix {
    match (phase, parity) {
        (false, false) => CMatrix::identity(2),
        (false, true) => CMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]),
        (true, false) => CMatrix::from_rows(&[&[ONE, ZERO], &[ZERO, -ONE]]),
        (true, true) => CMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]]),
    }
}

/// `sigma_a` for a label of length `2k`: the Kronecker product over
/// qubits of `sigma_(a_i, a_{k+i})`, with `sigma_11 = sigma_y`.
pub fn pauli_matrix(a: &BinaryVector) -> CMatrix {
    let k = a.len() / 2;
    (0..k).fold(CMatrix::identity(1), |acc, i| {
        acc.kron(&single_qubit_pauli(a.get(i), a.get(k + i)))
    })
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_ORACLE_PAIRS {
        return Err(Error::OracleTooLarge(n));
    }
    Ok(())
}

/// `|B_x> = (sigma_x (x) I) |B_0>^{(x) n}`; amplitude of `|i>_A |j>_B` is
/// `<i|sigma_x|j> / sqrt(2^n)`.
pub fn bell_vector(x: &BinaryVector) -> Result<Vec<Complex64>> {
    let n = x.len() / 2;
    check_size(n)?;
    let sigma = pauli_matrix(x);
    let norm = Complex64::new((1u64 << n) as f64, 0.0).sqrt();
    Ok(sigma.data.iter().map(|a| a / norm).collect())
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(Complex64::norm_sqr).sum()
}

/// `rho = sum_x p_x |B_x><B_x|`.
pub fn density_matrix(state: &BellDiagonal<f64>) -> Result<CMatrix> {
    let n = state.num_pairs();
    check_size(n)?;
    let d = 1usize << (2 * n);
    let mut rho = CMatrix::zeros(d);
    for (x, &p) in state.probs().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let b = bell_vector(&BinaryVector::from_word(x as u64, 2 * n)?)?;
        for i in 0..d {
            if b[i] == ZERO {
                continue;
            }
            for j in 0..d {
                rho.data[i * d + j] += p * b[i] * b[j].conj();
            }
        }
    }
    Ok(rho)
}

/// Matrix whose columns are the Bell vectors of `m` pairs, in label order.
fn bell_basis(m: usize) -> Result<CMatrix> {
    let d = 1usize << (2 * m);
    let mut basis = CMatrix::zeros(d);
    for y in 0..d {
        let b = bell_vector(&BinaryVector::from_word(y as u64, 2 * m)?)?;
        for (i, amp) in b.into_iter().enumerate() {
            basis.data[i * d + y] = amp;
        }
    }
    Ok(basis)
}

/// One parity-measurement outcome of the dense simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct ParityBranch {
    pub t: BinaryVector,
    pub prob: f64,
    /// Bell-basis diagonal of the kept pairs' state, normalized.
    pub conditional: Vec<f64>,
    /// Largest off-diagonal Bell-basis entry of the kept pairs' state.
    pub max_off_diagonal: f64,
}

/// Measures both qubits of each of the last `n - m` pairs in the
/// computational basis and groups outcomes by parity pattern
/// `t_i = alice_i XOR bob_i`. Returns every `t`, including impossible ones
/// (with probability zero and an empty conditional).
pub fn simulate_parity_measurement(state: &BellDiagonal<f64>, m: usize) -> Result<Vec<ParityBranch>> {
    let n = state.num_pairs();
    check_size(n)?;
    if m > n {
        return Err(Error::InvalidPairCounts { n, m });
    }
    let k = n - m;
    let rho = density_matrix(state)?;
    let full = 1usize << n;
    let kept_side = 1usize << m;
    let kept_dim = kept_side * kept_side;
    let basis = bell_basis(m)?;
    let index = |ak: usize, alpha: usize, bk: usize, beta: usize| {
        ((ak << k) | alpha) * full + ((bk << k) | beta)
    };

    let mut branches = Vec::with_capacity(1 << k);
    for t in 0..1usize << k {
        let mut kept = CMatrix::zeros(kept_dim);
        for alpha in 0..1usize << k {
            let beta = alpha ^ t;
            for r in 0..kept_dim {
                let (ak, bk) = (r / kept_side, r % kept_side);
                for c in 0..kept_dim {
                    let (ak2, bk2) = (c / kept_side, c % kept_side);
                    kept.data[r * kept_dim + c] +=
                        rho.get(index(ak, alpha, bk, beta), index(ak2, alpha, bk2, beta));
                }
            }
        }
        let prob = kept.trace().re;
        let t_vec = BinaryVector::from_word(t as u64, k)?;
        if prob <= 0.0 {
            branches.push(ParityBranch {
                t: t_vec,
                prob: 0.0,
                conditional: Vec::new(),
                max_off_diagonal: 0.0,
            });
            continue;
        }
        let in_bell = basis.adjoint().mul(&kept).mul(&basis).scale(Complex64::new(1.0 / prob, 0.0));
        let conditional = (0..kept_dim).map(|y| in_bell.get(y, y).re).collect();
        let max_off_diagonal = (0..kept_dim)
            .flat_map(|i| (0..kept_dim).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| in_bell.get(i, j).norm())
            .fold(0.0, f64::max);
        branches.push(ParityBranch {
            t: t_vec,
            prob,
            conditional,
            max_off_diagonal,
        });
    }
    Ok(branches)
}

/// Joint distribution of Alice's outcomes `a` and Bob's outcomes `b`
/// (bit `i` set means eigenvalue `-1` for generator `i`).
#[derive(Clone, Debug, PartialEq)]
pub struct SyndromeJoint {
    k: usize,
    probs: Vec<f64>,
}

impl SyndromeJoint {
    pub fn num_generators(&self) -> usize {
        self.k
    }

    pub fn prob(&self, a: usize, b: usize) -> f64 {
        self.probs[(a << self.k) | b]
    }

    pub fn alice_marginal(&self) -> Vec<f64> {
        (0..1usize << self.k)
            .map(|a| (0..1usize << self.k).map(|b| self.prob(a, b)).sum())
            .collect()
    }

    /// Distribution of `s = a XOR b`.
    pub fn difference_distribution(&self) -> Vec<f64> {
        let mut out = vec![0.0; 1 << self.k];
        for a in 0..1usize << self.k {
            for b in 0..1usize << self.k {
                out[a ^ b] += self.prob(a, b);
            }
        }
        out
    }

    /// Largest `|Pr(a, s) - Pr(a) Pr(s)|`; zero when `a` and `s` are
    /// independent.
    pub fn dependence(&self) -> f64 {
        let pa = self.alice_marginal();
        let ps = self.difference_distribution();
        let mut worst: f64 = 0.0;
        for (a, qa) in pa.iter().enumerate() {
            for (s, qs) in ps.iter().enumerate() {
                worst = worst.max((self.prob(a, a ^ s) - qa * qs).abs());
            }
        }
        worst
    }
}

/// Applies `op (x) I` (Alice) to a `2n`-qubit vector.
fn apply_alice(op: &CMatrix, psi: &[Complex64]) -> Vec<Complex64> {
    let d = op.dim();
    let mut out = vec![ZERO; psi.len()];
    for i in 0..d {
        for k in 0..d {
            let a = op.get(i, k);
            if a == ZERO {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += a * psi[k * d + j];
            }
        }
    }
    out
}

/// Applies `I (x) op` (Bob) to a `2n`-qubit vector.
fn apply_bob(op: &CMatrix, psi: &[Complex64]) -> Vec<Complex64> {
    let d = op.dim();
    let mut out = vec![ZERO; psi.len()];
    for i in 0..d {
        for j in 0..d {
            out[i * d + j] = (0..d).map(|l| op.get(j, l) * psi[i * d + l]).sum();
        }
    }
    out
}

/// `(psi +- op psi) / 2`, the two projections of a +-1 observable.
fn project(psi: &[Complex64], op_psi: &[Complex64]) -> [Vec<Complex64>; 2] {
    let plus = psi.iter().zip(op_psi).map(|(a, b)| (a + b) * 0.5).collect();
    let minus = psi.iter().zip(op_psi).map(|(a, b)| (a - b) * 0.5).collect();
    [plus, minus]
}

/// Alice measures `sigma*_{g_i}` on her half and Bob `sigma_{g_i}` on his,
/// generator by generator, with projectors `(I +- O) / 2`. The mixture is
/// simulated component-wise over its Bell-product decomposition.
pub fn simulate_syndrome_measurement(
    state: &BellDiagonal<f64>,
    gens: &[BinaryVector],
) -> Result<SyndromeJoint> {
    let n = state.num_pairs();
    check_size(n)?;
    for g in gens {
        g.ensure_len(2 * n)?;
    }
    let k = gens.len();
    let alice_ops: Vec<CMatrix> = gens.iter().map(|g| pauli_matrix(g).conj()).collect();
    let bob_ops: Vec<CMatrix> = gens.iter().map(pauli_matrix).collect();
    let mut probs = vec![0.0; 1 << (2 * k)];
    for (x, &p) in state.probs().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let psi = bell_vector(&BinaryVector::from_word(x as u64, 2 * n)?)?;
        // (a bits, b bits, unnormalized post-measurement vector)
        let mut nodes = vec![(0usize, 0usize, psi)];
        for i in 0..k {
            let mut next = Vec::with_capacity(nodes.len() * 2);
            for (a, b, v) in nodes {
                let proj = project(&v, &apply_alice(&alice_ops[i], &v));
                for (bit, va) in proj.into_iter().enumerate() {
                    if norm_sqr(&va) < 1e-15 {
                        continue;
                    }
                    let proj_b = project(&va, &apply_bob(&bob_ops[i], &va));
                    for (bit_b, vb) in proj_b.into_iter().enumerate() {
                        if norm_sqr(&vb) < 1e-15 {
                            continue;
                        }
                        next.push(((a << 1) | bit, (b << 1) | bit_b, vb));
                    }
                }
            }
            nodes = next;
        }
        for (a, b, v) in nodes {
            probs[(a << k) | b] += p * norm_sqr(&v);
        }
    }
    Ok(SyndromeJoint { k, probs })
}

/// `<psi| (op_A (x) op_B) |psi>`.
pub fn local_expectation(op_alice: &CMatrix, op_bob: &CMatrix, psi: &[Complex64]) -> Complex64 {
    inner(psi, &apply_bob(op_bob, &apply_alice(op_alice, psi)))
}

/// `(op_A (x) op_B) |psi>`.
pub fn apply_local(op_alice: &CMatrix, op_bob: &CMatrix, psi: &[Complex64]) -> Vec<Complex64> {
    apply_bob(op_bob, &apply_alice(op_alice, psi))
}

/// `|<a|b>|^2`, phase-insensitive overlap.
pub fn overlap(a: &[Complex64], b: &[Complex64]) -> f64 {
    inner(a, b).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::PairDistribution;

    fn v(s: &str) -> BinaryVector {
        s.parse().unwrap()
    }

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn single_qubit_paulis() {
        assert_eq!(pauli_matrix(&v("00")), CMatrix::identity(2));
        let y = pauli_matrix(&v("11"));
        assert_eq!(y.get(0, 1), -I);
        assert_eq!(y.get(1, 0), I);
    }

    #[test]
    fn bell_vectors_one_pair() {
        let phi = bell_vector(&v("00")).unwrap();
        let expect = [H, 0.0, 0.0, H];
        for (a, e) in phi.iter().zip(expect) {
            assert!((a - Complex64::new(e, 0.0)).norm() < 1e-15);
        }
        let psi = bell_vector(&v("01")).unwrap();
        let expect = [0.0, H, H, 0.0];
        for (a, e) in psi.iter().zip(expect) {
            assert!((a - Complex64::new(e, 0.0)).norm() < 1e-15);
        }
        // Psi- up to a global phase
        let singlet = [ZERO, Complex64::new(H, 0.0), Complex64::new(-H, 0.0), ZERO];
        assert!((overlap(&bell_vector(&v("11")).unwrap(), &singlet) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bell_vectors_are_orthonormal() {
        for n in 1..=3 {
            let vecs: Vec<_> = (0..1u64 << (2 * n))
                .map(|x| bell_vector(&BinaryVector::from_word(x, 2 * n).unwrap()).unwrap())
                .collect();
            for (i, a) in vecs.iter().enumerate() {
                for (j, b) in vecs.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((inner(a, b).norm() - expected).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn werner_parity_measurement() {
        let s = BellDiagonal::from_pairs(&vec![PairDistribution::werner(0.75).unwrap(); 2]).unwrap();
        // Oracle sees the state after the bilateral CNOT relabeling.
        let a = crate::gf2::BinaryMatrix::from_row_strings(&["1100", "0100", "0010", "0011"]).unwrap();
        let relabeled = s.permute(&a, &v("0000")).unwrap();
        let out = simulate_parity_measurement(&relabeled, 1).unwrap();
        assert!((out[0].prob - 13.0 / 18.0).abs() < 1e-12);
        let expect = [41.0 / 52.0, 1.0 / 52.0, 9.0 / 52.0, 1.0 / 52.0];
        for (c, e) in out[0].conditional.iter().zip(expect) {
            assert!((c - e).abs() < 1e-12);
        }
        assert!(out[0].max_off_diagonal < 1e-12);
        assert!((out[1].prob - 5.0 / 18.0).abs() < 1e-12);
    }

    #[test]
    fn pure_input_parity() {
        let s = BellDiagonal::<f64>::delta(2, &v("0000")).unwrap();
        let out = simulate_parity_measurement(&s, 1).unwrap();
        assert!((out[0].prob - 1.0).abs() < 1e-12);
        assert_eq!(out[1].prob, 0.0);
        assert!((out[0].conditional[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zz_syndrome_measurement() {
        let s = BellDiagonal::from_pairs(&vec![PairDistribution::werner(0.75).unwrap(); 2]).unwrap();
        let joint = simulate_syndrome_measurement(&s, &[v("1100")]).unwrap();
        let diff = joint.difference_distribution();
        assert!((diff[0] - 13.0 / 18.0).abs() < 1e-12);
        let alice = joint.alice_marginal();
        assert!((alice[0] - 0.5).abs() < 1e-12 && (alice[1] - 0.5).abs() < 1e-12);
        assert!(joint.dependence() < 1e-12);

        let pure = BellDiagonal::<f64>::delta(2, &v("0000")).unwrap();
        let joint = simulate_syndrome_measurement(&pure, &[v("1100")]).unwrap();
        assert!((joint.difference_distribution()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn size_cap() {
        let s = BellDiagonal::<f64>::uniform(5).unwrap();
        assert_eq!(simulate_parity_measurement(&s, 1), Err(Error::OracleTooLarge(5)));
    }
}
