//! Stabilizer-code-based distillation.
//!
//! Alice measures `sigma*_{g_i}` and Bob `sigma_{g_i}` for commuting
//! generators `g_1..g_{n-m}`. Only the difference of their outcomes, the
//! syndrome `s`, carries information: it selects the coset `C_perp + v` of
//! the symplectic complement of `C = span(g)`, where `v^T P g_i = s_i`.
//! Bob then applies the recovery `sigma_u` for the coset `C + u` of largest
//! weight inside `C_perp + v`.

use serde::{Deserialize, Serialize};

use crate::bell::BellDiagonal;
use crate::error::{Error, Result};
use crate::gf2::{
    complete_to_symplectic, coset_sum, is_symplectic, solve_commutation, sympl_inner,
    symplectic_inverse, BinaryMatrix, BinaryVector, Coset, Subspace,
};
use crate::pauli;
use crate::scalar::Probability;

/// Stabilizer with `n - m` independent, commuting generators on `n` pairs.
///
/// JSON form: `{"n": 2, "m": 1, "generators": ["ZZ"]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "StabilizerFile", into = "StabilizerFile")]
pub struct StabilizerProtocol {
    n: usize,
    m: usize,
    generators: Vec<BinaryVector>,
}

#[derive(Serialize, Deserialize)]
struct StabilizerFile {
    n: usize,
    m: usize,
    generators: Vec<String>,
}

impl TryFrom<StabilizerFile> for StabilizerProtocol {
    type Error = Error;

    fn try_from(f: StabilizerFile) -> Result<Self> {
        let generators = f
            .generators
            .iter()
            .map(|g| pauli::parse_pauli_string(g))
            .collect::<Result<Vec<_>>>()?;
        Self::new(f.n, f.m, generators)
    }
}

impl From<StabilizerProtocol> for StabilizerFile {
    fn from(p: StabilizerProtocol) -> Self {
        Self {
            n: p.n,
            m: p.m,
            generators: p.pauli_strings(),
        }
    }
}

impl StabilizerProtocol {
    pub fn new(n: usize, m: usize, generators: Vec<BinaryVector>) -> Result<Self> {
        if n == 0 || m > n || generators.len() != n - m {
            return Err(Error::InvalidPairCounts { n, m });
        }
        for g in &generators {
            g.ensure_len(2 * n)?;
        }
        Subspace::independent_span(2 * n, &generators)?;
        for (i, a) in generators.iter().enumerate() {
            for (j, b) in generators.iter().enumerate().skip(i + 1) {
                if sympl_inner(a, b)? {
                    return Err(Error::NonCommutingGenerators(i, j));
                }
            }
        }
        Ok(Self { n, m, generators })
    }

    /// Generators given as Pauli strings such as `"ZZ"`; `m` follows from
    /// the number of strings.
    pub fn from_pauli_strings<S: AsRef<str>>(n: usize, strings: &[S]) -> Result<Self> {
        let generators = strings
            .iter()
            .map(|s| pauli::parse_pauli_string(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        if strings.len() > n {
            return Err(Error::InvalidPairCounts {
                n,
                m: 0,
            });
        }
        Self::new(n, n - strings.len(), generators)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn generators(&self) -> &[BinaryVector] {
        &self.generators
    }

    pub fn pauli_strings(&self) -> Vec<String> {
        self.generators.iter().map(pauli::to_pauli_string).collect()
    }

    /// `C`, the span of the generators.
    pub fn code_subspace(&self) -> Subspace {
        Subspace::span(2 * self.n, &self.generators).expect("validated lengths")
    }

    /// Deterministic symplectic completion fixing the logical labels.
    pub fn logical_basis(&self) -> BinaryMatrix {
        complete_to_symplectic(&self.generators, self.n, self.m).expect("validated generators")
    }

    /// Some `v` with `v^T P g_i = s_i`, the smallest one.
    pub fn syndrome_offset(&self, s: &BinaryVector) -> Result<BinaryVector> {
        s.ensure_len(self.generators.len())?;
        if self.generators.is_empty() {
            return BinaryVector::zeros(2 * self.n);
        }
        solve_commutation(&self.generators, s)
    }
}

/// `s_i = e^T P g_i`.
pub fn syndrome_of_error(gens: &[BinaryVector], e: &BinaryVector) -> Result<BinaryVector> {
    let bits = gens
        .iter()
        .map(|g| sympl_inner(e, g))
        .collect::<Result<Vec<bool>>>()?;
    BinaryVector::from_bits(&bits)
}

/// Probability of every syndrome, in increasing order of `s`.
pub fn syndrome_distribution<T: Probability>(
    state: &BellDiagonal<T>,
    proto: &StabilizerProtocol,
) -> Result<Vec<(BinaryVector, T)>> {
    check_state(state, proto)?;
    let c_perp = proto.code_subspace().orthogonal_complement()?;
    let k = proto.generators.len();
    (0..1u64 << k)
        .map(|s| {
            let s = BinaryVector::from_word_unchecked(s, k);
            let coset = Coset::new(c_perp.clone(), proto.syndrome_offset(&s)?)?;
            Ok((s, coset_sum(state, &coset)?))
        })
        .collect()
}

fn check_state<T: Probability>(state: &BellDiagonal<T>, proto: &StabilizerProtocol) -> Result<()> {
    if state.num_pairs() != proto.n {
        return Err(Error::LengthMismatch {
            expected: proto.n,
            found: state.num_pairs(),
        });
    }
    Ok(())
}

/// One syndrome branch of the code-based protocol.
#[derive(Clone, Debug, PartialEq)]
pub struct SyndromeBranch<T> {
    pub s: BinaryVector,
    pub prob: T,
    /// Smallest vector with the syndrome's commutation relations.
    pub v: BinaryVector,
    /// Recovery: smallest element of the heaviest coset `C + u` in `C_perp + v`.
    pub u: BinaryVector,
    /// Label of the recovery coset in the logical basis of the kept pairs.
    pub logical_correction: BinaryVector,
    /// Kept pairs before recovery, labeled through the logical basis.
    pub output: BellDiagonal<T>,
    pub fidelity: T,
    /// Coset ratio with the `2^{n-m}` prefactor kept.
    pub paper_fidelity: T,
    pub accepted: bool,
}

struct CosetChoice<T> {
    weight: T,
    rep: BinaryVector,
    label: BinaryVector,
}

struct CodeGeometry<'a> {
    proto: &'a StabilizerProtocol,
    c: Subspace,
    c_perp: Subspace,
    /// Basis of a complement of `C` inside `C_perp`, of dimension `2m`.
    complement: Vec<u64>,
    basis_inverse: BinaryMatrix,
}

impl<'a> CodeGeometry<'a> {
    fn new(proto: &'a StabilizerProtocol, basis: &BinaryMatrix) -> Result<Self> {
        let (n, m) = (proto.n, proto.m);
        if basis.nrows() != 2 * n || basis.ncols() != 2 * n || !is_symplectic(basis)? {
            return Err(Error::Malformed("logical basis must be a 2n x 2n symplectic matrix".into()));
        }
        for (i, g) in proto.generators.iter().enumerate() {
            if basis.column(m + i) != *g {
                return Err(Error::Malformed(format!(
                    "logical basis column {} is not generator {i}",
                    m + i
                )));
            }
        }
        let c = proto.code_subspace();
        let c_perp = c.orthogonal_complement()?;
        let complement = c
            .complement_in(&c_perp)?
            .iter()
            .map(BinaryVector::word)
            .collect();
        Ok(Self {
            proto,
            c,
            c_perp,
            complement,
            basis_inverse: symplectic_inverse(basis)?,
        })
    }

    /// Every coset of `C` inside `C_perp + v`, indexed by logical label.
    fn cosets<T: Probability>(
        &self,
        state: &BellDiagonal<T>,
        s: &BinaryVector,
        v: &BinaryVector,
    ) -> Result<Vec<CosetChoice<T>>> {
        let (n, m) = (self.proto.n, self.proto.m);
        let k = n - m;
        let mut slots: Vec<Option<CosetChoice<T>>> = (0..1usize << (2 * m)).map(|_| None).collect();
        for r in crate::gf2::gray_walk(v.word(), &self.complement) {
            let rep = BinaryVector::from_word_unchecked(r, 2 * n);
            let coset = Coset::new(self.c.clone(), rep)?;
            // B^-1 maps C_perp + v onto labels whose measured parities are s.
            let z = self.basis_inverse.mul_vec(&rep)?;
            if z.parity_word() & crate::gf2::low_mask(k) != s.word() {
                return Err(Error::Malformed("logical basis inconsistent with syndrome".into()));
            }
            let label = BinaryVector::from_halves(z.phase_word() >> k, z.parity_word() >> k, m)?;
            let slot = &mut slots[label.index()];
            if slot.is_some() {
                return Err(Error::Malformed("logical labels are not a bijection".into()));
            }
            *slot = Some(CosetChoice {
                weight: coset_sum(state, &coset)?,
                rep: coset.representative(),
                label,
            });
        }
        Ok(slots.into_iter().map(|c| c.expect("2^{2m} cosets fill every label")).collect())
    }
}

fn heaviest<T: Probability>(cosets: &[CosetChoice<T>]) -> &CosetChoice<T> {
    cosets
        .iter()
        .fold(&cosets[0], |best, c| {
            if c.weight > best.weight || (c.weight == best.weight && c.rep < best.rep) {
                c
            } else {
                best
            }
        })
}

/// Recovery vector for syndrome `s`.
pub fn optimal_recovery<T: Probability>(
    state: &BellDiagonal<T>,
    proto: &StabilizerProtocol,
    s: &BinaryVector,
) -> Result<BinaryVector> {
    check_state(state, proto)?;
    let geometry = CodeGeometry::new(proto, &proto.logical_basis())?;
    let v = proto.syndrome_offset(s)?;
    let outer = Coset::new(geometry.c_perp.clone(), v)?;
    if coset_sum(state, &outer)?.is_zero() {
        return Err(Error::ImpossibleBranch(s.to_string()));
    }
    Ok(heaviest(&geometry.cosets(state, s, &v)?).rep)
}

/// Runs the code-based protocol with the default logical basis.
pub fn run<T: Probability>(
    state: &BellDiagonal<T>,
    proto: &StabilizerProtocol,
    threshold: &T,
) -> Result<Vec<SyndromeBranch<T>>> {
    run_with_basis(state, proto, &proto.logical_basis(), threshold)
}

/// Runs the code-based protocol, labeling kept pairs through the
/// symplectic matrix `basis` (columns `m..n` must be the generators).
pub fn run_with_basis<T: Probability>(
    state: &BellDiagonal<T>,
    proto: &StabilizerProtocol,
    basis: &BinaryMatrix,
    threshold: &T,
) -> Result<Vec<SyndromeBranch<T>>> {
    check_state(state, proto)?;
    let geometry = CodeGeometry::new(proto, basis)?;
    let k = proto.generators.len();
    let mut branches = Vec::new();
    for s in 0..1u64 << k {
        let s = BinaryVector::from_word_unchecked(s, k);
        let v = proto.syndrome_offset(&s)?;
        let prob = coset_sum(state, &Coset::new(geometry.c_perp.clone(), v)?)?;
        if prob.is_zero() {
            continue;
        }
        let cosets = geometry.cosets(state, &s, &v)?;
        let best = heaviest(&cosets);
        let fidelity = best.weight.clone() / prob.clone();
        let paper_fidelity = T::pow2(k) * best.weight.clone() / prob.clone();
        let output = BellDiagonal::new(
            proto.m,
            cosets.iter().map(|c| c.weight.clone() / prob.clone()).collect(),
        )?;
        branches.push(SyndromeBranch {
            u: best.rep,
            logical_correction: best.label,
            accepted: fidelity >= *threshold,
            s,
            prob,
            v,
            output,
            fidelity,
            paper_fidelity,
        });
    }
    Ok(branches)
}
