//! Translation between stabilizer generators and symplectic permutations,
//! and instance-wise verification that both engines agree.
//!
//! Completing the generators to a symplectic `B` with `B e_{m+i} = g_i`
//! gives the permutation `A = B^-1 = P B^T P`, whose subspace `S` (rows
//! `n+m..2n` of `A P`) is exactly `C = span(g)`. Branch `t` of the
//! permutation protocol then corresponds to syndrome `s = t`, and the
//! logical label `y` of the coset `C + B ybar` is the same label the
//! permutation engine reports.

use rayon::prelude::*;
use serde::Serialize;

use crate::bell::BellDiagonal;
use crate::code::{self, StabilizerProtocol, SyndromeBranch};
use crate::error::Result;
use crate::gf2::{coset_sum, symplectic_inverse, sympl_inner, BinaryMatrix, BinaryVector, Coset};
use crate::perm::{self, embed_ybar, PermProtocol, ProtocolOutcome};
use crate::random;
use crate::scalar::Probability;

/// Agreement tolerance between the two engines.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-12;

pub fn permutation_from_stabilizer(proto: &StabilizerProtocol) -> PermProtocol {
    permutation_from_basis(proto, &proto.logical_basis()).expect("logical basis is symplectic")
}

/// `A = P B^T P` for a symplectic completion `B` of the generators.
pub fn permutation_from_basis(proto: &StabilizerProtocol, basis: &BinaryMatrix) -> Result<PermProtocol> {
    PermProtocol::linear(proto.n(), proto.m(), symplectic_inverse(basis)?)
}

/// Generators are rows `n+m..2n` of `A P`.
pub fn stabilizer_from_permutation(proto: &PermProtocol) -> Result<StabilizerProtocol> {
    let (n, m) = (proto.n(), proto.m());
    let gens = (n + m..2 * n)
        .map(|i| proto.matrix().row(i).swap_halves())
        .collect();
    StabilizerProtocol::new(n, m, gens)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchComparison {
    pub t: BinaryVector,
    pub s: BinaryVector,
    pub perm_probability: f64,
    pub code_probability: f64,
    pub perm_fidelity: f64,
    pub code_fidelity: f64,
    pub perm_paper_fidelity: f64,
    pub code_paper_fidelity: f64,
    /// Largest entry-wise difference of the two output distributions.
    pub output_discrepancy: f64,
    /// `C + B abar` and `C + u` coincide, or carry equal (maximal) weight.
    pub coset_match: bool,
    /// `B 0bar` lies in `C_perp + v`, i.e. has syndrome `s`.
    pub offset_match: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub n: usize,
    pub m: usize,
    pub generators: Vec<BinaryVector>,
    /// `S == C`.
    pub subspaces_match: bool,
    /// Both engines produced the same set of non-zero branches.
    pub branches_match: bool,
    pub coset_match: bool,
    pub max_discrepancy: f64,
    pub branches: Vec<BranchComparison>,
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        self.subspaces_match
            && self.branches_match
            && self.coset_match
            && self.branches.iter().all(|b| b.offset_match)
            && self.max_discrepancy <= EQUIVALENCE_TOLERANCE
    }
}

pub fn verify_equivalence<T: Probability>(
    state: &BellDiagonal<T>,
    proto: &StabilizerProtocol,
    threshold: &T,
) -> Result<EquivalenceReport> {
    verify_equivalence_with_basis(state, proto, &proto.logical_basis(), threshold)
}

/// Runs both engines with the correspondence fixed by `basis` and
/// compares them branch by branch. Mismatches are reported, not raised.
pub fn verify_equivalence_with_basis<T: Probability>(
    state: &BellDiagonal<T>,
    proto: &StabilizerProtocol,
    basis: &BinaryMatrix,
    threshold: &T,
) -> Result<EquivalenceReport> {
    let (n, m) = (proto.n(), proto.m());
    let perm_proto = permutation_from_basis(proto, basis)?;
    let perm_out = perm::run(state, &perm_proto, threshold)?;
    let code_out = code::run_with_basis(state, proto, basis, threshold)?;
    let c = proto.code_subspace();

    let branches_match = perm_out.len() == code_out.len()
        && perm_out.iter().zip(&code_out).all(|(p, c)| p.t == c.s);

    let mut branches = Vec::new();
    let mut max_discrepancy: f64 = if branches_match { 0.0 } else { f64::INFINITY };
    for (p, q) in perm_out.iter().zip(&code_out) {
        let cmp = compare_branch(state, proto, basis, &c, p, q)?;
        max_discrepancy = [
            max_discrepancy,
            (cmp.perm_probability - cmp.code_probability).abs(),
            (cmp.perm_fidelity - cmp.code_fidelity).abs(),
            (cmp.perm_paper_fidelity - cmp.code_paper_fidelity).abs(),
            cmp.output_discrepancy,
        ]
        .into_iter()
        .fold(0.0, f64::max);
        branches.push(cmp);
    }
    Ok(EquivalenceReport {
        n,
        m,
        generators: proto.generators().to_vec(),
        subspaces_match: perm_proto.subspace_s() == c,
        branches_match,
        coset_match: branches.iter().all(|b| b.coset_match),
        max_discrepancy,
        branches,
    })
}

fn compare_branch<T: Probability>(
    state: &BellDiagonal<T>,
    proto: &StabilizerProtocol,
    basis: &BinaryMatrix,
    c: &crate::gf2::Subspace,
    p: &ProtocolOutcome<T>,
    q: &SyndromeBranch<T>,
) -> Result<BranchComparison> {
    let (n, m) = (proto.n(), proto.m());
    let abar = embed_ybar(&p.correction, &p.t, n, m)?;
    let perm_coset = Coset::new(c.clone(), basis.mul_vec(&abar)?)?;
    let code_coset = Coset::new(c.clone(), q.u)?;
    let coset_match = perm_coset == code_coset
        || (coset_sum(state, &perm_coset)?.to_f64_lossy()
            - coset_sum(state, &code_coset)?.to_f64_lossy())
        .abs()
            <= EQUIVALENCE_TOLERANCE;

    let zero_bar = embed_ybar(&BinaryVector::zeros(2 * m)?, &p.t, n, m)?;
    let b_zero = basis.mul_vec(&zero_bar)?;
    let offset_match = proto
        .generators()
        .iter()
        .enumerate()
        .map(|(i, g)| Ok(sympl_inner(&b_zero, g)? == q.s.get(i)))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|ok| ok);

    Ok(BranchComparison {
        t: p.t,
        s: q.s,
        perm_probability: p.prob.to_f64_lossy(),
        code_probability: q.prob.to_f64_lossy(),
        perm_fidelity: p.fidelity.to_f64_lossy(),
        code_fidelity: q.fidelity.to_f64_lossy(),
        perm_paper_fidelity: p.paper_fidelity.to_f64_lossy(),
        code_paper_fidelity: q.paper_fidelity.to_f64_lossy(),
        output_discrepancy: p.output.max_abs_diff(&q.output),
        coset_match,
        offset_match,
    })
}

/// One randomly drawn instance of a verification batch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RandomCase {
    pub index: u64,
    pub input_fidelity: f64,
    pub report: EquivalenceReport,
}

/// Verifies `count` random instances: pair counts cycle through
/// `pair_counts`, `m` is uniform in `0..n`, generators are random isotropic
/// and the input is a random distribution. Instance `i` draws from stream
/// `i` of `seed`, so the result does not depend on the thread count.
pub fn verify_random_instances(seed: u64, count: u64, pair_counts: &[usize]) -> Result<Vec<RandomCase>> {
    use rand::Rng;
    if pair_counts.is_empty() {
        return Err(crate::Error::Empty("pair count list"));
    }
    (0..count)
        .into_par_iter()
        .map(|index| {
            let mut rng = random::instance_rng(seed, index);
            let n = pair_counts[(index % pair_counts.len() as u64) as usize];
            let m = rng.random_range(0..n);
            let gens = random::random_isotropic_generators(n, n - m, &mut rng);
            let state = random::random_distribution(n, &mut rng);
            let proto = StabilizerProtocol::new(n, m, gens)?;
            let input_fidelity = state.fidelity();
            let report = verify_equivalence(&state, &proto, &input_fidelity)?;
            Ok(RandomCase {
                index,
                input_fidelity,
                report,
            })
        })
        .collect()
}
