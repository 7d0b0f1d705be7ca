//! Permutation-based distillation.
//!
//! Alice and Bob relabel the `4^n` Bell products by an affine symplectic
//! map `x -> A x + b`, measure the parity of the last `n - m` pairs, and
//! keep the first `m`. For each parity pattern `t` the kept pairs are again
//! Bell diagonal; their weights are coset sums of the input:
//!
//! ```text
//! Pr(t)     = sum over S_perp + A^-1 0bar(t)  of p
//! cond_t(y) = sum over S      + A^-1 ybar(t)  of p  /  Pr(t)
//! ```
//!
//! where `S = A^-1 span{phase unit vectors of the measured pairs}` (the
//! span of rows `n+m..2n` of `A P`). A final local Pauli moves the
//! largest conditional weight onto `Phi+`.

use serde::{Deserialize, Serialize};

use crate::bell::{BellDiagonal, PairDistribution};
use crate::error::{Error, Result};
use crate::gf2::{
    coset_sum, is_symplectic, symplectic_inverse, BinaryMatrix, BinaryVector, Coset, Subspace,
};
use crate::scalar::Probability;

/// Affine symplectic relabeling with `m` of `n` pairs kept.
///
/// JSON form: `{"n": 2, "m": 1, "A": ["1100", ...], "b": "0000"}`; `b`
/// may be omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PermProtocolFile")]
pub struct PermProtocol {
    n: usize,
    m: usize,
    #[serde(rename = "A")]
    a: BinaryMatrix,
    b: BinaryVector,
}

#[derive(Deserialize)]
struct PermProtocolFile {
    n: usize,
    m: usize,
    #[serde(rename = "A")]
    a: BinaryMatrix,
    b: Option<BinaryVector>,
}

impl TryFrom<PermProtocolFile> for PermProtocol {
    type Error = Error;

    fn try_from(f: PermProtocolFile) -> Result<Self> {
        let b = match f.b {
            Some(b) => b,
            None => BinaryVector::zeros(2 * f.n)?,
        };
        Self::new(f.n, f.m, f.a, b)
    }
}

impl PermProtocol {
    pub fn new(n: usize, m: usize, a: BinaryMatrix, b: BinaryVector) -> Result<Self> {
        if m > n || n == 0 {
            return Err(Error::InvalidPairCounts { n, m });
        }
        if a.nrows() != 2 * n || a.ncols() != 2 * n {
            return Err(Error::NotSquareEven {
                rows: a.nrows(),
                cols: a.ncols(),
            });
        }
        b.ensure_len(2 * n)?;
        if !is_symplectic(&a)? {
            return Err(Error::NotSymplectic);
        }
        Ok(Self { n, m, a, b })
    }

    pub fn linear(n: usize, m: usize, a: BinaryMatrix) -> Result<Self> {
        Self::new(n, m, a, BinaryVector::zeros(2 * n)?)
    }

    /// Bilateral CNOT from pair 1 onto pair 2, keeping pair 1.
    pub fn bilateral_cnot() -> Self {
        let a = BinaryMatrix::from_row_strings(&["1100", "0100", "0010", "0011"])
            .expect("literal matrix");
        Self::linear(2, 1, a).expect("BCNOT is symplectic")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &BinaryMatrix {
        &self.a
    }

    pub fn offset(&self) -> &BinaryVector {
        &self.b
    }

    pub fn measured(&self) -> usize {
        self.n - self.m
    }

    /// Span of rows `n+m..2n` (0-based) of `A P`; always isotropic.
    pub fn subspace_s(&self) -> Subspace {
        let rows: Vec<BinaryVector> = (self.n + self.m..2 * self.n)
            .map(|i| self.a.row(i).swap_halves())
            .collect();
        Subspace::span(2 * self.n, &rows).expect("rows have length 2n")
    }
}

/// Places kept-pair label `y` (length `2m`) and measured parities `t`
/// (length `n - m`) into a length-`2n` label:
/// `(y_phase, 0^{n-m}, y_parity, t)`.
pub fn embed_ybar(y: &BinaryVector, t: &BinaryVector, n: usize, m: usize) -> Result<BinaryVector> {
    if m > n {
        return Err(Error::InvalidPairCounts { n, m });
    }
    y.ensure_len(2 * m)?;
    t.ensure_len(n - m)?;
    let k = n - m;
    let phase = y.phase_word() << k;
    let parity = (y.parity_word() << k) | t.word();
    BinaryVector::from_halves(phase, parity, n)
}

/// One measurement branch of a distillation round.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolOutcome<T> {
    /// Parity pattern of the measured pairs (zero = outcomes agreed).
    pub t: BinaryVector,
    pub prob: T,
    /// Kept pairs before the correcting Pauli.
    pub output: BellDiagonal<T>,
    pub correction: BinaryVector,
    /// Weight of `Phi+^m` after the correction.
    pub fidelity: T,
    /// `2^{n-m} * sum_{S + A^-1 abar} p / sum_{S_perp + A^-1 0bar} p`, the
    /// coset ratio with its power-of-two prefactor kept.
    pub paper_fidelity: T,
    pub accepted: bool,
}

impl<T: Probability> ProtocolOutcome<T> {
    pub fn corrected_output(&self) -> BellDiagonal<T> {
        self.output
            .pauli_shift(&self.correction)
            .expect("correction has the output's length")
    }
}

/// Argmax of a conditional distribution; smallest label on ties.
pub fn optimal_correction<T: Probability>(cond: &BellDiagonal<T>) -> BinaryVector {
    cond.argmax()
}

/// Precomputed coset geometry for one protocol and input.
pub(crate) struct CosetEngine<T> {
    n: usize,
    m: usize,
    shifted: BellDiagonal<T>,
    inverse: BinaryMatrix,
    s: Subspace,
    s_perp: Subspace,
}

pub(crate) struct BranchWeights<T> {
    pub denominator: T,
    pub weights: Vec<T>,
}

impl<T: Probability> CosetEngine<T> {
    pub fn new(state: &BellDiagonal<T>, proto: &PermProtocol) -> Result<Self> {
        if state.num_pairs() != proto.n {
            return Err(Error::LengthMismatch {
                expected: proto.n,
                found: state.num_pairs(),
            });
        }
        let inverse = symplectic_inverse(&proto.a)?;
        // An offset b is absorbed by pre-shifting: q_x = p_{x + A^-1 b}.
        let shift = inverse.mul_vec(&proto.b)?;
        let shifted = state.pauli_shift(&shift)?;
        let s = proto.subspace_s();
        let s_perp = s.orthogonal_complement()?;
        Ok(Self {
            n: proto.n,
            m: proto.m,
            shifted,
            inverse,
            s,
            s_perp,
        })
    }

    pub fn branch(&self, t: &BinaryVector) -> Result<BranchWeights<T>> {
        let (n, m) = (self.n, self.m);
        let zero_bar = embed_ybar(&BinaryVector::zeros(2 * m)?, t, n, m)?;
        let outer = Coset::new(self.s_perp.clone(), self.inverse.mul_vec(&zero_bar)?)?;
        let denominator = coset_sum(&self.shifted, &outer)?;
        let weights = (0..1u64 << (2 * m))
            .map(|y| {
                let y = BinaryVector::from_word_unchecked(y, 2 * m);
                let ybar = embed_ybar(&y, t, n, m)?;
                let coset = Coset::new(self.s.clone(), self.inverse.mul_vec(&ybar)?)?;
                coset_sum(&self.shifted, &coset)
            })
            .collect::<Result<Vec<T>>>()?;
        Ok(BranchWeights {
            denominator,
            weights,
        })
    }
}

fn outcome_from_weights<T: Probability>(
    t: BinaryVector,
    bw: BranchWeights<T>,
    n: usize,
    m: usize,
    threshold: &T,
) -> Result<ProtocolOutcome<T>> {
    let cond: Vec<T> = bw
        .weights
        .iter()
        .map(|w| w.clone() / bw.denominator.clone())
        .collect();
    let output = BellDiagonal::new(m, cond)?;
    let correction = optimal_correction(&output);
    let fidelity = output.prob(&correction)?;
    let paper_fidelity =
        T::pow2(n - m) * bw.weights[correction.index()].clone() / bw.denominator.clone();
    Ok(ProtocolOutcome {
        t,
        prob: bw.denominator,
        output,
        correction,
        accepted: fidelity >= *threshold,
        fidelity,
        paper_fidelity,
    })
}

/// Runs one round on `state`, returning every branch of non-zero
/// probability in increasing order of `t`.
pub fn run<T: Probability>(
    state: &BellDiagonal<T>,
    proto: &PermProtocol,
    threshold: &T,
) -> Result<Vec<ProtocolOutcome<T>>> {
    let engine = CosetEngine::new(state, proto)?;
    let k = proto.measured();
    let mut outcomes = Vec::new();
    for t in 0..1u64 << k {
        let t = BinaryVector::from_word_unchecked(t, k);
        let bw = engine.branch(&t)?;
        if bw.denominator.is_zero() {
            continue;
        }
        outcomes.push(outcome_from_weights(t, bw, proto.n, proto.m, threshold)?);
    }
    Ok(outcomes)
}

/// The literal coset-ratio expression
/// `2^{n-m} * sum_{S + A^-1 abar} p / sum_{S_perp + A^-1 0bar} p`,
/// which is `2^{n-m}` times the normalized fidelity of branch `t`.
pub fn paper_fidelity<T: Probability>(
    state: &BellDiagonal<T>,
    proto: &PermProtocol,
    t: &BinaryVector,
) -> Result<T> {
    t.ensure_len(proto.measured())?;
    let engine = CosetEngine::new(state, proto)?;
    let bw = engine.branch(t)?;
    if bw.denominator.is_zero() {
        return Err(Error::ImpossibleBranch(t.to_string()));
    }
    let best = bw
        .weights
        .iter()
        .fold(&bw.weights[0], |best, w| if w > best { w } else { best })
        .clone();
    Ok(T::pow2(proto.measured()) * best / bw.denominator)
}

/// Acceptance rule for recurrence rounds.
#[derive(Clone, Debug, PartialEq)]
pub enum Acceptance<T> {
    /// Keep branches whose fidelity is at least the round's input fidelity.
    NonDegrading,
    AtLeast(T),
}

impl<T: Probability> Acceptance<T> {
    pub fn threshold(&self, input_fidelity: &T) -> T {
        match self {
            Acceptance::NonDegrading => input_fidelity.clone(),
            Acceptance::AtLeast(t) => t.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundReport<T> {
    pub round: usize,
    pub fidelity_in: T,
    /// Fidelity of the kept pair, `None` when every branch was rejected.
    pub fidelity_out: Option<T>,
    pub success_probability: T,
    /// Product over rounds so far of `(m / n) * Pr(accept)`.
    pub cumulative_yield: T,
    pub output: Option<PairDistribution<T>>,
}

impl<T: Probability> RoundReport<T> {
    pub fn improved(&self) -> bool {
        self.fidelity_out
            .as_ref()
            .is_some_and(|f| *f > self.fidelity_in)
    }
}

/// Iterates an `n -> 1` protocol, feeding the accepted, corrected output
/// pair back in as each of the next round's `n` inputs. When several
/// branches are accepted their corrected outputs are mixed with their
/// branch probabilities. Stops early once a round accepts nothing.
pub fn recurrence_sweep<T: Probability>(
    pair: &PairDistribution<T>,
    proto: &PermProtocol,
    rounds: usize,
    acceptance: &Acceptance<T>,
) -> Result<Vec<RoundReport<T>>> {
    if proto.m != 1 {
        return Err(Error::RecurrenceNeedsSinglePair(proto.m));
    }
    if rounds == 0 {
        return Err(Error::Malformed("at least one round required".into()));
    }
    let mut current = pair.clone();
    let mut cumulative = T::one();
    let mut reports = Vec::with_capacity(rounds);
    for round in 1..=rounds {
        let state = BellDiagonal::from_pairs(&vec![current.clone(); proto.n])?;
        let fidelity_in = current.fidelity();
        let threshold = acceptance.threshold(&fidelity_in);
        let outcomes = run(&state, proto, &threshold)?;
        let mut success = T::zero();
        let mut mixed = vec![T::zero(); 4];
        for o in outcomes.iter().filter(|o| o.accepted) {
            success = success + o.prob.clone();
            for (acc, w) in mixed.iter_mut().zip(o.corrected_output().probs()) {
                *acc = acc.clone() + o.prob.clone() * w.clone();
            }
        }
        cumulative = cumulative * T::ratio(proto.m as u64, proto.n as u64) * success.clone();
        if success.is_zero() {
            reports.push(RoundReport {
                round,
                fidelity_in,
                fidelity_out: None,
                success_probability: success,
                cumulative_yield: cumulative,
                output: None,
            });
            break;
        }
        let weights: [T; 4] = mixed
            .into_iter()
            .map(|w| w / success.clone())
            .collect::<Vec<_>>()
            .try_into()
            .expect("single pair has four labels");
        let next = PairDistribution::new(weights)?;
        reports.push(RoundReport {
            round,
            fidelity_in,
            fidelity_out: Some(next.fidelity()),
            success_probability: success,
            cumulative_yield: cumulative.clone(),
            output: Some(next.clone()),
        });
        current = next;
    }
    Ok(reports)
}
