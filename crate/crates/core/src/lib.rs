//! Exact label-level simulation of entanglement distillation on
//! Bell-diagonal states.
//!
//! A mixture of products of `n` Bell states is a probability distribution
//! over binary labels `x` in `Z_2^{2n}`. Two protocol families act on it:
//!
//! - [`perm`]: local unitaries permute the labels by an affine symplectic
//!   map, after which the parities of some pairs are measured.
//! - [`code`]: Alice and Bob measure the generators of a stabilizer code
//!   and Bob corrects by the heaviest coset of the code.
//!
//! [`equivalence`] maps one family onto the other through a symplectic
//! completion of the stabilizer generators and checks instance by instance
//! that both give the same branches, outputs and fidelities. [`oracle`]
//! re-derives the label-level results from dense complex matrices for
//! small `n`.
//!
//! Engines are generic over the probability scalar ([`Probability`]); the
//! aliases below fix the common choices.
//!
//! ```
//! use distill_core::{perm, BellDiagonalState, Pair};
//!
//! let pair = Pair::werner(0.75).unwrap();
//! let state = BellDiagonalState::from_pairs(&[pair.clone(), pair]).unwrap();
//! let branches = perm::run(&state, &perm::PermProtocol::bilateral_cnot(), &0.75).unwrap();
//! assert!((branches[0].fidelity - 41.0 / 52.0).abs() < 1e-12);
//! ```

pub mod bell;
pub mod code;
pub mod equivalence;
pub mod error;
pub mod gf2;
pub mod oracle;
pub mod pauli;
pub mod perm;
pub mod random;
pub mod scalar;

pub use bell::{BellDiagonal, PairDistribution};
pub use error::{Error, Result};
pub use gf2::{BinaryMatrix, BinaryVector, Coset, Subspace};
pub use num_rational::BigRational;
pub use scalar::Probability;

/// Largest supported pair count (dense storage holds `4^n` weights).
pub const MAX_PAIRS: usize = 14;

pub type BellDiagonalState = BellDiagonal<f64>;
pub type BellDiagonalStateF32 = BellDiagonal<f32>;
pub type ExactBellDiagonalState = BellDiagonal<BigRational>;

pub type Pair = PairDistribution<f64>;
pub type ExactPair = PairDistribution<BigRational>;

pub type ProtocolOutcome = perm::ProtocolOutcome<f64>;
pub type ExactProtocolOutcome = perm::ProtocolOutcome<BigRational>;
pub type SyndromeBranch = code::SyndromeBranch<f64>;
pub type ExactSyndromeBranch = code::SyndromeBranch<BigRational>;
