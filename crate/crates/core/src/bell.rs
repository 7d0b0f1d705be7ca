//! Bell-diagonal mixtures over `Z_2^{2n}` and label-level local operations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{is_symplectic, BinaryMatrix, BinaryVector};
use crate::scalar::{self, Probability};
use crate::MAX_PAIRS;

/// Weights `(p00, p01, p10, p11)` of one Bell pair, indexed by
/// `(phase, parity)`: `Phi+`, `Psi+`, `Phi-`, `Psi-`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairDistribution<T> {
    weights: [T; 4],
}

impl<T: Probability> PairDistribution<T> {
    pub fn new(weights: [T; 4]) -> Result<Self> {
        check_distribution(&weights)?;
        Ok(Self {
            weights: normalized(weights.to_vec())
                .try_into()
                .expect("four weights"),
        })
    }

    /// Werner pair: weight `f` on `Phi+` and `(1 - f) / 3` on each other
    /// Bell state. Values below `1/4` are accepted with a warning.
    pub fn werner(f: T) -> Result<Self> {
        if f.is_negative() || f > T::one() {
            return Err(Error::InvalidFidelity(f.to_f64_lossy()));
        }
        if f < T::ratio(1, 4) {
            log::warn!("Werner fidelity {} is below 1/4", f.to_f64_lossy());
        }
        let rest = (T::one() - f.clone()) / T::ratio(3, 1);
        Ok(Self {
            weights: [f, rest.clone(), rest.clone(), rest],
        })
    }

    pub fn weights(&self) -> &[T; 4] {
        &self.weights
    }

    pub fn fidelity(&self) -> T {
        self.weights[0].clone()
    }
}

fn check_distribution<T: Probability>(weights: &[T]) -> Result<()> {
    if let Some((label, w)) = weights.iter().enumerate().find(|(_, w)| w.is_negative()) {
        return Err(Error::NegativeWeight {
            label,
            value: w.to_f64_lossy(),
        });
    }
    let total = scalar::sum(weights.iter());
    if !scalar::within(&total, &T::one(), &T::normalization_tolerance()) {
        return Err(Error::NotNormalized(total.to_f64_lossy()));
    }
    Ok(())
}

/// Rescales to unit total unless the drift is pure rounding noise.
fn normalized<T: Probability>(weights: Vec<T>) -> Vec<T> {
    let total = scalar::sum(weights.iter());
    if scalar::within(&total, &T::one(), &T::rounding_tolerance()) {
        weights
    } else {
        weights.into_iter().map(|p| p / total.clone()).collect()
    }
}

/// Mixture `sum_x p_x |B_x><B_x|` stored densely, indexed by the integer
/// value of the label `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct BellDiagonal<T> {
    n: usize,
    probs: Vec<T>,
}

impl<T: Probability> BellDiagonal<T> {
    /// Validates the weights (non-negative, total within the scalar's
    /// tolerance of one) and renormalizes them. Nothing downstream
    /// renormalizes again.
    pub fn new(n: usize, probs: Vec<T>) -> Result<Self> {
        check_pairs(n)?;
        if probs.len() != 1 << (2 * n) {
            return Err(Error::LengthMismatch {
                expected: 1 << (2 * n),
                found: probs.len(),
            });
        }
        check_distribution(&probs)?;
        Ok(Self {
            n,
            probs: normalized(probs),
        })
    }

    pub fn delta(n: usize, label: &BinaryVector) -> Result<Self> {
        check_pairs(n)?;
        label.ensure_len(2 * n)?;
        let mut probs = vec![T::zero(); 1 << (2 * n)];
        probs[label.index()] = T::one();
        Self::new(n, probs)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        check_pairs(n)?;
        let size = 1u64 << (2 * n);
        Self::new(n, vec![T::ratio(1, size); size as usize])
    }

    /// Tensor product of independent pairs: `p_x = prod_i d_i(x_i, x_{n+i})`.
    pub fn from_pairs(dists: &[PairDistribution<T>]) -> Result<Self> {
        if dists.is_empty() {
            return Err(Error::Empty("pair distribution list"));
        }
        let n = dists.len();
        if n > MAX_PAIRS {
            return Err(Error::TooManyPairs(n));
        }
        let probs = (0..1u64 << (2 * n))
            .map(|x| {
                let phase = x >> n;
                dists.iter().enumerate().fold(T::one(), |acc, (i, d)| {
                    let shift = n - 1 - i;
                    let z = (phase >> shift) & 1;
                    let p = (x >> shift) & 1;
                    acc * d.weights[(2 * z + p) as usize].clone()
                })
            })
            .collect();
        Self::new(n, probs)
    }

    pub fn num_pairs(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob(&self, label: &BinaryVector) -> Result<T> {
        label.ensure_len(2 * self.n)?;
        Ok(self.probs[label.index()].clone())
    }

    /// Weight of the all-`Phi+` label.
    pub fn fidelity(&self) -> T {
        self.probs[0].clone()
    }

    /// Label of the largest weight, smallest label on ties.
    pub fn argmax(&self) -> BinaryVector {
        let best = self
            .probs
            .iter()
            .enumerate()
            .fold(0, |best, (i, p)| if *p > self.probs[best] { i } else { best });
        BinaryVector::from_word_unchecked(best as u64, 2 * self.n)
    }

    /// Local Pauli `sigma_a` on one side: `p'_x = p_{x + a}`.
    pub fn pauli_shift(&self, a: &BinaryVector) -> Result<Self> {
        a.ensure_len(2 * self.n)?;
        let shift = a.index();
        let probs = (0..self.probs.len())
            .map(|x| self.probs[x ^ shift].clone())
            .collect();
        Ok(Self { n: self.n, probs })
    }

    /// Relabeling `x -> A x + b` realized by local unitaries:
    /// `p'_{A x + b} = p_x`.
    pub fn permute(&self, a: &BinaryMatrix, b: &BinaryVector) -> Result<Self> {
        let len = 2 * self.n;
        b.ensure_len(len)?;
        if a.nrows() != len || a.ncols() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                found: a.nrows(),
            });
        }
        if !is_symplectic(a)? {
            return Err(Error::NotSymplectic);
        }
        let mut probs = vec![T::zero(); self.probs.len()];
        for (x, p) in self.probs.iter().enumerate() {
            let y = a.mul_word(x as u64).word() ^ b.word();
            probs[y as usize] = p.clone();
        }
        Ok(Self { n: self.n, probs })
    }

    /// Marginal distribution of the first `pairs` pairs.
    pub fn marginal(&self, pairs: usize) -> Result<Self> {
        if pairs > self.n {
            return Err(Error::InvalidPairCounts {
                n: self.n,
                m: pairs,
            });
        }
        let drop = self.n - pairs;
        let mut probs = vec![T::zero(); 1 << (2 * pairs)];
        for (x, p) in self.probs.iter().enumerate() {
            let phase = x >> self.n;
            let parity = x & ((1 << self.n) - 1);
            let y = ((phase >> drop) << pairs) | (parity >> drop);
            probs[y] = probs[y].clone() + p.clone();
        }
        Ok(Self { n: pairs, probs })
    }

    pub fn total(&self) -> T {
        scalar::sum(self.probs.iter())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a.to_f64_lossy() - b.to_f64_lossy()).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> BellDiagonal<f64> {
        BellDiagonal {
            n: self.n,
            probs: self.probs.iter().map(Probability::to_f64_lossy).collect(),
        }
    }
}

/// On-disk form: `{"n": .., "probs": [..4^n..]}`.
#[derive(Serialize, Deserialize)]
struct StateFile {
    n: usize,
    probs: Vec<f64>,
}

impl BellDiagonal<f64> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&StateFile {
            n: self.n,
            probs: self.probs.clone(),
        })
        .expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile =
            serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        Self::new(file.n, file.probs)
    }
}

impl Serialize for BellDiagonal<f64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateFile {
            n: self.n,
            probs: self.probs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BellDiagonal<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = StateFile::deserialize(d)?;
        Self::new(file.n, file.probs).map_err(serde::de::Error::custom)
    }
}

fn check_pairs(n: usize) -> Result<()> {
    if n > MAX_PAIRS {
        return Err(Error::TooManyPairs(n));
    }
    Ok(())
}
