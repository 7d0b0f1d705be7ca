//! Run configuration, from a JSON file or from inline flags.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use distill_core::code::StabilizerProtocol;
use distill_core::equivalence::permutation_from_stabilizer;
use distill_core::perm::{Acceptance, PermProtocol};
use distill_core::{BellDiagonalState, BinaryMatrix, BinaryVector, Pair};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InputSpec {
    /// Every pair is a Werner pair of this fidelity.
    Werner(f64),
    /// Every pair has these weights (`Phi+`, `Psi+`, `Phi-`, `Psi-`).
    Pair([f64; 4]),
    /// Full `4^n` distribution over labels.
    Distribution(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ProtocolSpec {
    /// Pauli strings such as `"ZZ"`.
    Stabilizer(Vec<String>),
    Permutation {
        #[serde(rename = "A")]
        a: Vec<String>,
        #[serde(default)]
        b: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThresholdSpec {
    Value(f64),
    /// `"non-degrading"`: accept when the output is at least as good as
    /// the input.
    Named(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub m: usize,
    pub input: Option<InputSpec>,
    pub protocol: Option<ProtocolSpec>,
    #[serde(default = "one")]
    pub rounds: usize,
    #[serde(default)]
    pub threshold: Option<ThresholdSpec>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn one() -> usize {
    1
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn state(&self) -> Result<BellDiagonalState> {
        let state = match self.input.as_ref().context("config has no input")? {
            InputSpec::Werner(f) => {
                BellDiagonalState::from_pairs(&vec![Pair::werner(*f)?; self.n])?
            }
            InputSpec::Pair(w) => BellDiagonalState::from_pairs(&vec![Pair::new(*w)?; self.n])?,
            InputSpec::Distribution(p) => BellDiagonalState::new(self.n, p.clone())?,
        };
        Ok(state)
    }

    pub fn stabilizer(&self) -> Result<StabilizerProtocol> {
        match self.protocol.as_ref().context("config has no protocol")? {
            ProtocolSpec::Stabilizer(strings) => {
                let proto = StabilizerProtocol::from_pauli_strings(self.n, strings)?;
                if proto.m() != self.m {
                    bail!(
                        "{} generators on {} pairs keep {} pairs, but m = {}",
                        strings.len(),
                        self.n,
                        proto.m(),
                        self.m
                    );
                }
                Ok(proto)
            }
            ProtocolSpec::Permutation { .. } => {
                Ok(distill_core::equivalence::stabilizer_from_permutation(&self.permutation()?)?)
            }
        }
    }

    pub fn permutation(&self) -> Result<PermProtocol> {
        match self.protocol.as_ref().context("config has no protocol")? {
            ProtocolSpec::Permutation { a, b } => {
                let matrix = BinaryMatrix::from_row_strings(a).context("parsing matrix A")?;
                let offset = match b {
                    Some(b) => b.parse::<BinaryVector>().context("parsing offset b")?,
                    None => BinaryVector::zeros(2 * self.n)?,
                };
                if matrix.nrows() != 2 * self.n {
                    bail!("matrix A has {} rows, expected 2n = {}", matrix.nrows(), 2 * self.n);
                }
                Ok(PermProtocol::new(self.n, self.m, matrix, offset)?)
            }
            ProtocolSpec::Stabilizer(_) => Ok(permutation_from_stabilizer(&self.stabilizer()?)),
        }
    }

    pub fn acceptance(&self) -> Result<Acceptance<f64>> {
        match &self.threshold {
            None => Ok(Acceptance::NonDegrading),
            Some(ThresholdSpec::Value(t)) if (0.0..=1.0).contains(t) => Ok(Acceptance::AtLeast(*t)),
            Some(ThresholdSpec::Value(t)) => bail!("threshold {t} outside [0, 1]"),
            Some(ThresholdSpec::Named(s)) if s == "non-degrading" => Ok(Acceptance::NonDegrading),
            Some(ThresholdSpec::Named(s)) => {
                bail!("unknown threshold {s:?}; use a number or \"non-degrading\"")
            }
        }
    }

    /// Threshold for a single round: non-degrading compares against the
    /// input fidelity of the kept pairs.
    pub fn threshold_for(&self, state: &BellDiagonalState) -> Result<f64> {
        Ok(match self.acceptance()? {
            Acceptance::AtLeast(t) => t,
            Acceptance::NonDegrading => state.marginal(self.m)?.fidelity(),
        })
    }

    /// Checks everything a run needs, before any work starts.
    pub fn validate(&self, needs_input: bool) -> Result<()> {
        if self.n == 0 || self.m > self.n {
            bail!("invalid pair counts n = {}, m = {}", self.n, self.m);
        }
        if self.n > distill_core::MAX_PAIRS {
            bail!("n = {} exceeds the supported maximum of {}", self.n, distill_core::MAX_PAIRS);
        }
        if self.rounds == 0 {
            bail!("rounds must be at least 1");
        }
        if needs_input {
            self.state()?;
        }
        self.stabilizer()?;
        self.permutation()?;
        self.acceptance()?;
        Ok(())
    }
}
