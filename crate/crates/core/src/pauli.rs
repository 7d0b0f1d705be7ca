//! Pauli-string text form of labels: per qubit `I -> (0,0)`, `X -> (0,1)`,
//! `Z -> (1,0)`, `Y -> (1,1)` as `(phase | parity)`.

use crate::error::{Error, Result};
use crate::gf2::BinaryVector;

pub fn parse_pauli_string(s: &str) -> Result<BinaryVector> {
    let k = s.chars().count();
    let mut phase = Vec::with_capacity(k);
    let mut parity = Vec::with_capacity(k);
    for c in s.chars() {
        let (z, x) = match c.to_ascii_uppercase() {
            'I' => (false, false),
            'X' => (false, true),
            'Z' => (true, false),
            'Y' => (true, true),
            _ => return Err(Error::InvalidPauli(c)),
        };
        phase.push(z);
        parity.push(x);
    }
    phase.extend(parity);
    BinaryVector::from_bits(&phase)
}

pub fn to_pauli_string(v: &BinaryVector) -> String {
    let k = v.len() / 2;
    (0..k)
        .map(|i| match (v.get(i), v.get(k + i)) {
            (false, false) => 'I',
            (false, true) => 'X',
            (true, false) => 'Z',
            (true, true) => 'Y',
        })
        .collect()
}
