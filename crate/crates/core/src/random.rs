//! Seeded random instances for property checks and batch verification.
//!
//! Every instance draws from its own ChaCha stream (`seed`, `index`), so
//! batches are reproducible and can be split across threads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bell::{BellDiagonal, PairDistribution};
use crate::gf2::{BinaryMatrix, BinaryVector};

pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn random_vector<R: Rng>(len: usize, rng: &mut R) -> BinaryVector {
    let word = if len == 0 {
        0
    } else {
        rng.random::<u64>() >> (64 - len)
    };
    BinaryVector::from_word(word, len).expect("masked to length")
}

/// Symplectic transvection `x -> x + <x, v> v` as a matrix.
fn transvection(v: &BinaryVector) -> BinaryMatrix {
    let len = v.len();
    let columns: Vec<BinaryVector> = (0..len)
        .map(|j| {
            let e = BinaryVector::unit(len, j).expect("in range");
            if crate::gf2::sympl_inner(&e, v).expect("same length") {
                e + *v
            } else {
                e
            }
        })
        .collect();
    BinaryMatrix::from_columns(&columns).expect("square")
}

/// Product of random transvections, which generate the symplectic group.
pub fn random_symplectic<R: Rng>(n: usize, rng: &mut R) -> BinaryMatrix {
    let len = 2 * n;
    let mut a = BinaryMatrix::identity(len).expect("small");
    for _ in 0..(len * len + 4) {
        let v = random_vector(len, rng);
        if v.is_zero() {
            continue;
        }
        a = transvection(&v).mul(&a).expect("same size");
    }
    a
}

/// `k` independent, pairwise commuting labels on `n` pairs: images of the
/// first `k` phase unit vectors under a random symplectic matrix.
pub fn random_isotropic_generators<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<BinaryVector> {
    assert!(k <= n);
    let a = random_symplectic(n, rng);
    (0..k).map(|i| a.column(i)).collect()
}

pub fn random_pair<R: Rng>(rng: &mut R) -> PairDistribution<f64> {
    let w: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
    let total: f64 = w.iter().sum();
    PairDistribution::new(w.map(|x| x / total)).expect("normalized")
}

/// Random Bell-diagonal state: an i.i.d. product of random pairs, a fully
/// random dense distribution, or a sparse one with many zero weights.
pub fn random_distribution<R: Rng>(n: usize, rng: &mut R) -> BellDiagonal<f64> {
    match rng.random_range(0..3) {
        0 => {
            let pairs: Vec<_> = (0..n).map(|_| random_pair(rng)).collect();
            BellDiagonal::from_pairs(&pairs).expect("valid pairs")
        }
        kind => {
            let size = 1usize << (2 * n);
            let mut w: Vec<f64> = (0..size).map(|_| rng.random::<f64>()).collect();
            if kind == 2 {
                for x in w.iter_mut() {
                    if rng.random_bool(0.7) {
                        *x = 0.0;
                    }
                }
                w[rng.random_range(0..size)] += 1.0;
            }
            let total: f64 = w.iter().sum();
            BellDiagonal::new(n, w.into_iter().map(|x| x / total).collect()).expect("normalized")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{is_symplectic, Subspace};

    #[test]
    fn random_matrices_are_symplectic() {
        let mut rng = instance_rng(1, 0);
        for n in 1..=5 {
            assert!(is_symplectic(&random_symplectic(n, &mut rng)).unwrap());
        }
    }

    #[test]
    fn generators_are_isotropic_and_independent() {
        let mut rng = instance_rng(2, 0);
        for n in 1..=5 {
            for k in 0..=n {
                let g = random_isotropic_generators(n, k, &mut rng);
                let s = Subspace::independent_span(2 * n, &g).unwrap();
                assert!(s.is_isotropic());
            }
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let a = random_distribution(2, &mut instance_rng(7, 3));
        let b = random_distribution(2, &mut instance_rng(7, 3));
        let c = random_distribution(2, &mut instance_rng(7, 4));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
