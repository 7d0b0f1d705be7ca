//! Probability scalars.
//!
//! Engines are written once against [`Probability`] and instantiated for
//! `f64` (the working type), `f32`, and exact rationals. The rational
//! instantiation reproduces hand-derived fractions bit for bit.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, ToPrimitive};

pub trait Probability:
    Num + Clone + PartialOrd + Debug + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Largest drift of a total weight away from one that is accepted at
    /// construction time.
    fn normalization_tolerance() -> Self;

    /// Drift from one small enough that weights are stored unchanged
    /// instead of being rescaled.
    fn rounding_tolerance() -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact `num / den`.
    fn ratio(num: u64, den: u64) -> Self {
        Self::from_u64(num).expect("u64 fits") / Self::from_u64(den).expect("u64 fits")
    }

    fn pow2(exp: usize) -> Self {
        let two = Self::one() + Self::one();
        (0..exp).fold(Self::one(), |acc, _| acc * two.clone())
    }

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }
}

impl Probability for f64 {
    fn normalization_tolerance() -> Self {
        1e-9
    }

    fn rounding_tolerance() -> Self {
        1e-12
    }
}

impl Probability for f32 {
    fn normalization_tolerance() -> Self {
        1e-4
    }

    fn rounding_tolerance() -> Self {
        1e-6
    }
}

impl Probability for BigRational {
    fn normalization_tolerance() -> Self {
        BigRational::from_integer(BigInt::from(0))
    }

    fn rounding_tolerance() -> Self {
        BigRational::from_integer(BigInt::from(0))
    }
}

/// Sums by cloning; `Sum` is not implemented for every scalar we support.
pub fn sum<'a, T: Probability, I: IntoIterator<Item = &'a T>>(items: I) -> T {
    items
        .into_iter()
        .fold(T::zero(), |acc, x| acc + x.clone())
}

/// `|a - b| <= tol` using only the trait's ordering.
pub fn within<T: Probability>(a: &T, b: &T, tol: &T) -> bool {
    a.clone() <= b.clone() + tol.clone() && b.clone() <= a.clone() + tol.clone()
}

pub fn approx_eq<T: Probability>(a: &T, b: &T, tol: f64) -> bool {
    (a.to_f64_lossy() - b.to_f64_lossy()).abs() <= tol
}
