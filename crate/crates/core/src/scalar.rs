//! Scalar abstraction shared by the exact and floating-point code paths.
//!
//! Degree statistics and error probabilities are ratios of integer counts, so
//! they are computed as `numerator / denominator` in any [`Scalar`]. The exact
//! path instantiates them with [`BigRational`](num_rational::BigRational); the
//! fast path with `f64`. Bound evaluators involving logarithms and square roots
//! are generic over [`num_traits::Float`] instead.

use std::fmt::Debug;

use num_traits::{FromPrimitive, Num};

/// A field-like number type that can hold ratios of counts.
pub trait Scalar: Num + FromPrimitive + Clone + PartialOrd + Debug {}

impl<T> Scalar for T where T: Num + FromPrimitive + Clone + PartialOrd + Debug {}

/// `numer / denom` in `T`.
///
/// Panics if `T` cannot represent the operands, which does not happen for the
/// rational and floating-point types used in this crate.
pub fn ratio<T: Scalar>(numer: u64, denom: u64) -> T {
    let n = T::from_u64(numer).expect("numerator representable");
    let d = T::from_u64(denom).expect("denominator representable");
    n / d
}

/// Integer `value` in `T`.
pub fn from_count<T: Scalar>(value: u64) -> T {
    T::from_u64(value).expect("count representable")
}
