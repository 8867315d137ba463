//! Exact combinatorics, one-inclusion graphs and list learners for list PAC
//! learning on finite hypothesis classes.
//!
//! Coordinates are 0-based throughout the library; text formats and the CLI
//! use 1-based coordinates.

pub mod dims;
pub mod error;
pub mod hclass;
pub mod learn;
pub mod oig;
pub mod orient;
pub mod scalar;
pub mod shift;
pub mod xp;

pub use error::{Error, Result};
pub use hclass::{CoordSequence, HypothesisClass, Label, LabeledSample};
pub use learn::ListHypothesis;
pub use oig::{DegreeStats, OneInclusionGraph};
pub use orient::ListOrientation;
pub use scalar::Scalar;

/// Exact rational numbers, used for all degree statistics and exact errors.
pub type Rational = num_rational::BigRational;

/// Degree statistics with exact rational averages.
pub type ExactDegreeStats = DegreeStats<Rational>;

/// Degree statistics with `f64` averages.
pub type FloatDegreeStats = DegreeStats<f64>;

/// Finite distribution with exact rational weights.
pub type ExactDistribution = xp::FiniteDistribution<Rational>;

/// Finite distribution with `f64` weights.
pub type FloatDistribution = xp::FiniteDistribution<f64>;
