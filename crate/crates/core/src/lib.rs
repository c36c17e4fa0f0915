//! Densities by moduli, modulus construction and validation, and
//! finite-horizon Wijsman convergence diagnostics for sequences of closed
//! sets.
//!
//! Everything is generic over a [`Scalar`] (`f32` or `f64`); knot
//! arithmetic and density ratios at large horizons are exact
//! ([`num_rational::BigRational`]). The aliases below fix `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convergence;
pub mod density;
pub mod error;
mod exact;
pub mod expr;
pub mod grid;
pub mod modulus;
pub mod natset;
pub mod scalar;
pub mod trace;
pub mod wijsman;

pub use error::{Error, Result};
pub use grid::{GridSpec, HorizonGrid};
pub use modulus::{Claims, CombineKind, Modulus, PiecewiseAffine};
pub use natset::NatSet;
pub use scalar::Scalar;

pub use num_bigint::BigUint;
pub use num_complex::Complex;
pub use num_rational::BigRational;

/// Point type of the built-in spaces (ℝ and `[0, ∞)` sit on the real axis).
pub type Point<T = f64> = Complex<T>;

pub type Modulus64 = Modulus<f64>;
pub type Modulus32 = Modulus<f32>;
pub type Grid64 = GridSpec<f64>;
pub type ClosedSet64 = wijsman::ClosedSet<Point<f64>, f64>;
pub type SetSequence64 = wijsman::SetSequence<Point<f64>, f64>;
pub type MetricSpace64 = wijsman::MetricSpace<Point<f64>, f64>;
pub type Verdict64 = convergence::ConvergenceVerdict<Point<f64>, f64>;
pub type RatioTrace64 = trace::RatioTrace<f64>;
