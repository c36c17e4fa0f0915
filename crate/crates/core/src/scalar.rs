//! Floating point scalars the toolkit is generic over.

use std::fmt::{Debug, Display};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive, Zero};
use serde::Serialize;

/// Real scalar used for every floating evaluation (`f32` or `f64`).
///
/// Exact work (knots, counts, f-density ratios at arbitrary-precision
/// abscissas) is done in [`BigRational`] and converted at the boundary.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + 'static
{
    /// Relative slack for checks on directly evaluated closed forms.
    fn exact_slack() -> Self;
    /// Relative slack for checks on composed evaluations.
    fn composed_slack() -> Self;

    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 converts to every scalar")
    }

    fn of_u64(n: u64) -> Self {
        <Self as FromPrimitive>::from_u64(n).expect("u64 converts to every scalar")
    }

    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn exact_slack() -> Self {
        1e-12
    }
    fn composed_slack() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn exact_slack() -> Self {
        1e-5
    }
    fn composed_slack() -> Self {
        1e-4
    }
}

/// Nearest scalar to an exact rational. Saturates to infinity on overflow.
pub fn from_rational<T: Scalar>(r: &BigRational) -> T {
    match r.to_f64() {
        Some(v) => T::of(v),
        None if r.is_zero() => T::zero(),
        None => {
            if r.numer().sign() == num_bigint::Sign::Minus {
                T::neg_infinity()
            } else {
                T::infinity()
            }
        }
    }
}

/// Nearest scalar to a nonnegative big integer, saturating to infinity.
pub fn from_biguint<T: Scalar>(n: &BigUint) -> T {
    T::of(n.to_f64().unwrap_or(f64::INFINITY))
}

/// Exact rational value of a finite scalar.
pub fn to_rational<T: Scalar>(x: T) -> Option<BigRational> {
    BigRational::from_float(x.as_f64())
}

/// `num / den` rounded once to the scalar type; `den` must be nonzero.
pub fn ratio<T: Scalar>(num: u64, den: u64) -> T {
    from_rational(&BigRational::new(BigInt::from(num), BigInt::from(den)))
}

pub(crate) fn rational_from_uint(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}
