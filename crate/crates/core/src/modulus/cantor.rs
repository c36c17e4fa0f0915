//! The ternary Cantor function and its extension to `[0, ∞)` by
//! `G_k(x) = 2·G_{k-1}(x/3)`.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_FLOAT_DIGITS: usize = 200;
const MAX_EXACT_DIGITS: usize = 1 << 20;

/// Cantor function on `[0, 1]` by ternary digit scan: digits `0`/`2` map to
/// binary `0`/`1` until the first ternary `1`, which contributes a final `1`.
pub fn cantor<T: Scalar>(x: T) -> Result<T> {
    if !(x >= T::zero() && x <= T::one()) {
        return Err(Error::Domain(format!("cantor needs 0 <= x <= 1, got {x}")));
    }
    if x == T::one() {
        return Ok(T::one());
    }
    let three = T::of(3.0);
    let two = T::of(2.0);
    let half = T::of(0.5);
    let mut rest = x;
    let mut weight = half;
    let mut acc = T::zero();
    for _ in 0..MAX_FLOAT_DIGITS {
        if rest == T::zero() || weight == T::zero() {
            break;
        }
        rest = rest * three;
        let digit = rest.floor();
        rest = rest - digit;
        if digit >= two {
            acc = acc + weight;
        } else if digit >= T::one() {
            return Ok(acc + weight);
        }
        weight = weight * half;
    }
    Ok(acc)
}

/// `G_e(x) = 2^{k-1}·G(x/3^{k-1})` with `k` the least positive integer such
/// that `x <= 3^{k-1}`.
pub fn extended_cantor<T: Scalar>(x: T) -> Result<T> {
    if !(x >= T::zero()) || x.is_infinite() {
        return Err(Error::Domain(format!("extended cantor needs finite x >= 0, got {x}")));
    }
    let three = T::of(3.0);
    let two = T::of(2.0);
    let mut span = T::one();
    let mut scale = T::one();
    while x > span {
        span = span * three;
        scale = scale * two;
    }
    Ok(scale * cantor(x / span)?)
}

/// Exact Cantor value of a rational in `[0, 1]`. The ternary expansion of a
/// rational is eventually periodic, so the image is rational as well.
pub fn cantor_exact(x: &BigRational) -> Result<BigRational> {
    if x.is_negative() || x > &BigRational::one() {
        return Err(Error::Domain(format!("cantor needs 0 <= x <= 1, got {x}")));
    }
    if x.is_one() {
        return Ok(BigRational::one());
    }
    let den: BigUint = x.denom().magnitude().clone();
    let mut rem: BigUint = x.numer().magnitude().clone();
    let three = BigUint::from(3u8);
    let mut seen: HashMap<BigUint, usize> = HashMap::new();
    let mut bits: Vec<bool> = Vec::new();
    loop {
        if let Some(&start) = seen.get(&rem) {
            return Ok(periodic_binary(&bits, start));
        }
        if bits.len() >= MAX_EXACT_DIGITS {
            return Err(Error::Parameter(format!(
                "ternary period of {x} exceeds {MAX_EXACT_DIGITS} digits"
            )));
        }
        seen.insert(rem.clone(), bits.len());
        let (digit, next) = (&rem * &three).div_rem(&den);
        if digit == BigUint::one() {
            let mut value = periodic_binary(&bits, bits.len());
            value += BigRational::new(BigInt::one(), BigInt::one() << (bits.len() + 1));
            return Ok(value);
        }
        bits.push(!digit.is_zero());
        rem = next;
    }
}

/// Exact extended Cantor value of a nonnegative rational.
pub fn extended_cantor_exact(x: &BigRational) -> Result<BigRational> {
    if x.is_negative() {
        return Err(Error::Domain(format!("extended cantor needs x >= 0, got {x}")));
    }
    let three = BigRational::from_integer(3.into());
    let two = BigRational::from_integer(2.into());
    let mut span = BigRational::one();
    let mut scale = BigRational::one();
    while x > &span {
        span *= &three;
        scale *= &two;
    }
    Ok(scale * cantor_exact(&(x / span))?)
}

// Value of 0.b_0 … b_{start-1} (b_start … b_{n-1})^∞ in binary.
fn periodic_binary(bits: &[bool], start: usize) -> BigRational {
    let to_int = |bs: &[bool]| {
        bs.iter()
            .fold(BigInt::zero(), |acc, &b| (acc << 1) + if b { 1 } else { 0 })
    };
    let prefix = BigRational::new(to_int(&bits[..start]), BigInt::one() << start);
    let period = &bits[start..];
    if period.is_empty() {
        return prefix;
    }
    let cycle = BigRational::new(
        to_int(period),
        ((BigInt::one() << period.len()) - 1) << start,
    );
    prefix + cycle
}
