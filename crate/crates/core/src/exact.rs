//! Rational arithmetic that skips normalization when the gcd would be
//! expensive. Results compare and convert correctly either way.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Operands up to this size are always reduced.
const SMALL_BITS: u64 = 4096;

/// `n / d`, reduced when `min(|n|, |d|)` is small.
pub(crate) fn normalized(mut n: BigInt, mut d: BigInt) -> BigRational {
    assert!(!d.is_zero(), "zero denominator");
    if n.is_zero() {
        return BigRational::zero();
    }
    if d.sign() == Sign::Minus {
        n = -n;
        d = -d;
    }
    let (nb, db) = (n.bits(), d.bits());
    if nb.min(db) <= SMALL_BITS {
        let (small, big) = if nb <= db { (n.abs(), &d) } else { (d.clone(), &n) };
        let g = small.gcd(&(big % &small));
        if g > BigInt::from(1) {
            n /= &g;
            d /= &g;
        }
    } else if nb >= db {
        let (q, r) = n.div_rem(&d);
        if r.is_zero() {
            return BigRational::from_integer(q);
        }
    }
    BigRational::new_raw(n, d)
}

pub(crate) fn add(a: &BigRational, b: &BigRational) -> BigRational {
    if a.denom() == b.denom() {
        return normalized(a.numer() + b.numer(), a.denom().clone());
    }
    normalized(a.numer() * b.denom() + b.numer() * a.denom(), a.denom() * b.denom())
}

pub(crate) fn sub(a: &BigRational, b: &BigRational) -> BigRational {
    add(a, &-b)
}

pub(crate) fn mul(a: &BigRational, b: &BigRational) -> BigRational {
    normalized(a.numer() * b.numer(), a.denom() * b.denom())
}

pub(crate) fn div(a: &BigRational, b: &BigRational) -> BigRational {
    normalized(a.numer() * b.denom(), a.denom() * b.numer())
}
