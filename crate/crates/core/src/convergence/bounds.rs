//! Finite-n inequalities relating counts, densities and Cesàro means.
//! Each check returns both sides so violations can be reported verbatim.

use serde::Serialize;

use super::scan::{deviation_count, mean_of, DeviationSpec};
use crate::error::{Error, Result};
use crate::modulus::Modulus;
use crate::scalar::{ratio, Scalar};
use crate::wijsman::{ClosedSet, SetSequence};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck<T> {
    /// The side claimed to be smaller.
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
}

fn compare<T: Scalar>(lhs: T, rhs: T, slack: T) -> InequalityCheck<T> {
    InequalityCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + slack * (lhs.abs() + rhs.abs() + T::one()),
    }
}

/// `f(n) <= p·f(m)` whenever `n <= p·m`.
pub fn count_scaling<T: Scalar>(f: &Modulus<T>, n: u64, m: u64, p: u64) -> Result<InequalityCheck<T>> {
    if (n as u128) > (p as u128) * (m as u128) {
        return Err(Error::Parameter(format!("needs n <= p·m (n = {n}, p = {p}, m = {m})")));
    }
    let fv = |v: u64| f.eval_int(&v.into()).to_scalar();
    Ok(compare(fv(n), T::of_u64(p) * fv(m), f.slack()))
}

struct Devs<T> {
    d: Vec<T>,
    a: T,
}

fn deviations<P, T>(seq: &SetSequence<P, T>, x: &P, limit: &ClosedSet<P, T>, n: u64) -> Result<Devs<T>>
where
    P: Clone + Send + Sync + 'static,
    T: Scalar,
{
    if n == 0 {
        return Err(Error::Domain("horizon n must be >= 1".into()));
    }
    Ok(Devs {
        d: (1..=n).map(|k| seq.dist(k, x)).collect(),
        a: limit.dist_to(x),
    })
}

impl<T: Scalar> Devs<T> {
    fn devs(&self) -> impl Iterator<Item = T> + '_ {
        self.d.iter().map(move |&v| (v - self.a).abs())
    }
}

/// `|σ_n(x) - d(x, A)| <= ε + M_x·|K_{x,ε}(n)|/n` with
/// `M_x = sup_{k<=n} d(x, A_k) + d(x, A)`.
pub fn cesaro_gap<P, T>(
    seq: &SetSequence<P, T>,
    x: &P,
    limit: &ClosedSet<P, T>,
    epsilon: T,
    n: u64,
) -> Result<InequalityCheck<T>>
where
    P: Clone + Send + Sync + 'static,
    T: Scalar,
{
    let spec = DeviationSpec::new(x.clone(), epsilon, limit.clone())?;
    let v = deviations(seq, x, limit, n)?;
    let mean = mean_of(v.d.iter().copied(), n);
    let m_x = v.d.iter().copied().fold(T::zero(), T::max) + v.a;
    let stat: T = ratio(deviation_count(seq, &spec, n), n);
    Ok(compare((mean - v.a).abs(), epsilon + m_x * stat, T::composed_slack()))
}

/// Largest `δ = 2^{-i} <= 1` with `f(δ) < ε`.
pub fn admissible_delta<T: Scalar>(f: &Modulus<T>, epsilon: T) -> Option<T> {
    let mut delta = T::one();
    for _ in 0..1100 {
        if f.value(delta) < epsilon {
            return Some(delta);
        }
        delta = delta * T::of(0.5);
        if delta == T::zero() {
            break;
        }
    }
    None
}

/// `(1/n) Σ f(dev_k) <= ε + 2·f(1)·δ^{-1}·(1/n) Σ dev_k` for `0 < δ <= 1`
/// with `f(δ) < ε`.
pub fn modulus_split<P, T>(
    seq: &SetSequence<P, T>,
    x: &P,
    limit: &ClosedSet<P, T>,
    f: &Modulus<T>,
    epsilon: T,
    delta: T,
    n: u64,
) -> Result<InequalityCheck<T>>
where
    P: Clone + Send + Sync + 'static,
    T: Scalar,
{
    if !(delta > T::zero() && delta <= T::one()) {
        return Err(Error::Parameter(format!("needs 0 < δ <= 1, got {delta}")));
    }
    if !(f.value(delta) < epsilon) {
        return Err(Error::Parameter(format!("needs f(δ) < ε (f({delta}) >= {epsilon})")));
    }
    let v = deviations(seq, x, limit, n)?;
    let strong_f = mean_of(v.devs().map(|t| f.value(t)), n);
    let strong = mean_of(v.devs(), n);
    let two = T::of(2.0);
    Ok(compare(strong_f, epsilon + two * f.value(T::one()) / delta * strong, f.slack()))
}

/// `β = min f(t)/t` over a geometric grid reaching the largest deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaBound<T> {
    pub beta: T,
    pub check: InequalityCheck<T>,
}

/// `(1/n) Σ dev_k <= β^{-1}·(1/n) Σ f(dev_k)` for concave `f`, where `β`
/// is the grid minimum of `f(t)/t` on a grid whose top is `max dev_k`.
pub fn beta_bound<P, T>(
    seq: &SetSequence<P, T>,
    x: &P,
    limit: &ClosedSet<P, T>,
    f: &Modulus<T>,
    n: u64,
) -> Result<BetaBound<T>>
where
    P: Clone + Send + Sync + 'static,
    T: Scalar,
{
    if !f.claims().concave {
        return Err(Error::Parameter(format!("`{}` is not declared concave", f.name())));
    }
    let v = deviations(seq, x, limit, n)?;
    let top = v.devs().fold(T::zero(), T::max);
    let strong = mean_of(v.devs(), n);
    let strong_f = mean_of(v.devs().map(|t| f.value(t)), n);
    if top == T::zero() {
        return Ok(BetaBound {
            beta: T::one(),
            check: compare(strong, strong_f, f.slack()),
        });
    }
    let mut beta = T::infinity();
    let mut t = top;
    for _ in 0..64 {
        beta = beta.min(f.value(t) / t);
        t = t * T::of(0.5);
    }
    if !(beta > T::zero()) {
        return Err(Error::Parameter(format!("β = {beta} is not positive")));
    }
    Ok(BetaBound {
        beta,
        check: compare(strong, strong_f / beta, f.slack()),
    })
}

/// `min f(xy) / (f(x)·f(y))` over pairs with `f(x)·f(y) > 0`.
pub fn multiplicative_constant<T: Scalar>(f: &Modulus<T>, xs: &[T], ys: &[T]) -> T {
    let mut c = T::infinity();
    for &x in xs {
        for &y in ys {
            let den = f.value(x) * f.value(y);
            if den > T::zero() {
                c = c.min(f.value(x * y) / den);
            }
        }
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainCheck<T> {
    /// `f(xy) >= c·f(x)·f(y)` verified on the sample grid and the pair `(|K|, ε)`.
    pub c: T,
    pub count: u64,
    pub check: InequalityCheck<T>,
}

/// `c·(f(|K_{x,ε}(n)|)/f(n))·(f(n)/n)·f(ε) <= (1/n) Σ f(dev_k)`.
pub fn multiplicative_chain<P, T>(
    seq: &SetSequence<P, T>,
    x: &P,
    limit: &ClosedSet<P, T>,
    f: &Modulus<T>,
    epsilon: T,
    n: u64,
    sample: &[T],
) -> Result<ChainCheck<T>>
where
    P: Clone + Send + Sync + 'static,
    T: Scalar,
{
    f.require_unbounded()?;
    let spec = DeviationSpec::new(x.clone(), epsilon, limit.clone())?;
    let v = deviations(seq, x, limit, n)?;
    let count = deviation_count(seq, &spec, n);
    let kc = T::of_u64(count);
    let mut ys = sample.to_vec();
    ys.push(epsilon);
    let c = multiplicative_constant(f, sample, &ys).min(multiplicative_constant(f, &[kc], &[epsilon]));
    let c = if c.is_infinite() { T::zero() } else { c };
    let fnn = f.value(T::of_u64(n));
    let lhs = c * f.ratio_of_counts(count, n) * (fnn / T::of_u64(n)) * f.value(epsilon);
    let strong_f = mean_of(v.devs().map(|t| f.value(t)), n);
    Ok(ChainCheck {
        c,
        count,
        check: compare(lhs, strong_f, f.slack()),
    })
}
