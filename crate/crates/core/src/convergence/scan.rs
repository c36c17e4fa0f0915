//! Direct scans over `k = 1..n`: deviation counts, statistical ratios,
//! Cesàro means and the boundedness probe.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modulus::Modulus;
use crate::scalar::{ratio, Scalar};
use crate::wijsman::{ClosedSet, SetSequence};

/// Witness point, threshold and candidate limit for `K_{x,ε}(n)`.
#[derive(Debug, Clone)]
pub struct DeviationSpec<P, T> {
    pub x: P,
    pub epsilon: T,
    pub limit: ClosedSet<P, T>,
}

impl<P: Clone + Send + Sync + 'static, T: Scalar> DeviationSpec<P, T> {
    pub fn new(x: P, epsilon: T, limit: ClosedSet<P, T>) -> Result<Self> {
        if !(epsilon > T::zero()) {
            return Err(Error::Parameter(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(DeviationSpec { x, epsilon, limit })
    }
}

fn positive(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::Domain("horizon n must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// Compensated running sum, exact for sums of small integers.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Sum<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> Sum<T> {
    pub(crate) fn new() -> Self {
        Sum {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    pub(crate) fn add(&mut self, v: T) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp = self.comp + ((self.sum - t) + v);
        } else {
            self.comp = self.comp + ((v - t) + self.sum);
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> T {
        self.sum + self.comp
    }
}

pub(crate) fn mean_of<T: Scalar>(it: impl Iterator<Item = T>, n: u64) -> T {
    let mut s = Sum::new();
    it.for_each(|v| s.add(v));
    s.value() / T::of_u64(n)
}

/// `|{k <= n : |d(x, A_k) - d(x, A)| >= ε}|`
pub fn deviation_count<P, T>(seq: &SetSequence<P, T>, spec: &DeviationSpec<P, T>, n: u64) -> u64
where
    P: Clone + Send + Sync + 'static,
    T: Scalar,
{
    let a = spec.limit.dist_to(&spec.x);
    (1..=n)
        .filter(|&k| (seq.dist(k, &spec.x) - a).abs() >= spec.epsilon)
        .count() as u64
}

/// `|K_{x,ε}(n)| / n`
pub fn stat_ratio<P, T>(seq: &SetSequence<P, T>, spec: &DeviationSpec<P, T>, n: u64) -> Result<T>
where
    P: Clone + Send + Sync + 'static,
    T: Scalar,
{
    positive(n)?;
    Ok(ratio(deviation_count(seq, spec, n), n))
}

/// `f(|K_{x,ε}(n)|) / f(n)`
pub fn f_stat_ratio<P, T>(
    seq: &SetSequence<P, T>,
    spec: &DeviationSpec<P, T>,
    f: &Modulus<T>,
    n: u64,
) -> Result<T>
where
    P: Clone + Send + Sync + 'static,
    T: Scalar,
{
    positive(n)?;
    f.require_unbounded()?;
    Ok(f.ratio_of_counts(deviation_count(seq, spec, n), n))
}

/// `(1/n) Σ_{k<=n} d(x, A_k)`
pub fn cesaro_mean<P, T>(seq: &SetSequence<P, T>, x: &P, n: u64) -> Result<T>
where
    P: Clone + Send + Sync + 'static,
    T: Scalar,
{
    positive(n)?;
    Ok(mean_of((1..=n).map(|k| seq.dist(k, x)), n))
}

/// `(1/n) Σ_{k<=n} |d(x, A_k) - d(x, A)|`
pub fn strong_cesaro_mean<P, T>(seq: &SetSequence<P, T>, x: &P, limit: &ClosedSet<P, T>, n: u64) -> Result<T>
where
    P: Clone + Send + Sync + 'static,
    T: Scalar,
{
    positive(n)?;
    let a = limit.dist_to(x);
    Ok(mean_of((1..=n).map(|k| (seq.dist(k, x) - a).abs()), n))
}

/// `(1/n) Σ_{k<=n} f(|d(x, A_k) - d(x, A)|)`
pub fn strong_cesaro_f_mean<P, T>(
    seq: &SetSequence<P, T>,
    x: &P,
    limit: &ClosedSet<P, T>,
    f: &Modulus<T>,
    n: u64,
) -> Result<T>
where
    P: Clone + Send + Sync + 'static,
    T: Scalar,
{
    positive(n)?;
    let a = limit.dist_to(x);
    Ok(mean_of((1..=n).map(|k| f.value((seq.dist(k, x) - a).abs())), n))
}

fn block_len(r: u32) -> Result<u64> {
    if r >= 63 {
        return Err(Error::Parameter(format!("block index r = {r} is too large")));
    }
    Ok(1u64 << r)
}

/// `2^{-r} Σ_{k=2^r}^{2^{r+1}-1} |d(x, A_k) - d(x, A)|`
pub fn strong_cesaro_block_mean<P, T>(seq: &SetSequence<P, T>, x: &P, limit: &ClosedSet<P, T>, r: u32) -> Result<T>
where
    P: Clone + Send + Sync + 'static,
    T: Scalar,
{
    let len = block_len(r)?;
    let a = limit.dist_to(x);
    Ok(mean_of((len..2 * len).map(|k| (seq.dist(k, x) - a).abs()), len))
}

/// `2^{-r} Σ_{k=2^r}^{2^{r+1}-1} f(|d(x, A_k) - d(x, A)|)`
pub fn strong_cesaro_f_block_mean<P, T>(
    seq: &SetSequence<P, T>,
    x: &P,
    limit: &ClosedSet<P, T>,
    f: &Modulus<T>,
    r: u32,
) -> Result<T>
where
    P: Clone + Send + Sync + 'static,
    T: Scalar,
{
    let len = block_len(r)?;
    let a = limit.dist_to(x);
    Ok(mean_of((len..2 * len).map(|k| f.value((seq.dist(k, x) - a).abs())), len))
}

/// Finite-horizon `sup_{k<=n} d(x, A_k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundProbe<T> {
    pub sup: T,
    /// Smallest `k` attaining the sup.
    pub argmax: u64,
    /// Sup over `k <= n/2`.
    pub sup_half: T,
    /// Set when `sup > GROWTH_FACTOR · sup_half`, a heuristic unboundedness signal.
    pub growth: bool,
}

pub const GROWTH_FACTOR: f64 = 1.1;

pub fn bounded_probe<P, T>(seq: &SetSequence<P, T>, x: &P, n: u64) -> Result<BoundProbe<T>>
where
    P: Clone + Send + Sync + 'static,
    T: Scalar,
{
    positive(n)?;
    Ok(probe_values((1..=n).map(|k| seq.dist(k, x))))
}

pub(crate) fn probe_values<T: Scalar>(values: impl Iterator<Item = T>) -> BoundProbe<T> {
    let vals: Vec<T> = values.collect();
    let n = vals.len();
    let (mut sup, mut argmax, mut sup_half) = (T::neg_infinity(), 0u64, T::neg_infinity());
    for (i, &v) in vals.iter().enumerate() {
        if v > sup || (v.is_nan() && !sup.is_nan()) {
            sup = v;
            argmax = i as u64 + 1;
        }
        if i < (n / 2).max(1) {
            sup_half = sup;
        }
    }
    BoundProbe {
        sup,
        argmax,
        sup_half,
        growth: sup > T::of(GROWTH_FACTOR) * sup_half,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wijsman::{example_sequence, SequenceId};
    use num_complex::Complex;

    fn c(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn r03_counts_and_ratios() {
        let ex = example_sequence::<f64>(SequenceId::R03);
        let spec = DeviationSpec::new(c(0.0), 0.5, ex.candidate.clone().unwrap()).unwrap();
        assert_eq!(deviation_count(&ex.sequence, &spec, 10_000), 99);
        assert_eq!(stat_ratio(&ex.sequence, &spec, 10_000).unwrap(), 0.0099);
        let lg = Modulus::log1p();
        let r = f_stat_ratio(&ex.sequence, &spec, &lg, 10_000).unwrap();
        assert!((r - 100f64.ln() / 10_001f64.ln()).abs() < 1e-15);
        let big = DeviationSpec::new(c(0.0), 2.0, ex.candidate.unwrap()).unwrap();
        assert_eq!(deviation_count(&ex.sequence, &big, 10_000), 0);
        assert!(DeviationSpec::new(c(0.0), 0.0, ClosedSet::point(c(0.0))).is_err());
    }

    #[test]
    fn e4_counts() {
        let ex = example_sequence::<f64>(SequenceId::E4);
        let spec = DeviationSpec::new(c(0.0), 0.5, ClosedSet::point(c(0.0))).unwrap();
        assert_eq!(deviation_count(&ex.sequence, &spec, 100), 100);
        let id = Modulus::identity();
        assert_eq!(f_stat_ratio(&ex.sequence, &spec, &id, 100).unwrap(), 1.0);
        assert!(f_stat_ratio(&ex.sequence, &spec, &Modulus::saturating(), 100).is_err());
    }

    #[test]
    fn means() {
        let e2 = example_sequence::<f64>(SequenceId::E2);
        assert_eq!(cesaro_mean(&e2.sequence, &c(0.0), 100).unwrap(), 3.85);
        let e4 = example_sequence::<f64>(SequenceId::E4);
        assert_eq!(cesaro_mean(&e4.sequence, &c(0.0), 37).unwrap(), 1.0);
        assert_eq!(cesaro_mean(&e4.sequence, &c(2.0), 64).unwrap(), 2.0);
        assert!(cesaro_mean(&e4.sequence, &c(2.0), 0).is_err());
    }

    #[test]
    fn dyadic_blocks() {
        let e3 = example_sequence::<f64>(SequenceId::E3);
        let a = e3.candidate.clone().unwrap();
        assert_eq!(strong_cesaro_block_mean(&e3.sequence, &c(0.0), &a, 10).unwrap(), 1.0);
        let lg = Modulus::log1p();
        let v = strong_cesaro_f_block_mean(&e3.sequence, &c(0.0), &a, &lg, 10).unwrap();
        assert!((v - 1025f64.ln() / 1024.0).abs() < 1e-15);
        assert!((v - 0.00677).abs() < 1e-5);
    }

    #[test]
    fn constant_sequence_means_vanish() {
        let a = ClosedSet::point(c(3.0));
        let seq = SetSequence::constant(&a);
        let lg = Modulus::log1p();
        for x in [c(0.0), c(3.0), c(-7.5)] {
            assert_eq!(strong_cesaro_mean(&seq, &x, &a, 500).unwrap(), 0.0);
            assert_eq!(strong_cesaro_f_mean(&seq, &x, &a, &lg, 500).unwrap(), 0.0);
        }
    }

    #[test]
    fn probes() {
        let e2 = example_sequence::<f64>(SequenceId::E2);
        let p = bounded_probe(&e2.sequence, &c(0.0), 10_000).unwrap();
        assert_eq!((p.sup, p.argmax, p.growth), (10_000.0, 10_000, true));
        let r03 = example_sequence::<f64>(SequenceId::R03);
        let p = bounded_probe(&r03.sequence, &c(0.0), 10_000).unwrap();
        assert_eq!(p.sup, 1.0 - 1.0 / 10_000.0);
        assert!(!p.growth);
        let e4 = example_sequence::<f64>(SequenceId::E4);
        let p = bounded_probe(&e4.sequence, &c(2.0), 1000).unwrap();
        assert_eq!((p.sup, p.growth), (3.0, false));
    }

    #[test]
    fn compensated_sum_is_exact_on_integers() {
        let mut s = Sum::<f64>::new();
        for k in 1..=10_000u64 {
            s.add((k * k) as f64);
        }
        assert_eq!(s.value(), 333_383_335_000.0);
    }
}
