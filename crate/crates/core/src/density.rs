//! Counting functions, natural and f-density ratios, and density traces.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::HorizonGrid;
use crate::modulus::Modulus;
use crate::natset::NatSet;
use crate::scalar::{ratio, Scalar};
use crate::trace::{RatioTrace, DEFAULT_TOL};

/// `|{k <= n : k ∈ K}|`
pub fn count_upto(set: &NatSet, n: u64) -> u64 {
    set.count_upto(n)
}

/// `|K(n)| / n`
pub fn natural_density_ratio<T: Scalar>(set: &NatSet, n: u64) -> Result<T> {
    if n == 0 {
        return Err(Error::Domain("density ratio needs n >= 1".into()));
    }
    Ok(ratio(set.count_upto(n), n))
}

/// `f(|K(n)|) / f(n)`, exact (then rounded once) when `f` has an exact form.
pub fn f_density_ratio<T: Scalar>(set: &NatSet, f: &Modulus<T>, n: u64) -> Result<T> {
    if n == 0 {
        return Err(Error::Domain("density ratio needs n >= 1".into()));
    }
    f.require_unbounded()?;
    Ok(f.ratio_of_counts(set.count_upto(n), n))
}

/// Exact `f(|K(n)|) / f(n)` at an arbitrary-precision horizon. Needs an
/// exact form for `f` and a count of `K` at `n`.
pub fn f_density_ratio_exact<T: Scalar>(
    set: &NatSet,
    f: &Modulus<T>,
    n: &BigUint,
) -> Result<BigRational> {
    if n.is_zero() {
        return Err(Error::Domain("density ratio needs n >= 1".into()));
    }
    f.require_unbounded()?;
    let form = f
        .exact_form()
        .ok_or_else(|| Error::Parameter(format!("`{}` has no exact form", f.name())))?;
    let count = set
        .count_upto_big(n)
        .ok_or_else(|| Error::Parameter(format!("{} cannot be counted up to {n}", set.name())))?;
    Ok(crate::exact::div(&form.eval_int(&count), &form.eval_int(n)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrendOptions<T> {
    pub tol: T,
    /// Limit to test against; without one the limit is extrapolated.
    pub target: Option<T>,
}

impl<T: Scalar> Default for TrendOptions<T> {
    fn default() -> Self {
        TrendOptions {
            tol: T::of(DEFAULT_TOL),
            target: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityTrace<T> {
    pub set: String,
    pub modulus: Option<String>,
    pub counts: Vec<u64>,
    /// `f(|K(n)|)`, present for f-densities.
    pub f_counts: Option<Vec<T>>,
    /// `f(n)`, present for f-densities.
    pub f_ns: Option<Vec<T>>,
    pub trace: RatioTrace<T>,
}

impl<T: Scalar> DensityTrace<T> {
    pub fn last_ratio(&self) -> Option<T> {
        self.trace.last()
    }
}

/// Natural (`f = None`) or f-density ratios along `grid`.
pub fn density_trend<T: Scalar>(
    set: &NatSet,
    f: Option<&Modulus<T>>,
    grid: &HorizonGrid,
    opts: TrendOptions<T>,
) -> Result<DensityTrace<T>> {
    if let Some(f) = f {
        f.require_unbounded()?;
    }
    let points = grid.points().to_vec();
    let counts: Vec<u64> = points.par_iter().map(|&n| set.count_upto(n)).collect();
    let (values, f_counts, f_ns) = match f {
        None => (
            points.iter().zip(&counts).map(|(&n, &c)| ratio(c, n)).collect(),
            None,
            None,
        ),
        Some(f) => {
            let values = points
                .iter()
                .zip(&counts)
                .map(|(&n, &c)| f.ratio_of_counts(c, n))
                .collect();
            let fc = counts.iter().map(|&c| f.eval_int(&BigUint::from(c)).to_scalar()).collect();
            let fnn = points.iter().map(|&n| f.eval_int(&BigUint::from(n)).to_scalar()).collect();
            (values, Some(fc), Some(fnn))
        }
    };
    Ok(DensityTrace {
        set: set.name().to_string(),
        modulus: f.map(|f| f.name().to_string()),
        counts,
        f_counts,
        f_ns,
        trace: RatioTrace::assess(points, values, opts.tol, opts.target),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{Trend, Verdict};

    #[test]
    fn counts() {
        assert_eq!(count_upto(&NatSet::squares(), 10_000), 100);
        assert_eq!(count_upto(&NatSet::evens(), 7), 3);
        assert_eq!(count_upto(&NatSet::finite([]).unwrap(), 99), 0);
    }

    #[test]
    fn natural_ratios() {
        assert_eq!(natural_density_ratio::<f64>(&NatSet::squares(), 10_000).unwrap(), 0.01);
        assert_eq!(natural_density_ratio::<f64>(&NatSet::evens(), 1_000_000).unwrap(), 0.5);
        let fin = NatSet::finite([1, 2, 3]).unwrap();
        assert_eq!(natural_density_ratio::<f64>(&fin, 1_000_000).unwrap(), 3e-6);
        assert!(matches!(
            natural_density_ratio::<f64>(&fin, 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn log_density_values() {
        let lg = Modulus::<f64>::log1p();
        let sq = f_density_ratio(&NatSet::squares(), &lg, 1_000_000).unwrap();
        assert!((sq - 1001f64.ln() / 1_000_001f64.ln()).abs() < 1e-15);
        assert!((sq - 0.50008).abs() < 1e-5);
        let ev = f_density_ratio(&NatSet::evens(), &lg, 1_000_000).unwrap();
        assert!((ev - 0.9498).abs() < 1e-4);
        assert!(f_density_ratio(&NatSet::evens(), &Modulus::<f64>::saturating(), 10).is_err());
    }

    #[test]
    fn scale_reproduces_natural_density() {
        let s = Modulus::<f64>::scale(0.37).unwrap();
        for set in [NatSet::squares(), NatSet::odds(), NatSet::powers_of_two()] {
            for n in [1u64, 7, 100, 12_345, 1 << 20] {
                assert_eq!(
                    f_density_ratio(&set, &s, n).unwrap(),
                    natural_density_ratio::<f64>(&set, n).unwrap()
                );
            }
        }
    }

    #[test]
    fn traces() {
        let grid = HorizonGrid::default();
        let t = density_trend::<f64>(&NatSet::squares(), None, &grid, Default::default()).unwrap();
        assert!(t.trace.verdict.limit().unwrap().abs() < 0.01);
        let lg = Modulus::log1p();
        let opts = TrendOptions {
            tol: 0.01,
            target: Some(0.5),
        };
        let t = density_trend(&NatSet::squares(), Some(&lg), &grid, opts).unwrap();
        assert_eq!(t.trace.verdict, Verdict::ConsistentWith { limit: 0.5, tol: 0.01 });
        let t = density_trend(&NatSet::evens(), Some(&lg), &grid, Default::default()).unwrap();
        assert_eq!(t.trace.trend, Trend::Up);
        assert!(t.last_ratio().unwrap() >= 0.94);
        assert_eq!(t.trace.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn exact_ratio_at_big_horizon() {
        let id = Modulus::<f64>::identity();
        let n = BigUint::from(10u32).pow(40);
        let r = f_density_ratio_exact(&NatSet::squares(), &id, &n).unwrap();
        assert_eq!(r, BigRational::new(1.into(), BigUint::from(10u32).pow(20).into()));
    }
}
