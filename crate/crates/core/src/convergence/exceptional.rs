//! Finite-horizon exceptional sets: a layered union of level sets
//! `B_j = {i : |d(x, A_i) - d(x, A)| >= 1/j}` with small f-density, off which
//! the deviations are below `1/j_1`.

use serde::Serialize;

use super::scan::DeviationSpec;
use crate::error::{Error, Result};
use crate::modulus::Modulus;
use crate::scalar::Scalar;
use crate::wijsman::{ClosedSet, SetSequence};

pub const DEFAULT_LEVELS: [u64; 6] = [2, 4, 8, 16, 32, 64];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExceptionalSetResult<T> {
    /// Sorted members of the layered union within `1..=horizon`.
    pub set: Vec<u64>,
    pub horizon: u64,
    pub f_density_ratio_at_horizon: T,
    /// Largest deviation at an index outside `set`.
    pub max_deviation_outside: T,
    /// Thresholds `j_1 < j_2 < …` actually layered in.
    pub levels_used: Vec<u64>,
    /// `cuts[k]` is the first index from which level `k + 2` is used.
    pub cuts: Vec<u64>,
    pub checkpoints: Vec<u64>,
    pub target: T,
    pub target_missed: bool,
}

/// Builds the layered set with per-level targets `target·2^{1-k}`: level
/// `j_{k+1}` is admitted from the smallest cut after which
/// `f(|B_{j_{k+1}}(m)|)/f(m) <= target_{k+1}` at every checkpoint `m`
/// (powers of two and the horizon). The first level is used from `1`.
pub fn exceptional_set<P, T>(
    seq: &SetSequence<P, T>,
    x: &P,
    limit: &ClosedSet<P, T>,
    f: &Modulus<T>,
    horizon: u64,
    levels: &[u64],
    target: T,
) -> Result<ExceptionalSetResult<T>>
where
    P: Clone + Send + Sync + 'static,
    T: Scalar,
{
    if horizon == 0 {
        return Err(Error::Domain("horizon must be >= 1".into()));
    }
    if levels.is_empty() || levels[0] == 0 || levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter(
            "levels must be nonempty, positive and strictly increasing".into(),
        ));
    }
    if !(target > T::zero()) {
        return Err(Error::Parameter(format!("target must be positive, got {target}")));
    }
    f.require_unbounded()?;
    // Validates the first threshold like any other deviation spec.
    DeviationSpec::new(x.clone(), T::one() / T::of_u64(levels[0]), limit.clone())?;

    let a = limit.dist_to(x);
    let dev: Vec<T> = (1..=horizon).map(|k| (seq.dist(k, x) - a).abs()).collect();
    let in_level = |i: usize, j: u64| dev[i] >= T::one() / T::of_u64(j);

    let mut checkpoints: Vec<u64> = (0..64).map(|r| 1u64 << r).take_while(|&m| m < horizon).collect();
    checkpoints.push(horizon);

    let mut levels_used = vec![levels[0]];
    let mut cuts = Vec::new();
    let mut start = 1u64;
    for (k, &j) in levels.iter().enumerate().skip(1) {
        let level_target = target * T::of(0.5f64.powi(k as i32));
        let mut count = 0u64;
        let mut last_failing = 0u64;
        let mut next = 0;
        for (i, _) in dev.iter().enumerate() {
            if in_level(i, j) {
                count += 1;
            }
            let m = i as u64 + 1;
            if m == checkpoints[next] {
                if f.ratio_of_counts(count, m) > level_target {
                    last_failing = m;
                }
                next += 1;
            }
        }
        let cut = (last_failing + 1).max(start);
        if cut > horizon {
            break;
        }
        levels_used.push(j);
        cuts.push(cut);
        start = cut;
    }

    let level_at = |i: u64| {
        let layer = cuts.iter().take_while(|&&c| c <= i).count();
        levels_used[layer]
    };
    let mut set = Vec::new();
    let mut outside = T::zero();
    for (i, &d) in dev.iter().enumerate() {
        let k = i as u64 + 1;
        if in_level(i, level_at(k)) {
            set.push(k);
        } else {
            outside = outside.max(d);
        }
    }
    let ratio = f.ratio_of_counts(set.len() as u64, horizon);
    Ok(ExceptionalSetResult {
        set,
        horizon,
        f_density_ratio_at_horizon: ratio,
        max_deviation_outside: outside,
        levels_used,
        cuts,
        checkpoints,
        target,
        target_missed: ratio > target,
    })
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
    fn r03_squares() {
        let ex = example_sequence::<f64>(SequenceId::R03);
        let a = ex.candidate.unwrap();
        let r = exceptional_set(&ex.sequence, &c(0.0), &a, &Modulus::identity(), 10_000, &DEFAULT_LEVELS, 0.01)
            .unwrap();
        let squares: Vec<u64> = (2..=100).map(|i| i * i).collect();
        assert_eq!(r.set, squares);
        assert_eq!(r.f_density_ratio_at_horizon, 0.0099);
        assert_eq!(r.max_deviation_outside, 0.0);
        assert!(!r.target_missed);
    }

    #[test]
    fn constant_sequence_is_empty() {
        let a = ClosedSet::point(c(1.0));
        let seq = SetSequence::constant(&a);
        let r = exceptional_set(&seq, &c(5.0), &a, &Modulus::log1p(), 4096, &DEFAULT_LEVELS, 0.01).unwrap();
        assert!(r.set.is_empty());
        assert_eq!(r.f_density_ratio_at_horizon, 0.0);
        assert_eq!(r.levels_used, DEFAULT_LEVELS.to_vec());
    }

    #[test]
    fn e4_misses_target() {
        let ex = example_sequence::<f64>(SequenceId::E4);
        let a = ClosedSet::point(c(0.0));
        let r = exceptional_set(&ex.sequence, &c(0.0), &a, &Modulus::identity(), 4096, &[2, 3], 0.01).unwrap();
        assert!(r.target_missed);
        assert_eq!(r.f_density_ratio_at_horizon, 1.0);
    }

    #[test]
    fn bad_levels() {
        let a = ClosedSet::point(c(0.0));
        let seq = SetSequence::constant(&a);
        let id = Modulus::identity();
        assert!(exceptional_set(&seq, &c(0.0), &a, &id, 10, &[], 0.1).is_err());
        assert!(exceptional_set(&seq, &c(0.0), &a, &id, 10, &[3, 2], 0.1).is_err());
        assert!(exceptional_set(&seq, &c(0.0), &a, &id, 0, &[2], 0.1).is_err());
    }

    #[test]
    fn layers_tighten_after_cuts() {
        // Deviation 1/√k: every level set is a finite prefix.
        let a = ClosedSet::point(c(0.0));
        let seq = SetSequence::new("shrinking", |k, x: &Complex<f64>| x.norm() + 1.0 / (k as f64).sqrt());
        let r = exceptional_set(&seq, &c(0.0), &a, &Modulus::identity(), 1 << 16, &[2, 4, 8, 16], 0.05).unwrap();
        assert!(r.levels_used.len() > 1);
        assert!(r.max_deviation_outside < 0.5);
        assert!(!r.target_missed);
        for w in r.cuts.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }
}
