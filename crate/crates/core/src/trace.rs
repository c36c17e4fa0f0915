//! Finite-horizon traces `(n_j, value_j)` and their verdicts.

use serde::Serialize;

use crate::scalar::Scalar;

/// Default verdict tolerance.
pub const DEFAULT_TOL: f64 = 0.01;

/// Points in the trailing window used for oscillation and tail estimates.
pub const WINDOW: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict<T> {
    /// The trace settles within `tol` of `limit` on the grid.
    ConsistentWith { limit: T, tol: T },
    Inconclusive,
    /// The trailing window oscillates by at least `tol` without contracting.
    Diverging,
}

impl<T: Scalar> Verdict<T> {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Verdict::ConsistentWith { .. })
    }

    pub fn limit(&self) -> Option<T> {
        match *self {
            Verdict::ConsistentWith { limit, .. } => Some(limit),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Up,
    Down,
    Flat,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioTrace<T> {
    pub grid: Vec<u64>,
    pub values: Vec<T>,
    pub verdict: Verdict<T>,
    /// Sign of the last difference.
    pub trend: Trend,
    /// `max - min` over the trailing window.
    pub oscillation: T,
    /// Geometric extrapolation of the remaining change; infinite when the
    /// trailing differences do not contract.
    pub tail: T,
}

impl<T: Scalar> RatioTrace<T> {
    /// Assesses `values` against `target` if given, otherwise against the
    /// extrapolated limit.
    ///
    /// With a target: consistent iff the last value is within `tol` of it
    /// and the window oscillation is below `tol`. Without one: consistent iff
    /// both the oscillation and the tail estimate are below `tol`.
    pub fn assess(grid: Vec<u64>, values: Vec<T>, tol: T, target: Option<T>) -> Self {
        let n = values.len();
        let window = &values[n.saturating_sub(WINDOW)..];
        let (lo, hi) = window
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let oscillation = if n == 0 { T::zero() } else { hi - lo };
        let diffs: Vec<T> = window.windows(2).map(|w| w[1] - w[0]).collect();
        let last_diff = diffs.last().copied().unwrap_or_else(T::zero);
        let trend = if last_diff > T::zero() {
            Trend::Up
        } else if last_diff < T::zero() {
            Trend::Down
        } else {
            Trend::Flat
        };
        let contraction = diffs
            .windows(2)
            .map(|w| {
                if w[0] == T::zero() {
                    if w[1] == T::zero() {
                        T::zero()
                    } else {
                        T::infinity()
                    }
                } else {
                    (w[1] / w[0]).abs()
                }
            })
            .fold(T::zero(), T::max);
        let tail = if diffs.len() < 2 {
            if last_diff == T::zero() && n >= 2 {
                T::zero()
            } else {
                T::infinity()
            }
        } else if contraction < T::one() {
            last_diff.abs() * contraction / (T::one() - contraction)
        } else {
            T::infinity()
        };
        let sign_change = diffs.windows(2).any(|w| w[0] * w[1] < T::zero());
        let last = values.last().copied().unwrap_or_else(T::nan);

        let verdict = if n == 0 || last.is_nan() {
            Verdict::Inconclusive
        } else if let Some(limit) = target {
            if (last - limit).abs() <= tol && oscillation < tol {
                Verdict::ConsistentWith { limit, tol }
            } else if oscillation >= tol && (sign_change || contraction >= T::one()) {
                Verdict::Diverging
            } else {
                Verdict::Inconclusive
            }
        } else if n >= 2 && oscillation < tol && tail < tol {
            let limit = if last_diff < T::zero() { last - tail } else { last + tail };
            Verdict::ConsistentWith { limit, tol }
        } else if oscillation >= tol && (sign_change || contraction >= T::one()) {
            Verdict::Diverging
        } else {
            Verdict::Inconclusive
        };

        RatioTrace {
            grid,
            values,
            verdict,
            trend,
            oscillation,
            tail,
        }
    }

    pub fn last(&self) -> Option<T> {
        self.values.last().copied()
    }

    /// `(n_j, value_j)` pairs.
    pub fn rows(&self) -> impl Iterator<Item = (u64, T)> + '_ {
        self.grid.iter().copied().zip(self.values.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_decay_is_consistent() {
        let grid: Vec<u64> = (0..8).map(|j| 1 << j).collect();
        let values: Vec<f64> = (0..8).map(|j| 0.5 + 0.5f64.powi(j + 4)).collect();
        let t = RatioTrace::assess(grid, values, 0.01, None);
        let limit = t.verdict.limit().unwrap();
        assert!((limit - 0.5).abs() < 1e-12);
        assert_eq!(t.trend, Trend::Down);
    }

    #[test]
    fn alternating_is_diverging() {
        let grid: Vec<u64> = (1..=8).collect();
        let values: Vec<f64> = (0..8).map(|j| (j % 2) as f64).collect();
        let t = RatioTrace::assess(grid, values, 0.01, Some(0.5));
        assert_eq!(t.verdict, Verdict::Diverging);
    }

    #[test]
    fn slow_growth_is_inconclusive() {
        let grid: Vec<u64> = (10..=20).map(|j| 1 << j).collect();
        let values: Vec<f64> = (10..=20).map(|j| 1.0 - 1.0 / j as f64).collect();
        let t = RatioTrace::assess(grid, values, 0.01, None);
        assert_eq!(t.verdict, Verdict::Inconclusive);
        assert_eq!(t.trend, Trend::Up);
    }

    #[test]
    fn target_far_from_last_is_not_consistent() {
        let t = RatioTrace::assess(vec![1, 2, 3, 4], vec![0.2; 4], 0.01, Some(0.0));
        assert_eq!(t.verdict, Verdict::Inconclusive);
        let t = RatioTrace::assess(vec![1, 2, 3, 4], vec![0.2; 4], 0.01, None);
        assert_eq!(t.verdict, Verdict::ConsistentWith { limit: 0.2, tol: 0.01 });
    }
}
