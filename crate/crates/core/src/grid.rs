//! Sample grids: real grids for modulus checks and integer horizon grids
//! for density and convergence traces.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A finite sample of `[0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum GridSpec<T> {
    /// `min, min + step, …` up to `max` (inclusive within rounding).
    Linear { min: T, max: T, step: T },
    /// `min, min·factor, …` up to `max`; `max` itself is always included.
    Geometric { min: T, max: T, factor: T },
    /// Explicit points, sorted and deduplicated on use.
    Points(Vec<T>),
}

impl<T: Scalar> GridSpec<T> {
    pub fn linear(min: T, max: T, step: T) -> Result<Self> {
        if !(min >= T::zero()) || !(max >= min) || !(step > T::zero()) {
            return Err(Error::Parameter(format!(
                "linear grid needs 0 <= min <= max and step > 0 (got {min}:{max}:{step})"
            )));
        }
        Ok(GridSpec::Linear { min, max, step })
    }

    pub fn geometric(min: T, max: T, factor: T) -> Result<Self> {
        if !(min > T::zero()) || !(max >= min) || !(factor > T::one()) {
            return Err(Error::Parameter(format!(
                "geometric grid needs 0 < min <= max and factor > 1 (got {min}:{max}:{factor})"
            )));
        }
        Ok(GridSpec::Geometric { min, max, factor })
    }

    /// `count` geometrically spaced points from `min` to `max`.
    pub fn geometric_count(min: T, max: T, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::Parameter("geometric grid needs at least 2 points".into()));
        }
        let factor = (max / min).powf(T::one() / T::of((count - 1) as f64));
        Self::geometric(min, max, factor)
    }

    pub fn points(&self) -> Vec<T> {
        match *self {
            GridSpec::Linear { min, max, step } => {
                let n = ((max - min) / step + T::of(1e-9)).floor().to_usize().unwrap_or(0);
                (0..=n).map(|i| min + T::of(i as f64) * step).collect()
            }
            GridSpec::Geometric { min, max, factor } => {
                let mut out = Vec::new();
                let mut x = min;
                while x < max * (T::one() - T::of(1e-12)) {
                    out.push(x);
                    x = x * factor;
                }
                out.push(max);
                out
            }
            GridSpec::Points(ref pts) => {
                let mut v = pts.clone();
                v.sort_by(|a, b| a.partial_cmp(b).expect("grid points are not NaN"));
                v.dedup();
                v
            }
        }
    }

    /// Coarse-to-fine levels used by witness searches: for a linear grid the
    /// sub-grids of points lying on multiples of powers of ten no finer than
    /// `step`, coarsest first, ending with the full grid.
    pub(crate) fn levels(&self) -> Vec<Vec<T>> {
        let full = self.points();
        let mut levels = Vec::new();
        if let GridSpec::Linear { min, max, step } = *self {
            let span = max - min;
            let mut spacing = T::of(10.0).powf(step.log10().ceil());
            let mut spacings = Vec::new();
            while spacing <= span {
                spacings.push(spacing);
                spacing = spacing * T::of(10.0);
            }
            for s in spacings.into_iter().rev() {
                let sub: Vec<T> = full
                    .iter()
                    .copied()
                    .filter(|&x| {
                        let q = x / s;
                        (q - q.round()).abs() < T::of(1e-6)
                    })
                    .collect();
                if sub.len() >= 3 && sub.len() < full.len() {
                    levels.push(sub);
                }
            }
        }
        levels.push(full);
        levels
    }
}

/// Increasing integer horizons `n_j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HorizonGrid {
    points: Vec<u64>,
}

impl HorizonGrid {
    /// `min, round(min·factor), …` up to `max`; `max` is always the last point.
    pub fn geometric(min: u64, max: u64, factor: f64) -> Result<Self> {
        if min < 1 || max < min || !(factor > 1.0) {
            return Err(Error::Parameter(format!(
                "horizon grid needs 1 <= min <= max and factor > 1 (got {min}:{max}:{factor})"
            )));
        }
        let mut points = Vec::new();
        let mut x = min as f64;
        while (x.round() as u64) < max {
            let n = x.round() as u64;
            if points.last() != Some(&n) {
                points.push(n);
            }
            x *= factor;
        }
        if points.last() != Some(&max) {
            points.push(max);
        }
        Ok(HorizonGrid { points })
    }

    /// `2^lo, …, 2^hi`.
    pub fn powers_of_two(lo: u32, hi: u32) -> Self {
        HorizonGrid {
            points: (lo..=hi).map(|j| 1u64 << j).collect(),
        }
    }

    pub fn from_points(mut points: Vec<u64>) -> Result<Self> {
        points.sort_unstable();
        points.dedup();
        if points.is_empty() || points[0] == 0 {
            return Err(Error::Parameter("horizon grid needs positive points".into()));
        }
        Ok(HorizonGrid { points })
    }

    pub fn points(&self) -> &[u64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max(&self) -> u64 {
        *self.points.last().expect("horizon grid is nonempty")
    }

    /// Drops points above `cap`; keeps at least the smallest point.
    pub fn capped(&self, cap: u64) -> Self {
        let mut points: Vec<u64> = self.points.iter().copied().filter(|&n| n <= cap).collect();
        if points.is_empty() {
            points.push(self.points[0].min(cap.max(1)));
        }
        HorizonGrid { points }
    }
}

impl Default for HorizonGrid {
    /// `2^4 … 2^20`, the density default.
    fn default() -> Self {
        HorizonGrid::powers_of_two(4, 20)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_grid_hits_endpoint() {
        let g = GridSpec::linear(0.0, 10.0, 0.5).unwrap();
        let p = g.points();
        assert_eq!(p.len(), 21);
        assert_eq!(p[0], 0.0);
        assert!((p[20] - 10.0f64).abs() < 1e-12);
    }

    #[test]
    fn linear_levels_are_coarse_to_fine() {
        let g = GridSpec::linear(0.0, 9.0, 0.01).unwrap();
        let levels = g.levels();
        assert_eq!(levels.first().unwrap().len(), 10);
        assert_eq!(levels.last().unwrap().len(), 901);
    }

    #[test]
    fn geometric_grid_includes_max() {
        let g = GridSpec::geometric(1.0, 1000.0, 10.0).unwrap();
        let p = g.points();
        assert_eq!(p.len(), 4);
        assert_eq!(*p.last().unwrap(), 1000.0);
    }

    #[test]
    fn horizon_grid_powers() {
        let g = HorizonGrid::geometric(16, 1 << 20, 2.0).unwrap();
        assert_eq!(g.points(), HorizonGrid::default().points());
        assert_eq!(g.capped(256).points(), &[16, 32, 64, 128, 256]);
    }

    #[test]
    fn bad_grids_rejected() {
        assert!(GridSpec::<f64>::linear(0.0, 1.0, 0.0).is_err());
        assert!(GridSpec::<f64>::geometric(0.0, 1.0, 2.0).is_err());
        assert!(HorizonGrid::geometric(0, 10, 2.0).is_err());
        assert!(HorizonGrid::geometric(1, 10, 1.0).is_err());
    }
}
