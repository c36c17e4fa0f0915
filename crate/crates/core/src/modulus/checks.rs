//! Refutation-by-sampling checks. A passing check means "no violation found
//! on this grid", never "this is a modulus".

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Modulus;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::scalar::{from_biguint, Scalar};

/// Pairs checked exhaustively per grid level before switching to sampling.
const PAIR_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Counterexample<T> {
    pub x: T,
    pub y: T,
    /// The side that should have been smaller.
    pub lhs: T,
    pub rhs: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxiomCheck<T> {
    pub passed: bool,
    pub counterexample: Option<Counterexample<T>>,
}

impl<T> AxiomCheck<T> {
    fn pass() -> Self {
        AxiomCheck {
            passed: true,
            counterexample: None,
        }
    }

    fn fail(c: Counterexample<T>) -> Self {
        AxiomCheck {
            passed: false,
            counterexample: Some(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport<T> {
    pub modulus: String,
    pub grid_points: usize,
    /// `f(0) = 0` and `f(x) > 0` for grid `x > 0`.
    pub zero: AxiomCheck<T>,
    /// Nondecreasing between adjacent grid points.
    pub monotone: AxiomCheck<T>,
    /// `f(x + y) <= f(x) + f(y)` for grid pairs with `x + y` inside the grid range.
    pub subadditive: AxiomCheck<T>,
    /// Maximal adjacent oscillation must not grow under two halvings of the spacing.
    pub continuity: AxiomCheck<T>,
    pub oscillation: [T; 3],
}

impl<T: Copy> AxiomReport<T> {
    pub fn zero_ok(&self) -> bool {
        self.zero.passed
    }
    pub fn monotone_ok(&self) -> bool {
        self.monotone.passed
    }
    pub fn subadditive_ok(&self) -> bool {
        self.subadditive.passed
    }
    pub fn continuity_ok(&self) -> bool {
        self.continuity.passed
    }
    pub fn all_ok(&self) -> bool {
        self.zero_ok() && self.monotone_ok() && self.subadditive_ok() && self.continuity_ok()
    }
    /// First counterexample in axiom order.
    pub fn counterexample(&self) -> Option<Counterexample<T>> {
        [self.zero, self.monotone, self.subadditive, self.continuity]
            .iter()
            .find_map(|c| c.counterexample)
    }
}

fn validated<T: Scalar>(grid: &GridSpec<T>) -> Result<Vec<T>> {
    let pts = grid.points();
    if pts.is_empty() {
        return Err(Error::Parameter("grid is empty".into()));
    }
    if pts.iter().any(|&x| !(x >= T::zero()) || x.is_infinite()) {
        return Err(Error::Parameter("grid points must be finite and >= 0".into()));
    }
    Ok(pts)
}

fn slack_of<T: Scalar>(m: &Modulus<T>, scale: T) -> T {
    m.slack() * (scale.abs() + T::one())
}

pub fn check_axioms<T: Scalar>(m: &Modulus<T>, grid: &GridSpec<T>) -> Result<AxiomReport<T>> {
    let pts = validated(grid)?;
    let values: Vec<T> = pts.iter().map(|&x| m.value(x)).collect();

    let f0 = m.value(T::zero());
    let zero = if f0 != T::zero() {
        AxiomCheck::fail(Counterexample {
            x: T::zero(),
            y: T::zero(),
            lhs: f0,
            rhs: T::zero(),
        })
    } else {
        match pts.iter().zip(&values).find(|(&x, &v)| x > T::zero() && !(v > T::zero())) {
            Some((&x, &v)) => AxiomCheck::fail(Counterexample {
                x,
                y: x,
                lhs: T::zero(),
                rhs: v,
            }),
            None => AxiomCheck::pass(),
        }
    };

    let monotone = pts
        .windows(2)
        .zip(values.windows(2))
        .find(|(_, v)| v[1] < v[0] - slack_of(m, v[0]) || v[1].is_nan())
        .map(|(x, v)| {
            AxiomCheck::fail(Counterexample {
                x: x[0],
                y: x[1],
                lhs: v[1],
                rhs: v[0],
            })
        })
        .unwrap_or_else(AxiomCheck::pass);

    let top = *pts.last().expect("nonempty");
    let mut subadditive = AxiomCheck::pass();
    'levels: for level in grid.levels() {
        for (x, y) in pairs_in_order(&level, top) {
            if let Some(c) = subadditivity_violation(m, x, y) {
                subadditive = AxiomCheck::fail(c);
                break 'levels;
            }
        }
    }

    let (continuity, oscillation) = continuity_check(m, &pts);

    Ok(AxiomReport {
        modulus: m.name().to_string(),
        grid_points: pts.len(),
        zero,
        monotone,
        subadditive,
        continuity,
        oscillation,
    })
}

// Pairs x <= y with x + y <= top, ordered by y then x; sampled past the budget.
fn pairs_in_order<T: Scalar>(level: &[T], top: T) -> Vec<(T, T)> {
    let n = level.len();
    if n * (n + 1) / 2 <= PAIR_BUDGET {
        let mut out = Vec::new();
        for j in 0..n {
            for i in 0..=j {
                if level[i] + level[j] <= top * (T::one() + T::of(1e-9)) {
                    out.push((level[i], level[j]));
                }
            }
        }
        out
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        (0..PAIR_BUDGET)
            .filter_map(|_| {
                let (a, b) = (level[rng.gen_range(0..n)], level[rng.gen_range(0..n)]);
                let (x, y) = if a <= b { (a, b) } else { (b, a) };
                (x + y <= top).then_some((x, y))
            })
            .collect()
    }
}

fn subadditivity_violation<T: Scalar>(m: &Modulus<T>, x: T, y: T) -> Option<Counterexample<T>> {
    let lhs = m.value(x + y);
    let rhs = m.value(x) + m.value(y);
    (lhs > rhs + slack_of(m, rhs) || lhs.is_nan()).then_some(Counterexample { x, y, lhs, rhs })
}

/// Subadditivity on `pairs` uniformly random pairs from `[lo, hi]²`.
pub fn subadditivity_sample<T: Scalar>(
    m: &Modulus<T>,
    lo: T,
    hi: T,
    pairs: usize,
    seed: u64,
) -> AxiomCheck<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo64, hi64) = (lo.as_f64(), hi.as_f64());
    for _ in 0..pairs {
        let x = T::of(rng.gen_range(lo64..=hi64));
        let y = T::of(rng.gen_range(lo64..=hi64));
        if let Some(c) = subadditivity_violation(m, x, y) {
            return AxiomCheck::fail(c);
        }
    }
    AxiomCheck::pass()
}

fn max_adjacent_jump<T: Scalar>(m: &Modulus<T>, pts: &[T]) -> (T, T, T) {
    pts.windows(2)
        .map(|w| (w[0], w[1], (m.value(w[1]) - m.value(w[0])).abs()))
        .fold((T::zero(), T::zero(), T::zero()), |best, cur| {
            if cur.2 > best.2 || cur.2.is_nan() {
                cur
            } else {
                best
            }
        })
}

fn refine<T: Scalar>(pts: &[T]) -> Vec<T> {
    let half = T::of(0.5);
    let mut out = Vec::with_capacity(pts.len() * 2);
    for w in pts.windows(2) {
        out.push(w[0]);
        out.push((w[0] + w[1]) * half);
    }
    out.extend(pts.last());
    out
}

fn continuity_check<T: Scalar>(m: &Modulus<T>, pts: &[T]) -> (AxiomCheck<T>, [T; 3]) {
    let once = refine(pts);
    let twice = refine(&once);
    let levels = [max_adjacent_jump(m, pts), max_adjacent_jump(m, &once), max_adjacent_jump(m, &twice)];
    let osc = [levels[0].2, levels[1].2, levels[2].2];
    for i in 1..3 {
        if !(osc[i] <= osc[i - 1] + slack_of(m, osc[i - 1])) {
            let (x, y, jump) = levels[i];
            return (
                AxiomCheck::fail(Counterexample {
                    x,
                    y,
                    lhs: jump,
                    rhs: osc[i - 1],
                }),
                osc,
            );
        }
    }
    (AxiomCheck::pass(), osc)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaLimit<T> {
    /// `f(t_max) / t_max`
    pub beta_estimate: T,
    /// `min_t f(t) / t` over the grid.
    pub inf_estimate: T,
    pub gap: T,
    /// `(t, f(t)/t)` along the grid.
    pub ratios: Vec<(T, T)>,
    /// `f(t)/t` nonincreasing along the grid up to slack.
    pub nonincreasing: bool,
}

/// Finite-grid estimate of `lim f(t)/t = inf f(t)/t`.
pub fn beta_limit<T: Scalar>(m: &Modulus<T>, grid: &GridSpec<T>) -> Result<BetaLimit<T>> {
    let pts = validated(grid)?;
    if pts[0] <= T::zero() {
        return Err(Error::Parameter("beta grid must be strictly positive".into()));
    }
    let ratios: Vec<(T, T)> = pts.iter().map(|&t| (t, m.value(t) / t)).collect();
    let beta_estimate = ratios.last().expect("nonempty").1;
    let inf_estimate = ratios.iter().map(|r| r.1).fold(T::infinity(), T::min);
    let nonincreasing = ratios
        .windows(2)
        .all(|w| w[1].1 <= w[0].1 + slack_of(m, w[0].1));
    Ok(BetaLimit {
        beta_estimate,
        inf_estimate,
        gap: (beta_estimate - inf_estimate).abs(),
        ratios,
        nonincreasing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlowVariationRow<T> {
    pub a: T,
    /// `(x, f(ax)/f(x))`
    pub ratios: Vec<(T, T)>,
    /// Grid points where `f(x) = 0`.
    pub skipped: Vec<T>,
    pub final_ratio: Option<T>,
    pub monotone_approach: bool,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlowVariationProfile<T> {
    pub modulus: String,
    pub tol: T,
    pub rows: Vec<SlowVariationRow<T>>,
}

impl<T> SlowVariationProfile<T> {
    /// "Consistent with slowly varying" for every `a`.
    pub fn consistent(&self) -> bool {
        self.rows.iter().all(|r| r.consistent)
    }
}

/// Default tolerance on the final ratio `f(ax)/f(x)`.
pub const DEFAULT_SV_TOL: f64 = 0.2;

/// Ratios `f(ax)/f(x)` along `x_grid` for each `a`. A row is consistent
/// with slow variation when its final ratio is within `tol` of 1 and, for
/// `a > 1`, `|ratio - 1|` never increases along the grid.
pub fn slow_variation_profile<T: Scalar>(
    m: &Modulus<T>,
    a_list: &[T],
    x_grid: &GridSpec<T>,
    tol: Option<T>,
) -> Result<SlowVariationProfile<T>> {
    let tol = tol.unwrap_or_else(|| T::of(DEFAULT_SV_TOL));
    let xs = validated(x_grid)?;
    let mut rows = Vec::with_capacity(a_list.len());
    for &a in a_list {
        if !(a > T::zero()) {
            return Err(Error::Parameter(format!("scale a must be positive, got {a}")));
        }
        let mut ratios = Vec::new();
        let mut skipped = Vec::new();
        for &x in &xs {
            let fx = m.value(x);
            if fx > T::zero() {
                ratios.push((x, m.value(a * x) / fx));
            } else {
                skipped.push(x);
            }
        }
        let final_ratio = ratios.last().map(|r| r.1);
        let monotone_approach = a <= T::one()
            || ratios.windows(2).all(|w| {
                let (d0, d1) = ((w[0].1 - T::one()).abs(), (w[1].1 - T::one()).abs());
                d1 <= d0 + slack_of(m, d0)
            });
        let consistent =
            monotone_approach && final_ratio.is_some_and(|r| (r - T::one()).abs() <= tol);
        rows.push(SlowVariationRow {
            a,
            ratios,
            skipped,
            final_ratio,
            monotone_approach,
            consistent,
        });
    }
    Ok(SlowVariationProfile {
        modulus: m.name().to_string(),
        tol,
        rows,
    })
}

/// Exact `f(a·x)/f(x)` for a modulus with an exact form.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactRatio {
    pub a: u64,
    pub x: BigUint,
    pub ratio: BigRational,
}

/// Exact slow-variation ratios at integer points (e.g. the knots of a
/// constructed modulus). Requires an exact form.
pub fn slow_variation_exact<T: Scalar>(
    m: &Modulus<T>,
    a_list: &[u64],
    xs: &[BigUint],
) -> Result<Vec<ExactRatio>> {
    let form = m
        .exact_form()
        .ok_or_else(|| Error::Parameter(format!("`{}` has no exact form", m.name())))?;
    let mut out = Vec::new();
    for &a in a_list {
        if a == 0 {
            return Err(Error::Parameter("scale a must be positive".into()));
        }
        for x in xs.iter().filter(|x| !x.is_zero()) {
            let fx = form.eval_int(x);
            let fax = form.eval_int(&(x * a));
            out.push(ExactRatio {
                a,
                x: x.clone(),
                ratio: crate::exact::div(&fax, &fx),
            });
        }
    }
    Ok(out)
}

/// A pair `(x, y)` with `f((x+y)/2) < (f(x)+f(y))/2`, searched coarse to
/// fine (pairs ordered by `y`, then `x`). Exact forms are decided by slope
/// monotonicity instead.
pub fn concavity_witness<T: Scalar>(m: &Modulus<T>, grid: &GridSpec<T>) -> Result<Option<(T, T)>> {
    let pts = validated(grid)?;
    if let Some(form) = m.exact_form() {
        return Ok(form.first_convex_kink().map(|i| {
            let xs = form.abscissas();
            (from_biguint(&xs[i - 1]), from_biguint(&xs[i + 1]))
        }));
    }
    let half = T::of(0.5);
    for level in grid.levels() {
        let level = if level.is_empty() { pts.clone() } else { level };
        for j in 0..level.len() {
            for i in 0..j {
                let (x, y) = (level[i], level[j]);
                let mid = m.value((x + y) * half);
                let avg = (m.value(x) + m.value(y)) * half;
                if mid < avg - slack_of(m, avg) {
                    return Ok(Some((x, y)));
                }
            }
        }
    }
    Ok(None)
}
