//! Exact piecewise-affine functions on `[0, ∞)` with integer knots.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exact;
use crate::scalar::rational_from_uint;

/// Affine interpolation between knots `(x_k, y_k)` with `x_0 = 0, y_0 = 0`,
/// extended past the last knot with the last segment's slope.
///
/// Abscissas are arbitrary-precision integers and ordinates exact
/// rationals, so values at integer points are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseAffine {
    xs: Vec<BigUint>,
    ys: Vec<BigRational>,
    slopes: Vec<BigRational>,
    // Saturating float images for fast approximate evaluation.
    xs_f64: Vec<f64>,
    ys_f64: Vec<f64>,
    slopes_f64: Vec<f64>,
}

impl PiecewiseAffine {
    pub fn new(knots: Vec<(BigUint, BigRational)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::Parameter("piecewise-affine function needs at least 2 knots".into()));
        }
        if !knots[0].0.is_zero() || !knots[0].1.is_zero() {
            return Err(Error::Parameter("first knot must be (0, 0)".into()));
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Parameter(format!(
                    "knot abscissas must increase strictly ({} then {})",
                    w[0].0, w[1].0
                )));
            }
            if w[1].1 <= w[0].1 {
                return Err(Error::Parameter(format!(
                    "knot ordinates must increase strictly ({} then {})",
                    w[0].1, w[1].1
                )));
            }
        }
        let (xs, ys): (Vec<_>, Vec<_>) = knots.into_iter().unzip();
        let slopes: Vec<BigRational> = xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| exact::div(&exact::sub(&y[1], &y[0]), &rational_from_uint(&(&x[1] - &x[0]))))
            .collect();
        let xs_f64 = xs.iter().map(|x| x.to_f64().unwrap_or(f64::INFINITY)).collect();
        let ys_f64 = ys.iter().map(|y| y.to_f64().unwrap_or(f64::INFINITY)).collect();
        let slopes_f64 = slopes.iter().map(|s| s.to_f64().unwrap_or(0.0)).collect();
        Ok(PiecewiseAffine {
            xs,
            ys,
            slopes,
            xs_f64,
            ys_f64,
            slopes_f64,
        })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn abscissas(&self) -> &[BigUint] {
        &self.xs
    }

    pub fn ordinates(&self) -> &[BigRational] {
        &self.ys
    }

    /// `slopes()[i]` is the slope on `[x_i, x_{i+1}]`.
    pub fn slopes(&self) -> &[BigRational] {
        &self.slopes
    }

    // Index of the segment containing x; the last segment also covers the extension.
    fn segment_of<F: Fn(&BigUint) -> Ordering>(&self, cmp_knot_to_x: F) -> usize {
        let after = self.xs.partition_point(|k| cmp_knot_to_x(k) != Ordering::Greater);
        after.saturating_sub(1).min(self.slopes.len() - 1)
    }

    pub fn eval_int(&self, x: &BigUint) -> BigRational {
        let i = self.segment_of(|k| k.cmp(x));
        let dx = BigInt::from(x.clone()) - BigInt::from(self.xs[i].clone());
        exact::add(&self.ys[i], &exact::mul(&self.slopes[i], &BigRational::from_integer(dx)))
    }

    pub fn eval_rational(&self, x: &BigRational) -> Result<BigRational> {
        if x.is_negative() {
            return Err(Error::Domain(format!("negative argument {x}")));
        }
        let i = self.segment_of(|k| rational_from_uint(k).cmp(x));
        let dx = exact::sub(x, &rational_from_uint(&self.xs[i]));
        Ok(exact::add(&self.ys[i], &exact::mul(&self.slopes[i], &dx)))
    }

    /// Approximate value; knots beyond `f64` range act as +∞.
    pub fn eval_f64(&self, x: f64) -> f64 {
        let after = self.xs_f64.partition_point(|&k| k <= x);
        let i = after.saturating_sub(1).min(self.slopes_f64.len() - 1);
        self.ys_f64[i] + self.slopes_f64[i] * (x - self.xs_f64[i])
    }

    pub fn is_concave(&self) -> bool {
        self.first_convex_kink().is_none()
    }

    /// First knot index `i` where the slope increases (`slope[i] > slope[i-1]`).
    pub fn first_convex_kink(&self) -> Option<usize> {
        self.slopes
            .windows(2)
            .position(|w| w[1] > w[0])
            .map(|p| p + 1)
    }

    /// `a·p + b·q` on the union of both knot sets.
    pub fn linear_combination(
        a: &BigRational,
        p: &PiecewiseAffine,
        b: &BigRational,
        q: &PiecewiseAffine,
    ) -> Result<Self> {
        let mut xs: Vec<BigUint> = p.xs.iter().chain(q.xs.iter()).cloned().collect();
        xs.sort();
        xs.dedup();
        let knots = xs
            .into_iter()
            .map(|x| {
                let y = exact::add(&exact::mul(a, &p.eval_int(&x)), &exact::mul(b, &q.eval_int(&x)));
                (x, y)
            })
            .collect();
        PiecewiseAffine::new(knots)
    }

    /// `[[x_k, num_k, den_k], …]` with every entry a decimal string.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.xs
                .iter()
                .zip(&self.ys)
                .map(|(x, y)| {
                    Value::Array(vec![
                        Value::String(x.to_string()),
                        Value::String(y.numer().to_string()),
                        Value::String(y.denom().to_string()),
                    ])
                })
                .collect(),
        )
    }

    /// Inverse of [`to_json`](Self::to_json); numerators and denominators may
    /// also be plain JSON integers.
    pub fn from_json(value: &Value) -> Result<Self> {
        let rows = value
            .as_array()
            .ok_or_else(|| Error::Parameter("expected a JSON array of knots".into()))?;
        let mut knots = Vec::with_capacity(rows.len());
        for row in rows {
            let cells = row
                .as_array()
                .filter(|c| c.len() == 3)
                .ok_or_else(|| Error::Parameter(format!("knot must be [x, num, den], got {row}")))?;
            let x: BigUint = decimal(&cells[0])?
                .try_into()
                .map_err(|_| Error::Parameter("knot abscissa must be nonnegative".into()))?;
            let num = decimal(&cells[1])?;
            let den = decimal(&cells[2])?;
            if den.is_zero() {
                return Err(Error::Parameter("zero denominator".into()));
            }
            knots.push((x, BigRational::new(num, den)));
        }
        PiecewiseAffine::new(knots)
    }

    /// Identity on `[0, ∞)`.
    pub fn identity() -> Self {
        Self::scaled(BigRational::one()).expect("slope 1 is positive")
    }

    /// `x ↦ a·x` for `a > 0`.
    pub fn scaled(a: BigRational) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::Parameter(format!("scale factor must be positive, got {a}")));
        }
        PiecewiseAffine::new(vec![
            (BigUint::zero(), BigRational::zero()),
            (BigUint::one(), a),
        ])
    }
}

fn decimal(v: &Value) -> Result<BigInt> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
        other => return Err(Error::Parameter(format!("expected an integer, got {other}"))),
    };
    text.parse::<BigInt>()
        .map_err(|_| Error::Parameter(format!("not a decimal integer: {text}")))
}
