//! Moduli from uniformly continuous functions: `f(t) = sup_{|x-y| <= t} |g(x) - g(y)|`,
//! approximated on the window `[0, W]` at spacing `h`.

use std::sync::Arc;

use rayon::prelude::*;

use super::{Claims, Modulus};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_WINDOW: f64 = 100.0;
pub const DEFAULT_STEP: f64 = 0.01;

const MAX_SAMPLES: usize = 1 << 20;

/// Tabulates the oscillation of `g` at multiples of `step` inside
/// `[0, window]` and interpolates linearly. Beyond the window the last
/// tabulated value is held, so the result is only exact when the
/// oscillation of `g` is attained inside the window.
pub fn modulus_from_uniform_function<T, G>(
    name: impl Into<String>,
    g: G,
    window: T,
    step: T,
) -> Result<Modulus<T>>
where
    T: Scalar,
    G: Fn(T) -> T + Sync,
{
    let name = name.into();
    if !(window > T::zero()) || !(step > T::zero()) || window.is_infinite() {
        return Err(Error::Parameter(format!(
            "window and step must be positive and finite (got W = {window}, h = {step})"
        )));
    }
    let n = (window / step + T::of(1e-9)).floor().to_usize().unwrap_or(usize::MAX);
    if n == 0 || n >= MAX_SAMPLES {
        return Err(Error::Parameter(format!(
            "window / step must lie in [1, {MAX_SAMPLES}), got {}",
            window / step
        )));
    }
    let samples: Vec<T> = (0..=n).map(|i| g(T::of_u64(i as u64) * step)).collect();
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("`{name}` is not finite on [0, {window}]")));
    }
    let lag_max: Vec<T> = (0..=n)
        .into_par_iter()
        .map(|j| {
            samples[j..]
                .iter()
                .zip(&samples)
                .map(|(a, b)| (*a - *b).abs())
                .fold(T::zero(), T::max)
        })
        .collect();
    let mut table = Vec::with_capacity(n + 1);
    let mut running = T::zero();
    for v in lag_max {
        running = running.max(v);
        table.push(running);
    }
    if !(table[n] > T::zero()) {
        return Err(Error::Construction {
            achieved: 0,
            reason: format!("`{name}` is constant on [0, {window}]; its oscillation is identically 0"),
        });
    }
    let table = Arc::new(table);
    let eval = move |t: T| {
        let pos = t / step;
        let floor = pos.floor();
        match floor.to_usize() {
            Some(j) if j < n => {
                let frac = pos - floor;
                table[j] + (table[j + 1] - table[j]) * frac
            }
            _ => table[n],
        }
    };
    Ok(Modulus::new(
        format!("uniform({name},{window},{step})"),
        Claims {
            unbounded: false,
            concave: false,
            slowly_varying: true,
        },
        eval,
    ))
}
