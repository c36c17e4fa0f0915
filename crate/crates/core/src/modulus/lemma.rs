//! Concave, slowly varying modulus with `d^f(K) = 1` for a given infinite
//! set `K`, built as the piecewise-affine interpolation of `f(n_k) = k`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{Claims, Modulus, PiecewiseAffine};
use crate::error::{Error, Result};
use crate::natset::NatSet;
use crate::scalar::Scalar;

/// Elements of sets without closed-form indexing are enumerated up to this value.
pub const DEFAULT_SCAN_LIMIT: u64 = 1 << 22;

/// Knot abscissas `0 = n_0 < n_1 < … < n_{k_max}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaSchedule {
    #[serde(serialize_with = "decimal_list")]
    pub n: Vec<BigUint>,
    pub k_max: usize,
}

fn decimal_list<S: serde::Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl LemmaSchedule {
    /// Checks every schedule invariant exactly; returns the first violation.
    ///
    /// For all stored `k`: `n_{k+1} - n_k < n_{k+2} - n_{k+1}`; and for
    /// `k >= 1`: `2n_k < n_{k+1}`, `n_{k+1} >= k·n_k` and `|K(n_{k+1})| > n_k`.
    pub fn verify(&self, set: &NatSet) -> std::result::Result<(), String> {
        let n = &self.n;
        if n.len() != self.k_max + 1 || !n[0].is_zero() {
            return Err("schedule must hold n_0 = 0 .. n_{k_max}".into());
        }
        for k in 0..n.len().saturating_sub(2) {
            if &n[k + 1] - &n[k] >= &n[k + 2] - &n[k + 1] {
                return Err(format!("gaps do not increase at k = {k}"));
            }
        }
        for k in 1..n.len() - 1 {
            if &n[k] * 2u32 >= n[k + 1] {
                return Err(format!("2·n_{k} >= n_{}", k + 1));
            }
            if &n[k] * BigUint::from(k) > n[k + 1] {
                return Err(format!("n_{} / n_{k} < {k}", k + 1));
            }
            let count = set
                .count_upto_big(&n[k + 1])
                .ok_or_else(|| format!("cannot count {} up to n_{}", set.name(), k + 1))?;
            if count <= n[k] {
                return Err(format!("|K(n_{})| <= n_{k}", k + 1));
            }
        }
        Ok(())
    }
}

/// Greedy schedule: `n_1 = max(2, min K)` and `n_{k+1}` the least `m` with
/// `m >= k·n_k`, `m > 2n_k`, `m - n_k > n_k - n_{k-1}` and the
/// `(n_k + 1)`-th element of `K` at most `m`.
///
/// On failure returns the knots built so far and the reason.
pub(crate) fn build_schedule(
    set: &NatSet,
    k_max: usize,
    scan_limit: u64,
) -> std::result::Result<Vec<BigUint>, (Vec<BigUint>, String)> {
    let mut n = vec![BigUint::zero()];
    let exhausted = |n: &Vec<BigUint>, j: &BigUint| {
        (
            n.clone(),
            format!(
                "{} has no accessible element number {j} (set exhausted, scan limit or size cap)",
                set.name()
            ),
        )
    };
    let first = set
        .nth(&BigUint::one(), scan_limit)
        .ok_or_else(|| exhausted(&n, &BigUint::one()))?;
    n.push(first.max(BigUint::from(2u32)));
    for k in 1..k_max {
        let j = &n[k] + 1u32;
        let element = set.nth(&j, scan_limit).ok_or_else(|| exhausted(&n, &j))?;
        let next = [
            &n[k] * BigUint::from(k),
            &n[k] * 2u32 + 1u32,
            &n[k] * 2u32 - &n[k - 1] + 1u32,
            element,
        ]
        .into_iter()
        .max()
        .expect("nonempty");
        n.push(next);
    }
    Ok(n)
}

/// Builds `f` with `f(n_k) = k` from the greedy schedule for `K`. Beyond
/// `n_{k_max}` it follows the segment to the smallest `m` meeting the
/// gap and growth conditions, with `f(m) = k_max + 1`.
pub fn lemma_modulus_from_set<T: Scalar>(
    set: &NatSet,
    k_max: usize,
) -> Result<(Modulus<T>, LemmaSchedule)> {
    lemma_modulus_with_limit(set, k_max, DEFAULT_SCAN_LIMIT)
}

pub(crate) fn lemma_modulus_with_limit<T: Scalar>(
    set: &NatSet,
    k_max: usize,
    scan_limit: u64,
) -> Result<(Modulus<T>, LemmaSchedule)> {
    if k_max < 3 {
        return Err(Error::Parameter(format!("lemma construction needs k_max >= 3, got {k_max}")));
    }
    let n = build_schedule(set, k_max, scan_limit).map_err(|(built, reason)| {
        Error::Construction {
            achieved: built.len() - 1,
            reason,
        }
    })?;
    let mut knots: Vec<(BigUint, BigRational)> = n
        .iter()
        .enumerate()
        .map(|(k, x)| (x.clone(), BigRational::from_integer(k.into())))
        .collect();
    // Past n_{k_max} the modulus runs toward the smallest admissible next knot.
    let (last, prev) = (&n[k_max], &n[k_max - 1]);
    let next = [
        last * BigUint::from(k_max),
        last * 2u32 + 1u32,
        last * 2u32 - prev + 1u32,
    ]
    .into_iter()
    .max()
    .expect("nonempty");
    knots.push((next, BigRational::from_integer((k_max + 1).into())));
    let form = PiecewiseAffine::new(knots)?;
    let modulus = Modulus::from_piecewise(
        format!("lemma({},{k_max})", set.name()),
        form,
        Claims {
            unbounded: true,
            concave: true,
            slowly_varying: true,
        },
    );
    Ok((modulus, LemmaSchedule { n, k_max }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squares_schedule_start() {
        let (f, s) = lemma_modulus_from_set::<f64>(&NatSet::squares(), 5).unwrap();
        let small: Vec<u64> = s.n.iter().take(5).map(|x| x.try_into().unwrap()).collect();
        // n_2 = 3², n_3 = 10², n_4 = 101²
        assert_eq!(small, vec![0, 2, 9, 100, 10_201]);
        s.verify(&NatSet::squares()).unwrap();
        let form = f.exact_form().unwrap();
        for (k, x) in s.n.iter().enumerate() {
            assert_eq!(form.eval_int(x), BigRational::from_integer(k.into()));
        }
        assert!(form.is_concave());
        assert!(f.claims().concave && f.claims().slowly_varying && f.claims().unbounded);
    }

    #[test]
    fn evens_and_complement() {
        for set in [NatSet::evens(), NatSet::complement(&NatSet::squares())] {
            let (_, s) = lemma_modulus_from_set::<f64>(&set, 12).unwrap();
            s.verify(&set).unwrap();
        }
    }

    #[test]
    fn k_max_too_small() {
        assert!(matches!(
            lemma_modulus_from_set::<f64>(&NatSet::squares(), 2),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn exhausted_sets_report_progress() {
        let err = lemma_modulus_from_set::<f64>(&NatSet::finite([1, 2, 3]).unwrap(), 5).unwrap_err();
        assert!(matches!(err, Error::Construction { achieved: 2, .. }), "{err:?}");
        let err = lemma_modulus_from_set::<f64>(&NatSet::powers_of_two(), 8).unwrap_err();
        assert!(matches!(err, Error::Construction { achieved, .. } if achieved >= 3), "{err:?}");
    }

    #[test]
    fn predicate_sets_use_the_scan() {
        let set = NatSet::from_predicate("squares_ge_4", |k| k >= 4 && {
            let r = num_integer::Roots::sqrt(&k);
            r * r == k
        });
        let (_, s) = lemma_modulus_with_limit::<f64>(&set, 4, 1 << 22).unwrap();
        let v: Vec<u64> = s.n.iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(v, vec![0, 4, 36, 1444, 2_090_916]);
        s.verify(&set).unwrap();
    }
}
