//! Modulus functions: construction, combination, evaluation and sampled
//! validation.
//!
//! A modulus is `f: [0, ∞) → [0, ∞)` with `f(x) = 0` iff `x = 0`,
//! subadditive, increasing and continuous. Nothing here proves those
//! axioms; [`check_axioms`] only searches for violations on a grid.

mod cantor;
mod checks;
mod lemma;
mod piecewise;
mod uniform;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::Serialize;

pub use cantor::{cantor, cantor_exact, extended_cantor, extended_cantor_exact};
pub use checks::{
    beta_limit, check_axioms, concavity_witness, slow_variation_exact, slow_variation_profile,
    subadditivity_sample, AxiomCheck, AxiomReport, BetaLimit, Counterexample, ExactRatio,
    SlowVariationProfile, SlowVariationRow,
};
pub use lemma::{lemma_modulus_from_set, LemmaSchedule, DEFAULT_SCAN_LIMIT};
pub(crate) use lemma::lemma_modulus_with_limit;
pub use piecewise::PiecewiseAffine;
pub use uniform::{modulus_from_uniform_function, DEFAULT_STEP, DEFAULT_WINDOW};

use crate::error::{Error, Result};
use crate::scalar::{from_biguint, from_rational, to_rational, Scalar};

/// Properties a modulus declares about itself. Checks may refute a claim;
/// nothing certifies one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Claims {
    pub unbounded: bool,
    pub concave: bool,
    pub slowly_varying: bool,
}

type EvalFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// An evaluable modulus with declared [`Claims`] and an optional exact
/// piecewise-affine form.
#[derive(Clone)]
pub struct Modulus<T> {
    name: String,
    eval: EvalFn<T>,
    claims: Claims,
    exact: Option<Arc<PiecewiseAffine>>,
    slack: T,
}

impl<T: Scalar> fmt::Debug for Modulus<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Modulus")
            .field("name", &self.name)
            .field("claims", &self.claims)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

/// Result of evaluating at an arbitrary-precision integer.
#[derive(Debug, Clone, PartialEq)]
pub enum Evaluation<T> {
    Exact(BigRational),
    Approx(T),
}

impl<T: Scalar> Evaluation<T> {
    pub fn to_scalar(&self) -> T {
        match self {
            Evaluation::Exact(r) => from_rational(r),
            Evaluation::Approx(v) => *v,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Evaluation::Exact(r) => Some(r),
            Evaluation::Approx(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineKind {
    /// `f ∘ g`
    Compose,
    /// `a·f + b·g`
    Linear,
    /// `f ∨ g`
    Max,
}

impl<T: Scalar> Modulus<T> {
    /// Wraps an arbitrary function. `f` must accept every `x >= 0`.
    pub fn new<F>(name: impl Into<String>, claims: Claims, f: F) -> Self
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        Modulus {
            name: name.into(),
            eval: Arc::new(f),
            claims,
            exact: None,
            slack: T::exact_slack(),
        }
    }

    pub fn from_piecewise(name: impl Into<String>, form: PiecewiseAffine, claims: Claims) -> Self {
        let form = Arc::new(form);
        let inner = Arc::clone(&form);
        Modulus {
            name: name.into(),
            eval: Arc::new(move |x: T| T::of(inner.eval_f64(x.as_f64()))),
            claims: Claims {
                concave: claims.concave && form.is_concave(),
                ..claims
            },
            exact: Some(form),
            slack: T::exact_slack(),
        }
    }

    fn with_slack(mut self, slack: T) -> Self {
        self.slack = slack;
        self
    }

    /// `f(x) = x`
    pub fn identity() -> Self {
        let mut m = Self::from_piecewise(
            "id",
            PiecewiseAffine::identity(),
            Claims {
                unbounded: true,
                concave: true,
                slowly_varying: false,
            },
        );
        m.eval = Arc::new(|x| x);
        m
    }

    /// `f(x) = a·x` for `a > 0`.
    pub fn scale(a: T) -> Result<Self> {
        if !(a > T::zero()) || a.is_infinite() {
            return Err(Error::Parameter(format!("scale factor must be positive, got {a}")));
        }
        let exact = to_rational(a)
            .ok_or_else(|| Error::Parameter(format!("scale factor {a} is not finite")))?;
        let mut m = Self::from_piecewise(
            format!("scale({a})"),
            PiecewiseAffine::scaled(exact)?,
            Claims {
                unbounded: true,
                concave: true,
                slowly_varying: false,
            },
        );
        m.eval = Arc::new(move |x| a * x);
        Ok(m)
    }

    /// `f(x) = x^p` for `0 < p <= 1`.
    pub fn power(p: T) -> Result<Self> {
        if !(p > T::zero() && p <= T::one()) {
            return Err(Error::Parameter(format!("power must satisfy 0 < p <= 1, got {p}")));
        }
        if p == T::one() {
            let mut m = Self::identity();
            m.name = "pow(1)".into();
            return Ok(m);
        }
        Ok(Self::new(
            format!("pow({p})"),
            Claims {
                unbounded: true,
                concave: true,
                slowly_varying: false,
            },
            move |x: T| x.powf(p),
        ))
    }

    /// `f(x) = log(1 + x)`
    pub fn log1p() -> Self {
        Self::new(
            "log1p",
            Claims {
                unbounded: true,
                concave: true,
                slowly_varying: true,
            },
            |x: T| x.ln_1p(),
        )
    }

    /// Extended Cantor function `G_e`: unbounded, subadditive, not concave.
    pub fn cantor_ext() -> Self {
        Self::new(
            "cantor_ext",
            Claims {
                unbounded: true,
                concave: false,
                slowly_varying: false,
            },
            |x: T| {
                if x.is_infinite() {
                    x
                } else {
                    extended_cantor(x).unwrap_or_else(|_| T::nan())
                }
            },
        )
        // Hölder-continuous with exponent log 2 / log 3, so input rounding is amplified.
        .with_slack(T::composed_slack())
    }

    /// `f(x) = x / (1 + x)`, a bounded modulus.
    pub fn saturating() -> Self {
        Self::new(
            "saturating",
            Claims {
                unbounded: false,
                concave: true,
                slowly_varying: true,
            },
            |x: T| if x.is_infinite() { T::one() } else { x / (T::one() + x) },
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn claims(&self) -> Claims {
        self.claims
    }

    pub fn exact_form(&self) -> Option<&PiecewiseAffine> {
        self.exact.as_deref()
    }

    /// Relative float slack used when this modulus is checked.
    pub fn slack(&self) -> T {
        self.slack
    }

    pub fn eval(&self, x: T) -> Result<T> {
        if !(x >= T::zero()) {
            return Err(Error::Domain(format!("modulus argument must be >= 0, got {x}")));
        }
        Ok((self.eval)(x))
    }

    /// Unchecked evaluation for arguments already known to be nonnegative.
    pub(crate) fn value(&self, x: T) -> T {
        (self.eval)(x)
    }

    /// Value at an integer; exact when an exact form is present.
    pub fn eval_int(&self, n: &BigUint) -> Evaluation<T> {
        match &self.exact {
            Some(form) => Evaluation::Exact(form.eval_int(n)),
            None => Evaluation::Approx((self.eval)(from_biguint(n))),
        }
    }

    /// `f(num) / f(den)` for integer arguments, computed exactly when
    /// possible so that, e.g., `scale(a)` reproduces `num / den` bit for bit.
    pub fn ratio_of_counts(&self, num: u64, den: u64) -> T {
        match &self.exact {
            Some(form) => {
                let top = form.eval_int(&BigUint::from(num));
                let bottom = form.eval_int(&BigUint::from(den));
                from_rational(&crate::exact::div(&top, &bottom))
            }
            None => (self.eval)(T::of_u64(num)) / (self.eval)(T::of_u64(den)),
        }
    }

    /// Requires the unbounded claim (f-densities are defined for unbounded moduli).
    pub fn require_unbounded(&self) -> Result<()> {
        if self.claims.unbounded {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "modulus `{}` is not declared unbounded; f-density needs an unbounded modulus",
                self.name
            )))
        }
    }

    /// `f∘g`, `a·f + b·g` or `f ∨ g`. `a` and `b` are only used (and must be
    /// positive) for [`CombineKind::Linear`].
    pub fn combine(kind: CombineKind, a: T, b: T, f: &Modulus<T>, g: &Modulus<T>) -> Result<Self> {
        let (fc, gc) = (f.claims, g.claims);
        let fe = Arc::clone(&f.eval);
        let ge = Arc::clone(&g.eval);
        let combined = match kind {
            CombineKind::Compose => Self::new(
                format!("compose({},{})", f.name, g.name),
                Claims {
                    unbounded: fc.unbounded && gc.unbounded,
                    concave: fc.concave && gc.concave,
                    slowly_varying: fc.slowly_varying && gc.unbounded && gc.concave,
                },
                move |x| fe(ge(x)),
            ),
            CombineKind::Linear => {
                if !(a > T::zero()) || !(b > T::zero()) {
                    return Err(Error::Parameter(format!(
                        "linear combination needs a, b > 0 (got a = {a}, b = {b})"
                    )));
                }
                let claims = Claims {
                    unbounded: fc.unbounded || gc.unbounded,
                    concave: fc.concave && gc.concave,
                    slowly_varying: fc.slowly_varying && gc.slowly_varying,
                };
                let name = format!("lin({a},{},{b},{})", f.name, g.name);
                let exact = match (&f.exact, &g.exact, to_rational(a), to_rational(b)) {
                    (Some(p), Some(q), Some(ra), Some(rb)) => {
                        Some(PiecewiseAffine::linear_combination(&ra, p, &rb, q)?)
                    }
                    _ => None,
                };
                let mut m = match exact {
                    Some(form) => Self::from_piecewise(name, form, claims),
                    None => Self::new(name, claims, |x| x),
                };
                m.eval = Arc::new(move |x| a * fe(x) + b * ge(x));
                m
            }
            CombineKind::Max => Self::new(
                format!("max({},{})", f.name, g.name),
                Claims {
                    unbounded: fc.unbounded || gc.unbounded,
                    concave: false,
                    slowly_varying: fc.slowly_varying && gc.slowly_varying,
                },
                move |x| fe(x).max(ge(x)),
            ),
        };
        let slack = T::composed_slack().max(f.slack).max(g.slack);
        Ok(combined.with_slack(slack))
    }
}
