//! Metric spaces, closed sets as distance oracles `x ↦ d(x, A)`, and the
//! built-in example set sequences.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::natset::NatSet;
use crate::scalar::Scalar;

type DistFn<P, T> = Arc<dyn Fn(&P, &P) -> T + Send + Sync>;
type DistToFn<P, T> = Arc<dyn Fn(&P) -> T + Send + Sync>;
type SeqFn<P, T> = Arc<dyn Fn(u64, &P) -> T + Send + Sync>;

/// Short label for a point, used in CSV rows and reports.
pub trait PointLabel {
    fn label(&self) -> String;
}

impl<T: Scalar> PointLabel for Complex<T> {
    fn label(&self) -> String {
        if self.im == T::zero() {
            format!("{}", self.re)
        } else {
            format!("{}{:+}i", self.re, self.im)
        }
    }
}

impl PointLabel for f64 {
    fn label(&self) -> String {
        self.to_string()
    }
}

impl PointLabel for f32 {
    fn label(&self) -> String {
        self.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    RealLine,
    /// `[0, ∞)`; witnesses are clamped to be nonnegative.
    HalfLine,
    Plane,
    Abstract,
}

/// A metric together with the finite witness list that stands in for
/// "every point of the space".
#[derive(Clone)]
pub struct MetricSpace<P, T> {
    kind: SpaceKind,
    dist: DistFn<P, T>,
    witnesses: Vec<P>,
}

impl<P: fmt::Debug, T> fmt::Debug for MetricSpace<P, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricSpace")
            .field("kind", &self.kind)
            .field("witnesses", &self.witnesses)
            .finish()
    }
}

impl<P, T: Scalar> MetricSpace<P, T> {
    /// A user-supplied metric. It is not validated; see [`Self::check_metric_axioms`].
    pub fn custom<D>(dist: D, witnesses: Vec<P>) -> Self
    where
        D: Fn(&P, &P) -> T + Send + Sync + 'static,
    {
        MetricSpace {
            kind: SpaceKind::Abstract,
            dist: Arc::new(dist),
            witnesses,
        }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn dist(&self, x: &P, y: &P) -> T {
        (self.dist)(x, y)
    }

    pub fn witnesses(&self) -> &[P] {
        &self.witnesses
    }

    pub fn with_witnesses(mut self, witnesses: Vec<P>) -> Self
    where
        P: Clamp,
    {
        self.witnesses = witnesses.into_iter().map(|w| w.clamp_to(self.kind)).collect();
        self
    }

    /// Symmetry, `d(x, x) = 0` and the triangle inequality on all witness
    /// triples; returns a description of the first violation.
    pub fn check_metric_axioms(&self, tol: T) -> std::result::Result<(), String>
    where
        P: fmt::Debug,
    {
        let w = &self.witnesses;
        for x in w {
            let d = self.dist(x, x);
            if d.abs() > tol {
                return Err(format!("d({x:?}, {x:?}) = {d}"));
            }
            for y in w {
                let (a, b) = (self.dist(x, y), self.dist(y, x));
                if a < -tol || (a - b).abs() > tol {
                    return Err(format!("d({x:?}, {y:?}) = {a}, d({y:?}, {x:?}) = {b}"));
                }
                for z in w {
                    let via = self.dist(x, z) + self.dist(z, y);
                    if a > via + tol {
                        return Err(format!("triangle: d({x:?}, {y:?}) = {a} > {via} via {z:?}"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Points that can be moved into a space's domain.
pub trait Clamp: Sized {
    fn clamp_to(self, kind: SpaceKind) -> Self;
}

impl<T: Scalar> Clamp for Complex<T> {
    fn clamp_to(self, kind: SpaceKind) -> Self {
        match kind {
            SpaceKind::RealLine => Complex::new(self.re, T::zero()),
            SpaceKind::HalfLine => Complex::new(self.re.max(T::zero()), T::zero()),
            SpaceKind::Plane | SpaceKind::Abstract => self,
        }
    }
}

impl<T: Scalar> MetricSpace<Complex<T>, T> {
    fn euclidean(kind: SpaceKind, witnesses: &[Complex<T>]) -> Self {
        MetricSpace {
            kind,
            dist: Arc::new(|x: &Complex<T>, y: &Complex<T>| (x - y).norm()),
            witnesses: witnesses.iter().map(|w| w.clamp_to(kind)).collect(),
        }
    }

    /// ℝ embedded in ℂ as the real axis.
    pub fn real_line(witnesses: &[T]) -> Self {
        let w: Vec<_> = witnesses.iter().map(|&x| Complex::new(x, T::zero())).collect();
        Self::euclidean(SpaceKind::RealLine, &w)
    }

    pub fn half_line(witnesses: &[T]) -> Self {
        let w: Vec<_> = witnesses.iter().map(|&x| Complex::new(x, T::zero())).collect();
        Self::euclidean(SpaceKind::HalfLine, &w)
    }

    pub fn plane(witnesses: &[Complex<T>]) -> Self {
        Self::euclidean(SpaceKind::Plane, witnesses)
    }
}

/// A nonempty closed set, known only through `x ↦ d(x, A)`.
#[derive(Clone)]
pub struct ClosedSet<P, T> {
    name: String,
    dist_to: DistToFn<P, T>,
}

impl<P, T> fmt::Debug for ClosedSet<P, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedSet").field("name", &self.name).finish()
    }
}

impl<P: Clone + Send + Sync + 'static, T: Scalar> ClosedSet<P, T> {
    pub fn new<D>(name: impl Into<String>, dist_to: D) -> Self
    where
        D: Fn(&P) -> T + Send + Sync + 'static,
    {
        ClosedSet {
            name: name.into(),
            dist_to: Arc::new(dist_to),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dist_to(&self, x: &P) -> T {
        (self.dist_to)(x)
    }

    /// `{p}` in `space`.
    pub fn singleton(space: &MetricSpace<P, T>, p: P) -> Self
    where
        P: PointLabel,
    {
        let dist = Arc::clone(&space.dist);
        let name = format!("{{{}}}", p.label());
        Self::new(name, move |x| dist(x, &p))
    }

    /// A finite set; empty lists are rejected since closed sets here are nonempty.
    pub fn finite_set(space: &MetricSpace<P, T>, points: Vec<P>) -> Result<Self>
    where
        P: PointLabel,
    {
        if points.is_empty() {
            return Err(Error::Parameter("a closed set must be nonempty".into()));
        }
        let dist = Arc::clone(&space.dist);
        let labels: Vec<String> = points.iter().map(PointLabel::label).collect();
        Ok(Self::new(format!("{{{}}}", labels.join(",")), move |x| {
            points.iter().map(|p| dist(x, p)).fold(T::infinity(), T::min)
        }))
    }

    /// Largest violation of `|d(x, A) - d(y, A)| <= d(x, y)` over witness
    /// pairs, or `None` if the bound holds up to `tol`.
    pub fn lipschitz_violation(&self, space: &MetricSpace<P, T>, tol: T) -> Option<(P, P, T)> {
        let w = space.witnesses();
        let mut worst: Option<(P, P, T)> = None;
        for x in w {
            for y in w {
                let excess = (self.dist_to(x) - self.dist_to(y)).abs() - space.dist(x, y);
                if excess > tol && worst.as_ref().is_none_or(|v| excess > v.2) {
                    worst = Some((x.clone(), y.clone(), excess));
                }
            }
        }
        worst
    }
}

impl<T: Scalar> ClosedSet<Complex<T>, T> {
    /// `{z : |z - center| = radius}` in the plane.
    pub fn circle(center: Complex<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) || radius.is_infinite() {
            return Err(Error::Parameter(format!("circle radius must be positive, got {radius}")));
        }
        Ok(Self::new(
            format!("circle({},{radius})", center.label()),
            move |x: &Complex<T>| ((x - center).norm() - radius).abs(),
        ))
    }

    /// `{p}` under the Euclidean metric.
    pub fn point(p: Complex<T>) -> Self {
        Self::new(format!("{{{}}}", p.label()), move |x: &Complex<T>| (x - p).norm())
    }
}

/// `k ↦ A_k` for `k >= 1`, stored as `(k, x) ↦ d(x, A_k)`.
#[derive(Clone)]
pub struct SetSequence<P, T> {
    name: String,
    dist: SeqFn<P, T>,
}

impl<P, T> fmt::Debug for SetSequence<P, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SetSequence").field("name", &self.name).finish()
    }
}

impl<P: Clone + Send + Sync + 'static, T: Scalar> SetSequence<P, T> {
    pub fn new<D>(name: impl Into<String>, dist: D) -> Self
    where
        D: Fn(u64, &P) -> T + Send + Sync + 'static,
    {
        SetSequence {
            name: name.into(),
            dist: Arc::new(dist),
        }
    }

    /// `A_k = A` for every `k`.
    pub fn constant(a: &ClosedSet<P, T>) -> Self {
        let a = a.clone();
        Self::new(format!("const({})", a.name()), move |_, x| a.dist_to(x))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `d(x, A_k)`.
    pub fn dist(&self, k: u64, x: &P) -> T {
        (self.dist)(k, x)
    }

    pub fn at(&self, k: u64) -> ClosedSet<P, T> {
        let f = Arc::clone(&self.dist);
        ClosedSet::new(format!("{}[{k}]", self.name), move |x| f(k, x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SequenceId {
    /// Circles `|z - 1| = 1/k` at square `k`, `{0}` otherwise, in ℂ.
    R03,
    /// `{k}` at square `k`, `{0}` otherwise, in ℝ.
    E2,
    /// `{-1}` at even `k`, `{1}` at odd `k`, in ℝ.
    E4,
    /// `{k}` at `k = 2^r`, `{0}` otherwise, in `[0, ∞)`.
    E3,
}

impl SequenceId {
    pub const ALL: [SequenceId; 4] = [
        SequenceId::R03,
        SequenceId::E2,
        SequenceId::E4,
        SequenceId::E3,
    ];
}

impl fmt::Display for SequenceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SequenceId::R03 => "R03",
            SequenceId::E2 => "E2",
            SequenceId::E4 => "E4",
            SequenceId::E3 => "E3",
        })
    }
}

impl FromStr for SequenceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "R03" => Ok(SequenceId::R03),
            "E2" => Ok(SequenceId::E2),
            "E4" => Ok(SequenceId::E4),
            "E3" => Ok(SequenceId::E3),
            _ => Err(Error::UnknownSequence(s.to_string())),
        }
    }
}

/// A built-in sequence with its space, default witnesses and candidate limit.
#[derive(Debug, Clone)]
pub struct ExampleSequence<T> {
    pub id: SequenceId,
    pub space: MetricSpace<Complex<T>, T>,
    pub sequence: SetSequence<Complex<T>, T>,
    pub candidate: Option<ClosedSet<Complex<T>, T>>,
}

pub fn example_sequence<T: Scalar>(id: SequenceId) -> ExampleSequence<T> {
    let origin = ClosedSet::point(Complex::new(T::zero(), T::zero()));
    let real = |k: u64| Complex::new(T::of_u64(k), T::zero());
    match id {
        SequenceId::R03 => {
            let squares = NatSet::squares();
            let one = Complex::new(T::one(), T::zero());
            ExampleSequence {
                id,
                space: MetricSpace::plane(&[
                    Complex::new(T::zero(), T::zero()),
                    Complex::new(T::one(), T::zero()),
                    Complex::new(T::of(-2.5), T::zero()),
                ]),
                sequence: SetSequence::new("R03", move |k, x: &Complex<T>| {
                    if squares.contains(k) {
                        ((x - one).norm() - T::one() / T::of_u64(k)).abs()
                    } else {
                        x.norm()
                    }
                }),
                candidate: Some(origin),
            }
        }
        SequenceId::E2 => {
            let squares = NatSet::squares();
            ExampleSequence {
                id,
                space: MetricSpace::real_line(&[T::zero(), T::one(), T::of(-2.5)]),
                sequence: SetSequence::new("E2", move |k, x: &Complex<T>| {
                    if squares.contains(k) {
                        (x - real(k)).norm()
                    } else {
                        x.norm()
                    }
                }),
                candidate: Some(origin),
            }
        }
        SequenceId::E4 => {
            let one = Complex::new(T::one(), T::zero());
            ExampleSequence {
                id,
                space: MetricSpace::real_line(&[T::zero(), T::of(2.0), T::of(-0.5)]),
                sequence: SetSequence::new("E4", move |k, x: &Complex<T>| {
                    if k % 2 == 0 {
                        (x + one).norm()
                    } else {
                        (x - one).norm()
                    }
                }),
                candidate: None,
            }
        }
        SequenceId::E3 => {
            let pow2 = NatSet::powers_of_two();
            ExampleSequence {
                id,
                space: MetricSpace::half_line(&[T::zero(), T::one(), T::of(10.0)]),
                sequence: SetSequence::new("E3", move |k, x: &Complex<T>| {
                    if pow2.contains(k) {
                        (x - real(k)).norm()
                    } else {
                        x.norm()
                    }
                }),
                candidate: Some(origin),
            }
        }
    }
}
