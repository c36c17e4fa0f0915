//! Per-mode finite-horizon classification of a set sequence.

use rayon::prelude::*;
use serde::Serialize;

use super::scan::{probe_values, BoundProbe, Sum};
use crate::grid::HorizonGrid;
use crate::modulus::{lemma_modulus_with_limit, Modulus};
use crate::natset::NatSet;
use crate::scalar::{ratio, Scalar};
use crate::trace::DEFAULT_TOL;
use crate::wijsman::{ClosedSet, SetSequence};
use num_traits::ToPrimitive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Wijsman,
    Stat,
    FStat,
    Cesaro,
    StrongCesaro,
    StrongCesaroF,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode::Wijsman,
        Mode::Stat,
        Mode::FStat,
        Mode::Cesaro,
        Mode::StrongCesaro,
        Mode::StrongCesaroF,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Wijsman => "wijsman",
            Mode::Stat => "stat",
            Mode::FStat => "f_stat",
            Mode::Cesaro => "cesaro",
            Mode::StrongCesaro => "strong_cesaro",
            Mode::StrongCesaroF => "strong_cesaro_f",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Consistent,
    Refuted,
    Inconclusive,
}

/// Values of one mode for one witness (and threshold) along the grid.
///
/// - `wijsman`: max deviation over the block `(n_{j-1}, n_j]` (block
///   oscillation of `d(x, A_k)` without a candidate)
/// - `stat` / `f_stat`: `|K_{x,ε}(n)| / n` and `f(|K_{x,ε}(n)|) / f(n)`
/// - `cesaro`: `|σ_n(x) - d(x, A)|`
/// - `strong_cesaro` / `strong_cesaro_f`: the strong means
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeTrace<P, T> {
    pub x: P,
    pub epsilon: Option<T>,
    pub values: Vec<T>,
}

/// A violation that persists over the last two grid points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Refutation<P, T> {
    pub x: P,
    pub epsilon: Option<T>,
    pub n: u64,
    pub value: T,
    pub previous: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeReport<P, T> {
    pub mode: Mode,
    pub status: Status,
    pub modulus: Option<String>,
    pub traces: Vec<ModeTrace<P, T>>,
    pub refutation: Option<Refutation<P, T>>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Boundedness<P, T> {
    pub x: P,
    pub probe: BoundProbe<T>,
    /// `sup_k d(x, A_k) + d(x, A)`, bounding every deviation; `None` when
    /// the probe flags growth.
    pub m_x: Option<T>,
}

/// `f(|K(n)|)/f(n)` under the concave modulus built from the deviation set
/// itself, taken at the last knot `n` inside the horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaProbe<P, T> {
    pub x: P,
    pub epsilon: T,
    pub knots: Vec<String>,
    pub n: Option<u64>,
    pub ratio: Option<T>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyParams<P, T> {
    pub grid: HorizonGrid,
    pub epsilons: Vec<T>,
    pub witnesses: Vec<P>,
    pub tol: T,
    /// Knot count for the deviation-set modulus probe, if wanted.
    pub lemma_probe: Option<usize>,
}

impl<P, T: Scalar> ClassifyParams<P, T> {
    /// Grid `2^4..2^17`, `ε ∈ {1, 0.1, 0.01}`, `tol = 0.01`.
    pub fn new(witnesses: Vec<P>) -> Self {
        ClassifyParams {
            grid: HorizonGrid::powers_of_two(4, 17),
            epsilons: vec![T::one(), T::of(0.1), T::of(0.01)],
            witnesses,
            tol: T::of(DEFAULT_TOL),
            lemma_probe: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceVerdict<P, T> {
    pub sequence: String,
    pub candidate: Option<String>,
    pub modulus: String,
    pub grid: Vec<u64>,
    pub epsilons: Vec<T>,
    pub witnesses: Vec<P>,
    pub tol: T,
    pub modes: Vec<ModeReport<P, T>>,
    pub boundedness: Vec<Boundedness<P, T>>,
    pub lemma_probes: Vec<LemmaProbe<P, T>>,
}

impl<P, T> ConvergenceVerdict<P, T> {
    pub fn report(&self, mode: Mode) -> &ModeReport<P, T> {
        self.modes
            .iter()
            .find(|r| r.mode == mode)
            .expect("every mode is reported")
    }

    pub fn status(&self, mode: Mode) -> Status {
        self.report(mode).status
    }
}

// Everything measured for one witness in a single pass over k = 1..N.
struct WitnessScan<T> {
    block: Vec<T>,
    stat: Vec<Vec<T>>,
    counts: Vec<Vec<u64>>,
    cesaro: Vec<T>,
    strong: Vec<T>,
    strong_f: Vec<T>,
    probe: BoundProbe<T>,
    limit_dist: Option<T>,
}

fn scan_witness<P, T>(
    seq: &SetSequence<P, T>,
    limit: Option<&ClosedSet<P, T>>,
    f: &Modulus<T>,
    x: &P,
    grid: &[u64],
    eps: &[T],
) -> WitnessScan<T>
where
    P: Clone + Send + Sync + 'static,
    T: Scalar,
{
    let n_max = *grid.last().expect("grid is nonempty");
    let a = limit.map(|l| l.dist_to(x));
    let d: Vec<T> = (1..=n_max).map(|k| seq.dist(k, x)).collect();
    let mut out = WitnessScan {
        block: Vec::with_capacity(grid.len()),
        stat: vec![Vec::with_capacity(grid.len()); eps.len()],
        counts: vec![Vec::with_capacity(grid.len()); eps.len()],
        cesaro: Vec::with_capacity(grid.len()),
        strong: Vec::with_capacity(grid.len()),
        strong_f: Vec::with_capacity(grid.len()),
        probe: probe_values(d.iter().copied()),
        limit_dist: a,
    };
    let (mut s_d, mut s_dev, mut s_f) = (Sum::new(), Sum::new(), Sum::new());
    let mut counts = vec![0u64; eps.len()];
    let (mut b_max, mut b_lo, mut b_hi) = (T::zero(), T::infinity(), T::neg_infinity());
    let mut next = 0;
    for (i, &dk) in d.iter().enumerate() {
        let k = i as u64 + 1;
        s_d.add(dk);
        b_lo = b_lo.min(dk);
        b_hi = b_hi.max(dk);
        if let Some(a) = a {
            let dev = (dk - a).abs();
            s_dev.add(dev);
            s_f.add(f.value(dev));
            b_max = b_max.max(dev);
            for (c, &e) in counts.iter_mut().zip(eps) {
                if dev >= e {
                    *c += 1;
                }
            }
        }
        if k == grid[next] {
            let kt = T::of_u64(k);
            match a {
                Some(a) => {
                    out.block.push(b_max);
                    out.cesaro.push((s_d.value() / kt - a).abs());
                    out.strong.push(s_dev.value() / kt);
                    out.strong_f.push(s_f.value() / kt);
                    for (j, &c) in counts.iter().enumerate() {
                        out.counts[j].push(c);
                        out.stat[j].push(ratio(c, k));
                    }
                }
                None => {
                    out.block.push(b_hi - b_lo);
                    out.cesaro.push(s_d.value() / kt);
                }
            }
            b_max = T::zero();
            b_lo = T::infinity();
            b_hi = T::neg_infinity();
            next += 1;
            if next == grid.len() {
                break;
            }
        }
    }
    out
}

// Consistent iff every trace ends at or below `tol`. Otherwise refuted by the
// first trace (in the given order) whose last two values are both `bad`.
fn judge<P: Clone, T: Scalar>(
    traces: &[ModeTrace<P, T>],
    order: &[usize],
    grid: &[u64],
    tol: T,
    bad: impl Fn(&ModeTrace<P, T>, T) -> bool,
) -> (Status, Option<Refutation<P, T>>) {
    if traces.iter().all(|t| t.values.last().is_some_and(|&v| v <= tol)) {
        return (Status::Consistent, None);
    }
    if grid.len() >= 2 {
        for &i in order {
            let t = &traces[i];
            let m = t.values.len();
            if m >= 2 && bad(t, t.values[m - 1]) && bad(t, t.values[m - 2]) {
                return (
                    Status::Refuted,
                    Some(Refutation {
                        x: t.x.clone(),
                        epsilon: t.epsilon,
                        n: grid[m - 1],
                        value: t.values[m - 1],
                        previous: t.values[m - 2],
                    }),
                );
            }
        }
    }
    (Status::Inconclusive, None)
}

/// Classifies `seq` against the candidate `limit` in every mode.
///
/// A mode is `consistent` when all witness (and ε) traces end within `tol`,
/// `refuted` when some trace violates at both of the last two grid points,
/// and `inconclusive` otherwise. Modes other than plain Wijsman need a
/// candidate; the f-modes need an unbounded `f`.
pub fn classify<P, T>(
    seq: &SetSequence<P, T>,
    limit: Option<&ClosedSet<P, T>>,
    f: &Modulus<T>,
    params: &ClassifyParams<P, T>,
) -> ConvergenceVerdict<P, T>
where
    P: Clone + Send + Sync + 'static,
    T: Scalar,
{
    let grid = params.grid.points();
    let tol = params.tol;
    let mut eps: Vec<T> = params.epsilons.iter().copied().filter(|&e| e > T::zero()).collect();
    eps.sort_by(|a, b| b.partial_cmp(a).expect("epsilons are not NaN"));
    eps.dedup();

    let scans: Vec<WitnessScan<T>> = params
        .witnesses
        .par_iter()
        .map(|x| scan_witness(seq, limit, f, x, grid, &eps))
        .collect();
    let ws = &params.witnesses;
    let per_witness = |pick: &dyn Fn(&WitnessScan<T>) -> Vec<T>| -> Vec<ModeTrace<P, T>> {
        ws.iter()
            .zip(&scans)
            .map(|(x, s)| ModeTrace {
                x: x.clone(),
                epsilon: None,
                values: pick(s),
            })
            .collect()
    };
    // ε-major, witness-minor: the refutation search order.
    let per_eps = |pick: &dyn Fn(&WitnessScan<T>, usize) -> Vec<T>| -> Vec<ModeTrace<P, T>> {
        let mut out = Vec::new();
        for (j, &e) in eps.iter().enumerate() {
            for (x, s) in ws.iter().zip(&scans) {
                out.push(ModeTrace {
                    x: x.clone(),
                    epsilon: Some(e),
                    values: pick(s, j),
                });
            }
        }
        out
    };
    let in_order = |len: usize| (0..len).collect::<Vec<_>>();
    let mut modes = Vec::new();

    // Plain Wijsman: refutation searches ε descending, then witnesses.
    {
        let traces = per_witness(&|s| s.block.clone());
        let mut status = judge(&traces, &[], grid, tol, |_, _| false);
        if status.0 != Status::Consistent {
            'search: for &e in &eps {
                for t in &traces {
                    let m = t.values.len();
                    if m >= 2 && t.values[m - 1] >= e && t.values[m - 2] >= e {
                        status = (
                            Status::Refuted,
                            Some(Refutation {
                                x: t.x.clone(),
                                epsilon: Some(e),
                                n: grid[m - 1],
                                value: t.values[m - 1],
                                previous: t.values[m - 2],
                            }),
                        );
                        break 'search;
                    }
                }
            }
        }
        modes.push(ModeReport {
            mode: Mode::Wijsman,
            status: status.0,
            modulus: None,
            traces,
            refutation: status.1,
            note: limit
                .is_none()
                .then(|| "no candidate: block oscillation of d(x, A_k) is traced".into()),
        });
    }

    let needs_limit = |mode: Mode, modulus: Option<String>| ModeReport {
        mode,
        status: Status::Inconclusive,
        modulus,
        traces: Vec::new(),
        refutation: None,
        note: Some("needs a candidate limit".into()),
    };
    let fname = Some(f.name().to_string());

    if limit.is_none() {
        modes.push(needs_limit(Mode::Stat, None));
        modes.push(needs_limit(Mode::FStat, fname.clone()));
        let mut cesaro = needs_limit(Mode::Cesaro, None);
        cesaro.traces = per_witness(&|s| s.cesaro.clone());
        cesaro.note = Some("needs a candidate limit; raw means are traced".into());
        modes.push(cesaro);
        modes.push(needs_limit(Mode::StrongCesaro, None));
        modes.push(needs_limit(Mode::StrongCesaroF, fname.clone()));
    } else {
        let above_tol = |_: &ModeTrace<P, T>, v: T| v > tol;

        let traces = per_eps(&|s, j| s.stat[j].clone());
        let (status, refutation) = judge(&traces, &in_order(traces.len()), grid, tol, above_tol);
        modes.push(ModeReport {
            mode: Mode::Stat,
            status,
            modulus: None,
            traces,
            refutation,
            note: None,
        });

        if let Err(e) = f.require_unbounded() {
            let mut r = needs_limit(Mode::FStat, fname.clone());
            r.note = Some(e.to_string());
            modes.push(r);
        } else {
            let traces = per_eps(&|s, j| {
                s.counts[j]
                    .iter()
                    .zip(grid)
                    .map(|(&c, &n)| f.ratio_of_counts(c, n))
                    .collect()
            });
            let (status, refutation) = judge(&traces, &in_order(traces.len()), grid, tol, above_tol);
            modes.push(ModeReport {
                mode: Mode::FStat,
                status,
                modulus: fname.clone(),
                traces,
                refutation,
                note: None,
            });
        }

        for (mode, pick, modulus) in [
            (Mode::Cesaro, (|s: &WitnessScan<T>| s.cesaro.clone()) as fn(&WitnessScan<T>) -> Vec<T>, None),
            (Mode::StrongCesaro, |s: &WitnessScan<T>| s.strong.clone(), None),
            (Mode::StrongCesaroF, |s: &WitnessScan<T>| s.strong_f.clone(), fname.clone()),
        ] {
            let traces = per_witness(&pick);
            let (status, refutation) = judge(&traces, &in_order(traces.len()), grid, tol, above_tol);
            modes.push(ModeReport {
                mode,
                status,
                modulus,
                traces,
                refutation,
                note: None,
            });
        }
    }

    let boundedness = ws
        .iter()
        .zip(&scans)
        .map(|(x, s)| Boundedness {
            x: x.clone(),
            probe: s.probe,
            m_x: (!s.probe.growth).then(|| s.probe.sup + s.limit_dist.unwrap_or_else(T::zero)),
        })
        .collect();

    let lemma_probes = match (params.lemma_probe, limit) {
        (Some(k_max), Some(limit)) => lemma_probes(seq, limit, ws, &eps, grid, k_max),
        _ => Vec::new(),
    };

    ConvergenceVerdict {
        sequence: seq.name().to_string(),
        candidate: limit.map(|l| l.name().to_string()),
        modulus: f.name().to_string(),
        grid: grid.to_vec(),
        epsilons: eps,
        witnesses: ws.clone(),
        tol,
        modes,
        boundedness,
        lemma_probes,
    }
}

fn lemma_probes<P, T>(
    seq: &SetSequence<P, T>,
    limit: &ClosedSet<P, T>,
    ws: &[P],
    eps: &[T],
    grid: &[u64],
    k_max: usize,
) -> Vec<LemmaProbe<P, T>>
where
    P: Clone + Send + Sync + 'static,
    T: Scalar,
{
    let horizon = *grid.last().expect("grid is nonempty");
    let mut jobs = Vec::new();
    for &e in eps {
        for x in ws {
            jobs.push((x.clone(), e));
        }
    }
    jobs.into_par_iter()
        .map(|(x, e)| {
            let (seq, a) = (seq.clone(), limit.dist_to(&x));
            let xp = x.clone();
            let set = NatSet::from_predicate(format!("K(eps={e})"), move |k| {
                (seq.dist(k, &xp) - a).abs() >= e
            });
            match lemma_modulus_with_limit::<T>(&set, k_max, horizon) {
                Ok((g, schedule)) => {
                    let n = schedule
                        .n
                        .iter()
                        .rev()
                        .filter_map(|n| n.to_u64())
                        .find(|&n| n >= 1 && n <= horizon);
                    LemmaProbe {
                        x,
                        epsilon: e,
                        knots: schedule.n.iter().map(|n| n.to_string()).collect(),
                        n,
                        ratio: n.map(|n| g.ratio_of_counts(set.count_upto(n), n)),
                        error: None,
                    }
                }
                Err(err) => LemmaProbe {
                    x,
                    epsilon: e,
                    knots: Vec::new(),
                    n: None,
                    ratio: None,
                    error: Some(err.to_string()),
                },
            }
        })
        .collect()
}

/// Outcome of comparing two f-statistical verdicts with different candidates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessCheck<P, T> {
    /// Both verdicts report `f_stat` consistent.
    pub applicable: bool,
    /// `|d(x, A) - d(x, B)| <= tol` at every witness of either verdict.
    pub agree: bool,
    pub max_gap: T,
    pub worst: Option<P>,
}

/// When both verdicts are f-statistically consistent (possibly under
/// different moduli), the two candidates must agree at every witness.
pub fn uniqueness_consistency<P, T>(
    va: &ConvergenceVerdict<P, T>,
    a: &ClosedSet<P, T>,
    vb: &ConvergenceVerdict<P, T>,
    b: &ClosedSet<P, T>,
    tol: T,
) -> UniquenessCheck<P, T>
where
    P: Clone + Send + Sync + 'static,
    T: Scalar,
{
    let applicable =
        va.status(Mode::FStat) == Status::Consistent && vb.status(Mode::FStat) == Status::Consistent;
    let mut max_gap = T::zero();
    let mut worst = None;
    for x in va.witnesses.iter().chain(&vb.witnesses) {
        let gap = (a.dist_to(x) - b.dist_to(x)).abs();
        if gap > max_gap {
            max_gap = gap;
            worst = Some(x.clone());
        }
    }
    UniquenessCheck {
        applicable,
        agree: max_gap <= tol,
        max_gap,
        worst,
    }
}
