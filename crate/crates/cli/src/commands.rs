//! The `density`, `modulus` and `classify` commands.

use std::path::PathBuf;

use fdensity::convergence::{classify, ClassifyParams, ConvergenceVerdict, Mode, Status};
use fdensity::density::{density_trend, DensityTrace, TrendOptions};
use fdensity::expr::{parse_modulus, parse_set};
use fdensity::modulus::{
    beta_limit, check_axioms, concavity_witness, slow_variation_profile, AxiomReport, BetaLimit,
    SlowVariationProfile,
};
use fdensity::wijsman::{example_sequence, SequenceId, PointLabel};
use fdensity::{Claims, Complex, GridSpec, Modulus};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::config::{epsilons, horizon_grid, point_grid, tolerance, Eps, Format};
use crate::output::{num, write_csv, write_json};
use crate::CliError;

pub struct DensityArgs {
    pub set: String,
    pub modulus: Option<String>,
    pub grid: String,
    pub tol: f64,
    pub target: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

pub fn density(a: &DensityArgs) -> Result<DensityTrace<f64>, CliError> {
    let set = parse_set(&a.set)?;
    let f = a.modulus.as_deref().map(parse_modulus::<f64>).transpose()?;
    let grid = horizon_grid(&a.grid)?;
    let opts = TrendOptions {
        tol: tolerance(a.tol)?,
        target: a.target,
    };
    let t = density_trend(&set, f.as_ref(), &grid, opts).map_err(CliError::from_lib_usage)?;
    match a.format {
        Format::Json => write_json(a.out.as_deref(), &t)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = match (&t.f_counts, &t.f_ns) {
                (Some(fc), Some(fnn)) => t
                    .trace
                    .rows()
                    .zip(&t.counts)
                    .zip(fc.iter().zip(fnn))
                    .map(|(((n, r), c), (fc, fnn))| {
                        vec![n.to_string(), c.to_string(), num(*fc), num(*fnn), num(r)]
                    })
                    .collect(),
                _ => t
                    .trace
                    .rows()
                    .zip(&t.counts)
                    .map(|((n, r), c)| vec![n.to_string(), c.to_string(), num(r)])
                    .collect(),
            };
            let header: &[&str] = if t.f_counts.is_some() {
                &["n", "count", "f_count", "f_n", "ratio"]
            } else {
                &["n", "count", "ratio"]
            };
            write_csv(a.out.as_deref(), header, &rows)?;
        }
    }
    Ok(t)
}

pub struct ModulusArgs {
    pub expr: String,
    pub grid: String,
    pub out: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Serialize)]
pub struct KnotRow {
    pub k: usize,
    /// Exact decimal when short, otherwise `~m.mmmmeE`.
    pub x: String,
    pub bits: u64,
    pub value: String,
    /// Exact `f(2x)/f(x)` and `f(10x)/f(x)` as decimals; absent at `x = 0`.
    pub ratio_a2: Option<f64>,
    pub ratio_a10: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ModulusReport {
    pub modulus: String,
    pub claims: Claims,
    pub axioms: AxiomReport<f64>,
    pub beta: BetaLimit<f64>,
    pub slow_variation: SlowVariationProfile<f64>,
    pub slowly_varying: bool,
    pub concavity_witness: Option<(f64, f64)>,
    pub knots: Vec<KnotRow>,
}

const SV_SCALES: [f64; 3] = [2.0, 4.0, 10.0];

fn approx_decimal(x: &BigUint) -> String {
    if x.bits() <= 128 {
        return x.to_string();
    }
    let shift = x.bits() - 64;
    let top = (x >> shift).to_f64().expect("64-bit prefix");
    let log10 = top.log10() + shift as f64 * std::f64::consts::LOG10_2;
    let exp = log10.floor();
    format!("~{:.4}e{}", 10f64.powf(log10 - exp), exp as i64)
}

pub fn modulus(a: &ModulusArgs) -> Result<ModulusReport, CliError> {
    let m: Modulus<f64> = parse_modulus(&a.expr)?;
    let grid = point_grid(&a.grid)?;
    let axioms = check_axioms(&m, &grid).map_err(CliError::from_lib_usage)?;
    let wide = GridSpec::geometric(1e-3, 1e12, 10.0).expect("fixed grid");
    let beta = beta_limit(&m, &wide).map_err(CliError::from_lib_usage)?;
    let sv_grid = GridSpec::geometric(10.0, 1e12, 10.0).expect("fixed grid");
    let slow_variation = slow_variation_profile(&m, &SV_SCALES, &sv_grid, None).map_err(CliError::from_lib_usage)?;
    let concavity = concavity_witness(&m, &grid).map_err(CliError::from_lib_usage)?;
    let knots = m
        .exact_form()
        .map(|form| {
            form.abscissas()
                .iter()
                .enumerate()
                .map(|(k, x)| {
                    let fx = form.eval_int(x);
                    let ratio = |a: u32| {
                        (!fx.is_zero()).then(|| {
                            let fax = form.eval_int(&(x * a));
                            fax.to_f64().unwrap_or(f64::NAN) / fx.to_f64().unwrap_or(f64::NAN)
                        })
                    };
                    KnotRow {
                        k,
                        x: approx_decimal(x),
                        bits: x.bits(),
                        value: fx.to_string(),
                        ratio_a2: ratio(2),
                        ratio_a10: ratio(10),
                    }
                })
                .collect()
        })
        .unwrap_or_default();
    let report = ModulusReport {
        modulus: m.name().to_string(),
        claims: m.claims(),
        slowly_varying: slow_variation.consistent(),
        axioms,
        beta,
        slow_variation,
        concavity_witness: concavity,
        knots,
    };
    match a.format {
        Format::Json => write_json(a.out.as_deref(), &report)?,
        Format::Csv => write_csv(a.out.as_deref(), &["item", "value"], &modulus_rows(&report))?,
    }
    Ok(report)
}

fn modulus_rows(r: &ModulusReport) -> Vec<Vec<String>> {
    let ax = &r.axioms;
    let mut rows = vec![
        vec!["modulus".into(), r.modulus.clone()],
        vec!["grid_points".into(), ax.grid_points.to_string()],
        vec!["zero".into(), ax.zero_ok().to_string()],
        vec!["monotone".into(), ax.monotone_ok().to_string()],
        vec!["subadditive".into(), ax.subadditive_ok().to_string()],
        vec!["continuity".into(), ax.continuity_ok().to_string()],
    ];
    if let Some(c) = ax.counterexample() {
        rows.push(vec!["counterexample".into(), format!("{} {} {} {}", c.x, c.y, c.lhs, c.rhs)]);
    }
    rows.push(vec!["beta_estimate".into(), num(r.beta.beta_estimate)]);
    rows.push(vec!["beta_inf_estimate".into(), num(r.beta.inf_estimate)]);
    for row in &r.slow_variation.rows {
        let fr = row.final_ratio.map(num).unwrap_or_default();
        rows.push(vec![format!("sv_ratio_a={}", row.a), fr]);
    }
    rows.push(vec!["slowly_varying".into(), r.slowly_varying.to_string()]);
    let cw = r.concavity_witness.map(|(x, y)| format!("{x} {y}")).unwrap_or_else(|| "none".into());
    rows.push(vec!["concavity_witness".into(), cw]);
    for k in &r.knots {
        let r = |v: Option<f64>| v.map(num).unwrap_or_else(|| "-".into());
        rows.push(vec![
            format!("knot_{}", k.k),
            format!("{} {} {} {}", k.x, k.value, r(k.ratio_a2), r(k.ratio_a10)),
        ]);
    }
    rows
}

pub struct ClassifyArgs {
    pub seq: String,
    pub modulus: String,
    pub grid: String,
    pub eps: Eps,
    pub tol: f64,
    pub lemma_probe: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

pub type Verdict = ConvergenceVerdict<Complex<f64>, f64>;

pub fn classify_cmd(a: &ClassifyArgs) -> Result<Verdict, CliError> {
    let id: SequenceId = a.seq.parse()?;
    let f: Modulus<f64> = parse_modulus(&a.modulus)?;
    let ex = example_sequence::<f64>(id);
    let mut params = ClassifyParams::new(ex.space.witnesses().to_vec());
    params.grid = horizon_grid(&a.grid)?;
    params.epsilons = epsilons(&a.eps)?;
    params.tol = tolerance(a.tol)?;
    params.lemma_probe = a.lemma_probe;
    let v = classify(&ex.sequence, ex.candidate.as_ref(), &f, &params);
    match a.format {
        Format::Json => write_json(a.out.as_deref(), &v)?,
        Format::Csv => {
            let mut rows = Vec::new();
            for r in &v.modes {
                for t in &r.traces {
                    for (n, value) in v.grid.iter().zip(&t.values) {
                        rows.push(vec![
                            r.mode.as_str().to_string(),
                            t.x.label(),
                            t.epsilon.map(num).unwrap_or_default(),
                            n.to_string(),
                            num(*value),
                        ]);
                    }
                }
            }
            write_csv(a.out.as_deref(), &["mode", "x", "epsilon", "n", "value"], &rows)?;
        }
    }
    Ok(v)
}

pub fn status_lines(v: &Verdict) -> Vec<String> {
    Mode::ALL
        .iter()
        .map(|&m| {
            let r = v.report(m);
            let status = match r.status {
                Status::Consistent => "consistent",
                Status::Refuted => "refuted",
                Status::Inconclusive => "inconclusive",
            };
            match &r.note {
                Some(note) => format!("{}: {status} ({note})", m.as_str()),
                None => format!("{}: {status}", m.as_str()),
            }
        })
        .collect()
}
