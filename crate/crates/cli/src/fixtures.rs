//! The built-in example suite behind `examples`.

use fdensity::convergence::{
    cesaro_mean, classify, stat_ratio, strong_cesaro_block_mean, strong_cesaro_f_block_mean, ClassifyParams,
    DeviationSpec, Mode, Status,
};
use fdensity::density::{density_trend, f_density_ratio_exact, TrendOptions};
use fdensity::modulus::{cantor, concavity_witness, lemma_modulus_from_set, subadditivity_sample};
use fdensity::trace::Verdict;
use fdensity::wijsman::{example_sequence, SequenceId};
use fdensity::{BigRational, Complex, GridSpec, HorizonGrid, Modulus, NatSet};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct FixtureOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Outcome = Result<String, String>;
type Fixture<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn re(x: f64) -> Complex<f64> {
    Complex::new(x, 0.0)
}

fn verdict_text(v: &Verdict<f64>) -> String {
    match v {
        Verdict::ConsistentWith { limit, .. } => format!("consistent with {limit}"),
        Verdict::Inconclusive => "inconclusive".into(),
        Verdict::Diverging => "diverging".into(),
    }
}

fn squares_density(grid: &HorizonGrid, tol: f64) -> Outcome {
    let sq = NatSet::squares();
    let lg = Modulus::<f64>::log1p();
    let opts = |target| TrendOptions {
        tol,
        target: Some(target),
    };
    let f = density_trend(&sq, Some(&lg), grid, opts(0.5)).map_err(|e| e.to_string())?;
    let d = density_trend(&sq, None, grid, opts(0.0)).map_err(|e| e.to_string())?;
    let (fl, dl) = (f.last_ratio().unwrap(), d.last_ratio().unwrap());
    ensure(f.trace.verdict.is_consistent(), || {
        format!("log density {fl} at n={}: {}", grid.max(), verdict_text(&f.trace.verdict))
    })?;
    ensure(d.trace.verdict.is_consistent(), || {
        format!("natural density {dl} at n={}: {}", grid.max(), verdict_text(&d.trace.verdict))
    })?;
    Ok(format!("log density {fl:.6} -> 1/2, natural density {dl:.6} -> 0 at n={}", grid.max()))
}

fn r03(grid: &HorizonGrid, tol: f64) -> Outcome {
    let ex = example_sequence::<f64>(SequenceId::R03);
    let a = ex.candidate.clone().unwrap();
    let mut params = ClassifyParams::new(ex.space.witnesses().to_vec());
    params.grid = grid.clone();
    params.epsilons = vec![0.5];
    params.tol = tol;
    let v = classify(&ex.sequence, Some(&a), &Modulus::identity(), &params);
    ensure(v.status(Mode::Wijsman) == Status::Refuted, || {
        format!("wijsman {:?}", v.status(Mode::Wijsman))
    })?;
    let spec = DeviationSpec::new(re(0.0), 0.5, a).map_err(|e| e.to_string())?;
    let s: f64 = stat_ratio(&ex.sequence, &spec, grid.max()).map_err(|e| e.to_string())?;
    ensure(s <= tol, || format!("stat ratio {s} at n={} exceeds {tol}", grid.max()))?;
    Ok(format!("wijsman refuted, stat ratio {s:.6} at n={}", grid.max()))
}

fn e2(grid: &HorizonGrid, tol: f64) -> Outcome {
    let ex = example_sequence::<f64>(SequenceId::E2);
    let a = ex.candidate.clone().unwrap();
    let m100 = cesaro_mean(&ex.sequence, &re(0.0), 100).map_err(|e| e.to_string())?;
    ensure(m100 == 3.85, || format!("mean at n=100 is {m100}, expected 3.85"))?;
    let means: Vec<f64> = grid
        .points()
        .iter()
        .map(|&n| cesaro_mean(&ex.sequence, &re(0.0), n).unwrap())
        .collect();
    let k = means.len();
    ensure(k >= 3 && means[k - 1] > means[k - 2] && means[k - 2] > means[k - 3], || {
        format!("means do not grow: {:?}", &means[k.saturating_sub(3)..])
    })?;
    let spec = DeviationSpec::new(re(0.0), 0.1, a).map_err(|e| e.to_string())?;
    let s: f64 = stat_ratio(&ex.sequence, &spec, grid.max()).map_err(|e| e.to_string())?;
    ensure(s <= tol, || format!("stat ratio {s} at n={} exceeds {tol}", grid.max()))?;
    Ok(format!("mean(100) = 3.85, mean({}) = {:.4}, stat ratio {s:.6}", grid.max(), means[k - 1]))
}

fn e4(grid: &HorizonGrid) -> Outcome {
    let ex = example_sequence::<f64>(SequenceId::E4);
    let top = grid.max().min(1 << 10);
    let mut err = 0.0f64;
    for n in 1..=top {
        let m0 = cesaro_mean(&ex.sequence, &re(0.0), n).unwrap();
        ensure(m0 == 1.0, || format!("mean at x=0, n={n} is {m0}"))?;
        for x in ex.space.witnesses() {
            let m = cesaro_mean(&ex.sequence, x, n).unwrap();
            let (x, nf) = (x.re, n as f64);
            let closed = match (n % 2 == 0, x.abs() <= 1.0) {
                (true, true) => 1.0,
                (true, false) => x.abs(),
                (false, true) => 1.0 - x / nf,
                (false, false) => (x - 1.0 / nf).abs(),
            };
            err = err.max((m - closed).abs());
        }
    }
    ensure(err <= 1e-12, || format!("closed form error {err:e}"))?;
    Ok(format!("mean at x=0 is 1 for n <= {top}, closed form error {err:e}"))
}

fn e3(grid: &HorizonGrid, tol: f64) -> Outcome {
    let ex = example_sequence::<f64>(SequenceId::E3);
    let a = ex.candidate.clone().unwrap();
    let lg = Modulus::log1p();
    let r_max = (63 - grid.max().leading_zeros()).saturating_sub(1).max(5);
    for r in 5..=r_max {
        let m = strong_cesaro_block_mean(&ex.sequence, &re(0.0), &a, r).map_err(|e| e.to_string())?;
        ensure(m == 1.0, || format!("block mean at r={r} is {m}"))?;
    }
    let fb = strong_cesaro_f_block_mean(&ex.sequence, &re(0.0), &a, &lg, r_max).map_err(|e| e.to_string())?;
    ensure(fb <= tol, || format!("f-block mean at r={r_max} is {fb}, above {tol}"))?;
    Ok(format!("block means 1 for r=5..{r_max}, f-block mean {fb:.6} at r={r_max}"))
}

fn constructions() -> Outcome {
    let sq = NatSet::squares();
    let (f, s) = lemma_modulus_from_set::<f64>(&sq, 20).map_err(|e| e.to_string())?;
    s.verify(&sq)?;
    let form = f.exact_form().unwrap();
    for (k, x) in s.n.iter().enumerate() {
        ensure(form.eval_int(x) == BigRational::from_integer(k.into()), || format!("f(n_{k}) != {k}"))?;
    }
    let r = f_density_ratio_exact(&sq, &f, &s.n[20]).map_err(|e| e.to_string())?;
    ensure(r >= BigRational::new(18.into(), 20.into()), || format!("ratio at n_20 is {r}"))?;
    let q = cantor(0.25f64).map_err(|e| e.to_string())?;
    ensure((q - 1.0 / 3.0).abs() <= 1e-12, || format!("G(1/4) = {q}"))?;
    let ge = Modulus::<f64>::cantor_ext();
    let w = concavity_witness(&ge, &GridSpec::linear(0.0, 9.0, 0.01).unwrap()).map_err(|e| e.to_string())?;
    ensure(w == Some((1.0, 3.0)), || format!("concavity witness {w:?}"))?;
    let sub = subadditivity_sample(&ge, 0.0, 9.0, 10_000, 0);
    ensure(sub.passed, || format!("subadditivity counterexample {:?}", sub.counterexample))?;
    Ok("lemma(squares,20) invariants and f(n_k)=k hold, G(1/4)=1/3, G_e witness (1,3)".into())
}

pub fn run(grid_max: u64, tol: f64) -> Vec<FixtureOutcome> {
    let grid = HorizonGrid::geometric(16.min(grid_max), grid_max, 2.0).expect("validated grid max");
    let fixtures: [(&'static str, Fixture); 6] = [
        ("squares-density", Box::new(|| squares_density(&grid, tol))),
        ("R03", Box::new(|| r03(&grid, tol))),
        ("E2", Box::new(|| e2(&grid, tol))),
        ("E4", Box::new(|| e4(&grid))),
        ("E3", Box::new(|| e3(&grid, tol))),
        ("constructions", Box::new(constructions)),
    ];
    fixtures
        .iter()
        .map(|(name, f)| {
            let (passed, detail) = match f() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            FixtureOutcome { name, passed, detail }
        })
        .collect()
}
