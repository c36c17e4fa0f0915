//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use fdensity::convergence::{
    admissible_delta, beta_bound, cesaro_gap, cesaro_mean, classify, count_scaling,
    exceptional_set, modulus_split, multiplicative_chain, stat_ratio, strong_cesaro_block_mean,
    strong_cesaro_f_block_mean, ClassifyParams, DeviationSpec, Mode, Status, DEFAULT_LEVELS,
};
use fdensity::density::{f_density_ratio, f_density_ratio_exact, natural_density_ratio};
use fdensity::modulus::{
    cantor, concavity_witness, extended_cantor, lemma_modulus_from_set, slow_variation_exact,
    subadditivity_sample,
};
use fdensity::wijsman::{example_sequence, ClosedSet, SequenceId, SetSequence};
use fdensity::{BigRational, Complex, GridSpec, HorizonGrid, Modulus, NatSet};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))?;
    Ok(t)
}

fn re(x: f64) -> Complex<f64> {
    Complex::new(x, 0.0)
}

fn c1() -> Check {
    let start = Instant::now();
    let n = 1 << 20;
    let sq = NatSet::squares();
    let r = f_density_ratio(&sq, &Modulus::<f64>::log1p(), n).map_err(|e| e.to_string())?;
    let d: f64 = natural_density_ratio(&sq, n).map_err(|e| e.to_string())?;
    ensure((0.49..=0.51).contains(&r), || format!("log ratio {r}"))?;
    ensure(d <= 0.002, || format!("natural ratio {d}"))?;
    let t = within(start, Duration::from_secs(1))?;
    Ok(format!("log ratio {r:.6}, natural ratio {d:.6}, {t:?}"))
}

fn c2() -> Check {
    let start = Instant::now();
    let lg = Modulus::<f64>::log1p();
    let mut out = Vec::new();
    for set in [NatSet::evens(), NatSet::odds()] {
        let rs: Vec<f64> = (10..=20)
            .map(|j| f_density_ratio(&set, &lg, 1 << j).unwrap())
            .collect();
        let last = *rs.last().unwrap();
        ensure(last >= 0.94, || format!("{} ratio at 2^20 is {last}", set.name()))?;
        ensure(rs.windows(2).all(|w| w[1] > w[0]), || format!("{} not increasing: {rs:?}", set.name()))?;
        out.push(format!("{} {last:.6}", set.name()));
    }
    let t = within(start, Duration::from_secs(1))?;
    Ok(format!("{}, {t:?}", out.join(", ")))
}

fn c3() -> Check {
    let start = Instant::now();
    let ex = example_sequence::<f64>(SequenceId::R03);
    let a = ex.candidate.clone().unwrap();
    let mut params = ClassifyParams::new(ex.space.witnesses().to_vec());
    params.grid = HorizonGrid::powers_of_two(4, 14);
    params.epsilons = vec![0.5];
    params.tol = 0.1;
    let v = classify(&ex.sequence, Some(&a), &Modulus::log1p(), &params);
    let w = v.report(Mode::Wijsman);
    ensure(w.status == Status::Refuted, || format!("wijsman {:?}", w.status))?;
    let eps = w.refutation.as_ref().and_then(|r| r.epsilon);
    ensure(eps == Some(0.5), || format!("refuted at ε = {eps:?}"))?;
    ensure(v.status(Mode::Stat) == Status::Consistent, || format!("stat {:?}", v.status(Mode::Stat)))?;
    let mut worst = 0.0f64;
    for x in ex.space.witnesses() {
        let spec = DeviationSpec::new(*x, 0.5, a.clone()).unwrap();
        worst = worst.max(stat_ratio(&ex.sequence, &spec, 1 << 14).unwrap());
    }
    ensure(worst <= 0.02, || format!("stat ratio {worst}"))?;
    let fs = v.status(Mode::FStat);
    ensure(matches!(fs, Status::Refuted | Status::Inconclusive), || format!("f_stat {fs:?}"))?;
    let t = within(start, Duration::from_secs(5))?;
    Ok(format!("wijsman refuted at ε=0.5, stat ratio {worst:.5}, f_stat {fs:?}, {t:?}"))
}

fn c4() -> Check {
    let ex = example_sequence::<f64>(SequenceId::E2);
    let a = ex.candidate.clone().unwrap();
    let m100 = cesaro_mean(&ex.sequence, &re(0.0), 100).unwrap();
    ensure(m100 == 3.85, || format!("mean at 100 is {m100}"))?;
    let big = cesaro_mean(&ex.sequence, &re(0.0), 1 << 14).unwrap();
    ensure(big >= 40.0, || format!("mean at 2^14 is {big}"))?;
    let spec = DeviationSpec::new(re(0.0), 0.1, a).unwrap();
    let s = stat_ratio(&ex.sequence, &spec, 1 << 14).unwrap();
    ensure(s <= 0.01, || format!("stat ratio {s}"))?;
    Ok(format!("mean(100) = {m100}, mean(2^14) = {big:.3}, stat ratio {s:.5}"))
}

// Cesàro mean of d(x, A_k) with A_k = {-1} (k even), {1} (k odd).
fn e4_closed_form(x: f64, n: u64) -> f64 {
    let nf = n as f64;
    if n.is_multiple_of(2) {
        if x.abs() <= 1.0 {
            1.0
        } else {
            x.abs()
        }
    } else if x.abs() <= 1.0 {
        1.0 - x / nf
    } else {
        (x - 1.0 / nf).abs()
    }
}

fn c5() -> Check {
    let ex = example_sequence::<f64>(SequenceId::E4);
    let mut max_err = 0.0f64;
    for n in 1..=(1u64 << 10) {
        let m0 = cesaro_mean(&ex.sequence, &re(0.0), n).unwrap();
        ensure(m0 == 1.0, || format!("mean at x=0, n={n} is {m0}"))?;
        if n % 2 == 0 {
            let m2 = cesaro_mean(&ex.sequence, &re(2.0), n).unwrap();
            ensure(m2 == 2.0, || format!("mean at x=2, n={n} is {m2}"))?;
        }
        for x in ex.space.witnesses() {
            let m = cesaro_mean(&ex.sequence, x, n).unwrap();
            max_err = max_err.max((m - e4_closed_form(x.re, n)).abs());
        }
    }
    ensure(max_err <= 1e-12, || format!("closed form error {max_err:e}"))?;
    Ok(format!("exact means up to 2^10, closed form error {max_err:e}"))
}

fn c6() -> Check {
    let start = Instant::now();
    let ex = example_sequence::<f64>(SequenceId::E3);
    let a = ex.candidate.clone().unwrap();
    let lg = Modulus::log1p();
    for r in 5..=14 {
        let m = strong_cesaro_block_mean(&ex.sequence, &re(0.0), &a, r).unwrap();
        ensure(m == 1.0, || format!("block mean at r={r} is {m}"))?;
    }
    let mut at10 = f64::NAN;
    for r in 10..=14 {
        let m = strong_cesaro_f_block_mean(&ex.sequence, &re(0.0), &a, &lg, r).unwrap();
        ensure(m <= 0.01, || format!("f-block mean at r={r} is {m}"))?;
        if r == 10 {
            at10 = m;
        }
    }
    ensure((at10 - 0.00677).abs() <= 1e-3, || format!("f-block mean at r=10 is {at10}"))?;
    let t = within(start, Duration::from_secs(5))?;
    Ok(format!("block means 1.0 for r=5..14, f-block mean at r=10 {at10:.5}, {t:?}"))
}

fn c7() -> Check {
    let start = Instant::now();
    let sq = NatSet::squares();
    let (f, s) = lemma_modulus_from_set::<f64>(&sq, 20).map_err(|e| e.to_string())?;
    s.verify(&sq)?;
    let form = f.exact_form().unwrap();
    for (k, x) in s.n.iter().enumerate() {
        ensure(form.eval_int(x) == BigRational::from_integer(k.into()), || format!("f(n_{k}) != {k}"))?;
    }
    let n20 = &s.n[20];
    let r = f_density_ratio_exact(&sq, &f, n20).map_err(|e| e.to_string())?;
    let bound = BigRational::new(BigInt::from(18), BigInt::from(20));
    ensure(r >= bound, || format!("exact ratio {r} < 18/20"))?;
    ensure(form.slopes().windows(2).all(|w| w[1] < w[0]), || "slopes not strictly decreasing".into())?;
    let lo = BigRational::from_integer(1.into());
    let hi = BigRational::new(BigInt::from(5), BigInt::from(4));
    let sv = slow_variation_exact(&f, &[2, 10], &s.n[19..=20]).map_err(|e| e.to_string())?;
    for row in &sv {
        ensure(row.ratio >= lo && row.ratio <= hi, || format!("f({}x)/f(x) = {} at a knot", row.a, row.ratio))?;
    }
    let worst = sv.iter().map(|r| r.ratio.clone()).max().unwrap();
    let t = within(start, Duration::from_secs(10))?;
    Ok(format!(
        "n_20 has {} bits, ratio at n_20 {:.6}, worst slow-variation ratio {:.6}, {t:?}",
        n20.bits(),
        num_traits::ToPrimitive::to_f64(&r).unwrap(),
        num_traits::ToPrimitive::to_f64(&worst).unwrap()
    ))
}

fn c8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x: f64 = rng.gen_range(0.0..=1.0);
        let g = cantor(x).unwrap();
        worst = worst.max((cantor(x / 3.0).unwrap() - g / 2.0).abs());
        worst = worst.max((cantor(1.0 - x).unwrap() - (1.0 - g)).abs());
    }
    ensure(worst <= 1e-12, || format!("functional equation error {worst:e}"))?;
    let q = cantor(0.25f64).unwrap();
    ensure((q - 1.0 / 3.0).abs() <= 1e-12, || format!("G(1/4) = {q}"))?;
    let ge = Modulus::<f64>::cantor_ext();
    let w = concavity_witness(&ge, &GridSpec::linear(0.0, 9.0, 0.01).unwrap()).unwrap();
    ensure(w == Some((1.0, 3.0)), || format!("concavity witness {w:?}"))?;
    let sub = subadditivity_sample(&ge, 0.0, 9.0, 10_000, 8);
    ensure(sub.passed, || format!("subadditivity violated: {:?}", sub.counterexample))?;
    ensure(extended_cantor(9.0).unwrap() == 4.0, || "G_e(9) != 4".into())?;
    Ok(format!("functional equation error {worst:e}, G(1/4) = {q}, witness (1, 3)"))
}

fn random_modulus(rng: &mut ChaCha8Rng, concave_only: bool) -> Modulus<f64> {
    let top = if concave_only { 4 } else { 5 };
    match rng.gen_range(0..top) {
        0 => Modulus::identity(),
        1 => Modulus::log1p(),
        2 => Modulus::power(rng.gen_range(0.05..=1.0)).unwrap(),
        3 => Modulus::scale(rng.gen_range(0.05..20.0)).unwrap(),
        _ => Modulus::cantor_ext(),
    }
}

struct Trial {
    seq: SetSequence<Complex<f64>, f64>,
    x: Complex<f64>,
    a: ClosedSet<Complex<f64>, f64>,
    n: u64,
    eps: f64,
}

fn random_trial(rng: &mut ChaCha8Rng) -> Trial {
    let n = rng.gen_range(1..=200u64);
    let spread = 10f64.powf(rng.gen_range(-2.0..1.5));
    let pts: Vec<Complex<f64>> = (0..n)
        .map(|_| Complex::new(rng.gen_range(-spread..spread), rng.gen_range(-spread..spread)))
        .collect();
    let seq = SetSequence::new("random", move |k, x: &Complex<f64>| (x - pts[(k - 1) as usize]).norm());
    Trial {
        seq,
        x: Complex::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
        a: ClosedSet::point(Complex::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))),
        n,
        eps: 10f64.powf(rng.gen_range(-2.0..0.5)),
    }
}

fn c9() -> Check {
    const TRIALS: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sample: Vec<f64> = (-12..=12).map(|i| 2f64.powi(i)).collect();
    let mut violations = [0usize; 5];
    for _ in 0..TRIALS {
        let f = random_modulus(&mut rng, false);
        let m = rng.gen_range(1..=1_000_000u64);
        let p = rng.gen_range(1..=100u64);
        let n = rng.gen_range(1..=p * m);
        if !count_scaling(&f, n, m, p).unwrap().holds {
            violations[0] += 1;
        }
    }
    for _ in 0..TRIALS {
        let t = random_trial(&mut rng);
        if !cesaro_gap(&t.seq, &t.x, &t.a, t.eps, t.n).unwrap().holds {
            violations[1] += 1;
        }
    }
    for _ in 0..TRIALS {
        let t = random_trial(&mut rng);
        let f = random_modulus(&mut rng, false);
        let delta = admissible_delta(&f, t.eps).unwrap() * rng.gen_range(0.01..=1.0);
        if !modulus_split(&t.seq, &t.x, &t.a, &f, t.eps, delta, t.n).unwrap().holds {
            violations[2] += 1;
        }
    }
    for _ in 0..TRIALS {
        let t = random_trial(&mut rng);
        let f = random_modulus(&mut rng, true);
        if !beta_bound(&t.seq, &t.x, &t.a, &f, t.n).unwrap().check.holds {
            violations[3] += 1;
        }
    }
    for _ in 0..TRIALS {
        let t = random_trial(&mut rng);
        let f = random_modulus(&mut rng, false);
        if !multiplicative_chain(&t.seq, &t.x, &t.a, &f, t.eps, t.n, &sample).unwrap().check.holds {
            violations[4] += 1;
        }
    }
    ensure(violations.iter().all(|&v| v == 0), || {
        format!("violations (scaling, cesaro gap, δ-split, β, chain): {violations:?}")
    })?;
    Ok(format!("{TRIALS} trials each for five inequalities, 0 violations"))
}

fn c10() -> Check {
    let ex = example_sequence::<f64>(SequenceId::R03);
    let a = ex.candidate.clone().unwrap();
    let id = Modulus::identity();
    let h = 1u64 << 14;
    let r = exceptional_set(&ex.sequence, &re(0.0), &a, &id, h, &DEFAULT_LEVELS, 0.01).map_err(|e| e.to_string())?;
    let squares: Vec<u64> = (1..=128u64).map(|i| i * i).filter(|&k| k >= 2 && k <= h).collect();
    ensure(r.set == squares, || format!("set has {} elements, expected {}", r.set.len(), squares.len()))?;
    ensure(r.max_deviation_outside == 0.0, || format!("max deviation outside {}", r.max_deviation_outside))?;
    ensure(r.f_density_ratio_at_horizon <= 0.01, || format!("ratio {}", r.f_density_ratio_at_horizon))?;
    let e4 = example_sequence::<f64>(SequenceId::E4);
    let r4 = exceptional_set(&e4.sequence, &re(0.0), &ClosedSet::point(re(0.0)), &id, h, &DEFAULT_LEVELS, 0.01)
        .map_err(|e| e.to_string())?;
    ensure(r4.target_missed, || "E4 did not report target_missed".into())?;
    Ok(format!(
        "{} squares, ratio {:.6}, E4 target missed",
        r.set.len(),
        r.f_density_ratio_at_horizon
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "squares under log1p", c1),
        (2, "evens and odds under log1p", c2),
        (3, "circles at square indices", c3),
        (4, "far singletons at square indices", c4),
        (5, "alternating singletons", c5),
        (6, "dyadic blocks at powers of two", c6),
        (7, "constructed modulus on squares", c7),
        (8, "Cantor function suite", c8),
        (9, "finite-n inequality suite", c9),
        (10, "exceptional sets", c10),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {why}");
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
