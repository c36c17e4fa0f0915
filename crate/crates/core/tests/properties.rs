use fdensity::modulus::{cantor, cantor_exact, check_axioms, extended_cantor, CombineKind};
use fdensity::wijsman::{ClosedSet, MetricSpace};
use fdensity::{density, Complex, GridSpec, Modulus, NatSet};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn closed_sets() -> Vec<NatSet> {
    vec![
        NatSet::squares(),
        NatSet::evens(),
        NatSet::odds(),
        NatSet::powers_of_two(),
        NatSet::complement(&NatSet::squares()),
        NatSet::union(&NatSet::squares(), &NatSet::powers_of_two()),
        NatSet::finite([3, 17, 400, 9_999]).unwrap(),
    ]
}

fn moduli() -> Vec<Modulus<f64>> {
    vec![
        Modulus::identity(),
        Modulus::log1p(),
        Modulus::power(0.5).unwrap(),
        Modulus::scale(3.0).unwrap(),
        Modulus::cantor_ext(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_counts_match_brute_force(n in 0u64..=10_000) {
        for set in closed_sets() {
            let brute = (1..=n).filter(|&k| set.contains(k)).count() as u64;
            prop_assert_eq!(set.count_upto(n), brute, "{}", set.name());
        }
    }

    #[test]
    fn f_density_ratio_in_unit_interval(n in 1u64..=1_000_000) {
        for set in closed_sets() {
            for f in moduli() {
                let r = density::f_density_ratio(&set, &f, n).unwrap();
                prop_assert!((0.0..=1.0).contains(&r), "{} {} {n}: {r}", set.name(), f.name());
            }
        }
    }

    #[test]
    fn scale_reproduces_natural_density(a in 0.01f64..100.0, n in 1u64..=1_000_000) {
        let f = Modulus::scale(a).unwrap();
        for set in closed_sets() {
            prop_assert_eq!(
                density::f_density_ratio(&set, &f, n).unwrap(),
                density::natural_density_ratio::<f64>(&set, n).unwrap()
            );
        }
    }

    #[test]
    fn cantor_functional_equations(x in 0.0f64..=1.0) {
        let g = cantor(x).unwrap();
        prop_assert!((cantor(x / 3.0).unwrap() - g / 2.0).abs() <= 1e-12);
        prop_assert!((cantor(1.0 - x).unwrap() - (1.0 - g)).abs() <= 1e-12);
        prop_assert!((extended_cantor(3.0 * x).unwrap() - 2.0 * g).abs() <= 1e-12);
    }

    #[test]
    fn cantor_exact_functional_equations(p in 0i64..=1_000, q in 1i64..=1_000) {
        prop_assume!(p <= q);
        let x = BigRational::new(BigInt::from(p), BigInt::from(q));
        let one = BigRational::from_integer(1.into());
        let g = cantor_exact(&x).unwrap();
        let third = &x / BigRational::from_integer(3.into());
        prop_assert_eq!(cantor_exact(&third).unwrap(), &g / BigRational::from_integer(2.into()));
        prop_assert_eq!(cantor_exact(&(&one - &x)).unwrap(), &one - &g);
    }

    #[test]
    fn distance_functions_are_one_lipschitz(
        pts in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 1..6),
        x in (-100.0f64..100.0, -100.0f64..100.0),
        y in (-100.0f64..100.0, -100.0f64..100.0),
    ) {
        let space = MetricSpace::plane(&[]);
        let pts: Vec<Complex<f64>> = pts.into_iter().map(|(a, b)| Complex::new(a, b)).collect();
        let (x, y) = (Complex::new(x.0, x.1), Complex::new(y.0, y.1));
        let sets = [
            ClosedSet::finite_set(&space, pts.clone()).unwrap(),
            ClosedSet::circle(pts[0], 1.5).unwrap(),
            ClosedSet::point(pts[0]),
        ];
        for a in &sets {
            let gap = (a.dist_to(&x) - a.dist_to(&y)).abs();
            prop_assert!(gap <= space.dist(&x, &y) + 1e-12, "{}", a.name());
        }
    }

    #[test]
    fn combinations_remain_moduli(a in 0.1f64..5.0, b in 0.1f64..5.0, i in 0usize..5, j in 0usize..5) {
        let ms = moduli();
        let grid = GridSpec::geometric(1e-3, 1e3, 1.5).unwrap();
        for kind in [CombineKind::Linear, CombineKind::Max, CombineKind::Compose] {
            let m = Modulus::combine(kind, a, b, &ms[i], &ms[j]).unwrap();
            let report = check_axioms(&m, &grid).unwrap();
            prop_assert!(report.zero_ok() && report.monotone_ok() && report.subadditive_ok(),
                "{}: {:?}", m.name(), report.counterexample());
        }
    }
}

#[test]
fn f32_matches_f64_on_closed_counts() {
    let lg32 = Modulus::<f32>::log1p();
    let lg64 = Modulus::<f64>::log1p();
    for n in [10u64, 1_000, 1 << 20] {
        let r32 = density::f_density_ratio(&NatSet::squares(), &lg32, n).unwrap();
        let r64 = density::f_density_ratio(&NatSet::squares(), &lg64, n).unwrap();
        assert!((r32 as f64 - r64).abs() < 1e-6);
    }
}
