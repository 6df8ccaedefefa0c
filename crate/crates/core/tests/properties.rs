use apgaps::experiments::{load, persist, GapRecord};
use apgaps::primes::PrimeTable;
use apgaps::sieveweights::{
    lambda_from_y, pair_class, s1_bruteforce, s1_rearranged, y_from_f, y_from_lambda, SieveConfig, SieveParams,
    Support, WeightKind, WeightTable,
};
use apgaps::tuples::{is_admissible, narrow_tuple, SearchBudget, Tuple};
use num::{BigInt, BigRational};
use proptest::prelude::*;

fn brute_admissible(offsets: &[i64]) -> bool {
    let k = offsets.len() as i64;
    (2..=k.max(2)).filter(|&p| (2..p).all(|d| p % d != 0)).all(|p| {
        let hit: std::collections::HashSet<i64> = offsets.iter().map(|h| h.rem_euclid(p)).collect();
        hit.len() < p as usize
    })
}

fn offsets_strategy() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::btree_set(-60i64..60, 1..9).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn admissibility_is_translation_and_reflection_invariant(offs in offsets_strategy(), shift in -1000i64..1000) {
        let t = Tuple::new(&offs).unwrap();
        let moved: Vec<i64> = offs.iter().map(|h| h + shift).collect();
        let negated: Vec<i64> = offs.iter().rev().map(|h| -h).collect();
        prop_assert_eq!(is_admissible(&t), brute_admissible(&offs));
        prop_assert_eq!(is_admissible(&Tuple::new(&moved).unwrap()), is_admissible(&t));
        prop_assert_eq!(is_admissible(&t.reversed()), is_admissible(&t));
        prop_assert_eq!(Tuple::new(&negated).unwrap(), t.reversed());
    }

    #[test]
    fn tuple_text_round_trip(offs in offsets_strategy()) {
        let t = Tuple::new(&offs).unwrap();
        prop_assert_eq!(t.to_string().parse::<Tuple>().unwrap(), t);
    }

    #[test]
    fn lambda_y_round_trip(
        k in 1usize..=3,
        r in 2.0f64..=30.0,
        vpf in prop::sample::select(vec![1u64, 2, 6, 30]),
        seed in prop::collection::vec((-50i64..50, 1i64..20), 64),
    ) {
        let support = Support { k, vpf, r_level: r, fixed_one: None };
        let mut y = WeightTable::zero(WeightKind::Y, support);
        let keys: Vec<Vec<u64>> = y.entries.keys().cloned().collect();
        for (key, (n, d)) in keys.iter().zip(seed.iter().cycle()) {
            y.set(key, BigRational::new(BigInt::from(*n), BigInt::from(*d)));
        }
        let back = y_from_lambda(&lambda_from_y(&y));
        prop_assert_eq!(back.entries, y.entries);
    }

    #[test]
    fn psi_partitions_over_classes(x in 2u64..3000, q in 1u64..30) {
        let t = PrimeTable::new(3000).unwrap();
        let whole = t.psi_ap(x, 1, 0).unwrap();
        let parts: f64 = (0..q).map(|a| t.psi_ap(x, q, a).unwrap()).sum();
        prop_assert!((whole - parts).abs() <= 1e-9 * whole.max(1.0));
    }

    #[test]
    fn s1_rearrangement_is_exact(
        x in 10u64..3000,
        m in 1u64..8,
        d0 in prop::sample::select(vec![2u64, 3, 5]),
        r in 3.0f64..40.0,
    ) {
        let a = (1..=m).find(|a| num::integer::gcd(*a, m) == 1).unwrap() % m;
        let base = if d0 > 2 { vec![0, 2] } else { vec![0] };
        let params = SieveParams {
            x_scale: x * m, modulus: m, residue: a, base: Tuple::new(&base).unwrap(),
            theta: 0.49, delta: 0.02, d0, pf: 1,
        };
        let Ok(mut cfg) = SieveConfig::new(&params) else { return Ok(()) };
        cfg.r_level = r;
        let l = lambda_from_y(&y_from_f(&cfg, |t| (1.0 - t.iter().sum::<f64>()).max(0.0)).unwrap());
        prop_assert_eq!(s1_bruteforce(&cfg, &l), s1_rearranged(&cfg, &l));
    }

    #[test]
    fn pair_classes_are_the_solution_sets(d1 in 1u64..40, e1 in 1u64..40, m in 1u64..12) {
        let params = SieveParams {
            x_scale: 1000 * m, modulus: m, residue: 1 % m, base: Tuple::new(&[0, 2]).unwrap(),
            theta: 0.49, delta: 0.02, d0: 3, pf: 1,
        };
        let Ok(cfg) = SieveConfig::new(&params) else { return Ok(()) };
        let (d, e) = ([d1, 1], [e1, 7]);
        let class = pair_class(&cfg, &d, &e);
        let q1 = num::integer::lcm(d1, e1);
        let solutions: Vec<u64> = (0..cfg.w_prime * q1 * 7)
            .filter(|n| n % cfg.w_prime == cfg.nu0
                && (n * m + cfg.tuple[0]) % q1 == 0
                && (n * m + cfg.tuple[1]) % 7 == 0)
            .collect();
        match class {
            None => prop_assert!(solutions.is_empty()),
            Some((r, q)) => {
                prop_assert!(!solutions.is_empty());
                prop_assert!(solutions.iter().all(|n| n % q == r));
                prop_assert_eq!(solutions[0], r);
            }
        }
    }

    #[test]
    fn persist_load_identity(rows in prop::collection::vec(
        (1u64..100, 0u64..100, 1u64..1_000_000, 1u64..5, prop::collection::vec(2u64..1_000_000, 1..5),
         any::<Option<bool>>(), prop::option::of(0u64..1000), -1e9f64..1e9),
        0..6,
    )) {
        let records: Vec<GapRecord> = rows.into_iter().map(|(m, a, x, r, ws, wb, tt, c)| GapRecord {
            modulus: m, residue: a, x_scale: x, r, gap_observed: ws.len() as u64,
            regime: "power(0.2)".into(), bound_shape: "r^3 e^{4r} * M".into(), bound_coefficient: c,
            within_bound: wb, witness_primes: ws, minimal_windows: 1,
            tuple_hint: tt.map(|v| format!("0,{}", v + 1)), tuple_translate: tt,
        }).collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        let (head, tail) = records.split_at(records.len() / 2);
        persist(head, &path).unwrap();
        persist(tail, &path).unwrap();
        let back: Vec<GapRecord> = load(&path).unwrap();
        prop_assert_eq!(back, records);
    }
}

#[test]
fn narrow_tuple_improves_with_budget() {
    for k in [10usize, 30, 60] {
        let mut prev = u64::MAX;
        for budget in [1usize, 16, 256, 4096] {
            let t = narrow_tuple(k, SearchBudget::Candidates(budget));
            assert!(is_admissible(&t) && t.len() == k);
            assert!(t.diameter() <= prev, "k={k} budget={budget}");
            prev = t.diameter();
        }
    }
}
