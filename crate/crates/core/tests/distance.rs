use zsz_core::code::{build_from_text, fixtures, load_fixture, CheckType};
use zsz_core::distance::{
    estimate_classical_distance, estimate_distance, exact_distance, search_codes, SearchConfig, SearchSpace,
};
use zsz_core::BitMatrix;

#[test]
fn zsz144_bound_reached() {
    let code = load_fixture("ZSZ144-3").unwrap();
    for side in [CheckType::X, CheckType::Z] {
        let est = estimate_distance(&code, side, 10_000, 7).unwrap();
        assert!(est.weight <= 8, "{side:?}: {}", est.weight);
        let other = code.checks(side.dual());
        assert!(other.mul_vec(&est.witness).is_zero());
        assert!(!code.checks(side).row_space_contains(&est.witness));
        assert_eq!(est.witness.weight(), est.weight);
    }
}

#[test]
fn small_codes_match_exhaustive_distance() {
    // Z_3 x Z_3 and Z_7 x| Z_3 examples, n = 18 and 42.
    let cases = [
        ("bb18", 3, 3, 1, "1+x", "1+y"),
        ("bb18b", 3, 3, 1, "1+x+y", "1+x^2+y^2"),
    ];
    for (name, l, m, q, a, b) in cases {
        let code = build_from_text(name, l, m, q, a, b).unwrap();
        if code.k() == 0 {
            continue;
        }
        for side in [CheckType::X, CheckType::Z] {
            let exact = exact_distance(&code, side).unwrap();
            let est = estimate_distance(&code, side, 200, 1).unwrap();
            assert_eq!(est.weight, exact, "{name} {side:?}");
        }
    }
}

#[test]
fn estimate_never_increases_with_trials() {
    let code = load_fixture("ZSZ80").unwrap();
    let mut last = usize::MAX;
    for trials in [1, 5, 20, 80, 300] {
        let w = estimate_distance(&code, CheckType::Z, trials, 3).unwrap().weight;
        assert!(w <= last);
        last = w;
    }
}

#[test]
fn classical_repetition() {
    let h = BitMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]);
    assert_eq!(estimate_classical_distance(&h, 1, 0).unwrap().weight, 3);
}

#[test]
fn pinned_search_recovers_fixture() {
    let f = fixtures().into_iter().find(|f| f.name == "ZSZ144-3").unwrap();
    let config = SearchConfig {
        space: SearchSpace::single(12, 6, 5),
        samples: 1,
        k_min: 12,
        d_min: 1,
        trials: 2000,
        seed: 5,
        max_results: None,
        fixed_a: Some(f.a.clone()),
        fixed_b: Some(f.b.clone()),
    };
    let hits = search_codes(&config, 3).unwrap();
    assert_eq!(hits.len(), 1);
    assert_eq!((hits[0].n, hits[0].k), (144, 12));
    assert!(hits[0].d_bound <= 8);

    let impossible = SearchConfig { k_min: 145, ..config };
    assert!(search_codes(&impossible, 3).unwrap().is_empty());
}

#[test]
fn random_search_finds_distance_eight_codes() {
    let config = SearchConfig {
        space: SearchSpace::single(5, 8, 2),
        samples: 100_000,
        k_min: 2,
        d_min: 8,
        trials: 200,
        seed: 11,
        max_results: Some(1),
        fixed_a: None,
        fixed_b: None,
    };
    let hits = search_codes(&config, 3).unwrap();
    assert_eq!(hits.len(), 1);
    let hit = &hits[0];
    assert_eq!(hit.k, 2);
    assert!(hit.d_bound >= 8);
    // The hit round-trips through the fixture format.
    let code = hit.build().unwrap();
    assert_eq!(code.n(), 80);
}
