//! Integration tests for the permutation engine: exhaustive oracles,
//! parallel determinism, calibration and the cross-sum plug-in equivalence.

use rand::Rng;
use refit::prelude::*;

fn standard_normal(rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    // Box-Muller, independent of the generators used inside the crate.
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn gaussian_dataset(seed: u64, n: usize, slope: f64) -> Dataset {
    let policy = RngPolicy::new(seed);
    let mut rng = policy.stream("test-data", &[]);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![standard_normal(&mut rng)]).collect();
    let ys: Vec<f64> = rows
        .iter()
        .map(|r| slope * r[0] + standard_normal(&mut rng))
        .collect();
    Dataset::from_rows(&rows, ys).unwrap()
}

#[test]
fn exhaustive_and_sampled_p_values_agree() {
    let data = gaussian_dataset(31, 6, 0.8);
    let exhaustive = run_permutation_test(
        &data,
        &RegressorSpec::ols(),
        GofStatistic::RSquared,
        &TestConfig {
            exhaustive: true,
            master_seed: 5,
            ..TestConfig::default()
        },
    )
    .unwrap();
    assert_eq!(exhaustive.reference.len(), 720);

    let sampled = run_permutation_test(
        &data,
        &RegressorSpec::ols(),
        GofStatistic::RSquared,
        &TestConfig {
            n_permutations: 5000,
            master_seed: 5,
            ..TestConfig::default()
        },
    )
    .unwrap();
    assert!(
        (exhaustive.p_value - sampled.p_value).abs() <= 0.02,
        "exhaustive p {} vs sampled p {}",
        exhaustive.p_value,
        sampled.p_value
    );
}

#[test]
fn sampled_reference_mean_is_consistent_with_exhaustive() {
    // n = 5: compare the mean over all 120 permutations against the mean of
    // a 20000-draw sample, within 3 Monte Carlo standard errors.
    let data = gaussian_dataset(7, 5, 0.5);
    let policy = RngPolicy::new(99);
    let full = refit::engine::exhaustive_reference(
        &data,
        &RegressorSpec::ols(),
        GofStatistic::RSquared,
        &policy,
    )
    .unwrap();
    assert_eq!(full.len(), 120);
    let exact_mean = full.iter().sum::<f64>() / full.len() as f64;
    let exact_var = full.iter().map(|v| (v - exact_mean).powi(2)).sum::<f64>() / full.len() as f64;

    let sampled = run_permutation_test(
        &data,
        &RegressorSpec::ols(),
        GofStatistic::RSquared,
        &TestConfig {
            n_permutations: 20_000,
            master_seed: 4,
            ..TestConfig::default()
        },
    )
    .unwrap();
    let sample_mean = sampled.reference.iter().sum::<f64>() / sampled.reference.len() as f64;
    let se = (exact_var / sampled.reference.len() as f64).sqrt();
    assert!(
        (sample_mean - exact_mean).abs() <= 3.0 * se,
        "sample mean {sample_mean}, exact mean {exact_mean}, se {se}"
    );
}

#[test]
fn small_sample_flexible_model_gets_beaten_by_permutations() {
    // Ten replicates of the small quadratic example: across them, at least
    // one replicate must see a permuted statistic above the observed one.
    let spec = RegressorSpec::mlp(vec![30, 30, 30], 100, 0.01);
    let mut any_exceed = false;
    for rep in 0..10 {
        let scenario = ScenarioSpec::new(ScenarioName::QuadExample, 10, 9000 + rep);
        let data = generate(&scenario).unwrap();
        let outcome = run_permutation_test(
            &data,
            &spec,
            GofStatistic::RSquared,
            &TestConfig::with_seed(100 + rep),
        )
        .unwrap();
        if outcome.reference.iter().any(|&v| v > outcome.r0) {
            any_exceed = true;
            break;
        }
    }
    assert!(
        any_exceed,
        "no replicate had a permuted statistic above the observed one"
    );
}

#[test]
fn negative_reference_values_are_accepted() {
    // An underfit net on ten points routinely scores below zero on permuted
    // pairings; the engine must carry those values through unchanged.
    let scenario = ScenarioSpec::new(ScenarioName::QuadExample, 10, 77);
    let data = generate(&scenario).unwrap();
    let outcome = run_permutation_test(
        &data,
        &RegressorSpec::mlp(vec![8, 8], 40, 0.01),
        GofStatistic::RSquared,
        &TestConfig::with_seed(3),
    )
    .unwrap();
    assert!(
        outcome.reference.iter().any(|&v| v < 0.0),
        "expected at least one negative reference value"
    );
    assert!(outcome.reference.iter().all(|v| v.is_finite()));
    assert!(outcome.is_self_consistent());
}

#[test]
fn outcome_survives_serialization_and_stays_consistent() {
    let data = gaussian_dataset(13, 40, 0.6);
    let outcome = run_permutation_test(
        &data,
        &RegressorSpec::ols(),
        GofStatistic::RSquared,
        &TestConfig::with_seed(21),
    )
    .unwrap();
    let json = serde_json::to_string(&outcome).unwrap();
    let back: TestOutcome = serde_json::from_str(&json).unwrap();
    assert_eq!(outcome, back);
    assert!(back.is_self_consistent());
}

fn run_in_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(job)
}

#[test]
fn thread_count_does_not_change_the_outcome() {
    let data = gaussian_dataset(55, 60, 0.4);
    let config = TestConfig::with_seed(8);
    let ols = RegressorSpec::ols();
    let one = run_in_pool(1, || {
        run_permutation_test(&data, &ols, GofStatistic::RSquared, &config).unwrap()
    });
    let four = run_in_pool(4, || {
        run_permutation_test(&data, &ols, GofStatistic::RSquared, &config).unwrap()
    });
    assert_eq!(one, four);

    let mlp = RegressorSpec::mlp(vec![6, 6], 30, 0.02);
    let small = gaussian_dataset(56, 20, 0.4);
    let one = run_in_pool(1, || {
        run_permutation_test(&small, &mlp, GofStatistic::RSquared, &config).unwrap()
    });
    let four = run_in_pool(4, || {
        run_permutation_test(&small, &mlp, GofStatistic::RSquared, &config).unwrap()
    });
    assert_eq!(one, four);
}

/// Straight-line reimplementation of the permutation test for linear
/// regression with the cross-sum statistic: no model fitting, explicit
/// Fisher-Yates, sort-based quantile.
fn standalone_cross_sum_test(data: &Dataset, config: &TestConfig) -> (f64, f64, bool) {
    let x = data.predictor_column(0);
    let y = data.responses();
    let n = y.len();
    let t0: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();

    let policy = RngPolicy::new(config.master_seed);
    let mut reference = Vec::with_capacity(config.n_permutations);
    for b in 0..config.n_permutations {
        let mut rng = policy.permutation_stream(b as u64);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            perm.swap(i, j);
        }
        let t: f64 = (0..n).map(|i| x[i] * y[perm[i]]).sum();
        reference.push(t);
    }

    let mut sorted = reference.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let idx = ((1.0 - config.alpha) * sorted.len() as f64 - 1e-9).ceil() as usize;
    let q = sorted[idx - 1];
    let at_least = reference.iter().filter(|&&v| v >= t0).count();
    let p = (1 + at_least) as f64 / (reference.len() + 1) as f64;
    (p, q, t0 > q)
}

#[test]
fn cross_sum_plug_in_matches_standalone_implementation() {
    for (seed, slope) in [(1u64, 0.0), (2, 0.3), (3, 0.8), (4, -0.5)] {
        let data = gaussian_dataset(seed, 50, slope);
        let config = TestConfig::with_seed(seed.wrapping_mul(31));
        let engine =
            run_permutation_test(&data, &RegressorSpec::ols(), GofStatistic::TStar, &config)
                .unwrap();
        let (p, q, reject) = standalone_cross_sum_test(&data, &config);
        assert_eq!(engine.p_value, p, "seed {seed}");
        assert_eq!(engine.q, q, "seed {seed}");
        assert_eq!(engine.reject, reject, "seed {seed}");
    }
}

/// Heap's algorithm; an enumeration route independent of the engine's
/// lexicographic iterator.
fn heap_permutations(n: usize) -> Vec<Vec<usize>> {
    fn recurse(k: usize, arr: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            out.push(arr.clone());
            return;
        }
        for i in 0..k {
            recurse(k - 1, arr, out);
            if k % 2 == 0 {
                arr.swap(i, k - 1);
            } else {
                arr.swap(0, k - 1);
            }
        }
    }
    let mut arr: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    recurse(n, &mut arr, &mut out);
    out
}

#[test]
fn rank_test_exhaustive_mode_matches_enumeration_oracle() {
    let x = [0.3, -1.1, 0.9, 2.2, -0.4];
    let y = [1.0, 0.2, 1.4, 2.0, -0.3];
    let config = TestConfig {
        exhaustive: true,
        ..TestConfig::default()
    };
    for method in [RankMethod::Spearman, RankMethod::Kendall] {
        let result = rank_independence_test(&x, &y, method, &config).unwrap();
        let observed = method.statistic(&x, &y).unwrap();
        let perms = heap_permutations(5);
        assert_eq!(perms.len(), 120);
        let mut at_least = 0usize;
        for tau in &perms {
            let y_tau: Vec<f64> = tau.iter().map(|&t| y[t]).collect();
            if method.statistic(&x, &y_tau).unwrap().abs() >= observed.abs() {
                at_least += 1;
            }
        }
        let oracle_p = (1 + at_least) as f64 / 121.0;
        assert_eq!(result.p_value, oracle_p, "{}", method.name());
    }
}

#[test]
fn absolute_risk_statistic_runs_through_the_engine() {
    let data = gaussian_dataset(60, 80, 1.5);
    let outcome = run_permutation_test(
        &data,
        &RegressorSpec::ols(),
        GofStatistic::AbsRisk,
        &TestConfig::with_seed(2),
    )
    .unwrap();
    assert_eq!(outcome.statistic_name, "abs-risk");
    assert!(outcome.r0 <= 0.0, "negated risk is never positive");
    assert!(
        outcome.reject,
        "strong signal must beat the reference risks"
    );
    assert!(outcome.is_self_consistent());
}

#[test]
fn diverging_fit_on_the_original_pairing_aborts() {
    let data = gaussian_dataset(61, 20, 0.5);
    let err = run_permutation_test(
        &data,
        &RegressorSpec::mlp(vec![8, 8], 400, 1e6),
        GofStatistic::RSquared,
        &TestConfig::with_seed(1),
    )
    .unwrap_err();
    assert!(matches!(err, refit::Error::DivergedTraining { .. }));
}

#[test]
fn monotone_data_reaches_the_minimal_p_value() {
    let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
    let y: Vec<f64> = x.iter().map(|v| v * 2.0 + 1.0).collect();
    let config = TestConfig::with_seed(6);
    let result = rank_independence_test(&x, &y, RankMethod::Spearman, &config).unwrap();
    assert_eq!(result.statistic, 1.0);
    assert_eq!(result.p_value, 1.0 / 201.0);
    assert!(result.reject);
}

#[test]
fn rank_test_is_calibrated_under_independence() {
    // 1000 independent replicates at n = 100: the rejection rate must sit
    // near the nominal level.
    let mut rejections = 0usize;
    let reps = 1000;
    for rep in 0..reps {
        let policy = RngPolicy::new(4242);
        let mut rng = policy.stream("calibration", &[rep as u64]);
        let x: Vec<f64> = (0..100).map(|_| standard_normal(&mut rng)).collect();
        let y: Vec<f64> = (0..100).map(|_| standard_normal(&mut rng)).collect();
        let config = TestConfig {
            master_seed: 31_000 + rep as u64,
            ..TestConfig::default()
        };
        let result = rank_independence_test(&x, &y, RankMethod::Spearman, &config).unwrap();
        if result.reject {
            rejections += 1;
        }
    }
    let rate = rejections as f64 / reps as f64;
    assert!(
        (0.03..=0.07).contains(&rate),
        "spearman null rejection rate {rate}"
    );
}
