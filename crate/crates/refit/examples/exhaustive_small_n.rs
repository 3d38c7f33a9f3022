//! For very small samples the reference distribution does not have to be
//! sampled at all: with n = 6 there are only 720 response permutations, so
//! the test can enumerate every one of them and the sampled approximation
//! can be checked against the exact answer.

use refit::prelude::*;

fn main() -> Result<()> {
    let data = generate(&ScenarioSpec::new(ScenarioName::QuadExample, 6, 3))?;

    let exact = run_permutation_test(
        &data,
        &RegressorSpec::ols(),
        GofStatistic::RSquared,
        &TestConfig {
            exhaustive: true,
            master_seed: 1,
            ..TestConfig::default()
        },
    )?;
    println!(
        "exhaustive: {} permutations, p = {:.4}, reject = {}",
        exact.reference.len(),
        exact.p_value,
        exact.reject
    );

    for b in [200, 1000, 5000] {
        let sampled = run_permutation_test(
            &data,
            &RegressorSpec::ols(),
            GofStatistic::RSquared,
            &TestConfig {
                n_permutations: b,
                master_seed: 1,
                ..TestConfig::default()
            },
        )?;
        println!(
            "sampled B = {b:>4}: p = {:.4} (gap {:+.4}), reject = {}",
            sampled.p_value,
            sampled.p_value - exact.p_value,
            sampled.reject
        );
    }

    // Enumeration is guarded: n = 9 would mean 362880 refits.
    let big = generate(&ScenarioSpec::new(ScenarioName::QuadExample, 9, 3))?;
    let err = run_permutation_test(
        &big,
        &RegressorSpec::ols(),
        GofStatistic::RSquared,
        &TestConfig {
            exhaustive: true,
            ..TestConfig::default()
        },
    )
    .unwrap_err();
    println!("\nn = 9 exhaustive request: {err}");
    Ok(())
}
