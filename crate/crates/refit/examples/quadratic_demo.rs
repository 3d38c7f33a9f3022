//! The small-sample story that motivates the whole test: ten points from
//! `y = x1^2 + x2^2 + eps`, a three-layer ReLU net that fits them almost
//! perfectly, and 200 response permutations showing how often sheer model
//! flexibility beats the true pairing.
//!
//! Run with `cargo run --release --example quadratic_demo`.

use refit::prelude::*;

fn main() -> Result<()> {
    let scenario = ScenarioSpec::new(ScenarioName::QuadExample, 10, 2024);
    let data = generate(&scenario)?;

    let spec = RegressorSpec::mlp_default();
    let config = TestConfig::with_seed(2024);
    let outcome = run_permutation_test(&data, &spec, GofStatistic::RSquared, &config)?;

    println!("observed r^2 on the true pairing : {:.4}", outcome.r0);
    println!("95%-quantile of permuted r^2     : {:.4}", outcome.q);
    println!("p-value                          : {:.4}", outcome.p_value);
    println!(
        "decision                         : {}",
        if outcome.reject {
            "reject (the net captures more than noise)"
        } else {
            "do not reject"
        }
    );

    let beaten = outcome
        .reference
        .iter()
        .filter(|&&v| v > outcome.r0)
        .count();
    println!(
        "\nwith only {} observations, {} of {} permuted pairings scored an even \
         higher r^2 than the true one",
        data.n(),
        beaten,
        outcome.reference.len()
    );

    let svg = refit::report::outcome_svg(&outcome);
    std::fs::write("quadratic_demo.svg", svg)?;
    println!("histogram written to quadratic_demo.svg");
    Ok(())
}
