//! Head-to-head power comparison on paired datasets: the general R^2-based
//! test against the context-specific cross-sum statistic `sum x_i y_i` for
//! linear regression. Both tests see bit-identical replicate datasets at
//! every correlation, so the curves are directly comparable.
//!
//! Run with `cargo run --release --example pesarin_comparison`.

use refit::prelude::*;

fn main() -> Result<()> {
    let base = ScenarioSpec::new(ScenarioName::BivariateNormal, 100, 31);
    let grid = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
    let replications = 60;

    let entries = vec![
        (GofStatistic::RSquared, RegressorSpec::ols()),
        (GofStatistic::TStar, RegressorSpec::ols()),
    ];
    let results = compare_tests(&base, &grid, &entries, &TestConfig::default(), replications)?;

    println!(
        "rejection rates over {} paired replications (n = {}):\n",
        replications, base.n
    );
    println!("  rho     r2    tstar");
    for (i, rho) in grid.iter().enumerate() {
        println!(
            "  {rho:.1}   {:>5.3}  {:>5.3}",
            results[0].rates[i], results[1].rates[i]
        );
    }
    println!(
        "\nthe targeted statistic reacts to smaller correlations, while both \
         tests saturate by rho of about 0.4"
    );
    Ok(())
}
