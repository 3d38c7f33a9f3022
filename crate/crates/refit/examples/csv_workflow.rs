//! End-to-end batch workflow through the library API: synthesize a dataset,
//! write it as CSV, ingest it back, run the permutation test with OLS, and
//! emit JSON, CSV and SVG reports.
//!
//! The same flow is available from the command line:
//!
//! ```text
//! refit simulate --scenario log_quad --n 150 --seed 7 --out demo.csv
//! refit test demo.csv --response y --seed 7 --out demo.json --svg demo.svg
//! refit report demo.json --format csv --out demo_reference.csv
//! ```

use refit::ingest::{dataset_to_csv, ingest_csv};
use refit::prelude::*;
use refit::report::{
    outcome_csv, outcome_json, outcome_svg, parse_outcome_json, RunManifest, TestReport,
};

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join("refit-csv-workflow");
    std::fs::create_dir_all(&dir)?;

    // Simulate and persist.
    let scenario = ScenarioSpec::new(ScenarioName::LogQuad, 150, 7);
    let data = generate(&scenario)?;
    let csv_path = dir.join("demo.csv");
    std::fs::write(&csv_path, dataset_to_csv(&data))?;

    // Ingest and test.
    let loaded = ingest_csv(&csv_path, "y")?;
    assert_eq!(loaded, data);
    let outcome = run_permutation_test(
        &loaded,
        &RegressorSpec::ols(),
        GofStatistic::RSquared,
        &TestConfig::with_seed(7),
    )?;
    println!(
        "r0 = {:.4}, q = {:.4}, p = {:.4}, reject = {}",
        outcome.r0, outcome.q, outcome.p_value, outcome.reject
    );

    // Reports.
    let report = TestReport {
        outcome: outcome.clone(),
        manifest: RunManifest::new(vec!["csv_workflow example".into()], 7),
    };
    std::fs::write(dir.join("demo.json"), outcome_json(&report)?)?;
    std::fs::write(dir.join("demo_reference.csv"), outcome_csv(&outcome))?;
    std::fs::write(dir.join("demo.svg"), outcome_svg(&outcome))?;

    // Round trip: the saved document reproduces the outcome exactly.
    let back = parse_outcome_json(&std::fs::read_to_string(dir.join("demo.json"))?)?;
    assert_eq!(back.outcome, outcome);
    assert!(back.outcome.is_self_consistent());

    println!("reports written under {}", dir.display());
    Ok(())
}
