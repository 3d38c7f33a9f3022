//! Functional predictors end to end: multi-channel time series are turned
//! into Fourier coefficients and the permutation test runs on the result.
//!
//! This mirrors a serve-analysis workflow: each observation is one serve,
//! each channel one sensor axis. Ball speed depends cleanly on the swing
//! amplitude, so that test rejects; the velocity/accuracy score mixes in a
//! discrete accuracy draw that carries most of the variance, so the same
//! predictors usually cannot beat noise there.

use rand::Rng;
use refit::features::{featurize_records, parse_series_csv, SeriesRecord};
use refit::prelude::*;

fn main() -> Result<()> {
    let policy = RngPolicy::new(88);
    let mut rng = policy.stream("serves", &[]);
    let samples_per_serve = 40;
    let serves = 40;

    // Two channels per serve: the first-harmonic amplitude of the "swing"
    // channel drives ball speed, the "wobble" channel is pure nuisance.
    let mut records: Vec<SeriesRecord> = Vec::new();
    let mut velocities = Vec::new();
    for s in 0..serves {
        let amplitude = 1.0 + 2.0 * rng.random::<f64>();
        let phase = 0.15 * rng.random::<f64>();
        let swing: Vec<f64> = (0..samples_per_serve)
            .map(|t| {
                let angle = std::f64::consts::TAU * t as f64 / samples_per_serve as f64;
                amplitude * (angle + phase).cos() + 0.05 * rng.random::<f64>()
            })
            .collect();
        let wobble: Vec<f64> = (0..samples_per_serve)
            .map(|_| rng.random::<f64>() - 0.5)
            .collect();
        records.push(SeriesRecord::new(format!("serve{s:02}"), "swing", swing)?);
        records.push(SeriesRecord::new(format!("serve{s:02}"), "wobble", wobble)?);
        velocities.push(130.0 + 25.0 * amplitude + 2.0 * rng.random::<f64>());
    }

    let k = 2;
    let (obs_ids, predictors) = featurize_records(&records, k)?;
    println!(
        "{} serves -> {} Fourier predictors each ({} channels x (2k+1))\n",
        obs_ids.len(),
        predictors.cols(),
        predictors.cols() / (2 * k + 1)
    );

    // Test 1: can the coefficients predict ball speed better than noise?
    let speed_data = Dataset::new(predictors.clone(), velocities.clone())?;
    let speed = run_permutation_test(
        &speed_data,
        &RegressorSpec::ols(),
        GofStatistic::RSquared,
        &TestConfig::with_seed(88),
    )?;
    println!(
        "ball speed    : r0 = {:.4}, q = {:.4}, p = {:.4}, reject = {}",
        speed.r0, speed.q, speed.p_value, speed.reject
    );

    // Test 2: the serve score adds a discrete accuracy draw with most of
    // the variance, drowning the velocity signal.
    let points = [0, 1, 3, 6, 9];
    let scores: Vec<f64> = velocities
        .iter()
        .map(|&v| {
            let p = points[rng.random_range(0..points.len())];
            va_index(v, p).expect("valid points")
        })
        .collect();
    let score_data = Dataset::new(predictors, scores)?;
    let score = run_permutation_test(
        &score_data,
        &RegressorSpec::ols(),
        GofStatistic::RSquared,
        &TestConfig::with_seed(89),
    )?;
    println!(
        "serve score   : r0 = {:.4}, q = {:.4}, p = {:.4}, reject = {}",
        score.r0, score.q, score.p_value, score.reject
    );
    println!(
        "\na seemingly decent in-sample fit on the score side is {} than what \
         the same model reaches on shuffled responses",
        if score.reject {
            "still better"
        } else {
            "no better"
        }
    );

    // The same series can live in a long-format CSV.
    let mut csv = String::from("obs_id,channel,t_index,value\n");
    for rec in &records {
        for (t, v) in rec.samples.iter().enumerate() {
            csv.push_str(&format!("{},{},{},{}\n", rec.obs_id, rec.channel, t, v));
        }
    }
    let reparsed = parse_series_csv(&csv)?;
    assert_eq!(reparsed.len(), records.len());
    println!("series round-trip through the long-format CSV layout: ok");
    Ok(())
}
