//! The permutation test: refit the model on every permuted pairing, compare
//! the observed statistic against the empirical quantile of the reference
//! sample.
//!
//! The reference vector is assembled by permutation index, never by
//! completion order, and every random stream is derived from the master
//! seed, so the outcome is a pure function of its inputs regardless of how
//! many worker threads run the refits.

mod permutation;

pub use permutation::{exhaustive_permutations, sample_permutations, PermutationPlan, PlanMode};

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::TestConfig;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::models::{fit_model, RegressorSpec};
use crate::outcome::TestOutcome;
use crate::rng::RngPolicy;
use crate::stats::{EvalContext, GofStatistic};

/// Value recorded for a permuted refit whose training diverged: the worst
/// representable fit, so a diverged fit on noise counts as noise instead of
/// aborting the run. Kept finite so outcomes serialize cleanly.
pub const DIVERGED_STATISTIC: f64 = f64::MIN;

/// Sorted-sample order statistic at 1-based index `ceil(level * len)`.
///
/// The small epsilon keeps `ceil` honest when `level * len` is an integer
/// up to floating-point round-off (e.g. `0.95 * 200`).
pub fn empirical_quantile(sample: &[f64], level: f64) -> f64 {
    assert!(!sample.is_empty(), "quantile of an empty sample");
    assert!(level > 0.0 && level < 1.0, "level must lie in (0, 1)");
    let b = sample.len();
    let raw = (level * b as f64 - 1e-9).ceil();
    let idx = (raw.max(1.0) as usize).min(b);
    let mut work = sample.to_vec();
    let (_, value, _) = work.select_nth_unstable_by(idx - 1, |a, b| a.total_cmp(b));
    *value
}

/// Fit (when the statistic requires it) and evaluate on one response pairing.
fn evaluate_pairing(
    data: &Dataset,
    responses: &[f64],
    spec: &RegressorSpec,
    statistic: GofStatistic,
    init: &mut ChaCha8Rng,
) -> Result<f64> {
    let predictions = if statistic.needs_fit() {
        let paired = data.with_responses(responses.to_vec())?;
        let model = fit_model(&paired, spec, init)?;
        Some(model.predict(data.predictors())?)
    } else {
        None
    };
    statistic.evaluate(&EvalContext {
        predictions: predictions.as_deref(),
        predictors: data.predictors(),
        responses,
    })
}

/// Run the test: fit on the original pairing, refit on each permuted
/// pairing with identical hyperparameters, reject when the observed
/// statistic strictly exceeds the `(1 - alpha)` reference quantile.
pub fn run_permutation_test(
    data: &Dataset,
    spec: &RegressorSpec,
    statistic: GofStatistic,
    config: &TestConfig,
) -> Result<TestOutcome> {
    config.validate(data.n())?;
    spec.validate()?;
    if data.response_sst() == 0.0 {
        return Err(Error::DegenerateResponse);
    }

    let policy = RngPolicy::new(config.master_seed);
    // A diverged fit on the original pairing aborts the run.
    let r0 = evaluate_pairing(
        data,
        data.responses(),
        spec,
        statistic,
        &mut policy.observed_fit_stream(),
    )?;

    let plan = if config.exhaustive {
        exhaustive_permutations(data.n())?
    } else {
        sample_permutations(data.n(), config.n_permutations, &policy)
    };

    let reference: Vec<f64> = (0..plan.len())
        .into_par_iter()
        .map(|b| {
            let responses = data.permuted_responses(plan.get(b));
            match evaluate_pairing(
                data,
                &responses,
                spec,
                statistic,
                &mut policy.fit_stream(b as u64),
            ) {
                Ok(v) => Ok(v),
                Err(Error::DivergedTraining { .. }) => Ok(DIVERGED_STATISTIC),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;

    let q = empirical_quantile(&reference, 1.0 - config.alpha);
    let at_least = reference.iter().filter(|&&v| v >= r0).count();
    let p_value = (1 + at_least) as f64 / (reference.len() + 1) as f64;

    Ok(TestOutcome {
        statistic_name: statistic.name().to_string(),
        r0,
        q,
        p_value,
        reject: r0 > q,
        reference,
        config: *config,
        model: spec.clone(),
    })
}

/// Evaluate the statistic for every one of the `n!` response permutations,
/// in lexicographic permutation order.
pub fn exhaustive_reference(
    data: &Dataset,
    spec: &RegressorSpec,
    statistic: GofStatistic,
    policy: &RngPolicy,
) -> Result<Vec<f64>> {
    let plan = exhaustive_permutations(data.n())?;
    (0..plan.len())
        .into_par_iter()
        .map(|b| {
            let responses = data.permuted_responses(plan.get(b));
            evaluate_pairing(
                data,
                &responses,
                spec,
                statistic,
                &mut policy.fit_stream(b as u64),
            )
        })
        .collect()
}
