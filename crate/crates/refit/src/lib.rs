//! Does a regression model predict the responses better than pure noise?
//!
//! `refit` answers this with a permutation test: the model is fit on the
//! observed pairing of predictors and responses, then refit from scratch on
//! many response permutations with identical hyperparameters, and the
//! observed goodness of fit is compared against the empirical quantile of
//! the permuted reference sample. The null hypothesis is rejected only when
//! the observed statistic strictly exceeds that quantile — evidence that
//! the model class captures more than noise, without any sample splitting.
//!
//! The crate ships:
//!
//! * [`engine`] — the permutation test itself, with a small-sample
//!   exhaustive mode and deterministic parallel execution;
//! * [`models`] — the reference regressors (OLS and a gradient-trained
//!   ReLU MLP) behind one fit/predict contract;
//! * [`stats`] — goodness-of-fit statistics (R², negated absolute risk,
//!   the cross-sum statistic for linear regression) plus Spearman/Kendall
//!   rank-correlation baselines with permutation-calibrated p-values;
//! * [`features`] — Fourier featurization of uniformly sampled series and
//!   the velocity/accuracy response transform;
//! * [`simstudy`] — named synthetic scenarios and rejection-rate sweeps;
//! * [`report`] / [`ingest`] / [`cli`] — CSV ingestion, JSON/CSV/SVG
//!   reports and the batch command-line front end.
//!
//! Every run is a pure function of its inputs and one master seed: random
//! streams are derived per purpose and index, never shared, so results are
//! identical across thread counts.
//!
//! ```
//! use refit::prelude::*;
//!
//! let spec = ScenarioSpec::new(ScenarioName::BivariateNormal, 100, 7)
//!     .with_params(ScenarioParams { rho: Some(0.6), ..Default::default() });
//! let data = generate(&spec).unwrap();
//! let outcome = run_permutation_test(
//!     &data,
//!     &RegressorSpec::ols(),
//!     GofStatistic::RSquared,
//!     &TestConfig::with_seed(7),
//! )
//! .unwrap();
//! assert!(outcome.reject);
//! ```

pub mod cli;
pub mod config;
pub mod dataset;
pub mod engine;
pub mod error;
pub mod features;
pub mod ingest;
pub mod linalg;
pub mod models;
pub mod outcome;
pub mod report;
pub mod rng;
pub mod simstudy;
pub mod stats;

pub use config::TestConfig;
pub use dataset::Dataset;
pub use engine::run_permutation_test;
pub use error::{Error, Result};
pub use models::RegressorSpec;
pub use outcome::TestOutcome;
pub use rng::RngPolicy;
pub use stats::GofStatistic;

/// The types and functions most callers need.
pub mod prelude {
    pub use crate::config::TestConfig;
    pub use crate::dataset::Dataset;
    pub use crate::engine::{
        empirical_quantile, exhaustive_permutations, run_permutation_test, sample_permutations,
    };
    pub use crate::error::{Error, Result};
    pub use crate::features::{fourier_features, va_index, SeriesRecord};
    pub use crate::linalg::Matrix;
    pub use crate::models::{fit_model, FittedModel, ModelKind, RegressorSpec};
    pub use crate::outcome::TestOutcome;
    pub use crate::rng::RngPolicy;
    pub use crate::simstudy::{
        compare_tests, generate, rejection_rate_sweep, ScenarioName, ScenarioParams, ScenarioSpec,
        SweepResult,
    };
    pub use crate::stats::{
        kendall_tau, pesarin_statistic, r_squared, rank_independence_test, spearman_rho,
        GofStatistic, RankMethod, RankTestResult,
    };
}
