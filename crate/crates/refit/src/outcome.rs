//! Result of one permutation-test run.

use serde::{Deserialize, Serialize};

use crate::config::TestConfig;
use crate::models::RegressorSpec;

/// Everything needed to report and reproduce a test decision: the observed
/// statistic, the full permutation reference sample, the decision quantile,
/// the p-value and echoes of the configuration that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub statistic_name: String,
    /// Observed statistic on the original pairing.
    pub r0: f64,
    /// Statistic recomputed on each permuted pairing.
    pub reference: Vec<f64>,
    /// The `(1 - alpha)` empirical quantile of `reference`.
    pub q: f64,
    /// `(1 + #{reference >= r0}) / (B + 1)`; never exactly zero.
    pub p_value: f64,
    /// True when `r0 > q` (strict).
    pub reject: bool,
    pub config: TestConfig,
    pub model: RegressorSpec,
}

impl TestOutcome {
    /// Re-derive the quantile, p-value and decision from the stored
    /// reference sample; used to check a serialized outcome for
    /// self-consistency.
    pub fn recompute(&self) -> (f64, f64, bool) {
        let q = crate::engine::empirical_quantile(&self.reference, 1.0 - self.config.alpha);
        let at_least = self.reference.iter().filter(|&&v| v >= self.r0).count();
        let p = (1 + at_least) as f64 / (self.reference.len() + 1) as f64;
        (q, p, self.r0 > q)
    }

    pub fn is_self_consistent(&self) -> bool {
        let (q, p, reject) = self.recompute();
        q == self.q && p == self.p_value && reject == self.reject
    }
}
