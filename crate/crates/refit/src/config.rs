//! Test configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest sample size for which all `n!` permutations may be enumerated.
pub const EXHAUSTIVE_MAX_N: usize = 8;

/// Knobs of a single permutation-test run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    /// Significance level, strictly between 0 and 1.
    pub alpha: f64,
    /// Number of sampled permutations B.
    pub n_permutations: usize,
    /// Master seed; every random stream in the run derives from it.
    pub master_seed: u64,
    /// Replace sampling by full enumeration of all n! permutations.
    pub exhaustive: bool,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            n_permutations: 200,
            master_seed: 0,
            exhaustive: false,
        }
    }
}

impl TestConfig {
    pub fn with_seed(master_seed: u64) -> Self {
        Self {
            master_seed,
            ..Self::default()
        }
    }

    /// Check field ranges; `n` is the sample size of the data the config
    /// will be used with (the exhaustive guard depends on it).
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.n_permutations < 1 {
            return Err(Error::InvalidConfig("need at least one permutation".into()));
        }
        if self.exhaustive && n > EXHAUSTIVE_MAX_N {
            return Err(Error::TooLarge {
                n,
                max: EXHAUSTIVE_MAX_N,
            });
        }
        Ok(())
    }
}
