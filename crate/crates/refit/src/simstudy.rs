//! Named synthetic data-generating processes and rejection-rate experiments.
//!
//! Scenario parameters that control spread (`sd2`, `noise_sd`) are standard
//! deviations. Every generator is deterministic given its seed; sweeps and
//! head-to-head comparisons derive per-replicate seeds from one master seed
//! so that competing tests see bit-identical datasets.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::TestConfig;
use crate::dataset::Dataset;
use crate::engine::run_permutation_test;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::models::RegressorSpec;
use crate::rng::RngPolicy;
use crate::stats::GofStatistic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    /// Two standard normal predictors, uniform responses; no dependence.
    NullUniform,
    /// `y = x1^2 + x2^2 + eps` with standard normal predictors and
    /// `eps ~ N(0, 0.1^2)`.
    QuadExample,
    /// `x1 ~ N(1,1)`, `x2 ~ N(0,1)`, `y = log|x1| + x2^2 + eps`,
    /// `eps ~ N(0,1)`.
    LogQuad,
    /// `x1 ~ N(a,1)`, `x2 ~ N(0, sd2^2)`, `y = log|x1| + x2^2 + eps`.
    LogQuadMeanSweep,
    /// `(x, y)` bivariate normal with unit variances and correlation `rho`.
    BivariateNormal,
    /// `x ~ N(5,1)`, `y = log|x| + eps`, `eps ~ N(0,1)`.
    LognormalUnivariate,
    /// Independent standard normal `x` and `y`.
    NullBivariate,
}

impl ScenarioName {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "null_uniform" => Self::NullUniform,
            "quad_example" => Self::QuadExample,
            "log_quad" => Self::LogQuad,
            "log_quad_mean_sweep" => Self::LogQuadMeanSweep,
            "bivariate_normal" => Self::BivariateNormal,
            "lognormal_univariate" => Self::LognormalUnivariate,
            "null_bivariate" => Self::NullBivariate,
            other => return Err(Error::UnknownScenario(other.to_string())),
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::NullUniform => "null_uniform",
            Self::QuadExample => "quad_example",
            Self::LogQuad => "log_quad",
            Self::LogQuadMeanSweep => "log_quad_mean_sweep",
            Self::BivariateNormal => "bivariate_normal",
            Self::LognormalUnivariate => "lognormal_univariate",
            Self::NullBivariate => "null_bivariate",
        }
    }

    /// Which knob a sweep grid drives for this scenario.
    pub fn sweep_axis(&self) -> SweepAxis {
        match self {
            Self::LogQuadMeanSweep => SweepAxis::MeanShift,
            Self::BivariateNormal => SweepAxis::Correlation,
            _ => SweepAxis::SampleSize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    MeanShift,
    Correlation,
    SampleSize,
}

/// Optional scenario parameters; a name accepts only the parameters in its
/// signature and rejects the rest.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub a: Option<f64>,
    pub rho: Option<f64>,
    pub sd2: Option<f64>,
    pub noise_sd: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: ScenarioName,
    pub n: usize,
    pub params: ScenarioParams,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn new(name: ScenarioName, n: usize, seed: u64) -> Self {
        Self {
            name,
            n,
            params: ScenarioParams::default(),
            seed,
        }
    }

    pub fn with_params(mut self, params: ScenarioParams) -> Self {
        self.params = params;
        self
    }

    fn check_positive_sd(value: Option<f64>, label: &str) -> Result<()> {
        if let Some(v) = value {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "{label} must be a positive standard deviation, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParams(format!(
                "sample size must be at least 2, got {}",
                self.n
            )));
        }
        let p = &self.params;
        Self::check_positive_sd(p.sd2, "sd2")?;
        Self::check_positive_sd(p.noise_sd, "noise_sd")?;
        if let Some(a) = p.a {
            if !a.is_finite() {
                return Err(Error::InvalidParams(format!("a must be finite, got {a}")));
            }
        }
        if let Some(rho) = p.rho {
            if !(0.0..=1.0).contains(&rho) {
                return Err(Error::InvalidParams(format!(
                    "rho must lie in [0, 1], got {rho}"
                )));
            }
        }

        let reject = |cond: bool, field: &str| -> Result<()> {
            if cond {
                Err(Error::InvalidParams(format!(
                    "scenario `{}` does not take parameter `{field}`",
                    self.name.as_str()
                )))
            } else {
                Ok(())
            }
        };
        match self.name {
            ScenarioName::NullUniform | ScenarioName::NullBivariate => {
                reject(p.a.is_some(), "a")?;
                reject(p.rho.is_some(), "rho")?;
                reject(p.sd2.is_some(), "sd2")?;
                reject(p.noise_sd.is_some(), "noise_sd")?;
            }
            ScenarioName::QuadExample
            | ScenarioName::LogQuad
            | ScenarioName::LognormalUnivariate => {
                reject(p.a.is_some(), "a")?;
                reject(p.rho.is_some(), "rho")?;
                reject(p.sd2.is_some(), "sd2")?;
            }
            ScenarioName::LogQuadMeanSweep => {
                reject(p.rho.is_some(), "rho")?;
            }
            ScenarioName::BivariateNormal => {
                reject(p.a.is_some(), "a")?;
                reject(p.sd2.is_some(), "sd2")?;
                reject(p.noise_sd.is_some(), "noise_sd")?;
                if p.rho.is_none() {
                    return Err(Error::InvalidParams(
                        "scenario `bivariate_normal` requires `rho`".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn normal(rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Draw a dataset from the named law; deterministic given the seed.
pub fn generate(spec: &ScenarioSpec) -> Result<Dataset> {
    spec.validate()?;
    let policy = RngPolicy::new(spec.seed);
    let mut rng = policy.stream("scenario", &[]);
    let n = spec.n;
    let p = &spec.params;

    let (rows, ys): (Vec<Vec<f64>>, Vec<f64>) = match spec.name {
        ScenarioName::NullUniform => {
            let mut rows = Vec::with_capacity(n);
            let mut ys = Vec::with_capacity(n);
            for _ in 0..n {
                rows.push(vec![normal(&mut rng), normal(&mut rng)]);
                ys.push(rng.random::<f64>());
            }
            (rows, ys)
        }
        ScenarioName::QuadExample => {
            let noise = p.noise_sd.unwrap_or(0.1);
            let mut rows = Vec::with_capacity(n);
            let mut ys = Vec::with_capacity(n);
            for _ in 0..n {
                let (x1, x2) = (normal(&mut rng), normal(&mut rng));
                rows.push(vec![x1, x2]);
                ys.push(x1 * x1 + x2 * x2 + noise * normal(&mut rng));
            }
            (rows, ys)
        }
        ScenarioName::LogQuad => {
            let noise = p.noise_sd.unwrap_or(1.0);
            let mut rows = Vec::with_capacity(n);
            let mut ys = Vec::with_capacity(n);
            for _ in 0..n {
                let x1 = 1.0 + normal(&mut rng);
                let x2 = normal(&mut rng);
                rows.push(vec![x1, x2]);
                ys.push(x1.abs().ln() + x2 * x2 + noise * normal(&mut rng));
            }
            (rows, ys)
        }
        ScenarioName::LogQuadMeanSweep => {
            let a = p.a.unwrap_or(0.0);
            let sd2 = p.sd2.unwrap_or_else(|| 0.1f64.sqrt());
            let noise = p.noise_sd.unwrap_or_else(|| 0.1f64.sqrt());
            let mut rows = Vec::with_capacity(n);
            let mut ys = Vec::with_capacity(n);
            for _ in 0..n {
                let x1 = a + normal(&mut rng);
                let x2 = sd2 * normal(&mut rng);
                rows.push(vec![x1, x2]);
                ys.push(x1.abs().ln() + x2 * x2 + noise * normal(&mut rng));
            }
            (rows, ys)
        }
        ScenarioName::BivariateNormal => {
            let rho = p.rho.expect("validated above");
            let residual = (1.0 - rho * rho).sqrt();
            let mut rows = Vec::with_capacity(n);
            let mut ys = Vec::with_capacity(n);
            for _ in 0..n {
                let z1 = normal(&mut rng);
                let z2 = normal(&mut rng);
                rows.push(vec![z1]);
                ys.push(rho * z1 + residual * z2);
            }
            (rows, ys)
        }
        ScenarioName::LognormalUnivariate => {
            let noise = p.noise_sd.unwrap_or(1.0);
            let mut rows = Vec::with_capacity(n);
            let mut ys = Vec::with_capacity(n);
            for _ in 0..n {
                let x = 5.0 + normal(&mut rng);
                rows.push(vec![x]);
                ys.push(x.abs().ln() + noise * normal(&mut rng));
            }
            (rows, ys)
        }
        ScenarioName::NullBivariate => {
            let mut rows = Vec::with_capacity(n);
            let mut ys = Vec::with_capacity(n);
            for _ in 0..n {
                rows.push(vec![normal(&mut rng)]);
                ys.push(normal(&mut rng));
            }
            (rows, ys)
        }
    };
    Dataset::new(Matrix::from_rows(&rows), ys)
}

/// Rejection rates over a grid of scenario settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub scenario: ScenarioName,
    pub axis: SweepAxis,
    pub statistic_name: String,
    pub model: RegressorSpec,
    pub grid: Vec<f64>,
    pub rates: Vec<f64>,
    pub replications: usize,
    /// Raw per-replicate decisions, `outcomes[grid_index][replicate]`.
    pub outcomes: Option<Vec<Vec<bool>>>,
}

impl SweepResult {
    pub fn rate_at(&self, grid_value: f64) -> Option<f64> {
        self.grid
            .iter()
            .position(|&g| (g - grid_value).abs() < 1e-12)
            .map(|i| self.rates[i])
    }
}

/// Instantiate the scenario at one grid point.
fn spec_at(base: &ScenarioSpec, grid_value: f64, seed: u64) -> Result<ScenarioSpec> {
    let mut spec = *base;
    spec.seed = seed;
    match base.name.sweep_axis() {
        SweepAxis::MeanShift => spec.params.a = Some(grid_value),
        SweepAxis::Correlation => spec.params.rho = Some(grid_value),
        SweepAxis::SampleSize => {
            if grid_value.fract() != 0.0 || grid_value < 2.0 {
                return Err(Error::InvalidParams(format!(
                    "sample-size grid values must be integers >= 2, got {grid_value}"
                )));
            }
            spec.n = grid_value as usize;
        }
    }
    Ok(spec)
}

/// For each grid point, generate `replications` independent datasets and
/// record the fraction of permutation-test rejections. Replicates run
/// concurrently; results are keyed by `(grid index, replicate index)`.
pub fn rejection_rate_sweep(
    base: &ScenarioSpec,
    grid: &[f64],
    model: &RegressorSpec,
    statistic: GofStatistic,
    config: &TestConfig,
    replications: usize,
) -> Result<SweepResult> {
    if replications < 1 {
        return Err(Error::InvalidParams("need at least one replication".into()));
    }
    if grid.is_empty() {
        return Err(Error::InvalidParams("empty sweep grid".into()));
    }
    let master = RngPolicy::new(base.seed);
    let jobs: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|g| (0..replications).map(move |r| (g, r)))
        .collect();

    let decisions: Vec<bool> = jobs
        .par_iter()
        .map(|&(g, r)| -> Result<bool> {
            let data_seed = master.derive_seed("sweep-data", &[g as u64, r as u64]);
            let test_seed = master.derive_seed("sweep-test", &[g as u64, r as u64]);
            let scenario = spec_at(base, grid[g], data_seed)?;
            let data = generate(&scenario)?;
            let run_config = TestConfig {
                master_seed: test_seed,
                ..*config
            };
            Ok(run_permutation_test(&data, model, statistic, &run_config)?.reject)
        })
        .collect::<Result<_>>()?;

    let mut outcomes = vec![Vec::with_capacity(replications); grid.len()];
    for (&(g, _), &reject) in jobs.iter().zip(&decisions) {
        outcomes[g].push(reject);
    }
    let rates = outcomes
        .iter()
        .map(|o| o.iter().filter(|&&b| b).count() as f64 / replications as f64)
        .collect();

    Ok(SweepResult {
        scenario: base.name,
        axis: base.name.sweep_axis(),
        statistic_name: statistic.name().to_string(),
        model: model.clone(),
        grid: grid.to_vec(),
        rates,
        replications,
        outcomes: Some(outcomes),
    })
}

/// Head-to-head comparison: every `(statistic, model)` entry is evaluated on
/// bit-identical replicate datasets at every grid point (seeds depend only
/// on the base scenario seed and the grid/replicate indices).
pub fn compare_tests(
    base: &ScenarioSpec,
    grid: &[f64],
    entries: &[(GofStatistic, RegressorSpec)],
    config: &TestConfig,
    replications: usize,
) -> Result<Vec<SweepResult>> {
    entries
        .iter()
        .map(|(statistic, model)| {
            rejection_rate_sweep(base, grid, model, *statistic, config, replications)
        })
        .collect()
}

/// Evenly spaced grid, inclusive of both endpoints.
pub fn linspace(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    assert!(steps >= 2, "need at least two grid points");
    let h = (stop - start) / (steps - 1) as f64;
    (0..steps).map(|i| start + h * i as f64).collect()
}

/// The default sweep grid for a scenario, following the ranges the
/// experiments are usually plotted over.
pub fn default_grid(name: ScenarioName) -> Vec<f64> {
    match name.sweep_axis() {
        SweepAxis::MeanShift => linspace(0.0, 10.0, 11),
        SweepAxis::Correlation => linspace(0.0, 1.0, 11),
        SweepAxis::SampleSize => vec![10.0, 50.0, 100.0, 200.0, 300.0, 500.0, 1000.0],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pearson(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let mut sxy = 0.0;
        let mut sxx = 0.0;
        let mut syy = 0.0;
        for (a, b) in x.iter().zip(y) {
            sxy += (a - mx) * (b - my);
            sxx += (a - mx) * (a - mx);
            syy += (b - my) * (b - my);
        }
        sxy / (sxx * syy).sqrt()
    }

    #[test]
    fn null_uniform_has_uniform_support() {
        let spec = ScenarioSpec::new(ScenarioName::NullUniform, 100, 1);
        let data = generate(&spec).unwrap();
        assert_eq!(data.n(), 100);
        assert_eq!(data.dim(), 2);
        assert!(data.responses().iter().all(|&y| (0.0..=1.0).contains(&y)));
    }

    #[test]
    fn perfect_correlation_is_degenerate() {
        let spec =
            ScenarioSpec::new(ScenarioName::BivariateNormal, 2000, 5).with_params(ScenarioParams {
                rho: Some(1.0),
                ..Default::default()
            });
        let data = generate(&spec).unwrap();
        let r = pearson(&data.predictor_column(0), data.responses());
        assert!(r >= 0.999, "sample correlation {r}");
    }

    #[test]
    fn sample_correlation_obeys_the_law_of_large_numbers() {
        let spec = ScenarioSpec::new(ScenarioName::BivariateNormal, 100_000, 9).with_params(
            ScenarioParams {
                rho: Some(0.5),
                ..Default::default()
            },
        );
        let data = generate(&spec).unwrap();
        let r = pearson(&data.predictor_column(0), data.responses());
        assert!((r - 0.5).abs() <= 0.01, "sample correlation {r}");
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = ScenarioSpec::new(ScenarioName::LogQuad, 50, 77);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
    }

    #[test]
    fn foreign_params_are_rejected() {
        let spec =
            ScenarioSpec::new(ScenarioName::NullUniform, 10, 0).with_params(ScenarioParams {
                rho: Some(0.3),
                ..Default::default()
            });
        assert!(matches!(generate(&spec), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn rho_range_is_checked() {
        let spec =
            ScenarioSpec::new(ScenarioName::BivariateNormal, 10, 0).with_params(ScenarioParams {
                rho: Some(1.5),
                ..Default::default()
            });
        assert!(matches!(generate(&spec), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn unknown_scenario_name_is_reported() {
        assert!(matches!(
            ScenarioName::parse("nope"),
            Err(Error::UnknownScenario(_))
        ));
    }

    #[test]
    fn single_replication_gives_zero_or_one() {
        let base = ScenarioSpec::new(ScenarioName::NullBivariate, 20, 4);
        let result = rejection_rate_sweep(
            &base,
            &[20.0, 30.0],
            &RegressorSpec::ols(),
            GofStatistic::RSquared,
            &TestConfig {
                n_permutations: 50,
                ..TestConfig::default()
            },
            1,
        )
        .unwrap();
        for rate in &result.rates {
            assert!(*rate == 0.0 || *rate == 1.0);
        }
    }

    #[test]
    fn identical_entries_give_identical_results() {
        let base =
            ScenarioSpec::new(ScenarioName::BivariateNormal, 30, 12).with_params(ScenarioParams {
                rho: Some(0.2),
                ..Default::default()
            });
        let entries = vec![
            (GofStatistic::RSquared, RegressorSpec::ols()),
            (GofStatistic::RSquared, RegressorSpec::ols()),
        ];
        let results = compare_tests(
            &base,
            &[0.0, 0.3],
            &entries,
            &TestConfig {
                n_permutations: 60,
                ..TestConfig::default()
            },
            3,
        )
        .unwrap();
        assert_eq!(results[0], results[1]);
    }

    #[test]
    fn sweep_results_serialize_losslessly() {
        let base = ScenarioSpec::new(ScenarioName::NullBivariate, 12, 3);
        let result = rejection_rate_sweep(
            &base,
            &[12.0, 16.0],
            &RegressorSpec::ols(),
            GofStatistic::RSquared,
            &TestConfig {
                n_permutations: 20,
                ..TestConfig::default()
            },
            2,
        )
        .unwrap();
        let json = serde_json::to_string(&result).unwrap();
        let back: SweepResult = serde_json::from_str(&json).unwrap();
        assert_eq!(result, back);
    }
}
