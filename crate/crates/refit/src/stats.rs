//! Goodness-of-fit statistics and rank-correlation baselines.
//!
//! Every statistic here is a pure function of its arguments. The pluggable
//! [`GofStatistic`] instances are oriented so that larger values always mean
//! a stronger fit, which lets the engine apply one right-tailed decision
//! rule to all of them.

use serde::{Deserialize, Serialize};

use crate::config::TestConfig;
use crate::engine::{exhaustive_permutations, sample_permutations};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::RngPolicy;

/// Coefficient of determination `1 - SSE/SST` of predictions against
/// responses. Can be negative for predictions worse than the mean; never
/// exceeds 1.
pub fn r_squared(predictions: &[f64], responses: &[f64]) -> Result<f64> {
    if predictions.len() != responses.len() {
        return Err(Error::DimensionMismatch {
            expected: responses.len(),
            got: predictions.len(),
        });
    }
    let n = responses.len();
    if n < 2 {
        return Err(Error::TooSmall { needed: 2, got: n });
    }
    let mean = responses.iter().sum::<f64>() / n as f64;
    let sst: f64 = responses.iter().map(|y| (y - mean).powi(2)).sum();
    if sst == 0.0 {
        return Err(Error::DegenerateResponse);
    }
    let sse: f64 = responses
        .iter()
        .zip(predictions)
        .map(|(y, p)| (y - p).powi(2))
        .sum();
    Ok(1.0 - sse / sst)
}

/// Mean absolute residual, negated so that larger means a better fit.
pub fn neg_absolute_risk(predictions: &[f64], responses: &[f64]) -> Result<f64> {
    if predictions.len() != responses.len() {
        return Err(Error::DimensionMismatch {
            expected: responses.len(),
            got: predictions.len(),
        });
    }
    let n = responses.len();
    if n == 0 {
        return Err(Error::TooSmall { needed: 1, got: 0 });
    }
    let mae = responses
        .iter()
        .zip(predictions)
        .map(|(y, p)| (y - p).abs())
        .sum::<f64>()
        / n as f64;
    Ok(-mae)
}

/// The linear-regression permutation statistic: the plain cross sum
/// `sum_i x_i * y_i` for a single predictor.
pub fn pesarin_statistic(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(x.iter().zip(y).map(|(a, b)| a * b).sum())
}

/// Mid-ranks (1-based); tied values receive the average of their ranks.
fn midranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn check_rank_input(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::TooSmall {
            needed: 3,
            got: x.len(),
        });
    }
    for (row, (a, b)) in x.iter().zip(y).enumerate() {
        if !a.is_finite() {
            return Err(Error::NonFinite { row, col: 0 });
        }
        if !b.is_finite() {
            return Err(Error::NonFinite { row, col: 1 });
        }
    }
    let constant = |v: &[f64]| v.iter().all(|&t| t == v[0]);
    if constant(x) || constant(y) {
        return Err(Error::DegenerateInput(
            "rank correlation is undefined for a constant input".into(),
        ));
    }
    Ok(())
}

/// Spearman's rho: Pearson correlation of mid-ranks.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64> {
    check_rank_input(x, y)?;
    let rx = midranks(x);
    let ry = midranks(y);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Count inversions of `values` by merge sort.
fn count_inversions(values: &mut [f64]) -> u64 {
    let n = values.len();
    let mut buf = vec![0.0; n];
    let mut swaps = 0u64;
    let mut width = 1;
    while width < n {
        let mut lo = 0;
        while lo + width < n {
            let mid = lo + width;
            let hi = (mid + width).min(n);
            let (mut i, mut j, mut k) = (lo, mid, lo);
            while i < mid || j < hi {
                if i < mid && (j >= hi || values[i] <= values[j]) {
                    buf[k] = values[i];
                    i += 1;
                } else {
                    swaps += (mid - i) as u64;
                    buf[k] = values[j];
                    j += 1;
                }
                k += 1;
            }
            values[lo..hi].copy_from_slice(&buf[lo..hi]);
            lo = hi;
        }
        width *= 2;
    }
    swaps
}

fn tie_pair_count(sorted: &[f64]) -> u64 {
    let mut total = 0u64;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as u64;
        total += t * (t - 1) / 2;
        i = j + 1;
    }
    total
}

/// Kendall's tau-b with the standard tie corrections, computed in
/// O(n log n) from the inversion count of `y` in `x`-sorted order.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    check_rank_input(x, y)?;
    let n = x.len();
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    // Joint ties and x-ties from the (x, y)-sorted sequence.
    let mut xtie = 0u64;
    let mut ntie = 0u64;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && pairs[j + 1].0 == pairs[i].0 {
            j += 1;
        }
        let t = (j - i + 1) as u64;
        xtie += t * (t - 1) / 2;
        let group: Vec<f64> = pairs[i..=j].iter().map(|p| p.1).collect();
        let mut sorted_group = group;
        sorted_group.sort_by(|a, b| a.total_cmp(b));
        ntie += tie_pair_count(&sorted_group);
        i = j + 1;
    }

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let discordant = count_inversions(&mut ys); // ys is now sorted
    let ytie = tie_pair_count(&ys);

    let total = (n as u64 * (n as u64 - 1) / 2) as f64;
    let (xtie, ytie, ntie) = (xtie as f64, ytie as f64, ntie as f64);
    let denom = (total - xtie) * (total - ytie);
    if denom <= 0.0 {
        return Err(Error::DegenerateInput(
            "rank correlation is undefined for a constant input".into(),
        ));
    }
    let con_minus_dis = total - xtie - ytie + ntie - 2.0 * discordant as f64;
    Ok((con_minus_dis / denom.sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankMethod {
    Spearman,
    Kendall,
}

impl RankMethod {
    pub fn statistic(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        match self {
            RankMethod::Spearman => spearman_rho(x, y),
            RankMethod::Kendall => kendall_tau(x, y),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RankMethod::Spearman => "spearman",
            RankMethod::Kendall => "kendall",
        }
    }
}

/// Result of a permutation-calibrated rank independence test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub method: RankMethod,
    pub reject: bool,
}

/// Two-sided independence test for `(x, y)` using the chosen rank
/// correlation, calibrated by the same permutation machinery as the main
/// engine: `B` resampled pairings of `y`, ordering by absolute value.
pub fn rank_independence_test(
    x: &[f64],
    y: &[f64],
    method: RankMethod,
    config: &TestConfig,
) -> Result<RankTestResult> {
    config.validate(x.len())?;
    let observed = method.statistic(x, y)?;
    let policy = RngPolicy::new(config.master_seed);

    let permutations = if config.exhaustive {
        exhaustive_permutations(x.len())?
    } else {
        sample_permutations(x.len(), config.n_permutations, &policy)
    };

    let mut at_least = 0usize;
    for tau in permutations.iter() {
        let y_tau: Vec<f64> = tau.iter().map(|&t| y[t]).collect();
        let stat = method.statistic(x, &y_tau)?;
        if stat.abs() >= observed.abs() {
            at_least += 1;
        }
    }
    let total = permutations.len();
    let p_value = (1 + at_least) as f64 / (total + 1) as f64;
    Ok(RankTestResult {
        statistic: observed,
        p_value,
        method,
        reject: p_value <= config.alpha,
    })
}

/// Pluggable goodness-of-fit functional. All instances are oriented so
/// larger values indicate a stronger fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GofStatistic {
    /// `1 - SSE/SST` of the fitted predictions.
    RSquared,
    /// Negated mean absolute residual of the fitted predictions.
    AbsRisk,
    /// The model-free cross sum `sum_i x_i * y_i` (single predictor).
    TStar,
}

/// Inputs a statistic may consume: fitted predictions when a model was
/// trained, plus the raw predictors and (possibly permuted) responses.
pub struct EvalContext<'a> {
    pub predictions: Option<&'a [f64]>,
    pub predictors: &'a Matrix,
    pub responses: &'a [f64],
}

impl GofStatistic {
    pub fn name(&self) -> &'static str {
        match self {
            GofStatistic::RSquared => "r2",
            GofStatistic::AbsRisk => "abs-risk",
            GofStatistic::TStar => "tstar",
        }
    }

    /// Whether the engine must fit the regressor before evaluating.
    pub fn needs_fit(&self) -> bool {
        !matches!(self, GofStatistic::TStar)
    }

    pub fn evaluate(&self, ctx: &EvalContext) -> Result<f64> {
        match self {
            GofStatistic::RSquared | GofStatistic::AbsRisk => {
                let preds = ctx.predictions.ok_or_else(|| {
                    Error::InvalidConfig(format!(
                        "statistic `{}` requires fitted predictions",
                        self.name()
                    ))
                })?;
                match self {
                    GofStatistic::RSquared => r_squared(preds, ctx.responses),
                    _ => neg_absolute_risk(preds, ctx.responses),
                }
            }
            GofStatistic::TStar => {
                if ctx.predictors.cols() != 1 {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        got: ctx.predictors.cols(),
                    });
                }
                pesarin_statistic(&ctx.predictors.column(0), ctx.responses)
            }
        }
    }
}
