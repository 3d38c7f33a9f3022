//! Ordinary least squares with an intercept column.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{min_norm_lstsq, Matrix};

/// Fitted linear model. `coefficients[0]` is the intercept, the remaining
/// entries are the slopes in predictor-column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsModel {
    coefficients: Vec<f64>,
}

/// Least-squares fit of `[1 | X] theta ~ y`. Rank-deficient designs resolve
/// to the minimum-norm solution, so permuted datasets that happen to be
/// degenerate never abort a run.
pub fn fit(data: &Dataset) -> OlsModel {
    let n = data.n();
    let d = data.dim();
    let mut design = Vec::with_capacity(n * (d + 1));
    for i in 0..n {
        design.push(1.0);
        design.extend_from_slice(data.predictors().row(i));
    }
    let design = Matrix::from_vec(n, d + 1, design);
    OlsModel {
        coefficients: min_norm_lstsq(&design, data.responses()),
    }
}

impl OlsModel {
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn intercept(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn slopes(&self) -> &[f64] {
        &self.coefficients[1..]
    }

    pub fn predict(&self, predictors: &Matrix) -> Result<Vec<f64>> {
        if predictors.cols() + 1 != self.coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coefficients.len() - 1,
                got: predictors.cols(),
            });
        }
        Ok((0..predictors.rows())
            .map(|i| {
                self.coefficients[0]
                    + predictors
                        .row(i)
                        .iter()
                        .zip(self.slopes())
                        .map(|(x, b)| x * b)
                        .sum::<f64>()
            })
            .collect())
    }
}
