//! Paired predictor/response sample with validation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// A validated sample of predictor rows and responses.
///
/// Construction goes through [`Dataset::new`], which enforces the invariants:
/// at least two observations, at least one predictor, matching lengths, all
/// entries finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    predictors: Matrix,
    responses: Vec<f64>,
}

impl Dataset {
    /// Validate raw arrays into a `Dataset`.
    pub fn new(predictors: Matrix, responses: Vec<f64>) -> Result<Self> {
        if predictors.rows() != responses.len() {
            return Err(Error::DimensionMismatch {
                expected: predictors.rows(),
                got: responses.len(),
            });
        }
        if predictors.rows() < 2 {
            return Err(Error::TooSmall {
                needed: 2,
                got: predictors.rows(),
            });
        }
        if predictors.cols() < 1 {
            return Err(Error::InvalidConfig(
                "need at least one predictor column".into(),
            ));
        }
        for i in 0..predictors.rows() {
            for j in 0..predictors.cols() {
                if !predictors.get(i, j).is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
            if !responses[i].is_finite() {
                return Err(Error::NonFinite {
                    row: i,
                    col: predictors.cols(),
                });
            }
        }
        Ok(Self {
            predictors,
            responses,
        })
    }

    /// Convenience constructor from row vectors.
    pub fn from_rows(rows: &[Vec<f64>], responses: Vec<f64>) -> Result<Self> {
        Self::new(Matrix::from_rows(rows), responses)
    }

    pub fn n(&self) -> usize {
        self.responses.len()
    }

    pub fn dim(&self) -> usize {
        self.predictors.cols()
    }

    pub fn predictors(&self) -> &Matrix {
        &self.predictors
    }

    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    pub fn predictor_column(&self, j: usize) -> Vec<f64> {
        self.predictors.column(j)
    }

    /// Responses reordered by a permutation: entry `i` becomes `y[tau[i]]`.
    pub fn permuted_responses(&self, tau: &[usize]) -> Vec<f64> {
        debug_assert_eq!(tau.len(), self.n());
        tau.iter().map(|&t| self.responses[t]).collect()
    }

    /// Same predictors paired with a replacement response vector.
    pub fn with_responses(&self, responses: Vec<f64>) -> Result<Self> {
        Self::new(self.predictors.clone(), responses)
    }

    /// Total sum of squares of the responses around their mean.
    pub fn response_sst(&self) -> f64 {
        let mean = self.responses.iter().sum::<f64>() / self.n() as f64;
        self.responses.iter().map(|y| (y - mean).powi(2)).sum()
    }
}
