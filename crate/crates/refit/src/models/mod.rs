//! Reference regressors with a uniform fit/predict contract.
//!
//! Two model classes are provided: ordinary least squares with an intercept,
//! and a fully-connected ReLU network trained by full-batch gradient descent.
//! Hyperparameters are frozen in the [`RegressorSpec`] before a test starts
//! and are reused unchanged for every refit.

pub mod mlp;
pub mod ols;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub use mlp::{MlpModel, Network};
pub use ols::OlsModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ols,
    Mlp,
}

/// Model-class descriptor: which regressor to fit and with which frozen
/// training configuration. OLS ignores the `mlp_*` fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressorSpec {
    pub kind: ModelKind,
    pub mlp_layers: Vec<usize>,
    pub mlp_epochs: usize,
    pub mlp_learning_rate: f64,
}

impl RegressorSpec {
    pub fn ols() -> Self {
        Self {
            kind: ModelKind::Ols,
            mlp_layers: vec![30, 30, 30],
            mlp_epochs: 500,
            mlp_learning_rate: 0.01,
        }
    }

    /// MLP with the default training configuration (three hidden layers of
    /// 30 ReLU units, 500 full-batch gradient steps at rate 0.01).
    pub fn mlp_default() -> Self {
        Self {
            kind: ModelKind::Mlp,
            ..Self::ols()
        }
    }

    pub fn mlp(layers: Vec<usize>, epochs: usize, learning_rate: f64) -> Self {
        Self {
            kind: ModelKind::Mlp,
            mlp_layers: layers,
            mlp_epochs: epochs,
            mlp_learning_rate: learning_rate,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == ModelKind::Mlp {
            if self.mlp_layers.is_empty() || self.mlp_layers.contains(&0) {
                return Err(Error::InvalidConfig(
                    "hidden layer widths must be positive".into(),
                ));
            }
            if self.mlp_epochs == 0 {
                return Err(Error::InvalidConfig("epochs must be positive".into()));
            }
            if !(self.mlp_learning_rate > 0.0 && self.mlp_learning_rate.is_finite()) {
                return Err(Error::InvalidConfig(
                    "learning rate must be positive and finite".into(),
                ));
            }
        }
        Ok(())
    }
}

/// A trained model ready for prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FittedModel {
    Ols(OlsModel),
    Mlp(MlpModel),
}

impl FittedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            FittedModel::Ols(_) => ModelKind::Ols,
            FittedModel::Mlp(_) => ModelKind::Mlp,
        }
    }

    /// Predict responses for a predictor matrix of the training dimension.
    pub fn predict(&self, predictors: &Matrix) -> Result<Vec<f64>> {
        match self {
            FittedModel::Ols(m) => m.predict(predictors),
            FittedModel::Mlp(m) => m.predict(predictors),
        }
    }

    /// All parameters as one flat vector (OLS: intercept then slopes; MLP:
    /// weights and biases layer by layer).
    pub fn parameters(&self) -> &[f64] {
        match self {
            FittedModel::Ols(m) => m.coefficients(),
            FittedModel::Mlp(m) => m.parameters(),
        }
    }
}

/// Fit `spec` on `data`. The `init` stream drives weight initialization for
/// the MLP; OLS is deterministic and does not consume it.
pub fn fit_model(
    data: &Dataset,
    spec: &RegressorSpec,
    init: &mut ChaCha8Rng,
) -> Result<FittedModel> {
    spec.validate()?;
    match spec.kind {
        ModelKind::Ols => Ok(FittedModel::Ols(ols::fit(data))),
        ModelKind::Mlp => Ok(FittedModel::Mlp(mlp::fit(data, spec, init)?)),
    }
}
