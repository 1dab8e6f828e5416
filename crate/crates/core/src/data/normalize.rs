//! Per-feature standardization: subtract the column mean, divide by the
//! population standard deviation.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::{Matrix, Vector};

/// Fitted standardization parameters (one mean/std pair per feature).
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationParams<S: Scalar> {
    pub mu: Vector<S>,
    pub sigma: Vector<S>,
}

impl<S: Scalar> NormalizationParams<S> {
    pub fn n_features(&self) -> usize {
        self.mu.len()
    }
}

/// Computes per-column mean and population standard deviation (divide by n).
pub fn zscore_fit<S: Scalar>(features: &Matrix<S>) -> Result<NormalizationParams<S>> {
    if features.nrows() == 0 || features.ncols() == 0 {
        return Err(Error::EmptyDataset);
    }
    crate::linalg::ensure_finite_matrix(features, "features to standardize")?;
    let n = S::from_f(features.nrows() as f64);
    let mut mu = Vector::zeros(features.ncols());
    let mut sigma = Vector::zeros(features.ncols());
    for (c, col) in features.columns().into_iter().enumerate() {
        let mean = col.sum() / n;
        let var = col.iter().map(|&v| (v - mean) * (v - mean)).sum::<S>() / n;
        mu[c] = mean;
        sigma[c] = var.sqrt();
    }
    Ok(NormalizationParams { mu, sigma })
}

/// Applies `(x - mu) / sigma` column-wise. Constant columns (`sigma == 0`)
/// map to all zeros instead of dividing by zero.
pub fn zscore_apply<S: Scalar>(
    features: &Matrix<S>,
    params: &NormalizationParams<S>,
) -> Result<Matrix<S>> {
    if features.ncols() != params.n_features() {
        return Err(Error::DimensionMismatch(format!(
            "{} feature columns but {} normalization parameters",
            features.ncols(),
            params.n_features()
        )));
    }
    let mut out = features.clone();
    for (c, mut col) in out.columns_mut().into_iter().enumerate() {
        let (mu, sigma) = (params.mu[c], params.sigma[c]);
        if sigma == S::zero() {
            col.fill(S::zero());
        } else {
            col.mapv_inplace(|v| (v - mu) / sigma);
        }
    }
    Ok(out)
}
