//! Restricted Boltzmann machine: conditional probabilities, single-step
//! contrastive-divergence updates and epoch-level training.

use ndarray::Axis;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    affine, bernoulli_sample, check_params, column_sums, ensure_finite_matrix, logistic_layer,
    scaled_init_matrix,
};
use crate::scalar::Scalar;
use crate::train::{epoch_batches, TrainConfig};
use crate::{Matrix, Vector};

/// Distribution assumed for the visible units.
///
/// `Gaussian` (identity-mean, unit variance) suits standardized real-valued
/// input; `Bernoulli` suits activations in [0, 1], e.g. the hidden
/// probabilities of the layer below.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VisibleKind {
    Gaussian,
    Bernoulli,
}

/// Weights and biases of one RBM. `weights` is (n_visible x n_hidden).
#[derive(Debug, Clone, PartialEq)]
pub struct RbmParams<S: Scalar> {
    pub weights: Matrix<S>,
    pub visible_bias: Vector<S>,
    pub hidden_bias: Vector<S>,
    pub visible_kind: VisibleKind,
}

/// Hyperparameters for [`train_rbm`].
pub type RbmTrainConfig = TrainConfig;

impl<S: Scalar> RbmParams<S> {
    pub fn new(
        weights: Matrix<S>,
        visible_bias: Vector<S>,
        hidden_bias: Vector<S>,
        visible_kind: VisibleKind,
    ) -> Result<Self> {
        if weights.nrows() != visible_bias.len() || weights.ncols() != hidden_bias.len() {
            return Err(Error::DimensionMismatch(format!(
                "weights {}x{} vs visible bias {} and hidden bias {}",
                weights.nrows(),
                weights.ncols(),
                visible_bias.len(),
                hidden_bias.len()
            )));
        }
        ensure_finite_matrix(&weights, "rbm weights")?;
        if visible_bias.iter().chain(hidden_bias.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("rbm biases".into()));
        }
        Ok(RbmParams {
            weights,
            visible_bias,
            hidden_bias,
            visible_kind,
        })
    }

    /// Fresh RBM with width-scaled Gaussian weights and zero biases.
    pub fn init<R: Rng>(
        n_visible: usize,
        n_hidden: usize,
        visible_kind: VisibleKind,
        rng: &mut R,
    ) -> Self {
        RbmParams {
            weights: scaled_init_matrix(n_visible, n_hidden, rng),
            visible_bias: Vector::zeros(n_visible),
            hidden_bias: Vector::zeros(n_hidden),
            visible_kind,
        }
    }

    pub fn n_visible(&self) -> usize {
        self.weights.nrows()
    }

    pub fn n_hidden(&self) -> usize {
        self.weights.ncols()
    }
}

/// `p(h_j = 1 | v)` for each row of `v`: `sigma(v W + hidden_bias)`.
pub fn hidden_probabilities<S: Scalar>(
    params: &RbmParams<S>,
    v: &Matrix<S>,
) -> Result<Matrix<S>> {
    ensure_finite_matrix(v, "visible input")?;
    if params.visible_kind == VisibleKind::Bernoulli
        && v.iter().any(|&x| x < S::zero() || x > S::one())
    {
        return Err(Error::InvalidConfig(
            "Bernoulli visible units expect values in [0, 1]".into(),
        ));
    }
    logistic_layer(v, &params.weights, &params.hidden_bias)
}

/// Expected visible values given hidden activations, one row per sample.
///
/// Bernoulli visible units: `sigma(h W^T + visible_bias)`. Gaussian visible
/// units: the mean `h W^T + visible_bias` (unit variance, no noise added).
pub fn visible_reconstruction<S: Scalar>(
    params: &RbmParams<S>,
    h: &Matrix<S>,
) -> Result<Matrix<S>> {
    ensure_finite_matrix(h, "hidden input")?;
    let wt = params.weights.t().to_owned();
    match params.visible_kind {
        VisibleKind::Bernoulli => logistic_layer(h, &wt, &params.visible_bias),
        VisibleKind::Gaussian => affine(h, &wt, &params.visible_bias),
    }
}

/// One CD-1 parameter update from a mini-batch, in place.
///
/// Positive phase: `p0 = p(h|v0)`, `h0 ~ Bernoulli(p0)` (row-major draw
/// order). Negative phase: `v1` is the mean-field reconstruction from `h0`
/// (probabilities for Bernoulli units, the mean for Gaussian ones) and
/// `p1 = p(h|v1)`; neither is sampled. With batch size m:
///
/// ```text
/// W  += lr/m (v0^T p0 - v1^T p1)
/// b_v += lr/m sum(v0 - v1)
/// b_h += lr/m sum(p0 - p1)
/// ```
///
/// Returns the batch mean of `||v0 - v1||^2 / n_visible`.
pub fn cd1_update<S: Scalar, R: Rng>(
    params: &mut RbmParams<S>,
    batch: &Matrix<S>,
    learning_rate: f64,
    rng: &mut R,
) -> Result<f64> {
    if batch.ncols() != params.n_visible() {
        return Err(Error::DimensionMismatch(format!(
            "batch width {} vs {} visible units",
            batch.ncols(),
            params.n_visible()
        )));
    }
    if batch.nrows() == 0 {
        return Err(Error::EmptyDataset);
    }
    if !learning_rate.is_finite() || learning_rate < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "learning_rate must be finite and >= 0, got {learning_rate}"
        )));
    }

    let p0 = hidden_probabilities(params, batch)?;
    let h0 = bernoulli_sample(&p0, rng);
    let v1 = visible_reconstruction(params, &h0)?;
    let p1 = hidden_probabilities(params, &v1)?;

    let m = S::from_f(batch.nrows() as f64);
    let scale = S::from_f(learning_rate) / m;

    let dw = (batch.t().dot(&p0) - v1.t().dot(&p1)) * scale;
    let dvb = (column_sums(batch) - column_sums(&v1)) * scale;
    let dhb = (column_sums(&p0) - column_sums(&p1)) * scale;

    params.weights += &dw;
    params.visible_bias += &dvb;
    params.hidden_bias += &dhb;
    check_params(
        &[&params.weights],
        &[&params.visible_bias, &params.hidden_bias],
        "cd-1 update",
    )?;

    let diff = batch - &v1;
    let per_sample = diff.mapv(|d| d * d).sum_axis(Axis(1));
    let err = per_sample.iter().map(|&e| e.to_f()).sum::<f64>()
        / (batch.nrows() as f64 * params.n_visible() as f64);
    Ok(err)
}

/// Trains an RBM for `config.epochs` passes of shuffled mini-batches.
///
/// The shuffle order and all Bernoulli draws come from a ChaCha stream
/// seeded with `config.seed`, so identical inputs give bit-identical
/// outputs. Returns the trained parameters and the per-epoch mean of the
/// batch reconstruction errors.
pub fn train_rbm<S: Scalar>(
    init: RbmParams<S>,
    data: &Matrix<S>,
    config: &RbmTrainConfig,
) -> Result<(RbmParams<S>, Vec<f64>)> {
    config.validate()?;
    if data.nrows() == 0 {
        return Err(Error::EmptyDataset);
    }
    if config.batch_size > data.nrows() {
        return Err(Error::InvalidConfig(format!(
            "batch_size {} exceeds sample count {}",
            config.batch_size,
            data.nrows()
        )));
    }
    let mut params = init;
    let mut errors = Vec::with_capacity(config.epochs);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for epoch in 0..config.epochs {
        let batches = epoch_batches(data.nrows(), config.batch_size, &mut rng);
        let mut epoch_err = 0.0;
        for (b, idx) in batches.iter().enumerate() {
            let batch = data.select(Axis(0), idx);
            let err = cd1_update(&mut params, &batch, config.learning_rate, &mut rng)
                .map_err(|e| match e {
                    Error::NumericOverflow { .. } => Error::NumericOverflow {
                        context: format!("rbm epoch {epoch}, batch {b}"),
                    },
                    other => other,
                })?;
            epoch_err += err;
        }
        errors.push(epoch_err / batches.len() as f64);
    }
    Ok((params, errors))
}
