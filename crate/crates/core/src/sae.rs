//! Sparse autoencoder with a KL activation penalty, greedy stacking, and
//! unrolling into the shared feedforward classifier for fine-tuning.

use ndarray::Axis;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dbn::{FeedforwardClassifier, LayerSpec};
use crate::error::{Error, Result};
use crate::linalg::{
    affine, check_params, column_sums, ensure_finite_matrix, logistic_layer, scaled_init_matrix,
};
use crate::scalar::Scalar;
use crate::train::{epoch_batches, TrainConfig};
use crate::{Matrix, Vector};

/// Mean activations are clamped to `[KL_EPS, 1 - KL_EPS]` before entering
/// the KL penalty, keeping it finite at the boundaries.
pub const KL_EPS: f64 = 1e-8;

/// Reconstruction output unit: identity for real-valued (standardized)
/// input, logistic for inputs that are activations in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    Linear,
    Logistic,
}

/// Untied encoder/decoder parameters of one autoencoder.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseAutoencoderParams<S: Scalar> {
    /// (n_in x n_hidden)
    pub encoder_weights: Matrix<S>,
    pub encoder_bias: Vector<S>,
    /// (n_hidden x n_in)
    pub decoder_weights: Matrix<S>,
    pub decoder_bias: Vector<S>,
    pub output_kind: OutputKind,
}

impl<S: Scalar> SparseAutoencoderParams<S> {
    pub fn new(
        encoder_weights: Matrix<S>,
        encoder_bias: Vector<S>,
        decoder_weights: Matrix<S>,
        decoder_bias: Vector<S>,
        output_kind: OutputKind,
    ) -> Result<Self> {
        let (n_in, n_hidden) = encoder_weights.dim();
        if encoder_bias.len() != n_hidden
            || decoder_weights.dim() != (n_hidden, n_in)
            || decoder_bias.len() != n_in
        {
            return Err(Error::DimensionMismatch(
                "encoder/decoder shapes do not chain".into(),
            ));
        }
        ensure_finite_matrix(&encoder_weights, "encoder weights")?;
        ensure_finite_matrix(&decoder_weights, "decoder weights")?;
        if encoder_bias
            .iter()
            .chain(decoder_bias.iter())
            .any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite("autoencoder biases".into()));
        }
        Ok(SparseAutoencoderParams {
            encoder_weights,
            encoder_bias,
            decoder_weights,
            decoder_bias,
            output_kind,
        })
    }

    /// Fresh autoencoder with width-scaled Gaussian weights and zero biases.
    pub fn init<R: Rng>(n_in: usize, n_hidden: usize, output_kind: OutputKind, rng: &mut R) -> Self {
        SparseAutoencoderParams {
            encoder_weights: scaled_init_matrix(n_in, n_hidden, rng),
            encoder_bias: Vector::zeros(n_hidden),
            decoder_weights: scaled_init_matrix(n_hidden, n_in, rng),
            decoder_bias: Vector::zeros(n_in),
            output_kind,
        }
    }

    pub fn n_in(&self) -> usize {
        self.encoder_weights.nrows()
    }

    pub fn n_hidden(&self) -> usize {
        self.encoder_weights.ncols()
    }
}

/// Sparsity penalty hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparsityConfig {
    /// Target mean hidden activation, in (0, 1).
    pub rho: f64,
    /// Penalty weight, >= 0.
    pub beta: f64,
}

impl SparsityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "rho must lie strictly in (0, 1), got {}",
                self.rho
            )));
        }
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "beta must be finite and >= 0, got {}",
                self.beta
            )));
        }
        Ok(())
    }
}

/// Hyperparameters for [`train_sae`].
pub type SaeTrainConfig = TrainConfig;

/// Hidden activations and reconstruction for a batch:
/// `h = sigma(x W_enc + b_enc)`, `x_hat = h W_dec + b_dec` (logistic of
/// that for `OutputKind::Logistic`).
pub fn sae_forward<S: Scalar>(
    params: &SparseAutoencoderParams<S>,
    x: &Matrix<S>,
) -> Result<(Matrix<S>, Matrix<S>)> {
    ensure_finite_matrix(x, "autoencoder input")?;
    let hidden = logistic_layer(x, &params.encoder_weights, &params.encoder_bias)?;
    let reconstruction = match params.output_kind {
        OutputKind::Linear => affine(&hidden, &params.decoder_weights, &params.decoder_bias)?,
        OutputKind::Logistic => {
            logistic_layer(&hidden, &params.decoder_weights, &params.decoder_bias)?
        }
    };
    Ok((hidden, reconstruction))
}

fn clamp_activation<S: Scalar>(r: S) -> S {
    let eps = S::from_f(KL_EPS);
    r.max(eps).min(S::one() - eps)
}

/// Summed KL divergence between the target activation `rho` and each mean
/// activation in `rho_hat`:
/// `sum_j rho ln(rho/r_j) + (1-rho) ln((1-rho)/(1-r_j))`.
///
/// Nonnegative; zero exactly when every entry equals `rho`. Entries are
/// clamped into `[KL_EPS, 1-KL_EPS]` first.
pub fn kl_sparsity<S: Scalar>(rho: f64, rho_hat: &Vector<S>) -> Result<S> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "rho must lie strictly in (0, 1), got {rho}"
        )));
    }
    let p = S::from_f(rho);
    let q = S::one() - p;
    let total = rho_hat
        .iter()
        .map(|&raw| {
            let r = clamp_activation(raw);
            p * (p / r).ln() + q * (q / (S::one() - r)).ln()
        })
        .sum::<S>();
    // guard tiny negative round-off at the minimum
    Ok(total.max(S::zero()))
}

/// Gradients for every autoencoder parameter.
#[derive(Debug, Clone)]
pub struct SaeGradient<S: Scalar> {
    pub encoder_weights: Matrix<S>,
    pub encoder_bias: Vector<S>,
    pub decoder_weights: Matrix<S>,
    pub decoder_bias: Vector<S>,
}

/// Loss `(1/2m) sum ||x - x_hat||^2 + beta * KL(rho || rho_hat)` and its
/// gradient, where `rho_hat` is the per-unit mean of the hidden activations
/// over the batch. The KL term feeds
/// `beta (-rho/r_j + (1-rho)/(1-r_j)) / m` back into each hidden unit.
pub fn sae_loss_and_gradient<S: Scalar>(
    params: &SparseAutoencoderParams<S>,
    batch: &Matrix<S>,
    sparsity: &SparsityConfig,
) -> Result<(S, SaeGradient<S>)> {
    sparsity.validate()?;
    if batch.nrows() == 0 {
        return Err(Error::EmptyDataset);
    }
    let (hidden, reconstruction) = sae_forward(params, batch)?;
    let m = S::from_f(batch.nrows() as f64);

    let diff = &reconstruction - batch;
    let recon_loss = diff.mapv(|d| d * d).sum() / (S::from_f(2.0) * m);
    let rho_hat = hidden.mean_axis(Axis(0)).expect("nonempty batch");
    let penalty = kl_sparsity(sparsity.rho, &rho_hat)?;
    let beta = S::from_f(sparsity.beta);
    let loss = recon_loss + beta * penalty;

    // output side: d loss / d x_hat = (x_hat - x) / m, times the logistic
    // derivative when the decoder output is squashed
    let d_out = match params.output_kind {
        OutputKind::Linear => diff / m,
        OutputKind::Logistic => {
            (diff / m) * reconstruction.mapv(|v| v * (S::one() - v))
        }
    };
    let decoder_weights = hidden.t().dot(&d_out);
    let decoder_bias = column_sums(&d_out);

    // hidden side: reconstruction pathway plus KL pathway through rho_hat
    let mut d_hidden = d_out.dot(&params.decoder_weights.t());
    let p = S::from_f(sparsity.rho);
    let q = S::one() - p;
    for (j, mut col) in d_hidden.columns_mut().into_iter().enumerate() {
        let r = clamp_activation(rho_hat[j]);
        let kl_term = beta * (-(p / r) + q / (S::one() - r)) / m;
        col.mapv_inplace(|v| v + kl_term);
    }
    let d_pre = d_hidden * hidden.mapv(|v| v * (S::one() - v));
    let encoder_weights = batch.t().dot(&d_pre);
    let encoder_bias = column_sums(&d_pre);

    Ok((
        loss,
        SaeGradient {
            encoder_weights,
            encoder_bias,
            decoder_weights,
            decoder_bias,
        },
    ))
}

/// Mini-batch gradient descent on [`sae_loss_and_gradient`]; same shuffling
/// and determinism contract as RBM training. Returns per-epoch mean batch
/// loss.
pub fn train_sae<S: Scalar>(
    init: SparseAutoencoderParams<S>,
    data: &Matrix<S>,
    sparsity: &SparsityConfig,
    config: &SaeTrainConfig,
) -> Result<(SparseAutoencoderParams<S>, Vec<f64>)> {
    config.validate()?;
    sparsity.validate()?;
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
    let lr = S::from_f(config.learning_rate);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut losses = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let batches = epoch_batches(data.nrows(), config.batch_size, &mut rng);
        let mut epoch_loss = 0.0;
        for (b, idx) in batches.iter().enumerate() {
            let batch = data.select(Axis(0), idx);
            let (loss, grad) = sae_loss_and_gradient(&params, &batch, sparsity)?;
            params.encoder_weights.scaled_add(-lr, &grad.encoder_weights);
            params.encoder_bias.scaled_add(-lr, &grad.encoder_bias);
            params.decoder_weights.scaled_add(-lr, &grad.decoder_weights);
            params.decoder_bias.scaled_add(-lr, &grad.decoder_bias);
            check_params(
                &[&params.encoder_weights, &params.decoder_weights],
                &[&params.encoder_bias, &params.decoder_bias],
                "sae step",
            )
            .map_err(|_| Error::NumericOverflow {
                context: format!("sae epoch {epoch}, batch {b}"),
            })?;
            epoch_loss += loss.to_f();
        }
        losses.push(epoch_loss / batches.len() as f64);
    }
    Ok((params, losses))
}

/// Trains one autoencoder per entry of `spec`, each on the previous hidden
/// activations. The first layer reconstructs standardized input with a
/// linear decoder; deeper layers see activations in (0, 1) and use a
/// logistic decoder. Seeding mirrors [`crate::dbn::greedy_pretrain`].
pub fn greedy_stack_sae<S: Scalar>(
    train_features: &Matrix<S>,
    spec: &LayerSpec,
    sparsity: &SparsityConfig,
    config: &SaeTrainConfig,
) -> Result<Vec<SparseAutoencoderParams<S>>> {
    if spec.hidden_sizes.is_empty() {
        return Err(Error::InvalidConfig("hidden_sizes must be nonempty".into()));
    }
    let mut encoders = Vec::with_capacity(spec.hidden_sizes.len());
    let mut input = train_features.clone();
    for (l, &n_hidden) in spec.hidden_sizes.iter().enumerate() {
        let layer_seed = config.seed.wrapping_add(l as u64);
        let kind = if l == 0 {
            OutputKind::Linear
        } else {
            OutputKind::Logistic
        };
        let mut init_rng = ChaCha8Rng::seed_from_u64(layer_seed ^ 0x9e37_79b9_7f4a_7c15);
        let init = SparseAutoencoderParams::init(input.ncols(), n_hidden, kind, &mut init_rng);
        let layer_cfg = SaeTrainConfig {
            seed: layer_seed,
            ..*config
        };
        let (trained, _losses) = train_sae(init, &input, sparsity, &layer_cfg)?;
        let (hidden, _) = sae_forward(&trained, &input)?;
        input = hidden;
        encoders.push(trained);
    }
    Ok(encoders)
}

/// Copies encoder weights/biases into classifier layers and attaches a
/// fresh softmax head, mirroring [`crate::dbn::unroll_to_classifier`].
pub fn unroll_encoders<S: Scalar>(
    encoders: &[SparseAutoencoderParams<S>],
    n_classes: usize,
    seed: u64,
) -> Result<FeedforwardClassifier<S>> {
    if encoders.is_empty() {
        return Err(Error::InvalidConfig("need at least one encoder".into()));
    }
    let layers = encoders
        .iter()
        .map(|e| (e.encoder_weights.clone(), e.encoder_bias.clone()))
        .collect();
    FeedforwardClassifier::from_layers(layers, n_classes, seed)
}
