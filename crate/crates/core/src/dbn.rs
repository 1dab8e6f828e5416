//! Greedy layerwise RBM stacking, unrolling into a logistic feedforward
//! classifier with a softmax head, and supervised fine-tuning.

use ndarray::Axis;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::error::{Error, Result};
use crate::linalg::{
    affine, check_params, column_sums, ensure_finite_matrix, logistic_layer, scaled_init_matrix,
    softmax_rows,
};
use crate::rbm::{hidden_probabilities, train_rbm, RbmParams, RbmTrainConfig, VisibleKind};
use crate::scalar::Scalar;
use crate::train::{epoch_batches, TrainConfig};
use crate::{Matrix, Vector};

/// Number of output classes (defective / non-defective).
pub const N_CLASSES: usize = 2;

/// Hidden layer widths, input side first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub hidden_sizes: Vec<usize>,
}

impl LayerSpec {
    pub fn new(hidden_sizes: Vec<usize>) -> Result<Self> {
        if hidden_sizes.is_empty() {
            return Err(Error::InvalidConfig("hidden_sizes must be nonempty".into()));
        }
        if hidden_sizes.contains(&0) {
            return Err(Error::InvalidConfig("hidden layer sizes must be >= 1".into()));
        }
        Ok(LayerSpec { hidden_sizes })
    }
}

/// Hyperparameters for [`fine_tune`].
pub type FineTuneConfig = TrainConfig;

/// One dense layer: weights (n_in x n_out) plus bias.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer<S: Scalar> {
    pub weights: Matrix<S>,
    pub bias: Vector<S>,
}

/// Stack of logistic layers with a softmax output head.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedforwardClassifier<S: Scalar> {
    pub layers: Vec<Layer<S>>,
    pub head: Layer<S>,
}

impl<S: Scalar> FeedforwardClassifier<S> {
    /// Builds a classifier from hidden-layer parameters, attaching a fresh
    /// softmax head (width-scaled Gaussian weights, zero bias) seeded by `seed`.
    pub fn from_layers(
        layers: Vec<(Matrix<S>, Vector<S>)>,
        n_classes: usize,
        seed: u64,
    ) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidConfig("classifier needs at least one layer".into()));
        }
        if n_classes != N_CLASSES {
            return Err(Error::InvalidConfig(format!(
                "only {N_CLASSES} output classes are supported, got {n_classes}"
            )));
        }
        let layers: Vec<Layer<S>> = layers
            .into_iter()
            .map(|(weights, bias)| Layer { weights, bias })
            .collect();
        for window in layers.windows(2) {
            if window[0].weights.ncols() != window[1].weights.nrows() {
                return Err(Error::DimensionMismatch(format!(
                    "layer output width {} does not feed layer input width {}",
                    window[0].weights.ncols(),
                    window[1].weights.nrows()
                )));
            }
        }
        for layer in &layers {
            if layer.weights.ncols() != layer.bias.len() {
                return Err(Error::DimensionMismatch(
                    "layer bias length does not match weight columns".into(),
                ));
            }
        }
        let top = layers.last().expect("nonempty").weights.ncols();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let head = Layer {
            weights: scaled_init_matrix(top, n_classes, &mut rng),
            bias: Vector::zeros(n_classes),
        };
        Ok(FeedforwardClassifier { layers, head })
    }

    pub fn n_inputs(&self) -> usize {
        self.layers[0].weights.nrows()
    }

    /// Activations after every hidden layer; index 0 is the input itself.
    pub fn hidden_activations(&self, x: &Matrix<S>) -> Result<Vec<Matrix<S>>> {
        ensure_finite_matrix(x, "classifier input")?;
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.clone());
        for layer in &self.layers {
            let next = logistic_layer(acts.last().expect("nonempty"), &layer.weights, &layer.bias)?;
            acts.push(next);
        }
        Ok(acts)
    }

    /// Output of the last hidden layer.
    pub fn hidden_forward(&self, x: &Matrix<S>) -> Result<Matrix<S>> {
        Ok(self.hidden_activations(x)?.pop().expect("nonempty"))
    }

    pub fn logits(&self, x: &Matrix<S>) -> Result<Matrix<S>> {
        affine(&self.hidden_forward(x)?, &self.head.weights, &self.head.bias)
    }
}

/// Trains one RBM per entry of `spec`, each on the hidden probabilities of
/// the layer below. The first RBM uses Gaussian visible units (standardized
/// real input), deeper ones Bernoulli. Layer l trains with seed
/// `config.seed + l`; its weights are initialized from an xor-scrambled
/// stream of the same seed so init and shuffling stay independent.
pub fn greedy_pretrain<S: Scalar>(
    train_features: &Matrix<S>,
    spec: &LayerSpec,
    config: &RbmTrainConfig,
) -> Result<Vec<RbmParams<S>>> {
    if spec.hidden_sizes.is_empty() {
        return Err(Error::InvalidConfig("hidden_sizes must be nonempty".into()));
    }
    let mut rbms = Vec::with_capacity(spec.hidden_sizes.len());
    let mut input = train_features.clone();
    for (l, &n_hidden) in spec.hidden_sizes.iter().enumerate() {
        let layer_seed = config.seed.wrapping_add(l as u64);
        let kind = if l == 0 {
            VisibleKind::Gaussian
        } else {
            VisibleKind::Bernoulli
        };
        let mut init_rng = ChaCha8Rng::seed_from_u64(layer_seed ^ 0x9e37_79b9_7f4a_7c15);
        let init = RbmParams::init(input.ncols(), n_hidden, kind, &mut init_rng);
        let layer_cfg = RbmTrainConfig {
            seed: layer_seed,
            ..*config
        };
        let (trained, _errors) = train_rbm(init, &input, &layer_cfg)?;
        input = hidden_probabilities(&trained, &input)?;
        rbms.push(trained);
    }
    Ok(rbms)
}

/// Copies pretrained RBM weights and hidden biases into classifier layers
/// and attaches a fresh softmax head.
pub fn unroll_to_classifier<S: Scalar>(
    rbms: &[RbmParams<S>],
    n_classes: usize,
    seed: u64,
) -> Result<FeedforwardClassifier<S>> {
    if rbms.is_empty() {
        return Err(Error::InvalidConfig("need at least one pretrained RBM".into()));
    }
    for window in rbms.windows(2) {
        if window[0].n_hidden() != window[1].n_visible() {
            return Err(Error::DimensionMismatch(format!(
                "RBM with {} hidden units feeds RBM with {} visible units",
                window[0].n_hidden(),
                window[1].n_visible()
            )));
        }
    }
    let layers = rbms
        .iter()
        .map(|r| (r.weights.clone(), r.hidden_bias.clone()))
        .collect();
    FeedforwardClassifier::from_layers(layers, n_classes, seed)
}

/// Gradients for every classifier parameter, shaped like the classifier.
#[derive(Debug, Clone)]
pub struct ClassifierGradient<S: Scalar> {
    pub layer_weights: Vec<Matrix<S>>,
    pub layer_biases: Vec<Vector<S>>,
    pub head_weights: Matrix<S>,
    pub head_bias: Vector<S>,
}

fn one_hot<S: Scalar>(labels: &[Label]) -> Matrix<S> {
    let mut y = Matrix::zeros((labels.len(), N_CLASSES));
    for (i, label) in labels.iter().enumerate() {
        y[(i, label.class_index())] = S::one();
    }
    y
}

/// Mean softmax cross-entropy of the classifier on `(x, y)`.
pub fn cross_entropy_loss<S: Scalar>(
    clf: &FeedforwardClassifier<S>,
    x: &Matrix<S>,
    y: &[Label],
) -> Result<S> {
    if y.len() != x.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {} rows",
            y.len(),
            x.nrows()
        )));
    }
    if x.nrows() == 0 {
        return Err(Error::EmptyDataset);
    }
    let logits = clf.logits(x)?;
    let m = S::from_f(x.nrows() as f64);
    let mut total = S::zero();
    for (row, label) in logits.rows().into_iter().zip(y) {
        let max = row.iter().copied().fold(S::neg_infinity(), S::max);
        let log_norm = row.iter().map(|&z| (z - max).exp()).sum::<S>().ln();
        let log_prob = row[label.class_index()] - max - log_norm;
        total -= log_prob;
    }
    Ok(total / m)
}

/// Mean cross-entropy and its gradient with respect to every parameter,
/// by backpropagation through the logistic layers and softmax head.
pub fn loss_and_gradient<S: Scalar>(
    clf: &FeedforwardClassifier<S>,
    x: &Matrix<S>,
    y: &[Label],
) -> Result<(S, ClassifierGradient<S>)> {
    let loss = cross_entropy_loss(clf, x, y)?;
    let acts = clf.hidden_activations(x)?;
    let top = acts.last().expect("nonempty");
    let logits = affine(top, &clf.head.weights, &clf.head.bias)?;
    let probs = softmax_rows(&logits);
    let m = S::from_f(x.nrows() as f64);

    // dL/dz for the head: (softmax - onehot) / m
    let dz_head = (&probs - &one_hot::<S>(y)) / m;
    let head_weights = top.t().dot(&dz_head);
    let head_bias = column_sums(&dz_head);

    let mut layer_weights = vec![Matrix::zeros((0, 0)); clf.layers.len()];
    let mut layer_biases = vec![Vector::zeros(0); clf.layers.len()];
    let mut upstream = dz_head.dot(&clf.head.weights.t());
    for l in (0..clf.layers.len()).rev() {
        let a = &acts[l + 1];
        let dz = upstream * a.mapv(|v| v * (S::one() - v));
        layer_weights[l] = acts[l].t().dot(&dz);
        layer_biases[l] = column_sums(&dz);
        upstream = dz.dot(&clf.layers[l].weights.t());
    }
    Ok((
        loss,
        ClassifierGradient {
            layer_weights,
            layer_biases,
            head_weights,
            head_bias,
        },
    ))
}

fn sgd_step<S: Scalar>(
    clf: &mut FeedforwardClassifier<S>,
    grad: &ClassifierGradient<S>,
    lr: S,
) {
    for (layer, (gw, gb)) in clf
        .layers
        .iter_mut()
        .zip(grad.layer_weights.iter().zip(grad.layer_biases.iter()))
    {
        layer.weights.scaled_add(-lr, gw);
        layer.bias.scaled_add(-lr, gb);
    }
    clf.head.weights.scaled_add(-lr, &grad.head_weights);
    clf.head.bias.scaled_add(-lr, &grad.head_bias);
}

/// Fraction of samples whose predicted hard label differs from `y`.
pub fn misclassification_rate<S: Scalar>(
    clf: &FeedforwardClassifier<S>,
    x: &Matrix<S>,
    y: &[Label],
) -> Result<f64> {
    let predicted = predict(clf, x)?.labels;
    let wrong = predicted.iter().zip(y).filter(|(p, a)| p != a).count();
    Ok(wrong as f64 / y.len() as f64)
}

/// Supervised fine-tuning: mini-batch SGD on mean cross-entropy, updating
/// all layers and the head. `error_per_epoch[e]` is the training-set
/// misclassification rate after epoch `e`.
pub fn fine_tune<S: Scalar>(
    classifier: FeedforwardClassifier<S>,
    train_features: &Matrix<S>,
    train_labels: &[Label],
    config: &FineTuneConfig,
) -> Result<(FeedforwardClassifier<S>, Vec<f64>)> {
    config.validate()?;
    if train_labels.len() != train_features.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {} rows",
            train_labels.len(),
            train_features.nrows()
        )));
    }
    if train_features.nrows() == 0 {
        return Err(Error::EmptyDataset);
    }
    if train_features.ncols() != classifier.n_inputs() {
        return Err(Error::DimensionMismatch(format!(
            "feature width {} does not match classifier input width {}",
            train_features.ncols(),
            classifier.n_inputs()
        )));
    }
    let mut clf = classifier;
    let lr = S::from_f(config.learning_rate);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut errors = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        for (b, idx) in epoch_batches(train_features.nrows(), config.batch_size, &mut rng)
            .iter()
            .enumerate()
        {
            let bx = train_features.select(Axis(0), idx);
            let by: Vec<Label> = idx.iter().map(|&i| train_labels[i]).collect();
            let (_, grad) = loss_and_gradient(&clf, &bx, &by)?;
            sgd_step(&mut clf, &grad, lr);
            let weight_refs: Vec<&Matrix<S>> = clf
                .layers
                .iter()
                .map(|l| &l.weights)
                .chain(std::iter::once(&clf.head.weights))
                .collect();
            let bias_refs: Vec<&Vector<S>> = clf
                .layers
                .iter()
                .map(|l| &l.bias)
                .chain(std::iter::once(&clf.head.bias))
                .collect();
            check_params(&weight_refs, &bias_refs, "fine-tune step").map_err(|_| {
                Error::NumericOverflow {
                    context: format!("fine-tune epoch {epoch}, batch {b}"),
                }
            })?;
        }
        errors.push(misclassification_rate(&clf, train_features, train_labels)?);
    }
    Ok((clf, errors))
}

/// Per-sample class probabilities and hard labels.
#[derive(Debug, Clone)]
pub struct Predictions<S: Scalar> {
    /// One row per sample: [p(non-defective), p(defective)].
    pub probabilities: Matrix<S>,
    pub labels: Vec<Label>,
}

/// Softmax probabilities plus argmax labels; ties go to the lower class
/// index (non-defective).
pub fn predict<S: Scalar>(
    clf: &FeedforwardClassifier<S>,
    features: &Matrix<S>,
) -> Result<Predictions<S>> {
    let probabilities = softmax_rows(&clf.logits(features)?);
    let labels = probabilities
        .rows()
        .into_iter()
        .map(|row| {
            if row[1] > row[0] {
                Label::Defective
            } else {
                Label::NonDefective
            }
        })
        .collect();
    Ok(Predictions {
        probabilities,
        labels,
    })
}
