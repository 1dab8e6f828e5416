//! Central finite-difference checks of every analytic gradient: the
//! classifier cross-entropy backprop and the sparse-autoencoder loss
//! including the KL pathway.

use deepdefect_core::data::Label;
use deepdefect_core::dbn::{
    cross_entropy_loss, loss_and_gradient, FeedforwardClassifier, N_CLASSES,
};
use deepdefect_core::linalg::gaussian_matrix;
use deepdefect_core::sae::{
    sae_loss_and_gradient, OutputKind, SparseAutoencoderParams, SparsityConfig,
};
use deepdefect_core::Matrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FD_STEP: f64 = 1e-5;
const TOLERANCE: f64 = 1e-5;

fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-3)
}

/// Central difference of `loss` along one coordinate reachable through
/// `slot`, which returns a mutable reference to that coordinate.
fn central_diff<T, F, G>(target: &mut T, loss: F, slot: G) -> f64
where
    F: Fn(&T) -> f64,
    G: Fn(&mut T) -> &mut f64,
{
    let original = *slot(target);
    *slot(target) = original + FD_STEP;
    let plus = loss(target);
    *slot(target) = original - FD_STEP;
    let minus = loss(target);
    *slot(target) = original;
    (plus - minus) / (2.0 * FD_STEP)
}

fn random_classifier(rng: &mut ChaCha8Rng) -> FeedforwardClassifier<f64> {
    // 4 inputs -> 3 hidden -> 2 hidden -> softmax head
    let layers = vec![
        (
            gaussian_matrix::<f64, _>(4, 3, 0.5, rng),
            gaussian_matrix::<f64, _>(1, 3, 0.5, rng).row(0).to_owned(),
        ),
        (
            gaussian_matrix::<f64, _>(3, 2, 0.5, rng),
            gaussian_matrix::<f64, _>(1, 2, 0.5, rng).row(0).to_owned(),
        ),
    ];
    let mut clf = FeedforwardClassifier::from_layers(layers, N_CLASSES, rng.random()).unwrap();
    clf.head.weights = gaussian_matrix::<f64, _>(2, 2, 0.5, rng);
    clf.head.bias = gaussian_matrix::<f64, _>(1, 2, 0.5, rng).row(0).to_owned();
    clf
}

fn random_batch(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> (Matrix<f64>, Vec<Label>) {
    let x = gaussian_matrix::<f64, _>(rows, cols, 1.0, rng);
    let y = (0..rows)
        .map(|_| {
            if rng.random::<f64>() < 0.5 {
                Label::Defective
            } else {
                Label::NonDefective
            }
        })
        .collect();
    (x, y)
}

#[test]
fn classifier_backprop_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _draw in 0..100 {
        let mut clf = random_classifier(&mut rng);
        let (x, y) = random_batch(&mut rng, 8, 4);
        let (_, grad) = loss_and_gradient(&clf, &x, &y).unwrap();
        let loss = |c: &FeedforwardClassifier<f64>| cross_entropy_loss(c, &x, &y).unwrap();

        for l in 0..clf.layers.len() {
            let (rows, cols) = clf.layers[l].weights.dim();
            for r in 0..rows {
                for c in 0..cols {
                    let numeric = central_diff(&mut clf, loss, |t| &mut t.layers[l].weights[(r, c)]);
                    worst = worst.max(rel_err(grad.layer_weights[l][(r, c)], numeric));
                }
            }
            for b in 0..clf.layers[l].bias.len() {
                let numeric = central_diff(&mut clf, loss, |t| &mut t.layers[l].bias[b]);
                worst = worst.max(rel_err(grad.layer_biases[l][b], numeric));
            }
        }
        let (rows, cols) = clf.head.weights.dim();
        for r in 0..rows {
            for c in 0..cols {
                let numeric = central_diff(&mut clf, loss, |t| &mut t.head.weights[(r, c)]);
                worst = worst.max(rel_err(grad.head_weights[(r, c)], numeric));
            }
        }
        for b in 0..clf.head.bias.len() {
            let numeric = central_diff(&mut clf, loss, |t| &mut t.head.bias[b]);
            worst = worst.max(rel_err(grad.head_bias[b], numeric));
        }
    }
    assert!(worst < TOLERANCE, "worst relative error {worst}");
}

fn check_sae_gradients(beta: f64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sparsity = SparsityConfig { rho: 0.05, beta };
    let mut worst = 0.0f64;
    for _draw in 0..100 {
        let mut sae = SparseAutoencoderParams::<f64>::init(4, 3, OutputKind::Linear, &mut rng);
        // larger random parameters so activations are not all near 0.5
        sae.encoder_weights = gaussian_matrix::<f64, _>(4, 3, 0.5, &mut rng);
        sae.decoder_weights = gaussian_matrix::<f64, _>(3, 4, 0.5, &mut rng);
        sae.encoder_bias = gaussian_matrix::<f64, _>(1, 3, 0.5, &mut rng).row(0).to_owned();
        sae.decoder_bias = gaussian_matrix::<f64, _>(1, 4, 0.5, &mut rng).row(0).to_owned();
        let x = gaussian_matrix::<f64, _>(6, 4, 1.0, &mut rng);
        let (_, grad) = sae_loss_and_gradient(&sae, &x, &sparsity).unwrap();
        let loss = |p: &SparseAutoencoderParams<f64>| {
            sae_loss_and_gradient(p, &x, &sparsity).unwrap().0
        };

        let (rows, cols) = sae.encoder_weights.dim();
        for r in 0..rows {
            for c in 0..cols {
                let numeric = central_diff(&mut sae, loss, |t| &mut t.encoder_weights[(r, c)]);
                worst = worst.max(rel_err(grad.encoder_weights[(r, c)], numeric));
            }
        }
        for b in 0..sae.encoder_bias.len() {
            let numeric = central_diff(&mut sae, loss, |t| &mut t.encoder_bias[b]);
            worst = worst.max(rel_err(grad.encoder_bias[b], numeric));
        }
        let (rows, cols) = sae.decoder_weights.dim();
        for r in 0..rows {
            for c in 0..cols {
                let numeric = central_diff(&mut sae, loss, |t| &mut t.decoder_weights[(r, c)]);
                worst = worst.max(rel_err(grad.decoder_weights[(r, c)], numeric));
            }
        }
        for b in 0..sae.decoder_bias.len() {
            let numeric = central_diff(&mut sae, loss, |t| &mut t.decoder_bias[b]);
            worst = worst.max(rel_err(grad.decoder_bias[b], numeric));
        }
    }
    worst
}

#[test]
fn sae_gradients_match_finite_differences_without_sparsity() {
    let worst = check_sae_gradients(0.0, 11);
    assert!(worst < TOLERANCE, "worst relative error {worst}");
}

#[test]
fn sae_gradients_match_finite_differences_with_default_sparsity() {
    let worst = check_sae_gradients(3.0, 12);
    assert!(worst < TOLERANCE, "worst relative error {worst}");
}

#[test]
fn sae_gradients_match_finite_differences_with_strong_sparsity() {
    let worst = check_sae_gradients(10.0, 13);
    assert!(worst < TOLERANCE, "worst relative error {worst}");
}

#[test]
fn logistic_output_kind_gradients_also_match() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let sparsity = SparsityConfig { rho: 0.05, beta: 3.0 };
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let mut sae = SparseAutoencoderParams::<f64>::init(3, 4, OutputKind::Logistic, &mut rng);
        sae.encoder_weights = gaussian_matrix::<f64, _>(3, 4, 0.5, &mut rng);
        sae.decoder_weights = gaussian_matrix::<f64, _>(4, 3, 0.5, &mut rng);
        // logistic decoders see inputs in (0, 1)
        let x = Matrix::from_shape_fn((5, 3), |_| rng.random::<f64>());
        let (_, grad) = sae_loss_and_gradient(&sae, &x, &sparsity).unwrap();
        let loss = |p: &SparseAutoencoderParams<f64>| {
            sae_loss_and_gradient(p, &x, &sparsity).unwrap().0
        };
        let (rows, cols) = sae.encoder_weights.dim();
        for r in 0..rows {
            for c in 0..cols {
                let numeric = central_diff(&mut sae, loss, |t| &mut t.encoder_weights[(r, c)]);
                worst = worst.max(rel_err(grad.encoder_weights[(r, c)], numeric));
            }
        }
        let (rows, cols) = sae.decoder_weights.dim();
        for r in 0..rows {
            for c in 0..cols {
                let numeric = central_diff(&mut sae, loss, |t| &mut t.decoder_weights[(r, c)]);
                worst = worst.max(rel_err(grad.decoder_weights[(r, c)], numeric));
            }
        }
    }
    assert!(worst < TOLERANCE, "worst relative error {worst}");
}
