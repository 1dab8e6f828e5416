// scalar-loop oracles index on purpose; keep them visibly element-wise
#![allow(clippy::needless_range_loop)]

//! Validates the CD-1 update against independent scalar-loop oracles: a
//! single forced hidden sample, and the exact expectation over all
//! 2^n_hidden hidden states of a tiny Bernoulli-Bernoulli RBM.

use deepdefect_core::rbm::{cd1_update, RbmParams, VisibleKind};
use deepdefect_core::{Matrix, Vector};
use ndarray::array;
use rand::RngCore;

/// RNG whose uniform draws are scripted: `u64::MAX` makes a Bernoulli
/// comparison sample 0, `0` makes it sample 1 (the `f64` draw is
/// `next_u64 >> 11` scaled by 2^-53).
struct ScriptedRng {
    words: Vec<u64>,
    pos: usize,
}

impl ScriptedRng {
    /// Scripts the hidden sample `pattern` for one batch row (draw order is
    /// row-major over hidden units).
    fn forcing(pattern: &[u8]) -> Self {
        ScriptedRng {
            words: pattern
                .iter()
                .map(|&bit| if bit == 1 { 0u64 } else { u64::MAX })
                .collect(),
            pos: 0,
        }
    }
}

impl RngCore for ScriptedRng {
    fn next_u32(&mut self) -> u32 {
        self.next_u64() as u32
    }
    fn next_u64(&mut self) -> u64 {
        let w = self.words[self.pos];
        self.pos += 1;
        w
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn fixture_rbm() -> RbmParams<f64> {
    RbmParams::new(
        array![[0.4f64, -0.3], [0.2, 0.5], [-0.6, 0.1]],
        array![0.1f64, -0.2, 0.05],
        array![0.3f64, -0.4],
        VisibleKind::Bernoulli,
    )
    .unwrap()
}

/// Scalar-loop CD-1 for one visible row and a fixed hidden sample.
/// Independent of the library implementation: every sum is an explicit loop.
#[allow(clippy::needless_range_loop)]
fn oracle_update(
    rbm: &RbmParams<f64>,
    v0: &[f64],
    h0: &[u8],
    lr: f64,
) -> (Matrix<f64>, Vector<f64>, Vector<f64>) {
    let n_v = v0.len();
    let n_h = h0.len();
    let mut p0 = vec![0.0; n_h];
    for j in 0..n_h {
        let mut act = rbm.hidden_bias[j];
        for i in 0..n_v {
            act += v0[i] * rbm.weights[(i, j)];
        }
        p0[j] = sigmoid(act);
    }
    let mut v1 = vec![0.0; n_v];
    for i in 0..n_v {
        let mut act = rbm.visible_bias[i];
        for j in 0..n_h {
            act += h0[j] as f64 * rbm.weights[(i, j)];
        }
        v1[i] = sigmoid(act);
    }
    let mut p1 = vec![0.0; n_h];
    for j in 0..n_h {
        let mut act = rbm.hidden_bias[j];
        for i in 0..n_v {
            act += v1[i] * rbm.weights[(i, j)];
        }
        p1[j] = sigmoid(act);
    }
    let mut dw = Matrix::<f64>::zeros((n_v, n_h));
    for i in 0..n_v {
        for j in 0..n_h {
            dw[(i, j)] = lr * (v0[i] * p0[j] - v1[i] * p1[j]);
        }
    }
    let dvb = Vector::from_shape_fn(n_v, |i| lr * (v0[i] - v1[i]));
    let dhb = Vector::from_shape_fn(n_h, |j| lr * (p0[j] - p1[j]));
    (dw, dvb, dhb)
}

fn implementation_update(
    rbm: &RbmParams<f64>,
    v0: &[f64],
    pattern: &[u8],
    lr: f64,
) -> (Matrix<f64>, Vector<f64>, Vector<f64>) {
    let mut params = rbm.clone();
    let batch = Matrix::from_shape_vec((1, v0.len()), v0.to_vec()).unwrap();
    let mut rng = ScriptedRng::forcing(pattern);
    cd1_update(&mut params, &batch, lr, &mut rng).unwrap();
    (
        params.weights - &rbm.weights,
        params.visible_bias - &rbm.visible_bias,
        params.hidden_bias - &rbm.hidden_bias,
    )
}

#[test]
fn single_step_update_matches_hand_computed_outer_products() {
    let rbm = fixture_rbm();
    let v0 = [1.0, 0.0, 1.0];
    let lr = 0.1;
    for pattern in [[1u8, 0], [0, 1], [1, 1], [0, 0]] {
        let (dw, dvb, dhb) = implementation_update(&rbm, &v0, &pattern, lr);
        let (ow, ovb, ohb) = oracle_update(&rbm, &v0, &pattern, lr);
        for (a, b) in dw.iter().zip(ow.iter()) {
            assert!((a - b).abs() < 1e-12, "weight delta {a} vs oracle {b}");
        }
        for (a, b) in dvb.iter().zip(ovb.iter()) {
            assert!((a - b).abs() < 1e-12, "visible bias delta {a} vs oracle {b}");
        }
        for (a, b) in dhb.iter().zip(ohb.iter()) {
            assert!((a - b).abs() < 1e-12, "hidden bias delta {a} vs oracle {b}");
        }
    }
}

/// Exhaustive marginalization over the 2^2 hidden states: weighting each
/// forced-pattern update by the probability of its hidden sample must
/// reproduce the oracle's expected update exactly.
#[test]
fn expected_update_over_all_hidden_states_matches_brute_force_oracle() {
    let rbm = fixture_rbm();
    let v0 = [1.0, 0.0, 1.0];
    let lr = 0.05;

    // hidden probabilities for the weighting, by scalar loop
    let mut p0 = [0.0f64; 2];
    for j in 0..2 {
        let mut act = rbm.hidden_bias[j];
        for i in 0..3 {
            act += v0[i] * rbm.weights[(i, j)];
        }
        p0[j] = sigmoid(act);
    }

    let patterns = [[0u8, 0], [0, 1], [1, 0], [1, 1]];
    let mut expect_w = Matrix::<f64>::zeros((3, 2));
    let mut expect_vb = Vector::<f64>::zeros(3);
    let mut expect_hb = Vector::<f64>::zeros(2);
    let mut impl_w = Matrix::<f64>::zeros((3, 2));
    let mut impl_vb = Vector::<f64>::zeros(3);
    let mut impl_hb = Vector::<f64>::zeros(2);
    let mut total_weight = 0.0;

    for pattern in patterns {
        let prob: f64 = (0..2)
            .map(|j| if pattern[j] == 1 { p0[j] } else { 1.0 - p0[j] })
            .product();
        total_weight += prob;

        let (ow, ovb, ohb) = oracle_update(&rbm, &v0, &pattern, lr);
        expect_w += &(ow * prob);
        expect_vb += &(ovb * prob);
        expect_hb += &(ohb * prob);

        let (dw, dvb, dhb) = implementation_update(&rbm, &v0, &pattern, lr);
        impl_w += &(dw * prob);
        impl_vb += &(dvb * prob);
        impl_hb += &(dhb * prob);
    }

    assert!((total_weight - 1.0).abs() < 1e-12);
    for (a, b) in impl_w.iter().zip(expect_w.iter()) {
        assert!((a - b).abs() < 1e-8, "marginal weight update {a} vs {b}");
    }
    for (a, b) in impl_vb.iter().zip(expect_vb.iter()) {
        assert!((a - b).abs() < 1e-8, "marginal visible bias {a} vs {b}");
    }
    for (a, b) in impl_hb.iter().zip(expect_hb.iter()) {
        assert!((a - b).abs() < 1e-8, "marginal hidden bias {a} vs {b}");
    }
}

#[test]
fn scripted_rng_actually_forces_the_sample() {
    // probabilities strictly inside (0,1): u=0 forces 1, u=max forces 0
    let probs = array![[0.9999f64, 0.0001]];
    let mut rng = ScriptedRng::forcing(&[0, 1]);
    let sample = deepdefect_core::linalg::bernoulli_sample(&probs, &mut rng);
    assert_eq!(sample, array![[0.0f64, 1.0]]);
}
