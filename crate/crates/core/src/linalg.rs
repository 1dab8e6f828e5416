//! Small numeric kernels shared by the RBM, autoencoder and classifier code.

use ndarray::Axis;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::{Matrix, Vector};

/// Probabilities coming out of [`logistic`] are clamped to
/// `[PROB_FLOOR, 1 - PROB_FLOOR]` so they stay strictly inside (0, 1) even
/// for extreme pre-activations.
pub const PROB_FLOOR: f64 = 1e-12;

/// Magnitude bound on trained parameters; exceeding it aborts training with
/// a numeric-overflow error.
pub const PARAM_GUARD: f64 = 1e6;

/// Numerically stable logistic function, `1 / (1 + exp(-x))`.
///
/// Evaluated on the side of the branch that avoids `exp` overflow, then
/// clamped into the open unit interval. Finite for any finite input.
pub fn logistic<S: Scalar>(x: S) -> S {
    let p = if x >= S::zero() {
        S::one() / (S::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (S::one() + e)
    };
    let floor = S::from_f(PROB_FLOOR);
    p.max(floor).min(S::one() - floor)
}

/// `x · w + b`, with `b` broadcast across rows.
pub fn affine<S: Scalar>(x: &Matrix<S>, w: &Matrix<S>, b: &Vector<S>) -> Result<Matrix<S>> {
    if x.ncols() != w.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "input width {} does not match weight rows {}",
            x.ncols(),
            w.nrows()
        )));
    }
    if w.ncols() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "weight cols {} does not match bias length {}",
            w.ncols(),
            b.len()
        )));
    }
    Ok(x.dot(w) + b)
}

/// Logistic layer: `sigma(x · w + b)` elementwise.
pub fn logistic_layer<S: Scalar>(x: &Matrix<S>, w: &Matrix<S>, b: &Vector<S>) -> Result<Matrix<S>> {
    Ok(affine(x, w, b)?.mapv(logistic))
}

/// Row-wise softmax with the max-subtraction trick.
pub fn softmax_rows<S: Scalar>(logits: &Matrix<S>) -> Matrix<S> {
    let mut out = logits.clone();
    for mut row in out.rows_mut() {
        let max = row.iter().copied().fold(S::neg_infinity(), S::max);
        row.mapv_inplace(|z| (z - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|z| z / sum);
    }
    out
}

/// Matrix of i.i.d. `N(0, std^2)` entries. Draws are taken as `f64` and
/// converted so the stream does not depend on the scalar type.
pub fn gaussian_matrix<S: Scalar, R: Rng>(
    rows: usize,
    cols: usize,
    std: f64,
    rng: &mut R,
) -> Matrix<S> {
    Matrix::from_shape_fn((rows, cols), |_| {
        let z: f64 = StandardNormal.sample(rng);
        S::from_f(z * std)
    })
}

/// Width-scaled Gaussian init, `std = sqrt(2 / (fan_in + fan_out))`.
///
/// A fixed tiny std (e.g. 0.01) leaves every logistic unit at ~0.5 and the
/// pinned learning-rate/epoch budget cannot break that symmetry, so all
/// weight matrices are initialized at this scale instead.
pub fn scaled_init_matrix<S: Scalar, R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Matrix<S> {
    let std = (2.0 / (rows + cols) as f64).sqrt();
    gaussian_matrix(rows, cols, std, rng)
}

/// Elementwise Bernoulli sample of a probability matrix.
///
/// Draws one uniform per entry in row-major order; callers relying on a
/// scripted RNG (tests) depend on that order.
pub fn bernoulli_sample<S: Scalar, R: Rng>(probs: &Matrix<S>, rng: &mut R) -> Matrix<S> {
    Matrix::from_shape_fn(probs.dim(), |(i, j)| {
        let u: f64 = rng.random();
        if u < probs[(i, j)].to_f() {
            S::one()
        } else {
            S::zero()
        }
    })
}

/// Sum of each column, as a vector.
pub fn column_sums<S: Scalar>(m: &Matrix<S>) -> Vector<S> {
    m.sum_axis(Axis(0))
}

pub fn ensure_finite_matrix<S: Scalar>(m: &Matrix<S>, what: &str) -> Result<()> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(what.to_string()));
    }
    Ok(())
}

/// Overflow guard applied after each parameter update.
pub fn check_params<S: Scalar>(tensors: &[&Matrix<S>], biases: &[&Vector<S>], context: &str) -> Result<()> {
    let guard = S::from_f(PARAM_GUARD);
    let bad = tensors
        .iter()
        .flat_map(|m| m.iter())
        .chain(biases.iter().flat_map(|b| b.iter()))
        .any(|v| !v.is_finite() || v.abs() > guard);
    if bad {
        return Err(Error::NumericOverflow {
            context: context.to_string(),
        });
    }
    Ok(())
}
