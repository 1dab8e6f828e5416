//! Self-describing model serialization: every matrix is stored flat with
//! explicit shape, values as `f64` (lossless for both supported scalars),
//! under a format-version field.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dbn::{FeedforwardClassifier, Layer};
use crate::error::{Error, Result};
use crate::sae::SparseAutoencoderParams;
use crate::scalar::Scalar;
use crate::{Matrix, Vector};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Classifier,
    EncoderStack,
}

/// One dense layer: row-major weight values plus bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedLayer {
    pub rows: usize,
    pub cols: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedModel {
    pub format_version: u32,
    pub kind: ModelKind,
    pub layers: Vec<SavedLayer>,
    /// Present only for `ModelKind::Classifier`.
    pub head: Option<SavedLayer>,
}

fn to_saved_layer<S: Scalar>(weights: &Matrix<S>, bias: &Vector<S>) -> SavedLayer {
    SavedLayer {
        rows: weights.nrows(),
        cols: weights.ncols(),
        weights: weights.iter().map(|v| v.to_f()).collect(),
        bias: bias.iter().map(|v| v.to_f()).collect(),
    }
}

fn from_saved_layer<S: Scalar>(layer: &SavedLayer) -> Result<(Matrix<S>, Vector<S>)> {
    if layer.weights.len() != layer.rows * layer.cols {
        return Err(Error::Serialization(format!(
            "layer declares {}x{} but has {} weights",
            layer.rows,
            layer.cols,
            layer.weights.len()
        )));
    }
    if layer.bias.len() != layer.cols {
        return Err(Error::Serialization(format!(
            "layer bias length {} does not match {} columns",
            layer.bias.len(),
            layer.cols
        )));
    }
    let w = Matrix::from_shape_vec(
        (layer.rows, layer.cols),
        layer.weights.iter().map(|&v| S::from_f(v)).collect(),
    )
    .map_err(|e| Error::Serialization(e.to_string()))?;
    let b = Vector::from_vec(layer.bias.iter().map(|&v| S::from_f(v)).collect());
    Ok((w, b))
}

impl SavedModel {
    pub fn from_classifier<S: Scalar>(clf: &FeedforwardClassifier<S>) -> Self {
        SavedModel {
            format_version: FORMAT_VERSION,
            kind: ModelKind::Classifier,
            layers: clf
                .layers
                .iter()
                .map(|l| to_saved_layer(&l.weights, &l.bias))
                .collect(),
            head: Some(to_saved_layer(&clf.head.weights, &clf.head.bias)),
        }
    }

    /// Encoder weights/biases only, in stack order; decoders are not part
    /// of the unrolled model.
    pub fn from_encoders<S: Scalar>(encoders: &[SparseAutoencoderParams<S>]) -> Self {
        SavedModel {
            format_version: FORMAT_VERSION,
            kind: ModelKind::EncoderStack,
            layers: encoders
                .iter()
                .map(|e| to_saved_layer(&e.encoder_weights, &e.encoder_bias))
                .collect(),
            head: None,
        }
    }

    pub fn to_classifier<S: Scalar>(&self) -> Result<FeedforwardClassifier<S>> {
        if self.kind != ModelKind::Classifier {
            return Err(Error::Serialization(
                "model is not a classifier".into(),
            ));
        }
        let head = self
            .head
            .as_ref()
            .ok_or_else(|| Error::Serialization("classifier is missing its head".into()))?;
        let mut layers = Vec::with_capacity(self.layers.len());
        for saved in &self.layers {
            let (weights, bias) = from_saved_layer(saved)?;
            layers.push(Layer { weights, bias });
        }
        if layers.is_empty() {
            return Err(Error::Serialization("classifier has no layers".into()));
        }
        let (weights, bias) = from_saved_layer(head)?;
        Ok(FeedforwardClassifier {
            layers,
            head: Layer { weights, bias },
        })
    }
}

pub fn save_model(path: impl AsRef<Path>, model: &SavedModel) -> Result<()> {
    let path = path.as_ref();
    let json = serde_json::to_string(model).map_err(|e| Error::Serialization(e.to_string()))?;
    std::fs::write(path, json).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SavedModel> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let model: SavedModel =
        serde_json::from_str(&text).map_err(|e| Error::Serialization(e.to_string()))?;
    if model.format_version != FORMAT_VERSION {
        return Err(Error::UnsupportedFormatVersion(model.format_version));
    }
    Ok(model)
}
