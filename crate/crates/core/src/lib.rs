//! Deep generative models for software defect prediction.
//!
//! Builds two classifiers from scratch on top of `ndarray`:
//!
//! * a deep belief network: stacked RBMs pretrained with single-step
//!   contrastive divergence, unrolled into a logistic feedforward net with
//!   a softmax head and fine-tuned by backpropagation ([`rbm`], [`dbn`]);
//! * a stacked sparse autoencoder: KL-penalty autoencoders trained
//!   layerwise, unrolled and fine-tuned the same way ([`sae`]).
//!
//! Around them sit dataset loading with standardization and stratified
//! k-fold splitting ([`data`]), confusion-matrix metrics with k-fold
//! aggregation and cross-method ranking ([`eval`]), and a lossless model
//! serialization format ([`model_io`]).
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); every
//! training routine is deterministic given its seed.

pub mod data;
pub mod dbn;
mod error;
pub mod eval;
pub mod linalg;
pub mod model_io;
pub mod rbm;
pub mod sae;
mod scalar;
pub mod train;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use train::TrainConfig;

/// Dense matrix of scalars, shape (rows x cols).
pub type Matrix<S> = ndarray::Array2<S>;
/// Dense vector of scalars.
pub type Vector<S> = ndarray::Array1<S>;

// Concrete aliases for the common double-precision instantiation (the CLI
// and the experiment pipeline run on these).
pub type Matrix64 = Matrix<f64>;
pub type Vector64 = Vector<f64>;
pub type Dataset64 = data::Dataset<f64>;
pub type RbmParams64 = rbm::RbmParams<f64>;
pub type Classifier64 = dbn::FeedforwardClassifier<f64>;
pub type SparseAutoencoder64 = sae::SparseAutoencoderParams<f64>;

// Single-precision variants.
pub type Matrix32 = Matrix<f32>;
pub type Vector32 = Vector<f32>;
pub type Dataset32 = data::Dataset<f32>;
pub type RbmParams32 = rbm::RbmParams<f32>;
pub type Classifier32 = dbn::FeedforwardClassifier<f32>;
pub type SparseAutoencoder32 = sae::SparseAutoencoderParams<f32>;
