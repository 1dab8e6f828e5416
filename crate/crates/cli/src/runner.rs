//! Executes one experiment: load, standardize, split, per-fold pretrain /
//! unroll / fine-tune / predict, aggregate metrics and error curves.

use std::time::Instant;

use sha2::{Digest, Sha256};

use deepdefect_core::data::{
    load_arff_with, load_csv_with, stratified_kfold, zscore_apply, zscore_fit, MissingPolicy,
};
use deepdefect_core::dbn::{
    fine_tune, greedy_pretrain, predict, unroll_to_classifier, LayerSpec, N_CLASSES,
};
use deepdefect_core::eval::{cross_validate, CvSummary};
use deepdefect_core::sae::{greedy_stack_sae, unroll_encoders};
use deepdefect_core::{Dataset64, Error, Matrix64, Result, TrainConfig};

use crate::config::{DatasetFormat, ExperimentConfig, ModelChoice};
use crate::reference::dataset_stats;

/// Seed offsets for the phases within one fold; layerwise pretraining
/// consumes `fold_seed + layer`, so offsets leave room for deep stacks.
const HEAD_SEED_OFFSET: u64 = 1000;
const FINE_TUNE_SEED_OFFSET: u64 = 2000;

/// Everything a run produced; sufficient to re-run identically.
#[derive(Debug, Clone)]
pub struct ResultsBundle {
    pub config: ExperimentConfig,
    pub dataset_name: String,
    pub sample_count: usize,
    pub feature_count: usize,
    pub defective_ratio: f64,
    pub dropped_rows: usize,
    pub dataset_sha256: String,
    /// Set when the loaded sample count deviates from the published count.
    pub sample_count_note: Option<String>,
    pub summary: CvSummary,
    /// Fine-tune training misclassification rate per epoch, one curve per fold.
    pub fold_curves: Vec<Vec<f64>>,
    /// Across-fold mean of the fold curves.
    pub mean_curve: Vec<f64>,
    pub fold_seconds: Vec<f64>,
    pub total_seconds: f64,
}

pub fn file_sha256(path: &std::path::Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn load_dataset(config: &ExperimentConfig) -> Result<(Dataset64, usize)> {
    let policy = if config.impute_missing {
        MissingPolicy::ImputeColumnMean
    } else {
        MissingPolicy::DropRows
    };
    let (dataset, report) = match config.dataset_format {
        DatasetFormat::Arff => load_arff_with::<f64>(&config.dataset_path, policy)?,
        DatasetFormat::Csv => {
            let column = config.label_column.as_deref().ok_or_else(|| {
                Error::InvalidConfig("label_column is required for csv datasets".into())
            })?;
            load_csv_with::<f64>(&config.dataset_path, column, policy)?
        }
    };
    Ok((dataset, report.dropped_rows))
}

fn train_and_predict_fold(
    config: &ExperimentConfig,
    train_x: &Matrix64,
    train_y: &[deepdefect_core::data::Label],
    test_x: &Matrix64,
    fold_seed: u64,
) -> Result<(Vec<deepdefect_core::data::Label>, Vec<f64>)> {
    let spec = LayerSpec::new(config.hidden_sizes.clone())?;
    let pretrain_cfg = TrainConfig {
        epochs: config.pretrain.epochs,
        batch_size: config.pretrain.batch_size.min(train_x.nrows()),
        learning_rate: config.pretrain.learning_rate,
        seed: fold_seed,
    };
    let head_seed = fold_seed.wrapping_add(HEAD_SEED_OFFSET);
    let classifier = match config.model {
        ModelChoice::Dbn => {
            let rbms = greedy_pretrain(train_x, &spec, &pretrain_cfg)?;
            unroll_to_classifier(&rbms, N_CLASSES, head_seed)?
        }
        ModelChoice::Ssae => {
            let sparsity = config.sparsity.ok_or_else(|| {
                Error::InvalidConfig("ssae model without sparsity settings".into())
            })?;
            let encoders = greedy_stack_sae(train_x, &spec, &sparsity, &pretrain_cfg)?;
            unroll_encoders(&encoders, N_CLASSES, head_seed)?
        }
    };
    let ft_cfg = TrainConfig {
        epochs: config.fine_tune.epochs,
        batch_size: config.fine_tune.batch_size.min(train_x.nrows()),
        learning_rate: config.fine_tune.learning_rate,
        seed: fold_seed.wrapping_add(FINE_TUNE_SEED_OFFSET),
    };
    let (tuned, curve) = fine_tune(classifier, train_x, train_y, &ft_cfg)?;
    let predictions = predict(&tuned, test_x)?;
    Ok((predictions.labels, curve))
}

/// Runs the full pipeline described by `config`. On error, a manifest
/// recording the failure point is left in the output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultsBundle> {
    run_inner(config).inspect_err(|e| {
        if let Err(write_err) = crate::report::write_failure_manifest(config, &e.to_string()) {
            log::warn!("could not record the failure manifest: {write_err}");
        }
    })
}

fn run_inner(config: &ExperimentConfig) -> Result<ResultsBundle> {
    let started = Instant::now();
    let dataset_sha256 = file_sha256(&config.dataset_path)?;
    let (dataset, dropped_rows) = load_dataset(config)?;
    let dataset_name = config.dataset_name();

    let sample_count_note = dataset_stats(&dataset_name).and_then(|stats| {
        (stats.samples != dataset.n_samples()).then(|| {
            let note = format!(
                "loaded {} samples but the published count for {} is {}",
                dataset.n_samples(),
                dataset_name,
                stats.samples
            );
            log::warn!("{note}");
            note
        })
    });

    let plan = stratified_kfold(&dataset, config.folds, config.seed)?;

    // Default: standardize the whole matrix before splitting. The
    // leak-free variant instead fits on each training fold inside the loop.
    let working = if config.leak_free_normalization {
        dataset.clone()
    } else {
        let params = zscore_fit(&dataset.features)?;
        let mut normalized = dataset.clone();
        normalized.features = zscore_apply(&dataset.features, &params)?;
        normalized
    };

    let mut fold_curves: Vec<Vec<f64>> = Vec::with_capacity(config.folds);
    let mut fold_seconds: Vec<f64> = Vec::with_capacity(config.folds);
    let leak_free = config.leak_free_normalization;
    let summary = cross_validate(
        &working,
        &plan,
        config.positive_class,
        |train_x, train_y, test_x, fold_idx| {
            let fold_started = Instant::now();
            let fold_seed = config.seed.wrapping_add(fold_idx as u64);
            let (labels, curve) = if leak_free {
                let params = zscore_fit(train_x)?;
                let train_z = zscore_apply(train_x, &params)?;
                let test_z = zscore_apply(test_x, &params)?;
                train_and_predict_fold(config, &train_z, train_y, &test_z, fold_seed)?
            } else {
                train_and_predict_fold(config, train_x, train_y, test_x, fold_seed)?
            };
            fold_curves.push(curve);
            fold_seconds.push(fold_started.elapsed().as_secs_f64());
            Ok(labels)
        },
    )?;

    let epochs = config.fine_tune.epochs;
    let mean_curve: Vec<f64> = (0..epochs)
        .map(|e| fold_curves.iter().map(|c| c[e]).sum::<f64>() / fold_curves.len() as f64)
        .collect();

    Ok(ResultsBundle {
        dataset_name,
        sample_count: dataset.n_samples(),
        feature_count: dataset.n_features(),
        defective_ratio: dataset.defective_ratio(),
        dropped_rows,
        dataset_sha256,
        sample_count_note,
        summary,
        fold_curves,
        mean_curve,
        fold_seconds,
        total_seconds: started.elapsed().as_secs_f64(),
        config: config.clone(),
    })
}
