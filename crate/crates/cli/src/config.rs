//! Experiment configuration: TOML file schema, CLI overrides and the
//! per-dataset defaults for layer widths and training hyperparameters.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use deepdefect_core::data::Label;
use deepdefect_core::sae::SparsityConfig;
use deepdefect_core::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    Arff,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Dbn,
    Ssae,
}

impl std::fmt::Display for ModelChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelChoice::Dbn => write!(f, "dbn"),
            ModelChoice::Ssae => write!(f, "ssae"),
        }
    }
}

/// Epochs, batch size and learning rate of one training phase. Seeds are
/// derived per fold by the runner and are not part of the phase config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseParams {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
}

/// A fully resolved experiment. Serializing this into the manifest and
/// resolving it again reproduces the same configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset_path: PathBuf,
    pub dataset_format: DatasetFormat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label_column: Option<String>,
    pub model: ModelChoice,
    pub hidden_sizes: Vec<usize>,
    pub pretrain: PhaseParams,
    pub fine_tune: PhaseParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sparsity: Option<SparsityConfig>,
    pub folds: usize,
    pub seed: u64,
    pub positive_class: Label,
    pub leak_free_normalization: bool,
    pub impute_missing: bool,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    /// Dataset name: the file stem, uppercased (CM1.arff -> CM1).
    pub fn dataset_name(&self) -> String {
        self.dataset_path
            .file_stem()
            .map(|s| s.to_string_lossy().to_ascii_uppercase())
            .unwrap_or_else(|| "DATASET".to_string())
    }
}

/// The on-disk schema: everything optional, filled by defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub dataset_path: Option<PathBuf>,
    pub dataset_format: Option<DatasetFormat>,
    pub label_column: Option<String>,
    pub model: Option<ModelChoice>,
    pub hidden_sizes: Option<Vec<usize>>,
    pub pretrain: Option<PartialPhase>,
    pub fine_tune: Option<PartialPhase>,
    pub sparsity: Option<PartialSparsity>,
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub positive_class: Option<Label>,
    pub leak_free_normalization: Option<bool>,
    pub impute_missing: Option<bool>,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialPhase {
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub learning_rate: Option<f64>,
}

impl PartialPhase {
    fn over(self, base: PhaseParams) -> PhaseParams {
        PhaseParams {
            epochs: self.epochs.unwrap_or(base.epochs),
            batch_size: self.batch_size.unwrap_or(base.batch_size),
            learning_rate: self.learning_rate.unwrap_or(base.learning_rate),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialSparsity {
    pub rho: Option<f64>,
    pub beta: Option<f64>,
}

/// Command-line overrides; these win over file values.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub dataset: Option<PathBuf>,
    pub model: Option<ModelChoice>,
    pub layers: Option<Vec<usize>>,
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub leak_free_norm: bool,
    pub out: Option<PathBuf>,
}

/// Default training hyperparameters per model.
pub fn default_phases(model: ModelChoice) -> (PhaseParams, PhaseParams) {
    let pretrain = match model {
        ModelChoice::Dbn => PhaseParams {
            epochs: 20,
            batch_size: 4,
            learning_rate: 0.001,
        },
        ModelChoice::Ssae => PhaseParams {
            epochs: 50,
            batch_size: 4,
            learning_rate: 0.001,
        },
    };
    let fine_tune = PhaseParams {
        epochs: 150,
        batch_size: 4,
        learning_rate: 0.01,
    };
    (pretrain, fine_tune)
}

pub const DEFAULT_RHO: f64 = 0.05;
pub const DEFAULT_BETA: f64 = 0.3;
pub const DEFAULT_FOLDS: usize = 10;
pub const DEFAULT_SEED: u64 = 42;

/// Tuned layer widths per dataset, keyed by uppercase name.
pub fn default_architecture(dataset: &str, model: ModelChoice) -> Option<Vec<usize>> {
    let arch: &[usize] = match (dataset, model) {
        ("CM1", ModelChoice::Dbn) => &[30, 12],
        ("CM1", ModelChoice::Ssae) => &[25, 15, 7],
        ("KC1", ModelChoice::Dbn) => &[20, 15, 10],
        ("KC1", ModelChoice::Ssae) => &[25, 15, 8, 4],
        ("KC2", ModelChoice::Dbn) => &[20, 10],
        ("KC2", ModelChoice::Ssae) => &[20, 10],
        ("KC3", ModelChoice::Dbn) => &[15, 5],
        ("KC3", ModelChoice::Ssae) => &[15, 10],
        ("KC4", ModelChoice::Dbn) => &[15, 5],
        ("KC4", ModelChoice::Ssae) => &[15, 8],
        ("MC1", ModelChoice::Dbn) => &[40, 25, 10],
        ("MC1", ModelChoice::Ssae) => &[40, 30, 20, 10],
        ("MC2", ModelChoice::Dbn) => &[30, 10],
        ("MC2", ModelChoice::Ssae) => &[30, 15],
        ("PC1", ModelChoice::Dbn) => &[20, 15, 10],
        ("PC1", ModelChoice::Ssae) => &[20, 10, 10, 5],
        ("PC2", ModelChoice::Dbn) => &[20, 10, 10, 10],
        ("PC2", ModelChoice::Ssae) => &[20, 20, 10, 10, 10],
        ("PC3", ModelChoice::Dbn) => &[20, 10],
        ("PC3", ModelChoice::Ssae) => &[20, 10, 10],
        ("PC4", ModelChoice::Dbn) => &[30, 20, 10],
        ("PC4", ModelChoice::Ssae) => &[25, 20, 10, 10],
        ("PC5", ModelChoice::Dbn) => &[35, 30, 20, 10, 8],
        ("PC5", ModelChoice::Ssae) => &[35, 30, 20, 20, 10],
        ("JM1", ModelChoice::Dbn) => &[50, 30, 20, 8],
        ("JM1", ModelChoice::Ssae) => &[40, 30, 10, 8],
        ("MW1", ModelChoice::Dbn) => &[30, 15, 4],
        ("MW1", ModelChoice::Ssae) => &[30, 15, 4],
        _ => return None,
    };
    Some(arch.to_vec())
}

pub const KNOWN_DATASETS: [&str; 14] = [
    "CM1", "KC1", "KC2", "KC3", "KC4", "MC1", "MC2", "PC1", "PC2", "PC3", "PC4", "PC5", "JM1",
    "MW1",
];

fn infer_format(path: &Path) -> Result<DatasetFormat> {
    match path
        .extension()
        .map(|e| e.to_string_lossy().to_ascii_lowercase())
        .as_deref()
    {
        Some("arff") => Ok(DatasetFormat::Arff),
        Some("csv") => Ok(DatasetFormat::Csv),
        other => Err(Error::InvalidConfig(format!(
            "cannot infer dataset format from extension {other:?}; set dataset_format"
        ))),
    }
}

/// Reads a config file and resolves every field with precedence
/// CLI override > file value > dataset-keyed default.
pub fn resolve_config(file: &Path, overrides: &Overrides) -> Result<ExperimentConfig> {
    let text =
        std::fs::read_to_string(file).map_err(|e| Error::Io {
            path: file.display().to_string(),
            source: e,
        })?;
    let parsed: ConfigFile = toml::from_str(&text)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", file.display())))?;
    resolve(parsed, overrides)
}

pub fn resolve(file: ConfigFile, overrides: &Overrides) -> Result<ExperimentConfig> {
    let dataset_path = overrides
        .dataset
        .clone()
        .or(file.dataset_path)
        .ok_or_else(|| Error::InvalidConfig("dataset_path is required".into()))?;
    let dataset_format = match file.dataset_format {
        Some(f) => f,
        None => infer_format(&dataset_path)?,
    };
    let label_column = file.label_column;
    if dataset_format == DatasetFormat::Csv && label_column.is_none() {
        return Err(Error::InvalidConfig(
            "label_column is required for csv datasets".into(),
        ));
    }
    let model = overrides
        .model
        .or(file.model)
        .ok_or_else(|| Error::InvalidConfig("model is required (dbn or ssae)".into()))?;

    let name = dataset_path
        .file_stem()
        .map(|s| s.to_string_lossy().to_ascii_uppercase())
        .unwrap_or_default();
    let hidden_sizes = overrides
        .layers
        .clone()
        .or(file.hidden_sizes)
        .or_else(|| default_architecture(&name, model))
        .ok_or_else(|| {
            Error::InvalidConfig(format!(
                "no hidden_sizes given and '{name}' is not one of the known datasets [{}]",
                KNOWN_DATASETS.join(", ")
            ))
        })?;
    if hidden_sizes.is_empty() || hidden_sizes.contains(&0) {
        return Err(Error::InvalidConfig(
            "hidden_sizes must be nonempty positive integers".into(),
        ));
    }

    let (pre_default, ft_default) = default_phases(model);
    let pretrain = file.pretrain.unwrap_or_default().over(pre_default);
    let fine_tune = file.fine_tune.unwrap_or_default().over(ft_default);
    for (phase, params) in [("pretrain", &pretrain), ("fine_tune", &fine_tune)] {
        if params.batch_size == 0 {
            return Err(Error::InvalidConfig(format!("{phase}.batch_size must be >= 1")));
        }
        if !params.learning_rate.is_finite() || params.learning_rate < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "{phase}.learning_rate must be finite and >= 0"
            )));
        }
    }

    let sparsity = match model {
        ModelChoice::Ssae => {
            let partial = file.sparsity.unwrap_or_default();
            let cfg = SparsityConfig {
                rho: partial.rho.unwrap_or(DEFAULT_RHO),
                beta: partial.beta.unwrap_or(DEFAULT_BETA),
            };
            cfg.validate()?;
            Some(cfg)
        }
        ModelChoice::Dbn => {
            if file.sparsity.is_some() {
                return Err(Error::InvalidConfig(
                    "sparsity settings apply only to the ssae model".into(),
                ));
            }
            None
        }
    };

    let folds = overrides.folds.or(file.folds).unwrap_or(DEFAULT_FOLDS);
    if folds < 2 {
        return Err(Error::InvalidConfig(format!("folds must be >= 2, got {folds}")));
    }
    let seed = overrides.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
    let positive_class = file.positive_class.unwrap_or(Label::NonDefective);
    let leak_free_normalization = if overrides.leak_free_norm {
        true
    } else {
        file.leak_free_normalization.unwrap_or(false)
    };
    let impute_missing = file.impute_missing.unwrap_or(false);
    let output_dir = overrides
        .out
        .clone()
        .or(file.output_dir)
        .unwrap_or_else(|| PathBuf::from(format!("out/{}-{model}", name.to_ascii_lowercase())));

    Ok(ExperimentConfig {
        dataset_path,
        dataset_format,
        label_column,
        model,
        hidden_sizes,
        pretrain,
        fine_tune,
        sparsity,
        folds,
        seed,
        positive_class,
        leak_free_normalization,
        impute_missing,
        output_dir,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn resolve_text(text: &str, overrides: &Overrides) -> Result<ExperimentConfig> {
        let mut f = tempfile::Builder::new().suffix(".toml").tempfile().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        resolve_config(f.path(), overrides)
    }

    #[test]
    fn pc1_dbn_defaults_resolve_from_the_table() {
        let cfg = resolve_text(
            "dataset_path = \"data/PC1.arff\"\nmodel = \"dbn\"\n",
            &Overrides::default(),
        )
        .unwrap();
        assert_eq!(cfg.hidden_sizes, vec![20, 15, 10]);
        assert_eq!(cfg.pretrain.epochs, 20);
        assert_eq!(cfg.pretrain.learning_rate, 0.001);
        assert_eq!(cfg.fine_tune.epochs, 150);
        assert_eq!(cfg.fine_tune.learning_rate, 0.01);
        assert_eq!(cfg.folds, 10);
        assert!(cfg.sparsity.is_none());
    }

    #[test]
    fn ssae_gets_default_rho() {
        let cfg = resolve_text(
            "dataset_path = \"data/CM1.arff\"\nmodel = \"ssae\"\n",
            &Overrides::default(),
        )
        .unwrap();
        let s = cfg.sparsity.unwrap();
        assert_eq!(s.rho, 0.05);
        assert_eq!(s.beta, 0.3);
        assert_eq!(cfg.hidden_sizes, vec![25, 15, 7]);
        assert_eq!(cfg.pretrain.epochs, 50);
    }

    #[test]
    fn cli_layers_override_file_value() {
        let overrides = Overrides {
            layers: Some(vec![8, 4]),
            ..Default::default()
        };
        let cfg = resolve_text(
            "dataset_path = \"data/PC1.arff\"\nmodel = \"dbn\"\nhidden_sizes = [20, 20]\n",
            &overrides,
        )
        .unwrap();
        assert_eq!(cfg.hidden_sizes, vec![8, 4]);
    }

    #[test]
    fn unknown_dataset_without_layers_lists_known_names() {
        let err = resolve_text(
            "dataset_path = \"data/WEIRD.arff\"\nmodel = \"dbn\"\n",
            &Overrides::default(),
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("CM1") && msg.contains("MW1"), "{msg}");
    }

    #[test]
    fn csv_requires_label_column_and_bad_enum_fails() {
        let err = resolve_text(
            "dataset_path = \"d.csv\"\nmodel = \"dbn\"\nhidden_sizes = [4]\n",
            &Overrides::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("label_column"));

        let err = resolve_text(
            "dataset_path = \"d.arff\"\nmodel = \"forest\"\n",
            &Overrides::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
    }

    #[test]
    fn sparsity_rejected_for_dbn() {
        let err = resolve_text(
            "dataset_path = \"data/CM1.arff\"\nmodel = \"dbn\"\n[sparsity]\nrho = 0.1\n",
            &Overrides::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("ssae"));
    }

    #[test]
    fn resolved_config_round_trips_through_toml() {
        let cfg = resolve_text(
            "dataset_path = \"data/KC2.arff\"\nmodel = \"ssae\"\nseed = 7\n",
            &Overrides::default(),
        )
        .unwrap();
        let echoed = toml::to_string(&cfg).unwrap();
        let again = resolve_text(&echoed, &Overrides::default()).unwrap();
        assert_eq!(cfg, again);
    }
}
