//! Dataset loading (ARFF/CSV), standardization and stratified k-fold splits.

mod arff;
mod csv_loader;
mod kfold;
mod normalize;

pub use arff::{load_arff, load_arff_with, parse_arff};
pub use csv_loader::{load_csv, load_csv_with};
pub use kfold::{stratified_kfold, Fold, FoldPlan};
pub use normalize::{zscore_apply, zscore_fit, NormalizationParams};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Matrix;

/// Binary class tag for a software module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    NonDefective,
    Defective,
}

impl Label {
    /// Index of the class in classifier outputs (non-defective first).
    #[inline]
    pub fn class_index(self) -> usize {
        match self {
            Label::NonDefective => 0,
            Label::Defective => 1,
        }
    }

    pub fn from_class_index(idx: usize) -> Option<Label> {
        match idx {
            0 => Some(Label::NonDefective),
            1 => Some(Label::Defective),
            _ => None,
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::NonDefective => Label::Defective,
            Label::Defective => Label::NonDefective,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Label::NonDefective => write!(f, "non-defective"),
            Label::Defective => write!(f, "defective"),
        }
    }
}

/// Maps a raw class string onto a [`Label`], accepting the spellings found
/// in the public defect datasets (`Y/N`, `true/false`, `yes/no`, `1/0`, ...).
pub fn classify_tag(tag: &str) -> Option<Label> {
    match tag.trim().trim_matches(|c| c == '\'' || c == '"').to_ascii_lowercase().as_str() {
        "y" | "yes" | "true" | "1" | "defective" | "buggy" => Some(Label::Defective),
        "n" | "no" | "false" | "0" | "non-defective" | "nondefective" | "clean" => {
            Some(Label::NonDefective)
        }
        _ => None,
    }
}

/// How to handle rows with missing feature values (`?` or empty cells).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    /// Drop the whole row (default). The count of dropped rows is reported.
    #[default]
    DropRows,
    /// Fill each missing cell with the mean of the observed values in its
    /// column. Rows with a missing label are still dropped.
    ImputeColumnMean,
}

/// Row accounting from a load: `dropped_rows + n_samples == raw_rows`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadReport {
    pub raw_rows: usize,
    pub dropped_rows: usize,
}

/// An in-memory defect dataset: numeric feature matrix plus binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<S: Scalar> {
    pub features: Matrix<S>,
    pub labels: Vec<Label>,
    pub feature_names: Vec<String>,
    pub name: String,
}

impl<S: Scalar> Dataset<S> {
    pub fn new(
        features: Matrix<S>,
        labels: Vec<Label>,
        feature_names: Vec<String>,
        name: impl Into<String>,
    ) -> Result<Self> {
        if features.nrows() == 0 || features.ncols() == 0 {
            return Err(Error::EmptyDataset);
        }
        if labels.len() != features.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} rows",
                labels.len(),
                features.nrows()
            )));
        }
        if feature_names.len() != features.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "{} feature names for {} columns",
                feature_names.len(),
                features.ncols()
            )));
        }
        crate::linalg::ensure_finite_matrix(&features, "dataset features")?;
        Ok(Dataset {
            features,
            labels,
            feature_names,
            name: name.into(),
        })
    }

    pub fn n_samples(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    /// Count of samples carrying `label`.
    pub fn class_count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Fraction of defective samples.
    pub fn defective_ratio(&self) -> f64 {
        self.class_count(Label::Defective) as f64 / self.n_samples() as f64
    }
}

/// Resolves the two raw class strings of a binary dataset to labels.
///
/// If only one of the pair is recognized, the other gets the complementary
/// class; if neither (or both map to the same class), the labels are
/// unsupported.
pub(crate) fn resolve_binary_tags(a: &str, b: &str) -> Result<(Label, Label)> {
    match (classify_tag(a), classify_tag(b)) {
        (Some(la), Some(lb)) if la != lb => Ok((la, lb)),
        (Some(la), None) => Ok((la, la.other())),
        (None, Some(lb)) => Ok((lb.other(), lb)),
        _ => Err(Error::UnsupportedLabels(format!(
            "cannot tell defective from non-defective in {{{a}, {b}}}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn tag_recognition() {
        assert_eq!(classify_tag("Y"), Some(Label::Defective));
        assert_eq!(classify_tag("'true'"), Some(Label::Defective));
        assert_eq!(classify_tag("FALSE"), Some(Label::NonDefective));
        assert_eq!(classify_tag("maybe"), None);
    }

    #[test]
    fn binary_tag_resolution() {
        assert_eq!(
            resolve_binary_tags("false", "true").unwrap(),
            (Label::NonDefective, Label::Defective)
        );
        // one unknown tag takes the complement of the known one
        assert_eq!(
            resolve_binary_tags("Y", "other").unwrap(),
            (Label::Defective, Label::NonDefective)
        );
        assert!(resolve_binary_tags("a", "b").is_err());
        assert!(resolve_binary_tags("yes", "true").is_err());
    }

    #[test]
    fn dataset_validates_shapes_and_finiteness() {
        let ok = Dataset::new(
            array![[1.0f64, 2.0], [3.0, 4.0]],
            vec![Label::Defective, Label::NonDefective],
            vec!["a".into(), "b".into()],
            "toy",
        );
        assert!(ok.is_ok());

        let bad = Dataset::new(
            array![[f64::NAN, 2.0]],
            vec![Label::Defective],
            vec!["a".into(), "b".into()],
            "toy",
        );
        assert!(bad.is_err());
    }
}
