//! Confusion-matrix metrics, k-fold aggregation and cross-method ranking.

use ndarray::Axis;

use crate::data::{Dataset, FoldPlan, Label};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Matrix;

/// Binary contingency counts for a chosen positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub true_negatives: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.true_positives + self.false_positives + self.false_negatives + self.true_negatives
    }

    /// True-positive rate `tp / (tp + fn)`, `None` when no positives exist.
    pub fn sensitivity(&self) -> Option<f64> {
        ratio(self.true_positives, self.true_positives + self.false_negatives)
    }

    /// True-negative rate `tn / (tn + fp)`, `None` when no negatives exist.
    pub fn specificity(&self) -> Option<f64> {
        ratio(self.true_negatives, self.true_negatives + self.false_positives)
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Counts the contingency table of `predicted` against `actual` with the
/// given positive class.
pub fn confusion(
    predicted: &[Label],
    actual: &[Label],
    positive_class: Label,
) -> Result<ConfusionMatrix> {
    if predicted.len() != actual.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} predictions for {} actual labels",
            predicted.len(),
            actual.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut cm = ConfusionMatrix::default();
    for (&p, &a) in predicted.iter().zip(actual) {
        match (p == positive_class, a == positive_class) {
            (true, true) => cm.true_positives += 1,
            (true, false) => cm.false_positives += 1,
            (false, true) => cm.false_negatives += 1,
            (false, false) => cm.true_negatives += 1,
        }
    }
    Ok(cm)
}

/// The five report metrics. A `None` marks a metric whose denominator was
/// zero (undefined rather than NaN).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricsReport {
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub lr_plus: Option<f64>,
    pub lr_minus: Option<f64>,
}

impl MetricsReport {
    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Accuracy => self.accuracy,
            Metric::Precision => self.precision,
            Metric::Recall => self.recall,
            Metric::LrPlus => self.lr_plus,
            Metric::LrMinus => self.lr_minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Accuracy,
    Precision,
    Recall,
    LrPlus,
    LrMinus,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Accuracy,
        Metric::Precision,
        Metric::Recall,
        Metric::LrPlus,
        Metric::LrMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::Precision => "precision",
            Metric::Recall => "recall",
            Metric::LrPlus => "lr_plus",
            Metric::LrMinus => "lr_minus",
        }
    }
}

/// Derives accuracy, precision, recall and both likelihood ratios from a
/// confusion matrix. `LR+ = sensitivity / (1 - specificity)` and
/// `LR- = (1 - sensitivity) / specificity`.
pub fn metrics(cm: &ConfusionMatrix) -> MetricsReport {
    let sens = cm.sensitivity();
    let spec = cm.specificity();
    let lr_plus = match (sens, spec) {
        (Some(se), Some(sp)) if sp < 1.0 => Some(se / (1.0 - sp)),
        _ => None,
    };
    let lr_minus = match (sens, spec) {
        (Some(se), Some(sp)) if sp > 0.0 => Some((1.0 - se) / sp),
        _ => None,
    };
    MetricsReport {
        accuracy: ratio(cm.true_positives + cm.true_negatives, cm.total()),
        precision: ratio(cm.true_positives, cm.true_positives + cm.false_positives),
        recall: sens,
        lr_plus,
        lr_minus,
    }
}

/// Mean and population standard deviation of one metric across folds.
/// Undefined fold values are excluded; `undefined_folds` records how many.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricStat {
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub undefined_folds: usize,
}

fn summarize(values: impl Iterator<Item = Option<f64>>) -> MetricStat {
    let mut defined = Vec::new();
    let mut undefined = 0usize;
    for v in values {
        match v {
            Some(x) => defined.push(x),
            None => undefined += 1,
        }
    }
    if defined.is_empty() {
        return MetricStat {
            mean: None,
            std: None,
            undefined_folds: undefined,
        };
    }
    let n = defined.len() as f64;
    let mean = defined.iter().sum::<f64>() / n;
    let var = defined.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    MetricStat {
        mean: Some(mean),
        std: Some(var.sqrt()),
        undefined_folds: undefined,
    }
}

/// Per-fold reports plus per-metric mean/std across folds.
#[derive(Debug, Clone, PartialEq)]
pub struct CvSummary {
    pub per_fold: Vec<MetricsReport>,
    pub confusions: Vec<ConfusionMatrix>,
    pub accuracy: MetricStat,
    pub precision: MetricStat,
    pub recall: MetricStat,
    pub lr_plus: MetricStat,
    pub lr_minus: MetricStat,
}

impl CvSummary {
    pub fn from_fold_reports(per_fold: Vec<MetricsReport>, confusions: Vec<ConfusionMatrix>) -> Self {
        let stat = |metric: Metric| summarize(per_fold.iter().map(|r| r.get(metric)));
        CvSummary {
            accuracy: stat(Metric::Accuracy),
            precision: stat(Metric::Precision),
            recall: stat(Metric::Recall),
            lr_plus: stat(Metric::LrPlus),
            lr_minus: stat(Metric::LrMinus),
            per_fold,
            confusions,
        }
    }

    pub fn stat(&self, metric: Metric) -> MetricStat {
        match metric {
            Metric::Accuracy => self.accuracy,
            Metric::Precision => self.precision,
            Metric::Recall => self.recall,
            Metric::LrPlus => self.lr_plus,
            Metric::LrMinus => self.lr_minus,
        }
    }

    pub fn k(&self) -> usize {
        self.per_fold.len()
    }
}

/// Runs `train_and_predict` on every fold of `plan` and aggregates metrics.
///
/// The closure receives the training features/labels, the test features and
/// the fold index, and returns predicted labels for the test rows (in test
/// index order). Folds run in ascending index order, so results do not
/// depend on any parallel scheduling.
pub fn cross_validate<S, F>(
    dataset: &Dataset<S>,
    plan: &FoldPlan,
    positive_class: Label,
    mut train_and_predict: F,
) -> Result<CvSummary>
where
    S: Scalar,
    F: FnMut(&Matrix<S>, &[Label], &Matrix<S>, usize) -> Result<Vec<Label>>,
{
    if plan.n_samples != dataset.n_samples() {
        return Err(Error::DimensionMismatch(format!(
            "fold plan covers {} samples, dataset has {}",
            plan.n_samples,
            dataset.n_samples()
        )));
    }
    let mut reports = Vec::with_capacity(plan.k);
    let mut confusions = Vec::with_capacity(plan.k);
    for (fold_idx, fold) in plan.folds.iter().enumerate() {
        let train_x = dataset.features.select(Axis(0), &fold.train_indices);
        let train_y: Vec<Label> = fold.train_indices.iter().map(|&i| dataset.labels[i]).collect();
        let test_x = dataset.features.select(Axis(0), &fold.test_indices);
        let test_y: Vec<Label> = fold.test_indices.iter().map(|&i| dataset.labels[i]).collect();
        let predicted = train_and_predict(&train_x, &train_y, &test_x, fold_idx)?;
        if predicted.len() != test_y.len() {
            return Err(Error::DimensionMismatch(format!(
                "fold {fold_idx}: {} predictions for {} test rows",
                predicted.len(),
                test_y.len()
            )));
        }
        let cm = confusion(&predicted, &test_y, positive_class)?;
        reports.push(metrics(&cm));
        confusions.push(cm);
    }
    Ok(CvSummary::from_fold_reports(reports, confusions))
}

/// Accuracy table across methods (rows) and datasets (columns); `None`
/// marks a method without a reported value on that dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub methods: Vec<String>,
    pub datasets: Vec<String>,
    pub cells: Vec<Vec<Option<f64>>>,
}

impl RankTable {
    pub fn new(
        methods: Vec<String>,
        datasets: Vec<String>,
        cells: Vec<Vec<Option<f64>>>,
    ) -> Result<Self> {
        if cells.len() != methods.len() || cells.iter().any(|row| row.len() != datasets.len()) {
            return Err(Error::DimensionMismatch(
                "rank table cells do not match methods x datasets".into(),
            ));
        }
        Ok(RankTable {
            methods,
            datasets,
            cells,
        })
    }
}

/// A method's mean per-dataset rank and its final position.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodRank {
    pub method: String,
    /// Mean of per-dataset ranks over datasets where the method has a value.
    pub score: f64,
    /// Final rank by ascending score (ties share the mean position).
    pub rank: f64,
}

/// Assigns ranks `1..` to the positions of `values` sorted descending,
/// ties sharing the mean of their positions.
fn rank_descending(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).expect("finite"));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let shared = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Ranks methods per dataset (1 = highest accuracy, ties share the mean
/// position), scores each method by the mean of its ranks over the datasets
/// where it has a value, and orders methods by ascending score. Methods
/// with no values at all are dropped with a warning.
pub fn weighted_rank(table: &RankTable) -> Result<Vec<MethodRank>> {
    if table.methods.len() < 2 {
        return Err(Error::InvalidConfig(
            "weighted rank needs at least two methods".into(),
        ));
    }
    let mut per_method_ranks: Vec<Vec<f64>> = vec![Vec::new(); table.methods.len()];
    for d in 0..table.datasets.len() {
        let present: Vec<usize> = (0..table.methods.len())
            .filter(|&m| table.cells[m][d].is_some())
            .collect();
        if present.is_empty() {
            continue;
        }
        let values: Vec<f64> = present.iter().map(|&m| table.cells[m][d].unwrap()).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "accuracy cell for dataset '{}'",
                table.datasets[d]
            )));
        }
        let ranks = rank_descending(&values);
        for (pos, &m) in present.iter().enumerate() {
            per_method_ranks[m].push(ranks[pos]);
        }
    }

    let mut kept: Vec<(usize, f64)> = Vec::new();
    for (m, ranks) in per_method_ranks.iter().enumerate() {
        if ranks.is_empty() {
            log::warn!(
                "method '{}' has no values in any dataset; excluded from ranking",
                table.methods[m]
            );
        } else {
            kept.push((m, ranks.iter().sum::<f64>() / ranks.len() as f64));
        }
    }
    if kept.len() < 2 {
        return Err(Error::InvalidConfig(
            "fewer than two methods have any values to rank".into(),
        ));
    }
    let scores: Vec<f64> = kept.iter().map(|&(_, s)| s).collect();
    // ascending score = descending negated score
    let negated: Vec<f64> = scores.iter().map(|s| -s).collect();
    let final_ranks = rank_descending(&negated);
    let mut out: Vec<MethodRank> = kept
        .into_iter()
        .zip(final_ranks)
        .map(|((m, score), rank)| MethodRank {
            method: table.methods[m].clone(),
            score,
            rank,
        })
        .collect();
    out.sort_by(|a, b| a.score.partial_cmp(&b.score).expect("finite"));
    Ok(out)
}
