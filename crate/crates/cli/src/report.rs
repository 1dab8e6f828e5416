//! File emission: per-fold metrics table, error curves, the comparison row
//! against bundled reference accuracies, and the reproducibility manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use deepdefect_core::eval::{Metric, RankTable};
use deepdefect_core::{Error, Result};

use crate::config::ExperimentConfig;
use crate::reference::{reference_accuracies, REFERENCE_METHODS};
use crate::runner::ResultsBundle;

/// Paths of everything [`emit_report`] wrote.
#[derive(Debug, Clone)]
pub struct WrittenFiles {
    pub metrics: PathBuf,
    pub fold_curves: Vec<PathBuf>,
    pub mean_curve: PathBuf,
    pub comparison: PathBuf,
    pub manifest: PathBuf,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Proportions are reported as percentages with two decimals; likelihood
/// ratios as plain ratios with four.
fn fmt_pct(v: Option<f64>) -> String {
    v.map(|x| format!("{:.2}", x * 100.0)).unwrap_or_default()
}

fn fmt_ratio(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_default()
}

fn metrics_csv(bundle: &ResultsBundle) -> String {
    let mut out = String::from("fold,accuracy,precision,recall,lr_plus,lr_minus\n");
    for (i, report) in bundle.summary.per_fold.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            i + 1,
            fmt_pct(report.accuracy),
            fmt_pct(report.precision),
            fmt_pct(report.recall),
            fmt_ratio(report.lr_plus),
            fmt_ratio(report.lr_minus),
        );
    }
    for (row, pick) in [
        ("mean", true),
        ("std", false),
    ] {
        let cell = |m: Metric| {
            let stat = bundle.summary.stat(m);
            let value = if pick { stat.mean } else { stat.std };
            match m {
                Metric::LrPlus | Metric::LrMinus => fmt_ratio(value),
                _ => fmt_pct(value),
            }
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            row,
            cell(Metric::Accuracy),
            cell(Metric::Precision),
            cell(Metric::Recall),
            cell(Metric::LrPlus),
            cell(Metric::LrMinus),
        );
    }
    out
}

fn curve_csv(curve: &[f64]) -> String {
    let mut out = String::from("epoch,error\n");
    for (e, err) in curve.iter().enumerate() {
        // full shortest-roundtrip precision so the file reproduces the run
        let _ = writeln!(out, "{},{}", e + 1, err);
    }
    out
}

fn comparison_csv(bundle: &ResultsBundle) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# reference cells: published mean accuracy (%)");
    if let Some(note) = &bundle.sample_count_note {
        let _ = writeln!(out, "# warning: {note}");
    }
    let _ = writeln!(out, "method,{}", bundle.dataset_name);
    let own = bundle
        .summary
        .accuracy
        .mean
        .map(|m| format!("{:.2}", m * 100.0))
        .unwrap_or_else(|| "-".into());
    let _ = writeln!(out, "{},{}", bundle.config.model, own);
    let reference = reference_accuracies(&bundle.dataset_name);
    for (i, method) in REFERENCE_METHODS.iter().enumerate() {
        let cell = reference
            .and_then(|row| row[i])
            .map(|v| format!("{v:.2}"))
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(out, "{method},{cell}");
    }
    out
}

#[derive(Serialize)]
struct UndefinedCounts {
    accuracy: usize,
    precision: usize,
    recall: usize,
    lr_plus: usize,
    lr_minus: usize,
}

#[derive(Serialize)]
struct RunInfo<'a> {
    status: &'a str,
    tool_version: &'a str,
    dataset: &'a str,
    checksum_algorithm: &'a str,
    dataset_sha256: &'a str,
    sample_count: usize,
    feature_count: usize,
    defective_ratio: f64,
    dropped_rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    sample_count_note: Option<&'a str>,
    undefined_metric_folds: UndefinedCounts,
    fold_seconds: &'a [f64],
    total_seconds: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    run: RunInfo<'a>,
    config: &'a ExperimentConfig,
}

fn manifest_toml(bundle: &ResultsBundle) -> Result<String> {
    let s = &bundle.summary;
    let manifest = Manifest {
        run: RunInfo {
            status: "ok",
            tool_version: env!("CARGO_PKG_VERSION"),
            dataset: &bundle.dataset_name,
            checksum_algorithm: "sha256",
            dataset_sha256: &bundle.dataset_sha256,
            sample_count: bundle.sample_count,
            feature_count: bundle.feature_count,
            defective_ratio: bundle.defective_ratio,
            dropped_rows: bundle.dropped_rows,
            sample_count_note: bundle.sample_count_note.as_deref(),
            undefined_metric_folds: UndefinedCounts {
                accuracy: s.accuracy.undefined_folds,
                precision: s.precision.undefined_folds,
                recall: s.recall.undefined_folds,
                lr_plus: s.lr_plus.undefined_folds,
                lr_minus: s.lr_minus.undefined_folds,
            },
            fold_seconds: &bundle.fold_seconds,
            total_seconds: bundle.total_seconds,
        },
        config: &bundle.config,
    };
    toml::to_string(&manifest).map_err(|e| Error::Serialization(e.to_string()))
}

/// Writes a minimal manifest for a run that aborted, recording the failure.
pub fn write_failure_manifest(config: &ExperimentConfig, failure: &str) -> Result<PathBuf> {
    #[derive(Serialize)]
    struct FailureInfo<'a> {
        status: &'a str,
        tool_version: &'a str,
        error: &'a str,
    }
    #[derive(Serialize)]
    struct FailureManifest<'a> {
        run: FailureInfo<'a>,
        config: &'a ExperimentConfig,
    }
    std::fs::create_dir_all(&config.output_dir).map_err(|e| Error::Io {
        path: config.output_dir.display().to_string(),
        source: e,
    })?;
    let path = config.output_dir.join("manifest");
    let text = toml::to_string(&FailureManifest {
        run: FailureInfo {
            status: "failed",
            tool_version: env!("CARGO_PKG_VERSION"),
            error: failure,
        },
        config,
    })
    .map_err(|e| Error::Serialization(e.to_string()))?;
    write_file(&path, &text)?;
    Ok(path)
}

/// Writes `metrics.csv`, `curve_fold<i>.csv`, `curve_mean.csv`,
/// `comparison.csv` and `manifest` into `output_dir`, overwriting
/// deterministically.
pub fn emit_report(bundle: &ResultsBundle, output_dir: &Path) -> Result<WrittenFiles> {
    std::fs::create_dir_all(output_dir).map_err(|e| Error::Io {
        path: output_dir.display().to_string(),
        source: e,
    })?;

    let metrics = output_dir.join("metrics.csv");
    write_file(&metrics, &metrics_csv(bundle))?;

    let mut fold_curves = Vec::with_capacity(bundle.fold_curves.len());
    for (i, curve) in bundle.fold_curves.iter().enumerate() {
        let path = output_dir.join(format!("curve_fold{}.csv", i + 1));
        write_file(&path, &curve_csv(curve))?;
        fold_curves.push(path);
    }
    let mean_curve = output_dir.join("curve_mean.csv");
    write_file(&mean_curve, &curve_csv(&bundle.mean_curve))?;

    let comparison = output_dir.join("comparison.csv");
    write_file(&comparison, &comparison_csv(bundle))?;

    let manifest = output_dir.join("manifest");
    write_file(&manifest, &manifest_toml(bundle)?)?;

    Ok(WrittenFiles {
        metrics,
        fold_curves,
        mean_curve,
        comparison,
        manifest,
    })
}

/// Reads a methods x datasets accuracy table: first column method names,
/// remaining columns one dataset each; empty cells or `-` mean "no value";
/// `#` lines are comments.
pub fn read_rank_table(path: &Path) -> Result<RankTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: std::io::Error::other(e),
        })?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?
        .clone();
    if headers.len() < 2 {
        return Err(Error::InvalidConfig(
            "rank table needs a method column and at least one dataset column".into(),
        ));
    }
    let datasets: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut methods = Vec::new();
    let mut cells: Vec<Vec<Option<f64>>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            line: i + 2,
            msg: e.to_string(),
        })?;
        if record.len() != headers.len() {
            return Err(Error::Parse {
                line: i + 2,
                msg: format!("expected {} fields, found {}", headers.len(), record.len()),
            });
        }
        methods.push(record[0].to_string());
        let mut row = Vec::with_capacity(datasets.len());
        for (c, cell) in record.iter().skip(1).enumerate() {
            let cell = cell.trim();
            if cell.is_empty() || cell == "-" {
                row.push(None);
            } else {
                let v: f64 = cell.parse().map_err(|_| Error::Parse {
                    line: i + 2,
                    msg: format!("non-numeric accuracy '{}' in column '{}'", cell, datasets[c]),
                })?;
                row.push(Some(v));
            }
        }
        cells.push(row);
    }
    RankTable::new(methods, datasets, cells)
}
