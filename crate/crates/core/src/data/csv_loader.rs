//! CSV loader: header row, one label column, numeric feature columns.

use std::path::Path;

use crate::data::arff::build_dataset;
use crate::data::{classify_tag, resolve_binary_tags, Dataset, LoadReport, MissingPolicy};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Loads a CSV file with the default missing-value policy (drop rows).
pub fn load_csv<S: Scalar>(
    path: impl AsRef<Path>,
    label_column: &str,
) -> Result<(Dataset<S>, LoadReport)> {
    load_csv_with(path, label_column, MissingPolicy::DropRows)
}

pub fn load_csv_with<S: Scalar>(
    path: impl AsRef<Path>,
    label_column: &str,
    missing: MissingPolicy,
) -> Result<(Dataset<S>, LoadReport)> {
    let path = path.as_ref();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "dataset".to_string());
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::io(path.display().to_string(), std::io::Error::other(e)))?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| {
            Error::InvalidConfig(format!(
                "label column '{label_column}' not found in header [{}]",
                headers.join(", ")
            ))
        })?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut rows: Vec<Vec<Option<f64>>> = Vec::new();
    let mut labels_raw: Vec<String> = Vec::new();
    let mut raw_rows = 0usize;
    let mut dropped_label_rows = 0usize;

    for (i, record) in reader.records().enumerate() {
        let lineno = i + 2; // 1-based, after the header row
        let record = record.map_err(|e| Error::parse(lineno, e.to_string()))?;
        if record.len() != headers.len() {
            return Err(Error::parse(
                lineno,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        raw_rows += 1;
        let label_cell = record[label_idx].trim();
        if label_cell == "?" || label_cell.is_empty() {
            dropped_label_rows += 1;
            continue;
        }
        let mut row: Vec<Option<f64>> = Vec::with_capacity(feature_names.len());
        for (col, cell) in record.iter().enumerate() {
            if col == label_idx {
                continue;
            }
            let cell = cell.trim();
            if cell == "?" || cell.is_empty() {
                row.push(None);
            } else {
                let v: f64 = cell.parse().map_err(|_| {
                    Error::parse(
                        lineno,
                        format!("non-numeric value '{}' in column '{}'", cell, headers[col]),
                    )
                })?;
                if !v.is_finite() {
                    return Err(Error::parse(
                        lineno,
                        format!("non-finite value in column '{}'", headers[col]),
                    ));
                }
                row.push(Some(v));
            }
        }
        rows.push(row);
        labels_raw.push(label_cell.to_string());
    }

    // distinct label strings, in order of first appearance
    let mut class_values: Vec<String> = Vec::new();
    for raw in &labels_raw {
        if !class_values.iter().any(|v| v.eq_ignore_ascii_case(raw)) {
            class_values.push(raw.clone());
        }
    }
    if class_values.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if class_values.len() > 2 {
        return Err(Error::UnsupportedLabels(format!(
            "label column '{}' has {} distinct values: [{}]",
            label_column,
            class_values.len(),
            class_values.join(", ")
        )));
    }
    let mapping = if class_values.len() == 2 {
        resolve_binary_tags(&class_values[0], &class_values[1])?
    } else {
        let only = classify_tag(&class_values[0]).ok_or_else(|| {
            Error::UnsupportedLabels(format!("unrecognized class value '{}'", class_values[0]))
        })?;
        (only, only.other())
    };

    build_dataset(
        rows,
        labels_raw,
        &class_values,
        mapping,
        feature_names,
        name,
        missing,
        raw_rows,
        dropped_label_rows,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Label;
    use std::io::Write;

    fn write_temp(content: &str, ext: &str) -> tempfile::TempPath {
        let mut f = tempfile::Builder::new().suffix(ext).tempfile().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.into_temp_path()
    }

    #[test]
    fn loads_basic_csv() {
        let path = write_temp("a,b,defects\n1.0,2.0,Y\n3.0,4.0,N\n5.0,6.0,N\n", ".csv");
        let (ds, report) = load_csv::<f64>(&path, "defects").unwrap();
        assert_eq!(ds.n_samples(), 3);
        assert_eq!(ds.n_features(), 2);
        assert_eq!(ds.labels[0], Label::Defective);
        assert_eq!(report.raw_rows, 3);
    }

    #[test]
    fn label_column_in_the_middle_is_removed_from_features() {
        let path = write_temp("a,defects,b\n1.0,Y,2.0\n3.0,N,4.0\n", ".csv");
        let (ds, _) = load_csv::<f64>(&path, "defects").unwrap();
        assert_eq!(ds.feature_names, vec!["a", "b"]);
        assert_eq!(ds.features[(1, 1)], 4.0);
    }

    #[test]
    fn missing_label_column_names_it() {
        let path = write_temp("a,b\n1.0,2.0\n", ".csv");
        let err = load_csv::<f64>(&path, "defects").unwrap_err();
        assert!(err.to_string().contains("defects"));
    }

    #[test]
    fn non_numeric_cell_reports_row_and_column() {
        let path = write_temp("a,b,defects\n1.0,oops,Y\n", ".csv");
        let err = load_csv::<f64>(&path, "defects").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(msg.contains("'b'"), "{msg}");
    }

    #[test]
    fn agrees_with_arff_on_equivalent_content() {
        let arff = "\
@relation toy
@attribute a numeric
@attribute b numeric
@attribute defects {Y,N}
@data
1.5,2.5,Y
3.5,4.5,N
0.5,9.5,N
";
        let csv_text = "a,b,defects\n1.5,2.5,Y\n3.5,4.5,N\n0.5,9.5,N\n";
        let (from_arff, _) =
            crate::data::parse_arff::<f64>(arff, "toy", MissingPolicy::DropRows).unwrap();
        let path = write_temp(csv_text, ".csv");
        let (from_csv, _) = load_csv::<f64>(&path, "defects").unwrap();
        assert_eq!(from_arff.features, from_csv.features);
        assert_eq!(from_arff.labels, from_csv.labels);
        assert_eq!(from_arff.feature_names, from_csv.feature_names);
    }
}
