//! Minimal ARFF reader covering the subset used by the NASA MDP / PROMISE
//! distributions: numeric attributes, one trailing nominal class attribute,
//! `%` comments and `?` missing markers.

use std::path::Path;

use crate::data::{resolve_binary_tags, Dataset, Label, LoadReport, MissingPolicy};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Matrix;

#[derive(Debug)]
enum AttrType {
    Numeric,
    Nominal(Vec<String>),
}

#[derive(Debug)]
struct Attribute {
    name: String,
    ty: AttrType,
    line: usize,
}

/// Loads an ARFF file with the default missing-value policy (drop rows).
pub fn load_arff<S: Scalar>(path: impl AsRef<Path>) -> Result<(Dataset<S>, LoadReport)> {
    load_arff_with(path, MissingPolicy::DropRows)
}

pub fn load_arff_with<S: Scalar>(
    path: impl AsRef<Path>,
    missing: MissingPolicy,
) -> Result<(Dataset<S>, LoadReport)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let fallback = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "dataset".to_string());
    parse_arff(&text, &fallback, missing)
}

/// Parses ARFF text. `fallback_name` is used when no `@relation` is present.
pub fn parse_arff<S: Scalar>(
    text: &str,
    fallback_name: &str,
    missing: MissingPolicy,
) -> Result<(Dataset<S>, LoadReport)> {
    let mut relation: Option<String> = None;
    let mut attributes: Vec<Attribute> = Vec::new();
    let mut in_data = false;
    // raw cells: one Option<f64> per numeric attribute; None = missing
    let mut rows: Vec<Vec<Option<f64>>> = Vec::new();
    let mut labels_raw: Vec<String> = Vec::new();
    let mut raw_rows = 0usize;
    let mut dropped_label_rows = 0usize;

    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if !in_data {
            let lower = line.to_ascii_lowercase();
            if lower.starts_with("@relation") {
                let rest = line["@relation".len()..].trim();
                relation = Some(unquote(rest).to_string());
            } else if lower.starts_with("@attribute") {
                let rest = line["@attribute".len()..].trim();
                attributes.push(parse_attribute(rest, lineno)?);
            } else if lower.starts_with("@data") {
                validate_header(&attributes)?;
                in_data = true;
            } else {
                return Err(Error::parse(lineno, format!("unexpected header line: {line}")));
            }
            continue;
        }

        raw_rows += 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != attributes.len() {
            return Err(Error::parse(
                lineno,
                format!("expected {} fields, found {}", attributes.len(), cells.len()),
            ));
        }
        let n_features = attributes.len() - 1;
        let label_cell = unquote(cells[n_features]);
        if label_cell == "?" {
            // a row without a label is useless under any policy
            dropped_label_rows += 1;
            continue;
        }
        let mut row: Vec<Option<f64>> = Vec::with_capacity(n_features);
        for (col, cell) in cells[..n_features].iter().enumerate() {
            if *cell == "?" {
                row.push(None);
            } else {
                let v: f64 = cell.parse().map_err(|_| {
                    Error::parse(
                        lineno,
                        format!("non-numeric value '{}' in attribute '{}'", cell, attributes[col].name),
                    )
                })?;
                if !v.is_finite() {
                    return Err(Error::parse(
                        lineno,
                        format!("non-finite value in attribute '{}'", attributes[col].name),
                    ));
                }
                row.push(Some(v));
            }
        }
        rows.push(row);
        labels_raw.push(label_cell.to_string());
    }

    if !in_data {
        return Err(Error::parse(text.lines().count(), "missing @data section"));
    }

    let class_values = match &attributes.last().expect("validated nonempty").ty {
        AttrType::Nominal(vals) => vals.clone(),
        AttrType::Numeric => unreachable!("validated in header"),
    };
    let (label_a, label_b) = resolve_binary_tags(&class_values[0], &class_values[1])?;

    let feature_names: Vec<String> = attributes[..attributes.len() - 1]
        .iter()
        .map(|a| a.name.clone())
        .collect();

    let name = relation.unwrap_or_else(|| fallback_name.to_string());
    build_dataset(
        rows,
        labels_raw,
        &class_values,
        (label_a, label_b),
        feature_names,
        name,
        missing,
        raw_rows,
        dropped_label_rows,
    )
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn build_dataset<S: Scalar>(
    rows: Vec<Vec<Option<f64>>>,
    labels_raw: Vec<String>,
    class_values: &[String],
    mapping: (Label, Label),
    feature_names: Vec<String>,
    name: String,
    missing: MissingPolicy,
    raw_rows: usize,
    dropped_label_rows: usize,
) -> Result<(Dataset<S>, LoadReport)> {
    let n_features = feature_names.len();
    let mut labels: Vec<Label> = Vec::with_capacity(labels_raw.len());
    for raw in &labels_raw {
        let matched = class_values
            .iter()
            .position(|v| v.eq_ignore_ascii_case(raw))
            .ok_or_else(|| {
                Error::UnsupportedLabels(format!("class value '{raw}' not among declared values"))
            })?;
        labels.push(if matched == 0 { mapping.0 } else { mapping.1 });
    }

    let (kept_rows, kept_labels, dropped_missing) = match missing {
        MissingPolicy::DropRows => {
            let mut k_rows = Vec::new();
            let mut k_labels = Vec::new();
            let mut dropped = 0usize;
            for (row, label) in rows.into_iter().zip(labels) {
                if row.iter().all(Option::is_some) {
                    k_rows.push(row.into_iter().map(|c| c.unwrap()).collect::<Vec<f64>>());
                    k_labels.push(label);
                } else {
                    dropped += 1;
                }
            }
            (k_rows, k_labels, dropped)
        }
        MissingPolicy::ImputeColumnMean => {
            let mut sums = vec![0.0f64; n_features];
            let mut counts = vec![0usize; n_features];
            for row in &rows {
                for (c, cell) in row.iter().enumerate() {
                    if let Some(v) = cell {
                        sums[c] += v;
                        counts[c] += 1;
                    }
                }
            }
            let mut means = vec![0.0f64; n_features];
            for c in 0..n_features {
                if counts[c] == 0 && !rows.is_empty() {
                    return Err(Error::UnsupportedLabels(format!(
                        "column '{}' has no observed values to impute from",
                        feature_names[c]
                    )));
                }
                if counts[c] > 0 {
                    means[c] = sums[c] / counts[c] as f64;
                }
            }
            let filled: Vec<Vec<f64>> = rows
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .enumerate()
                        .map(|(c, cell)| cell.unwrap_or(means[c]))
                        .collect()
                })
                .collect();
            (filled, labels, 0usize)
        }
    };

    if kept_rows.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let n = kept_rows.len();
    let flat: Vec<S> = kept_rows
        .into_iter()
        .flatten()
        .map(S::from_f)
        .collect();
    let features = Matrix::from_shape_vec((n, n_features), flat)
        .map_err(|e| Error::DimensionMismatch(e.to_string()))?;
    let dataset = Dataset::new(features, kept_labels, feature_names, name)?;
    Ok((
        dataset,
        LoadReport {
            raw_rows,
            dropped_rows: dropped_missing + dropped_label_rows,
        },
    ))
}

fn validate_header(attributes: &[Attribute]) -> Result<()> {
    if attributes.is_empty() {
        return Err(Error::parse(0, "no attributes declared before @data"));
    }
    let last = attributes.len() - 1;
    for (i, attr) in attributes.iter().enumerate() {
        match (&attr.ty, i == last) {
            (AttrType::Numeric, true) => {
                return Err(Error::parse(
                    attr.line,
                    "last attribute must be the nominal class attribute",
                ))
            }
            (AttrType::Nominal(_), false) => {
                return Err(Error::parse(
                    attr.line,
                    format!("nominal attribute '{}' is only supported in the class position", attr.name),
                ))
            }
            (AttrType::Nominal(vals), true) => {
                if vals.len() != 2 {
                    return Err(Error::UnsupportedLabels(format!(
                        "class attribute '{}' has {} values, expected 2",
                        attr.name,
                        vals.len()
                    )));
                }
            }
            (AttrType::Numeric, false) => {}
        }
    }
    if attributes.len() < 2 {
        return Err(Error::parse(
            attributes[0].line,
            "need at least one numeric attribute and one class attribute",
        ));
    }
    Ok(())
}

fn parse_attribute(rest: &str, line: usize) -> Result<Attribute> {
    let (name, remainder) = take_name(rest, line)?;
    let ty_str = remainder.trim();
    if ty_str.is_empty() {
        return Err(Error::parse(line, format!("attribute '{name}' has no type")));
    }
    let ty = if ty_str.starts_with('{') {
        let inner = ty_str
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| Error::parse(line, "unterminated nominal value list"))?;
        let values: Vec<String> = inner
            .split(',')
            .map(|v| unquote(v.trim()).to_string())
            .filter(|v| !v.is_empty())
            .collect();
        if values.is_empty() {
            return Err(Error::parse(line, "empty nominal value list"));
        }
        AttrType::Nominal(values)
    } else {
        match ty_str.to_ascii_lowercase().as_str() {
            "numeric" | "real" | "integer" => AttrType::Numeric,
            other => {
                return Err(Error::parse(
                    line,
                    format!("unsupported attribute type '{other}' for '{name}'"),
                ))
            }
        }
    };
    Ok(Attribute { name, ty, line })
}

/// Splits an attribute declaration into its (possibly quoted) name and the
/// remaining type text.
fn take_name(rest: &str, line: usize) -> Result<(String, &str)> {
    let rest = rest.trim_start();
    if let Some(stripped) = rest.strip_prefix('\'') {
        let end = stripped
            .find('\'')
            .ok_or_else(|| Error::parse(line, "unterminated quoted attribute name"))?;
        Ok((stripped[..end].to_string(), &stripped[end + 1..]))
    } else if let Some(stripped) = rest.strip_prefix('"') {
        let end = stripped
            .find('"')
            .ok_or_else(|| Error::parse(line, "unterminated quoted attribute name"))?;
        Ok((stripped[..end].to_string(), &stripped[end + 1..]))
    } else {
        match rest.split_once(char::is_whitespace) {
            Some((name, remainder)) => Ok((name.to_string(), remainder)),
            None => Err(Error::parse(line, format!("attribute '{rest}' has no type"))),
        }
    }
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    s.strip_prefix('\'')
        .and_then(|t| t.strip_suffix('\''))
        .or_else(|| s.strip_prefix('"').and_then(|t| t.strip_suffix('"')))
        .unwrap_or(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = "\
% toy defect data
@relation toy
@attribute loc numeric
@attribute complexity real
@attribute defects {Y,N}
@data
1.0, 2.0, Y
3.0, 4.0, N
5.0, 6.0, N
7.0, 8.0, Y
";

    #[test]
    fn parses_structure_directly() {
        let (ds, report) = parse_arff::<f64>(TOY, "fallback", MissingPolicy::DropRows).unwrap();
        assert_eq!(ds.name, "toy");
        assert_eq!(ds.n_samples(), 4);
        assert_eq!(ds.n_features(), 2);
        assert_eq!(ds.feature_names, vec!["loc", "complexity"]);
        assert_eq!(
            ds.labels,
            vec![
                Label::Defective,
                Label::NonDefective,
                Label::NonDefective,
                Label::Defective
            ]
        );
        assert_eq!(report.raw_rows, 4);
        assert_eq!(report.dropped_rows, 0);
        assert_eq!(ds.features[(2, 1)], 6.0);
    }

    #[test]
    fn drops_rows_with_missing_values_and_counts_them() {
        let text = "\
@relation m
@attribute a numeric
@attribute b numeric
@attribute class {Y,N}
@data
1.0,?,N
2.0,3.0,Y
";
        let (ds, report) = parse_arff::<f64>(text, "m", MissingPolicy::DropRows).unwrap();
        assert_eq!(ds.n_samples(), 1);
        assert_eq!(report.raw_rows, 2);
        assert_eq!(report.dropped_rows, 1);
        assert_eq!(report.dropped_rows + ds.n_samples(), report.raw_rows);
    }

    #[test]
    fn impute_policy_fills_column_mean() {
        let text = "\
@relation m
@attribute a numeric
@attribute b numeric
@attribute class {Y,N}
@data
1.0,?,N
2.0,3.0,Y
2.0,5.0,Y
";
        let (ds, report) =
            parse_arff::<f64>(text, "m", MissingPolicy::ImputeColumnMean).unwrap();
        assert_eq!(ds.n_samples(), 3);
        assert_eq!(report.dropped_rows, 0);
        assert_eq!(ds.features[(0, 1)], 4.0); // mean of 3 and 5
    }

    #[test]
    fn malformed_header_reports_line_number() {
        let text = "@relation x\n@attribute a wat\n@data\n";
        let err = parse_arff::<f64>(text, "x", MissingPolicy::DropRows).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn three_class_attribute_is_unsupported() {
        let text = "\
@relation x
@attribute a numeric
@attribute class {low,mid,high}
@data
1.0,low
";
        let err = parse_arff::<f64>(text, "x", MissingPolicy::DropRows).unwrap_err();
        assert!(matches!(err, Error::UnsupportedLabels(_)));
    }

    #[test]
    fn all_rows_dropped_is_an_error() {
        let text = "\
@relation x
@attribute a numeric
@attribute class {Y,N}
@data
?,Y
";
        let err = parse_arff::<f64>(text, "x", MissingPolicy::DropRows).unwrap_err();
        assert!(matches!(err, Error::EmptyDataset));
    }

    #[test]
    fn keywords_are_case_insensitive_and_quotes_ok() {
        let text = "\
@RELATION 'my data'
@ATTRIBUTE 'a b' NUMERIC
@Attribute class {false,true}
@DATA
1.5,true
";
        let (ds, _) = parse_arff::<f64>(text, "x", MissingPolicy::DropRows).unwrap();
        assert_eq!(ds.name, "my data");
        assert_eq!(ds.feature_names, vec!["a b"]);
        assert_eq!(ds.labels, vec![Label::Defective]);
    }
}
