//! Plain label files: one class tag per line, for the standalone metrics
//! subcommand.

use std::path::Path;

use deepdefect_core::data::{classify_tag, Label};
use deepdefect_core::{Error, Result};

pub fn read_label_file(path: &Path) -> Result<Vec<Label>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut labels = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let label = classify_tag(line).ok_or_else(|| Error::Parse {
            line: i + 1,
            msg: format!("unrecognized class tag '{line}'"),
        })?;
        labels.push(label);
    }
    if labels.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(labels)
}

/// Parses the `--positive-class` argument with the same tag vocabulary.
pub fn parse_class_tag(tag: &str) -> Result<Label> {
    classify_tag(tag)
        .ok_or_else(|| Error::InvalidConfig(format!("unrecognized class tag '{tag}'")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn reads_one_label_per_line() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "Y\nN\n\ntrue\nno").unwrap();
        let labels = read_label_file(f.path()).unwrap();
        assert_eq!(
            labels,
            vec![
                Label::Defective,
                Label::NonDefective,
                Label::Defective,
                Label::NonDefective
            ]
        );
    }

    #[test]
    fn bad_tag_reports_line() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "Y\nwat").unwrap();
        let err = read_label_file(f.path()).unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }
}
