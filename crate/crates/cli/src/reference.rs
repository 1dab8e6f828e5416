//! Bundled reference data for the fourteen public NASA defect datasets:
//! published sample statistics used to sanity-check loaded files, and
//! published mean accuracies of classic comparison methods for the
//! side-by-side column in `comparison.csv`.

/// Published per-dataset statistics: sample count and defective fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetStats {
    pub name: &'static str,
    pub samples: usize,
    pub defective_ratio: f64,
}

pub const DATASET_STATS: [DatasetStats; 14] = [
    DatasetStats { name: "CM1", samples: 505, defective_ratio: 0.095 },
    DatasetStats { name: "KC1", samples: 2107, defective_ratio: 0.154 },
    DatasetStats { name: "KC2", samples: 522, defective_ratio: 0.201 },
    DatasetStats { name: "KC3", samples: 458, defective_ratio: 0.093 },
    DatasetStats { name: "KC4", samples: 125, defective_ratio: 0.6 },
    DatasetStats { name: "MC1", samples: 9466, defective_ratio: 0.007 },
    DatasetStats { name: "MC2", samples: 161, defective_ratio: 0.322 },
    DatasetStats { name: "PC1", samples: 1107, defective_ratio: 0.068 },
    DatasetStats { name: "PC2", samples: 5589, defective_ratio: 0.004 },
    DatasetStats { name: "PC3", samples: 1563, defective_ratio: 0.102 },
    DatasetStats { name: "PC4", samples: 1458, defective_ratio: 0.122 },
    DatasetStats { name: "PC5", samples: 17186, defective_ratio: 0.030 },
    DatasetStats { name: "JM1", samples: 10878, defective_ratio: 0.19 },
    DatasetStats { name: "MW1", samples: 403, defective_ratio: 0.08 },
];

pub fn dataset_stats(name: &str) -> Option<&'static DatasetStats> {
    DATASET_STATS.iter().find(|s| s.name.eq_ignore_ascii_case(name))
}

/// Comparison methods whose published mean accuracies are bundled.
pub const REFERENCE_METHODS: [&str; 5] = ["VOTE", "CSVS+CSNN", "CSLS+CSNN", "CBA2", "SVM"];

/// Published mean accuracy (%) per reference method, `None` where the
/// method has no reported value for that dataset. Order follows
/// [`REFERENCE_METHODS`].
pub fn reference_accuracies(dataset: &str) -> Option<[Option<f64>; 5]> {
    let row = match dataset.to_ascii_uppercase().as_str() {
        "CM1" => [Some(89.64), Some(77.60), Some(74.44), Some(80.36), Some(68.0)],
        "KC1" => [Some(85.62), None, None, Some(83.71), None],
        "KC2" => [Some(82.91), Some(74.07), Some(74.82), None, None],
        "KC3" => [Some(89.98), None, None, Some(90.91), Some(66.0)],
        "KC4" => [Some(75.38), None, None, Some(85.37), Some(71.0)],
        "PC1" => [Some(93.73), Some(83.73), Some(82.01), Some(91.78), Some(71.0)],
        "PC2" => [Some(99.53), Some(99.63), Some(99.19), Some(99.20), Some(64.0)],
        "PC3" => [Some(89.12), Some(75.80), Some(78.80), Some(86.48), Some(76.0)],
        "PC4" => [Some(90.28), Some(82.23), Some(85.00), Some(83.96), Some(82.0)],
        "PC5" => [Some(97.46), None, None, None, Some(69.0)],
        "JM1" => [Some(81.44), None, None, Some(73.52), None],
        "MW1" => [Some(91.67), Some(87.93), Some(85.06), Some(91.04), Some(71.0)],
        "MC1" => [Some(99.42), None, None, Some(95.00), Some(65.0)],
        "MC2" => [Some(72.57), None, None, Some(69.81), Some(64.0)],
        _ => return None,
    };
    Some(row)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_cover_fourteen_datasets() {
        assert_eq!(DATASET_STATS.len(), 14);
        assert_eq!(dataset_stats("cm1").unwrap().samples, 505);
        assert!(dataset_stats("XX9").is_none());
    }

    #[test]
    fn cm1_reference_row() {
        let row = reference_accuracies("CM1").unwrap();
        assert_eq!(row[0], Some(89.64)); // VOTE
        assert_eq!(row[3], Some(80.36)); // CBA2
    }
}
