//! Shared fixtures for the CLI and acceptance test suites.

use std::io::Write;
use std::path::{Path, PathBuf};

/// Writes a 10-sample, 3-feature smoke dataset: 4 defective, 6 clean,
/// linearly well separated so tiny models converge fast.
pub fn write_smoke_arff(dir: &Path) -> PathBuf {
    let path = dir.join("SMOKE.arff");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "@relation smoke").unwrap();
    writeln!(f, "@attribute effort numeric").unwrap();
    writeln!(f, "@attribute loc numeric").unwrap();
    writeln!(f, "@attribute branches numeric").unwrap();
    writeln!(f, "@attribute defects {{Y,N}}").unwrap();
    writeln!(f, "@data").unwrap();
    let rows = [
        ("5.2,101.0,3.0", "Y"),
        ("4.9,96.0,4.0", "Y"),
        ("5.5,110.0,2.5", "Y"),
        ("5.1,105.0,3.5", "Y"),
        ("-1.2,10.0,0.5", "N"),
        ("-0.8,12.0,1.0", "N"),
        ("-1.5,8.0,0.0", "N"),
        ("-1.1,11.0,0.5", "N"),
        ("-0.9,14.0,1.5", "N"),
        ("-1.0,13.0,1.0", "N"),
    ];
    for (features, label) in rows {
        writeln!(f, "{features},{label}").unwrap();
    }
    path
}

pub fn write_smoke_config(dir: &Path, dataset: &Path, out: &Path) -> PathBuf {
    let path = dir.join("smoke.toml");
    let mut f = std::fs::File::create(&path).unwrap();
    write!(
        f,
        "dataset_path = {dataset:?}\n\
         model = \"dbn\"\n\
         hidden_sizes = [4, 3]\n\
         folds = 2\n\
         seed = 11\n\
         output_dir = {out:?}\n\
         \n\
         [pretrain]\n\
         epochs = 3\n\
         batch_size = 2\n\
         \n\
         [fine_tune]\n\
         epochs = 20\n\
         batch_size = 2\n\
         learning_rate = 0.5\n"
    )
    .unwrap();
    path
}
