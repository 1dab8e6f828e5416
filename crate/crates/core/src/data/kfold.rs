//! Seeded stratified k-fold splitting.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{Dataset, Label};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One train/test split. Indices are ascending within each side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

/// A full k-fold plan over `n_samples` items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub folds: Vec<Fold>,
    pub k: usize,
    pub seed: u64,
    pub n_samples: usize,
}

impl FoldPlan {
    /// Builds a stratified plan from labels alone: each class is shuffled
    /// with the seeded RNG and dealt round-robin across folds, so per-class
    /// test counts differ by at most one. The deal position carries over
    /// between classes to keep total fold sizes balanced as well.
    pub fn from_labels(labels: &[Label], k: usize, seed: u64) -> Result<FoldPlan> {
        let n = labels.len();
        if k < 2 {
            return Err(Error::InvalidConfig(format!("fold count must be >= 2, got {k}")));
        }
        if k > n {
            return Err(Error::InvalidConfig(format!(
                "fold count {k} exceeds sample count {n}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut test_sets: Vec<Vec<usize>> = vec![Vec::new(); k];
        let mut cursor = 0usize;
        for class in [Label::NonDefective, Label::Defective] {
            let mut idx: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
            if !idx.is_empty() && idx.len() < k {
                log::warn!(
                    "class {class} has only {} samples for {k} folds; some test folds will miss it",
                    idx.len()
                );
            }
            idx.shuffle(&mut rng);
            for i in idx {
                test_sets[cursor % k].push(i);
                cursor += 1;
            }
        }
        let folds = test_sets
            .into_iter()
            .map(|mut test| {
                test.sort_unstable();
                let mut in_test = vec![false; n];
                for &i in &test {
                    in_test[i] = true;
                }
                let train = (0..n).filter(|&i| !in_test[i]).collect();
                Fold {
                    train_indices: train,
                    test_indices: test,
                }
            })
            .collect();
        Ok(FoldPlan {
            folds,
            k,
            seed,
            n_samples: n,
        })
    }
}

/// Stratified k-fold plan for a dataset (see [`FoldPlan::from_labels`]).
pub fn stratified_kfold<S: Scalar>(dataset: &Dataset<S>, k: usize, seed: u64) -> Result<FoldPlan> {
    FoldPlan::from_labels(&dataset.labels, k, seed)
}
