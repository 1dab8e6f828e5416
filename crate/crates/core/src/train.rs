//! Shared mini-batch training scaffolding: epoch shuffling and batching.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hyperparameters common to every gradient/contrastive-divergence trainer
/// in this crate. The seed fixes both parameter initialization (where the
/// caller derives it) and the per-epoch shuffle, making runs reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl TrainConfig {
    /// A zero learning rate is accepted so callers can probe the fixed-point
    /// behaviour of an update rule; negative or non-finite rates are not.
    pub fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "learning_rate must be finite and >= 0, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be >= 1".into()));
        }
        Ok(())
    }
}

/// Deterministic shuffled batch order for one epoch: shuffles `0..n` with the
/// supplied RNG and yields index chunks of `batch_size` (last may be short).
pub fn epoch_batches<R: Rng>(n: usize, batch_size: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order.chunks(batch_size).map(|c| c.to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn batches_cover_all_indices_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let batches = epoch_batches(10, 4, &mut rng);
        assert_eq!(batches.len(), 3);
        assert_eq!(batches[2].len(), 2);
        let mut all: Vec<usize> = batches.into_iter().flatten().collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn same_seed_same_order() {
        let a = epoch_batches(20, 6, &mut ChaCha8Rng::seed_from_u64(1));
        let b = epoch_batches(20, 6, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a, b);
    }

    #[test]
    fn zero_learning_rate_is_allowed_negative_is_not() {
        let mut cfg = TrainConfig {
            epochs: 1,
            batch_size: 1,
            learning_rate: 0.0,
            seed: 0,
        };
        assert!(cfg.validate().is_ok());
        cfg.learning_rate = -0.1;
        assert!(cfg.validate().is_err());
    }
}
