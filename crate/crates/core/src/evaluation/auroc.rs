use crate::error::{Error, Result};

/// Area under the ROC curve when smaller scores predict the positive class.
///
/// Equals the probability that a random positive scores strictly below a
/// random negative, ties counting one half (the Mann-Whitney statistic).
/// Sort-based, `O((P + N) log P)`.
pub fn auroc(positive_scores: &[f64], negative_scores: &[f64]) -> Result<f64> {
    let mut counter = AurocCounter::new(positive_scores)?;
    for &s in negative_scores {
        counter.add_negative(s)?;
    }
    counter.finish()
}

/// Streams negatives against a fixed, sorted set of positives so that huge
/// negative sets never need to be held in memory.
///
/// Counts are integral, so merging partial counters in any order gives the
/// same result.
#[derive(Debug, Clone)]
pub struct AurocCounter {
    positives: Vec<f64>,
    // twice the Mann-Whitney U
    doubled: u128,
    negatives: u64,
}

impl AurocCounter {
    pub fn new(positive_scores: &[f64]) -> Result<Self> {
        if positive_scores.is_empty() {
            return Err(Error::EmptyScores("positive"));
        }
        if positive_scores.iter().any(|s| s.is_nan()) {
            return Err(Error::NonFinite("AUROC score is NaN".into()));
        }
        let mut positives = positive_scores.to_vec();
        positives.sort_unstable_by(f64::total_cmp);
        Ok(AurocCounter {
            positives,
            doubled: 0,
            negatives: 0,
        })
    }

    /// A counter over the same positives with no negatives yet.
    pub fn empty_like(&self) -> Self {
        AurocCounter {
            positives: self.positives.clone(),
            doubled: 0,
            negatives: 0,
        }
    }

    pub fn add_negative(&mut self, score: f64) -> Result<()> {
        if score.is_nan() {
            return Err(Error::NonFinite("AUROC score is NaN".into()));
        }
        let below = self.positives.partition_point(|&x| x < score) as u128;
        let below_or_eq = self.positives.partition_point(|&x| x <= score) as u128;
        self.doubled += 2 * below + (below_or_eq - below);
        self.negatives += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &AurocCounter) {
        self.doubled += other.doubled;
        self.negatives += other.negatives;
    }

    pub fn num_negatives(&self) -> u64 {
        self.negatives
    }

    pub fn finish(&self) -> Result<f64> {
        if self.negatives == 0 {
            return Err(Error::EmptyScores("negative"));
        }
        let u = self.doubled as f64 / 2.0;
        Ok(u / (self.positives.len() as f64 * self.negatives as f64))
    }
}
