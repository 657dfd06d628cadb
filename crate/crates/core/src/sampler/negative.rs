use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use super::PairCorpus;
use crate::error::{Error, Result};

/// Redraws allowed per negative slot before a draw is accepted regardless.
pub const REJECTION_CAP: usize = 100;

/// Draws negatives proportionally to the corpus noise weights, rejecting
/// nodes that already form a pair with the source.
#[derive(Debug, Clone)]
pub struct NegativeSampler<'a> {
    corpus: &'a PairCorpus,
    noise: WeightedIndex<f64>,
    cap_hits: u64,
}

impl<'a> NegativeSampler<'a> {
    pub fn new(corpus: &'a PairCorpus) -> Result<Self> {
        let noise = WeightedIndex::new(corpus.noise_weights()).map_err(|_| Error::EmptyNoise)?;
        Ok(NegativeSampler {
            corpus,
            noise,
            cap_hits: 0,
        })
    }

    /// Slots that exhausted [`REJECTION_CAP`] redraws so far.
    pub fn cap_hits(&self) -> u64 {
        self.cap_hits
    }

    /// Draws from the noise distribution without rejection.
    pub fn draw_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.noise.sample(rng)
    }

    /// Clears `out` and fills it with `m` negatives for source `u` followed by
    /// the context `v`.
    pub fn sample_into<R: Rng + ?Sized>(&mut self, u: usize, v: usize, m: usize, rng: &mut R, out: &mut Vec<usize>) {
        out.clear();
        for _ in 0..m {
            let mut x = self.noise.sample(rng);
            let mut redraws = 0;
            while self.corpus.contains(u, x) {
                if redraws == REJECTION_CAP {
                    self.cap_hits += 1;
                    break;
                }
                x = self.noise.sample(rng);
                redraws += 1;
            }
            out.push(x);
        }
        out.push(v);
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, u: usize, v: usize, m: usize, rng: &mut R) -> Vec<usize> {
        let mut out = Vec::with_capacity(m + 1);
        self.sample_into(u, v, m, rng, &mut out);
        out
    }
}

/// `m` negatives for the pair `(u, v)` with `v` appended last.
pub fn sample_negatives<R: Rng + ?Sized>(
    corpus: &PairCorpus,
    u: usize,
    v: usize,
    m: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if m == 0 {
        return Err(Error::InvalidConfig("number of negatives must be positive".into()));
    }
    Ok(NegativeSampler::new(corpus)?.sample(u, v, m, rng))
}
