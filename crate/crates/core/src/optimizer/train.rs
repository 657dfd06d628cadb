use rand::seq::SliceRandom;

use super::loss::{accumulate_gradients, GradientBuffer, Sample};
use super::HyperboloidEmbedding;
use crate::error::{Error, Result};
use crate::geometry::{constraint_residual, exp_map, minkowski_dot, project_to_tangent, MAX_TANGENT_STEP};
use crate::sampler::{NegativeSampler, PairCorpus};
use crate::seed::{self, Stream};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub negatives: usize,
    pub batch_size: usize,
    pub sigma: f64,
    pub seed: u64,
    /// Give negative samples their own repulsive gradient term.
    pub update_negatives: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.3,
            epochs: 5,
            negatives: 10,
            batch_size: 50,
            sigma: 1.0,
            seed: 0,
            update_negatives: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be finite and nonnegative, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 || self.negatives == 0 || self.batch_size == 0 {
            return Err(Error::InvalidConfig(
                "epochs, negatives and batch size must be positive".into(),
            ));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainStats {
    pub batches: u64,
    pub updates: u64,
    pub rejection_cap_hits: u64,
    /// Largest `|<x, step>|` over applied tangent steps.
    pub max_tangent_residual: f64,
    /// Largest constraint residual seen after any batch.
    pub max_constraint_residual: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub embedding: HyperboloidEmbedding,
    /// Mean batch loss per epoch.
    pub loss_trace: Vec<f64>,
    pub stats: TrainStats,
}

/// Runs mini-batch Riemannian SGD over the corpus.
///
/// Each epoch shuffles the pairs, splits them into batches, draws fresh
/// negatives per pair, accumulates all gradients of a batch against the
/// embedding as it stood at batch start and then moves every touched node by
/// `Exp_x(clip(-lr * proj_x(g)))`.
pub fn train(initial: HyperboloidEmbedding, corpus: &PairCorpus, config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(Error::InvalidConfig("cannot train on an empty pair corpus".into()));
    }
    if corpus.num_nodes() != initial.num_nodes() {
        return Err(Error::LengthMismatch {
            left: initial.num_nodes(),
            right: corpus.num_nodes(),
        });
    }
    let mut emb = initial.with_sigma(config.sigma)?;
    let mut sampler = NegativeSampler::new(corpus)?;
    let mut buf = GradientBuffer::new(emb.num_nodes(), emb.dim());
    let mut stats = TrainStats::default();
    let mut loss_trace = Vec::with_capacity(config.epochs);
    let mut order: Vec<u32> = (0..corpus.len() as u32).collect();
    let mut batch: Vec<Sample> = (0..config.batch_size)
        .map(|_| Sample {
            source: 0,
            candidates: Vec::with_capacity(config.negatives + 1),
        })
        .collect();
    let pairs = corpus.pairs();

    for epoch in 0..config.epochs {
        order.shuffle(&mut seed::rng(config.seed, Stream::Shuffle, epoch as u64, 0));
        let mut neg_rng = seed::rng(config.seed, Stream::Negatives, epoch as u64, 0);
        let mut loss_sum = 0.0;
        let mut num_batches = 0usize;
        for (b, chunk) in order.chunks(config.batch_size).enumerate() {
            let samples = &mut batch[..chunk.len()];
            for (slot, &idx) in samples.iter_mut().zip(chunk) {
                let (u, v) = pairs[idx as usize];
                slot.source = u as usize;
                sampler.sample_into(
                    u as usize,
                    v as usize,
                    config.negatives,
                    &mut neg_rng,
                    &mut slot.candidates,
                );
            }
            buf.clear();
            let scale = 1.0 / chunk.len() as f64;
            let total = accumulate_gradients(&emb, samples, scale, config.update_negatives, &mut buf);
            let mean = total * scale;
            if !mean.is_finite() {
                let node = samples
                    .iter()
                    .find(|s| !super::sample_loss(&emb, s).is_finite())
                    .map_or(samples[0].source, |s| s.source);
                return Err(Error::NonFiniteLoss { epoch, batch: b, node });
            }
            loss_sum += mean;
            num_batches += 1;
            apply_updates(&mut emb, &mut buf, config.learning_rate, &mut stats)
                .map_err(|node| Error::NonFiniteLoss { epoch, batch: b, node })?;
            stats.batches += 1;
        }
        let epoch_loss = loss_sum / num_batches as f64;
        log::info!("epoch {epoch}: mean loss {epoch_loss:.6}");
        loss_trace.push(epoch_loss);
    }
    stats.rejection_cap_hits = sampler.cap_hits();
    Ok(TrainOutcome {
        embedding: emb,
        loss_trace,
        stats,
    })
}

/// Moves every touched node; on a non-finite update returns the node index.
fn apply_updates(
    emb: &mut HyperboloidEmbedding,
    buf: &mut GradientBuffer,
    learning_rate: f64,
    stats: &mut TrainStats,
) -> std::result::Result<(), usize> {
    let touched = buf.touched().to_vec();
    for u in touched {
        let base = emb.point(u);
        let mut step = project_to_tangent(base, buf.gradient(u));
        step.scale(-learning_rate);
        step.clip(MAX_TANGENT_STEP);
        if step.direction.iter().any(|c| !c.is_finite()) {
            return Err(u);
        }
        let tangent = minkowski_dot(base.coords(), &step.direction).abs();
        stats.max_tangent_residual = stats.max_tangent_residual.max(tangent);
        let next = exp_map(&step);
        stats.max_constraint_residual = stats.max_constraint_residual.max(constraint_residual(next.coords()));
        emb.set_point(u, next);
        stats.updates += 1;
    }
    Ok(())
}
