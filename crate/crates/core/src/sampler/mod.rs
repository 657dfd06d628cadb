//! Training-pair generation: teleport random walks, sliding-window context
//! pairs and negative sampling from the unigram^(3/4) noise distribution.

mod negative;
mod pairs;

use std::fmt;
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;

pub use negative::{sample_negatives, NegativeSampler, REJECTION_CAP};
pub use pairs::{extract_pairs, PairCorpus};

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, TransitionTables};
use crate::seed::{self, Stream};

/// Walk-generation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig {
    pub num_walks_per_node: usize,
    /// Steps per walk; a walk holds up to `walk_length + 1` positions.
    pub walk_length: usize,
    pub context_size: usize,
    /// Probability of an attribute teleport at each step.
    pub alpha: f64,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            num_walks_per_node: 10,
            walk_length: 80,
            context_size: 3,
            alpha: 0.2,
            seed: 0,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if self.num_walks_per_node == 0 {
            return Err(Error::InvalidConfig("walks per node must be positive".into()));
        }
        if self.walk_length < 2 {
            return Err(Error::InvalidConfig(format!(
                "walk length must be at least 2, got {}",
                self.walk_length
            )));
        }
        if self.context_size == 0 {
            return Err(Error::InvalidConfig("context size must be positive".into()));
        }
        Ok(())
    }
}

/// Counters gathered during walk generation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WalkStats {
    pub walks: u64,
    pub positions: u64,
    pub topology_steps: u64,
    pub attribute_steps: u64,
    /// Coin flips that chose the attribute table.
    pub teleport_draws: u64,
    /// Steps taken from the other table because the chosen row was empty.
    pub fallbacks: u64,
    /// Walks that stopped before `walk_length` steps.
    pub truncated: u64,
}

impl WalkStats {
    fn merge(&mut self, other: &WalkStats) {
        self.walks += other.walks;
        self.positions += other.positions;
        self.topology_steps += other.topology_steps;
        self.attribute_steps += other.attribute_steps;
        self.teleport_draws += other.teleport_draws;
        self.fallbacks += other.fallbacks;
        self.truncated += other.truncated;
    }

    /// Fraction of steps whose coin flip chose an attribute teleport.
    pub fn teleport_fraction(&self) -> f64 {
        let steps = self.topology_steps + self.attribute_steps;
        if steps == 0 {
            0.0
        } else {
            self.teleport_draws as f64 / steps as f64
        }
    }
}

/// Walks ordered by `(start node, walk index)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkSet {
    pub walks: Vec<Vec<usize>>,
    pub stats: WalkStats,
}

/// Single walk from `start` using its own generator.
pub fn walk_from<R: Rng + ?Sized>(
    tables: &TransitionTables,
    start: usize,
    steps: usize,
    alpha: f64,
    rng: &mut R,
    stats: &mut WalkStats,
) -> Vec<usize> {
    let alpha = if tables.has_attributes() { alpha } else { 0.0 };
    let mut walk = Vec::with_capacity(steps + 1);
    walk.push(start);
    let mut current = start;
    for _ in 0..steps {
        let teleport = alpha > 0.0 && rng.gen::<f64>() < alpha;
        let primary = if teleport {
            tables.sample_attr(current, rng)
        } else {
            tables.sample_topo(current, rng)
        };
        // (next node, whether it came from the attribute table)
        let next = match primary {
            Some(v) => Some((v, teleport)),
            None => {
                let backup = if teleport {
                    tables.sample_topo(current, rng)
                } else {
                    tables.sample_attr(current, rng)
                };
                if backup.is_some() {
                    stats.fallbacks += 1;
                }
                backup.map(|v| (v, !teleport))
            }
        };
        let Some((v, from_attr)) = next else {
            stats.truncated += 1;
            break;
        };
        if from_attr {
            stats.attribute_steps += 1;
        } else {
            stats.topology_steps += 1;
        }
        if teleport {
            stats.teleport_draws += 1;
        }
        walk.push(v);
        current = v;
    }
    stats.walks += 1;
    stats.positions += walk.len() as u64;
    walk
}

/// Generates `num_walks_per_node` walks from every node.
///
/// Each step follows `W̄` with probability `1 - alpha` and `Ȳ` with
/// probability `alpha`; an empty chosen row falls back to the other table and
/// two empty rows end the walk. Walk `(node, i)` draws from its own stream, so
/// the result does not depend on scheduling.
pub fn generate_walks(tables: &TransitionTables, config: &WalkConfig) -> Result<WalkSet> {
    config.validate()?;
    if config.alpha > 0.0 && !tables.has_attributes() {
        log::warn!(
            "alpha = {} without attribute tables; walks use topology only",
            config.alpha
        );
    }
    let per_node: Vec<(Vec<Vec<usize>>, WalkStats)> = (0..tables.num_nodes())
        .into_par_iter()
        .map(|node| {
            let mut stats = WalkStats::default();
            let walks = (0..config.num_walks_per_node)
                .map(|i| {
                    let mut rng = seed::rng(config.seed, Stream::Walks, node as u64, i as u64);
                    walk_from(tables, node, config.walk_length, config.alpha, &mut rng, &mut stats)
                })
                .collect();
            (walks, stats)
        })
        .collect();
    let mut stats = WalkStats::default();
    let mut walks = Vec::with_capacity(tables.num_nodes() * config.num_walks_per_node);
    for (w, s) in per_node {
        stats.merge(&s);
        walks.extend(w);
    }
    Ok(WalkSet { walks, stats })
}

/// One walk per line, positions as external ids separated by spaces.
pub fn write_walks(out: &mut dyn Write, graph: &AttributedGraph, walks: &[Vec<usize>]) -> std::io::Result<()> {
    for walk in walks {
        let line: Vec<&str> = walk.iter().map(|&u| graph.id(u)).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Summary of a sampling run, rendered as `key=value` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerStats {
    pub walks: u64,
    pub truncated_walks: u64,
    pub fallbacks: u64,
    pub teleport_fraction: f64,
    pub pairs: usize,
    pub corpus_entropy: f64,
    pub rejection_cap_hits: u64,
}

impl SamplerStats {
    pub fn new(walks: &WalkStats, corpus: &PairCorpus, rejection_cap_hits: u64) -> Self {
        SamplerStats {
            walks: walks.walks,
            truncated_walks: walks.truncated,
            fallbacks: walks.fallbacks,
            teleport_fraction: walks.teleport_fraction(),
            pairs: corpus.len(),
            corpus_entropy: corpus.occurrence_entropy(),
            rejection_cap_hits,
        }
    }
}

impl fmt::Display for SamplerStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "corpus_entropy={:.6}", self.corpus_entropy)?;
        writeln!(f, "fallbacks={}", self.fallbacks)?;
        writeln!(f, "pairs={}", self.pairs)?;
        writeln!(f, "rejection_cap_hits={}", self.rejection_cap_hits)?;
        writeln!(f, "teleport_fraction={:.6}", self.teleport_fraction)?;
        writeln!(f, "truncated_walks={}", self.truncated_walks)?;
        writeln!(f, "walks={}", self.walks)
    }
}
