use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::AttributedGraph;
use crate::seed::{self, Stream};

/// Link-prediction holdout: a fraction of the edges plus as many non-edges.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSplit {
    pub train_edges: Vec<(usize, usize)>,
    pub held_out_edges: Vec<(usize, usize)>,
    pub sampled_non_edges: Vec<(usize, usize)>,
    pub seed: u64,
}

pub const DEFAULT_HOLDOUT_FRACTION: f64 = 0.15;

/// Holds out `round(fraction * |E|)` random edges and samples the same number
/// of uniform non-edges. All pairs are stored as `(u, v)` with `u < v`.
pub fn split_edges(graph: &AttributedGraph, fraction: f64, seed: u64) -> Result<EdgeSplit> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::InvalidConfig(format!(
            "holdout fraction must lie in [0, 1), got {fraction}"
        )));
    }
    let m = graph.num_edges();
    if m < 10 {
        return Err(Error::InvalidConfig(format!(
            "edge split needs at least 10 edges, graph has {m}"
        )));
    }
    let k = (fraction * m as f64).round() as usize;
    let mut rng = seed::rng(seed, Stream::Split, 0, 0);
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut rng);
    let edges = graph.edges();
    let mut held_out: Vec<(usize, usize)> = order[..k].iter().map(|&i| (edges[i].0, edges[i].1)).collect();
    let mut train: Vec<(usize, usize)> = order[k..].iter().map(|&i| (edges[i].0, edges[i].1)).collect();
    held_out.sort_unstable();
    train.sort_unstable();

    let n = graph.num_nodes();
    let max_attempts = 100 * m;
    let mut seen = HashSet::with_capacity(k);
    let mut non_edges = Vec::with_capacity(k);
    let mut attempts = 0;
    while non_edges.len() < k {
        if attempts == max_attempts {
            return Err(Error::NonEdgeSampling { wanted: k, attempts });
        }
        attempts += 1;
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a == b {
            continue;
        }
        let pair = (a.min(b), a.max(b));
        if graph.has_edge(pair.0, pair.1) || !seen.insert(pair) {
            continue;
        }
        non_edges.push(pair);
    }
    Ok(EdgeSplit {
        train_edges: train,
        held_out_edges: held_out,
        sampled_non_edges: non_edges,
        seed,
    })
}

impl EdgeSplit {
    /// The graph restricted to the training edges.
    pub fn training_graph(&self, graph: &AttributedGraph) -> Result<AttributedGraph> {
        graph.restrict_edges(&self.train_edges)
    }
}
