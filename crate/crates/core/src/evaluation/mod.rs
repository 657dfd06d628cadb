//! Downstream evaluation: reconstruction and link-prediction AUROC plus node
//! classification on Klein coordinates.

mod auroc;
mod classify;
mod logistic;
mod split;

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::Rng;
use rayon::prelude::*;

pub use auroc::{auroc, AurocCounter};
pub use classify::{classify_eval, confusion_counts, f1_scores, klein_features, Confusion};
pub use logistic::{log_loss_gradient, logistic_regression_fit, regularized_log_loss, LogisticConfig, LogisticModel};
pub use split::{split_edges, EdgeSplit, DEFAULT_HOLDOUT_FRACTION};

use crate::error::{Error, Result};
use crate::graph::AttributedGraph;
use crate::optimizer::HyperboloidEmbedding;
use crate::seed::{self, Stream};

/// Node count above which reconstruction subsamples its negatives.
pub const DEFAULT_FULL_PAIR_THRESHOLD: usize = 10_000;

/// Negatives drawn per edge when reconstruction subsamples.
pub const SUBSAMPLED_NEGATIVES_PER_EDGE: usize = 10;

pub const RESULTS_HEADER: &str = "task,dim,alpha,seed,metric,value,std,fraction";

/// Outcome of one evaluation run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub task: String,
    pub dim: usize,
    pub alpha: Option<f64>,
    pub seed: u64,
    /// Holdout or labelled fraction, when the task has one.
    pub fraction: Option<f64>,
    /// Metric values in insertion order.
    pub metrics: Vec<(String, f64)>,
    pub params: BTreeMap<String, String>,
    pub notes: Vec<String>,
}

impl EvalReport {
    pub fn new(task: &str, dim: usize, seed: u64) -> Self {
        EvalReport {
            task: task.to_string(),
            dim,
            alpha: None,
            seed,
            fraction: None,
            metrics: Vec::new(),
            params: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn push_metric(&mut self, name: &str, value: f64) {
        self.metrics.push((name.to_string(), value));
    }

    pub fn set_param(&mut self, key: &str, value: impl fmt::Display) {
        self.params.insert(key.to_string(), value.to_string());
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }

    /// One results-file line per metric, without a trailing newline.
    pub fn csv_rows(&self) -> Vec<String> {
        self.metrics
            .iter()
            .map(|(name, value)| {
                format!(
                    "{},{},{},{},{},{},,{}",
                    self.task,
                    self.dim,
                    opt(self.alpha),
                    self.seed,
                    name,
                    value,
                    opt(self.fraction)
                )
            })
            .collect()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl fmt::Display for EvalReport {
    /// Flat `key=value` block; parameters come sorted by key.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "task={}", self.task)?;
        writeln!(f, "dim={}", self.dim)?;
        writeln!(f, "alpha={}", opt(self.alpha))?;
        writeln!(f, "seed={}", self.seed)?;
        writeln!(f, "fraction={}", opt(self.fraction))?;
        for (name, value) in &self.metrics {
            writeln!(f, "{name}={value}")?;
        }
        for (key, value) in &self.params {
            writeln!(f, "param.{key}={value}")?;
        }
        for note in &self.notes {
            writeln!(f, "note={note}")?;
        }
        Ok(())
    }
}

/// Mean and sample standard deviation per (task, dim, alpha, fraction,
/// metric) group, as results-file lines with seed `aggregate`.
///
/// Groups keep the order of their first appearance. The deviation column is
/// empty for singleton groups.
pub fn aggregate_rows(reports: &[EvalReport]) -> Vec<String> {
    type Key = (String, usize, String, String, String);
    let mut order: Vec<Key> = Vec::new();
    let mut groups: BTreeMap<Key, Vec<f64>> = BTreeMap::new();
    for r in reports {
        for (name, value) in &r.metrics {
            let key = (r.task.clone(), r.dim, opt(r.alpha), opt(r.fraction), name.clone());
            let entry = groups.entry(key.clone()).or_default();
            if entry.is_empty() {
                order.push(key);
            }
            entry.push(*value);
        }
    }
    order
        .into_iter()
        .map(|key| {
            let values = &groups[&key];
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let std = if values.len() < 2 {
                String::new()
            } else {
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
                var.sqrt().to_string()
            };
            let (task, dim, alpha, fraction, metric) = key;
            format!("{task},{dim},{alpha},aggregate,{metric},{mean},{std},{fraction}")
        })
        .collect()
}

/// Reconstruction AUROC: edges are positives, every other unordered pair a
/// negative, hyperbolic distance the score.
///
/// Above `full_pair_threshold` nodes the negatives are `10 * |E|` distinct
/// uniform non-edges drawn with `seed`, and the report says so.
pub fn reconstruction_eval(
    emb: &HyperboloidEmbedding,
    graph: &AttributedGraph,
    full_pair_threshold: usize,
    seed: u64,
) -> Result<EvalReport> {
    let n = graph.num_nodes();
    if emb.num_nodes() != n {
        return Err(Error::LengthMismatch {
            left: emb.num_nodes(),
            right: n,
        });
    }
    let positives: Vec<f64> = graph.edges().iter().map(|&(u, v, _)| emb.distance(u, v)).collect();
    let mut counter = AurocCounter::new(&positives)?;
    let subsampled = n > full_pair_threshold;
    if subsampled {
        let total_non_edges = n * (n - 1) / 2 - graph.num_edges();
        let wanted = (SUBSAMPLED_NEGATIVES_PER_EDGE * graph.num_edges()).min(total_non_edges);
        let mut rng = seed::rng(seed, Stream::Evaluation, 0, 0);
        let mut seen = HashSet::with_capacity(wanted);
        while seen.len() < wanted {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a == b {
                continue;
            }
            let pair = (a.min(b), a.max(b));
            if !graph.has_edge(pair.0, pair.1) && seen.insert(pair) {
                counter.add_negative(emb.distance(pair.0, pair.1))?;
            }
        }
    } else {
        let total = (0..n)
            .into_par_iter()
            .try_fold(
                || counter.empty_like(),
                |mut c, u| {
                    for v in u + 1..n {
                        if !graph.has_edge(u, v) {
                            c.add_negative(emb.distance(u, v))?;
                        }
                    }
                    Ok::<_, Error>(c)
                },
            )
            .try_reduce(
                || counter.empty_like(),
                |mut a, b| {
                    a.merge(&b);
                    Ok(a)
                },
            )?;
        counter.merge(&total);
    }
    let mut report = EvalReport::new("reconstruction", emb.dim(), seed);
    report.push_metric("auroc", counter.finish()?);
    report.set_param("positives", positives.len());
    report.set_param("negatives", counter.num_negatives());
    report.set_param("subsampled", subsampled);
    if subsampled {
        report.notes.push(format!(
            "negatives subsampled to {} non-edges because N = {n} exceeds {full_pair_threshold}",
            counter.num_negatives()
        ));
    }
    Ok(report)
}

/// Link-prediction AUROC of held-out edges against the sampled non-edges.
pub fn link_prediction_eval(emb: &HyperboloidEmbedding, split: &EdgeSplit) -> Result<EvalReport> {
    let score = |&(u, v): &(usize, usize)| emb.distance(u, v);
    let positives: Vec<f64> = split.held_out_edges.iter().map(score).collect();
    let negatives: Vec<f64> = split.sampled_non_edges.iter().map(score).collect();
    let value = auroc(&positives, &negatives)?;
    let mut touched = vec![false; emb.num_nodes()];
    for &(u, v) in &split.train_edges {
        touched[u] = true;
        touched[v] = true;
    }
    let isolated = touched.iter().filter(|&&t| !t).count();
    let mut report = EvalReport::new("lp", emb.dim(), split.seed);
    report.push_metric("auroc", value);
    report.set_param("held_out", positives.len());
    report.set_param("non_edges", negatives.len());
    report.set_param("train_edges", split.train_edges.len());
    report.set_param("isolated_train_nodes", isolated);
    if isolated > 0 {
        report.notes.push(format!("{isolated} nodes have no training edge"));
    }
    Ok(report)
}
