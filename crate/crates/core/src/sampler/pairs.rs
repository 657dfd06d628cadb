use crate::error::{Error, Result};

/// The multiset `D` of source-context pairs plus per-node occurrence counts.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCorpus {
    num_nodes: usize,
    pairs: Vec<(u32, u32)>,
    occurrence_counts: Vec<u64>,
    noise_weights: Vec<f64>,
    /// Distinct contexts of each source, sorted, for `Γ(u)` membership.
    contexts: Vec<Vec<u32>>,
}

/// Slides a window of `context_size` over every walk; each in-window pair
/// enters the corpus in both orientations, self-pairs are skipped.
pub fn extract_pairs(walks: &[Vec<usize>], context_size: usize, num_nodes: usize) -> Result<PairCorpus> {
    if context_size == 0 {
        return Err(Error::InvalidConfig("context size must be positive".into()));
    }
    if walks.is_empty() {
        return Err(Error::InvalidConfig(
            "cannot extract pairs from an empty walk set".into(),
        ));
    }
    if num_nodes > u32::MAX as usize {
        return Err(Error::InvalidConfig(format!(
            "{num_nodes} nodes exceed the u32 index range"
        )));
    }
    let mut counts = vec![0u64; num_nodes];
    let mut pairs = Vec::new();
    for walk in walks {
        for (i, &u) in walk.iter().enumerate() {
            if u >= num_nodes {
                return Err(Error::InvalidConfig(format!(
                    "walk visits node {u} outside 0..{num_nodes}"
                )));
            }
            counts[u] += 1;
            for &v in walk.iter().skip(i + 1).take(context_size) {
                if u != v {
                    pairs.push((u as u32, v as u32));
                    pairs.push((v as u32, u as u32));
                }
            }
        }
    }
    PairCorpus::from_parts(num_nodes, pairs, counts)
}

impl PairCorpus {
    /// Assembles a corpus from explicit pairs and occurrence counts.
    pub fn from_parts(num_nodes: usize, pairs: Vec<(u32, u32)>, occurrence_counts: Vec<u64>) -> Result<Self> {
        if occurrence_counts.len() != num_nodes {
            return Err(Error::LengthMismatch {
                left: num_nodes,
                right: occurrence_counts.len(),
            });
        }
        let mut contexts: Vec<Vec<u32>> = vec![Vec::new(); num_nodes];
        for &(u, v) in &pairs {
            if u as usize >= num_nodes || v as usize >= num_nodes {
                return Err(Error::InvalidConfig(format!("pair ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidConfig(format!("self-pair ({u}, {u}) in corpus")));
            }
            contexts[u as usize].push(v);
        }
        for c in &mut contexts {
            c.sort_unstable();
            c.dedup();
        }
        let noise_weights = occurrence_counts.iter().map(|&c| (c as f64).powf(0.75)).collect();
        Ok(PairCorpus {
            num_nodes,
            pairs,
            occurrence_counts,
            noise_weights,
            contexts,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn occurrence_counts(&self) -> &[u64] {
        &self.occurrence_counts
    }

    /// `count^(3/4)` per node.
    pub fn noise_weights(&self) -> &[f64] {
        &self.noise_weights
    }

    /// Whether `(u, v)` occurs in `D`.
    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.contexts[u].binary_search(&(v as u32)).is_ok()
    }

    /// Distinct contexts of `u`.
    pub fn contexts_of(&self, u: usize) -> &[u32] {
        &self.contexts[u]
    }

    /// Shannon entropy (nats) of the node-occurrence distribution.
    pub fn occurrence_entropy(&self) -> f64 {
        let total: u64 = self.occurrence_counts.iter().sum();
        if total == 0 {
            return 0.0;
        }
        let total = total as f64;
        self.occurrence_counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / total;
                -p * p.ln()
            })
            .sum()
    }
}
