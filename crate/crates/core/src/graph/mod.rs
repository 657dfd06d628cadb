//! Attributed networks and the transition tables that drive the random walks.

mod io;
mod similarity;
mod sparse;
mod transition;

use std::collections::HashMap;

pub use io::{load_graph, load_graph_files, write_edge_list};
pub use similarity::{attribute_similarity, attribute_similarity_with_threshold, Similarity, DEFAULT_DENSE_THRESHOLD};
pub use sparse::CsrMatrix;
pub use transition::{build_transition_tables, AttributeTransitions, TransitionTables};

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                left: cols,
                right: bad.len(),
            });
        }
        let n = rows.len();
        Ok(DenseMatrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }
}

/// Node labels, single-label or multilabel.
#[derive(Debug, Clone, PartialEq)]
pub struct Labels {
    classes: Vec<String>,
    per_node: Vec<Vec<usize>>,
    multilabel: bool,
}

impl Labels {
    /// `per_node[u]` lists class indices into `classes`; an empty list means unlabelled.
    pub fn new(classes: Vec<String>, per_node: Vec<Vec<usize>>, multilabel: bool) -> Result<Self> {
        if let Some(bad) = per_node.iter().flatten().find(|&&c| c >= classes.len()) {
            return Err(Error::InvalidConfig(format!("label class index {bad} out of range")));
        }
        if !multilabel && per_node.iter().any(|l| l.len() > 1) {
            return Err(Error::InvalidConfig(
                "single-label set has a node with several labels".into(),
            ));
        }
        Ok(Labels {
            classes,
            per_node,
            multilabel,
        })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn of(&self, node: usize) -> &[usize] {
        &self.per_node[node]
    }

    pub fn is_multilabel(&self) -> bool {
        self.multilabel
    }

    pub fn len(&self) -> usize {
        self.per_node.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_node.is_empty()
    }
}

/// Counters collected while loading.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub self_loops_dropped: usize,
    pub duplicate_edges_merged: usize,
    pub zero_weight_edges_dropped: usize,
}

/// An undirected, weighted, optionally attributed and labelled network.
#[derive(Debug, Clone)]
pub struct AttributedGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize, f64)>,
    adjacency: CsrMatrix,
    attributes: Option<DenseMatrix>,
    labels: Option<Labels>,
    stats: LoadStats,
}

impl AttributedGraph {
    /// Builds a graph from external ids and weighted index pairs.
    ///
    /// Self-loops are dropped, `(u, v)` and `(v, u)` denote the same edge and
    /// repeated edges have their weights summed.
    pub fn new(ids: Vec<String>, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::InvalidConfig(format!("duplicate node id `{id}`")));
            }
        }
        let n = ids.len();
        let mut stats = LoadStats::default();
        let mut merged: HashMap<(usize, usize), f64> = HashMap::new();
        let mut order = Vec::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidConfig(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if !w.is_finite() {
                return Err(Error::NonFinite(format!("weight of edge ({u}, {v})")));
            }
            if w < 0.0 {
                return Err(Error::InvalidConfig(format!("negative weight on edge ({u}, {v})")));
            }
            if u == v {
                stats.self_loops_dropped += 1;
                continue;
            }
            if w == 0.0 {
                stats.zero_weight_edges_dropped += 1;
                continue;
            }
            let key = (u.min(v), u.max(v));
            match merged.get_mut(&key) {
                Some(total) => {
                    *total += w;
                    stats.duplicate_edges_merged += 1;
                }
                None => {
                    merged.insert(key, w);
                    order.push(key);
                }
            }
        }
        order.sort_unstable();
        let edges: Vec<(usize, usize, f64)> = order.into_iter().map(|k| (k.0, k.1, merged[&k])).collect();
        let adjacency = symmetric_adjacency(n, &edges);
        Ok(AttributedGraph {
            ids,
            index,
            edges,
            adjacency,
            attributes: None,
            labels: None,
            stats,
        })
    }

    /// Unweighted graph on nodes named `"0"..` `"n-1"`.
    pub fn from_edge_indices(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let ids = (0..n).map(|i| i.to_string()).collect();
        Self::new(ids, edges.iter().map(|&(u, v)| (u, v, 1.0)))
    }

    pub fn with_attributes(mut self, attributes: DenseMatrix) -> Result<Self> {
        if attributes.rows() != self.num_nodes() {
            return Err(Error::LengthMismatch {
                left: self.num_nodes(),
                right: attributes.rows(),
            });
        }
        if attributes.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("attribute matrix".into()));
        }
        self.attributes = Some(attributes);
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Labels) -> Result<Self> {
        if labels.len() != self.num_nodes() {
            return Err(Error::LengthMismatch {
                left: self.num_nodes(),
                right: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub(crate) fn with_stats(mut self, stats: LoadStats) -> Self {
        self.stats.self_loops_dropped += stats.self_loops_dropped;
        self.stats.duplicate_edges_merged += stats.duplicate_edges_merged;
        self.stats.zero_weight_edges_dropped += stats.zero_weight_edges_dropped;
        self
    }

    /// Same node data, keeping only `edges` (given as `u < v` index pairs
    /// present in this graph).
    pub fn restrict_edges(&self, edges: &[(usize, usize)]) -> Result<Self> {
        let mut kept = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            let w = self.weight(u, v);
            if w == 0.0 {
                return Err(Error::InvalidConfig(format!("({u}, {v}) is not an edge of the graph")));
            }
            kept.push((u, v, w));
        }
        let mut g = Self::new(self.ids.clone(), kept)?;
        g.attributes = self.attributes.clone();
        g.labels = self.labels.clone();
        Ok(g)
    }

    pub fn num_nodes(&self) -> usize {
        self.ids.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of attribute columns, 0 when absent.
    pub fn attribute_dim(&self) -> usize {
        self.attributes.as_ref().map_or(0, DenseMatrix::cols)
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, node: usize) -> &str {
        &self.ids[node]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Undirected edges, each once with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Symmetric weight matrix W.
    pub fn adjacency(&self) -> &CsrMatrix {
        &self.adjacency
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.adjacency.get(u, v)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.weight(u, v) > 0.0
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        self.adjacency.row(u).0
    }

    pub fn attributes(&self) -> Option<&DenseMatrix> {
        self.attributes.as_ref()
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    pub fn load_stats(&self) -> &LoadStats {
        &self.stats
    }
}

fn symmetric_adjacency(n: usize, edges: &[(usize, usize, f64)]) -> CsrMatrix {
    let triplets = edges.iter().flat_map(|&(u, v, w)| [(u, v, w), (v, u, w)]).collect();
    CsrMatrix::from_triplets(n, n, triplets)
}

/// Per-column standardization to mean 0 and population standard deviation 1.
///
/// Constant columns become all-zero.
pub fn standardize_attributes(graph: &AttributedGraph) -> Result<AttributedGraph> {
    let x = graph.attributes().ok_or(Error::NoAttributes)?;
    let (rows, cols) = (x.rows(), x.cols());
    let mut out = x.clone();
    for c in 0..cols {
        let col = x.column(c);
        let mean = col.iter().sum::<f64>() / rows as f64;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / rows as f64;
        let sd = var.sqrt();
        // relative cutoff so that columns equal up to rounding count as constant
        let constant = sd <= 1e-12 * mean.abs().max(1.0);
        for r in 0..rows {
            out.data[r * cols + c] = if constant { 0.0 } else { (col[r] - mean) / sd };
        }
    }
    let mut g = graph.clone();
    g.attributes = Some(out);
    Ok(g)
}
