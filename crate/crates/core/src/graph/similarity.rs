use rayon::prelude::*;

use super::{AttributedGraph, DenseMatrix};
use crate::error::{Error, Result};

/// Graphs up to this many nodes get a materialized similarity matrix.
pub const DEFAULT_DENSE_THRESHOLD: usize = 20_000;

/// Clamped cosine attribute similarity `Y`, zero on the diagonal.
#[derive(Debug, Clone)]
pub enum Similarity {
    /// Fully materialized `N x N` matrix.
    Dense(DenseMatrix),
    /// Rows are computed on demand from unit-normalized attribute vectors.
    Streaming(DenseMatrix),
}

fn unit_rows(x: &DenseMatrix) -> DenseMatrix {
    let mut unit = x.clone();
    for r in 0..unit.rows() {
        let row = unit.row_mut(r);
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.iter_mut().for_each(|v| *v /= norm);
        }
    }
    unit
}

#[inline]
fn clamped_cosine(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().clamp(0.0, 1.0)
}

fn similarity_row(unit: &DenseMatrix, u: usize, out: &mut [f64]) {
    let xu = unit.row(u);
    for (v, slot) in out.iter_mut().enumerate() {
        *slot = if v == u { 0.0 } else { clamped_cosine(xu, unit.row(v)) };
    }
}

pub fn attribute_similarity(graph: &AttributedGraph) -> Result<Similarity> {
    attribute_similarity_with_threshold(graph, DEFAULT_DENSE_THRESHOLD)
}

/// `Y_uv = max(cos(X_u, X_v), 0)` for `u != v`; materialized when the graph
/// has at most `dense_threshold` nodes.
pub fn attribute_similarity_with_threshold(graph: &AttributedGraph, dense_threshold: usize) -> Result<Similarity> {
    let x = graph.attributes().ok_or(Error::NoAttributes)?;
    let unit = unit_rows(x);
    let n = unit.rows();
    if n > dense_threshold {
        return Ok(Similarity::Streaming(unit));
    }
    let mut y = DenseMatrix::zeros(n, n);
    if n > 0 {
        y.data
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(u, row)| similarity_row(&unit, u, row));
    }
    Ok(Similarity::Dense(y))
}

impl Similarity {
    pub fn num_nodes(&self) -> usize {
        match self {
            Similarity::Dense(y) | Similarity::Streaming(y) => y.rows(),
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self, Similarity::Dense(_))
    }

    /// Writes row `u` of `Y` into `out` (length `N`).
    pub fn row_into(&self, u: usize, out: &mut [f64]) {
        match self {
            Similarity::Dense(y) => out.copy_from_slice(y.row(u)),
            Similarity::Streaming(unit) => similarity_row(unit, u, out),
        }
    }

    pub fn row(&self, u: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.num_nodes()];
        self.row_into(u, &mut out);
        out
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        match self {
            Similarity::Dense(y) => y.get(u, v),
            Similarity::Streaming(unit) => {
                if u == v {
                    0.0
                } else {
                    clamped_cosine(unit.row(u), unit.row(v))
                }
            }
        }
    }
}
