use rand::Rng;

use super::{AttributedGraph, CsrMatrix, DenseMatrix, Similarity};
use crate::error::{Error, Result};

/// Index `i` with `cum[i-1] <= r < cum[i]` for `r` uniform in `[0, cum.last())`.
///
/// Entries with zero mass repeat the previous cumulative value and are never
/// selected.
#[inline]
pub(crate) fn sample_cumulative<R: Rng + ?Sized>(cum: &[f64], rng: &mut R) -> usize {
    let total = *cum.last().expect("sample_cumulative on empty row");
    let r = rng.gen::<f64>() * total;
    cum.partition_point(|&c| c <= r).min(cum.len() - 1)
}

fn cumulative(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

/// Row-normalized attribute similarity `Ȳ`.
#[derive(Debug, Clone)]
pub enum AttributeTransitions {
    /// Cumulative normalized rows; an all-zero row means no teleport target.
    Dense(DenseMatrix),
    /// Rows of `Y` are recomputed per step and normalized by the stored sums.
    Streaming { similarity: Similarity, row_sums: Vec<f64> },
}

impl AttributeTransitions {
    fn from_similarity(y: &Similarity) -> Self {
        let n = y.num_nodes();
        match y {
            Similarity::Dense(_) => {
                let mut cum = DenseMatrix::zeros(n, n);
                let mut row = vec![0.0; n];
                for u in 0..n {
                    y.row_into(u, &mut row);
                    let sum: f64 = row.iter().sum();
                    if sum > 0.0 {
                        let out = cum.row_mut(u);
                        let mut acc = 0.0;
                        for (slot, v) in out.iter_mut().zip(&row) {
                            acc += v / sum;
                            *slot = acc;
                        }
                    }
                }
                AttributeTransitions::Dense(cum)
            }
            Similarity::Streaming(_) => {
                let mut row = vec![0.0; n];
                let row_sums = (0..n)
                    .map(|u| {
                        y.row_into(u, &mut row);
                        row.iter().sum()
                    })
                    .collect();
                AttributeTransitions::Streaming {
                    similarity: y.clone(),
                    row_sums,
                }
            }
        }
    }

    pub fn num_nodes(&self) -> usize {
        match self {
            AttributeTransitions::Dense(cum) => cum.rows(),
            AttributeTransitions::Streaming { row_sums, .. } => row_sums.len(),
        }
    }

    pub fn is_zero_row(&self, u: usize) -> bool {
        match self {
            AttributeTransitions::Dense(cum) => cum.row(u).last().is_none_or(|&t| t <= 0.0),
            AttributeTransitions::Streaming { row_sums, .. } => row_sums[u] <= 0.0,
        }
    }

    /// Row `u` of `Ȳ` as probabilities.
    pub fn row(&self, u: usize) -> Vec<f64> {
        match self {
            AttributeTransitions::Dense(cum) => {
                let c = cum.row(u);
                let mut prev = 0.0;
                c.iter()
                    .map(|&v| {
                        let p = v - prev;
                        prev = v;
                        p
                    })
                    .collect()
            }
            AttributeTransitions::Streaming { similarity, row_sums } => {
                let mut row = similarity.row(u);
                if row_sums[u] > 0.0 {
                    row.iter_mut().for_each(|v| *v /= row_sums[u]);
                }
                row
            }
        }
    }

    /// Draws a teleport target from row `u`; `None` for a zero row.
    pub fn sample<R: Rng + ?Sized>(&self, u: usize, rng: &mut R) -> Option<usize> {
        if self.is_zero_row(u) {
            return None;
        }
        match self {
            AttributeTransitions::Dense(cum) => Some(sample_cumulative(cum.row(u), rng)),
            AttributeTransitions::Streaming { similarity, .. } => {
                let row = similarity.row(u);
                Some(sample_cumulative(&cumulative(&row), rng))
            }
        }
    }
}

/// Row-stochastic step tables: topological `W̄` and attribute `Ȳ`.
#[derive(Debug, Clone)]
pub struct TransitionTables {
    topo: CsrMatrix,
    topo_cum: Vec<f64>,
    attr: Option<AttributeTransitions>,
}

/// Row-normalizes `W` and, when given, `Y`. Zero rows stay zero.
pub fn build_transition_tables(graph: &AttributedGraph, similarity: Option<&Similarity>) -> Result<TransitionTables> {
    if let Some(y) = similarity {
        if y.num_nodes() != graph.num_nodes() {
            return Err(Error::LengthMismatch {
                left: graph.num_nodes(),
                right: y.num_nodes(),
            });
        }
    }
    Ok(TransitionTables::new(
        graph.adjacency().row_normalized(),
        similarity.map(AttributeTransitions::from_similarity),
    ))
}

impl TransitionTables {
    fn new(topo: CsrMatrix, attr: Option<AttributeTransitions>) -> Self {
        let mut topo_cum = Vec::with_capacity(topo.nnz());
        for u in 0..topo.n_rows() {
            topo_cum.extend(cumulative(topo.row(u).1));
        }
        TransitionTables { topo, topo_cum, attr }
    }

    /// Builds tables from explicit nonnegative rows (normalized here).
    pub fn from_rows(topo: &[Vec<f64>], attr: Option<&[Vec<f64>]>) -> Result<Self> {
        let n = topo.len();
        let mut triplets = Vec::new();
        for (u, row) in topo.iter().enumerate() {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: row.len(),
                });
            }
            for (v, &w) in row.iter().enumerate() {
                if !(w >= 0.0) || !w.is_finite() {
                    return Err(Error::InvalidConfig(format!("invalid transition weight {w}")));
                }
                if w > 0.0 {
                    triplets.push((u, v, w));
                }
            }
        }
        let topo = CsrMatrix::from_triplets(n, n, triplets).row_normalized();
        let attr = match attr {
            None => None,
            Some(rows) => {
                if rows.len() != n {
                    return Err(Error::LengthMismatch {
                        left: n,
                        right: rows.len(),
                    });
                }
                let y = DenseMatrix::from_rows(rows.to_vec())?;
                if y.cols() != n || y.data.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
                    return Err(Error::InvalidConfig(
                        "attribute rows must be N x N and nonnegative".into(),
                    ));
                }
                Some(AttributeTransitions::from_similarity(&Similarity::Dense(y)))
            }
        };
        Ok(Self::new(topo, attr))
    }

    pub fn num_nodes(&self) -> usize {
        self.topo.n_rows()
    }

    pub fn topo(&self) -> &CsrMatrix {
        &self.topo
    }

    pub fn attr(&self) -> Option<&AttributeTransitions> {
        self.attr.as_ref()
    }

    pub fn has_attributes(&self) -> bool {
        self.attr.is_some()
    }

    pub fn topo_is_zero_row(&self, u: usize) -> bool {
        self.topo.row(u).0.is_empty()
    }

    pub fn attr_is_zero_row(&self, u: usize) -> bool {
        self.attr.as_ref().is_none_or(|a| a.is_zero_row(u))
    }

    /// Draws a topological step from `u`; `None` for a zero row.
    pub fn sample_topo<R: Rng + ?Sized>(&self, u: usize, rng: &mut R) -> Option<usize> {
        let (cols, _) = self.topo.row(u);
        if cols.is_empty() {
            return None;
        }
        let cum = &self.topo_cum[self.topo.row_range(u)];
        Some(cols[sample_cumulative(cum, rng)])
    }

    /// Draws an attribute teleport from `u`; `None` for a zero row or no attributes.
    pub fn sample_attr<R: Rng + ?Sized>(&self, u: usize, rng: &mut R) -> Option<usize> {
        self.attr.as_ref().and_then(|a| a.sample(u, rng))
    }
}
