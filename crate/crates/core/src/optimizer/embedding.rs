use std::io::{BufRead, Write};

use rand::Rng;

use crate::error::{Error, Result, Source};
use crate::geometry::{self, constraint_residual, HyperboloidPoint};
use crate::seed::{self, Stream};

/// Spatial coordinates start uniform in `[-INIT_RANGE, INIT_RANGE]`.
pub const INIT_RANGE: f64 = 1e-3;

/// One hyperboloid point per node, index-aligned with the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperboloidEmbedding {
    points: Vec<HyperboloidPoint>,
    sigma: f64,
}

impl HyperboloidEmbedding {
    pub fn new(points: Vec<HyperboloidPoint>, sigma: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidConfig("embedding needs at least one point".into()));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidConfig(format!("sigma must be positive, got {sigma}")));
        }
        let dim = points[0].dim();
        if dim < 2 {
            return Err(Error::InvalidConfig(format!("dimension must be at least 2, got {dim}")));
        }
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::LengthMismatch {
                left: dim + 1,
                right: p.dim() + 1,
            });
        }
        Ok(HyperboloidEmbedding { points, sigma })
    }

    pub fn num_nodes(&self) -> usize {
        self.points.len()
    }

    /// Hyperbolic dimension `n`; coordinates have `n + 1` entries.
    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn with_sigma(mut self, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidConfig(format!("sigma must be positive, got {sigma}")));
        }
        self.sigma = sigma;
        Ok(self)
    }

    pub fn point(&self, u: usize) -> &HyperboloidPoint {
        &self.points[u]
    }

    pub fn points(&self) -> &[HyperboloidPoint] {
        &self.points
    }

    pub(crate) fn set_point(&mut self, u: usize, p: HyperboloidPoint) {
        self.points[u] = p;
    }

    pub fn coords(&self, u: usize) -> &[f64] {
        self.points[u].coords()
    }

    pub fn distance(&self, u: usize, v: usize) -> f64 {
        geometry::distance(&self.points[u], &self.points[v])
    }

    /// Largest [`constraint_residual`] over all points.
    pub fn max_constraint_residual(&self) -> f64 {
        self.points
            .iter()
            .map(|p| constraint_residual(p.coords()))
            .fold(0.0, f64::max)
    }
}

/// Random points near the origin: spatial coordinates i.i.d. uniform in
/// `[-INIT_RANGE, INIT_RANGE]`, time coordinate from the constraint.
pub fn init_embedding(num_nodes: usize, dim: usize, sigma: f64, seed: u64) -> Result<HyperboloidEmbedding> {
    if num_nodes == 0 {
        return Err(Error::InvalidConfig("embedding needs at least one node".into()));
    }
    if dim < 2 {
        return Err(Error::InvalidConfig(format!("dimension must be at least 2, got {dim}")));
    }
    let mut rng = seed::rng(seed, Stream::Init, 0, 0);
    let mut spatial = vec![0.0; dim];
    let points = (0..num_nodes)
        .map(|_| {
            spatial
                .iter_mut()
                .for_each(|c| *c = rng.gen_range(-INIT_RANGE..=INIT_RANGE));
            HyperboloidPoint::from_spatial(&spatial)
        })
        .collect::<Result<Vec<_>>>()?;
    HyperboloidEmbedding::new(points, sigma)
}

/// Writes `id,x0,...,xn` with 17 significant digits per coordinate.
pub fn write_embedding_csv(out: &mut dyn Write, ids: &[String], emb: &HyperboloidEmbedding) -> std::io::Result<()> {
    write!(out, "id")?;
    for k in 0..=emb.dim() {
        write!(out, ",x{k}")?;
    }
    writeln!(out)?;
    for (id, p) in ids.iter().zip(emb.points()) {
        write!(out, "{id}")?;
        for c in p.coords() {
            write!(out, ",{c:.16e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Parses an embedding file; rows must satisfy the constraint within `tol`.
pub fn read_embedding_csv(
    reader: &mut dyn BufRead,
    sigma: f64,
    tol: f64,
) -> Result<(Vec<String>, HyperboloidEmbedding)> {
    let mut ids = Vec::new();
    let mut points = Vec::new();
    let mut width = None;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::parse(Source::Embedding, line_no, e.to_string()))?;
        let line = if line_no == 1 {
            line.trim_start_matches('\u{feff}').to_string()
        } else {
            line
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let Some(w) = width else {
            if fields.first() != Some(&"id") || fields.len() < 4 {
                return Err(Error::parse(
                    Source::Embedding,
                    line_no,
                    "expected header `id,x0,x1,...,xn` with n >= 2",
                ));
            }
            width = Some(fields.len());
            continue;
        };
        if fields.len() != w {
            return Err(Error::parse(
                Source::Embedding,
                line_no,
                format!("expected {w} fields, found {}", fields.len()),
            ));
        }
        let coords = fields[1..]
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::parse(Source::Embedding, line_no, format!("invalid number `{f}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let point = HyperboloidPoint::try_from_coords(coords, tol)
            .map_err(|e| Error::parse(Source::Embedding, line_no, format!("row `{}`: {e}", fields[0])))?;
        ids.push(fields[0].to_string());
        points.push(point);
    }
    if width.is_none() {
        return Err(Error::parse(Source::Embedding, 1, "empty embedding file"));
    }
    Ok((ids, HyperboloidEmbedding::new(points, sigma)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_is_on_manifold_and_deterministic() {
        let a = init_embedding(50, 4, 1.0, 11).unwrap();
        assert!(a.max_constraint_residual() <= 1e-12);
        assert_eq!(a, init_embedding(50, 4, 1.0, 11).unwrap());
        assert_ne!(a, init_embedding(50, 4, 1.0, 12).unwrap());
        for p in a.points() {
            assert!(p.spatial().iter().all(|c| c.abs() <= INIT_RANGE));
        }
    }

    #[test]
    fn single_node_near_origin() {
        let e = init_embedding(1, 3, 1.0, 0).unwrap();
        let o = HyperboloidPoint::origin(3);
        for (a, b) in e.coords(0).iter().zip(o.coords()) {
            assert!((a - b).abs() <= INIT_RANGE);
        }
    }

    #[test]
    fn init_rejects_bad_shape() {
        assert!(init_embedding(0, 3, 1.0, 0).is_err());
        assert!(init_embedding(3, 1, 1.0, 0).is_err());
        assert!(init_embedding(3, 3, 0.0, 0).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let e = init_embedding(5, 3, 1.0, 2).unwrap();
        let ids: Vec<String> = (0..5).map(|i| format!("n{i}")).collect();
        let mut buf = Vec::new();
        write_embedding_csv(&mut buf, &ids, &e).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("id,x0,x1,x2,x3\n"));
        let (ids2, e2) = read_embedding_csv(&mut text.as_bytes(), 1.0, 1e-9).unwrap();
        assert_eq!(ids2, ids);
        assert_eq!(e2, e);
    }

    #[test]
    fn csv_rejects_off_manifold_row() {
        let text = "id,x0,x1,x2\na,1,0,0\nb,1,1,0\n";
        let err = read_embedding_csv(&mut text.as_bytes(), 1.0, 1e-6).unwrap_err();
        assert!(err.to_string().contains("row `b`"), "{err}");
    }
}
