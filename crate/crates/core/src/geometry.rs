//! Hyperboloid-model primitives.
//!
//! Points live on the upper sheet of `<x, x> = -1` in Minkowski space
//! `R^{n:1}`; index 0 is the time coordinate. Curvature is fixed at -1.

use crate::error::{Error, Result};

/// Largest tangent-step norm handed to the exponential map during training.
pub const MAX_TANGENT_STEP: f64 = 1.0;

/// Tangent vectors shorter than this map to their base point.
pub const EXP_MAP_EPS: f64 = 1e-12;

/// Minkowski bilinear form `-x0*y0 + sum_k xk*yk`.
pub fn minkowski_inner(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "Minkowski vectors need at least 2 coordinates, got {}",
            x.len()
        )));
    }
    Ok(minkowski_dot(x, y))
}

/// Unchecked form of [`minkowski_inner`] for the hot loops.
#[inline]
pub fn minkowski_dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let spatial: f64 = x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum();
    spatial - x[0] * y[0]
}

/// Geodesic distance `arccosh(-<x, y>)` on raw coordinates, argument clamped to >= 1.
#[inline]
pub fn distance_coords(x: &[f64], y: &[f64]) -> f64 {
    (-minkowski_dot(x, y)).max(1.0).acosh()
}

/// Deviation from the hyperboloid constraint, scaled by the magnitude of the
/// cancelled terms: `|<x, x> + 1| / max(1, x0^2)`.
///
/// Far from the origin `x0^2` and `sum xk^2` are both large and their
/// difference carries an absolute rounding error proportional to `x0^2`; the
/// scaling makes the residual comparable across the whole manifold.
pub fn constraint_residual(x: &[f64]) -> f64 {
    (minkowski_dot(x, x) + 1.0).abs() / (x[0] * x[0]).max(1.0)
}

/// A point on the hyperboloid, `<x, x> = -1`, `x0 >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperboloidPoint(Vec<f64>);

impl HyperboloidPoint {
    /// The base point `(1, 0, ..., 0)` of `H^n`.
    pub fn origin(n: usize) -> Self {
        let mut coords = vec![0.0; n + 1];
        coords[0] = 1.0;
        HyperboloidPoint(coords)
    }

    /// Lifts spatial coordinates onto the hyperboloid.
    pub fn from_spatial(spatial: &[f64]) -> Result<Self> {
        let mut coords = Vec::with_capacity(spatial.len() + 1);
        coords.push(0.0);
        coords.extend_from_slice(spatial);
        reproject(&coords)
    }

    /// Accepts full coordinates if they satisfy the constraint within `tol`
    /// (measured by [`constraint_residual`]).
    pub fn try_from_coords(coords: Vec<f64>, tol: f64) -> Result<Self> {
        if coords.len() < 3 {
            return Err(Error::InvalidConfig(format!(
                "hyperboloid points need dimension n >= 2, got {} coordinates",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("hyperboloid coordinates".into()));
        }
        let residual = constraint_residual(&coords);
        if coords[0] <= 0.0 || residual > tol {
            return Err(Error::InvalidConfig(format!(
                "point violates the hyperboloid constraint (residual {residual:.3e}, x0 = {})",
                coords[0]
            )));
        }
        Ok(HyperboloidPoint(coords))
    }

    /// Hyperbolic dimension `n` (one less than the number of coordinates).
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn time(&self) -> f64 {
        self.0[0]
    }

    pub fn spatial(&self) -> &[f64] {
        &self.0[1..]
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }
}

/// A vector in the tangent space at `base`.
#[derive(Debug, Clone)]
pub struct TangentVector<'a> {
    pub base: &'a HyperboloidPoint,
    pub direction: Vec<f64>,
}

impl TangentVector<'_> {
    /// Minkowski norm, real on the tangent space; negative rounding is clamped to 0.
    pub fn norm(&self) -> f64 {
        minkowski_dot(&self.direction, &self.direction).max(0.0).sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        self.direction.iter_mut().for_each(|c| *c *= factor);
    }

    /// Rescales to norm `max_norm` if longer.
    pub fn clip(&mut self, max_norm: f64) {
        let norm = self.norm();
        if norm > max_norm {
            self.scale(max_norm / norm);
        }
    }
}

pub fn distance(x: &HyperboloidPoint, y: &HyperboloidPoint) -> f64 {
    distance_coords(&x.0, &y.0)
}

/// Projects an ambient vector onto the tangent space at `x`: `g + <x, g> x`.
pub fn project_to_tangent<'a>(x: &'a HyperboloidPoint, g: &[f64]) -> TangentVector<'a> {
    let mut direction = g.to_vec();
    project_in_place(&x.0, &mut direction);
    TangentVector { base: x, direction }
}

#[inline]
pub(crate) fn project_in_place(x: &[f64], g: &mut [f64]) {
    let ip = minkowski_dot(x, g);
    g.iter_mut().zip(x).for_each(|(gi, xi)| *gi += ip * xi);
}

/// Exponential map `cosh(|v|) x + sinh(|v|) v / |v|`, followed by [`reproject`].
pub fn exp_map(v: &TangentVector<'_>) -> HyperboloidPoint {
    let norm = v.norm();
    if norm < EXP_MAP_EPS {
        return v.base.clone();
    }
    let (c, s) = (norm.cosh(), norm.sinh() / norm);
    let mut coords: Vec<f64> = v.base.0.iter().zip(&v.direction).map(|(x, d)| c * x + s * d).collect();
    set_time_coordinate(&mut coords);
    HyperboloidPoint(coords)
}

#[inline]
fn set_time_coordinate(coords: &mut [f64]) {
    let sq: f64 = coords[1..].iter().map(|c| c * c).sum();
    coords[0] = (1.0 + sq).sqrt();
}

/// Recomputes `x0 = sqrt(1 + sum xk^2)`, leaving the spatial part untouched.
pub fn reproject(x: &[f64]) -> Result<HyperboloidPoint> {
    if x.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "cannot reproject a vector with {} coordinates",
            x.len()
        )));
    }
    if x[1..].iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("spatial coordinates passed to reproject".into()));
    }
    let mut coords = x.to_vec();
    set_time_coordinate(&mut coords);
    Ok(HyperboloidPoint(coords))
}

/// Stereographic projection to the Poincaré ball: `x_spatial / (1 + x0)`.
pub fn to_poincare(x: &HyperboloidPoint) -> Vec<f64> {
    let d = 1.0 + x.time();
    x.spatial().iter().map(|c| c / d).collect()
}

/// Gnomonic projection to the Klein ball: `x_spatial / x0`.
pub fn to_klein(x: &HyperboloidPoint) -> Vec<f64> {
    let t = x.time();
    x.spatial().iter().map(|c| c / t).collect()
}

fn sq_norm(p: &[f64]) -> f64 {
    p.iter().map(|c| c * c).sum()
}

/// Inverse of [`to_poincare`]; `p` must lie strictly inside the unit ball.
pub fn lift_poincare(p: &[f64]) -> Result<HyperboloidPoint> {
    let r2 = sq_norm(p);
    if !(r2 < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "Poincaré point outside the unit ball (|p|^2 = {r2})"
        )));
    }
    let denom = 1.0 - r2;
    let mut coords = Vec::with_capacity(p.len() + 1);
    coords.push((1.0 + r2) / denom);
    coords.extend(p.iter().map(|c| 2.0 * c / denom));
    Ok(HyperboloidPoint(coords))
}

/// Inverse of [`to_klein`]; `k` must lie strictly inside the unit ball.
pub fn lift_klein(k: &[f64]) -> Result<HyperboloidPoint> {
    let r2 = sq_norm(k);
    if !(r2 < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "Klein point outside the unit ball (|k|^2 = {r2})"
        )));
    }
    let t = 1.0 / (1.0 - r2).sqrt();
    let mut coords = Vec::with_capacity(k.len() + 1);
    coords.push(t);
    coords.extend(k.iter().map(|c| c * t));
    Ok(HyperboloidPoint(coords))
}
