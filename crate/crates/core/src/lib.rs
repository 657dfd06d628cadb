//! Attributed network embedding in the hyperboloid model of hyperbolic space.
//!
//! The pipeline has four stages, each in its own module:
//!
//! - [`graph`]: loading, attribute similarity and transition tables.
//! - [`sampler`]: teleport random walks, context pairs and unigram^(3/4) negatives.
//! - [`optimizer`]: the distance softmax loss, minimized by Riemannian SGD.
//! - [`evaluation`]: AUROC tasks and node classification on Klein coordinates.
//!
//! [`geometry`] holds the hyperboloid primitives every stage shares.

pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod graph;
pub mod optimizer;
pub mod sampler;
pub mod seed;

pub use error::{Error, Result};
