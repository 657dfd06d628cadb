//! Hyperboloid embedding training.
//!
//! The loss is the mean negative log-likelihood of each context among its
//! negative samples, with logits `o_uv = -d(x_u, x_v)^2 / (2 sigma^2)`.
//! Updates follow the exact Riemannian recipe: ambient Minkowski gradient,
//! projection onto the tangent space, exponential map.

mod embedding;
mod loss;
mod train;

pub use embedding::{init_embedding, read_embedding_csv, write_embedding_csv, HyperboloidEmbedding, INIT_RANGE};
pub use loss::{
    accumulate_gradients, ambient_gradient, batch_loss, gradient_factor, pair_score, sample_loss,
    softmax_probabilities, GradientBuffer, Sample,
};
pub use train::{train, TrainConfig, TrainOutcome, TrainStats};
