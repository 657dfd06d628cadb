use super::HyperboloidEmbedding;
use crate::geometry::minkowski_dot;

/// A source node with its candidate set `S_m(u, v)`: negatives first, the
/// context node last.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub source: usize,
    pub candidates: Vec<usize>,
}

impl Sample {
    pub fn context(&self) -> usize {
        *self.candidates.last().expect("sample without candidates")
    }
}

/// `o_uv = -arccosh(-<x_u, x_v>)^2 / (2 sigma^2)`.
pub fn pair_score(emb: &HyperboloidEmbedding, u: usize, v: usize) -> f64 {
    let d = emb.distance(u, v);
    -d * d / (2.0 * emb.sigma() * emb.sigma())
}

/// Softmax of the scores of `candidates` against `u`.
pub fn softmax_probabilities(emb: &HyperboloidEmbedding, u: usize, candidates: &[usize]) -> Vec<f64> {
    let mut scores: Vec<f64> = candidates.iter().map(|&v| pair_score(emb, u, v)).collect();
    softmax_in_place(&mut scores);
    scores
}

/// Replaces logits by probabilities; returns `log sum exp` of the input.
fn softmax_in_place(logits: &mut [f64]) -> f64 {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for l in logits.iter_mut() {
        *l = (*l - max).exp();
        sum += *l;
    }
    logits.iter_mut().for_each(|p| *p /= sum);
    max + sum.ln()
}

/// `-log softmax(context)` for one sample.
pub fn sample_loss(emb: &HyperboloidEmbedding, sample: &Sample) -> f64 {
    let scores: Vec<f64> = sample
        .candidates
        .iter()
        .map(|&v| pair_score(emb, sample.source, v))
        .collect();
    let mut probs = scores.clone();
    let lse = softmax_in_place(&mut probs);
    (lse - scores[scores.len() - 1]).max(0.0)
}

/// Mean of [`sample_loss`] over the batch; 0 for an empty batch.
pub fn batch_loss(emb: &HyperboloidEmbedding, batch: &[Sample]) -> f64 {
    if batch.is_empty() {
        return 0.0;
    }
    batch.iter().map(|s| sample_loss(emb, s)).sum::<f64>() / batch.len() as f64
}

/// Prefactor of `∇ o_uv = factor * x_v`: `arccosh(z) / (sigma^2 sqrt(z^2 - 1))`
/// with `z = -<x_u, x_v>`. Near `z = 1` the ratio tends to 1.
#[inline]
pub fn gradient_factor(z: f64, sigma: f64) -> f64 {
    let s2 = sigma * sigma;
    let e = z - 1.0;
    if e < 1e-10 {
        // arccosh(z) / sqrt(z^2 - 1) = 1 - e/3 + O(e^2)
        return (1.0 - e.max(0.0) / 3.0) / s2;
    }
    z.acosh() / (s2 * (z * z - 1.0).sqrt())
}

/// Per-node ambient gradient accumulator.
#[derive(Debug, Clone)]
pub struct GradientBuffer {
    width: usize,
    grads: Vec<f64>,
    touched: Vec<usize>,
    mark: Vec<bool>,
    // scratch, reused across samples
    z: Vec<f64>,
    probs: Vec<f64>,
}

impl GradientBuffer {
    pub fn new(num_nodes: usize, dim: usize) -> Self {
        let width = dim + 1;
        GradientBuffer {
            width,
            grads: vec![0.0; num_nodes * width],
            touched: Vec::new(),
            mark: vec![false; num_nodes],
            z: Vec::new(),
            probs: Vec::new(),
        }
    }

    pub fn clear(&mut self) {
        for &u in &self.touched {
            self.grads[u * self.width..(u + 1) * self.width].fill(0.0);
            self.mark[u] = false;
        }
        self.touched.clear();
    }

    /// Nodes with a gradient entry, sorted ascending.
    pub fn touched(&mut self) -> &[usize] {
        self.touched.sort_unstable();
        &self.touched
    }

    pub fn gradient(&self, u: usize) -> &[f64] {
        &self.grads[u * self.width..(u + 1) * self.width]
    }

    #[inline]
    fn add(&mut self, u: usize, coeff: f64, direction: &[f64]) {
        if !self.mark[u] {
            self.mark[u] = true;
            self.touched.push(u);
        }
        let g = &mut self.grads[u * self.width..(u + 1) * self.width];
        g.iter_mut().zip(direction).for_each(|(gi, d)| *gi += coeff * d);
    }
}

/// Adds `scale * ∇ loss` for every sample into `buf`, using Minkowski
/// gradients (time component already sign-flipped).
///
/// The source of each sample receives `sum_i (P_i - δ_i) f_i x_{c_i}`. With
/// `update_negatives`, every negative slot `c_i` also receives its own term
/// `P_i f_i x_u`; the context slot gets nothing here because the reversed pair
/// is in the corpus. Returns the summed (unscaled) sample losses.
pub fn accumulate_gradients(
    emb: &HyperboloidEmbedding,
    batch: &[Sample],
    scale: f64,
    update_negatives: bool,
    buf: &mut GradientBuffer,
) -> f64 {
    let sigma = emb.sigma();
    let two_s2 = 2.0 * sigma * sigma;
    let mut total = 0.0;
    let mut z = std::mem::take(&mut buf.z);
    let mut probs = std::mem::take(&mut buf.probs);
    for sample in batch {
        let xu = emb.coords(sample.source);
        let k = sample.candidates.len();
        z.clear();
        probs.clear();
        for &c in &sample.candidates {
            let zc = -minkowski_dot(xu, emb.coords(c));
            let d = zc.max(1.0).acosh();
            z.push(zc);
            probs.push(-d * d / two_s2);
        }
        let context_logit = probs[k - 1];
        let lse = softmax_in_place(&mut probs);
        total += lse - context_logit;
        for (i, &c) in sample.candidates.iter().enumerate() {
            let f = gradient_factor(z[i], sigma);
            let is_context = i == k - 1;
            let weight = probs[i] - if is_context { 1.0 } else { 0.0 };
            buf.add(sample.source, scale * weight * f, emb.coords(c));
            if update_negatives && !is_context {
                buf.add(c, scale * probs[i] * f, xu);
            }
        }
    }
    buf.z = z;
    buf.probs = probs;
    total
}

/// Minkowski gradient of [`batch_loss`] for node `u` as accumulated during
/// training (source role, plus negative role when `update_negatives`).
pub fn ambient_gradient(emb: &HyperboloidEmbedding, u: usize, batch: &[Sample], update_negatives: bool) -> Vec<f64> {
    let width = emb.dim() + 1;
    if batch.is_empty() {
        return vec![0.0; width];
    }
    let mut buf = GradientBuffer::new(emb.num_nodes(), emb.dim());
    accumulate_gradients(emb, batch, 1.0 / batch.len() as f64, update_negatives, &mut buf);
    buf.gradient(u).to_vec()
}
