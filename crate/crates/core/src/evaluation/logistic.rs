use crate::error::{Error, Result};
use crate::graph::DenseMatrix;

/// Full-batch gradient descent settings for [`logistic_regression_fit`].
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticConfig {
    /// L2 penalty on the weights (the intercept is not penalized).
    pub lambda: f64,
    pub iterations: usize,
    pub step: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            lambda: 1e-4,
            iterations: 500,
            step: 0.1,
        }
    }
}

/// One binary logistic model per target column.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    /// `weights[c]` holds the feature weights followed by the intercept.
    pub weights: Vec<Vec<f64>>,
}

#[inline]
fn linear(w: &[f64], x: &[f64]) -> f64 {
    let (coef, bias) = w.split_at(x.len());
    coef.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + bias[0]
}

#[inline]
fn sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

#[inline]
fn softplus(s: f64) -> f64 {
    if s > 0.0 {
        s + (-s).exp().ln_1p()
    } else {
        s.exp().ln_1p()
    }
}

/// Mean log-loss of one target column plus `lambda/2 * |w|^2`.
pub fn regularized_log_loss(features: &DenseMatrix, targets: &[bool], w: &[f64], lambda: f64) -> f64 {
    let rows = features.rows();
    let data: f64 = (0..rows)
        .map(|r| {
            let s = linear(w, features.row(r));
            softplus(s) - if targets[r] { s } else { 0.0 }
        })
        .sum::<f64>()
        / rows as f64;
    let penalty: f64 = w[..features.cols()].iter().map(|v| v * v).sum();
    data + 0.5 * lambda * penalty
}

/// Gradient of [`regularized_log_loss`] with respect to `w`.
pub fn log_loss_gradient(features: &DenseMatrix, targets: &[bool], w: &[f64], lambda: f64) -> Vec<f64> {
    let (rows, cols) = (features.rows(), features.cols());
    let mut grad = vec![0.0; cols + 1];
    for r in 0..rows {
        let x = features.row(r);
        let err = sigmoid(linear(w, x)) - if targets[r] { 1.0 } else { 0.0 };
        grad[..cols].iter_mut().zip(x).for_each(|(g, xi)| *g += err * xi);
        grad[cols] += err;
    }
    grad.iter_mut().for_each(|g| *g /= rows as f64);
    grad[..cols].iter_mut().zip(w).for_each(|(g, wi)| *g += lambda * wi);
    grad
}

/// Fits one L2-regularized binary logistic regression per column of
/// `targets` (`targets[c][r]` is row `r`'s membership in class `c`).
///
/// A column without both a positive and a negative row keeps zero weights.
pub fn logistic_regression_fit(
    features: &DenseMatrix,
    targets: &[Vec<bool>],
    config: &LogisticConfig,
) -> Result<LogisticModel> {
    if features.rows() == 0 {
        return Err(Error::InvalidConfig(
            "logistic regression needs at least one row".into(),
        ));
    }
    if (0..features.rows()).any(|r| features.row(r).iter().any(|v| !v.is_finite())) {
        return Err(Error::NonFinite("classifier features".into()));
    }
    if let Some(t) = targets.iter().find(|t| t.len() != features.rows()) {
        return Err(Error::LengthMismatch {
            left: features.rows(),
            right: t.len(),
        });
    }
    let cols = features.cols();
    let weights = targets
        .iter()
        .map(|t| {
            let mut w = vec![0.0; cols + 1];
            let positives = t.iter().filter(|&&b| b).count();
            if positives == 0 || positives == t.len() {
                return w;
            }
            for _ in 0..config.iterations {
                let g = log_loss_gradient(features, t, &w, config.lambda);
                w.iter_mut().zip(&g).for_each(|(wi, gi)| *wi -= config.step * gi);
            }
            w
        })
        .collect();
    Ok(LogisticModel { weights })
}

impl LogisticModel {
    pub fn num_classes(&self) -> usize {
        self.weights.len()
    }

    /// Linear decision values, one per class.
    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        self.weights.iter().map(|w| linear(w, x)).collect()
    }

    /// Classes with probability above one half.
    pub fn predict_multilabel(&self, x: &[f64]) -> Vec<usize> {
        self.scores(x)
            .iter()
            .enumerate()
            .filter(|(_, &s)| sigmoid(s) > 0.5)
            .map(|(c, _)| c)
            .collect()
    }

    /// Highest-scoring class; ties go to the lowest index.
    pub fn predict_single(&self, x: &[f64]) -> usize {
        let scores = self.scores(x);
        let mut best = 0;
        for (c, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = c;
            }
        }
        best
    }
}
