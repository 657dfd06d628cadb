use rand::seq::SliceRandom;

use super::logistic::{logistic_regression_fit, LogisticConfig};
use super::EvalReport;
use crate::error::{Error, Result};
use crate::geometry::to_klein;
use crate::graph::{DenseMatrix, Labels};
use crate::optimizer::HyperboloidEmbedding;
use crate::seed::{self, Stream};

/// True/false positive and false negative counts for one class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl Confusion {
    pub fn f1(&self) -> f64 {
        let denom = 2 * self.tp + self.fp + self.fn_;
        if denom == 0 {
            0.0
        } else {
            2.0 * self.tp as f64 / denom as f64
        }
    }
}

/// Per-class confusion counts of `predicted` against `truth` label sets.
pub fn confusion_counts(truth: &[Vec<usize>], predicted: &[Vec<usize>], num_classes: usize) -> Vec<Confusion> {
    let mut counts = vec![Confusion::default(); num_classes];
    for (t, p) in truth.iter().zip(predicted) {
        for &c in p {
            if t.contains(&c) {
                counts[c].tp += 1;
            } else {
                counts[c].fp += 1;
            }
        }
        for &c in t {
            if !p.contains(&c) {
                counts[c].fn_ += 1;
            }
        }
    }
    counts
}

/// Micro-F1 pools the counts of every class; macro-F1 averages per-class F1
/// over classes that occur in the truth or the predictions.
pub fn f1_scores(counts: &[Confusion]) -> (f64, f64) {
    let total = counts.iter().fold(Confusion::default(), |a, c| Confusion {
        tp: a.tp + c.tp,
        fp: a.fp + c.fp,
        fn_: a.fn_ + c.fn_,
    });
    let active: Vec<f64> = counts
        .iter()
        .filter(|c| c.tp + c.fp + c.fn_ > 0)
        .map(Confusion::f1)
        .collect();
    let macro_f1 = if active.is_empty() {
        0.0
    } else {
        active.iter().sum::<f64>() / active.len() as f64
    };
    (total.f1(), macro_f1)
}

/// Klein-model coordinates of every node, one row per node.
pub fn klein_features(emb: &HyperboloidEmbedding) -> DenseMatrix {
    let rows = emb.points().iter().map(to_klein).collect();
    DenseMatrix::from_rows(rows).expect("embedding points share a dimension")
}

/// Picks `k` of the `candidates`: first one node per class (in shuffled
/// order) while room remains, then the rest of the shuffled order.
fn stratified_sample(candidates: &[usize], labels: &Labels, k: usize, seed: u64) -> Vec<usize> {
    let mut order = candidates.to_vec();
    order.shuffle(&mut seed::rng(seed, Stream::Classifier, 0, 0));
    let mut chosen = vec![false; order.len()];
    let mut covered = vec![false; labels.num_classes()];
    let mut picked = 0;
    for class in 0..labels.num_classes() {
        if picked == k {
            break;
        }
        if covered[class] {
            continue;
        }
        if let Some(i) = order.iter().position(|&u| labels.of(u).contains(&class)) {
            if !chosen[i] {
                chosen[i] = true;
                picked += 1;
                labels.of(order[i]).iter().for_each(|&c| covered[c] = true);
            }
        }
    }
    for flag in chosen.iter_mut() {
        if picked == k {
            break;
        }
        if !*flag {
            *flag = true;
            picked += 1;
        }
    }
    let mut out: Vec<usize> = order.iter().zip(&chosen).filter(|(_, &c)| c).map(|(&u, _)| u).collect();
    out.sort_unstable();
    out
}

/// Trains a one-vs-rest logistic model on a stratified `labelled_fraction`
/// of the labelled nodes (Klein coordinates as features) and scores the rest.
///
/// Single-label data predicts the argmax class, multilabel data every class
/// with probability above one half.
pub fn classify_eval(
    emb: &HyperboloidEmbedding,
    labels: &Labels,
    labelled_fraction: f64,
    seed: u64,
    config: &LogisticConfig,
) -> Result<EvalReport> {
    if !(labelled_fraction > 0.0 && labelled_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "labelled fraction must lie in (0, 1), got {labelled_fraction}"
        )));
    }
    if labels.len() != emb.num_nodes() {
        return Err(Error::LengthMismatch {
            left: emb.num_nodes(),
            right: labels.len(),
        });
    }
    let labelled: Vec<usize> = (0..labels.len()).filter(|&u| !labels.of(u).is_empty()).collect();
    if labelled.len() < 2 {
        return Err(Error::InvalidConfig(
            "classification needs at least two labelled nodes".into(),
        ));
    }
    let k = ((labelled_fraction * labelled.len() as f64).round() as usize).clamp(1, labelled.len() - 1);
    let train = stratified_sample(&labelled, labels, k, seed);
    let mut in_train = vec![false; labels.len()];
    train.iter().for_each(|&u| in_train[u] = true);
    let test: Vec<usize> = labelled.iter().copied().filter(|&u| !in_train[u]).collect();

    let features = klein_features(emb);
    let train_x = DenseMatrix::from_rows(train.iter().map(|&u| features.row(u).to_vec()).collect())?;
    let targets: Vec<Vec<bool>> = (0..labels.num_classes())
        .map(|c| train.iter().map(|&u| labels.of(u).contains(&c)).collect())
        .collect();
    let missing: Vec<&str> = (0..labels.num_classes())
        .filter(|&c| !targets[c].iter().any(|&b| b))
        .map(|c| labels.classes()[c].as_str())
        .collect();
    if !missing.is_empty() {
        log::warn!("labelled sample misses classes {missing:?}; they score 0 in macro-F1");
    }
    let model = logistic_regression_fit(&train_x, &targets, config)?;

    let truth: Vec<Vec<usize>> = test.iter().map(|&u| labels.of(u).to_vec()).collect();
    let predicted: Vec<Vec<usize>> = test
        .iter()
        .map(|&u| {
            let x = features.row(u);
            if labels.is_multilabel() {
                model.predict_multilabel(x)
            } else {
                vec![model.predict_single(x)]
            }
        })
        .collect();
    let (micro, macro_) = f1_scores(&confusion_counts(&truth, &predicted, labels.num_classes()));

    let mut report = EvalReport::new("classify", emb.dim(), seed);
    report.fraction = Some(labelled_fraction);
    report.push_metric("micro_f1", micro);
    report.push_metric("macro_f1", macro_);
    report.set_param("train_nodes", train.len());
    report.set_param("test_nodes", test.len());
    report.set_param("missing_classes", missing.len());
    report.set_param("multilabel", labels.is_multilabel());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HyperboloidPoint;

    #[test]
    fn multilabel_counting() {
        let counts = confusion_counts(&[vec![0, 1]], &[vec![0]], 2);
        assert_eq!(counts[0], Confusion { tp: 1, fp: 0, fn_: 0 });
        assert_eq!(counts[1], Confusion { tp: 0, fp: 0, fn_: 1 });
        let (micro, macro_) = f1_scores(&counts);
        assert!((micro - 2.0 / 3.0).abs() < 1e-15);
        assert!((macro_ - 0.5).abs() < 1e-15);
    }

    #[test]
    fn separated_clusters_classify_perfectly() {
        // two tight clusters on opposite sides of the origin
        let mut points = Vec::new();
        let mut per_node = Vec::new();
        for i in 0..40 {
            let side = if i % 2 == 0 { 1.0 } else { -1.0 };
            let jitter = 0.01 * (i as f64 / 40.0);
            points.push(HyperboloidPoint::from_spatial(&[side * 1.5 + jitter, jitter]).unwrap());
            per_node.push(vec![(i % 2) as usize]);
        }
        let emb = HyperboloidEmbedding::new(points, 1.0).unwrap();
        let labels = Labels::new(vec!["a".into(), "b".into()], per_node, false).unwrap();
        let report = classify_eval(&emb, &labels, 0.1, 3, &LogisticConfig::default()).unwrap();
        assert_eq!(report.metric("micro_f1"), Some(1.0));
        assert_eq!(report.metric("macro_f1"), Some(1.0));
    }

    #[test]
    fn stratified_sample_covers_classes() {
        let per_node: Vec<Vec<usize>> = (0..100)
            .map(|i| vec![if i < 94 { 0 } else { 1 + (i - 94) / 2 }])
            .collect();
        let labels = Labels::new((0..4).map(|c| c.to_string()).collect(), per_node, false).unwrap();
        let nodes: Vec<usize> = (0..100).collect();
        for seed in 0..20 {
            let s = stratified_sample(&nodes, &labels, 4, seed);
            assert_eq!(s.len(), 4);
            let mut classes: Vec<usize> = s.iter().map(|&u| labels.of(u)[0]).collect();
            classes.sort_unstable();
            assert_eq!(classes, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn identical_inputs_identical_outputs() {
        let points = (0..30)
            .map(|i| HyperboloidPoint::from_spatial(&[(i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()]).unwrap())
            .collect();
        let emb = HyperboloidEmbedding::new(points, 1.0).unwrap();
        let labels = Labels::new(
            vec!["x".into(), "y".into(), "z".into()],
            (0..30).map(|i| vec![i % 3]).collect(),
            false,
        )
        .unwrap();
        let a = classify_eval(&emb, &labels, 0.3, 5, &LogisticConfig::default()).unwrap();
        let b = classify_eval(&emb, &labels, 0.3, 5, &LogisticConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fraction_bounds() {
        let emb = HyperboloidEmbedding::new(vec![HyperboloidPoint::origin(2); 4], 1.0).unwrap();
        let labels = Labels::new(vec!["a".into()], vec![vec![0]; 4], false).unwrap();
        assert!(classify_eval(&emb, &labels, 0.0, 0, &LogisticConfig::default()).is_err());
        assert!(classify_eval(&emb, &labels, 1.0, 0, &LogisticConfig::default()).is_err());
    }
}
