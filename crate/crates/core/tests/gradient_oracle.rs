//! Training gradients against central finite differences of an independently
//! written loss.

use hyperwalk::geometry::{exp_map, project_to_tangent, HyperboloidPoint};
use hyperwalk::optimizer::{ambient_gradient, batch_loss, HyperboloidEmbedding, Sample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// five-point central stencil: truncation O(h^4), rounding O(eps / h)
const STEP: f64 = 1e-4;
const TOLERANCE: f64 = 1e-4;

struct Config {
    emb: HyperboloidEmbedding,
    batch: Vec<Sample>,
}

fn random_config(rng: &mut ChaCha8Rng) -> Config {
    let num_nodes = rng.gen_range(3..=10);
    let dim = rng.gen_range(2..=5);
    let negatives = rng.gen_range(1..=3);
    let sigma = rng.gen_range(0.5..2.0);
    let points = (0..num_nodes)
        .map(|_| {
            let s: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.5..1.5)).collect();
            HyperboloidPoint::from_spatial(&s).unwrap()
        })
        .collect();
    let batch = (0..rng.gen_range(1..=6))
        .map(|_| {
            let source = rng.gen_range(0..num_nodes);
            let mut other = || loop {
                let c = rng.gen_range(0..num_nodes);
                if c != source {
                    return c;
                }
            };
            let candidates = (0..=negatives).map(|_| other()).collect();
            Sample { source, candidates }
        })
        .collect();
    Config {
        emb: HyperboloidEmbedding::new(points, sigma).unwrap(),
        batch,
    }
}

fn inner(a: &[f64], b: &[f64]) -> f64 {
    -a[0] * b[0] + a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum::<f64>()
}

/// `arccosh(z)^2`, continued analytically as `-arccos(z)^2` below 1: a
/// stencil step off the sheet can push close pairs under `z = 1`, where a
/// clamp would put a kink into the difference quotient.
fn squared_distance(z: f64) -> f64 {
    if z >= 1.0 {
        z.acosh().powi(2)
    } else {
        -z.acos().powi(2)
    }
}

fn logit(a: &[f64], b: &[f64], sigma: f64) -> f64 {
    -squared_distance(-inner(a, b)) / (2.0 * sigma * sigma)
}

/// Mean negative log-softmax with each role's coordinates taken from its
/// own table.
fn split_role_loss(src: &[Vec<f64>], ctx: &[Vec<f64>], neg: &[Vec<f64>], batch: &[Sample], sigma: f64) -> f64 {
    let mut total = 0.0;
    for s in batch {
        let k = s.candidates.len();
        let logits: Vec<f64> = s
            .candidates
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let table = if i == k - 1 { ctx } else { neg };
                logit(&src[s.source], &table[c], sigma)
            })
            .collect();
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
        total += lse - logits[k - 1];
    }
    total / batch.len() as f64
}

/// Central difference of the loss in the coordinates of `u` within one role
/// table (`role` 0 = source, 2 = negative).
fn role_derivative(cfg: &Config, u: usize, role: usize) -> Vec<f64> {
    let base: Vec<Vec<f64>> = cfg.emb.points().iter().map(|p| p.coords().to_vec()).collect();
    let sigma = cfg.emb.sigma();
    (0..base[u].len())
        .map(|j| {
            let eval = |h: f64| {
                let mut tables = [base.clone(), base.clone(), base.clone()];
                tables[role][u][j] += h;
                split_role_loss(&tables[0], &tables[1], &tables[2], &cfg.batch, sigma)
            };
            (8.0 * (eval(STEP) - eval(-STEP)) - (eval(2.0 * STEP) - eval(-2.0 * STEP))) / (12.0 * STEP)
        })
        .collect()
}

fn relative_error(got: &[f64], want: &[f64]) -> f64 {
    let diff: f64 = got.iter().zip(want).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let scale: f64 = want.iter().map(|b| b * b).sum::<f64>().sqrt();
    diff / scale.max(1e-8)
}

/// Euclidean partials turned into the Minkowski gradient (time sign flipped).
fn minkowski(mut euclidean: Vec<f64>) -> Vec<f64> {
    euclidean[0] = -euclidean[0];
    euclidean
}

#[test]
fn ambient_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let cfg = random_config(&mut rng);
        for u in 0..cfg.emb.num_nodes() {
            let src = role_derivative(&cfg, u, 0);
            let neg = role_derivative(&cfg, u, 2);

            let with_neg = ambient_gradient(&cfg.emb, u, &cfg.batch, true);
            let want: Vec<f64> = src.iter().zip(&neg).map(|(a, b)| a + b).collect();
            worst = worst.max(relative_error(&with_neg, &minkowski(want)));

            let source_only = ambient_gradient(&cfg.emb, u, &cfg.batch, false);
            worst = worst.max(relative_error(&source_only, &minkowski(src)));
        }
    }
    assert!(worst <= TOLERANCE, "worst relative error {worst:e}");
}

#[test]
fn riemannian_gradient_matches_geodesic_derivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut checked = 0;
    while checked < 100 {
        let cfg = random_config(&mut rng);
        // moving a node moves all its roles; the context role has no
        // gradient term of its own, so use nodes that are never a context
        let contexts: Vec<usize> = cfg.batch.iter().map(Sample::context).collect();
        let Some(u) = (0..cfg.emb.num_nodes()).find(|u| !contexts.contains(u)) else {
            continue;
        };
        let x = cfg.emb.point(u);
        let grad = ambient_gradient(&cfg.emb, u, &cfg.batch, true);
        let riemannian = project_to_tangent(x, &grad);
        let raw: Vec<f64> = (0..x.coords().len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut w = project_to_tangent(x, &raw);
        let norm = w.norm();
        w.scale(1.0 / norm);
        let along = |t: f64| {
            let mut step = w.clone();
            step.scale(t);
            let mut pts = cfg.emb.points().to_vec();
            pts[u] = exp_map(&step);
            batch_loss(&HyperboloidEmbedding::new(pts, cfg.emb.sigma()).unwrap(), &cfg.batch)
        };
        let h = 1e-5;
        let fd = (along(h) - along(-h)) / (2.0 * h);
        let analytic = inner(&riemannian.direction, &w.direction);
        assert!(
            (analytic - fd).abs() <= TOLERANCE * fd.abs().max(1e-3),
            "analytic {analytic}, finite difference {fd}"
        );
        checked += 1;
    }
}

#[test]
fn descent_direction_lowers_the_loss() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let cfg = random_config(&mut rng);
        let u = cfg.batch[0].source;
        let x = cfg.emb.point(u);
        let source_only = ambient_gradient(&cfg.emb, u, &cfg.batch, false);
        let mut step = project_to_tangent(x, &source_only);
        if step.norm() < 1e-6 {
            continue;
        }
        // only the source role moves; context and negative tables stay put
        step.scale(-1e-4 / step.norm());
        let moved = exp_map(&step);
        let base: Vec<Vec<f64>> = cfg.emb.points().iter().map(|p| p.coords().to_vec()).collect();
        let mut src = base.clone();
        src[u] = moved.coords().to_vec();
        let before = split_role_loss(&base, &base, &base, &cfg.batch, cfg.emb.sigma());
        let after = split_role_loss(&src, &base, &base, &cfg.batch, cfg.emb.sigma());
        assert!(after < before, "{after} >= {before}");
    }
}
