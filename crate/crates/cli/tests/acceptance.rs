//! Acceptance suite: one PASS / FAIL / SKIP line per criterion.
//!
//! Runs without the libtest harness so that every line reaches the
//! output. Tolerances and time budgets are pinned below.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use hyperwalk::evaluation::{
    auroc, classify_eval, link_prediction_eval, reconstruction_eval, split_edges, LogisticConfig,
    DEFAULT_FULL_PAIR_THRESHOLD, DEFAULT_HOLDOUT_FRACTION,
};
use hyperwalk::geometry::{
    constraint_residual, distance, exp_map, lift_klein, lift_poincare, minkowski_dot, project_to_tangent, to_klein,
    to_poincare, HyperboloidPoint,
};
use hyperwalk::graph::{
    attribute_similarity, build_transition_tables, load_graph_files, AttributedGraph, TransitionTables,
};
use hyperwalk::optimizer::{
    ambient_gradient, init_embedding, train, HyperboloidEmbedding, Sample, TrainConfig, TrainOutcome,
};
use hyperwalk::sampler::{
    extract_pairs, generate_walks, walk_from, NegativeSampler, PairCorpus, WalkConfig, WalkStats,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// criterion 1
const GEOMETRY_CASES: usize = 1000;
const CONSTRAINT_TOL: f64 = 1e-9;
const EXP_DISTANCE_TOL: f64 = 1e-6;
const MAX_TANGENT_NORM: f64 = 10.0;
const ORTHOGONALITY_TOL: f64 = 1e-8;
const ROUND_TRIP_TOL: f64 = 1e-9;
const TRIANGLE_TOL: f64 = 1e-9;

// criterion 2
const GRADIENT_CONFIGS: usize = 100;
const GRADIENT_REL_TOL: f64 = 1e-4;
const FD_STEP: f64 = 1e-4;

// criterion 3
const AUROC_CASES: usize = 200;

// criterion 4
const TELEPORT_STEPS: usize = 100_000;
const TELEPORT_TOL: f64 = 0.01;
const NOISE_DRAWS: usize = 100_000;
const NOISE_TOL: f64 = 0.005;

// criterion 5
const TREE_NODES: usize = 63;
const TREE_DIM: usize = 10;
const TREE_SEEDS: u64 = 10;
const TREE_REQUIRED: usize = 8;
const TREE_MIN_AUROC: f64 = 0.95;

// criterion 6
const CORA_SEEDS: u64 = 10;
const CORA_TOL: f64 = 0.03;
const CORA_AUROC_ALPHA: f64 = 0.968;
const CORA_AUROC_TOPOLOGY: f64 = 0.929;
const CORA_LABELLED: f64 = 0.1;

// criterion 8
const CHAIN_WALKS: usize = 100_000;
const CHAIN_TV_TOL: f64 = 0.02;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn main() -> ExitCode {
    type Check = fn() -> Verdict;
    let criteria: [(u8, &str, Option<Duration>, Check); 8] = [
        (1, "geometry properties", Some(Duration::from_secs(10)), geometry),
        (2, "gradient oracle", Some(Duration::from_secs(30)), gradient),
        (3, "auroc oracle", Some(Duration::from_secs(5)), auroc_oracle),
        (4, "sampler distributions", Some(Duration::from_secs(30)), sampler),
        (5, "tree reconstruction", Some(Duration::from_secs(120)), tree),
        (6, "cora_ml reproduction", None, cora),
        (7, "cli determinism", None, determinism),
        (8, "deepwalk degeneration", None, deepwalk),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let mut v = check();
        let took = start.elapsed();
        if let (Verdict::Pass(detail), Some(b)) = (&v, budget) {
            if took > b {
                v = Verdict::Fail(format!("{detail}; over the {}s budget", b.as_secs()));
            }
        }
        let (tag, detail) = match &v {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Verdict::Skip(d) => ("SKIP", d),
        };
        println!("criterion {id} {name}: {tag} ({detail}) [{:.2}s]", took.as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, range: f64) -> HyperboloidPoint {
    let s: Vec<f64> = (0..n).map(|_| rng.gen_range(-range..range)).collect();
    HyperboloidPoint::from_spatial(&s).unwrap()
}

fn geometry() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut constraint, mut travel, mut ortho, mut trip, mut triangle) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut cases = 0;
    while cases < GEOMETRY_CASES {
        let n = rng.gen_range(2..=6);
        let x = random_point(&mut rng, n, 2.0);
        let g: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut v = project_to_tangent(&x, &g);
        let norm = v.norm();
        if norm < 1e-6 {
            continue;
        }
        ortho = ortho.max(minkowski_dot(x.coords(), &v.direction).abs());
        let r = rng.gen_range(0.0..=MAX_TANGENT_NORM);
        v.scale(r / norm);
        let y = exp_map(&v);
        constraint = constraint.max(constraint_residual(y.coords()));
        travel = travel.max((distance(&x, &y) - r).abs());

        let back_p = lift_poincare(&to_poincare(&x)).unwrap();
        let back_k = lift_klein(&to_klein(&x)).unwrap();
        trip = trip
            .max(max_abs_diff(back_p.coords(), x.coords()))
            .max(max_abs_diff(back_k.coords(), x.coords()));

        let (a, b) = (random_point(&mut rng, n, 2.0), random_point(&mut rng, n, 2.0));
        triangle = triangle.max(distance(&x, &b) - distance(&x, &a) - distance(&a, &b));
        cases += 1;
    }
    let ok = constraint <= CONSTRAINT_TOL
        && travel <= EXP_DISTANCE_TOL
        && ortho <= ORTHOGONALITY_TOL
        && trip <= ROUND_TRIP_TOL
        && triangle <= TRIANGLE_TOL;
    verdict(
        ok,
        format!(
            "{cases} cases; constraint {constraint:.1e}, |d - |v|| {travel:.1e}, orthogonality {ortho:.1e}, \
             round trip {trip:.1e}, triangle excess {triangle:.1e}"
        ),
    )
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

/// Mean negative log-softmax with each role read from its own table.
fn role_loss(src: &[Vec<f64>], ctx: &[Vec<f64>], neg: &[Vec<f64>], batch: &[Sample], sigma: f64) -> f64 {
    let mut total = 0.0;
    for s in batch {
        let k = s.candidates.len();
        let logits: Vec<f64> = s
            .candidates
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let table = if i == k - 1 { ctx } else { neg };
                -squared_distance(-inner(&src[s.source], &table[c])) / (2.0 * sigma * sigma)
            })
            .collect();
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        total += max + logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln() - logits[k - 1];
    }
    total / batch.len() as f64
}

fn gradient() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..GRADIENT_CONFIGS {
        let num_nodes = rng.gen_range(3..=10);
        let dim = rng.gen_range(2..=5);
        let negatives = rng.gen_range(1..=3);
        let sigma = rng.gen_range(0.5..2.0);
        let points: Vec<HyperboloidPoint> = (0..num_nodes).map(|_| random_point(&mut rng, dim, 1.5)).collect();
        let batch: Vec<Sample> = (0..rng.gen_range(1..=6))
            .map(|_| {
                let source = rng.gen_range(0..num_nodes);
                let candidates = (0..=negatives)
                    .map(|_| loop {
                        let c = rng.gen_range(0..num_nodes);
                        if c != source {
                            break c;
                        }
                    })
                    .collect();
                Sample { source, candidates }
            })
            .collect();
        let emb = HyperboloidEmbedding::new(points, sigma).unwrap();
        let base: Vec<Vec<f64>> = emb.points().iter().map(|p| p.coords().to_vec()).collect();
        for u in 0..num_nodes {
            // five-point stencil per role; role 0 source, role 2 negative
            let fd = |role: usize| -> Vec<f64> {
                (0..=dim)
                    .map(|j| {
                        let eval = |h: f64| {
                            let mut t = [base.clone(), base.clone(), base.clone()];
                            t[role][u][j] += h;
                            role_loss(&t[0], &t[1], &t[2], &batch, sigma)
                        };
                        (8.0 * (eval(FD_STEP) - eval(-FD_STEP)) - (eval(2.0 * FD_STEP) - eval(-2.0 * FD_STEP)))
                            / (12.0 * FD_STEP)
                    })
                    .collect()
            };
            let (src, neg) = (fd(0), fd(2));
            let mut both: Vec<f64> = src.iter().zip(&neg).map(|(a, b)| a + b).collect();
            let mut only = src;
            // Euclidean partials to the Minkowski gradient
            both[0] = -both[0];
            only[0] = -only[0];
            for (update, want) in [(true, both), (false, only)] {
                let got = ambient_gradient(&emb, u, &batch, update);
                let diff = got.iter().zip(&want).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                let scale = want.iter().map(|b| b * b).sum::<f64>().sqrt().max(1e-8);
                worst = worst.max(diff / scale);
            }
        }
    }
    verdict(
        worst <= GRADIENT_REL_TOL,
        format!("{GRADIENT_CONFIGS} configurations; worst relative error {worst:.2e}"),
    )
}

fn auroc_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mismatches = 0;
    for _ in 0..AUROC_CASES {
        // a coarse grid makes ties frequent
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            let len = rng.gen_range(1..=100);
            (0..len).map(|_| rng.gen_range(0..12) as f64 * 0.25).collect()
        };
        let (pos, neg) = (draw(&mut rng), draw(&mut rng));
        let mut doubled = 0u64;
        for p in &pos {
            for n in &neg {
                doubled += u64::from(p < n) * 2 + u64::from(p == n);
            }
        }
        let brute = doubled as f64 / 2.0 / (pos.len() * neg.len()) as f64;
        if auroc(&pos, &neg).unwrap() != brute {
            mismatches += 1;
        }
    }
    verdict(
        mismatches == 0,
        format!("{AUROC_CASES} score sets; {mismatches} mismatches"),
    )
}

fn sampler() -> Verdict {
    // one node's topological row loops back, its attribute row jumps away,
    // so a teleport is exactly a change of node
    let tables = TransitionTables::from_rows(
        &[vec![1.0, 0.0], vec![0.0, 1.0]],
        Some(&[vec![0.0, 1.0], vec![1.0, 0.0]]),
    )
    .unwrap();
    let mut teleport_err: f64 = 0.0;
    for (i, alpha) in [0.05, 0.2, 0.5, 0.9].into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(40 + i as u64);
        let walk = walk_from(&tables, 0, TELEPORT_STEPS, alpha, &mut rng, &mut WalkStats::default());
        let observed = walk.windows(2).filter(|w| w[0] != w[1]).count() as f64 / TELEPORT_STEPS as f64;
        teleport_err = teleport_err.max((observed - alpha).abs());
    }

    let counts: Vec<u64> = vec![1, 3, 7, 12, 20, 33, 50, 81, 120, 200];
    let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(0.75)).collect();
    let z: f64 = weights.iter().sum();
    let corpus = PairCorpus::from_parts(10, vec![(0, 1), (1, 0)], counts).unwrap();
    let mut sampler = NegativeSampler::new(&corpus).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut hist = [0usize; 10];
    let mut out = Vec::new();
    // node 5 has no contexts, so no draw is rejected
    for _ in 0..NOISE_DRAWS / 10 {
        sampler.sample_into(5, 2, 10, &mut rng, &mut out);
        out[..10].iter().for_each(|&v| hist[v] += 1);
    }
    let noise_err = (0..10)
        .map(|v| (hist[v] as f64 / NOISE_DRAWS as f64 - weights[v] / z).abs())
        .fold(0.0, f64::max);
    verdict(
        teleport_err <= TELEPORT_TOL && noise_err <= NOISE_TOL,
        format!("teleport |f - alpha| {teleport_err:.4} over {TELEPORT_STEPS} steps; noise frequency error {noise_err:.4} over {NOISE_DRAWS} draws"),
    )
}

fn binary_tree(n: usize) -> AttributedGraph {
    let edges: Vec<(usize, usize)> = (1..n).map(|v| ((v - 1) / 2, v)).collect();
    AttributedGraph::from_edge_indices(n, &edges).unwrap()
}

/// Default walks and training on `graph`, every stream seeded by `seed`.
fn embed(graph: &AttributedGraph, alpha: f64, dim: usize, seed: u64) -> TrainOutcome {
    let similarity = (alpha > 0.0).then(|| attribute_similarity(graph).unwrap());
    let tables = build_transition_tables(graph, similarity.as_ref()).unwrap();
    let walk = WalkConfig {
        alpha,
        seed,
        ..Default::default()
    };
    let walks = generate_walks(&tables, &walk).unwrap();
    let corpus = extract_pairs(&walks.walks, walk.context_size, graph.num_nodes()).unwrap();
    let config = TrainConfig {
        seed,
        ..Default::default()
    };
    let init = init_embedding(graph.num_nodes(), dim, config.sigma, seed).unwrap();
    train(init, &corpus, &config).unwrap()
}

fn tree() -> Verdict {
    let g = binary_tree(TREE_NODES);
    let mut passing = 0;
    let mut aurocs = Vec::new();
    for seed in 0..TREE_SEEDS {
        let out = embed(&g, 0.0, TREE_DIM, seed);
        let a = reconstruction_eval(&out.embedding, &g, DEFAULT_FULL_PAIR_THRESHOLD, seed)
            .unwrap()
            .metric("auroc")
            .unwrap();
        let descends = out.loss_trace.last() < out.loss_trace.first();
        if a >= TREE_MIN_AUROC && descends {
            passing += 1;
        }
        aurocs.push(format!("{a:.3}"));
    }
    verdict(
        passing >= TREE_REQUIRED,
        format!(
            "{passing}/{TREE_SEEDS} seeds with AUROC >= {TREE_MIN_AUROC} and descending loss; AUROC {}",
            aurocs.join(" ")
        ),
    )
}

fn cora_dir() -> Option<PathBuf> {
    let dir = std::env::var_os("HYPERWALK_CORA_ML")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/cora_ml"));
    ["edges.txt", "attributes.csv", "labels.csv"]
        .iter()
        .all(|f| dir.join(f).is_file())
        .then_some(dir)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn cora() -> Verdict {
    let Some(dir) = cora_dir() else {
        return Verdict::Skip(
            "Cora_ML not found; put edges.txt, attributes.csv and labels.csv in data/cora_ml or point HYPERWALK_CORA_ML at them"
                .into(),
        );
    };
    let g = load_graph_files(
        &dir.join("edges.txt"),
        Some(&dir.join("attributes.csv")),
        Some(&dir.join("labels.csv")),
    )
    .unwrap();
    let lp = |alpha: f64| -> f64 {
        let scores: Vec<f64> = (0..CORA_SEEDS)
            .map(|seed| {
                let split = split_edges(&g, DEFAULT_HOLDOUT_FRACTION, seed).unwrap();
                let train_graph = split.training_graph(&g).unwrap();
                let out = embed(&train_graph, alpha, TREE_DIM, seed);
                link_prediction_eval(&out.embedding, &split)
                    .unwrap()
                    .metric("auroc")
                    .unwrap()
            })
            .collect();
        mean(&scores)
    };
    let micro = |alpha: f64| -> f64 {
        let labels = g.labels().unwrap();
        let scores: Vec<f64> = (0..CORA_SEEDS)
            .map(|seed| {
                let out = embed(&g, alpha, TREE_DIM, seed);
                classify_eval(&out.embedding, labels, CORA_LABELLED, seed, &LogisticConfig::default())
                    .unwrap()
                    .metric("micro_f1")
                    .unwrap()
            })
            .collect();
        mean(&scores)
    };
    let (with, without) = (lp(0.2), lp(0.0));
    let (f_with, f_without) = (micro(0.2), micro(0.0));
    let ok = (with - CORA_AUROC_ALPHA).abs() <= CORA_TOL
        && (without - CORA_AUROC_TOPOLOGY).abs() <= CORA_TOL
        && with > without
        && f_with > f_without;
    verdict(
        ok,
        format!(
            "mean LP AUROC {with:.3} at alpha 0.2 (target {CORA_AUROC_ALPHA}), {without:.3} at alpha 0 (target {CORA_AUROC_TOPOLOGY}); \
             micro-F1 at {CORA_LABELLED} labelled {f_with:.3} vs {f_without:.3}"
        ),
    )
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect()
}

/// Stdout and every output file of one invocation.
type RunOutput = (Vec<u8>, BTreeMap<String, Vec<u8>>);

/// Runs the binary into `out` (cleared first).
fn run_cli(args: &[String], out: &Path) -> Result<RunOutput, String> {
    let _ = fs::remove_dir_all(out);
    let result = Command::new(env!("CARGO_BIN_EXE_hyperwalk"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if !result.status.success() {
        return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&result.stderr)));
    }
    Ok((result.stdout, snapshot(out)))
}

fn determinism() -> Verdict {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/tree63");
    let tmp = tempfile::tempdir().unwrap();
    let s = |p: &Path| p.display().to_string();
    let edges = ["--edges".to_string(), s(&data.join("edges.txt"))];
    let attrs = ["--attributes".to_string(), s(&data.join("attributes.csv"))];
    let labels = ["--labels".to_string(), s(&data.join("labels.csv"))];
    let quick = ["--epochs", "2", "--walks-per-node", "4", "--seed", "11"].map(String::from);
    let embedding = tmp.path().join("source");
    if let Err(e) = run_cli(
        &[&["embed".to_string()][..], &edges, &attrs, &quick].concat(),
        &embedding,
    ) {
        return Verdict::Fail(e);
    }
    let cat = |parts: &[&[String]]| parts.concat();
    let cmd = |c: &str| vec![c.to_string()];
    let runs: Vec<Vec<String>> = vec![
        cat(&[&cmd("embed"), &edges, &attrs, &quick]),
        cat(&[&cmd("walks"), &edges, &attrs, &quick[2..]]),
        cat(&[&cmd("lp-split"), &edges, &quick[4..]]),
        cat(&[
            &cmd("eval-reconstruction"),
            &edges,
            &attrs,
            &quick,
            &["--reps".into(), "2".into()],
        ]),
        cat(&[&cmd("eval-lp"), &edges, &attrs, &quick, &["--reps".into(), "2".into()]]),
        cat(&[
            &cmd("eval-classify"),
            &edges,
            &attrs,
            &labels,
            &quick,
            &["--fractions".into(), "0.1,0.3".into()],
        ]),
        cat(&[
            &cmd("project"),
            &[
                "--embedding".into(),
                s(&embedding.join("embedding.csv")),
                "--check".into(),
            ],
        ]),
        cat(&[
            &cmd("project"),
            &[
                "--embedding".into(),
                s(&embedding.join("embedding.csv")),
                "--model".into(),
                "poincare".into(),
            ],
        ]),
    ];
    let out = tmp.path().join("out");
    let mut files = 0;
    for args in &runs {
        let first = run_cli(args, &out);
        let second = run_cli(args, &out);
        match (first, second) {
            (Ok(a), Ok(b)) if a == b => files += a.1.len(),
            (Ok(_), Ok(_)) => return Verdict::Fail(format!("`{}` differs between runs", args[0])),
            (Err(e), _) | (_, Err(e)) => return Verdict::Fail(e),
        }
    }
    Verdict::Pass(format!(
        "{} invocations run twice; {files} output files and stdout byte-identical",
        runs.len()
    ))
}

/// Expected ordered-pair frequencies of a uniform-weight DeepWalk corpus,
/// propagated exactly through the Markov chain.
fn chain_pairs(graph: &AttributedGraph, walk_length: usize, context: usize) -> HashMap<(usize, usize), f64> {
    let n = graph.num_nodes();
    let step = |dist: &[f64]| -> Vec<f64> {
        let mut next = vec![0.0; n];
        for (u, &mass) in dist.iter().enumerate() {
            let nb = graph.neighbors(u);
            for &v in nb {
                next[v] += mass / nb.len() as f64;
            }
        }
        next
    };
    let mut expected: HashMap<(usize, usize), f64> = HashMap::new();
    for start in 0..n {
        let mut at = vec![0.0; n];
        at[start] = 1.0;
        for i in 0..=walk_length {
            for a in (0..n).filter(|&a| at[a] > 0.0) {
                let mut ahead = vec![0.0; n];
                ahead[a] = 1.0;
                for _ in 1..=context.min(walk_length - i) {
                    ahead = step(&ahead);
                    for b in (0..n).filter(|&b| b != a) {
                        *expected.entry((a, b)).or_default() += at[a] * ahead[b];
                        *expected.entry((b, a)).or_default() += at[a] * ahead[b];
                    }
                }
            }
            at = step(&at);
        }
    }
    let total: f64 = expected.values().sum();
    expected.values_mut().for_each(|v| *v /= total);
    expected
}

fn deepwalk() -> Verdict {
    let graphs: Vec<(usize, Vec<(usize, usize)>)> = vec![
        (3, vec![(0, 1), (1, 2)]),
        (4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]),
        (5, vec![(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)]),
        (6, vec![(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]),
        (6, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]),
    ];
    let mut worst: f64 = 0.0;
    for (n, edges) in &graphs {
        let g = AttributedGraph::from_edge_indices(*n, edges).unwrap();
        let tables = build_transition_tables(&g, None).unwrap();
        let config = WalkConfig {
            num_walks_per_node: CHAIN_WALKS / n,
            walk_length: 10,
            context_size: 3,
            alpha: 0.0,
            seed: 8,
        };
        let walks = generate_walks(&tables, &config).unwrap();
        let corpus = extract_pairs(&walks.walks, config.context_size, *n).unwrap();
        let expected = chain_pairs(&g, config.walk_length, config.context_size);
        let mut observed: HashMap<(usize, usize), f64> = HashMap::new();
        for &(u, v) in corpus.pairs() {
            *observed.entry((u as usize, v as usize)).or_default() += 1.0 / corpus.len() as f64;
        }
        let keys: std::collections::BTreeSet<_> = observed.keys().chain(expected.keys()).copied().collect();
        let tv = 0.5
            * keys
                .iter()
                .map(|k| (observed.get(k).unwrap_or(&0.0) - expected.get(k).unwrap_or(&0.0)).abs())
                .sum::<f64>();
        worst = worst.max(tv);
    }
    verdict(
        worst <= CHAIN_TV_TOL,
        format!(
            "{} graphs with at most 6 nodes, ~{CHAIN_WALKS} walks each; worst total variation {worst:.4}",
            graphs.len()
        ),
    )
}
