use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;

use hyperwalk::evaluation::{
    aggregate_rows, classify_eval, link_prediction_eval, reconstruction_eval, split_edges, EvalReport, LogisticConfig,
    RESULTS_HEADER,
};
use hyperwalk::geometry::{lift_klein, lift_poincare, to_klein, to_poincare, HyperboloidPoint};
use hyperwalk::graph::{
    attribute_similarity_with_threshold, build_transition_tables, load_graph_files, standardize_attributes,
    write_edge_list, AttributedGraph, TransitionTables,
};
use hyperwalk::optimizer::{
    init_embedding, read_embedding_csv, train, write_embedding_csv, HyperboloidEmbedding, TrainConfig, TrainOutcome,
};
use hyperwalk::sampler::{extract_pairs, generate_walks, write_walks, SamplerStats, WalkConfig};
use hyperwalk::seed::{self, Stream};

use crate::args::{Command, DataArgs, Model, RepArgs, RunArgs, TrainArgs, WalkArgs};
use crate::failure::{CliError, Stage};
use crate::manifest::Manifest;

/// Rows of an embedding file must satisfy the constraint this closely.
const EMBEDDING_TOLERANCE: f64 = 1e-6;

/// Largest accepted project-then-lift discrepancy (relative to `max(1, x0)`).
const ROUND_TRIP_TOLERANCE: f64 = 1e-9;

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Embed { data, walk, train, run } => embed(&data, &walk, &train, &run),
        Command::Walks { data, walk, run } => walks(&data, &walk, &run),
        Command::LpSplit { data, fraction, run } => lp_split(&data, fraction, &run),
        Command::EvalReconstruction {
            data,
            walk,
            train,
            reps,
            full_pair_threshold,
            run,
        } => eval_reconstruction(&data, &walk, &train, &reps, full_pair_threshold, &run),
        Command::EvalLp {
            data,
            walk,
            train,
            reps,
            fraction,
            run,
        } => eval_lp(&data, &walk, &train, &reps, fraction, &run),
        Command::EvalClassify {
            data,
            walk,
            train,
            reps,
            fractions,
            embedding,
            run,
        } => eval_classify(&data, &walk, &train, &reps, &fractions, embedding.as_deref(), &run),
        Command::Project {
            embedding,
            model,
            check,
            run,
        } => project(&embedding, model, check, &run),
    }
}

fn walk_config(w: &WalkArgs, seed: u64) -> Result<WalkConfig, CliError> {
    let config = WalkConfig {
        num_walks_per_node: w.walks_per_node,
        walk_length: w.walk_length,
        context_size: w.context,
        alpha: w.alpha,
        seed,
    };
    config.validate().stage("walk configuration")?;
    Ok(config)
}

fn train_config(t: &TrainArgs, seed: u64) -> Result<TrainConfig, CliError> {
    if t.dim < 2 {
        return Err(CliError::Config(format!("--dim must be at least 2, got {}", t.dim)));
    }
    let config = TrainConfig {
        learning_rate: t.lr,
        epochs: t.epochs,
        negatives: t.negatives,
        batch_size: t.batch,
        sigma: t.sigma,
        seed,
        update_negatives: !t.no_negative_updates,
    };
    config.validate().stage("training configuration")?;
    Ok(config)
}

fn rep_seed(master: u64, rep: usize) -> u64 {
    seed::derive(master, Stream::Repetition, rep as u64, 0)
}

fn check_readable(path: &Path, what: &str) -> Result<(), CliError> {
    File::open(path)
        .map(drop)
        .map_err(|e| CliError::Config(format!("cannot read {what} file {}: {e}", path.display())))
}

/// Checks every input path and flag combination, then loads the graph.
fn prepare(data: &DataArgs, alpha: Option<f64>, need_labels: bool) -> Result<AttributedGraph, CliError> {
    check_readable(&data.edges, "edge")?;
    if let Some(a) = &data.attributes {
        check_readable(a, "attribute")?;
    }
    if let Some(l) = &data.labels {
        check_readable(l, "label")?;
    }
    if let Some(alpha) = alpha.filter(|&a| a > 0.0) {
        if data.attributes.is_none() {
            return Err(CliError::Config(format!(
                "--alpha {alpha} teleports along attribute similarity and needs --attributes (use --alpha 0 for topology only)"
            )));
        }
    }
    if data.standardize && data.attributes.is_none() {
        return Err(CliError::Config("--standardize needs --attributes".into()));
    }
    if need_labels && data.labels.is_none() {
        return Err(CliError::Config("classification needs --labels".into()));
    }
    let graph =
        load_graph_files(&data.edges, data.attributes.as_deref(), data.labels.as_deref()).stage("loading input")?;
    if data.standardize {
        return standardize_attributes(&graph).stage("standardizing attributes");
    }
    Ok(graph)
}

fn tables(graph: &AttributedGraph, alpha: f64, dense_threshold: usize) -> Result<TransitionTables, CliError> {
    // similarities are only needed when teleports can happen
    let similarity = if alpha > 0.0 {
        Some(attribute_similarity_with_threshold(graph, dense_threshold).stage("attribute similarity")?)
    } else {
        None
    };
    build_transition_tables(graph, similarity.as_ref()).stage("transition tables")
}

struct Embedded {
    outcome: TrainOutcome,
    sampler: SamplerStats,
}

fn embed_graph(
    graph: &AttributedGraph,
    walk: &WalkConfig,
    train_cfg: &TrainConfig,
    dim: usize,
    dense_threshold: usize,
) -> Result<Embedded, CliError> {
    let tables = tables(graph, walk.alpha, dense_threshold)?;
    let walks = generate_walks(&tables, walk).stage("walk sampling")?;
    let corpus = extract_pairs(&walks.walks, walk.context_size, graph.num_nodes()).stage("pair extraction")?;
    log::info!("{} walks, {} pairs", walks.walks.len(), corpus.len());
    let init = init_embedding(graph.num_nodes(), dim, train_cfg.sigma, train_cfg.seed).stage("initialization")?;
    let outcome = train(init, &corpus, train_cfg).stage("training")?;
    let sampler = SamplerStats::new(&walks.stats, &corpus, outcome.stats.rejection_cap_hits);
    Ok(Embedded { outcome, sampler })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn create_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn write_file(path: &Path, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), CliError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(io_err(path))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    write_file(path, |w| w.write_all(text.as_bytes()))
}

/// Appends rows to `results.csv`, writing the header for a new file.
fn append_results(dir: &Path, rows: &[String]) -> Result<(), CliError> {
    let path = dir.join("results.csv");
    let fresh = !path.exists();
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&path)
        .map_err(io_err(&path))?;
    let mut w = BufWriter::new(file);
    let result = (|| {
        if fresh {
            writeln!(w, "{RESULTS_HEADER}")?;
        }
        for row in rows {
            writeln!(w, "{row}")?;
        }
        w.flush()
    })();
    result.map_err(io_err(&path))
}

fn record_graph(m: &mut Manifest, graph: &AttributedGraph) {
    m.info("nodes", graph.num_nodes());
    m.info("edges", graph.num_edges());
    m.info("attribute-dim", graph.attribute_dim());
    let stats = graph.load_stats();
    m.info("load.self-loops-dropped", stats.self_loops_dropped);
    m.info("load.duplicate-edges-merged", stats.duplicate_edges_merged);
    m.info("load.zero-weight-edges-dropped", stats.zero_weight_edges_dropped);
}

fn kv_block(entries: BTreeMap<String, String>) -> String {
    entries.into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

fn training_stats(e: &Embedded) -> String {
    let s = &e.outcome.stats;
    let mut m = BTreeMap::new();
    m.insert("train.batches".into(), s.batches.to_string());
    m.insert("train.updates".into(), s.updates.to_string());
    m.insert(
        "train.max_tangent_residual".into(),
        format!("{:e}", s.max_tangent_residual),
    );
    m.insert(
        "train.max_constraint_residual".into(),
        format!("{:e}", s.max_constraint_residual),
    );
    if let (Some(first), Some(last)) = (e.outcome.loss_trace.first(), e.outcome.loss_trace.last()) {
        m.insert("train.first_epoch_loss".into(), first.to_string());
        m.insert("train.final_epoch_loss".into(), last.to_string());
    }
    let mut text = e.sampler.to_string();
    text.push_str(&kv_block(m));
    text
}

fn print_reports(reports: &[EvalReport]) {
    for r in reports {
        println!("{r}");
    }
}

fn finish_eval(dir: &Path, reports: &[EvalReport], manifest: &Manifest) -> Result<(), CliError> {
    let mut rows: Vec<String> = reports.iter().flat_map(EvalReport::csv_rows).collect();
    rows.extend(aggregate_rows(reports));
    append_results(dir, &rows)?;
    write_text(&dir.join("manifest.txt"), &manifest.render())?;
    print_reports(reports);
    Ok(())
}

fn embed(data: &DataArgs, walk: &WalkArgs, train_args: &TrainArgs, run: &RunArgs) -> Result<(), CliError> {
    let walk_cfg = walk_config(walk, run.seed)?;
    let train_cfg = train_config(train_args, run.seed)?;
    let graph = prepare(data, Some(walk.alpha), false)?;
    let embedded = embed_graph(&graph, &walk_cfg, &train_cfg, train_args.dim, data.dense_threshold)?;

    let dir = &run.out;
    create_out_dir(dir)?;
    let ids = graph.ids();
    write_file(&dir.join("embedding.csv"), |w| {
        write_embedding_csv(w, ids, &embedded.outcome.embedding)
    })?;
    write_file(&dir.join("nodes.csv"), |w| {
        writeln!(w, "index,id")?;
        ids.iter().enumerate().try_for_each(|(i, id)| writeln!(w, "{i},{id}"))
    })?;
    write_file(&dir.join("loss.csv"), |w| {
        writeln!(w, "epoch,mean_loss")?;
        embedded
            .outcome
            .loss_trace
            .iter()
            .enumerate()
            .try_for_each(|(e, l)| writeln!(w, "{},{l}", e + 1))
    })?;
    write_text(&dir.join("stats.txt"), &training_stats(&embedded))?;

    let mut m = Manifest::new("embed");
    data.record(&mut m);
    walk.record(&mut m);
    train_args.record(&mut m);
    run.record(&mut m);
    record_graph(&mut m, &graph);
    write_text(&dir.join("manifest.txt"), &m.render())?;
    print!("{}", training_stats(&embedded));
    Ok(())
}

fn walks(data: &DataArgs, walk: &WalkArgs, run: &RunArgs) -> Result<(), CliError> {
    let walk_cfg = walk_config(walk, run.seed)?;
    let graph = prepare(data, Some(walk.alpha), false)?;
    let tables = tables(&graph, walk.alpha, data.dense_threshold)?;
    let set = generate_walks(&tables, &walk_cfg).stage("walk sampling")?;
    let corpus = extract_pairs(&set.walks, walk_cfg.context_size, graph.num_nodes()).stage("pair extraction")?;
    let stats = SamplerStats::new(&set.stats, &corpus, 0);

    let dir = &run.out;
    create_out_dir(dir)?;
    write_file(&dir.join("walks.txt"), |w| write_walks(w, &graph, &set.walks))?;
    write_text(&dir.join("stats.txt"), &stats.to_string())?;
    let mut m = Manifest::new("walks");
    data.record(&mut m);
    walk.record(&mut m);
    run.record(&mut m);
    record_graph(&mut m, &graph);
    write_text(&dir.join("manifest.txt"), &m.render())?;
    print!("{stats}");
    Ok(())
}

fn lp_split(data: &DataArgs, fraction: f64, run: &RunArgs) -> Result<(), CliError> {
    let graph = prepare(data, None, false)?;
    let split = split_edges(&graph, fraction, run.seed).stage("edge split")?;
    let dir = &run.out;
    create_out_dir(dir)?;
    write_file(&dir.join("train_edges.txt"), |w| {
        write_edge_list(w, &graph, &split.train_edges)
    })?;
    write_file(&dir.join("held_out_edges.txt"), |w| {
        write_edge_list(w, &graph, &split.held_out_edges)
    })?;
    write_file(&dir.join("non_edges.txt"), |w| {
        write_edge_list(w, &graph, &split.sampled_non_edges)
    })?;
    let mut m = Manifest::new("lp-split");
    data.record(&mut m);
    m.set("fraction", fraction);
    run.record(&mut m);
    record_graph(&mut m, &graph);
    m.info("split.train", split.train_edges.len());
    m.info("split.held-out", split.held_out_edges.len());
    m.info("split.non-edges", split.sampled_non_edges.len());
    write_text(&dir.join("manifest.txt"), &m.render())?;
    println!(
        "train_edges={}\nheld_out_edges={}\nnon_edges={}",
        split.train_edges.len(),
        split.held_out_edges.len(),
        split.sampled_non_edges.len()
    );
    Ok(())
}

fn eval_manifest(
    command: &str,
    data: &DataArgs,
    walk: &WalkArgs,
    train_args: &TrainArgs,
    reps: &RepArgs,
    run: &RunArgs,
) -> Manifest {
    let mut m = Manifest::new(command);
    data.record(&mut m);
    walk.record(&mut m);
    train_args.record(&mut m);
    m.set("reps", reps.reps);
    run.record(&mut m);
    for r in 0..reps.reps {
        m.info(&format!("rep-seed.{r}"), rep_seed(run.seed, r));
    }
    m
}

fn check_reps(reps: &RepArgs) -> Result<(), CliError> {
    if reps.reps == 0 {
        return Err(CliError::Config("--reps must be at least 1".into()));
    }
    Ok(())
}

fn annotate(report: &mut EvalReport, e: &Embedded, alpha: f64) {
    report.alpha = Some(alpha);
    if let (Some(first), Some(last)) = (e.outcome.loss_trace.first(), e.outcome.loss_trace.last()) {
        report.set_param("first_epoch_loss", first);
        report.set_param("final_epoch_loss", last);
    }
    report.set_param("pairs", e.sampler.pairs);
    report.set_param("rejection_cap_hits", e.sampler.rejection_cap_hits);
}

fn eval_reconstruction(
    data: &DataArgs,
    walk: &WalkArgs,
    train_args: &TrainArgs,
    reps: &RepArgs,
    threshold: usize,
    run: &RunArgs,
) -> Result<(), CliError> {
    check_reps(reps)?;
    walk_config(walk, run.seed)?;
    train_config(train_args, run.seed)?;
    let graph = prepare(data, Some(walk.alpha), false)?;
    let mut reports = Vec::with_capacity(reps.reps);
    for r in 0..reps.reps {
        let s = rep_seed(run.seed, r);
        let e = embed_graph(
            &graph,
            &walk_config(walk, s)?,
            &train_config(train_args, s)?,
            train_args.dim,
            data.dense_threshold,
        )?;
        let mut report = reconstruction_eval(&e.outcome.embedding, &graph, threshold, s).stage("reconstruction")?;
        annotate(&mut report, &e, walk.alpha);
        reports.push(report);
    }
    create_out_dir(&run.out)?;
    let mut m = eval_manifest("eval-reconstruction", data, walk, train_args, reps, run);
    m.set("full-pair-threshold", threshold);
    record_graph(&mut m, &graph);
    finish_eval(&run.out, &reports, &m)
}

fn eval_lp(
    data: &DataArgs,
    walk: &WalkArgs,
    train_args: &TrainArgs,
    reps: &RepArgs,
    fraction: f64,
    run: &RunArgs,
) -> Result<(), CliError> {
    check_reps(reps)?;
    walk_config(walk, run.seed)?;
    train_config(train_args, run.seed)?;
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(CliError::Config(format!(
            "--fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let graph = prepare(data, Some(walk.alpha), false)?;
    let mut reports = Vec::with_capacity(reps.reps);
    for r in 0..reps.reps {
        let s = rep_seed(run.seed, r);
        let split = split_edges(&graph, fraction, s).stage("edge split")?;
        let train_graph = split.training_graph(&graph).stage("edge split")?;
        let e = embed_graph(
            &train_graph,
            &walk_config(walk, s)?,
            &train_config(train_args, s)?,
            train_args.dim,
            data.dense_threshold,
        )?;
        let mut report = link_prediction_eval(&e.outcome.embedding, &split).stage("link prediction")?;
        report.fraction = Some(fraction);
        annotate(&mut report, &e, walk.alpha);
        reports.push(report);
    }
    create_out_dir(&run.out)?;
    let mut m = eval_manifest("eval-lp", data, walk, train_args, reps, run);
    m.set("fraction", fraction);
    record_graph(&mut m, &graph);
    finish_eval(&run.out, &reports, &m)
}

/// Reads an embedding and reorders its rows to the graph's node order.
fn aligned_embedding(path: &Path, graph: &AttributedGraph, sigma: f64) -> Result<HyperboloidEmbedding, CliError> {
    let file = File::open(path).map_err(io_err(path))?;
    let (ids, emb) = read_embedding_csv(&mut std::io::BufReader::new(file), sigma, EMBEDDING_TOLERANCE)
        .stage("reading embedding")?;
    let mut rows: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        if rows.insert(id, i).is_some() {
            return Err(CliError::Data(format!("embedding file lists node `{id}` twice")));
        }
    }
    let points = graph
        .ids()
        .iter()
        .map(|id| {
            rows.get(id.as_str())
                .map(|&i| emb.point(i).clone())
                .ok_or_else(|| CliError::Data(format!("embedding file has no row for node `{id}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    HyperboloidEmbedding::new(points, sigma).stage("reading embedding")
}

#[allow(clippy::too_many_arguments)]
fn eval_classify(
    data: &DataArgs,
    walk: &WalkArgs,
    train_args: &TrainArgs,
    reps: &RepArgs,
    fractions: &[f64],
    embedding: Option<&Path>,
    run: &RunArgs,
) -> Result<(), CliError> {
    check_reps(reps)?;
    if fractions.is_empty() {
        return Err(CliError::Config("--fractions is empty".into()));
    }
    if let Some(&f) = fractions.iter().find(|&&f| !(f > 0.0 && f < 1.0)) {
        return Err(CliError::Config(format!(
            "labelled fractions must lie in (0, 1), got {f}"
        )));
    }
    let trained = embedding.is_none();
    if trained {
        walk_config(walk, run.seed)?;
        train_config(train_args, run.seed)?;
    } else if let Some(p) = embedding {
        check_readable(p, "embedding")?;
    }
    let graph = prepare(data, trained.then_some(walk.alpha), true)?;
    let labels = graph
        .labels()
        .ok_or_else(|| CliError::Config("classification needs --labels".into()))?;
    let given = embedding
        .map(|p| aligned_embedding(p, &graph, train_args.sigma))
        .transpose()?;
    let config = LogisticConfig::default();
    let mut reports = Vec::new();
    for r in 0..reps.reps {
        let s = rep_seed(run.seed, r);
        let e = match &given {
            Some(_) => None,
            None => Some(embed_graph(
                &graph,
                &walk_config(walk, s)?,
                &train_config(train_args, s)?,
                train_args.dim,
                data.dense_threshold,
            )?),
        };
        let emb = e
            .as_ref()
            .map_or_else(|| given.as_ref().expect("embedding given"), |e| &e.outcome.embedding);
        for &f in fractions {
            let mut report = classify_eval(emb, labels, f, s, &config).stage("classification")?;
            if let Some(e) = &e {
                annotate(&mut report, e, walk.alpha);
            }
            reports.push(report);
        }
    }
    create_out_dir(&run.out)?;
    let mut m = eval_manifest("eval-classify", data, walk, train_args, reps, run);
    m.set(
        "fractions",
        fractions.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
    );
    if let Some(p) = embedding {
        m.set("embedding", p.display());
    }
    record_graph(&mut m, &graph);
    finish_eval(&run.out, &reports, &m)
}

fn project(embedding: &Path, model: Model, check: bool, run: &RunArgs) -> Result<(), CliError> {
    check_readable(embedding, "embedding")?;
    let file = File::open(embedding).map_err(io_err(embedding))?;
    let (ids, emb) =
        read_embedding_csv(&mut std::io::BufReader::new(file), 1.0, EMBEDDING_TOLERANCE).stage("reading embedding")?;
    type Map = fn(&HyperboloidPoint) -> Vec<f64>;
    type Lift = fn(&[f64]) -> hyperwalk::Result<HyperboloidPoint>;
    let (map, lift, prefix): (Map, Lift, &str) = match model {
        Model::Klein => (to_klein, lift_klein, "k"),
        Model::Poincare => (to_poincare, lift_poincare, "p"),
    };
    let projected: Vec<Vec<f64>> = emb.points().iter().map(map).collect();

    let dir = &run.out;
    create_out_dir(dir)?;
    let path = dir.join(format!("{}.csv", model.name()));
    write_file(&path, |w| {
        write!(w, "id")?;
        (1..=emb.dim()).try_for_each(|k| write!(w, ",{prefix}{k}"))?;
        writeln!(w)?;
        for (id, row) in ids.iter().zip(&projected) {
            write!(w, "{id}")?;
            row.iter().try_for_each(|c| write!(w, ",{c:.16e}"))?;
            writeln!(w)?;
        }
        Ok(())
    })?;
    let mut m = Manifest::new("project");
    m.set("embedding", embedding.display());
    m.set("model", model.name());
    m.set("check", check);
    run.record(&mut m);
    m.info("nodes", ids.len());
    m.info("dim", emb.dim());
    write_text(&dir.join("manifest.txt"), &m.render())?;

    if check {
        let mut worst: f64 = 0.0;
        for (p, row) in emb.points().iter().zip(&projected) {
            let back = lift(row).stage("lifting projection")?;
            let scale = p.time().max(1.0);
            for (a, b) in back.coords().iter().zip(p.coords()) {
                worst = worst.max((a - b).abs() / scale);
            }
        }
        println!("round_trip_max_residual={worst:e}");
        if !(worst <= ROUND_TRIP_TOLERANCE) {
            return Err(CliError::Numeric(format!(
                "{} round trip residual {worst:e} exceeds {ROUND_TRIP_TOLERANCE:e}",
                model.name()
            )));
        }
    }
    Ok(())
}
