use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperwalk::evaluation::{DEFAULT_FULL_PAIR_THRESHOLD, DEFAULT_HOLDOUT_FRACTION};
use hyperwalk::graph::DEFAULT_DENSE_THRESHOLD;

use crate::manifest::Manifest;

#[derive(Debug, Parser)]
#[command(
    name = "hyperwalk",
    version,
    about = "Attributed network embedding on the hyperboloid"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train an embedding and write it with its loss trace and manifest.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Embed {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        walk: WalkArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Dump the teleport random walks.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Walks {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        walk: WalkArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Write a link-prediction edge split.
    #[command(name = "lp-split", args_override_self = true, allow_negative_numbers = true)]
    LpSplit {
        #[command(flatten)]
        data: DataArgs,
        /// Fraction of edges held out.
        #[arg(long, default_value_t = DEFAULT_HOLDOUT_FRACTION)]
        fraction: f64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Train on the full graph and score edge reconstruction.
    #[command(
        name = "eval-reconstruction",
        args_override_self = true,
        allow_negative_numbers = true
    )]
    EvalReconstruction {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        walk: WalkArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[command(flatten)]
        reps: RepArgs,
        /// Node count above which non-edges are subsampled.
        #[arg(long, default_value_t = DEFAULT_FULL_PAIR_THRESHOLD)]
        full_pair_threshold: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Hold out edges, train on the rest and score the held-out edges.
    #[command(name = "eval-lp", args_override_self = true, allow_negative_numbers = true)]
    EvalLp {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        walk: WalkArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[command(flatten)]
        reps: RepArgs,
        /// Fraction of edges held out.
        #[arg(long, default_value_t = DEFAULT_HOLDOUT_FRACTION)]
        fraction: f64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Node classification from Klein coordinates over a labelled-fraction grid.
    #[command(name = "eval-classify", args_override_self = true, allow_negative_numbers = true)]
    EvalClassify {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        walk: WalkArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[command(flatten)]
        reps: RepArgs,
        /// Labelled fractions, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.02,0.04,0.06,0.08,0.1")]
        fractions: Vec<f64>,
        /// Classify an existing embedding instead of training one.
        #[arg(long)]
        embedding: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Map an embedding file to the Klein or Poincaré ball.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Project {
        #[arg(long)]
        embedding: PathBuf,
        #[arg(long, value_enum, default_value_t = Model::Klein)]
        model: Model,
        /// Lift the projection back and report the round-trip residual.
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        run: RunArgs,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Embed { .. } => "embed",
            Command::Walks { .. } => "walks",
            Command::LpSplit { .. } => "lp-split",
            Command::EvalReconstruction { .. } => "eval-reconstruction",
            Command::EvalLp { .. } => "eval-lp",
            Command::EvalClassify { .. } => "eval-classify",
            Command::Project { .. } => "project",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Klein,
    Poincare,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Klein => "klein",
            Model::Poincare => "poincare",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Edge list: `src dst [weight]` per line.
    #[arg(long)]
    pub edges: PathBuf,
    /// Attribute CSV with header `id,f1,...,fd`.
    #[arg(long)]
    pub attributes: Option<PathBuf>,
    /// Label CSV: `id,label` or `id,l1;l2;...`.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Standardize attribute columns before computing similarities.
    #[arg(long)]
    pub standardize: bool,
    /// Largest node count for which the similarity matrix is materialized.
    #[arg(long, default_value_t = DEFAULT_DENSE_THRESHOLD)]
    pub dense_threshold: usize,
}

#[derive(Debug, Clone, Args)]
pub struct WalkArgs {
    #[arg(long, default_value_t = 10)]
    pub walks_per_node: usize,
    #[arg(long, default_value_t = 80)]
    pub walk_length: usize,
    /// Context window size.
    #[arg(long, default_value_t = 3)]
    pub context: usize,
    /// Attribute teleport probability.
    #[arg(long, default_value_t = 0.2)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    /// Hyperbolic dimension n.
    #[arg(long, default_value_t = 10)]
    pub dim: usize,
    #[arg(long, default_value_t = 0.3)]
    pub lr: f64,
    #[arg(long, default_value_t = 5)]
    pub epochs: usize,
    #[arg(long, default_value_t = 10)]
    pub negatives: usize,
    #[arg(long, default_value_t = 50)]
    pub batch: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Only update sources, never the sampled negatives.
    #[arg(long)]
    pub no_negative_updates: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RepArgs {
    /// Number of repetitions; each derives its own seed.
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Take every unspecified flag from this manifest.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

fn path(p: &std::path::Path) -> String {
    p.display().to_string()
}

impl DataArgs {
    pub fn record(&self, m: &mut Manifest) {
        m.set("edges", path(&self.edges));
        if let Some(a) = &self.attributes {
            m.set("attributes", path(a));
        }
        if let Some(l) = &self.labels {
            m.set("labels", path(l));
        }
        m.set("standardize", self.standardize);
        m.set("dense-threshold", self.dense_threshold);
    }
}

impl WalkArgs {
    pub fn record(&self, m: &mut Manifest) {
        m.set("walks-per-node", self.walks_per_node);
        m.set("walk-length", self.walk_length);
        m.set("context", self.context);
        m.set("alpha", self.alpha);
    }
}

impl TrainArgs {
    pub fn record(&self, m: &mut Manifest) {
        m.set("dim", self.dim);
        m.set("lr", self.lr);
        m.set("epochs", self.epochs);
        m.set("negatives", self.negatives);
        m.set("batch", self.batch);
        m.set("sigma", self.sigma);
        m.set("no-negative-updates", self.no_negative_updates);
    }
}

impl RunArgs {
    pub fn record(&self, m: &mut Manifest) {
        m.set("seed", self.seed);
        m.set("out", path(&self.out));
    }
}
