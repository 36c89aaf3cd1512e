use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gnncost::config::PipelineConfig;
use gnncost::pipeline::{self, Layout, TimingSource};
use gnncost::selector::choose_repr;
use gnncost::{compute_metrics, parse_edge_list, GnnModelKind, Representation};

/// Exit status when generation stops short of the requested count.
const EXIT_SHORTFALL: u8 = 3;

#[derive(Parser)]
#[command(name = "gnncost", version, about = "Predict GNN epoch time and choose a graph representation")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the RMAT corpus and its manifest.
    Generate {
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, value_enum)]
        balance: Option<OnOff>,
    },
    /// Compute metrics.csv for every graph in a manifest.
    Metrics {
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Exact clustering instead of wedge sampling.
        #[arg(long)]
        exact: bool,
    },
    /// Produce timings.csv from the oracle or an external timing CSV.
    Measure {
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, conflicts_with = "timings")]
        oracle: bool,
        #[arg(long)]
        timings: Option<PathBuf>,
    },
    /// Fit compound models, one per (model kind, representation).
    Fit {
        #[arg(long)]
        metrics: Option<PathBuf>,
        #[arg(long)]
        timings: Option<PathBuf>,
        #[arg(long)]
        model_kind: Option<GnnModelKind>,
        #[arg(long)]
        repr: Option<Representation>,
    },
    /// Score the fitted models and the representation choices.
    Evaluate {
        #[arg(long)]
        models: Option<PathBuf>,
        #[arg(long)]
        metrics: Option<PathBuf>,
        #[arg(long)]
        timings: Option<PathBuf>,
    },
    /// Predict epoch times for one edge-list file.
    Predict {
        graph: PathBuf,
        #[arg(long)]
        models: Option<PathBuf>,
        #[arg(long)]
        model_kind: Option<GnnModelKind>,
        #[arg(long)]
        repr: Option<Representation>,
    },
}

fn load_config(g: &Global) -> gnncost::Result<PipelineConfig> {
    let mut cfg = match (&g.config, g.seed) {
        (Some(path), _) => PipelineConfig::load(path)?,
        (None, Some(seed)) => PipelineConfig::with_seed(seed),
        (None, None) => {
            return Err(gnncost::Error::InvalidParams("either --config or --seed is required".into()));
        }
    };
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &g.out {
        cfg.output_dir = out.clone();
    }
    if let Some(w) = g.workers {
        cfg.workers = w.max(1);
    }
    Ok(cfg)
}

fn or(path: &Option<PathBuf>, default: PathBuf) -> PathBuf {
    path.clone().unwrap_or(default)
}

fn run(cli: Cli) -> gnncost::Result<ExitCode> {
    let mut cfg = load_config(&cli.global)?;
    let layout = Layout::new(&cfg.output_dir);
    match cli.command {
        Command::Generate { count, balance } => {
            if let Some(c) = count {
                cfg.dataset.count = c;
            }
            if let Some(b) = balance {
                cfg.dataset.balance = matches!(b, OnOff::On);
            }
            let manifest = pipeline::generate(&cfg)?;
            eprintln!(
                "generated {} graphs in {} attempts -> {}",
                manifest.entries.len(),
                manifest.attempts,
                layout.manifest().display()
            );
            if let Some(s) = &manifest.shortfall {
                eprintln!("shortfall: {} graphs missing, {} bins unfilled", s.missing, s.unfilled.len());
                return Ok(ExitCode::from(EXIT_SHORTFALL));
            }
        }
        Command::Metrics { manifest, exact } => {
            cfg.clustering.exact |= exact;
            let rows = pipeline::metrics(&cfg, &or(&manifest, layout.manifest()))?;
            eprintln!("{} rows -> {}", rows.len(), layout.metrics().display());
        }
        Command::Measure { manifest, oracle: _, timings } => {
            let source = match timings.or_else(|| cfg.timings.clone()) {
                Some(p) => TimingSource::Csv(p),
                None => TimingSource::Oracle,
            };
            let recs = pipeline::measure(&cfg, &or(&manifest, layout.manifest()), &source)?;
            eprintln!("{} timings -> {}", recs.len(), layout.timings().display());
        }
        Command::Fit { metrics, timings, model_kind, repr } => {
            let models = pipeline::fit(
                &cfg,
                &or(&metrics, layout.metrics()),
                &or(&timings, layout.timings()),
                model_kind,
                repr,
            )?;
            for m in &models {
                eprintln!("{} -> {}", m.model, layout.model_file(m.model, m.repr).display());
            }
        }
        Command::Evaluate { models, metrics, timings } => {
            let report = pipeline::evaluate(
                &cfg,
                &or(&models, layout.models_dir()),
                &or(&metrics, layout.metrics()),
                &or(&timings, layout.timings()),
            )?;
            for d in &report.regression {
                println!(
                    "{:<5} {:<10} r2 {:.4}  mape {:.4}  mse {:.4}",
                    d.model, d.repr, d.scores.r2, d.scores.mape, d.scores.mse
                );
            }
            for s in &report.selection.models {
                println!(
                    "{:<5} accuracy {:.4}  speedup vs random {:.4}  vs worst {:.4}",
                    s.model, s.accuracy, s.speedup_vs_random, s.speedup_vs_worst
                );
            }
        }
        Command::Predict { graph, models, model_kind, repr } => {
            println!("{}", predict(&cfg, &graph, &or(&models, layout.models_dir()), model_kind, repr)?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn predict(
    cfg: &PipelineConfig,
    graph: &Path,
    models_dir: &Path,
    model_kind: Option<GnnModelKind>,
    repr: Option<Representation>,
) -> gnncost::Result<String> {
    if !graph.exists() {
        return Err(gnncost::Error::MissingFile(graph.to_path_buf()));
    }
    let g = parse_edge_list(&std::fs::read_to_string(graph)?)?;
    let id = graph.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let met = compute_metrics(&g, pipeline::clustering_mode_for(cfg, &id))?;
    let lookup = Layout::new(models_dir.parent().unwrap_or(Path::new(".")));
    let files: Vec<PathBuf> = pipeline::designs_for(&cfg.models, model_kind, repr)
        .into_iter()
        .map(|(m, r)| models_dir.join(lookup.model_file(m, r).file_name().unwrap()))
        .collect();
    let preds = pipeline::predict(&files, &met)?;
    let mut choices = serde_json::Map::new();
    for kind in GnnModelKind::ALL {
        let find = |r| preds.iter().find(|p| p.model == kind && p.repr == r).map(|p| p.epoch_time_ms);
        if let (Some(s), Some(e)) = (find(Representation::Sparse), find(Representation::EdgeList)) {
            choices.insert(kind.to_string(), serde_json::to_value(choose_repr(s, e))?);
        }
    }
    let out = serde_json::json!({
        "graph": graph,
        "metrics": met,
        "predictions": preds,
        "choice": choices,
    });
    Ok(serde_json::to_string_pretty(&out)?)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
